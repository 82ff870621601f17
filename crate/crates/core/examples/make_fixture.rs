//! Writes a synthetic video (pool manifest + embeddings) for trying the CLI.
//!
//! cargo run --example make_fixture -- <dir> [seconds] [seed]

use std::path::PathBuf;

use framesel::binfmt::{self, StoredMatrix};
use framesel::{build_pool, VideoMeta};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn gaussian(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f32> {
    (0..dim).map(|_| rng.sample::<f32, _>(StandardNormal)).collect()
}

fn main() -> framesel::Result<()> {
    let mut args = std::env::args().skip(1);
    let dir = PathBuf::from(args.next().unwrap_or_else(|| "demo".into()));
    let seconds: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(300);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(7);
    std::fs::create_dir_all(&dir).expect("cannot create output directory");

    let fps = 30.0;
    let pool = build_pool(VideoMeta::new("demo", fps, (seconds as f64 * fps) as u64)?, 1000)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // A handful of "scenes"; each candidate is a noisy copy of its scene.
    let (dim, scenes) = (16, 6);
    let centers: Vec<Vec<f32>> = (0..scenes).map(|_| gaussian(&mut rng, dim)).collect();
    let n = pool.len();
    let mut semantic = Vec::with_capacity(n);
    let mut relevance = Vec::with_capacity(n);
    for i in 0..n {
        let c = &centers[i * scenes / n];
        let noise = gaussian(&mut rng, dim);
        semantic.push(c.iter().zip(&noise).map(|(a, b)| a + 0.3 * b).collect::<Vec<_>>());
        relevance.push(gaussian(&mut rng, dim));
    }
    let query = gaussian(&mut rng, dim);

    let mut manifest = pool.to_manifest();
    binfmt::write_file(&dir.join("demo.rel.bin"), &StoredMatrix::from_rows(&relevance)?)?;
    binfmt::write_file(&dir.join("demo.sem.bin"), &StoredMatrix::from_rows(&semantic)?)?;
    binfmt::write_file(&dir.join("demo.query.bin"), &StoredMatrix::from_rows(&[query])?)?;
    manifest.relevance_embeddings = Some("demo.rel.bin".into());
    manifest.semantic_embeddings = Some("demo.sem.bin".into());
    manifest.query_embedding = Some("demo.query.bin".into());
    let path = dir.join("demo.manifest.json");
    manifest.write(&path)?;
    println!("{}", path.display());
    Ok(())
}
