#![allow(dead_code)]

use std::path::{Path, PathBuf};

use framesel::binfmt::{self, StoredMatrix};
use framesel::pool::{CandidatePool, VideoMeta};

/// Writes a pool manifest plus its three embedding files into `dir`.
pub fn write_fixture(
    dir: &Path,
    video_id: &str,
    relevance: &[Vec<f32>],
    query: &[f32],
    semantic: &[Vec<f32>],
) -> PathBuf {
    let n = semantic.len() as u64;
    let pool = CandidatePool::build(VideoMeta::new(video_id, 1.0, n).unwrap(), 1000).unwrap();
    let mut manifest = pool.to_manifest();
    let rel = format!("{video_id}.rel.bin");
    let sem = format!("{video_id}.sem.bin");
    let qry = format!("{video_id}.query.bin");
    binfmt::write_file(&dir.join(&rel), &StoredMatrix::from_rows(relevance).unwrap()).unwrap();
    binfmt::write_file(&dir.join(&sem), &StoredMatrix::from_rows(semantic).unwrap()).unwrap();
    binfmt::write_file(&dir.join(&qry), &StoredMatrix::from_rows(&[query.to_vec()]).unwrap()).unwrap();
    manifest.relevance_embeddings = Some(rel);
    manifest.semantic_embeddings = Some(sem);
    manifest.query_embedding = Some(qry);
    let path = dir.join(format!("{video_id}.manifest.json"));
    manifest.write(&path).unwrap();
    path
}

/// Three candidates whose raw-ReLU relevance is `[0.2, 0.9, 0.5]` against
/// the query `e1`; semantic rows are pairwise distinct.
pub fn three_candidate_fixture(dir: &Path) -> PathBuf {
    let rel = |c: f32| vec![c, (1.0 - c * c).sqrt()];
    write_fixture(
        dir,
        "three",
        &[rel(0.2), rel(0.9), rel(0.5)],
        &[1.0, 0.0],
        &[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]],
    )
}

/// Seven identical semantic rows (a duplicate cluster) followed by three
/// mutually orthogonal outliers.
pub fn duplicate_cluster_rows() -> Vec<Vec<f32>> {
    let mut rows = vec![vec![1.0, 0.0, 0.0, 0.0]; 7];
    rows.push(vec![0.0, 1.0, 0.0, 0.0]);
    rows.push(vec![0.0, 0.0, 1.0, 0.0]);
    rows.push(vec![0.0, 0.0, 0.0, 1.0]);
    rows
}

/// `sum_j (max(-1, max_{i in S} <d_j, d_i>) + 1)`, straight from the
/// definition with 1-based positions in `set`.
pub fn coverage_by_definition(rows: &[Vec<f64>], set: &[usize]) -> f64 {
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    rows.iter()
        .map(|dj| {
            let best = set
                .iter()
                .map(|&i| dot(dj, &rows[i - 1]))
                .fold(-1.0f64, f64::max);
            best + 1.0
        })
        .sum()
}

/// Seven-class synthetic corpus: each type owns five keywords; every
/// question mixes two of its type's keywords with shared filler words.
pub fn keyword_corpus(per_class: usize) -> Vec<(String, String)> {
    let keywords: [[&str; 5]; 7] = [
        ["plot", "story", "storyline", "narrative", "happens"],
        ["needle", "inserted", "hidden", "clip", "specific"],
        ["ego", "camera", "wearer", "firstperson", "holding"],
        ["count", "many", "number", "times", "total"],
        ["order", "sequence", "first", "before", "after"],
        ["anomaly", "unusual", "abnormal", "strange", "recognize"],
        ["topic", "theme", "overall", "about", "reasoning"],
    ];
    let fillers = ["what", "the", "in", "video", "is", "of", "does", "which"];
    let mut out = Vec::new();
    for (c, kw) in keywords.iter().enumerate() {
        let label = framesel::router::DEFAULT_TYPES[c];
        for i in 0..per_class {
            let a = kw[i % 5];
            let b = kw[(i / 5 + i + 1) % 5];
            let f1 = fillers[(i + c) % fillers.len()];
            let f2 = fillers[(3 * i + 1) % fillers.len()];
            out.push((label.to_string(), format!("{f1} {a} {f2} {b}?")));
        }
    }
    out
}
