//! Normalized embeddings in the relevance and semantic spaces, the modular
//! relevance scores derived from them, and the semantic similarity matrix.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::binfmt::{self, StoredMatrix};
use crate::error::{Error, Result};
use crate::pool::{CandidatePool, PoolManifest};
use crate::scalar::{dot, Scalar};

/// Tolerance on unit row norms after normalization.
pub const NORM_TOLERANCE: f64 = 1e-5;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Format(format!(
                "{} values do not fill a {rows} x {cols} matrix",
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Format("rows have differing lengths".into()));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    pub fn from_stored(m: &StoredMatrix) -> Self {
        Matrix {
            rows: m.rows,
            cols: m.dim,
            data: m.data.iter().map(|&v| T::from_stored(v)).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    /// L2-normalizes every row in place. `which` names the matrix in errors.
    pub fn normalize_rows(&mut self, which: &str) -> Result<()> {
        let cols = self.cols;
        for (row, chunk) in self.data.chunks_mut(cols.max(1)).enumerate() {
            normalize_in_place(chunk, which, row)?;
        }
        if cols == 0 && self.rows > 0 {
            return Err(Error::DegenerateEmbedding {
                which: which.to_string(),
                row: 0,
            });
        }
        Ok(())
    }
}

fn normalize_in_place<T: Scalar>(v: &mut [T], which: &str, row: usize) -> Result<()> {
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::Format(format!("{which} row {row} contains a non-finite value")));
    }
    let norm = dot(v, v).sqrt();
    if norm == T::zero() || !norm.is_finite() {
        return Err(Error::DegenerateEmbedding {
            which: which.to_string(),
            row,
        });
    }
    for x in v.iter_mut() {
        *x = *x / norm;
    }
    Ok(())
}

/// Per-candidate embeddings in pool order plus the query text embedding,
/// all unit-normalized.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingSet<T> {
    video_id: String,
    relevance: Matrix<T>,
    query: Vec<T>,
    semantic: Matrix<T>,
}

impl<T: Scalar> EmbeddingSet<T> {
    /// Validates shapes and normalizes all rows and the query.
    pub fn new(
        video_id: impl Into<String>,
        mut relevance: Matrix<T>,
        mut query: Vec<T>,
        mut semantic: Matrix<T>,
    ) -> Result<Self> {
        if relevance.rows() != semantic.rows() {
            return Err(Error::Alignment(format!(
                "relevance embeddings have {} rows but semantic embeddings have {}",
                relevance.rows(),
                semantic.rows()
            )));
        }
        if query.len() != relevance.cols() {
            return Err(Error::Alignment(format!(
                "query dimension {} differs from relevance dimension {}",
                query.len(),
                relevance.cols()
            )));
        }
        relevance.normalize_rows("relevance embeddings")?;
        semantic.normalize_rows("semantic embeddings")?;
        normalize_in_place(&mut query, "query embedding", 0)?;
        Ok(EmbeddingSet {
            video_id: video_id.into(),
            relevance,
            query,
            semantic,
        })
    }

    /// Loads raw stored matrices and checks their row count against `pool`.
    pub fn from_stored(
        pool: &CandidatePool,
        relevance: &StoredMatrix,
        query: &StoredMatrix,
        semantic: &StoredMatrix,
    ) -> Result<Self> {
        let n = pool.len();
        for (name, m) in [("relevance", relevance), ("semantic", semantic)] {
            if m.rows != n {
                return Err(Error::Alignment(format!(
                    "{name} embeddings have {} rows but the pool has {n} candidates",
                    m.rows
                )));
            }
        }
        if query.rows != 1 {
            return Err(Error::Format(format!(
                "query embedding must have exactly one row, found {}",
                query.rows
            )));
        }
        Self::new(
            pool.meta().video_id.clone(),
            Matrix::from_stored(relevance),
            query.data.iter().map(|&v| T::from_stored(v)).collect(),
            Matrix::from_stored(semantic),
        )
    }

    pub fn video_id(&self) -> &str {
        &self.video_id
    }

    pub fn len(&self) -> usize {
        self.relevance.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn relevance(&self) -> &Matrix<T> {
        &self.relevance
    }

    pub fn semantic(&self) -> &Matrix<T> {
        &self.semantic
    }

    pub fn query(&self) -> &[T] {
        &self.query
    }

    /// Raw cosines between each relevance row and the query.
    pub fn query_cosines(&self) -> Vec<T> {
        (0..self.len())
            .map(|i| dot(self.relevance.row(i), &self.query))
            .collect()
    }

    pub fn relevance_scores(&self, mode: RelevanceMode) -> RelevanceScores<T> {
        relevance_scores(self, mode)
    }

    pub fn similarity_matrix(&self) -> SimilarityMatrix<T> {
        similarity_matrix(self)
    }
}

/// Embeddings and the pool they are aligned with, as referenced by a manifest.
#[derive(Debug, Clone)]
pub struct LoadedVideo<T> {
    pub manifest: PoolManifest,
    pub pool: CandidatePool,
    pub embeddings: EmbeddingSet<T>,
}

fn resolve(base: &Path, rel: &str) -> PathBuf {
    let p = Path::new(rel);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

/// Reads a manifest with attached embedding paths and loads everything it
/// references. Paths are resolved against the manifest's directory.
pub fn load_embeddings<T: Scalar>(manifest_path: &Path) -> Result<LoadedVideo<T>> {
    let manifest = PoolManifest::read(manifest_path)?;
    let pool = manifest.to_pool()?;
    let base = manifest_path.parent().unwrap_or_else(|| Path::new("."));
    let field = |v: &Option<String>, key: &str| -> Result<PathBuf> {
        v.as_deref()
            .map(|p| resolve(base, p))
            .ok_or_else(|| Error::Format(format!("manifest is missing `{key}`")))
    };
    let relevance = binfmt::read_file(&field(&manifest.relevance_embeddings, "relevance_embeddings")?)?;
    let semantic = binfmt::read_file(&field(&manifest.semantic_embeddings, "semantic_embeddings")?)?;
    let query = binfmt::read_file(&field(&manifest.query_embedding, "query_embedding")?)?;
    let embeddings = EmbeddingSet::from_stored(&pool, &relevance, &query, &semantic)?;
    Ok(LoadedVideo {
        manifest,
        pool,
        embeddings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelevanceMode {
    /// `max(<v_i, t>, 0)`.
    #[default]
    RawRelu,
    /// Z-score over the video's raw cosines, ReLU, then divide by the max.
    ZscoreReluMaxnorm,
}

impl RelevanceMode {
    pub fn as_str(self) -> &'static str {
        match self {
            RelevanceMode::RawRelu => "raw_relu",
            RelevanceMode::ZscoreReluMaxnorm => "zscore_relu_maxnorm",
        }
    }
}

impl fmt::Display for RelevanceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RelevanceMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "raw_relu" => Ok(RelevanceMode::RawRelu),
            "zscore_relu_maxnorm" | "zscore" => Ok(RelevanceMode::ZscoreReluMaxnorm),
            other => Err(Error::Parameter(format!("unknown relevance mode `{other}`"))),
        }
    }
}

/// Non-negative per-candidate relevance `r_i` in pool order.
#[derive(Debug, Clone, PartialEq)]
pub struct RelevanceScores<T> {
    scores: Vec<T>,
    mode: RelevanceMode,
}

impl<T: Scalar> RelevanceScores<T> {
    /// Wraps precomputed scores; they must be finite and non-negative.
    pub fn from_scores(scores: Vec<T>, mode: RelevanceMode) -> Result<Self> {
        if let Some(i) = scores.iter().position(|s| !s.is_finite() || *s < T::zero()) {
            return Err(Error::Parameter(format!(
                "relevance score {} at position {} is not a finite non-negative value",
                scores[i],
                i + 1
            )));
        }
        Ok(RelevanceScores { scores, mode })
    }

    /// Applies `mode` to raw query cosines.
    pub fn from_cosines(cosines: &[T], mode: RelevanceMode) -> Self {
        let scores = match mode {
            RelevanceMode::RawRelu => cosines.iter().map(|&c| c.max(T::zero())).collect(),
            RelevanceMode::ZscoreReluMaxnorm => zscore_relu_maxnorm(cosines),
        };
        RelevanceScores { scores, mode }
    }

    pub fn as_slice(&self) -> &[T] {
        &self.scores
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn mode(&self) -> RelevanceMode {
        self.mode
    }
}

fn zscore_relu_maxnorm<T: Scalar>(c: &[T]) -> Vec<T> {
    let n = c.len();
    if n == 0 {
        return Vec::new();
    }
    let nf = T::lit(n as f64);
    let mean = c.iter().copied().sum::<T>() / nf;
    let var = c.iter().map(|&x| (x - mean) * (x - mean)).sum::<T>() / nf;
    let std = var.sqrt();
    #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN std counts as degenerate
    if !(std > T::zero()) {
        return vec![T::zero(); n];
    }
    let relu: Vec<T> = c.iter().map(|&x| ((x - mean) / std).max(T::zero())).collect();
    let max = relu.iter().copied().fold(T::zero(), T::max);
    if max > T::zero() {
        relu.into_iter().map(|z| z / max).collect()
    } else {
        relu
    }
}

pub fn relevance_scores<T: Scalar>(es: &EmbeddingSet<T>, mode: RelevanceMode) -> RelevanceScores<T> {
    RelevanceScores::from_cosines(&es.query_cosines(), mode)
}

/// Problems found by [`SimilarityMatrix::validate`].
#[derive(Debug, Clone, PartialEq)]
pub enum MatrixIssue {
    Asymmetric { row: usize, col: usize, delta: f64 },
    Diagonal { index: usize, value: f64 },
    OutOfRange { row: usize, col: usize, value: f64 },
}

impl fmt::Display for MatrixIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatrixIssue::Asymmetric { row, col, delta } => {
                write!(f, "asymmetric at ({row}, {col}): |s_jk - s_kj| = {delta:e}")
            }
            MatrixIssue::Diagonal { index, value } => {
                write!(f, "diagonal entry {index} is {value}, expected 1")
            }
            MatrixIssue::OutOfRange { row, col, value } => {
                write!(f, "entry ({row}, {col}) = {value} lies outside [-1, 1]")
            }
        }
    }
}

/// `values[j][i] = <d_j, d_i>` over semantic rows, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix<T> {
    n: usize,
    values: Vec<T>,
}

impl<T: Scalar> SimilarityMatrix<T> {
    /// Gram matrix of the rows of `m`, computed row-parallel. Each entry is
    /// an index-ordered dot product, so the result is exactly symmetric.
    pub fn gram(m: &Matrix<T>) -> Self {
        let n = m.rows();
        let mut values = vec![T::zero(); n * n];
        if n > 0 {
            values.par_chunks_mut(n).enumerate().for_each(|(j, out)| {
                let dj = m.row(j);
                for (i, slot) in out.iter_mut().enumerate() {
                    *slot = dot(dj, m.row(i));
                }
            });
        }
        SimilarityMatrix { n, values }
    }

    /// Wraps explicit values without checking the similarity invariants;
    /// use [`validate`](Self::validate) to inspect them.
    pub fn from_values(n: usize, values: Vec<T>) -> Result<Self> {
        if values.len() != n * n {
            return Err(Error::Format(format!(
                "{} values do not fill a {n} x {n} matrix",
                values.len()
            )));
        }
        Ok(SimilarityMatrix { n, values })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, j: usize, i: usize) -> T {
        self.values[j * self.n + i]
    }

    pub fn row(&self, j: usize) -> &[T] {
        &self.values[j * self.n..(j + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.values
    }

    pub fn transposed(&self) -> Self {
        let n = self.n;
        let mut values = vec![T::zero(); n * n];
        for j in 0..n {
            for i in 0..n {
                values[i * n + j] = self.values[j * n + i];
            }
        }
        SimilarityMatrix { n, values }
    }

    /// Checks symmetry and unit diagonal within 1e-5 and the [-1, 1] range
    /// within 1e-6. Returns every violation found.
    // Negated comparisons so that NaN entries are reported.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Vec<MatrixIssue> {
        let n = self.n;
        let mut issues = Vec::new();
        for j in 0..n {
            let d = self.get(j, j).as_f64();
            if !((d - 1.0).abs() <= 1e-5) {
                issues.push(MatrixIssue::Diagonal { index: j, value: d });
            }
            for i in 0..n {
                let v = self.get(j, i).as_f64();
                if !(-1.0 - 1e-6..=1.0 + 1e-6).contains(&v) {
                    issues.push(MatrixIssue::OutOfRange { row: j, col: i, value: v });
                }
                if i > j {
                    let delta = (v - self.get(i, j).as_f64()).abs();
                    if !(delta <= 1e-5) {
                        issues.push(MatrixIssue::Asymmetric { row: j, col: i, delta });
                    }
                }
            }
        }
        issues
    }
}

pub fn similarity_matrix<T: Scalar>(es: &EmbeddingSet<T>) -> SimilarityMatrix<T> {
    SimilarityMatrix::gram(es.semantic())
}
