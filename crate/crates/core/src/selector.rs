//! Greedy maximization of `F(S) = alpha * R(S) + beta * C(S)` under `|S| <= K`.
//!
//! `R` is the modular relevance sum and `C` the facility-location coverage
//! `sum_j (c_j(S) - b)` with `c_j(S) = max(b, max_{i in S} s_{j,i})` and
//! baseline `b = -1`, so `C(empty) = 0` and `0 <= C <= 2N`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::embedding::{RelevanceScores, SimilarityMatrix};
use crate::error::{Error, Result};
use crate::pool::{CandidatePool, Position};
use crate::preset::Preset;
use crate::scalar::Scalar;

pub const DEFAULT_BUDGET: usize = 32;

/// Coverage baseline `b`.
pub const BASELINE: f64 = -1.0;

/// Running per-candidate coverage `c_j` of a selected set.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageState<T> {
    coverage: Vec<T>,
    selected: Vec<bool>,
    order: Vec<Position>,
}

impl<T: Scalar> CoverageState<T> {
    pub fn empty(n: usize) -> Self {
        CoverageState {
            coverage: vec![T::lit(BASELINE); n],
            selected: vec![false; n],
            order: Vec::new(),
        }
    }

    pub fn coverage(&self) -> &[T] {
        &self.coverage
    }

    /// Selected positions in insertion order.
    pub fn selected(&self) -> &[Position] {
        &self.order
    }

    pub fn contains(&self, p: Position) -> bool {
        self.selected.get(p.index()).copied().unwrap_or(false)
    }

    /// `C(S) = sum_j (c_j - b)`.
    pub fn coverage_value(&self) -> T {
        let b = T::lit(BASELINE);
        self.coverage.iter().map(|&c| c - b).sum()
    }

    /// Adds `p`, raising `c_j` to `s_{j,p}` where larger.
    pub fn insert(&mut self, p: Position, sim: &SimilarityMatrix<T>) -> Result<()> {
        let e = check_position(p, self.coverage.len())?;
        if self.selected[e] {
            return Err(Error::Duplicate(p.get()));
        }
        for (j, c) in self.coverage.iter_mut().enumerate() {
            *c = c.max(sim.get(j, e));
        }
        self.selected[e] = true;
        self.order.push(p);
        Ok(())
    }

    fn insert_column(&mut self, e: usize, column: &[T]) {
        for (c, &s) in self.coverage.iter_mut().zip(column) {
            *c = c.max(s);
        }
        self.selected[e] = true;
        self.order.push(Position::from_index(e));
    }
}

fn check_position(p: Position, n: usize) -> Result<usize> {
    if p.get() == 0 || p.get() > n {
        return Err(Error::Index { index: p.get(), len: n });
    }
    Ok(p.index())
}

/// `sum_j [max(c_j, s_j) - c_j]` over one similarity column, in index order.
#[inline]
fn coverage_gain<T: Scalar>(column: impl Iterator<Item = T>, coverage: &[T]) -> T {
    column
        .zip(coverage)
        .fold(T::zero(), |acc, (s, &c)| acc + (c.max(s) - c))
}

/// The weighted objective over one video's relevance scores and similarity
/// matrix.
#[derive(Debug, Clone, Copy)]
pub struct Objective<'a, T> {
    relevance: &'a [T],
    sim: &'a SimilarityMatrix<T>,
    preset: Preset,
    normalize_coverage: bool,
    alpha: T,
    beta: T,
}

impl<'a, T: Scalar> Objective<'a, T> {
    /// With `normalize_coverage` the coverage term is divided by `N`.
    pub fn new(
        relevance: &'a RelevanceScores<T>,
        sim: &'a SimilarityMatrix<T>,
        preset: Preset,
        normalize_coverage: bool,
    ) -> Result<Self> {
        Self::from_slice(relevance.as_slice(), sim, preset, normalize_coverage)
    }

    pub(crate) fn from_slice(
        relevance: &'a [T],
        sim: &'a SimilarityMatrix<T>,
        preset: Preset,
        normalize_coverage: bool,
    ) -> Result<Self> {
        if relevance.len() != sim.len() {
            return Err(Error::Alignment(format!(
                "{} relevance scores but a {} x {} similarity matrix",
                relevance.len(),
                sim.len(),
                sim.len()
            )));
        }
        if !(preset.alpha >= 0.0 && preset.beta >= 0.0 && preset.alpha + preset.beta > 0.0) {
            return Err(Error::Parameter(format!(
                "weights ({}, {}) must be non-negative and not both zero",
                preset.alpha, preset.beta
            )));
        }
        let n = sim.len();
        let beta = if normalize_coverage && n > 0 {
            T::lit(preset.beta) / T::lit(n as f64)
        } else {
            T::lit(preset.beta)
        };
        Ok(Objective {
            relevance,
            sim,
            preset,
            normalize_coverage,
            alpha: T::lit(preset.alpha),
            beta,
        })
    }

    pub fn len(&self) -> usize {
        self.sim.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sim.is_empty()
    }

    pub fn preset(&self) -> Preset {
        self.preset
    }

    pub fn coverage_normalized(&self) -> bool {
        self.normalize_coverage
    }

    pub fn similarity(&self) -> &SimilarityMatrix<T> {
        self.sim
    }

    pub fn relevance(&self) -> &[T] {
        self.relevance
    }

    fn indices(&self, set: &[Position]) -> Result<Vec<usize>> {
        let n = self.len();
        let mut seen = vec![false; n];
        set.iter()
            .map(|&p| {
                let i = check_position(p, n)?;
                if std::mem::replace(&mut seen[i], true) {
                    return Err(Error::Duplicate(p.get()));
                }
                Ok(i)
            })
            .collect()
    }

    /// `R(S) = sum_{i in S} r_i`.
    pub fn relevance_sum(&self, set: &[Position]) -> Result<T> {
        Ok(self.indices(set)?.iter().map(|&i| self.relevance[i]).sum())
    }

    /// Unscaled `C(S)`, evaluated directly from the definition.
    pub fn coverage_value(&self, set: &[Position]) -> Result<T> {
        let idx = self.indices(set)?;
        let b = T::lit(BASELINE);
        Ok((0..self.len())
            .map(|j| {
                let best = idx.iter().fold(b, |m, &i| m.max(self.sim.get(j, i)));
                best - b
            })
            .sum())
    }

    /// `F(S)`; zero for the empty set.
    pub fn value(&self, set: &[Position]) -> Result<T> {
        let r = self.relevance_sum(set)?;
        let c = self.coverage_value(set)?;
        Ok(self.alpha * r + self.beta * c)
    }

    /// Coverage state of an arbitrary set, built by successive insertion.
    pub fn state_for(&self, set: &[Position]) -> Result<CoverageState<T>> {
        let mut state = CoverageState::empty(self.len());
        for &p in set {
            state.insert(p, self.sim)?;
        }
        Ok(state)
    }

    /// `Delta(e | S) = alpha * r_e + beta * sum_j [max(c_j, s_{j,e}) - c_j]`.
    pub fn marginal_gain(&self, e: Position, state: &CoverageState<T>) -> Result<T> {
        let n = self.len();
        let i = check_position(e, n)?;
        if state.coverage.len() != n {
            return Err(Error::Alignment(format!(
                "coverage state has {} entries for {n} candidates",
                state.coverage.len()
            )));
        }
        if state.selected[i] {
            return Err(Error::Duplicate(e.get()));
        }
        let column = (0..n).map(|j| self.sim.get(j, i));
        Ok(self.alpha * self.relevance[i] + self.beta * coverage_gain(column, &state.coverage))
    }

    /// Plain greedy over `min(K, N)` steps; ties go to the smallest position.
    pub fn greedy(&self, budget: usize) -> Result<GreedyRun<T>> {
        self.check_budget(budget)?;
        let n = self.len();
        let columns = self.sim.transposed();
        let mut state = CoverageState::empty(n);
        let mut gains = Vec::with_capacity(budget.min(n));
        for _ in 0..budget.min(n) {
            let mut best: Option<(T, usize)> = None;
            for e in (0..n).filter(|&e| !state.selected[e]) {
                let g = self.step_gain(e, columns.row(e), &state);
                if best.is_none_or(|(bg, _)| g > bg) {
                    best = Some((g, e));
                }
            }
            let (g, e) = best.expect("at least one unselected candidate remains");
            state.insert_column(e, columns.row(e));
            gains.push(g);
        }
        Ok(GreedyRun {
            order: state.order,
            gains,
        })
    }

    /// Lazy greedy with stale upper bounds. Produces the same selection and
    /// gains as [`greedy`](Self::greedy), bit for bit.
    pub fn lazy_greedy(&self, budget: usize) -> Result<GreedyRun<T>> {
        self.check_budget(budget)?;
        let n = self.len();
        let columns = self.sim.transposed();
        let mut state = CoverageState::empty(n);
        let mut heap: BinaryHeap<Bound<T>> = (0..n)
            .map(|e| Bound {
                gain: self.step_gain(e, columns.row(e), &state),
                index: e,
                step: 0,
            })
            .collect();
        let mut gains = Vec::with_capacity(budget.min(n));
        for step in 0..budget.min(n) {
            loop {
                let top = heap.pop().expect("at least one unselected candidate remains");
                if top.step == step {
                    state.insert_column(top.index, columns.row(top.index));
                    gains.push(top.gain);
                    break;
                }
                heap.push(Bound {
                    gain: self.step_gain(top.index, columns.row(top.index), &state),
                    index: top.index,
                    step,
                });
            }
        }
        Ok(GreedyRun {
            order: state.order,
            gains,
        })
    }

    #[inline]
    fn step_gain(&self, e: usize, column: &[T], state: &CoverageState<T>) -> T {
        self.alpha * self.relevance[e]
            + self.beta * coverage_gain(column.iter().copied(), &state.coverage)
    }

    fn check_budget(&self, budget: usize) -> Result<()> {
        if budget < 1 {
            return Err(Error::Budget(budget));
        }
        if self.is_empty() {
            return Err(Error::Parameter("cannot select from an empty ground set".into()));
        }
        Ok(())
    }

    /// Greedy selection mapped back to seconds and frame indices of `pool`.
    pub fn select(&self, budget: usize, pool: &CandidatePool) -> Result<SelectionResult<T>> {
        self.select_with(budget, pool, Engine::Plain)
    }

    pub fn select_with(
        &self,
        budget: usize,
        pool: &CandidatePool,
        engine: Engine,
    ) -> Result<SelectionResult<T>> {
        if pool.len() != self.len() {
            return Err(Error::Alignment(format!(
                "pool has {} candidates but the objective has {}",
                pool.len(),
                self.len()
            )));
        }
        let run = match engine {
            Engine::Plain => self.greedy(budget)?,
            Engine::Lazy => self.lazy_greedy(budget)?,
        };
        let mut positions = run.order.clone();
        positions.sort_unstable();
        let seconds = positions
            .iter()
            .map(|&p| pool.second_of_position(p))
            .collect::<Result<Vec<_>>>()?;
        let frame_indices = seconds
            .iter()
            .map(|&s| pool.meta().frame_index_of_second(s))
            .collect();
        let objective = self.value(&positions)?;
        Ok(SelectionResult {
            video_id: pool.meta().video_id.clone(),
            preset: self.preset,
            budget,
            positions,
            seconds,
            frame_indices,
            gains: run.gains,
            objective,
            coverage_normalized: self.normalize_coverage,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Engine {
    #[default]
    Plain,
    Lazy,
}

/// Positions in the order greedy picked them, with each step's gain.
#[derive(Debug, Clone, PartialEq)]
pub struct GreedyRun<T> {
    pub order: Vec<Position>,
    pub gains: Vec<T>,
}

impl<T> GreedyRun<T> {
    pub fn sorted_positions(&self) -> Vec<Position> {
        let mut p = self.order.clone();
        p.sort_unstable();
        p
    }
}

/// Heap entry ordered by gain descending, then position ascending.
#[derive(Debug, Clone, Copy)]
struct Bound<T> {
    gain: T,
    index: usize,
    step: usize,
}

impl<T: Scalar> PartialEq for Bound<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<T: Scalar> Eq for Bound<T> {}

impl<T: Scalar> PartialOrd for Bound<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Scalar> Ord for Bound<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.gain
            .partial_cmp(&other.gain)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.index.cmp(&self.index))
    }
}

/// Output of one selection run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar"))]
pub struct SelectionResult<T> {
    pub video_id: String,
    pub preset: Preset,
    pub budget: usize,
    /// Selected positions in temporal order.
    pub positions: Vec<Position>,
    pub seconds: Vec<u64>,
    pub frame_indices: Vec<u64>,
    /// Marginal gains in selection order.
    pub gains: Vec<T>,
    pub objective: T,
    pub coverage_normalized: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::{Matrix, RelevanceMode};
    use crate::pool::VideoMeta;
    use crate::preset::{make_preset, PresetName};

    fn p(i: usize) -> Position {
        Position::new(i)
    }

    fn sim(rows: &[Vec<f64>]) -> SimilarityMatrix<f64> {
        SimilarityMatrix::gram(&Matrix::from_rows(rows).unwrap())
    }

    fn scores(v: &[f64]) -> RelevanceScores<f64> {
        RelevanceScores::from_scores(v.to_vec(), RelevanceMode::RawRelu).unwrap()
    }

    fn pool(n: usize) -> CandidatePool {
        CandidatePool::build(VideoMeta::new("v", 1.0, n as u64).unwrap(), 1000).unwrap()
    }

    fn coverage_only() -> Preset {
        make_preset(PresetName::CoverageOnly, 0.5).unwrap()
    }

    fn relevance_only() -> Preset {
        make_preset(PresetName::RelevanceOnly, 0.5).unwrap()
    }

    #[test]
    fn empty_set_has_zero_objective() {
        let s = sim(&[vec![1.0, 0.0], vec![0.6, 0.8]]);
        let r = scores(&[0.3, 0.7]);
        for name in PresetName::ALL {
            let obj = Objective::new(&r, &s, make_preset(name, 0.5).unwrap(), false).unwrap();
            assert_eq!(obj.value(&[]).unwrap(), 0.0);
            assert_eq!(obj.coverage_value(&[]).unwrap(), 0.0);
        }
        assert_eq!(CoverageState::<f64>::empty(4).coverage_value(), 0.0);
    }

    #[test]
    fn orthogonal_pair_values() {
        let s = sim(&[vec![1.0, 0.0], vec![0.0, 1.0]]);
        let r = scores(&[0.0, 0.0]);
        let obj = Objective::new(&r, &s, coverage_only(), false).unwrap();
        assert_eq!(obj.value(&[p(1)]).unwrap(), 3.0);
        assert_eq!(obj.value(&[p(1), p(2)]).unwrap(), 4.0);
        let gain = obj.marginal_gain(p(1), &CoverageState::empty(2)).unwrap();
        assert_eq!(gain, 3.0);
    }

    #[test]
    fn value_rejects_bad_sets() {
        let s = sim(&[vec![1.0, 0.0], vec![0.0, 1.0]]);
        let r = scores(&[0.0, 0.0]);
        let obj = Objective::new(&r, &s, coverage_only(), false).unwrap();
        assert!(matches!(obj.value(&[p(3)]), Err(Error::Index { index: 3, len: 2 })));
        assert!(matches!(obj.value(&[p(1), p(1)]), Err(Error::Duplicate(1))));
    }

    #[test]
    fn duplicate_row_has_zero_gain() {
        let s = sim(&[vec![1.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]);
        let r = scores(&[0.0; 3]);
        let obj = Objective::new(&r, &s, coverage_only(), false).unwrap();
        let state = obj.state_for(&[p(1)]).unwrap();
        assert!(obj.marginal_gain(p(2), &state).unwrap().abs() <= 1e-6);
        assert!(matches!(obj.marginal_gain(p(1), &state), Err(Error::Duplicate(1))));
    }

    #[test]
    fn relevance_only_gain_is_score() {
        let s = sim(&[vec![1.0, 0.0], vec![0.6, 0.8], vec![0.0, 1.0]]);
        let r = scores(&[0.2, 0.9, 0.5]);
        let obj = Objective::new(&r, &s, relevance_only(), false).unwrap();
        let state = obj.state_for(&[p(3)]).unwrap();
        assert_eq!(obj.marginal_gain(p(2), &state).unwrap(), 0.9);
    }

    #[test]
    fn relevance_only_selects_top_k() {
        let s = sim(&[vec![1.0, 0.0], vec![0.6, 0.8], vec![0.0, 1.0]]);
        let r = scores(&[0.2, 0.9, 0.5]);
        let obj = Objective::new(&r, &s, relevance_only(), false).unwrap();
        let res = obj.select(2, &pool(3)).unwrap();
        assert_eq!(res.positions, vec![p(2), p(3)]);
        assert_eq!(res.gains, vec![0.9, 0.5]);
        assert!((res.objective - 1.4).abs() < 1e-12);
    }

    #[test]
    fn coverage_tie_breaks_to_smallest_position() {
        let s = sim(&[vec![1.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]);
        let r = scores(&[0.0; 3]);
        let obj = Objective::new(&r, &s, coverage_only(), false).unwrap();
        let run = obj.greedy(2).unwrap();
        assert_eq!(run.order, vec![p(1), p(3)]);
        // Brute force over the three size-2 subsets.
        let best = [[1, 2], [1, 3], [2, 3]]
            .iter()
            .map(|&[a, b]| obj.value(&[p(a), p(b)]).unwrap())
            .fold(f64::MIN, f64::max);
        assert_eq!(obj.value(&[p(1), p(3)]).unwrap(), best);
    }

    #[test]
    fn budget_beyond_ground_set_takes_everything() {
        let s = sim(&[vec![1.0, 0.0], vec![0.6, 0.8], vec![0.0, 1.0]]);
        let r = scores(&[0.2, 0.9, 0.5]);
        let preset = make_preset(PresetName::CoverageOriented, 0.5).unwrap();
        let obj = Objective::new(&r, &s, preset, false).unwrap();
        let res = obj.select(10, &pool(3)).unwrap();
        assert_eq!(res.positions, vec![p(1), p(2), p(3)]);
        assert_eq!(res.objective, obj.value(&[p(1), p(2), p(3)]).unwrap());
        let total: f64 = res.gains.iter().sum();
        assert!((total - res.objective).abs() < 1e-5);
    }

    #[test]
    fn zero_budget_is_rejected() {
        let s = sim(&[vec![1.0]]);
        let r = scores(&[1.0]);
        let obj = Objective::new(&r, &s, relevance_only(), false).unwrap();
        assert!(matches!(obj.greedy(0), Err(Error::Budget(0))));
        assert!(matches!(obj.lazy_greedy(0), Err(Error::Budget(0))));
    }

    #[test]
    fn mismatched_inputs_are_alignment_errors() {
        let s = sim(&[vec![1.0], vec![1.0]]);
        let r = scores(&[1.0]);
        assert!(matches!(
            Objective::new(&r, &s, relevance_only(), false),
            Err(Error::Alignment(_))
        ));
        let r2 = scores(&[1.0, 0.5]);
        let obj = Objective::new(&r2, &s, relevance_only(), false).unwrap();
        assert!(matches!(obj.select(1, &pool(3)), Err(Error::Alignment(_))));
    }

    #[test]
    fn normalized_coverage_scales_by_n() {
        let s = sim(&[vec![1.0, 0.0], vec![0.0, 1.0]]);
        let r = scores(&[0.0, 0.0]);
        let obj = Objective::new(&r, &s, coverage_only(), true).unwrap();
        assert_eq!(obj.value(&[p(1)]).unwrap(), 1.5);
        let res = obj.select(1, &pool(2)).unwrap();
        assert!(res.coverage_normalized);
        assert_eq!(res.gains, vec![1.5]);
    }

    #[test]
    fn result_maps_seconds_and_frames() {
        let meta = VideoMeta::new("clip", 2.0, 20).unwrap();
        let pool = CandidatePool::from_seconds(meta, vec![0, 4, 9], 3).unwrap();
        let s = sim(&[vec![1.0, 0.0], vec![0.6, 0.8], vec![0.0, 1.0]]);
        let r = scores(&[0.2, 0.9, 0.5]);
        let obj = Objective::new(&r, &s, relevance_only(), false).unwrap();
        let res = obj.select(2, &pool).unwrap();
        assert_eq!(res.video_id, "clip");
        assert_eq!(res.seconds, vec![4, 9]);
        assert_eq!(res.frame_indices, vec![8, 18]);
    }

    #[test]
    fn lazy_matches_plain_on_small_instance() {
        let rows = [
            [1.0, 0.0, 0.0],
            [0.9, 0.1, 0.0],
            [0.0, 1.0, 0.0],
            [0.1, 0.9, 0.0],
            [0.0, 0.0, 1.0],
        ];
        let s = sim(&rows
            .iter()
            .map(|r| {
                let n = r.iter().map(|x: &f64| x * x).sum::<f64>().sqrt();
                r.iter().map(|x| x / n).collect()
            })
            .collect::<Vec<_>>());
        let r = scores(&[0.95, 0.9, 0.85, 0.8, 0.75]);
        for name in PresetName::ALL {
            let obj = Objective::new(&r, &s, make_preset(name, 0.5).unwrap(), false).unwrap();
            for k in 1..=5 {
                assert_eq!(obj.greedy(k).unwrap(), obj.lazy_greedy(k).unwrap());
            }
        }
    }
}
