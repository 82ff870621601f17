//! Exact enumeration and randomized property checks that certify the greedy
//! selector on small instances.
//!
//! The objective is normalized (`F(empty) = 0`), monotone, and submodular, so
//! greedy under a cardinality budget must reach at least `1 - 1/e` of the
//! optimum. [`check_bound`] verifies that ratio against
//! [`brute_force_optimum`] and [`property_suite`] checks the structural
//! properties directly on random `(A ⊆ B, e)` triples.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::embedding::{Matrix, RelevanceMode, RelevanceScores, SimilarityMatrix};
use crate::error::{Error, Result};
use crate::pool::Position;
use crate::preset::{make_preset, Preset, PresetName};
use crate::scalar::Scalar;
use crate::selector::{CoverageState, Objective};

/// Largest ground set the enumerator accepts.
pub const ENUMERATION_LIMIT: usize = 20;

/// `1 - 1/e`.
pub const GREEDY_BOUND: f64 = 1.0 - 1.0 / std::f64::consts::E;

pub const BOUND_TOLERANCE: f64 = 1e-9;
pub const PROPERTY_TOLERANCE: f64 = 1e-6;
pub const CONSISTENCY_TOLERANCE: f64 = 1e-5;

/// One random selection problem.
#[derive(Debug, Clone)]
pub struct Instance<T> {
    pub relevance: RelevanceScores<T>,
    pub similarity: SimilarityMatrix<T>,
    pub preset: Preset,
    pub budget: usize,
}

impl<T: Scalar> Instance<T> {
    pub fn objective(&self) -> Objective<'_, T> {
        Objective::new(&self.relevance, &self.similarity, self.preset, false)
            .expect("generated instances are aligned")
    }

    pub fn len(&self) -> usize {
        self.similarity.len()
    }

    pub fn is_empty(&self) -> bool {
        self.similarity.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PresetChoice {
    /// Cycle through all four presets by instance index.
    Cycle,
    Fixed(PresetName),
}

/// Seeded generator of random instances: semantic rows uniform on the unit
/// sphere, relevance uniform on `[0, 1]`, `N` uniform on `[min_n, max_n]`,
/// `K` uniform on `[1, min(max_k, N)]`, and `lambda` uniform on `[0.05, 0.95]`.
#[derive(Debug, Clone)]
pub struct InstanceGenerator {
    rng: ChaCha8Rng,
    pub min_n: usize,
    pub max_n: usize,
    pub max_k: usize,
    pub max_dim: usize,
    pub presets: PresetChoice,
    drawn: usize,
}

impl InstanceGenerator {
    pub fn new(seed: u64, max_n: usize, max_k: usize) -> Self {
        InstanceGenerator {
            rng: ChaCha8Rng::seed_from_u64(seed),
            min_n: 1,
            max_n: max_n.max(1),
            max_k: max_k.max(1),
            max_dim: 8,
            presets: PresetChoice::Cycle,
            drawn: 0,
        }
    }

    pub fn with_min_n(mut self, min_n: usize) -> Self {
        self.min_n = min_n.clamp(1, self.max_n);
        self
    }

    pub fn with_presets(mut self, presets: PresetChoice) -> Self {
        self.presets = presets;
        self
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn next_instance<T: Scalar>(&mut self) -> Instance<T> {
        let n = self.rng.random_range(self.min_n..=self.max_n);
        let k = self.rng.random_range(1..=self.max_k.min(n));
        let dim = self.rng.random_range(2..=self.max_dim.max(2));
        let rows: Vec<Vec<T>> = (0..n).map(|_| unit_vector(&mut self.rng, dim)).collect();
        let similarity = SimilarityMatrix::gram(&Matrix::from_rows(&rows).expect("rectangular"));
        let scores = (0..n).map(|_| T::lit(self.rng.random::<f64>())).collect();
        let relevance =
            RelevanceScores::from_scores(scores, RelevanceMode::RawRelu).expect("scores in [0, 1)");
        let name = match self.presets {
            PresetChoice::Cycle => PresetName::ALL[self.drawn % 4],
            PresetChoice::Fixed(name) => name,
        };
        let lambda = self.rng.random_range(0.05..=0.95);
        self.drawn += 1;
        Instance {
            relevance,
            similarity,
            preset: make_preset(name, lambda).expect("lambda in (0, 1)"),
            budget: k,
        }
    }
}

/// A uniformly random unit vector of dimension `dim`.
pub fn unit_vector<T: Scalar, R: Rng>(rng: &mut R, dim: usize) -> Vec<T> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|x| T::lit(x / norm)).collect();
        }
    }
}

/// Maximum of `F` over all subsets of size at most `budget`, with the
/// lexicographically smallest maximizing subset.
pub fn brute_force_optimum<T: Scalar>(
    objective: &Objective<'_, T>,
    budget: usize,
) -> Result<(T, Vec<Position>)> {
    let n = objective.len();
    if n > ENUMERATION_LIMIT {
        return Err(Error::InstanceTooLarge {
            n,
            max: ENUMERATION_LIMIT,
        });
    }
    let mut best = (objective.value(&[])?, Vec::new());
    let mut current = Vec::with_capacity(budget);
    enumerate(objective, budget.min(n), 0, &mut current, &mut best)?;
    Ok(best)
}

// Depth-first over sorted subsets in lexicographic order; a strict improvement
// is required to replace the incumbent, so the earliest maximizer is kept.
fn enumerate<T: Scalar>(
    objective: &Objective<'_, T>,
    budget: usize,
    start: usize,
    current: &mut Vec<Position>,
    best: &mut (T, Vec<Position>),
) -> Result<()> {
    if current.len() == budget {
        return Ok(());
    }
    for i in start..objective.len() {
        current.push(Position::from_index(i));
        let v = objective.value(current)?;
        if v > best.0 {
            *best = (v, current.clone());
        }
        enumerate(objective, budget, i + 1, current, best)?;
        current.pop();
    }
    Ok(())
}

/// Greedy versus exact optimum on one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub instance: usize,
    pub preset: Preset,
    pub n: usize,
    pub k: usize,
    pub optimal_value: f64,
    pub greedy_value: f64,
    /// `greedy_value / optimal_value`, or 1 when the optimum is zero.
    pub ratio: f64,
    pub optimal_set: Vec<Position>,
    pub greedy_set: Vec<Position>,
}

impl OracleReport {
    pub fn within_bounds(&self) -> bool {
        self.ratio >= GREEDY_BOUND - BOUND_TOLERANCE
            && self.ratio <= 1.0 + BOUND_TOLERANCE
            && self.ratio >= 0.0
    }
}

pub fn oracle_report<T: Scalar>(instance: &Instance<T>, index: usize) -> Result<OracleReport> {
    let objective = instance.objective();
    let (optimal, optimal_set) = brute_force_optimum(&objective, instance.budget)?;
    let greedy_set = objective.greedy(instance.budget)?.sorted_positions();
    let greedy = objective.value(&greedy_set)?.as_f64();
    let optimal = optimal.as_f64();
    let ratio = if optimal == 0.0 { 1.0 } else { greedy / optimal };
    Ok(OracleReport {
        instance: index,
        preset: instance.preset,
        n: instance.len(),
        k: instance.budget,
        optimal_value: optimal,
        greedy_value: greedy,
        ratio,
        optimal_set,
        greedy_set,
    })
}

/// Runs `trials` random instances through greedy and the enumerator.
/// Returns every report, or a verification error at the first instance whose
/// ratio falls outside `[1 - 1/e, 1]` (with tolerance 1e-9).
pub fn check_bound(generator: &mut InstanceGenerator, trials: usize) -> Result<Vec<OracleReport>> {
    if generator.max_n > ENUMERATION_LIMIT {
        return Err(Error::InstanceTooLarge {
            n: generator.max_n,
            max: ENUMERATION_LIMIT,
        });
    }
    let mut reports = Vec::with_capacity(trials);
    for t in 0..trials {
        let instance: Instance<f64> = generator.next_instance();
        let report = oracle_report(&instance, t)?;
        if !report.within_bounds() {
            return Err(Error::Verification(format!(
                "instance {t} ({}, N = {}, K = {}): greedy/optimal ratio {} outside [{GREEDY_BOUND:.6}, 1]",
                report.preset.name, report.n, report.k, report.ratio
            )));
        }
        reports.push(report);
    }
    Ok(reports)
}

/// Pass/fail counts for one property.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckTally {
    pub name: String,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertySummary {
    pub trials: usize,
    pub checks: Vec<CheckTally>,
    /// Instances whose similarity matrix failed the validity precheck.
    pub invalid_matrices: usize,
    pub first_matrix_issue: Option<String>,
    pub first_counterexample: Option<String>,
}

impl PropertySummary {
    fn new() -> Self {
        let checks = ["empty_set_zero", "monotonicity", "submodularity", "marginal_consistency"]
            .into_iter()
            .map(|name| CheckTally {
                name: name.to_string(),
                passed: 0,
                failed: 0,
            })
            .collect();
        PropertySummary {
            trials: 0,
            checks,
            invalid_matrices: 0,
            first_matrix_issue: None,
            first_counterexample: None,
        }
    }

    fn record(&mut self, check: usize, ok: bool, detail: impl FnOnce() -> String) {
        let tally = &mut self.checks[check];
        if ok {
            tally.passed += 1;
        } else {
            tally.failed += 1;
            if self.first_counterexample.is_none() {
                self.first_counterexample = Some(format!("{}: {}", tally.name, detail()));
            }
        }
    }

    pub fn check(&self, name: &str) -> Option<&CheckTally> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().map(|c| c.failed).sum()
    }

    /// True when every property check passed and every matrix was valid.
    pub fn all_passed(&self) -> bool {
        self.failures() == 0 && self.invalid_matrices == 0
    }
}

/// Property checks over `trials` random instances (presets cycled).
pub fn property_suite(seed: u64, trials: usize) -> PropertySummary {
    let mut generator = InstanceGenerator::new(seed, 12, 4).with_min_n(2);
    property_suite_with(&mut generator, trials)
}

pub fn property_suite_with(generator: &mut InstanceGenerator, trials: usize) -> PropertySummary {
    let mut summary = PropertySummary::new();
    let mut rng = ChaCha8Rng::seed_from_u64(generator.rng().random());
    for _ in 0..trials {
        let instance: Instance<f64> = generator.next_instance();
        check_instance(&instance, &mut rng, &mut summary);
    }
    summary
}

/// Property checks over caller-supplied instances, one random triple each.
pub fn property_suite_on<T: Scalar>(instances: &[Instance<T>], seed: u64) -> PropertySummary {
    let mut summary = PropertySummary::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for instance in instances {
        check_instance(instance, &mut rng, &mut summary);
    }
    summary
}

/// A random `(A ⊆ B, e ∉ B)` triple over `n >= 2` positions.
pub fn random_triple<R: Rng>(rng: &mut R, n: usize) -> (Vec<Position>, Vec<Position>, Position) {
    assert!(n >= 2, "need at least two candidates for a triple");
    let b_len = rng.random_range(0..n);
    let mut perm: Vec<usize> = sample(rng, n, n).into_vec();
    let e = Position::from_index(perm.pop().expect("n >= 2"));
    let mut b: Vec<Position> = perm[..b_len].iter().map(|&i| Position::from_index(i)).collect();
    b.sort_unstable();
    let a: Vec<Position> = b.iter().copied().filter(|_| rng.random_bool(0.5)).collect();
    (a, b, e)
}

fn check_instance<T: Scalar, R: Rng>(instance: &Instance<T>, rng: &mut R, summary: &mut PropertySummary) {
    summary.trials += 1;
    let issues = instance.similarity.validate();
    if let Some(first) = issues.first() {
        summary.invalid_matrices += 1;
        if summary.first_matrix_issue.is_none() {
            summary.first_matrix_issue = Some(first.to_string());
        }
    }
    let obj = instance.objective();
    let n = obj.len();

    let empty_ok = obj.value(&[]).map(|v| v == T::zero()).unwrap_or(false)
        && obj.coverage_value(&[]).map(|v| v == T::zero()).unwrap_or(false)
        && CoverageState::<T>::empty(n).coverage_value() == T::zero();
    summary.record(0, empty_ok, || format!("F(empty) != 0 at N = {n}"));

    if n < 2 {
        return;
    }
    let (a, b, e) = random_triple(rng, n);
    let eval = || -> Result<[f64; 6]> {
        let fa = obj.value(&a)?.as_f64();
        let fb = obj.value(&b)?.as_f64();
        let ga = obj.marginal_gain(e, &obj.state_for(&a)?)?.as_f64();
        let gb = obj.marginal_gain(e, &obj.state_for(&b)?)?.as_f64();
        let mut ae = a.clone();
        ae.push(e);
        let mut be = b.clone();
        be.push(e);
        let fae = obj.value(&ae)?.as_f64();
        let fbe = obj.value(&be)?.as_f64();
        Ok([fa, fb, ga, gb, fae, fbe])
    };
    let [fa, fb, ga, gb, fae, fbe] = eval().expect("triple is valid by construction");
    let describe = |what: &str| format!("{what}; A = {a:?}, B = {b:?}, e = {e}, preset {}", instance.preset.name);
    summary.record(1, fb >= fa - PROPERTY_TOLERANCE, || {
        describe(&format!("F(B) = {fb} < F(A) = {fa}"))
    });
    summary.record(2, ga >= gb - PROPERTY_TOLERANCE, || {
        describe(&format!("gain at A {ga} < gain at B {gb}"))
    });
    let consistent = (ga - (fae - fa)).abs() <= CONSISTENCY_TOLERANCE
        && (gb - (fbe - fb)).abs() <= CONSISTENCY_TOLERANCE;
    summary.record(3, consistent, || {
        describe(&format!(
            "incremental gains ({ga}, {gb}) vs recomputed ({}, {})",
            fae - fa,
            fbe - fb
        ))
    });
}

/// Largest `|Delta(e | S) - (F(S + e) - F(S))|` over every unselected
/// candidate at every step of a greedy run.
pub fn greedy_consistency<T: Scalar>(objective: &Objective<'_, T>, budget: usize) -> Result<f64> {
    let run = objective.greedy(budget)?;
    let n = objective.len();
    let mut state = CoverageState::empty(n);
    let mut set: Vec<Position> = Vec::new();
    let mut worst = 0.0f64;
    for &chosen in &run.order {
        let base = objective.value(&set)?.as_f64();
        for e in (0..n).map(Position::from_index).filter(|p| !state.contains(*p)) {
            let incremental = objective.marginal_gain(e, &state)?.as_f64();
            set.push(e);
            let recomputed = objective.value(&set)?.as_f64() - base;
            set.pop();
            worst = worst.max((incremental - recomputed).abs());
        }
        state.insert(chosen, objective.similarity())?;
        set.push(chosen);
    }
    Ok(worst)
}
