//! Selection-quality comparison between greedy selection and uniform
//! sampling over the same candidate pool.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pool::{even_spacing, CandidatePool, Position};
use crate::preset::Preset;
use crate::scalar::Scalar;
use crate::selector::{Engine, Objective};

/// `K` evenly spaced positions over `N` candidates, using the same truncated
/// spacing rule as the pool cap. All positions when `K >= N`.
pub fn uniform_positions(n: usize, budget: usize) -> Vec<Position> {
    even_spacing(n as u64, budget)
        .into_iter()
        .map(|i| Position::from_index(i as usize))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    /// `F(S)` under the run's preset and coverage scaling.
    pub objective: f64,
    /// Unscaled facility-location coverage `C(S)`.
    pub coverage: f64,
    /// Relevance sum `R(S)`.
    pub relevance: f64,
}

impl Metrics {
    pub fn of<T: Scalar>(objective: &Objective<'_, T>, set: &[Position]) -> Result<Self> {
        Ok(Metrics {
            objective: objective.value(set)?.as_f64(),
            coverage: objective.coverage_value(set)?.as_f64(),
            relevance: objective.relevance_sum(set)?.as_f64(),
        })
    }

    fn minus(&self, other: &Metrics) -> Metrics {
        Metrics {
            objective: self.objective - other.objective,
            coverage: self.coverage - other.coverage,
            relevance: self.relevance - other.relevance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub video_id: String,
    pub preset: Preset,
    pub budget: usize,
    pub coverage_normalized: bool,
    pub greedy_positions: Vec<Position>,
    pub uniform_positions: Vec<Position>,
    pub greedy: Metrics,
    pub uniform: Metrics,
    /// `greedy - uniform`, metric by metric.
    pub delta: Metrics,
}

pub fn compare<T: Scalar>(
    objective: &Objective<'_, T>,
    budget: usize,
    pool: &CandidatePool,
) -> Result<Comparison> {
    if budget < 1 {
        return Err(Error::Budget(budget));
    }
    let selection = objective.select_with(budget, pool, Engine::Lazy)?;
    let uniform = uniform_positions(objective.len(), budget);
    let greedy_metrics = Metrics::of(objective, &selection.positions)?;
    let uniform_metrics = Metrics::of(objective, &uniform)?;
    Ok(Comparison {
        video_id: pool.meta().video_id.clone(),
        preset: objective.preset(),
        budget,
        coverage_normalized: objective.coverage_normalized(),
        greedy_positions: selection.positions,
        uniform_positions: uniform,
        delta: greedy_metrics.minus(&uniform_metrics),
        greedy: greedy_metrics,
        uniform: uniform_metrics,
    })
}
