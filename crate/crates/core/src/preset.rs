//! The four relevance/coverage trade-off presets.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_LAMBDA: f64 = 0.5;

/// Preset names, declared in the fixed tie-breaking order used when fitting
/// routing tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PresetName {
    RelevanceOnly,
    RelevanceOriented,
    CoverageOriented,
    CoverageOnly,
}

impl PresetName {
    pub const ALL: [PresetName; 4] = [
        PresetName::RelevanceOnly,
        PresetName::RelevanceOriented,
        PresetName::CoverageOriented,
        PresetName::CoverageOnly,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PresetName::RelevanceOnly => "relevance_only",
            PresetName::RelevanceOriented => "relevance_oriented",
            PresetName::CoverageOriented => "coverage_oriented",
            PresetName::CoverageOnly => "coverage_only",
        }
    }

    pub fn is_oriented(self) -> bool {
        matches!(self, PresetName::RelevanceOriented | PresetName::CoverageOriented)
    }
}

impl fmt::Display for PresetName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PresetName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PresetName::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| Error::Parameter(format!("unknown preset `{s}`")))
    }
}

/// Weights `(alpha, beta)` of the relevance and coverage terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Preset {
    pub name: PresetName,
    pub alpha: f64,
    pub beta: f64,
    pub lambda: f64,
}

impl Preset {
    /// Builds the preset. `lambda` must lie in `(0, 1)` for the two oriented
    /// presets and is recorded but unused by the other two.
    pub fn new(name: PresetName, lambda: f64) -> Result<Self> {
        if name.is_oriented() && !(lambda > 0.0 && lambda < 1.0) {
            return Err(Error::Parameter(format!(
                "lambda must lie in (0, 1) for {name}, got {lambda}"
            )));
        }
        let (alpha, beta) = match name {
            PresetName::RelevanceOnly => (1.0, 0.0),
            PresetName::CoverageOnly => (0.0, 1.0),
            PresetName::RelevanceOriented => (1.0, lambda),
            PresetName::CoverageOriented => (lambda, 1.0),
        };
        Ok(Preset {
            name,
            alpha,
            beta,
            lambda,
        })
    }

    /// Checks that the weights agree with the name, e.g. after deserializing.
    pub fn validate(&self) -> Result<()> {
        let expect = Preset::new(self.name, self.lambda)?;
        if expect.alpha != self.alpha || expect.beta != self.beta {
            return Err(Error::Parameter(format!(
                "preset {} has weights ({}, {}), expected ({}, {})",
                self.name, self.alpha, self.beta, expect.alpha, expect.beta
            )));
        }
        Ok(())
    }
}

pub fn make_preset(name: PresetName, lambda: f64) -> Result<Preset> {
    Preset::new(name, lambda)
}
