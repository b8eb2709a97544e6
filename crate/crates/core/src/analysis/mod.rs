//! Exact oracles for the quantities the security argument relies on, at
//! parameters small enough to enumerate.
//!
//! * [`punctured_key_distance`]: trace distance between `p` copies of the
//!   public key and of the key with one branch `x*` projected out.
//! * [`commuting_measurement_check`]: measuring the encryptor's copy before or
//!   after the adversary's copies gives the same joint distribution.
//! * [`random_key_indistinguishability_check`]: encrypting under `H(x*)` or
//!   under a fresh uniform `z` is identically distributed given the punctured key.
//! * [`optimal_advantage`]: Helstrom bound on any adversary in the IND-CPA
//!   game, from exact ensemble density matrices over a truly random function.
//!
//! The step from the PRF to a random function is computational and is not
//! checked here.

mod helstrom;
mod hybrids;

use std::fmt;

use thiserror::Error;

use crate::primitives::PrimitiveError;
use crate::qsim::QsimError;
use crate::schemes::{SchemeError, SchemeKind};

pub use helstrom::{optimal_advantage, EnsembleAdvantage, MAX_ENSEMBLE_DIM};
pub use hybrids::{
    commuting_measurement_check, punctured_key_distance, punctured_key_distance_closed_form,
    random_key_indistinguishability_check, CrossCheck, PuncturedDistance,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("capacity exceeded: {what} needs {requested}, limit {max}")]
    Capacity { what: &'static str, requested: u64, max: u64 },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Primitive(#[from] PrimitiveError),
    #[error(transparent)]
    Qsim(#[from] QsimError),
}

pub type Result<T, E = AnalysisError> = std::result::Result<T, E>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HybridPair {
    /// Encryptor measures its copy after vs. before the adversary's copies.
    H0H1,
    /// Full key copies vs. punctured key copies.
    H1H2,
    /// Pad key `H(x*)` vs. fresh uniform `z`.
    H3H4,
}

impl fmt::Display for HybridPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::H0H1 => "H0-H1",
            Self::H1H2 => "H1-H2",
            Self::H3H4 => "H3-H4",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Metric {
    TotalVariation,
    TraceDistance,
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::TotalVariation => "total-variation",
            Self::TraceDistance => "trace-distance",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HybridReport {
    pub pair: HybridPair,
    pub metric: Metric,
    pub value: f64,
    pub lambda: usize,
    /// Adversary key copies (or encryption queries for H3-H4).
    pub copies: usize,
    pub scheme: SchemeKind,
}

impl HybridReport {
    pub fn to_record(&self) -> String {
        format!(
            "pair={} metric={} scheme={} lambda={} copies={} value={:.3e}",
            self.pair, self.metric, self.scheme, self.lambda, self.copies, self.value
        )
    }
}

/// Total-variation distance between two finite distributions.
pub(crate) fn total_variation<K: std::hash::Hash + Eq>(
    a: &std::collections::HashMap<K, f64>,
    b: &std::collections::HashMap<K, f64>,
) -> f64 {
    let mut sum = 0.0;
    for (k, p) in a {
        sum += (p - b.get(k).copied().unwrap_or(0.0)).abs();
    }
    for (k, q) in b {
        if !a.contains_key(k) {
            sum += q.abs();
        }
    }
    0.5 * sum
}
