//! Dense pure-state and density-matrix simulation.
//!
//! Bit-order contract: qubit `i` is bit `i` (least significant first) of a
//! computational basis index, and a register read through a [`WireRange`]
//! yields a [`BitString`](crate::bits::BitString) whose bit `j` is qubit
//! `offset + j`. The contract holds for every module of the crate.

mod density;
pub mod rng;
mod scalar;
mod state;

use std::sync::OnceLock;

use rand::Rng;
use thiserror::Error;

pub use density::{
    hermitian_eigenvalues, hermitian_trace_norm, symmetric_trace_norm, DensityMatrix, MAX_DENSITY_QUBITS,
};
pub use scalar::Real;
pub use state::{MeasurementBranch, PureState, WireRange};

/// Environment variable overriding the state-vector qubit limit.
pub const CAPACITY_ENV: &str = "QPKE_QMAX";
pub const DEFAULT_MAX_QUBITS: usize = 20;
/// Hard ceiling on the override.
pub const ABSOLUTE_MAX_QUBITS: usize = 30;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QsimError {
    #[error("qubit count {qubits} outside 1..={max}")]
    QubitCount { qubits: usize, max: usize },
    #[error("capacity exceeded: {requested} qubits requested, limit {max}")]
    Capacity { requested: usize, max: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("state not normalized (squared norm {0})")]
    NotNormalized(f64),
    #[error("wire range {offset}+{width} invalid for {qubits} qubits")]
    WireRange { offset: usize, width: usize, qubits: usize },
    #[error("input and output registers overlap")]
    OverlappingRanges,
    #[error("oracle output width {actual}, register width {expected}")]
    OracleWidth { expected: usize, actual: usize },
    #[error("empty projection")]
    EmptyProjection,
    #[error("not a density matrix: {0}")]
    NotDensityMatrix(String),
    #[error("malformed state dump line: {0:?}")]
    Parse(String),
}

pub type Result<T, E = QsimError> = std::result::Result<T, E>;

/// Largest qubit count a [`PureState`] may have.
///
/// Defaults to 20 and can be overridden through `QPKE_QMAX` (clamped to
/// `1..=30`). Read once per process.
pub fn max_qubits() -> usize {
    static MAX: OnceLock<usize> = OnceLock::new();
    *MAX.get_or_init(|| {
        std::env::var(CAPACITY_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .map(|v| v.clamp(1, ABSOLUTE_MAX_QUBITS))
            .unwrap_or(DEFAULT_MAX_QUBITS)
    })
}

/// A quantum object that is either pure or mixed.
#[derive(Clone, Debug)]
pub enum QuantumState<T: Real = f64> {
    Pure(PureState<T>),
    Mixed(DensityMatrix<T>),
}

impl<T: Real> QuantumState<T> {
    pub fn qubit_count(&self) -> usize {
        match self {
            Self::Pure(s) => s.qubit_count(),
            Self::Mixed(r) => r.qubit_count(),
        }
    }

    pub fn to_density(&self) -> DensityMatrix<T> {
        match self {
            Self::Pure(s) => DensityMatrix::from_pure(s),
            Self::Mixed(r) => r.clone(),
        }
    }
}

impl<T: Real> From<PureState<T>> for QuantumState<T> {
    fn from(s: PureState<T>) -> Self {
        Self::Pure(s)
    }
}

impl<T: Real> From<DensityMatrix<T>> for QuantumState<T> {
    fn from(r: DensityMatrix<T>) -> Self {
        Self::Mixed(r)
    }
}

/// `|⟨a|b⟩|²` for pure pairs, `⟨a|ρ|a⟩` for pure/mixed, Uhlmann otherwise.
pub fn fidelity<T: Real>(a: &QuantumState<T>, b: &QuantumState<T>) -> Result<T> {
    match (a, b) {
        (QuantumState::Pure(x), QuantumState::Pure(y)) => x.fidelity(y),
        (QuantumState::Pure(x), QuantumState::Mixed(r)) | (QuantumState::Mixed(r), QuantumState::Pure(x)) => {
            r.expectation(x)
        }
        (QuantumState::Mixed(r), QuantumState::Mixed(s)) => r.fidelity(s),
    }
}

/// `sqrt(1 − F)` for pure pairs, half the trace norm of the difference otherwise.
pub fn trace_distance<T: Real>(a: &QuantumState<T>, b: &QuantumState<T>) -> Result<T> {
    match (a, b) {
        (QuantumState::Pure(x), QuantumState::Pure(y)) => x.trace_distance(y),
        _ => a.to_density().trace_distance(&b.to_density()),
    }
}

/// Probability that the swap test on `a ⊗ b` reports "same".
pub fn swap_test_accept_probability<T: Real>(a: &QuantumState<T>, b: &QuantumState<T>) -> Result<T> {
    if a.qubit_count() != b.qubit_count() {
        return Err(QsimError::DimensionMismatch { left: a.qubit_count(), right: b.qubit_count() });
    }
    let overlap = match (a, b) {
        (QuantumState::Mixed(r), QuantumState::Mixed(s)) => {
            // tr(ρσ)
            let dim = r.dim();
            let mut acc = T::zero();
            for i in 0..dim {
                for j in 0..dim {
                    acc += (r.entry(i, j) * s.entry(j, i)).re;
                }
            }
            acc
        }
        _ => fidelity(a, b)?,
    };
    Ok((T::one() + overlap) / T::of(2.0))
}

/// Swap test: `true` ("same") with probability `(1 + tr(ρ_a ρ_b)) / 2`.
pub fn swap_test<T: Real, R: Rng + ?Sized>(a: &QuantumState<T>, b: &QuantumState<T>, rng: &mut R) -> Result<bool> {
    let p = swap_test_accept_probability(a, b)?.as_f64();
    Ok(rng.random::<f64>() < p)
}

#[cfg(test)]
mod tests {
    use super::rng::seeded;
    use super::*;
    use num_complex::Complex64;

    fn pure(s: PureState) -> QuantumState {
        QuantumState::Pure(s)
    }

    #[test]
    fn fidelity_examples() {
        let s = pure(PureState::haar_random(3, &mut seeded(1)).unwrap());
        assert!((fidelity(&s, &s).unwrap() - 1.0).abs() < 1e-12);
        let z = pure(PureState::basis(1, 0).unwrap());
        let o = pure(PureState::basis(1, 1).unwrap());
        assert_eq!(fidelity(&z, &o).unwrap(), 0.0);
        let mm = QuantumState::Mixed(DensityMatrix::maximally_mixed(3).unwrap());
        assert!((fidelity(&s, &mm).unwrap() - 0.125).abs() < 1e-12);
        assert!((fidelity(&mm, &s).unwrap() - 0.125).abs() < 1e-12);
        assert!(fidelity(&s, &z).is_err());
    }

    #[test]
    fn trace_distance_examples() {
        let s = pure(PureState::haar_random(2, &mut seeded(2)).unwrap());
        assert!(trace_distance(&s, &s).unwrap().abs() < 1e-7);
        let a = pure(PureState::basis(2, 1).unwrap());
        let b = pure(PureState::basis(2, 2).unwrap());
        assert!((trace_distance(&a, &b).unwrap() - 1.0).abs() < 1e-12);
        let mm = QuantumState::Mixed(DensityMatrix::maximally_mixed(2).unwrap());
        // ½‖|1⟩⟨1| − I/4‖₁ = ½(3/4 + 3·1/4)
        assert!((trace_distance(&a, &mm).unwrap() - 0.75).abs() < 1e-12);
    }

    #[test]
    fn swap_test_probabilities() {
        let a = pure(PureState::basis(1, 0).unwrap());
        let b = pure(PureState::basis(1, 1).unwrap());
        assert!((swap_test_accept_probability(&a, &a).unwrap() - 1.0).abs() < 1e-12);
        assert!((swap_test_accept_probability(&a, &b).unwrap() - 0.5).abs() < 1e-12);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = pure(PureState::new(1, vec![Complex64::new(h, 0.0), Complex64::new(h, 0.0)]).unwrap());
        // |⟨0|+⟩| = 1/√2
        assert!((swap_test_accept_probability(&a, &plus).unwrap() - 0.75).abs() < 1e-12);
    }

    #[test]
    fn swap_test_sampling() {
        let mut rng = seeded(3);
        let a = pure(PureState::basis(2, 0).unwrap());
        let b = pure(PureState::basis(2, 3).unwrap());
        assert!((0..1000).all(|_| swap_test(&a, &a, &mut rng).unwrap()));
        let n = 10_000;
        let acc = (0..n).filter(|_| swap_test(&a, &b, &mut rng).unwrap()).count();
        let sigma = (0.25f64 / n as f64).sqrt();
        assert!((acc as f64 / n as f64 - 0.5).abs() < 3.0 * sigma);
    }

    #[test]
    fn haar_moments() {
        let mut rng = seeded(21);
        let q = 3;
        let n = 10_000;
        let fixed = PureState::<f64>::basis(q, 0).unwrap();
        let samples: Vec<f64> = (0..n)
            .map(|_| PureState::haar_random(q, &mut rng).unwrap().fidelity(&fixed).unwrap())
            .collect();
        let pairs: Vec<f64> = (0..n)
            .map(|_| {
                let a = PureState::<f64>::haar_random(q, &mut rng).unwrap();
                let b = PureState::haar_random(q, &mut rng).unwrap();
                a.fidelity(&b).unwrap()
            })
            .collect();
        // |⟨0|ψ⟩|² ~ Beta(1, d−1): mean 1/d, variance (d−1)/(d²(d+1)).
        let d = 8.0;
        let sigma = ((d - 1.0) / (d * d * (d + 1.0)) / n as f64).sqrt();
        for xs in [samples, pairs] {
            let mean = xs.iter().sum::<f64>() / n as f64;
            assert!((mean - 1.0 / d).abs() < 3.0 * sigma, "mean {mean}");
        }
    }

    #[test]
    fn born_consistency_within_four_sigma() {
        let mut rng = seeded(33);
        let s = PureState::<f64>::haar_random(3, &mut rng).unwrap();
        let wires = WireRange::new(1, 2);
        let probs = s.probabilities(wires).unwrap();
        let n = 10_000;
        let mut counts = [0usize; 4];
        for _ in 0..n {
            counts[s.measure(wires, &mut rng).unwrap().0.to_u64() as usize] += 1;
        }
        for (c, p) in counts.iter().zip(&probs) {
            let sigma = (p * (1.0 - p) / n as f64).sqrt();
            assert!((*c as f64 / n as f64 - p).abs() <= 4.0 * sigma + 1e-12);
        }
    }
}
