//! Simulation and analysis of quantum public-key encryption schemes whose
//! public keys are quantum states and whose ciphertexts are classical (or,
//! for the PRFS-based construction, a classical/quantum pair).
//!
//! The state-vector simulator is generic over the real scalar type; the
//! aliases below pick the common precisions.

pub mod analysis;
pub mod bits;
pub mod games;
pub mod primitives;
pub mod qsim;
pub mod schemes;

pub use bits::BitString;

pub type PureState64 = qsim::PureState<f64>;
pub type PureState32 = qsim::PureState<f32>;
pub type DensityMatrix64 = qsim::DensityMatrix<f64>;
pub type DensityMatrix32 = qsim::DensityMatrix<f32>;
pub type QuantumState64 = qsim::QuantumState<f64>;
pub type QuantumState32 = qsim::QuantumState<f32>;
