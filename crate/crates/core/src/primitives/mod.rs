//! Toy classical and quantum primitives: PRF, random-function tables,
//! symmetric encryption, a binary-phase PRFS and a measurement-based PRFSPD.
//!
//! None of this is production cryptography.

mod config;
mod prf;
mod prfs;
mod prfspd;
mod ske;
mod table;

use std::sync::Arc;

use thiserror::Error;

use crate::bits::BitString;
use crate::qsim::QsimError;

pub use config::{Instantiation, PrimitiveConfig};
pub use prf::{prf_eval, Prf, PrfKey};
pub use prfs::{prfs_gen, Prfs, PrfsInstantiation, PrfsParams};
pub use prfspd::{PrfspdParams, PrfspdProof, ToyPrfspd};
pub use ske::{ske_decrypt, ske_encrypt, Ske, SkeCiphertext, SkeMode};
pub use table::RandomFunctionTable;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PrimitiveError {
    #[error("{what} width {actual}, expected {expected}")]
    Width { what: &'static str, expected: usize, actual: usize },
    #[error("message of {len} bits exceeds one-time pad of {max} bits")]
    MessageTooLong { len: usize, max: usize },
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Qsim(#[from] QsimError),
}

pub type Result<T, E = PrimitiveError> = std::result::Result<T, E>;

/// The keyed function behind a scheme: the PRF under a key, or a truly
/// random function table standing in for it.
#[derive(Clone, Debug)]
pub enum FunctionKey {
    Prf(PrfKey),
    Table(Arc<RandomFunctionTable>),
}

impl FunctionKey {
    pub fn eval(&self, x: &BitString, output_width: usize) -> Result<BitString> {
        match self {
            Self::Prf(k) => Ok(prf_eval(k, x, output_width)),
            Self::Table(t) if t.output_width() == output_width => Ok(t.eval(x)),
            Self::Table(t) => {
                Err(PrimitiveError::Width { what: "random function output", expected: t.output_width(), actual: output_width })
            }
        }
    }
}
