//! Text key-value configuration record for the primitives.
//!
//! ```text
//! # qpke primitive configuration
//! bit_order=little-endian
//! lambda=4
//! d=4
//! n=4
//! m=1
//! c=4
//! instantiation=prf
//! ```
//!
//! `n` is the PRFS output width; the PRFSPD state and proof are `c = m + t`
//! bits wide. Blank lines and `#` comments are ignored; unknown keys are
//! rejected. Bit strings everywhere follow the qubit-0-is-least-significant
//! order of [`crate::qsim`].

use std::fmt::{self, Write as _};
use std::str::FromStr;

use super::{PrfsParams, PrfspdParams, PrimitiveError, Result};

/// Keyed-function backend.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Instantiation {
    /// SHA-256 counter-mode PRF keyed by the decryption key.
    #[default]
    Prf,
    /// Fresh lazily sampled random function per key generation.
    RandomTable,
}

impl fmt::Display for Instantiation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Prf => "prf",
            Self::RandomTable => "random-table",
        })
    }
}

impl FromStr for Instantiation {
    type Err = PrimitiveError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "prf" => Ok(Self::Prf),
            "random-table" => Ok(Self::RandomTable),
            other => Err(PrimitiveError::Config(format!("unknown instantiation {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimitiveConfig {
    pub lambda: usize,
    pub d: usize,
    pub n: usize,
    pub m: usize,
    pub c: usize,
    pub instantiation: Instantiation,
}

impl PrimitiveConfig {
    pub fn for_lambda(lambda: usize) -> Self {
        Self { lambda, d: lambda, n: 4, m: 1, c: 4, instantiation: Instantiation::Prf }
    }

    pub fn validate(&self) -> Result<()> {
        if self.lambda == 0 || self.d == 0 || self.n == 0 {
            return Err(PrimitiveError::Config("lambda, d and n must be positive".into()));
        }
        if self.m == 0 || self.m >= self.c {
            return Err(PrimitiveError::Config(format!("need 1 <= m < c (m={}, c={})", self.m, self.c)));
        }
        Ok(())
    }

    pub fn tag_width(&self) -> usize {
        self.c - self.m
    }

    pub fn prfs_params(&self) -> Result<PrfsParams> {
        PrfsParams::new(self.lambda, self.d, self.n)
    }

    pub fn prfspd_params(&self) -> Result<PrfspdParams> {
        self.validate()?;
        PrfspdParams::new(self.lambda, self.d, self.m, self.tag_width())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("# qpke primitive configuration\nbit_order=little-endian\n");
        let _ = write!(
            out,
            "lambda={}\nd={}\nn={}\nm={}\nc={}\ninstantiation={}\n",
            self.lambda, self.d, self.n, self.m, self.c, self.instantiation
        );
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut fields: [Option<usize>; 5] = [None; 5];
        let mut instantiation = None;
        for raw in text.lines() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| PrimitiveError::Config(format!("expected key=value, got {line:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            let slot = match key {
                "lambda" => 0,
                "d" => 1,
                "n" => 2,
                "m" => 3,
                "c" => 4,
                "instantiation" => {
                    instantiation = Some(value.parse()?);
                    continue;
                }
                "bit_order" if value == "little-endian" => continue,
                "bit_order" => return Err(PrimitiveError::Config(format!("unsupported bit order {value:?}"))),
                other => return Err(PrimitiveError::Config(format!("unknown key {other:?}"))),
            };
            fields[slot] = Some(
                value
                    .parse()
                    .map_err(|_| PrimitiveError::Config(format!("{key}: not an integer: {value:?}")))?,
            );
        }
        let get = |i: usize, name: &str| fields[i].ok_or_else(|| PrimitiveError::Config(format!("missing {name}")));
        let cfg = Self {
            lambda: get(0, "lambda")?,
            d: get(1, "d")?,
            n: get(2, "n")?,
            m: get(3, "m")?,
            c: get(4, "c")?,
            instantiation: instantiation.unwrap_or_default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}
