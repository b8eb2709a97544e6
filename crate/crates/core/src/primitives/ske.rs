use rand::Rng;

use super::prf::{prf_eval, PrfKey};
use super::{PrimitiveError, Result};
use crate::bits::BitString;

/// `(r, F_k(r) ⊕ m)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SkeCiphertext {
    pub nonce: BitString,
    pub body: BitString,
}

/// How the pad is derived.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum SkeMode {
    /// Fresh uniform nonce `r`, pad `F_k(r)`.
    #[default]
    PrfPad,
    /// Nonce pinned to `0^λ`, so the pad repeats under a reused key. Broken on purpose.
    FixedNonce,
    /// Pad is the key itself (message at most `λ` bits), empty nonce. Only
    /// secure for a single use of the key; exact analysis relies on it.
    OneTimePad,
}

/// Nonce-based symmetric encryption under `λ`-bit keys.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Ske {
    lambda: usize,
    mode: SkeMode,
}

impl Ske {
    pub fn new(lambda: usize, mode: SkeMode) -> Self {
        Self { lambda, mode }
    }

    pub fn mode(&self) -> SkeMode {
        self.mode
    }

    fn check_key(&self, key: &BitString) -> Result<()> {
        if key.len() != self.lambda || key.is_empty() {
            return Err(PrimitiveError::Width { what: "SKE key", expected: self.lambda, actual: key.len() });
        }
        Ok(())
    }

    fn pad(&self, key: &BitString, nonce: &BitString, len: usize) -> Result<BitString> {
        match self.mode {
            SkeMode::OneTimePad => {
                if len > key.len() {
                    return Err(PrimitiveError::MessageTooLong { len, max: key.len() });
                }
                Ok(key.slice(0, len))
            }
            SkeMode::PrfPad | SkeMode::FixedNonce => {
                if nonce.len() != self.lambda {
                    return Err(PrimitiveError::Width { what: "SKE nonce", expected: self.lambda, actual: nonce.len() });
                }
                Ok(prf_eval(&PrfKey::new(key.clone()), nonce, len))
            }
        }
    }

    pub fn encrypt<R: Rng + ?Sized>(&self, key: &BitString, m: &BitString, rng: &mut R) -> Result<SkeCiphertext> {
        let nonce = match self.mode {
            SkeMode::PrfPad => BitString::random(self.lambda, rng),
            SkeMode::FixedNonce => BitString::zeros(self.lambda),
            SkeMode::OneTimePad => BitString::default(),
        };
        self.encrypt_with_nonce(key, m, &nonce)
    }

    /// Deterministic encryption under a caller-supplied nonce.
    pub fn encrypt_with_nonce(&self, key: &BitString, m: &BitString, nonce: &BitString) -> Result<SkeCiphertext> {
        self.check_key(key)?;
        let pad = self.pad(key, nonce, m.len())?;
        Ok(SkeCiphertext { nonce: nonce.clone(), body: pad.xor(m).expect("pad length") })
    }

    pub fn decrypt(&self, key: &BitString, ct: &SkeCiphertext) -> Result<BitString> {
        self.check_key(key)?;
        let pad = self.pad(key, &ct.nonce, ct.body.len())?;
        Ok(pad.xor(&ct.body).expect("pad length"))
    }
}

/// Nonce + PRF-pad encryption with `λ = |k|`.
pub fn ske_encrypt<R: Rng + ?Sized>(key: &BitString, m: &BitString, rng: &mut R) -> Result<SkeCiphertext> {
    Ske::new(key.len(), SkeMode::PrfPad).encrypt(key, m, rng)
}

pub fn ske_decrypt(key: &BitString, ct: &SkeCiphertext) -> Result<BitString> {
    Ske::new(key.len(), SkeMode::PrfPad).decrypt(key, ct)
}
