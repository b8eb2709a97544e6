//! Ciphertexts and the classical wire format.
//!
//! ```text
//! bits(s)   = u16be(|s|) ∥ packed(s)            (LSB-first packing)
//! owf       = 0x01 ∥ u16be(λ) ∥ bits(x) ∥ bits(nonce) ∥ bits(body)
//! prfspd    = 0x02 ∥ u16be(λ) ∥ bits(nonce) ∥ bits(body) ∥ u16be(slots)
//!                 ∥ (bits(x_i) ∥ bits(ỹ_i))*
//! ```
//!
//! Decoding is strict: trailing bytes, stray padding bits and unknown tags
//! are rejected.

use super::{SchemeError, SchemeKind, Result};
use crate::bits::BitString;
use crate::primitives::SkeCiphertext;
use crate::qsim::QuantumState;

pub const TAG_OWF: u8 = 0x01;
pub const TAG_PRFSPD: u8 = 0x02;

/// One `(x^(i), ỹ^(i))` pair of a PRFSPD ciphertext.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProofSlot {
    pub x: BitString,
    pub proof: BitString,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ClassicalCiphertext {
    /// `(x, Enc(y, m))`.
    Owf { lambda: usize, x: BitString, body: SkeCiphertext },
    /// `(Enc(k, m), ((x^(i), ỹ^(i)))_i)`.
    Prfspd { lambda: usize, ske: SkeCiphertext, slots: Vec<ProofSlot> },
}

#[derive(Clone, Debug)]
pub enum Ciphertext {
    Classical(ClassicalCiphertext),
    /// `(x, |φ⟩)`; the payload is mixed only on the exact-analysis path.
    Quantum { x: BitString, payload: QuantumState },
}

impl Ciphertext {
    pub fn kind(&self) -> SchemeKind {
        match self {
            Self::Classical(ClassicalCiphertext::Owf { .. }) => SchemeKind::Owf,
            Self::Classical(ClassicalCiphertext::Prfspd { .. }) => SchemeKind::Prfspd,
            Self::Quantum { .. } => SchemeKind::Prfs,
        }
    }

    pub fn as_classical(&self) -> Option<&ClassicalCiphertext> {
        match self {
            Self::Classical(c) => Some(c),
            Self::Quantum { .. } => None,
        }
    }

    /// Bytes recorded in transcripts: the wire encoding for classical
    /// ciphertexts, the packed classical part `x` otherwise.
    pub fn transcript_bytes(&self) -> Vec<u8> {
        match self {
            Self::Classical(c) => c.to_bytes(),
            Self::Quantum { x, .. } => x.to_bytes(),
        }
    }
}

impl From<ClassicalCiphertext> for Ciphertext {
    fn from(c: ClassicalCiphertext) -> Self {
        Self::Classical(c)
    }
}

fn put_u16(out: &mut Vec<u8>, v: usize) {
    out.extend_from_slice(&u16::try_from(v).expect("field exceeds u16 length prefix").to_be_bytes());
}

fn put_bits(out: &mut Vec<u8>, s: &BitString) {
    put_u16(out, s.len());
    out.extend_from_slice(&s.to_bytes());
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take(&mut self, n: usize) -> Result<&[u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len()).ok_or_else(|| {
            SchemeError::Malformed(format!("truncated at byte {} (wanted {n} more)", self.pos))
        })?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<usize> {
        let b = self.take(2)?;
        Ok(u16::from_be_bytes([b[0], b[1]]) as usize)
    }

    fn bits(&mut self) -> Result<BitString> {
        let len = self.u16()?;
        let bytes = self.take(len.div_ceil(8))?;
        BitString::from_bytes(bytes, len).ok_or_else(|| SchemeError::Malformed("stray padding bits".into()))
    }

    fn finish(&self) -> Result<()> {
        if self.pos != self.bytes.len() {
            return Err(SchemeError::Malformed(format!("{} trailing bytes", self.bytes.len() - self.pos)));
        }
        Ok(())
    }
}

impl ClassicalCiphertext {
    pub fn lambda(&self) -> usize {
        match self {
            Self::Owf { lambda, .. } | Self::Prfspd { lambda, .. } => *lambda,
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        match self {
            Self::Owf { lambda, x, body } => {
                out.push(TAG_OWF);
                put_u16(&mut out, *lambda);
                put_bits(&mut out, x);
                put_bits(&mut out, &body.nonce);
                put_bits(&mut out, &body.body);
            }
            Self::Prfspd { lambda, ske, slots } => {
                out.push(TAG_PRFSPD);
                put_u16(&mut out, *lambda);
                put_bits(&mut out, &ske.nonce);
                put_bits(&mut out, &ske.body);
                put_u16(&mut out, slots.len());
                for s in slots {
                    put_bits(&mut out, &s.x);
                    put_bits(&mut out, &s.proof);
                }
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader { bytes, pos: 0 };
        let ct = match r.u8()? {
            TAG_OWF => {
                let lambda = r.u16()?;
                let x = r.bits()?;
                let nonce = r.bits()?;
                let body = r.bits()?;
                Self::Owf { lambda, x, body: SkeCiphertext { nonce, body } }
            }
            TAG_PRFSPD => {
                let lambda = r.u16()?;
                let nonce = r.bits()?;
                let body = r.bits()?;
                let count = r.u16()?;
                let slots = (0..count)
                    .map(|_| Ok(ProofSlot { x: r.bits()?, proof: r.bits()? }))
                    .collect::<Result<Vec<_>>>()?;
                Self::Prfspd { lambda, ske: SkeCiphertext { nonce, body }, slots }
            }
            tag => return Err(SchemeError::Malformed(format!("unknown tag byte {tag:#04x}"))),
        };
        r.finish()?;
        Ok(ct)
    }
}
