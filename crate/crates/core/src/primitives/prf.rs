use rand::Rng;
use sha2::{Digest, Sha256};

use super::{PrimitiveError, Result};
use crate::bits::BitString;

const DOMAIN_TAG: &[u8] = b"qpke-prf/v1";

/// PRF key `k ∈ {0,1}^λ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PrfKey(BitString);

impl PrfKey {
    pub fn new(bits: BitString) -> Self {
        Self(bits)
    }

    pub fn random<R: Rng + ?Sized>(lambda: usize, rng: &mut R) -> Self {
        Self(BitString::random(lambda, rng))
    }

    pub fn bits(&self) -> &BitString {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Counter-mode expansion of SHA-256 over `(k ∥ x)`.
///
/// Block `j` is `SHA-256("qpke-prf/v1" ∥ u16be(|k|) ∥ bytes(k) ∥ u16be(|x|) ∥
/// bytes(x) ∥ u32be(j))`; output bit `i` is bit `i % 8` of byte `i / 8` of the
/// concatenated blocks. Bytes of a bit string use the crate's LSB-first
/// packing.
pub fn prf_eval(key: &PrfKey, x: &BitString, output_width: usize) -> BitString {
    let key_bytes = key.0.to_bytes();
    let x_bytes = x.to_bytes();
    let mut stream = Vec::with_capacity(output_width.div_ceil(8) + 32);
    let mut counter: u32 = 0;
    while stream.len() * 8 < output_width {
        let mut h = Sha256::new();
        h.update(DOMAIN_TAG);
        h.update((key.len() as u16).to_be_bytes());
        h.update(&key_bytes);
        h.update((x.len() as u16).to_be_bytes());
        h.update(&x_bytes);
        h.update(counter.to_be_bytes());
        stream.extend_from_slice(&h.finalize());
        counter += 1;
    }
    BitString::new((0..output_width).map(|i| (stream[i / 8] >> (i % 8)) & 1 == 1).collect())
}

/// A keyed PRF with a fixed domain and range.
#[derive(Clone, Debug)]
pub struct Prf {
    key: PrfKey,
    input_width: usize,
    output_width: usize,
}

impl Prf {
    pub fn new(key: PrfKey, input_width: usize, output_width: usize) -> Self {
        Self { key, input_width, output_width }
    }

    pub fn key(&self) -> &PrfKey {
        &self.key
    }

    pub fn output_width(&self) -> usize {
        self.output_width
    }

    pub fn eval(&self, x: &BitString) -> Result<BitString> {
        if x.len() != self.input_width {
            return Err(PrimitiveError::Width { what: "PRF input", expected: self.input_width, actual: x.len() });
        }
        Ok(prf_eval(&self.key, x, self.output_width))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::rng::seeded;

    #[test]
    fn deterministic() {
        let k = PrfKey::new(BitString::from_u64(0b1011, 4));
        let x = BitString::from_u64(3, 4);
        assert_eq!(prf_eval(&k, &x, 16), prf_eval(&k, &x, 16));
    }

    // Computed independently with Python's hashlib for all k, x in {0,1}^3.
    const TRUTH_TABLE: [[u64; 8]; 8] = [
        [2, 3, 2, 3, 1, 6, 1, 2],
        [6, 2, 2, 1, 2, 3, 5, 2],
        [3, 0, 4, 5, 0, 1, 2, 4],
        [0, 5, 6, 4, 7, 2, 6, 6],
        [2, 6, 4, 1, 5, 3, 4, 5],
        [4, 0, 0, 7, 4, 2, 1, 6],
        [4, 6, 1, 1, 2, 2, 1, 7],
        [2, 1, 5, 1, 4, 3, 0, 2],
    ];

    #[test]
    fn frozen_truth_table() {
        for (k, row) in TRUTH_TABLE.iter().enumerate() {
            let key = PrfKey::new(BitString::from_u64(k as u64, 3));
            for (x, &want) in row.iter().enumerate() {
                assert_eq!(prf_eval(&key, &BitString::from_u64(x as u64, 3), 3).to_u64(), want, "k={k} x={x}");
            }
        }
        let key = PrfKey::new(BitString::from_u64(0b1011, 4));
        assert_eq!(prf_eval(&key, &BitString::from_u64(3, 4), 16).to_u64(), 0x126a);
    }

    #[test]
    fn counter_mode_prefix_stable() {
        let k = PrfKey::new(BitString::from_u64(5, 3));
        let x = BitString::from_u64(1, 3);
        let long = prf_eval(&k, &x, 600);
        assert_eq!(prf_eval(&k, &x, 7), long.slice(0, 7));
        assert_eq!(long.len(), 600);
    }

    #[test]
    fn width_checked() {
        let prf = Prf::new(PrfKey::new(BitString::zeros(3)), 3, 3);
        assert!(matches!(prf.eval(&BitString::zeros(4)), Err(PrimitiveError::Width { .. })));
    }

    #[test]
    fn distinct_keys_disagree() {
        // Distinct keys collide on an n-bit output with probability 2^{-n}.
        let mut rng = seeded(17);
        let n = 8;
        let trials = 1000;
        let mut differ = 0;
        for _ in 0..trials {
            let a = PrfKey::random(16, &mut rng);
            let mut b = PrfKey::random(16, &mut rng);
            while b == a {
                b = PrfKey::random(16, &mut rng);
            }
            let x = BitString::random(8, &mut rng);
            if prf_eval(&a, &x, n) != prf_eval(&b, &x, n) {
                differ += 1;
            }
        }
        assert!(differ as f64 / trials as f64 >= 1.0 - 2f64.powi(-(n as i32) + 1) - 3.0 * (2f64.powi(-(n as i32)) / trials as f64).sqrt());
    }
}
