use rand::Rng;

use super::{FunctionKey, PrimitiveError, Result};
use crate::bits::BitString;
use crate::qsim::{PureState, Real, WireRange};

/// Widths of the toy PRFSPD: key `w`, input `d`, measured half `m`, tag `t`.
/// State and proof both have `n = c = m + t` bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrfspdParams {
    pub key_width: usize,
    pub input_width: usize,
    pub measured_width: usize,
    pub tag_width: usize,
}

impl PrfspdParams {
    pub fn new(key_width: usize, input_width: usize, measured_width: usize, tag_width: usize) -> Result<Self> {
        if key_width == 0 || input_width == 0 || measured_width == 0 || tag_width == 0 {
            return Err(PrimitiveError::Config(format!(
                "PRFSPD widths must be positive (w={key_width}, d={input_width}, m={measured_width}, t={tag_width})"
            )));
        }
        Ok(Self { key_width, input_width, measured_width, tag_width })
    }

    pub fn state_qubits(&self) -> usize {
        self.measured_width + self.tag_width
    }

    pub fn proof_width(&self) -> usize {
        self.measured_width + self.tag_width
    }

    /// Fraction of `c`-bit strings that verify for a fixed `(k, x)`: `2^{-t}`.
    pub fn accepting_density(&self) -> f64 {
        2f64.powi(-(self.tag_width as i32))
    }
}

/// Classical proof of destruction `p = (y, z)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrfspdProof(BitString);

impl PrfspdProof {
    pub fn new(bits: BitString) -> Self {
        Self(bits)
    }

    pub fn bits(&self) -> &BitString {
        &self.0
    }

    pub fn into_bits(self) -> BitString {
        self.0
    }
}

/// `Gen(k,x) = 2^{-m/2} Σ_y |y⟩|f_k(x ∥ y)⟩`, `Del` = full standard-basis
/// measurement, `Ver(k,x,(y,z)) = [z = f_k(x ∥ y)]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ToyPrfspd {
    pub params: PrfspdParams,
}

impl ToyPrfspd {
    pub fn new(params: PrfspdParams) -> Self {
        Self { params }
    }

    fn check_input(&self, x: &BitString) -> Result<()> {
        if x.len() != self.params.input_width {
            return Err(PrimitiveError::Width { what: "PRFSPD input", expected: self.params.input_width, actual: x.len() });
        }
        Ok(())
    }

    pub fn tag(&self, key: &FunctionKey, x: &BitString, y: &BitString) -> Result<BitString> {
        key.eval(&x.concat(y), self.params.tag_width)
    }

    pub fn gen<T: Real>(&self, key: &FunctionKey, x: &BitString) -> Result<PureState<T>> {
        self.check_input(x)?;
        let m = self.params.measured_width;
        let t = self.params.tag_width;
        let start = PureState::<T>::uniform_superposition(m)?.tensor(&PureState::basis(t, 0)?)?;
        // Tags are evaluated up front so key errors surface as Results.
        let tags = (0..1u64 << m)
            .map(|y| self.tag(key, x, &BitString::from_u64(y, m)))
            .collect::<Result<Vec<_>>>()?;
        Ok(start.apply_function_oracle(
            |y| tags[y.to_u64() as usize].clone(),
            WireRange::new(0, m),
            WireRange::new(m, t),
        )?)
    }

    pub fn del<T: Real, R: Rng + ?Sized>(&self, state: &PureState<T>, rng: &mut R) -> Result<PrfspdProof> {
        let n = self.params.state_qubits();
        if state.qubit_count() != n {
            return Err(PrimitiveError::Width { what: "PRFSPD state", expected: n, actual: state.qubit_count() });
        }
        Ok(PrfspdProof(state.measure_all(rng)))
    }

    pub fn ver(&self, key: &FunctionKey, x: &BitString, proof: &PrfspdProof) -> Result<bool> {
        self.check_input(x)?;
        let c = self.params.proof_width();
        if proof.0.len() != c {
            return Err(PrimitiveError::Width { what: "PRFSPD proof", expected: c, actual: proof.0.len() });
        }
        let m = self.params.measured_width;
        let y = proof.0.slice(0, m);
        let z = proof.0.slice(m, self.params.tag_width);
        Ok(self.tag(key, x, &y)? == z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primitives::PrfKey;
    use crate::qsim::rng::seeded;
    use std::collections::HashSet;

    fn toy(w: usize) -> ToyPrfspd {
        ToyPrfspd::new(PrfspdParams::new(w, w, 1, 3).unwrap())
    }

    #[test]
    fn correctness_exhaustive_lambda_three() {
        let pd = toy(3);
        let mut rng = seeded(1);
        for k in 0..8 {
            let key = FunctionKey::Prf(PrfKey::new(BitString::from_u64(k, 3)));
            for x in 0..8 {
                let x = BitString::from_u64(x, 3);
                let state: PureState = pd.gen(&key, &x).unwrap();
                // Every branch of Del verifies, not just sampled ones.
                for branch in state.branches(WireRange::full(4)).unwrap() {
                    assert!(pd.ver(&key, &x, &PrfspdProof::new(branch.outcome)).unwrap());
                }
                let p = pd.del(&state, &mut rng).unwrap();
                assert!(pd.ver(&key, &x, &p).unwrap());
            }
        }
    }

    #[test]
    fn accepting_density_by_enumeration() {
        let pd = toy(3);
        for k in 0..8 {
            let key = FunctionKey::Prf(PrfKey::new(BitString::from_u64(k, 3)));
            let x = BitString::from_u64(k ^ 5, 3);
            let accepted = (0..16u64)
                .filter(|&p| pd.ver(&key, &x, &PrfspdProof::new(BitString::from_u64(p, 4))).unwrap())
                .count();
            // Exactly one tag per y ∈ {0,1}^m.
            assert_eq!(accepted, 2);
            assert_eq!(accepted as f64 / 16.0, pd.params.accepting_density());
        }
    }

    #[test]
    fn random_proofs_rarely_verify() {
        let pd = toy(6);
        let mut rng = seeded(2);
        let key = FunctionKey::Prf(PrfKey::random(6, &mut rng));
        let n = 10_000;
        let acc = (0..n)
            .filter(|_| {
                let x = BitString::random(6, &mut rng);
                pd.ver(&key, &x, &PrfspdProof::new(BitString::random(4, &mut rng))).unwrap()
            })
            .count();
        let p = pd.params.accepting_density();
        assert!(acc as f64 / n as f64 <= p + 3.0 * (p * (1.0 - p) / n as f64).sqrt());
    }

    #[test]
    fn two_deletions_collide_at_rate_two_to_minus_m() {
        let pd = ToyPrfspd::new(PrfspdParams::new(4, 4, 2, 2).unwrap());
        let mut rng = seeded(3);
        let key = FunctionKey::Prf(PrfKey::random(4, &mut rng));
        let x = BitString::from_u64(3, 4);
        let state: PureState = pd.gen(&key, &x).unwrap();
        let n = 10_000;
        let distinct = (0..n)
            .filter(|_| pd.del(&state, &mut rng).unwrap() != pd.del(&state, &mut rng).unwrap())
            .count();
        let p = 1.0 - 0.25;
        assert!((distinct as f64 / n as f64 - p).abs() < 3.0 * (p * (1.0 - p) / n as f64).sqrt());
        let proofs: HashSet<_> = (0..200).map(|_| pd.del(&state, &mut rng).unwrap()).collect();
        assert_eq!(proofs.len(), 4);
    }

    #[test]
    fn widths_checked() {
        let pd = toy(3);
        let key = FunctionKey::Prf(PrfKey::new(BitString::zeros(3)));
        assert!(pd.ver(&key, &BitString::zeros(3), &PrfspdProof::new(BitString::zeros(3))).is_err());
        assert!(pd.gen::<f64>(&key, &BitString::zeros(2)).is_err());
    }
}
