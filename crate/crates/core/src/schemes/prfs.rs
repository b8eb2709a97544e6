use num_complex::Complex64;

use super::{
    check_dk, check_key, Capabilities, Ciphertext, DecryptionKey, KeyState, Mutation, PayloadMode, QpkeScheme,
    QuantumPublicKey, Result, SchemeConfig, SchemeError, SchemeKind,
};
use crate::bits::BitString;
use crate::primitives::{Prfs, PrfsInstantiation, PrfsParams};
use crate::qsim::rng::SimRng;
use crate::qsim::{DensityMatrix, PureState, QuantumState, WireRange};
use rand::Rng;

/// PRFS-based scheme with one-bit messages and quantum ciphertexts:
/// `|qpk⟩ = 2^{-λ/2} Σ_x |x⟩|ψ_{dk,x}⟩`, `x` on `[0, λ)`, `ψ` on `[λ, λ + n)`.
/// A key encrypts once.
#[derive(Clone, Debug)]
pub struct PrfsScheme {
    config: SchemeConfig,
    prfs: Prfs,
}

impl PrfsScheme {
    pub fn new(config: SchemeConfig) -> Result<Self> {
        if config.kind != SchemeKind::Prfs {
            return Err(SchemeError::SchemeMismatch { expected: SchemeKind::Prfs, found: config.kind });
        }
        config.validate()?;
        let instantiation = if config.mutation == Mutation::ConstantPrfs {
            PrfsInstantiation::Constant
        } else {
            PrfsInstantiation::BinaryPhase
        };
        let params = PrfsParams::new(config.lambda, config.lambda, config.n)?;
        Ok(Self { config, prfs: Prfs::new(params, instantiation) })
    }

    pub fn prfs(&self) -> &Prfs {
        &self.prfs
    }

    fn quantum_parts<'a>(&self, ct: &'a Ciphertext) -> Result<(&'a BitString, &'a QuantumState)> {
        match ct {
            Ciphertext::Quantum { x, payload } => {
                if x.len() != self.config.lambda || payload.qubit_count() != self.config.n {
                    return Err(SchemeError::Malformed(format!(
                        "|x|={} with {} payload qubits",
                        x.len(),
                        payload.qubit_count()
                    )));
                }
                Ok((x, payload))
            }
            other => Err(SchemeError::SchemeMismatch { expected: SchemeKind::Prfs, found: other.kind() }),
        }
    }

    /// Probability that `Dec` outputs 0, i.e. that the tester accepts.
    pub fn accept_probability(&self, dk: &DecryptionKey, ct: &Ciphertext) -> Result<f64> {
        check_dk(dk, self.config.lambda)?;
        let (x, payload) = self.quantum_parts(ct)?;
        Ok(self.prfs.test_exact(dk.function(), x, payload)?)
    }
}

impl QpkeScheme for PrfsScheme {
    fn config(&self) -> &SchemeConfig {
        &self.config
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities { encryption_oracle: false, classical_ciphertexts: false, message_bits: Some(1) }
    }

    fn qpk_gen(&self, dk: &DecryptionKey) -> Result<QuantumPublicKey> {
        check_dk(dk, self.config.lambda)?;
        let state = self.prfs.oracle_isometry(dk.function(), &PureState::uniform_superposition(self.config.lambda)?)?;
        Ok(QuantumPublicKey::fresh(SchemeKind::Prfs, self.config.lambda, KeyState::Single(state)))
    }

    fn encrypt(
        &self,
        mut qpk: QuantumPublicKey,
        m: &BitString,
        rng: &mut SimRng,
    ) -> Result<(QuantumPublicKey, Ciphertext)> {
        let (l, n) = (self.config.lambda, self.config.n);
        check_key(&qpk, SchemeKind::Prfs, l)?;
        if qpk.consumed {
            return Err(SchemeError::KeyConsumed);
        }
        if m.len() != 1 {
            return Err(SchemeError::MessageDomain(format!("one-bit messages only, got {} bits", m.len())));
        }
        let KeyState::Single(state) = &qpk.state else {
            return Err(SchemeError::Malformed("product key for the PRFS scheme".into()));
        };
        let (x, post) = state.measure(WireRange::new(0, l), rng)?;
        let payload = if !m.get(0) {
            // The right register of |x⟩|ψ_{dk,x}⟩.
            let base = x.to_u64() as usize;
            let amps: Vec<Complex64> = (0..1usize << n).map(|y| post.amplitude(base | (y << l))).collect();
            QuantumState::Pure(PureState::new(n, amps)?)
        } else {
            match self.config.payload {
                PayloadMode::Sampled => QuantumState::Pure(PureState::basis(n, rng.random_range(0..1usize << n))?),
                PayloadMode::Density => QuantumState::Mixed(DensityMatrix::maximally_mixed(n)?),
            }
        };
        qpk.state = KeyState::Single(post);
        qpk.consumed = true;
        Ok((qpk, Ciphertext::Quantum { x, payload }))
    }

    fn decrypt(&self, dk: &DecryptionKey, ct: &Ciphertext, rng: &mut SimRng) -> Result<BitString> {
        check_dk(dk, self.config.lambda)?;
        let (x, payload) = self.quantum_parts(ct)?;
        let accept = self.prfs.test(dk.function(), x, payload, rng)?;
        Ok(BitString::new(vec![!accept]))
    }
}
