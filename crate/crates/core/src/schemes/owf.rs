use super::{
    check_dk, check_key, zero_key, Capabilities, Ciphertext, ClassicalCiphertext, DecryptionKey, KeyState,
    Mutation, QpkeScheme, QuantumPublicKey, Recycle, Result, SchemeConfig, SchemeError, SchemeKind,
};
use crate::bits::BitString;
use crate::primitives::{FunctionKey, Ske, SkeMode};
use crate::qsim::rng::SimRng;
use crate::qsim::{PureState, WireRange};

/// PRF-based scheme: `|qpk⟩ = 2^{-λ/2} Σ_x |x⟩|f_dk(x)⟩` with `x` on wires
/// `[0, λ)` and `f_dk(x)` on `[λ, 2λ)`. Encryption measures both registers
/// once and reuses `(x, y)` for every later message.
#[derive(Clone, Debug)]
pub struct OwfScheme {
    config: SchemeConfig,
    ske: Ske,
}

impl OwfScheme {
    pub fn new(config: SchemeConfig) -> Result<Self> {
        if config.kind != SchemeKind::Owf {
            return Err(SchemeError::SchemeMismatch { expected: SchemeKind::Owf, found: config.kind });
        }
        config.validate()?;
        let mode = if config.mutation == Mutation::FixedNonce { SkeMode::FixedNonce } else { config.ske };
        Ok(Self { config, ske: Ske::new(config.lambda, mode) })
    }

    pub fn ske(&self) -> &Ske {
        &self.ske
    }

    fn function_key<'a>(&self, dk: &'a DecryptionKey) -> std::borrow::Cow<'a, FunctionKey> {
        if self.config.mutation == Mutation::KeylessPrf {
            std::borrow::Cow::Owned(zero_key(self.config.lambda))
        } else {
            std::borrow::Cow::Borrowed(dk.function())
        }
    }

    /// `f_dk(x)` as used by both key generation and decryption.
    pub fn f(&self, dk: &DecryptionKey, x: &BitString) -> Result<BitString> {
        Ok(self.function_key(dk).eval(x, self.config.lambda)?)
    }

    /// The ciphertext produced from measurement outcome `(x, y)` and SKE nonce
    /// `nonce`; lets callers enumerate every random choice of `Enc`.
    pub fn ciphertext_for(&self, x: &BitString, y: &BitString, m: &BitString, nonce: &BitString) -> Result<Ciphertext> {
        let body = self.ske.encrypt_with_nonce(y, m, nonce)?;
        Ok(ClassicalCiphertext::Owf { lambda: self.config.lambda, x: x.clone(), body }.into())
    }
}

impl QpkeScheme for OwfScheme {
    fn config(&self) -> &SchemeConfig {
        &self.config
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities {
            encryption_oracle: true,
            classical_ciphertexts: true,
            message_bits: (self.ske.mode() == SkeMode::OneTimePad).then_some(self.config.lambda),
        }
    }

    fn qpk_gen(&self, dk: &DecryptionKey) -> Result<QuantumPublicKey> {
        check_dk(dk, self.config.lambda)?;
        let l = self.config.lambda;
        let state = if self.config.mutation == Mutation::CollapsedKey {
            let x = BitString::zeros(l);
            PureState::from_bits(&x.concat(&self.f(dk, &x)?))?
        } else {
            let values = (0..1u64 << l)
                .map(|x| self.f(dk, &BitString::from_u64(x, l)))
                .collect::<Result<Vec<_>>>()?;
            PureState::uniform_superposition(l)?.tensor(&PureState::basis(l, 0)?)?.apply_function_oracle(
                |x| values[x.to_u64() as usize].clone(),
                WireRange::new(0, l),
                WireRange::new(l, l),
            )?
        };
        Ok(QuantumPublicKey::fresh(SchemeKind::Owf, l, KeyState::Single(state)))
    }

    fn encrypt(
        &self,
        mut qpk: QuantumPublicKey,
        m: &BitString,
        rng: &mut SimRng,
    ) -> Result<(QuantumPublicKey, Ciphertext)> {
        let l = self.config.lambda;
        check_key(&qpk, SchemeKind::Owf, l)?;
        if qpk.recycle.is_none() {
            let KeyState::Single(state) = &qpk.state else {
                return Err(SchemeError::Malformed("product key for the PRF scheme".into()));
            };
            let outcome = state.measure_all(rng);
            let (x, y) = (outcome.slice(0, l), outcome.slice(l, l));
            qpk.state = KeyState::Single(PureState::from_bits(&outcome)?);
            qpk.recycle = Some(Recycle::Owf { x, y });
        }
        let Some(Recycle::Owf { x, y }) = &qpk.recycle else {
            return Err(SchemeError::Malformed("foreign recycle slot".into()));
        };
        let body = self.ske.encrypt(y, m, rng)?;
        let ct = ClassicalCiphertext::Owf { lambda: l, x: x.clone(), body }.into();
        Ok((qpk, ct))
    }

    fn decrypt(&self, dk: &DecryptionKey, ct: &Ciphertext, _rng: &mut SimRng) -> Result<BitString> {
        check_dk(dk, self.config.lambda)?;
        match ct {
            Ciphertext::Classical(ClassicalCiphertext::Owf { lambda, x, body }) => {
                if *lambda != self.config.lambda || x.len() != *lambda {
                    return Err(SchemeError::Malformed(format!("λ={lambda}, |x|={}", x.len())));
                }
                let y = self.f(dk, x)?;
                Ok(self.ske.decrypt(&y, body)?)
            }
            other => Err(SchemeError::SchemeMismatch { expected: SchemeKind::Owf, found: other.kind() }),
        }
    }
}
