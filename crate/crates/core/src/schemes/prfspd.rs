use super::{
    check_dk, check_key, zero_key, Capabilities, Ciphertext, ClassicalCiphertext, DecryptionKey, KeyState,
    Mutation, ProofSlot, QpkeScheme, QuantumPublicKey, Recycle, Result, SchemeConfig, SchemeError, SchemeKind,
};
use crate::bits::BitString;
use crate::primitives::{FunctionKey, PrfspdParams, PrfspdProof, Ske, ToyPrfspd};
use crate::qsim::rng::SimRng;
use crate::qsim::{PureState, WireRange};

/// PRFSPD-based scheme. The public key is `λ` identical slots
/// `2^{-λ/2} Σ_x |x⟩|ψ_{dk,x}⟩`, each kept as its own state so that `λ` slots
/// of `2λ + 1` qubits never have to be tensored together. Within a slot `x`
/// sits on `[0, λ)` and the PRFSPD state on `[λ, λ + c)`.
#[derive(Clone, Debug)]
pub struct PrfspdScheme {
    config: SchemeConfig,
    prfspd: ToyPrfspd,
    ske: Ske,
}

impl PrfspdScheme {
    pub fn new(config: SchemeConfig) -> Result<Self> {
        if config.kind != SchemeKind::Prfspd {
            return Err(SchemeError::SchemeMismatch { expected: SchemeKind::Prfspd, found: config.kind });
        }
        config.validate()?;
        let l = config.lambda;
        let prfspd = ToyPrfspd::new(PrfspdParams::new(l, l, config.m, config.t)?);
        Ok(Self { config, prfspd, ske: Ske::new(l, config.ske) })
    }

    pub fn prfspd(&self) -> &ToyPrfspd {
        &self.prfspd
    }

    pub fn ske(&self) -> &Ske {
        &self.ske
    }

    pub fn function_key(&self, dk: &DecryptionKey) -> FunctionKey {
        if self.config.mutation == Mutation::KeylessPrfspd {
            zero_key(self.config.lambda)
        } else {
            dk.function().clone()
        }
    }

    /// One slot `2^{-λ/2} Σ_x |x⟩ ⊗ Gen(dk, x)`.
    pub fn slot_state(&self, dk: &DecryptionKey) -> Result<PureState> {
        let l = self.config.lambda;
        let (m, t) = (self.config.m, self.config.t);
        let key = self.function_key(dk);
        // Input wires [0, λ + m) hold x ∥ y, so the oracle sees exactly x ∥ y.
        let tags = (0..1u64 << (l + m))
            .map(|xy| {
                let xy = BitString::from_u64(xy, l + m);
                self.prfspd.tag(&key, &xy.slice(0, l), &xy.slice(l, m))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(PureState::uniform_superposition(l + m)?.tensor(&PureState::basis(t, 0)?)?.apply_function_oracle(
            |xy| tags[xy.to_u64() as usize].clone(),
            WireRange::new(0, l + m),
            WireRange::new(l + m, t),
        )?)
    }

    /// `Ver(dk, x, ỹ)` for one slot.
    pub fn verify_slot(&self, dk: &DecryptionKey, slot: &ProofSlot) -> Result<bool> {
        Ok(self.prfspd.ver(&self.function_key(dk), &slot.x, &PrfspdProof::new(slot.proof.clone()))?)
    }
}

impl QpkeScheme for PrfspdScheme {
    fn config(&self) -> &SchemeConfig {
        &self.config
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities { encryption_oracle: true, classical_ciphertexts: true, message_bits: None }
    }

    fn qpk_gen(&self, dk: &DecryptionKey) -> Result<QuantumPublicKey> {
        check_dk(dk, self.config.lambda)?;
        let slot = self.slot_state(dk)?;
        // Clones share one amplitude buffer.
        let slots = vec![slot; self.config.lambda];
        Ok(QuantumPublicKey::fresh(SchemeKind::Prfspd, self.config.lambda, KeyState::Product(slots)))
    }

    fn encrypt(
        &self,
        mut qpk: QuantumPublicKey,
        m: &BitString,
        rng: &mut SimRng,
    ) -> Result<(QuantumPublicKey, Ciphertext)> {
        let l = self.config.lambda;
        check_key(&qpk, SchemeKind::Prfspd, l)?;
        if qpk.recycle.is_none() {
            let KeyState::Product(slots) = &qpk.state else {
                return Err(SchemeError::Malformed("single-register key for the PRFSPD scheme".into()));
            };
            // Measuring x and then running Del (a full measurement of what
            // remains) has the same joint distribution as one full measurement.
            let outcomes: Vec<BitString> = slots.iter().map(|s| s.measure_all(rng)).collect();
            let proofs = outcomes
                .iter()
                .map(|o| ProofSlot { x: o.slice(0, l), proof: o.slice(l, o.len() - l) })
                .collect();
            qpk.state = KeyState::Product(outcomes.iter().map(PureState::from_bits).collect::<Result<_, _>>()?);
            qpk.recycle = Some(Recycle::Prfspd { slots: proofs });
        }
        let Some(Recycle::Prfspd { slots }) = &qpk.recycle else {
            return Err(SchemeError::Malformed("foreign recycle slot".into()));
        };
        let k = BitString::random(l, rng);
        let c = self.config.proof_width();
        let masked = slots
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let r = BitString::random(c, rng);
                ProofSlot { x: s.x.clone(), proof: if k.get(i) { s.proof.clone() } else { r } }
            })
            .collect();
        let ske = self.ske.encrypt(&k, m, rng)?;
        Ok((qpk, ClassicalCiphertext::Prfspd { lambda: l, ske, slots: masked }.into()))
    }

    fn decrypt(&self, dk: &DecryptionKey, ct: &Ciphertext, _rng: &mut SimRng) -> Result<BitString> {
        let l = self.config.lambda;
        check_dk(dk, l)?;
        match ct {
            Ciphertext::Classical(ClassicalCiphertext::Prfspd { lambda, ske, slots }) => {
                if *lambda != l || slots.len() != l {
                    return Err(SchemeError::Malformed(format!("λ={lambda} with {} slots", slots.len())));
                }
                let k = slots
                    .iter()
                    .map(|s| self.verify_slot(dk, s))
                    .collect::<Result<Vec<bool>>>()?;
                Ok(self.ske.decrypt(&BitString::new(k), ske)?)
            }
            other => Err(SchemeError::SchemeMismatch { expected: SchemeKind::Prfspd, found: other.kind() }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::rng::seeded;

    fn scheme(lambda: usize) -> PrfspdScheme {
        PrfspdScheme::new(SchemeConfig::new(SchemeKind::Prfspd, lambda)).unwrap()
    }

    #[test]
    fn slot_equals_isometry_over_gen() {
        let s = scheme(3);
        let dk = DecryptionKey::from_bits(BitString::from_u64(6, 3));
        let slot = s.slot_state(&dk).unwrap();
        let c = s.config.proof_width();
        let key = s.function_key(&dk);
        for x in 0..8u64 {
            let psi: PureState = s.prfspd.gen(&key, &BitString::from_u64(x, 3)).unwrap();
            for (y, a) in psi.amplitudes().iter().enumerate() {
                let got = slot.amplitude(x as usize | (y << 3)) * 2f64.powf(1.5);
                assert!((got - a).norm() < 1e-12);
            }
        }
        assert_eq!(slot.qubit_count(), 3 + c);
    }

    #[test]
    fn honest_round_trip_and_false_accept_rate() {
        let s = scheme(4);
        let mut rng = seeded(11);
        let trials = 2000;
        let mut failures = 0;
        for _ in 0..trials {
            let dk = s.gen(&mut rng);
            let m = BitString::random(8, &mut rng);
            let (_, ct) = s.encrypt(s.qpk_gen(&dk).unwrap(), &m, &mut rng).unwrap();
            let bytes = ct.as_classical().unwrap().to_bytes();
            let ct: Ciphertext = ClassicalCiphertext::from_bytes(&bytes).unwrap().into();
            if s.decrypt(&dk, &ct, &mut rng).unwrap() != m {
                failures += 1;
            }
        }
        // Decryption fails only when a masked slot's random r verifies:
        // 1 − (1 − 2^{-t}/2)^λ at t = λ = 4.
        let p = 1.0 - (1.0 - 2f64.powi(-5)).powi(4);
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        assert!((failures as f64 / trials as f64 - p).abs() < 4.0 * sigma, "{failures}");
    }

    #[test]
    fn replacing_a_proof_clears_its_key_bit() {
        let s = scheme(3);
        let mut rng = seeded(12);
        let dk = s.gen(&mut rng);
        let key = s.qpk_gen(&dk).unwrap();
        let (key, _) = s.encrypt(key, &BitString::zeros(4), &mut rng).unwrap();
        let Some(Recycle::Prfspd { slots }) = key.recycle() else { panic!() };
        let c = s.config.proof_width();
        for slot in slots {
            assert!(s.verify_slot(&dk, slot).unwrap());
            let accepted = (0..1u64 << c)
                .filter(|&r| s.verify_slot(&dk, &ProofSlot { x: slot.x.clone(), proof: BitString::from_u64(r, c) }).unwrap())
                .count();
            // Exactly 2^m of the 2^c strings verify.
            assert_eq!(accepted, 1 << s.config.m);
        }
    }

    #[test]
    fn recycle_keeps_proofs_and_resamples_k() {
        let s = scheme(5);
        let mut rng = seeded(13);
        let dk = s.gen(&mut rng);
        let (qpk, c1) = s.encrypt(s.qpk_gen(&dk).unwrap(), &BitString::zeros(4), &mut rng).unwrap();
        let first = qpk.recycle().cloned();
        let (qpk, c2) = s.encrypt(qpk, &BitString::zeros(4), &mut rng).unwrap();
        assert_eq!(qpk.recycle().cloned(), first);
        let xs = |c: &Ciphertext| match c.as_classical() {
            Some(ClassicalCiphertext::Prfspd { slots, .. }) => slots.iter().map(|s| s.x.clone()).collect::<Vec<_>>(),
            _ => panic!(),
        };
        assert_eq!(xs(&c1), xs(&c2));
        assert_ne!(c1.transcript_bytes(), c2.transcript_bytes());
    }
}
