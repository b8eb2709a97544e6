use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;

use super::{Adversary, GameError, QueryPhase, Result, Round, DEFAULT_BUDGET};
use crate::bits::BitString;
use crate::primitives::{prf_eval, FunctionKey, PrfKey, PrfspdParams, PrfspdProof, Ske, SkeCiphertext, SkeMode, ToyPrfspd};
use crate::qsim::rng::SimRng;
use crate::qsim::{swap_test, PureState, QuantumState, WireRange};
use crate::schemes::{Ciphertext, ClassicalCiphertext, KeyState, Mutation, SchemeConfig, SchemeKind};

/// `(0^L, 1^L)` with `L` the longest length every configuration accepts up to 8.
pub fn default_messages(cfg: &SchemeConfig) -> (BitString, BitString) {
    let len = match (cfg.kind, cfg.ske) {
        (SchemeKind::Prfs, _) => 1,
        (_, SkeMode::OneTimePad) => cfg.lambda.min(8),
        _ => 8,
    };
    (BitString::zeros(len), BitString::ones(len))
}

/// The symmetric scheme a configuration encrypts with, as public knowledge.
fn public_ske(cfg: &SchemeConfig) -> Ske {
    let mode = if cfg.mutation == Mutation::FixedNonce { SkeMode::FixedNonce } else { cfg.ske };
    Ske::new(cfg.lambda, mode)
}

/// Evidence gathered so far; later rounds never overwrite a decision.
#[derive(Debug, Default)]
struct Verdict(Option<bool>);

impl Verdict {
    fn record(&mut self, decoded: &BitString, messages: &(BitString, BitString)) {
        if self.0.is_none() {
            if decoded == &messages.0 {
                self.0 = Some(false);
            } else if decoded == &messages.1 {
                self.0 = Some(true);
            }
        }
    }

    fn guess(&self, rng: &mut SimRng) -> bool {
        self.0.unwrap_or_else(|| rng.random())
    }
}

/// Ignores everything and flips a coin.
#[derive(Debug)]
pub struct RandomGuess {
    messages: (BitString, BitString),
}

impl RandomGuess {
    pub fn new(cfg: &SchemeConfig) -> Self {
        Self { messages: default_messages(cfg) }
    }
}

impl Adversary for RandomGuess {
    fn name(&self) -> &str {
        "random-guess"
    }

    fn choose_challenge(&mut self, _: Round, _: &mut SimRng) -> (BitString, BitString) {
        self.messages.clone()
    }

    fn receive_challenge(&mut self, _: Round, _: &Ciphertext, _: &mut SimRng) {}

    fn guess(&mut self, rng: &mut SimRng) -> bool {
        rng.random()
    }
}

#[derive(Debug)]
pub struct AlwaysZero {
    messages: (BitString, BitString),
}

impl AlwaysZero {
    pub fn new(cfg: &SchemeConfig) -> Self {
        Self { messages: default_messages(cfg) }
    }
}

impl Adversary for AlwaysZero {
    fn name(&self) -> &str {
        "always-zero"
    }

    fn choose_challenge(&mut self, _: Round, _: &mut SimRng) -> (BitString, BitString) {
        self.messages.clone()
    }

    fn receive_challenge(&mut self, _: Round, _: &Ciphertext, _: &mut SimRng) {}

    fn guess(&mut self, _: &mut SimRng) -> bool {
        false
    }
}

/// Recomputes `y = f(x)` under the all-zero key and decrypts the challenge.
/// Breaks the PRF scheme when the PRF ignores `dk`.
#[derive(Debug)]
pub struct KeylessDecrypt {
    lambda: usize,
    ske: Ske,
    messages: (BitString, BitString),
    verdict: Verdict,
}

impl KeylessDecrypt {
    pub fn new(cfg: &SchemeConfig) -> Self {
        Self { lambda: cfg.lambda, ske: public_ske(cfg), messages: default_messages(cfg), verdict: Verdict::default() }
    }
}

impl Adversary for KeylessDecrypt {
    fn name(&self) -> &str {
        "keyless-decrypt"
    }

    fn choose_challenge(&mut self, _: Round, _: &mut SimRng) -> (BitString, BitString) {
        self.messages.clone()
    }

    fn receive_challenge(&mut self, _: Round, ct: &Ciphertext, _: &mut SimRng) {
        if let Some(ClassicalCiphertext::Owf { x, body, .. }) = ct.as_classical() {
            let y = prf_eval(&PrfKey::new(BitString::zeros(self.lambda)), x, self.lambda);
            if let Ok(m) = self.ske.decrypt(&y, body) {
                self.verdict.record(&m, &self.messages);
            }
        }
    }

    fn guess(&mut self, rng: &mut SimRng) -> bool {
        self.verdict.guess(rng)
    }
}

/// Encrypts `0^L` through the oracle before each challenge, reads the pad off
/// the answer and strips it from any challenge with the same nonce.
#[derive(Debug)]
pub struct PadReuse {
    messages: (BitString, BitString),
    pads: HashMap<BitString, BitString>,
    asked: Option<QueryPhase>,
    verdict: Verdict,
}

impl PadReuse {
    pub fn new(cfg: &SchemeConfig) -> Self {
        Self { messages: default_messages(cfg), pads: HashMap::new(), asked: None, verdict: Verdict::default() }
    }
}

impl Adversary for PadReuse {
    fn name(&self) -> &str {
        "pad-reuse"
    }

    fn encryption_query(&mut self, phase: QueryPhase, _: &mut SimRng) -> Option<BitString> {
        if phase.after_challenge || self.asked == Some(phase) {
            return None;
        }
        self.asked = Some(phase);
        Some(self.messages.0.clone())
    }

    fn receive_ciphertext(&mut self, ct: &Ciphertext, _: &mut SimRng) {
        if let Some(ClassicalCiphertext::Owf { body: SkeCiphertext { nonce, body }, .. }) = ct.as_classical() {
            // The query was 0^L, so the body is the pad itself.
            self.pads.insert(nonce.clone(), body.clone());
        }
    }

    fn choose_challenge(&mut self, _: Round, _: &mut SimRng) -> (BitString, BitString) {
        self.messages.clone()
    }

    fn receive_challenge(&mut self, _: Round, ct: &Ciphertext, _: &mut SimRng) {
        if let Some(ClassicalCiphertext::Owf { body: SkeCiphertext { nonce, body }, .. }) = ct.as_classical() {
            if let Some(m) = self.pads.get(nonce).and_then(|pad| pad.xor(body)) {
                self.verdict.record(&m, &self.messages);
            }
        }
    }

    fn guess(&mut self, rng: &mut SimRng) -> bool {
        self.verdict.guess(rng)
    }
}

/// Measures its own public-key copies in the computational basis and, if the
/// challenge reuses one of the observed `x`, decrypts with the matching `y`.
#[derive(Debug)]
pub struct CopyAndMeasure {
    lambda: usize,
    copies: usize,
    ske: Ske,
    messages: (BitString, BitString),
    seen: HashMap<BitString, BitString>,
    verdict: Verdict,
}

impl CopyAndMeasure {
    pub fn new(cfg: &SchemeConfig, copies: usize) -> Self {
        Self {
            lambda: cfg.lambda,
            copies,
            ske: public_ske(cfg),
            messages: default_messages(cfg),
            seen: HashMap::new(),
            verdict: Verdict::default(),
        }
    }
}

impl Adversary for CopyAndMeasure {
    fn name(&self) -> &str {
        "copy-and-measure"
    }

    fn key_copies(&self) -> usize {
        self.copies
    }

    fn receive_public_key_copy(&mut self, key: &KeyState, rng: &mut SimRng) {
        if let KeyState::Single(state) = key {
            if state.qubit_count() == 2 * self.lambda {
                let o = state.measure_all(rng);
                self.seen.insert(o.slice(0, self.lambda), o.slice(self.lambda, self.lambda));
            }
        }
    }

    fn choose_challenge(&mut self, _: Round, _: &mut SimRng) -> (BitString, BitString) {
        self.messages.clone()
    }

    fn receive_challenge(&mut self, _: Round, ct: &Ciphertext, _: &mut SimRng) {
        if let Some(ClassicalCiphertext::Owf { x, body, .. }) = ct.as_classical() {
            if let Some(m) = self.seen.get(x).and_then(|y| self.ske.decrypt(y, body).ok()) {
                self.verdict.record(&m, &self.messages);
            }
        }
    }

    fn guess(&mut self, rng: &mut SimRng) -> bool {
        self.verdict.guess(rng)
    }
}

/// Reference state for the PRFS scheme: measure the left register of a
/// public-key copy and keep what is left on the right.
fn reference_state(key: &KeyState, lambda: usize, n: usize, rng: &mut SimRng) -> Option<PureState> {
    let KeyState::Single(state) = key else { return None };
    if state.qubit_count() != lambda + n {
        return None;
    }
    let (x, post) = state.measure(WireRange::new(0, lambda), rng).ok()?;
    let base = x.to_u64() as usize;
    let amps: Vec<Complex64> = (0..1usize << n).map(|y| post.amplitude(base | (y << lambda))).collect();
    PureState::new(n, amps).ok()
}

/// Projects the challenge payload onto `|+⟩^{⊗n}`, the state the
/// constant-state generator outputs for every key and input: accept means 0.
/// Wins with probability `1 − 2^{-n-1}` against that generator. Needs no key
/// copy, since the projector is public.
#[derive(Debug)]
pub struct KeyProjection {
    n: usize,
    verdict: Verdict,
}

impl KeyProjection {
    pub fn new(cfg: &SchemeConfig) -> Self {
        Self { n: cfg.n, verdict: Verdict::default() }
    }
}

impl Adversary for KeyProjection {
    fn name(&self) -> &str {
        "key-projection"
    }

    fn choose_challenge(&mut self, _: Round, _: &mut SimRng) -> (BitString, BitString) {
        (BitString::zeros(1), BitString::ones(1))
    }

    fn receive_challenge(&mut self, _: Round, ct: &Ciphertext, rng: &mut SimRng) {
        let Ciphertext::Quantum { payload, .. } = ct else { return };
        let Ok(plus) = PureState::uniform_superposition(self.n) else { return };
        if let Ok(p) = crate::qsim::fidelity(&QuantumState::Pure(plus), payload) {
            let accept = rng.random::<f64>() < p;
            self.verdict.0.get_or_insert(!accept);
        }
    }

    fn guess(&mut self, rng: &mut SimRng) -> bool {
        self.verdict.guess(rng)
    }
}

/// Swap-tests the challenge payload against the right register of one
/// public-key copy (after measuring its left register). Reaches only
/// `3/4 − 2^{-n-2}` against the constant-state generator.
#[derive(Debug)]
pub struct SwapTestAdversary {
    lambda: usize,
    n: usize,
    reference: Option<PureState>,
    verdict: Verdict,
}

impl SwapTestAdversary {
    pub fn new(cfg: &SchemeConfig) -> Self {
        Self { lambda: cfg.lambda, n: cfg.n, reference: None, verdict: Verdict::default() }
    }
}

impl Adversary for SwapTestAdversary {
    fn name(&self) -> &str {
        "swap-test"
    }

    fn key_copies(&self) -> usize {
        1
    }

    fn receive_public_key_copy(&mut self, key: &KeyState, rng: &mut SimRng) {
        self.reference = reference_state(key, self.lambda, self.n, rng);
    }

    fn choose_challenge(&mut self, _: Round, _: &mut SimRng) -> (BitString, BitString) {
        (BitString::zeros(1), BitString::ones(1))
    }

    fn receive_challenge(&mut self, _: Round, ct: &Ciphertext, rng: &mut SimRng) {
        let (Some(reference), Ciphertext::Quantum { payload, .. }) = (&self.reference, ct) else { return };
        if let Ok(same) = swap_test(&QuantumState::Pure(reference.clone()), payload, rng) {
            self.verdict.0.get_or_insert(!same);
        }
    }

    fn guess(&mut self, rng: &mut SimRng) -> bool {
        self.verdict.guess(rng)
    }
}

/// Runs PRFSPD verification under the all-zero key on every slot of the
/// challenge and tries each key consistent with the accepting slots.
#[derive(Debug)]
pub struct PublicVerify {
    lambda: usize,
    prfspd: ToyPrfspd,
    ske: Ske,
    messages: (BitString, BitString),
    verdict: Verdict,
}

/// Largest set of accepting slots whose subsets are enumerated.
const MAX_CANDIDATE_SLOTS: usize = 16;

impl PublicVerify {
    pub fn new(cfg: &SchemeConfig) -> Result<Self> {
        let params = PrfspdParams::new(cfg.lambda, cfg.lambda, cfg.m, cfg.t)?;
        Ok(Self {
            lambda: cfg.lambda,
            prfspd: ToyPrfspd::new(params),
            ske: public_ske(cfg),
            messages: default_messages(cfg),
            verdict: Verdict::default(),
        })
    }
}

impl Adversary for PublicVerify {
    fn name(&self) -> &str {
        "public-verify"
    }

    fn choose_challenge(&mut self, _: Round, _: &mut SimRng) -> (BitString, BitString) {
        self.messages.clone()
    }

    fn receive_challenge(&mut self, _: Round, ct: &Ciphertext, _: &mut SimRng) {
        let Some(ClassicalCiphertext::Prfspd { ske, slots, .. }) = ct.as_classical() else { return };
        let key = FunctionKey::Prf(PrfKey::new(BitString::zeros(self.lambda)));
        let accepting: Vec<usize> = slots
            .iter()
            .enumerate()
            .filter(|(_, s)| self.prfspd.ver(&key, &s.x, &PrfspdProof::new(s.proof.clone())).unwrap_or(false))
            .map(|(i, _)| i)
            .collect();
        if accepting.len() > MAX_CANDIDATE_SLOTS {
            return;
        }
        // Every slot carrying a real proof verifies, so the true key is one
        // of these subsets; the rest decrypt to noise.
        let mut votes = [0usize; 2];
        for subset in 0..1u64 << accepting.len() {
            let mut k = vec![false; slots.len()];
            for (j, &i) in accepting.iter().enumerate() {
                k[i] = subset >> j & 1 == 1;
            }
            if let Ok(m) = self.ske.decrypt(&BitString::new(k), ske) {
                if m == self.messages.0 {
                    votes[0] += 1;
                } else if m == self.messages.1 {
                    votes[1] += 1;
                }
            }
        }
        if votes[0] != votes[1] && self.verdict.0.is_none() {
            self.verdict.0 = Some(votes[1] > votes[0]);
        }
    }

    fn guess(&mut self, rng: &mut SimRng) -> bool {
        self.verdict.guess(rng)
    }
}

/// Built-in adversaries by name.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AdversaryKind {
    RandomGuess,
    AlwaysZero,
    KeylessDecrypt,
    PadReuse,
    CopyAndMeasure,
    KeyProjection,
    SwapTest,
    PublicVerify,
}

impl AdversaryKind {
    pub const ALL: [AdversaryKind; 8] = [
        Self::RandomGuess,
        Self::AlwaysZero,
        Self::KeylessDecrypt,
        Self::PadReuse,
        Self::CopyAndMeasure,
        Self::KeyProjection,
        Self::SwapTest,
        Self::PublicVerify,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::RandomGuess => "random-guess",
            Self::AlwaysZero => "always-zero",
            Self::KeylessDecrypt => "keyless-decrypt",
            Self::PadReuse => "pad-reuse",
            Self::CopyAndMeasure => "copy-and-measure",
            Self::KeyProjection => "key-projection",
            Self::SwapTest => "swap-test",
            Self::PublicVerify => "public-verify",
        }
    }

    /// The scheme the attack is written against; `None` for generic ones.
    pub fn target(self) -> Option<SchemeKind> {
        match self {
            Self::RandomGuess | Self::AlwaysZero => None,
            Self::KeylessDecrypt | Self::PadReuse | Self::CopyAndMeasure => Some(SchemeKind::Owf),
            Self::KeyProjection | Self::SwapTest => Some(SchemeKind::Prfs),
            Self::PublicVerify => Some(SchemeKind::Prfspd),
        }
    }

    /// The mutation the attack is paired with.
    pub fn paired_mutation(self) -> Option<Mutation> {
        match self {
            Self::RandomGuess | Self::AlwaysZero => None,
            Self::KeylessDecrypt => Some(Mutation::KeylessPrf),
            Self::PadReuse => Some(Mutation::FixedNonce),
            Self::CopyAndMeasure => Some(Mutation::CollapsedKey),
            Self::KeyProjection | Self::SwapTest => Some(Mutation::ConstantPrfs),
            Self::PublicVerify => Some(Mutation::KeylessPrfspd),
        }
    }

    pub fn build(self, cfg: &SchemeConfig) -> Result<Box<dyn Adversary>> {
        if let Some(target) = self.target() {
            if target != cfg.kind {
                return Err(GameError::Config(format!("adversary {self} targets scheme {target}, not {}", cfg.kind)));
            }
        }
        Ok(match self {
            Self::RandomGuess => Box::new(RandomGuess::new(cfg)),
            Self::AlwaysZero => Box::new(AlwaysZero::new(cfg)),
            Self::KeylessDecrypt => Box::new(KeylessDecrypt::new(cfg)),
            Self::PadReuse => Box::new(PadReuse::new(cfg)),
            Self::CopyAndMeasure => Box::new(CopyAndMeasure::new(cfg, DEFAULT_BUDGET)),
            Self::KeyProjection => Box::new(KeyProjection::new(cfg)),
            Self::SwapTest => Box::new(SwapTestAdversary::new(cfg)),
            Self::PublicVerify => Box::new(PublicVerify::new(cfg)?),
        })
    }
}

impl fmt::Display for AdversaryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AdversaryKind {
    type Err = GameError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| GameError::Config(format!("unknown adversary {s:?}")))
    }
}
