//! Security games as challenger state machines driving pluggable adversaries.
//!
//! * [`GameKind::Cpa`]: IND-CPA with a public-key-copy oracle.
//! * [`GameKind::CpaEo`]: IND-CPA with an encryption oracle on the evolving
//!   key chain, queries before and after the challenge.
//! * [`GameKind::CpaEoMulti`]: the same, repeated. The inner loop runs new
//!   challenge rounds on the current key chain; the outer loop restarts with a
//!   fresh public key under the same `dk`. One challenge bit covers all rounds.
//! * [`GameKind::Cloning`]: unclonability of PRFSPD proofs ([`cloning`]).
//!
//! A protocol violation (unequal challenge lengths, budget overrun, a message
//! outside the scheme's domain) ends the run and counts as a loss.

mod adversaries;
pub mod cloning;
mod estimate;
mod transcript;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use thiserror::Error;

use crate::bits::BitString;
use crate::primitives::PrimitiveError;
use crate::qsim::rng::{seeded, SimRng};
use crate::schemes::{Ciphertext, KeyState, QpkeScheme, QuantumPublicKey, Recycle, SchemeError};

pub use adversaries::{
    default_messages, AdversaryKind, AlwaysZero, CopyAndMeasure, KeyProjection, KeylessDecrypt, PadReuse,
    PublicVerify, RandomGuess, SwapTestAdversary,
};
pub use estimate::{
    estimate_advantage, parse_text, render_csv_row, render_text, z_score, AdvantageEstimate, ReportContext,
    CSV_HEADER, DEFAULT_CONFIDENCE, MIN_TRIALS, REPORT_HEADER,
};
pub use transcript::{Actor, Event, GameTranscript};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GameError {
    #[error("capability: {0}")]
    Capability(String),
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Primitive(#[from] PrimitiveError),
}

pub type Result<T, E = GameError> = std::result::Result<T, E>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GameKind {
    Cpa,
    CpaEo,
    CpaEoMulti,
    Cloning,
}

impl GameKind {
    pub const ALL: [GameKind; 4] = [Self::Cpa, Self::CpaEo, Self::CpaEoMulti, Self::Cloning];

    pub fn name(self) -> &'static str {
        match self {
            Self::Cpa => "cpa",
            Self::CpaEo => "cpa-eo",
            Self::CpaEoMulti => "cpa-eo-multi",
            Self::Cloning => "cloning",
        }
    }
}

impl fmt::Display for GameKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GameKind {
    type Err = GameError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|g| g.name() == s)
            .ok_or_else(|| GameError::Config(format!("unknown game {s:?}")))
    }
}

pub const DEFAULT_BUDGET: usize = 16;

/// Hard caps standing in for "polynomially many".
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub key_copies: usize,
    /// Encryption-oracle queries per phase.
    pub queries: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Self { key_copies: DEFAULT_BUDGET, queries: DEFAULT_BUDGET }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GameSpec {
    pub game: GameKind,
    pub budget: Budget,
    /// Outer repetitions (fresh key chains) of the multi-challenge game.
    pub outer_rounds: usize,
    /// Challenge rounds per key chain of the multi-challenge game.
    pub inner_rounds: usize,
}

impl GameSpec {
    pub fn new(game: GameKind) -> Self {
        Self { game, budget: Budget::default(), outer_rounds: 2, inner_rounds: 2 }
    }
}

/// Where an encryption query is made.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QueryPhase {
    pub outer: usize,
    pub inner: usize,
    pub after_challenge: bool,
}

impl fmt::Display for QueryPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = if self.after_challenge { "post" } else { "pre" };
        write!(f, "{side}.{}.{}", self.outer, self.inner)
    }
}

/// Challenge round index `(outer, inner)`; `(0, 0)` in single-challenge games.
pub type Round = (usize, usize);

/// Adversary side of the IND-CPA games. Every callback gets the adversary's
/// own randomness.
pub trait Adversary: Send {
    fn name(&self) -> &str;

    /// `QPKGen(dk)` calls made before anything else.
    fn key_copies(&self) -> usize {
        0
    }

    fn receive_public_key_copy(&mut self, _key: &KeyState, _rng: &mut SimRng) {}

    /// Next encryption-oracle message, or `None` to end the phase.
    fn encryption_query(&mut self, _phase: QueryPhase, _rng: &mut SimRng) -> Option<BitString> {
        None
    }

    fn receive_ciphertext(&mut self, _ct: &Ciphertext, _rng: &mut SimRng) {}

    fn choose_challenge(&mut self, round: Round, rng: &mut SimRng) -> (BitString, BitString);

    fn receive_challenge(&mut self, round: Round, ct: &Ciphertext, rng: &mut SimRng);

    fn guess(&mut self, rng: &mut SimRng) -> bool;
}

/// Errors an adversary can provoke through its messages.
fn is_adversary_fault(e: &SchemeError) -> bool {
    matches!(
        e,
        SchemeError::MessageDomain(_) | SchemeError::Primitive(PrimitiveError::MessageTooLong { .. })
    )
}

fn residue_bytes(qpk: &QuantumPublicKey) -> Vec<u8> {
    match qpk.recycle() {
        None => Vec::new(),
        Some(Recycle::Owf { x, y }) => x.concat(y).to_bytes(),
        Some(Recycle::Prfspd { slots }) => slots
            .iter()
            .fold(BitString::default(), |acc, s| acc.concat(&s.x).concat(&s.proof))
            .to_bytes(),
    }
}

struct Challenger<'a> {
    scheme: &'a dyn QpkeScheme,
    spec: &'a GameSpec,
    t: GameTranscript,
}

/// Outcome of a step that the adversary may have broken.
type Step<T> = Result<Option<T>>;

impl Challenger<'_> {
    /// `Enc` with adversary-caused failures turned into violations.
    fn encrypt(&mut self, qpk: QuantumPublicKey, m: &BitString, rng: &mut SimRng) -> Step<(QuantumPublicKey, Ciphertext)> {
        match self.scheme.encrypt(qpk, m, rng) {
            Ok(v) => Ok(Some(v)),
            Err(e) if is_adversary_fault(&e) => {
                self.t.violate(format!("message rejected: {e}"));
                Ok(None)
            }
            Err(e) => Err(e.into()),
        }
    }

    fn oracle_phase(
        &mut self,
        adv: &mut dyn Adversary,
        mut qpk: QuantumPublicKey,
        phase: QueryPhase,
        rng: &mut SimRng,
        adv_rng: &mut SimRng,
    ) -> Step<QuantumPublicKey> {
        let mut answered = 0;
        while let Some(m) = adv.encryption_query(phase, adv_rng) {
            if answered == self.spec.budget.queries {
                self.t.violate(format!("more than {} queries in phase {phase}", self.spec.budget.queries));
                return Ok(None);
            }
            self.t.push("query", phase.to_string(), Actor::Adversary, m.to_bytes());
            let Some((next, ct)) = self.encrypt(qpk, &m, rng)? else { return Ok(None) };
            qpk = next;
            self.t.push("ciphertext", phase.to_string(), Actor::Challenger, ct.transcript_bytes());
            self.t.push("key-chain", phase.to_string(), Actor::Challenger, residue_bytes(&qpk));
            adv.receive_ciphertext(&ct, adv_rng);
            answered += 1;
        }
        self.t.queries.push(answered);
        Ok(Some(qpk))
    }

    fn challenge(
        &mut self,
        adv: &mut dyn Adversary,
        qpk: QuantumPublicKey,
        b: bool,
        round: Round,
        rng: &mut SimRng,
        adv_rng: &mut SimRng,
    ) -> Step<QuantumPublicKey> {
        let phase = format!("challenge.{}.{}", round.0, round.1);
        let (m0, m1) = adv.choose_challenge(round, adv_rng);
        self.t.push("challenge-messages", phase.clone(), Actor::Adversary, m0.concat(&m1).to_bytes());
        if m0.len() != m1.len() {
            self.t.violate(format!("challenge lengths differ: {} vs {}", m0.len(), m1.len()));
            return Ok(None);
        }
        let m = if b { &m1 } else { &m0 };
        let Some((next, ct)) = self.encrypt(qpk, m, rng)? else { return Ok(None) };
        self.t.push("challenge", phase.clone(), Actor::Challenger, ct.transcript_bytes());
        self.t.push("key-chain", phase, Actor::Challenger, residue_bytes(&next));
        adv.receive_challenge(round, &ct, adv_rng);
        Ok(Some(next))
    }

    fn run(mut self, adv: &mut dyn Adversary, rng: &mut SimRng) -> Result<GameTranscript> {
        let game = self.spec.game;
        if game == GameKind::Cloning {
            return Err(GameError::Config("the cloning game is run by games::cloning".into()));
        }
        if game != GameKind::Cpa && !self.scheme.capabilities().encryption_oracle {
            return Err(GameError::Capability(format!(
                "scheme {} is single-use and only supports the cpa game",
                self.scheme.kind()
            )));
        }
        // The adversary's coins come from their own stream so that the
        // challenger's draws do not depend on how many the adversary makes.
        let mut adv_rng = seeded(rng.random());

        let dk = self.scheme.gen(rng);
        self.t.dk = dk.bits().clone();
        self.t.push("keygen", "setup", Actor::Challenger, dk.bits().to_bytes());
        let b: bool = rng.random();
        self.t.b = Some(b);

        let copies = adv.key_copies();
        if copies > self.spec.budget.key_copies {
            self.t.violate(format!("{copies} key copies requested, budget {}", self.spec.budget.key_copies));
            return Ok(self.t);
        }
        if copies > 0 {
            // QPKGen is deterministic in dk, so one run serves every copy.
            let key = self.scheme.qpk_gen(&dk)?;
            for _ in 0..copies {
                self.t.push("key-copy", "setup", Actor::Challenger, Vec::new());
                adv.receive_public_key_copy(key.state(), &mut adv_rng);
            }
        }
        self.t.key_copies = copies;

        let (outer, inner) = match game {
            GameKind::CpaEoMulti => (self.spec.outer_rounds, self.spec.inner_rounds),
            _ => (1, 1),
        };
        for o in 0..outer {
            let mut qpk = self.scheme.qpk_gen(&dk)?;
            for i in 0..inner {
                let phase = |after_challenge| QueryPhase { outer: o, inner: i, after_challenge };
                if game != GameKind::Cpa {
                    let Some(next) = self.oracle_phase(adv, qpk, phase(false), rng, &mut adv_rng)? else {
                        return Ok(self.t);
                    };
                    qpk = next;
                }
                let Some(next) = self.challenge(adv, qpk, b, (o, i), rng, &mut adv_rng)? else {
                    return Ok(self.t);
                };
                qpk = next;
                if game != GameKind::Cpa {
                    let Some(next) = self.oracle_phase(adv, qpk, phase(true), rng, &mut adv_rng)? else {
                        return Ok(self.t);
                    };
                    qpk = next;
                }
            }
        }
        let guess = adv.guess(&mut adv_rng);
        self.t.guess = Some(guess);
        self.t.win = guess == b;
        Ok(self.t)
    }
}

/// Runs one IND-CPA-style game (anything but [`GameKind::Cloning`]).
pub fn run_game(
    scheme: &dyn QpkeScheme,
    adversary: &mut dyn Adversary,
    spec: &GameSpec,
    rng: &mut SimRng,
) -> Result<GameTranscript> {
    let t = GameTranscript::new(spec.game, scheme.kind(), scheme.lambda(), adversary.name());
    Challenger { scheme, spec, t }.run(adversary, rng)
}

/// The IND-CPA game without an encryption oracle.
pub fn run_ind_cpa(scheme: &dyn QpkeScheme, adversary: &mut dyn Adversary, rng: &mut SimRng) -> Result<GameTranscript> {
    run_game(scheme, adversary, &GameSpec::new(GameKind::Cpa), rng)
}

/// The encryption-oracle game, repeated over several challenges when `multi` is set.
pub fn run_ind_cpa_eo(
    scheme: &dyn QpkeScheme,
    adversary: &mut dyn Adversary,
    multi: bool,
    rng: &mut SimRng,
) -> Result<GameTranscript> {
    let game = if multi { GameKind::CpaEoMulti } else { GameKind::CpaEo };
    run_game(scheme, adversary, &GameSpec::new(game), rng)
}

/// Estimates the winning probability of a built-in adversary over `trials` runs.
pub fn estimate_game(
    scheme: &dyn QpkeScheme,
    adversary: AdversaryKind,
    spec: &GameSpec,
    trials: usize,
    seed: u64,
    confidence: f64,
) -> Result<AdvantageEstimate> {
    if spec.game == GameKind::Cloning {
        return Err(GameError::Config("use games::cloning::estimate_cloning for the cloning game".into()));
    }
    estimate_advantage(trials, seed, confidence, |i, rng| {
        let mut adv = adversary.build(scheme.config())?;
        let mut t = run_game(scheme, adv.as_mut(), spec, rng)?;
        t.seed = seed;
        t.trial = i;
        Ok(t)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schemes::{build, SchemeConfig, SchemeKind};

    struct Greedy;

    impl Adversary for Greedy {
        fn name(&self) -> &str {
            "greedy"
        }
        fn encryption_query(&mut self, _: QueryPhase, _: &mut SimRng) -> Option<BitString> {
            Some(BitString::zeros(4))
        }
        fn choose_challenge(&mut self, _: Round, _: &mut SimRng) -> (BitString, BitString) {
            (BitString::zeros(4), BitString::ones(4))
        }
        fn receive_challenge(&mut self, _: Round, _: &Ciphertext, _: &mut SimRng) {}
        fn guess(&mut self, _: &mut SimRng) -> bool {
            true
        }
    }

    struct Uneven;

    impl Adversary for Uneven {
        fn name(&self) -> &str {
            "uneven"
        }
        fn choose_challenge(&mut self, _: Round, _: &mut SimRng) -> (BitString, BitString) {
            (BitString::zeros(4), BitString::ones(5))
        }
        fn receive_challenge(&mut self, _: Round, _: &Ciphertext, _: &mut SimRng) {}
        fn guess(&mut self, _: &mut SimRng) -> bool {
            true
        }
    }

    #[test]
    fn violations_are_losses() {
        let scheme = build(SchemeConfig::new(SchemeKind::Owf, 3)).unwrap();
        let t = run_ind_cpa_eo(scheme.as_ref(), &mut Greedy, false, &mut seeded(1)).unwrap();
        assert!(!t.is_valid() && !t.win);
        assert_eq!(t.events_named("query").count(), DEFAULT_BUDGET);
        let t = run_ind_cpa(scheme.as_ref(), &mut Uneven, &mut seeded(2)).unwrap();
        assert!(!t.is_valid() && !t.win && t.guess.is_none());
    }

    #[test]
    fn single_use_scheme_refuses_oracle_games() {
        let scheme = build(SchemeConfig::new(SchemeKind::Prfs, 3)).unwrap();
        let mut adv = RandomGuess::new(scheme.config());
        for multi in [false, true] {
            assert!(matches!(
                run_ind_cpa_eo(scheme.as_ref(), &mut adv, multi, &mut seeded(3)),
                Err(GameError::Capability(_))
            ));
        }
        assert!(run_ind_cpa(scheme.as_ref(), &mut adv, &mut seeded(3)).unwrap().is_valid());
    }

    #[test]
    fn eo_chain_reuses_the_first_measurement() {
        let scheme = build(SchemeConfig::new(SchemeKind::Owf, 4)).unwrap();
        let mut adv = PadReuse::new(scheme.config());
        let t = run_ind_cpa_eo(scheme.as_ref(), &mut adv, true, &mut seeded(4)).unwrap();
        assert!(t.is_valid());
        let chains: Vec<_> = t.events_named("key-chain").map(|e| e.payload.clone()).collect();
        // Two fresh chains of (1 query + 1 challenge) × 2 rounds each.
        assert_eq!(chains.len(), 8);
        assert!(chains[..4].iter().all(|c| c == &chains[0]));
        assert!(chains[4..].iter().all(|c| c == &chains[4]));
        assert_eq!(t.queries, vec![1, 0, 1, 0, 1, 0, 1, 0]);
    }

    #[test]
    fn transcripts_are_reproducible() {
        let scheme = build(SchemeConfig::new(SchemeKind::Owf, 3)).unwrap();
        let run = |seed| {
            let mut adv = CopyAndMeasure::new(scheme.config(), 3);
            run_ind_cpa_eo(scheme.as_ref(), &mut adv, false, &mut seeded(seed)).unwrap().to_records()
        };
        assert_eq!(run(5), run(5));
        assert_ne!(run(5), run(6));
        assert!(run(5).lines().last().unwrap().starts_with("event=outcome"));
    }
}
