//! Unclonability-of-proofs game for the PRFSPD.
//!
//! The adversary gets `Gen(k, ·)` and `Ver(k, ·, ·)` oracles, then names an
//! input `x` and `t_x + 1` proofs, where `t_x` counts its `Gen` queries on
//! `x`. It wins iff the proofs are pairwise distinct and all verify.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use rand::Rng;

use super::{estimate_advantage, Actor, AdvantageEstimate, GameError, GameKind, GameTranscript, Result};
use crate::bits::BitString;
use crate::primitives::{FunctionKey, PrfKey, PrfspdParams, PrfspdProof, ToyPrfspd};
use crate::qsim::rng::{seeded, SimRng};
use crate::qsim::PureState;
use crate::schemes::{Mutation, SchemeConfig, SchemeKind};

/// Oracle budgets of one cloning adversary.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleBudget {
    pub gen: usize,
    pub ver: usize,
}

impl Default for OracleBudget {
    fn default() -> Self {
        Self { gen: super::DEFAULT_BUDGET, ver: super::DEFAULT_BUDGET }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BudgetExceeded(pub &'static str);

/// Challenger-side oracles with the `t_x` counters.
pub struct CloningOracle<'a> {
    prfspd: &'a ToyPrfspd,
    key: &'a FunctionKey,
    budget: OracleBudget,
    counters: BTreeMap<BitString, usize>,
    gen_calls: usize,
    ver_calls: usize,
    transcript: &'a mut GameTranscript,
}

impl CloningOracle<'_> {
    pub fn params(&self) -> PrfspdParams {
        self.prfspd.params
    }

    pub fn gen(&mut self, x: &BitString) -> Result<PureState, BudgetExceeded> {
        if self.gen_calls == self.budget.gen {
            return Err(BudgetExceeded("gen"));
        }
        self.gen_calls += 1;
        *self.counters.entry(x.clone()).or_default() += 1;
        self.transcript.push("gen", "oracle", Actor::Adversary, x.to_bytes());
        // A malformed x is the adversary's problem; hand back a dummy state.
        Ok(self.prfspd.gen(self.key, x).unwrap_or_else(|_| {
            PureState::basis(self.prfspd.params.state_qubits(), 0).expect("small register")
        }))
    }

    pub fn ver(&mut self, x: &BitString, proof: &PrfspdProof) -> Result<bool, BudgetExceeded> {
        if self.ver_calls == self.budget.ver {
            return Err(BudgetExceeded("ver"));
        }
        self.ver_calls += 1;
        self.transcript.push("ver", "oracle", Actor::Adversary, x.concat(proof.bits()).to_bytes());
        Ok(self.prfspd.ver(self.key, x, proof).unwrap_or(false))
    }

    /// `t_x`.
    pub fn count(&self, x: &BitString) -> usize {
        self.counters.get(x).copied().unwrap_or(0)
    }
}

pub trait Cloner: Send {
    fn name(&self) -> &str;

    fn budget(&self) -> OracleBudget {
        OracleBudget::default()
    }

    /// Returns `x` and the proofs `c_1, …, c_{t_x+1}`, or `Err` if an oracle
    /// refused a call.
    fn run(&mut self, oracle: &mut CloningOracle<'_>, rng: &mut SimRng)
        -> Result<(BitString, Vec<PrfspdProof>), BudgetExceeded>;
}

/// Plays one cloning game. The PRFSPD widths come from `cfg` (`w = d = λ`);
/// under [`Mutation::KeylessPrfspd`] the key is the public all-zero string.
pub fn run_prfspd_cloning(cfg: &SchemeConfig, cloner: &mut dyn Cloner, rng: &mut SimRng) -> Result<GameTranscript> {
    if cfg.kind != SchemeKind::Prfspd {
        return Err(GameError::Config(format!("the cloning game needs the prfspd scheme, not {}", cfg.kind)));
    }
    cfg.validate()?;
    let prfspd = ToyPrfspd::new(PrfspdParams::new(cfg.lambda, cfg.lambda, cfg.m, cfg.t)?);
    let mut t = GameTranscript::new(GameKind::Cloning, cfg.kind, cfg.lambda, cloner.name());
    let mut adv_rng = seeded(rng.random());

    let k = BitString::random(cfg.lambda, rng);
    t.dk = k.clone();
    t.push("keygen", "setup", Actor::Challenger, k.to_bytes());
    let key = if cfg.mutation == Mutation::KeylessPrfspd {
        FunctionKey::Prf(PrfKey::new(BitString::zeros(cfg.lambda)))
    } else {
        FunctionKey::Prf(PrfKey::new(k))
    };

    let budget = cloner.budget();
    let (outcome, counts) = {
        let mut oracle = CloningOracle {
            prfspd: &prfspd,
            key: &key,
            budget,
            counters: BTreeMap::new(),
            gen_calls: 0,
            ver_calls: 0,
            transcript: &mut t,
        };
        let out = cloner.run(&mut oracle, &mut adv_rng);
        let tx = out.as_ref().map(|(x, _)| oracle.count(x)).unwrap_or(0);
        (out, tx)
    };
    let (x, proofs) = match outcome {
        Ok(v) => v,
        Err(BudgetExceeded(which)) => {
            t.violate(format!("{which} budget exceeded"));
            return Ok(t);
        }
    };
    let payload = proofs.iter().fold(x.clone(), |acc, p| acc.concat(p.bits()));
    t.push("output", "final", Actor::Adversary, payload.to_bytes());

    let distinct = proofs.iter().collect::<HashSet<_>>().len() == proofs.len();
    t.win = if !distinct {
        t.push("reject", "final", Actor::Challenger, b"duplicate proofs".to_vec());
        false
    } else if proofs.len() != counts + 1 {
        t.push("reject", "final", Actor::Challenger, format!("{} proofs for t_x={counts}", proofs.len()).into_bytes());
        false
    } else {
        proofs.iter().all(|p| prfspd.ver(&key, &x, p).unwrap_or(false))
    };
    Ok(t)
}

fn random_input(oracle: &CloningOracle<'_>, rng: &mut SimRng) -> BitString {
    BitString::random(oracle.params().input_width, rng)
}

/// Honestly deletes `copies` states for one input and adds a uniformly random
/// extra proof.
#[derive(Debug)]
pub struct HonestMeasuring {
    pub copies: usize,
}

impl Cloner for HonestMeasuring {
    fn name(&self) -> &str {
        "honest-measuring"
    }

    fn run(&mut self, oracle: &mut CloningOracle<'_>, rng: &mut SimRng) -> Result<(BitString, Vec<PrfspdProof>), BudgetExceeded> {
        let x = random_input(oracle, rng);
        let pd = ToyPrfspd::new(oracle.params());
        let mut proofs = Vec::with_capacity(self.copies + 1);
        for _ in 0..self.copies {
            let state = oracle.gen(&x)?;
            proofs.push(pd.del(&state, rng).expect("width fixed by the oracle"));
        }
        proofs.push(PrfspdProof::new(BitString::random(oracle.params().proof_width(), rng)));
        Ok((x, proofs))
    }
}

/// Deletes one state and submits its proof twice.
#[derive(Debug)]
pub struct Duplicate;

impl Cloner for Duplicate {
    fn name(&self) -> &str {
        "duplicate"
    }

    fn run(&mut self, oracle: &mut CloningOracle<'_>, rng: &mut SimRng) -> Result<(BitString, Vec<PrfspdProof>), BudgetExceeded> {
        let x = random_input(oracle, rng);
        let state = oracle.gen(&x)?;
        let p = ToyPrfspd::new(oracle.params()).del(&state, rng).expect("width fixed by the oracle");
        Ok((x, vec![p.clone(), p]))
    }
}

/// No queries; one uniformly random proof. Wins with the accepting density `2^{-t}`.
#[derive(Debug)]
pub struct Lucky;

impl Cloner for Lucky {
    fn name(&self) -> &str {
        "lucky"
    }

    fn run(&mut self, oracle: &mut CloningOracle<'_>, rng: &mut SimRng) -> Result<(BitString, Vec<PrfspdProof>), BudgetExceeded> {
        let x = random_input(oracle, rng);
        Ok((x, vec![PrfspdProof::new(BitString::random(oracle.params().proof_width(), rng))]))
    }
}

/// No queries; computes a proof under the all-zero key.
#[derive(Debug)]
pub struct Forger;

impl Cloner for Forger {
    fn name(&self) -> &str {
        "forger"
    }

    fn run(&mut self, oracle: &mut CloningOracle<'_>, rng: &mut SimRng) -> Result<(BitString, Vec<PrfspdProof>), BudgetExceeded> {
        let params = oracle.params();
        let x = random_input(oracle, rng);
        let y = BitString::random(params.measured_width, rng);
        let key = FunctionKey::Prf(PrfKey::new(BitString::zeros(params.key_width)));
        let z = ToyPrfspd::new(params).tag(&key, &x, &y).expect("widths fixed by the oracle");
        Ok((x, vec![PrfspdProof::new(y.concat(&z))]))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ClonerKind {
    HonestMeasuring,
    Duplicate,
    Lucky,
    Forger,
}

impl ClonerKind {
    pub const ALL: [ClonerKind; 4] = [Self::HonestMeasuring, Self::Duplicate, Self::Lucky, Self::Forger];

    pub fn name(self) -> &'static str {
        match self {
            Self::HonestMeasuring => "honest-measuring",
            Self::Duplicate => "duplicate",
            Self::Lucky => "lucky",
            Self::Forger => "forger",
        }
    }

    pub fn build(self) -> Box<dyn Cloner> {
        match self {
            Self::HonestMeasuring => Box::new(HonestMeasuring { copies: 1 }),
            Self::Duplicate => Box::new(Duplicate),
            Self::Lucky => Box::new(Lucky),
            Self::Forger => Box::new(Forger),
        }
    }
}

impl fmt::Display for ClonerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ClonerKind {
    type Err = GameError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| GameError::Config(format!("unknown cloning adversary {s:?}")))
    }
}

pub fn estimate_cloning(
    cfg: &SchemeConfig,
    cloner: ClonerKind,
    trials: usize,
    seed: u64,
    confidence: f64,
) -> Result<AdvantageEstimate> {
    estimate_advantage(trials, seed, confidence, |i, rng| {
        let mut c = cloner.build();
        let mut t = run_prfspd_cloning(cfg, c.as_mut(), rng)?;
        t.seed = seed;
        t.trial = i;
        Ok(t)
    })
}
