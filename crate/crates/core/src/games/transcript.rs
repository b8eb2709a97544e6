//! One record per game run, serialized as line-delimited `key=value` text:
//!
//! ```text
//! # transcript game=cpa-eo scheme=owf lambda=4 adversary=pad-reuse seed=7 trial=0
//! event=keygen phase=setup actor=challenger payload=0b
//! event=query phase=pre.0.0 actor=adversary payload=00
//! event=ciphertext phase=pre.0.0 actor=challenger payload=01000400...
//! event=outcome phase=end actor=challenger b=1 guess=1 win=1 valid=1
//! ```
//!
//! Payloads are lowercase hex of the packed bytes (LSB-first bit packing).

use std::fmt::{self, Write as _};

use super::GameKind;
use crate::bits::BitString;
use crate::schemes::SchemeKind;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Actor {
    Challenger,
    Adversary,
}

impl fmt::Display for Actor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Challenger => "challenger",
            Self::Adversary => "adversary",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Event {
    pub event: &'static str,
    pub phase: String,
    pub actor: Actor,
    pub payload: Vec<u8>,
}

#[derive(Clone, Debug)]
pub struct GameTranscript {
    pub game: GameKind,
    pub scheme: SchemeKind,
    pub lambda: usize,
    pub adversary: String,
    pub seed: u64,
    pub trial: u64,
    pub dk: BitString,
    /// Challenge bit; absent in the cloning game.
    pub b: Option<bool>,
    pub guess: Option<bool>,
    pub win: bool,
    pub violation: Option<String>,
    pub key_copies: usize,
    /// Encryption-oracle queries answered, per phase in order.
    pub queries: Vec<usize>,
    pub events: Vec<Event>,
}

impl GameTranscript {
    pub(crate) fn new(game: GameKind, scheme: SchemeKind, lambda: usize, adversary: &str) -> Self {
        Self {
            game,
            scheme,
            lambda,
            adversary: adversary.to_owned(),
            seed: 0,
            trial: 0,
            dk: BitString::default(),
            b: None,
            guess: None,
            win: false,
            violation: None,
            key_copies: 0,
            queries: Vec::new(),
            events: Vec::new(),
        }
    }

    pub fn is_valid(&self) -> bool {
        self.violation.is_none()
    }

    pub(crate) fn push(&mut self, event: &'static str, phase: impl Into<String>, actor: Actor, payload: Vec<u8>) {
        self.events.push(Event { event, phase: phase.into(), actor, payload });
    }

    pub(crate) fn violate(&mut self, reason: impl Into<String>) {
        let reason = reason.into();
        self.push("violation", "end", Actor::Adversary, reason.as_bytes().to_vec());
        self.violation = Some(reason);
        self.win = false;
    }

    pub fn events_named<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a Event> + 'a {
        self.events.iter().filter(move |e| e.event == name)
    }

    pub fn to_records(&self) -> String {
        let mut out = format!(
            "# transcript game={} scheme={} lambda={} adversary={} seed={} trial={}\n",
            self.game, self.scheme, self.lambda, self.adversary, self.seed, self.trial
        );
        for e in &self.events {
            let _ = writeln!(
                out,
                "event={} phase={} actor={} payload={}",
                e.event,
                e.phase,
                e.actor,
                hex::encode(&e.payload)
            );
        }
        let bit = |v: Option<bool>| v.map_or("-", |b| if b { "1" } else { "0" });
        let _ = writeln!(
            out,
            "event=outcome phase=end actor=challenger b={} guess={} win={} valid={}",
            bit(self.b),
            bit(self.guess),
            self.win as u8,
            self.is_valid() as u8
        );
        out
    }
}
