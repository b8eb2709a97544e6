//! The three quantum-public-key encryption constructions behind one
//! interface, with recycled-key semantics.
//!
//! * [`OwfScheme`]: `|qpk⟩ = 2^{-λ/2} Σ_x |x⟩|f_dk(x)⟩`, classical ciphertexts.
//! * [`PrfspdScheme`]: `λ` slots of `2^{-λ/2} Σ_x |x⟩|ψ_{dk,x}⟩` over a PRFSPD,
//!   classical ciphertexts, hybrid encryption under a fresh `λ`-bit key.
//! * [`PrfsScheme`]: `2^{-λ/2} Σ_x |x⟩|ψ_{dk,x}⟩` over a PRFS, one-bit
//!   messages, quantum ciphertexts, single use.
//!
//! Every scheme can be built in a deliberately broken [`Mutation`] so the
//! games can check that the attacks they ship actually detect breakage.

mod ciphertext;
mod owf;
mod prfs;
mod prfspd;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;
use thiserror::Error;

use crate::bits::BitString;
use crate::primitives::{FunctionKey, Instantiation, PrfKey, PrimitiveError, RandomFunctionTable, SkeMode};
use crate::qsim::rng::SimRng;
use crate::qsim::{max_qubits, PureState, QsimError};

pub use ciphertext::{Ciphertext, ClassicalCiphertext, ProofSlot, TAG_OWF, TAG_PRFSPD};
pub use owf::OwfScheme;
pub use prfs::PrfsScheme;
pub use prfspd::PrfspdScheme;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SchemeError {
    #[error("λ out of range: {0}")]
    LambdaOutOfRange(usize),
    #[error("configuration: {0}")]
    Config(String),
    #[error("key consumed: this public key has already been used to encrypt")]
    KeyConsumed,
    #[error("message outside the scheme's domain: {0}")]
    MessageDomain(String),
    #[error("ciphertext for scheme {found}, expected {expected}")]
    SchemeMismatch { expected: SchemeKind, found: SchemeKind },
    #[error("malformed ciphertext: {0}")]
    Malformed(String),
    #[error("capability: {0}")]
    Capability(String),
    #[error(transparent)]
    Primitive(#[from] PrimitiveError),
    #[error(transparent)]
    Qsim(#[from] QsimError),
}

pub type Result<T, E = SchemeError> = std::result::Result<T, E>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    /// PRF-based keys, classical ciphertexts.
    Owf,
    /// PRFSPD-based keys, classical ciphertexts.
    Prfspd,
    /// PRFS-based keys, quantum ciphertexts.
    Prfs,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 3] = [Self::Owf, Self::Prfspd, Self::Prfs];

    pub fn name(self) -> &'static str {
        match self {
            Self::Owf => "owf",
            Self::Prfspd => "prfspd",
            Self::Prfs => "prfs",
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeKind {
    type Err = SchemeError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| SchemeError::Config(format!("unknown scheme {s:?}")))
    }
}

/// Deliberate breakages, each paired with an attack in [`crate::games`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Mutation {
    #[default]
    None,
    /// PRF evaluated under the public all-zero key instead of `dk`.
    KeylessPrf,
    /// Symmetric encryption with a constant nonce, so the pad repeats.
    FixedNonce,
    /// Public key collapsed to the single branch `|0^λ⟩|f_dk(0^λ)⟩`.
    CollapsedKey,
    /// PRFS replaced by the constant state `|+⟩^{⊗n}`.
    ConstantPrfs,
    /// PRFSPD tags computed under the public all-zero key, so anyone can verify.
    KeylessPrfspd,
}

impl Mutation {
    pub const ALL: [Mutation; 6] = [
        Self::None,
        Self::KeylessPrf,
        Self::FixedNonce,
        Self::CollapsedKey,
        Self::ConstantPrfs,
        Self::KeylessPrfspd,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::None => "none",
            Self::KeylessPrf => "keyless-prf",
            Self::FixedNonce => "fixed-nonce",
            Self::CollapsedKey => "collapsed-key",
            Self::ConstantPrfs => "constant-prfs",
            Self::KeylessPrfspd => "keyless-prfspd",
        }
    }

    /// The scheme a mutation can be applied to (`None` fits all).
    pub fn target(self) -> Option<SchemeKind> {
        match self {
            Self::None => None,
            Self::KeylessPrf | Self::FixedNonce | Self::CollapsedKey => Some(SchemeKind::Owf),
            Self::ConstantPrfs => Some(SchemeKind::Prfs),
            Self::KeylessPrfspd => Some(SchemeKind::Prfspd),
        }
    }
}

impl fmt::Display for Mutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mutation {
    type Err = SchemeError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| SchemeError::Config(format!("unknown mutation {s:?}")))
    }
}

/// How the PRFS scheme realizes the maximally mixed payload for `m = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum PayloadMode {
    /// A uniformly sampled basis state, the same ensemble as `I / 2^n`.
    #[default]
    Sampled,
    /// The explicit density matrix `I / 2^n`.
    Density,
}

/// Parameters shared by every construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SchemeConfig {
    pub kind: SchemeKind,
    pub lambda: usize,
    /// PRFS output qubits.
    pub n: usize,
    /// PRFSPD measured-half width.
    pub m: usize,
    /// PRFSPD tag width; proofs have `c = m + t` bits.
    pub t: usize,
    pub instantiation: Instantiation,
    pub ske: SkeMode,
    pub mutation: Mutation,
    pub payload: PayloadMode,
}

impl SchemeConfig {
    pub fn new(kind: SchemeKind, lambda: usize) -> Self {
        Self {
            kind,
            lambda,
            n: 4,
            m: 1,
            t: lambda,
            instantiation: Instantiation::Prf,
            ske: SkeMode::PrfPad,
            mutation: Mutation::None,
            payload: PayloadMode::Sampled,
        }
    }

    pub fn with_mutation(mut self, mutation: Mutation) -> Self {
        self.mutation = mutation;
        self
    }

    pub fn with_instantiation(mut self, instantiation: Instantiation) -> Self {
        self.instantiation = instantiation;
        self
    }

    pub fn with_ske(mut self, ske: SkeMode) -> Self {
        self.ske = ske;
        self
    }

    pub fn with_n(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    pub fn with_payload(mut self, payload: PayloadMode) -> Self {
        self.payload = payload;
        self
    }

    /// PRFSPD proof width `c`.
    pub fn proof_width(&self) -> usize {
        self.m + self.t
    }

    /// Qubits in one public-key copy (one slot for the PRFSPD scheme).
    pub fn key_qubits(&self) -> usize {
        match self.kind {
            SchemeKind::Owf => 2 * self.lambda,
            SchemeKind::Prfspd => self.lambda + self.m + self.t,
            SchemeKind::Prfs => self.lambda + self.n,
        }
    }

    /// Width of the keyed function's output.
    pub fn function_output_width(&self) -> usize {
        match self.kind {
            SchemeKind::Owf => self.lambda,
            SchemeKind::Prfspd => self.t,
            SchemeKind::Prfs => 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.lambda == 0 || self.lambda > 64 {
            return Err(SchemeError::LambdaOutOfRange(self.lambda));
        }
        if let Some(target) = self.mutation.target() {
            if target != self.kind {
                return Err(SchemeError::Config(format!(
                    "mutation {} applies to scheme {target}, not {}",
                    self.mutation, self.kind
                )));
            }
        }
        match self.kind {
            SchemeKind::Prfs if self.n == 0 => return Err(SchemeError::Config("n must be positive".into())),
            SchemeKind::Prfspd if self.m == 0 || self.t == 0 => {
                return Err(SchemeError::Config("m and t must be positive".into()))
            }
            _ => {}
        }
        let q = self.key_qubits();
        if q > max_qubits() {
            return Err(QsimError::Capacity { requested: q, max: max_qubits() }.into());
        }
        Ok(())
    }

    /// Human-readable `key=value` summary used in report headers.
    pub fn describe(&self) -> String {
        let mut s = format!("scheme={} lambda={}", self.kind, self.lambda);
        match self.kind {
            SchemeKind::Owf => s += &format!(" ske={}", ske_name(self.ske)),
            SchemeKind::Prfspd => s += &format!(" m={} t={} ske={}", self.m, self.t, ske_name(self.ske)),
            SchemeKind::Prfs => s += &format!(" n={}", self.n),
        }
        s += &format!(" instantiation={} mutation={}", self.instantiation, self.mutation);
        s
    }
}

pub fn ske_name(mode: SkeMode) -> &'static str {
    match mode {
        SkeMode::PrfPad => "prf-pad",
        SkeMode::FixedNonce => "fixed-nonce",
        SkeMode::OneTimePad => "one-time-pad",
    }
}

/// Classical decryption key `dk` together with the keyed function it selects.
#[derive(Clone, Debug)]
pub struct DecryptionKey {
    bits: BitString,
    function: FunctionKey,
}

impl DecryptionKey {
    /// PRF-instantiated key.
    pub fn from_bits(bits: BitString) -> Self {
        let function = FunctionKey::Prf(PrfKey::new(bits.clone()));
        Self { bits, function }
    }

    pub fn new(bits: BitString, function: FunctionKey) -> Self {
        Self { bits, function }
    }

    pub fn bits(&self) -> &BitString {
        &self.bits
    }

    pub fn function(&self) -> &FunctionKey {
        &self.function
    }
}

/// The quantum part of a public key.
#[derive(Clone, Debug)]
pub enum KeyState {
    Single(PureState),
    /// Tensor product of independent slots, slot `i` on the `i`-th block of wires.
    Product(Vec<PureState>),
}

impl KeyState {
    pub fn qubit_count(&self) -> usize {
        match self {
            Self::Single(s) => s.qubit_count(),
            Self::Product(slots) => slots.iter().map(PureState::qubit_count).sum(),
        }
    }

    /// `|⟨self|other⟩|²`, multiplied slot by slot for products.
    pub fn fidelity(&self, other: &Self) -> Result<f64> {
        match (self, other) {
            (Self::Single(a), Self::Single(b)) => Ok(a.fidelity(b)?),
            (Self::Product(a), Self::Product(b)) if a.len() == b.len() => {
                a.iter().zip(b).try_fold(1.0, |acc, (x, y)| Ok(acc * x.fidelity(y)?))
            }
            _ => Err(QsimError::DimensionMismatch { left: self.qubit_count(), right: other.qubit_count() }.into()),
        }
    }
}

/// Classical residue kept by a public key after its first use.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Recycle {
    Owf { x: BitString, y: BitString },
    Prfspd { slots: Vec<ProofSlot> },
}

/// `|qpk⟩` plus the bookkeeping that turns it into `qpk′` after encryption.
#[derive(Clone, Debug)]
pub struct QuantumPublicKey {
    kind: SchemeKind,
    lambda: usize,
    state: KeyState,
    consumed: bool,
    recycle: Option<Recycle>,
}

impl QuantumPublicKey {
    pub(crate) fn fresh(kind: SchemeKind, lambda: usize, state: KeyState) -> Self {
        Self { kind, lambda, state, consumed: false, recycle: None }
    }

    pub fn kind(&self) -> SchemeKind {
        self.kind
    }

    pub fn lambda(&self) -> usize {
        self.lambda
    }

    pub fn state(&self) -> &KeyState {
        &self.state
    }

    pub fn is_consumed(&self) -> bool {
        self.consumed
    }

    pub fn recycle(&self) -> Option<&Recycle> {
        self.recycle.as_ref()
    }

    pub fn fidelity(&self, other: &Self) -> Result<f64> {
        self.state.fidelity(&other.state)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Capabilities {
    /// Keys can be recycled, so the encryption-oracle games apply.
    pub encryption_oracle: bool,
    pub classical_ciphertexts: bool,
    /// Exact bound on the message length, if any.
    pub message_bits: Option<usize>,
}

/// `Gen`, `QPKGen`, `Enc`, `Dec`.
pub trait QpkeScheme: Send + Sync + fmt::Debug {
    fn config(&self) -> &SchemeConfig;

    fn capabilities(&self) -> Capabilities;

    fn kind(&self) -> SchemeKind {
        self.config().kind
    }

    fn lambda(&self) -> usize {
        self.config().lambda
    }

    /// `dk ←_R {0,1}^λ`; in random-table mode a fresh table seed is drawn too.
    fn gen(&self, rng: &mut SimRng) -> DecryptionKey {
        let cfg = self.config();
        let bits = BitString::random(cfg.lambda, rng);
        match cfg.instantiation {
            Instantiation::Prf => DecryptionKey::from_bits(bits),
            Instantiation::RandomTable => {
                let table = RandomFunctionTable::new(cfg.function_output_width(), rng.random());
                DecryptionKey::new(bits, FunctionKey::Table(Arc::new(table)))
            }
        }
    }

    fn qpk_gen(&self, dk: &DecryptionKey) -> Result<QuantumPublicKey>;

    /// Consumes `qpk` and returns the recycled key with the ciphertext.
    fn encrypt(&self, qpk: QuantumPublicKey, m: &BitString, rng: &mut SimRng)
        -> Result<(QuantumPublicKey, Ciphertext)>;

    /// Probabilistic only for quantum ciphertexts.
    fn decrypt(&self, dk: &DecryptionKey, ct: &Ciphertext, rng: &mut SimRng) -> Result<BitString>;
}

/// Builds the scheme selected by `config.kind`.
pub fn build(config: SchemeConfig) -> Result<Arc<dyn QpkeScheme>> {
    config.validate()?;
    Ok(match config.kind {
        SchemeKind::Owf => Arc::new(OwfScheme::new(config)?),
        SchemeKind::Prfspd => Arc::new(PrfspdScheme::new(config)?),
        SchemeKind::Prfs => Arc::new(PrfsScheme::new(config)?),
    })
}

fn check_key(qpk: &QuantumPublicKey, kind: SchemeKind, lambda: usize) -> Result<()> {
    if qpk.kind != kind {
        return Err(SchemeError::SchemeMismatch { expected: kind, found: qpk.kind });
    }
    if qpk.lambda != lambda {
        return Err(SchemeError::Config(format!("public key for λ={}, scheme has λ={lambda}", qpk.lambda)));
    }
    Ok(())
}

fn check_dk(dk: &DecryptionKey, lambda: usize) -> Result<()> {
    if dk.bits.len() != lambda {
        return Err(PrimitiveError::Width { what: "decryption key", expected: lambda, actual: dk.bits.len() }.into());
    }
    Ok(())
}

fn zero_key(lambda: usize) -> FunctionKey {
    FunctionKey::Prf(PrfKey::new(BitString::zeros(lambda)))
}
