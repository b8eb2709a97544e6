use std::collections::HashMap;

use super::{total_variation, AnalysisError, HybridPair, HybridReport, Metric, Result};
use crate::bits::BitString;
use crate::primitives::{RandomFunctionTable, Ske, SkeMode};
use crate::qsim::{max_qubits, PureState, WireRange};
use crate::schemes::{DecryptionKey, KeyState, OwfScheme, QpkeScheme, SchemeConfig, SchemeKind};

/// `sqrt(1 − (1 − 2^{-λ})^p)`.
pub fn punctured_key_distance_closed_form(lambda: usize, copies: usize) -> f64 {
    (1.0 - (1.0 - 2f64.powi(-(lambda as i32))).powi(copies as i32)).max(0.0).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CrossCheck {
    /// Both `p`-fold tensor products were built and compared.
    Tensor,
    /// Too wide to tensor: the single-copy overlap was computed explicitly and
    /// raised to the `p`-th power.
    Factorized,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PuncturedDistance {
    pub lambda: usize,
    pub copies: usize,
    pub closed_form: f64,
    pub explicit: f64,
    pub path: CrossCheck,
}

impl PuncturedDistance {
    pub fn report(&self) -> HybridReport {
        HybridReport {
            pair: HybridPair::H1H2,
            metric: Metric::TraceDistance,
            value: self.explicit,
            lambda: self.lambda,
            copies: self.copies,
            scheme: SchemeKind::Owf,
        }
    }
}

fn owf_key(lambda: usize) -> Result<PureState> {
    let scheme = OwfScheme::new(SchemeConfig::new(SchemeKind::Owf, lambda))?;
    let dk = DecryptionKey::from_bits(BitString::zeros(lambda));
    match scheme.qpk_gen(&dk)?.state() {
        KeyState::Single(s) => Ok(s.clone()),
        KeyState::Product(_) => unreachable!("PRF scheme keys are single registers"),
    }
}

fn tensor_power(state: &PureState, copies: usize) -> Result<PureState> {
    let mut acc = state.clone();
    for _ in 1..copies {
        acc = acc.tensor(state)?;
    }
    Ok(acc)
}

/// Trace distance between `|qpk⟩^{⊗p}` and `|qpk′⟩^{⊗p}` for the PRF scheme,
/// computed from explicit states and paired with the closed form.
pub fn punctured_key_distance(lambda: usize, copies: usize) -> Result<PuncturedDistance> {
    let closed_form = punctured_key_distance_closed_form(lambda, copies);
    if copies == 0 {
        return Ok(PuncturedDistance { lambda, copies, closed_form, explicit: 0.0, path: CrossCheck::Tensor });
    }
    let key = owf_key(lambda)?;
    let punctured = key.puncture(&BitString::zeros(lambda), WireRange::new(0, lambda))?;
    let (explicit, path) = if 2 * lambda * copies <= max_qubits() {
        let a = tensor_power(&key, copies)?;
        let b = tensor_power(&punctured, copies)?;
        (a.trace_distance(&b)?, CrossCheck::Tensor)
    } else {
        let f = key.fidelity(&punctured)?;
        ((1.0 - f.powi(copies as i32)).max(0.0).sqrt(), CrossCheck::Factorized)
    };
    Ok(PuncturedDistance { lambda, copies, closed_form, explicit, path })
}

/// Joint distribution of `(first outcome, second outcome)` when `first` is
/// measured and then `second`, both in the computational basis.
fn sequential(state: &PureState, first: WireRange, second: WireRange) -> Result<HashMap<(usize, usize), f64>> {
    let mut joint = HashMap::new();
    for (v, &p) in state.probabilities(first)?.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let (_, post) = state.project(first, v)?;
        for (w, &q) in post.probabilities(second)?.iter().enumerate() {
            if q > 0.0 {
                joint.insert((v, w), p * q);
            }
        }
    }
    Ok(joint)
}

/// Exhaustive over every `dk ∈ {0,1}^λ`: the encryptor's copy (wires
/// `[0, 2λ)`) and `copies` adversary copies are measured in either order, and
/// the TV distance between the two joint distributions is reported.
pub fn commuting_measurement_check(lambda: usize, copies: usize) -> Result<HybridReport> {
    let width = 2 * lambda * (copies + 1);
    if lambda > 3 || width > max_qubits() {
        return Err(AnalysisError::Capacity {
            what: "commuting-measurement enumeration",
            requested: width as u64,
            max: max_qubits() as u64,
        });
    }
    let scheme = OwfScheme::new(SchemeConfig::new(SchemeKind::Owf, lambda))?;
    let encryptor = WireRange::new(0, 2 * lambda);
    let adversary = WireRange::new(2 * lambda, 2 * lambda * copies);
    let weight = 2f64.powi(-(lambda as i32));
    let mut before = HashMap::new();
    let mut after = HashMap::new();
    for k in 0..1u64 << lambda {
        let dk = DecryptionKey::from_bits(BitString::from_u64(k, lambda));
        let KeyState::Single(key) = scheme.qpk_gen(&dk)?.state().clone() else { unreachable!() };
        let joint = tensor_power(&key, copies + 1)?;
        for ((c, a), p) in sequential(&joint, encryptor, adversary)? {
            *before.entry((k, c, a)).or_insert(0.0) += weight * p;
        }
        for ((a, c), p) in sequential(&joint, adversary, encryptor)? {
            *after.entry((k, c, a)).or_insert(0.0) += weight * p;
        }
    }
    Ok(HybridReport {
        pair: HybridPair::H0H1,
        metric: Metric::TotalVariation,
        value: total_variation(&before, &after),
        lambda,
        copies,
        scheme: SchemeKind::Owf,
    })
}

/// Cap on enumerated `(H, x*, pad key, nonces)` tuples.
const MAX_H3H4_WORK: u64 = 1 << 24;

/// Exhaustive over every function `H: {0,1}^λ → {0,1}^λ`, every `x*` and
/// every SKE nonce. The adversary's view is the punctured public key
/// `Σ_{x≠x*} |x⟩|H(x)⟩` (identified by its support) plus the answers to
/// `queries` fixed encryption queries `(x*, Enc(key, m_i))`, with `key = H(x*)`
/// in one hybrid and a fresh uniform `z` in the other.
pub fn random_key_indistinguishability_check(lambda: usize, queries: usize) -> Result<HybridReport> {
    let domain = 1u64 << lambda;
    let functions = 1u64.checked_shl((lambda * (1 << lambda)) as u32).unwrap_or(u64::MAX);
    let nonces = 1u64.checked_shl((lambda * queries) as u32).unwrap_or(u64::MAX);
    let work = functions.saturating_mul(domain).saturating_mul(domain).saturating_mul(nonces);
    if lambda == 0 || work > MAX_H3H4_WORK {
        return Err(AnalysisError::Capacity { what: "H3-H4 enumeration", requested: work, max: MAX_H3H4_WORK });
    }
    let ske = Ske::new(lambda, SkeMode::PrfPad);
    let messages: Vec<BitString> = (0..queries).map(|i| BitString::from_u64(i as u64, 4)).collect();
    let base: PureState = PureState::uniform_superposition(lambda)?.tensor(&PureState::basis(lambda, 0)?)?;

    // View as bytes: support of the punctured key, x*, then each (nonce, body).
    let view = |support: &[usize], x: u64, key: &BitString, nonce_seq: u64| -> Result<Vec<u8>> {
        let mut v: Vec<u8> = support.iter().flat_map(|&i| (i as u32).to_be_bytes()).collect();
        v.extend_from_slice(&x.to_be_bytes());
        for (i, m) in messages.iter().enumerate() {
            let nonce = BitString::from_u64(nonce_seq >> (i * lambda) & (domain - 1), lambda);
            let ct = ske.encrypt_with_nonce(key, m, &nonce)?;
            v.extend_from_slice(&ct.nonce.to_bytes());
            v.extend_from_slice(&ct.body.to_bytes());
        }
        Ok(v)
    };

    let mut h3: HashMap<Vec<u8>, f64> = HashMap::new();
    let mut h4: HashMap<Vec<u8>, f64> = HashMap::new();
    let w3 = 1.0 / (functions as f64 * domain as f64 * nonces as f64);
    let w4 = w3 / domain as f64;
    for code in 0..functions {
        let values: HashMap<BitString, BitString> = (0..domain)
            .map(|x| {
                let y = code >> (x as usize * lambda) & (domain - 1);
                (BitString::from_u64(x, lambda), BitString::from_u64(y, lambda))
            })
            .collect();
        let table = RandomFunctionTable::from_entries(lambda, values);
        let key_state = base.apply_function_oracle(|x| table.eval(x), WireRange::new(0, lambda), WireRange::new(lambda, lambda))?;
        for x in 0..domain {
            let xs = BitString::from_u64(x, lambda);
            let support = key_state.puncture(&xs, WireRange::new(0, lambda))?.support();
            let hx = table.eval(&xs);
            for nonce_seq in 0..nonces {
                *h3.entry(view(&support, x, &hx, nonce_seq)?).or_insert(0.0) += w3;
                for z in 0..domain {
                    *h4.entry(view(&support, x, &BitString::from_u64(z, lambda), nonce_seq)?).or_insert(0.0) += w4;
                }
            }
        }
    }
    Ok(HybridReport {
        pair: HybridPair::H3H4,
        metric: Metric::TotalVariation,
        value: total_variation(&h3, &h4),
        lambda,
        copies: queries,
        scheme: SchemeKind::Owf,
    })
}
