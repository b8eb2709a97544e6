use std::collections::HashMap;

use rayon::prelude::*;

use super::{total_variation, AnalysisError, Result};
use crate::bits::BitString;
use crate::primitives::{Instantiation, Ske, SkeMode};
use crate::qsim::symmetric_trace_norm;
use crate::schemes::{Mutation, SchemeConfig, SchemeKind};

/// Largest quantum block dimension handled by the dense eigensolver.
pub const MAX_ENSEMBLE_DIM: usize = 512;
/// Cap on enumerated classical tuples for the PRFSPD scheme.
const MAX_CLASSICAL_WORK: u64 = 1 << 22;

/// Trace distance between the adversary's views for `m0` and `m1`: `p` key
/// copies plus one challenge ciphertext, averaged over a uniformly random
/// function. No adversary wins the IND-CPA game with probability above
/// `(1 + trace_distance) / 2`.
#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleAdvantage {
    pub scheme: SchemeKind,
    pub lambda: usize,
    pub copies: usize,
    pub trace_distance: f64,
    /// Dimension of each quantum block.
    pub dim: usize,
    /// Number of classical labels (block-diagonal sectors).
    pub labels: usize,
}

impl EnsembleAdvantage {
    pub fn optimal_win_probability(&self) -> f64 {
        0.5 * (1.0 + self.trace_distance)
    }
}

/// Exact Helstrom bound for the random-function instantiation of `config`
/// with `copies` key copies and challenge messages `(m0, m1)`.
///
/// Supported: the PRF scheme with the one-time-pad SKE and `λ`-bit messages,
/// the PRFS scheme, and the PRFSPD scheme at `copies = 0` only.
pub fn optimal_advantage(config: &SchemeConfig, copies: usize, m0: &BitString, m1: &BitString) -> Result<EnsembleAdvantage> {
    config.validate()?;
    if config.instantiation != Instantiation::RandomTable {
        return Err(AnalysisError::Unsupported("exact ensembles need the random-table instantiation".into()));
    }
    if config.mutation != Mutation::None {
        return Err(AnalysisError::Unsupported(format!("mutation {}", config.mutation.name())));
    }
    if m0.len() != m1.len() {
        return Err(AnalysisError::Unsupported("challenge messages of different lengths".into()));
    }
    let l = config.lambda;
    let (trace_distance, dim, labels) = match config.kind {
        SchemeKind::Owf => {
            let dim = block_dim(2 * l * copies)?;
            if config.ske != SkeMode::OneTimePad || m0.len() != l {
                return Err(AnalysisError::Unsupported("PRF scheme needs the one-time pad and λ-bit messages".into()));
            }
            let labels = 1usize << (2 * l);
            let (a, b) = (m0.to_u64(), m1.to_u64());
            let td = cq_distance(labels, dim, |label, r, c, msg_is_first| {
                let m = if msg_is_first { a } else { b };
                owf_entry(l, copies, label, r, c, m)
            });
            (td, dim, labels)
        }
        SchemeKind::Prfs => {
            if m0.len() != 1 {
                return Err(AnalysisError::Unsupported("PRFS scheme has one-bit messages".into()));
            }
            let n = config.n;
            let dim = block_dim((l + n) * copies + n)?;
            let labels = 1usize << l;
            let (a, b) = (m0.get(0), m1.get(0));
            let td = cq_distance(labels, dim, |x, r, c, first| {
                prfs_entry(l, n, copies, x, r, c, if first { a } else { b })
            });
            (td, dim, labels)
        }
        SchemeKind::Prfspd => {
            if copies > 0 {
                return Err(AnalysisError::Capacity {
                    what: "PRFSPD key copies in the exact ensemble",
                    requested: copies as u64,
                    max: 0,
                });
            }
            let a = prfspd_view_distribution(config, m0)?;
            let b = prfspd_view_distribution(config, m1)?;
            let labels = a.len().max(b.len());
            (total_variation(&a, &b), 1, labels)
        }
    };
    Ok(EnsembleAdvantage { scheme: config.kind, lambda: l, copies, trace_distance, dim, labels })
}

fn block_dim(qubits: usize) -> Result<usize> {
    let max_qubits = MAX_ENSEMBLE_DIM.trailing_zeros() as usize;
    if qubits > max_qubits {
        return Err(AnalysisError::Capacity { what: "ensemble block qubits", requested: qubits as u64, max: max_qubits as u64 });
    }
    Ok(1 << qubits)
}

/// `½ Σ_label ‖M_0(label) − M_1(label)‖₁` for real symmetric blocks given
/// entrywise; the last closure argument selects `m0` (`true`) or `m1`.
fn cq_distance<F>(labels: usize, dim: usize, entry: F) -> f64
where
    F: Fn(usize, usize, usize, bool) -> f64 + Sync,
{
    let norms: Vec<f64> = (0..labels)
        .into_par_iter()
        .map(|label| {
            let mut diff = vec![0.0; dim * dim];
            for r in 0..dim {
                for c in r..dim {
                    let d = entry(label, r, c, true) - entry(label, r, c, false);
                    diff[r * dim + c] = d;
                    diff[c * dim + r] = d;
                }
            }
            if diff.iter().all(|&d| d == 0.0) {
                0.0
            } else {
                symmetric_trace_norm(dim, &diff)
            }
        })
        .collect();
    0.5 * norms.iter().sum::<f64>()
}

/// `Pr_H[H(u) = v for every (u, v)]`: zero if two constraints disagree,
/// otherwise `2^{-width · #distinct inputs}`.
fn consistency(constraints: &mut [(u64, u64)], width: usize) -> f64 {
    constraints.sort_unstable();
    let mut distinct = 0;
    for i in 0..constraints.len() {
        if i > 0 && constraints[i].0 == constraints[i - 1].0 {
            if constraints[i].1 != constraints[i - 1].1 {
                return 0.0;
            }
        } else {
            distinct += 1;
        }
    }
    2f64.powi(-((width * distinct) as i32))
}

/// Label `(x, c)` packs `x` low. Register: `p` copies of `|x_j⟩|z_j⟩`.
fn owf_entry(l: usize, copies: usize, label: usize, r: usize, c: usize, m: u64) -> f64 {
    let mask = (1u64 << l) - 1;
    let (x, body) = (label as u64 & mask, (label as u64 >> l) & mask);
    let mut cons = Vec::with_capacity(2 * copies + 1);
    for j in 0..copies {
        let (rr, cc) = ((r >> (2 * l * j)) as u64, (c >> (2 * l * j)) as u64);
        cons.push((rr & mask, (rr >> l) & mask));
        cons.push((cc & mask, (cc >> l) & mask));
    }
    cons.push((x, body ^ m));
    2f64.powi(-((l * (copies + 1)) as i32)) * consistency(&mut cons, l)
}

/// Label `x`. Register: `p` copies of `|x_j⟩|y_j⟩`, then the `n`-qubit payload.
/// Averages of products of `±1` phases vanish unless every point appears an
/// even number of times.
fn prfs_entry(l: usize, n: usize, copies: usize, x: usize, r: usize, c: usize, m: bool) -> f64 {
    let w = l + n;
    let wmask = (1usize << w) - 1;
    let nmask = (1usize << n) - 1;
    let mut points = Vec::with_capacity(2 * copies + 2);
    for j in 0..copies {
        points.push((r >> (w * j)) & wmask);
        points.push((c >> (w * j)) & wmask);
    }
    let (yr, yc) = ((r >> (w * copies)) & nmask, (c >> (w * copies)) & nmask);
    if m {
        if yr != yc {
            return 0.0;
        }
    } else {
        points.push(x | (yr << l));
        points.push(x | (yc << l));
    }
    points.sort_unstable();
    if points.chunks(2).any(|p| p[0] != p[1]) {
        return 0.0;
    }
    2f64.powi(-((l + w * copies + n) as i32))
}

/// Distribution of the classical ciphertext of the PRFSPD scheme for message
/// `m` over dk, the random tag function, the slot measurements, the SKE key
/// `k`, the masking strings and the SKE nonce.
fn prfspd_view_distribution(config: &SchemeConfig, m: &BitString) -> Result<HashMap<Vec<u8>, f64>> {
    let l = config.lambda;
    let (mw, t) = (config.m, config.t);
    let c = config.proof_width();
    let ske = Ske::new(l, config.ske);
    let nonce_width = match config.ske {
        SkeMode::PrfPad => l,
        SkeMode::FixedNonce | SkeMode::OneTimePad => 0,
    };
    let slot_choices = 1u64 << ((l + mw) * l);
    let proof_choices = 1u64 << (c * l);
    let work = (1u64 << l)
        .saturating_mul(slot_choices)
        .saturating_mul(proof_choices)
        .saturating_mul(1 << nonce_width);
    if (l + mw) * l + c * l + l + nonce_width > 40 || work > MAX_CLASSICAL_WORK {
        return Err(AnalysisError::Capacity { what: "PRFSPD ciphertext enumeration", requested: work, max: MAX_CLASSICAL_WORK });
    }
    let mut dist = HashMap::new();
    let xy_mask = (1u64 << (l + mw)) - 1;
    let c_mask = (1u64 << c) - 1;
    let base = 2f64.powi(-((l + (l + mw) * l + nonce_width) as i32));
    for k in 0..1u64 << l {
        let key = BitString::from_u64(k, l);
        for nonce in 0..1u64 << nonce_width {
            let body = ske.encrypt_with_nonce(&key, m, &BitString::from_u64(nonce, nonce_width))?;
            let mut head = body.nonce.to_bytes();
            head.extend(body.body.to_bytes());
            for xy in 0..slot_choices {
                for proofs in 0..proof_choices {
                    // Active slots reveal (y, H(x∥y)); the rest show uniform strings.
                    let mut cons = Vec::new();
                    let mut weight = base;
                    let mut view = head.clone();
                    for i in 0..l {
                        let s = (xy >> ((l + mw) * i)) & xy_mask;
                        let p = (proofs >> (c * i)) & c_mask;
                        view.extend_from_slice(&(s & ((1 << l) - 1)).to_le_bytes());
                        view.extend_from_slice(&p.to_le_bytes());
                        if k >> i & 1 == 1 {
                            if p & ((1 << mw) - 1) != s >> l {
                                weight = 0.0;
                                break;
                            }
                            cons.push((s, p >> mw));
                        } else {
                            weight *= 2f64.powi(-(c as i32));
                        }
                    }
                    if weight == 0.0 {
                        continue;
                    }
                    weight *= consistency(&mut cons, t);
                    if weight > 0.0 {
                        *dist.entry(view).or_insert(0.0) += weight;
                    }
                }
            }
        }
    }
    Ok(dist)
}
