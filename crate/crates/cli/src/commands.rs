use std::str::FromStr;

use qpke_core::analysis::{
    commuting_measurement_check, optimal_advantage, punctured_key_distance, random_key_indistinguishability_check,
};
use qpke_core::bits::BitString;
use qpke_core::games::cloning::{estimate_cloning, ClonerKind};
use qpke_core::games::{
    default_messages, estimate_game, render_csv_row, AdversaryKind, Budget, GameKind, GameSpec, ReportContext,
    CSV_HEADER,
};
use qpke_core::primitives::{Instantiation, SkeMode};
use qpke_core::qsim::rng::split;
use qpke_core::qsim::{DensityMatrix, QuantumState, WireRange};
use qpke_core::schemes::{
    build, Ciphertext, DecryptionKey, KeyState, OwfScheme, PrfsScheme, QpkeScheme, SchemeConfig, SchemeKind,
};

use crate::report::{num, sci, Report};
use crate::{Analysis, CliError, Result, RunArgs};

/// Largest `λ` for which the PRF scheme is enumerated exhaustively
/// (`2^{3λ}` key/outcome/nonce combinations per message).
pub const OWF_EXHAUSTIVE_MAX_LAMBDA: usize = 4;
/// Keys enumerated on the PRFS density-matrix path.
const PRFS_EXACT_KEYS: u64 = 16;

const CORRECTNESS_COLUMNS: [&str; 7] = ["case", "mode", "trials", "failures", "rate", "expected", "check"];

fn describe(report: &mut Report, cfg: &SchemeConfig) {
    for field in cfg.describe().split(' ') {
        if let Some((k, v)) = field.split_once('=') {
            report.set(k, v);
        }
    }
}

fn verdict(ok: bool) -> String {
    if ok { "pass" } else { "fail" }.to_owned()
}

/// Messages used by the round-trip suite: 8 bits, or `λ` when the pad is the key.
pub fn message_bits(cfg: &SchemeConfig) -> usize {
    match cfg.kind {
        SchemeKind::Prfs => 1,
        _ if cfg.ske == SkeMode::OneTimePad => cfg.lambda.min(8),
        _ => 8,
    }
}

/// Keys enumerated by the exact paths: every `dk` under the PRF, or
/// `count` seeded draws under the random-table instantiation.
fn enumerated_keys(scheme: &dyn QpkeScheme, count: u64, seed: u64) -> Vec<DecryptionKey> {
    let l = scheme.lambda();
    match scheme.config().instantiation {
        Instantiation::Prf => (0..count).map(|k| DecryptionKey::from_bits(BitString::from_u64(k, l))).collect(),
        Instantiation::RandomTable => (0..count).map(|i| scheme.gen(&mut split(seed, i))).collect(),
    }
}

/// Exhaustive PRF-scheme round trip: every key, every measurement outcome of
/// the public key, every message and every SKE nonce. Returns
/// `(cases, failures, total outcome probability per key)`.
pub fn owf_exhaustive(cfg: &SchemeConfig, seed: u64) -> Result<(u64, u64, f64)> {
    let scheme = OwfScheme::new(*cfg)?;
    let l = cfg.lambda;
    let bits = message_bits(cfg);
    let nonce_width = match scheme.ske().mode() {
        SkeMode::PrfPad => l,
        SkeMode::FixedNonce => 0,
        SkeMode::OneTimePad => usize::MAX,
    };
    let nonces: Vec<BitString> = match nonce_width {
        usize::MAX => vec![BitString::default()],
        0 => vec![BitString::zeros(l)],
        w => (0..1u64 << w).map(|r| BitString::from_u64(r, w)).collect(),
    };
    let mut rng = split(seed, u64::MAX);
    let (mut cases, mut failures, mut min_mass) = (0u64, 0u64, f64::INFINITY);
    for dk in enumerated_keys(&scheme, 1 << l, seed) {
        let KeyState::Single(state) = scheme.qpk_gen(&dk)?.state().clone() else {
            return Err(CliError::Config("PRF-scheme key is not a single register".into()));
        };
        let mut mass = 0.0;
        for branch in state.branches(WireRange::new(0, 2 * l))? {
            if branch.probability == 0.0 {
                continue;
            }
            mass += branch.probability;
            let (x, y) = (branch.outcome.slice(0, l), branch.outcome.slice(l, l));
            for m in 0..1u64 << bits {
                let m = BitString::from_u64(m, bits);
                for nonce in &nonces {
                    let ct = scheme.ciphertext_for(&x, &y, &m, nonce)?;
                    cases += 1;
                    if scheme.decrypt(&dk, &ct, &mut rng)? != m {
                        failures += 1;
                    }
                }
            }
        }
        min_mass = min_mass.min(mass);
    }
    Ok((cases, failures, min_mass))
}

/// `Dec(Enc(m)) = m` over `trials` independent seeded runs with uniform messages.
pub fn monte_carlo_round_trip(scheme: &dyn QpkeScheme, bits: usize, fixed: Option<&BitString>, run: &RunArgs) -> Result<u64> {
    let mut failures = 0;
    for i in 0..run.trials as u64 {
        let mut rng = split(run.seed, i);
        let dk = scheme.gen(&mut rng);
        let qpk = scheme.qpk_gen(&dk)?;
        let m = fixed.cloned().unwrap_or_else(|| BitString::random(bits, &mut rng));
        let (_, ct) = scheme.encrypt(qpk, &m, &mut rng)?;
        if scheme.decrypt(&dk, &ct, &mut rng)? != m {
            failures += 1;
        }
    }
    Ok(failures)
}

/// Exact PRFS-scheme decryption error for message 1: the tester's acceptance
/// of the maximally mixed payload, averaged over keys and every `x`.
pub fn prfs_exact_error(cfg: &SchemeConfig, seed: u64) -> Result<f64> {
    let scheme = PrfsScheme::new(*cfg)?;
    let l = cfg.lambda;
    let keys = enumerated_keys(&scheme, PRFS_EXACT_KEYS.min(1 << l), seed);
    let mixed = QuantumState::Mixed(DensityMatrix::maximally_mixed(cfg.n)?);
    let mut total = 0.0;
    for dk in &keys {
        for x in 0..1u64 << l {
            let ct = Ciphertext::Quantum { x: BitString::from_u64(x, l), payload: mixed.clone() };
            total += scheme.accept_probability(dk, &ct)?;
        }
    }
    Ok(total / (keys.len() as f64 * (1u64 << l) as f64))
}

fn sigma(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

pub fn correctness(cfg: &SchemeConfig, run: &RunArgs) -> Result<Report> {
    if run.trials == 0 {
        return Err(CliError::Config("trials must be at least 1".into()));
    }
    let mut report = Report::new("correctness", &CORRECTNESS_COLUMNS);
    describe(&mut report, cfg);
    report.set("trials", run.trials);
    report.set("seed", run.seed);
    let scheme = build(*cfg)?;
    let bits = message_bits(cfg);
    let mut rows: Vec<(String, &str, u64, u64, f64, bool)> = Vec::new();
    match cfg.kind {
        SchemeKind::Owf => {
            if cfg.lambda <= OWF_EXHAUSTIVE_MAX_LAMBDA {
                let (cases, failures, mass) = owf_exhaustive(cfg, run.seed)?;
                let ok = failures == 0 && (mass - 1.0).abs() < 1e-12;
                rows.push((format!("round-trip/{bits}-bit"), "EXACT", cases, failures, 1.0, ok));
            } else {
                let failures = monte_carlo_round_trip(scheme.as_ref(), bits, None, run)?;
                rows.push((format!("round-trip/{bits}-bit"), "EMPIRICAL", run.trials as u64, failures, 1.0, failures == 0));
            }
        }
        SchemeKind::Prfspd => {
            let failures = monte_carlo_round_trip(scheme.as_ref(), bits, None, run)?;
            // A slot with k_i = 0 shows a uniform string, which verifies with probability 2^{-t}.
            let expected = (1.0 - 2f64.powi(-(cfg.t as i32) - 1)).powi(cfg.lambda as i32);
            let bound = (cfg.lambda as f64 * 2f64.powi(-(cfg.t as i32))).min(1.0);
            let rate = failures as f64 / run.trials as f64;
            let ok = rate <= bound + 3.0 * sigma(bound, run.trials);
            rows.push((format!("round-trip/{bits}-bit"), "EMPIRICAL", run.trials as u64, failures, expected, ok));
        }
        SchemeKind::Prfs => {
            let err = 2f64.powi(-(cfg.n as i32));
            let exact = prfs_exact_error(cfg, run.seed)?;
            let ok = (exact - err).abs() < 1e-12;
            report.push(vec!["m=1/density".into(), "EXACT".into(), "-".into(), "-".into(), num(1.0 - exact), num(1.0 - err), verdict(ok)]);
            report.passed &= ok;
            for m in [false, true] {
                let msg = BitString::new(vec![m]);
                let failures = monte_carlo_round_trip(scheme.as_ref(), 1, Some(&msg), run)?;
                let p = if m { err } else { 0.0 };
                let rate = failures as f64 / run.trials as f64;
                let ok = (rate - p).abs() <= 3.0 * sigma(p, run.trials) + f64::EPSILON;
                rows.push((format!("m={}", m as u8), "EMPIRICAL", run.trials as u64, failures, 1.0 - p, ok));
            }
        }
    }
    for (case, mode, trials, failures, expected, ok) in rows {
        let rate = if trials == 0 { 1.0 } else { 1.0 - failures as f64 / trials as f64 };
        report.push(vec![case, mode.into(), trials.to_string(), failures.to_string(), num(rate), num(expected), verdict(ok)]);
        report.passed &= ok;
    }
    Ok(report)
}

pub fn game(
    cfg: &SchemeConfig,
    game: GameKind,
    adversary: &str,
    confidence: f64,
    budget: usize,
    run: &RunArgs,
) -> Result<Report> {
    let mut report = Report::new("game", &CSV_HEADER.split(',').collect::<Vec<_>>());
    describe(&mut report, cfg);
    report.set("game", game);
    report.set("adversary", adversary);
    report.set("budget", budget);
    report.set("trials", run.trials);
    report.set("seed", run.seed);
    report.set("confidence", confidence);
    let estimate = if game == GameKind::Cloning {
        if cfg.kind != SchemeKind::Prfspd {
            return Err(CliError::Config("the cloning game runs on the prfspd scheme".into()));
        }
        estimate_cloning(cfg, ClonerKind::from_str(adversary)?, run.trials, run.seed, confidence)?
    } else {
        let scheme = build(*cfg)?;
        let mut spec = GameSpec::new(game);
        spec.budget = Budget { key_copies: budget, queries: budget };
        estimate_game(scheme.as_ref(), AdversaryKind::from_str(adversary)?, &spec, run.trials, run.seed, confidence)?
    };
    let ctx = ReportContext {
        game: game.to_string(),
        scheme: cfg.kind.to_string(),
        lambda: cfg.lambda,
        mutation: cfg.mutation.to_string(),
        adversary: adversary.to_owned(),
        seed: run.seed,
    };
    report.push(render_csv_row(&ctx, &estimate).split(',').map(str::to_owned).collect());
    Ok(report)
}

/// Agreement required between the closed form and the explicit construction.
pub const PUNCTURED_TOLERANCE: f64 = 1e-9;
/// Distances that must vanish exactly, up to rounding.
pub const ZERO_TOLERANCE: f64 = 1e-12;

pub fn analyze(
    what: Analysis,
    scheme: SchemeKind,
    lambda: Option<usize>,
    copies: Option<usize>,
    queries: Option<usize>,
    n: usize,
) -> Result<Report> {
    let one_or = |v: Option<usize>, range: std::ops::RangeInclusive<usize>| match v {
        Some(v) => v..=v,
        None => range,
    };
    let report = match what {
        Analysis::Punctured => {
            let mut r = Report::new("analyze", &["lambda", "copies", "closed_form", "explicit", "path", "abs_diff", "check"]);
            r.set("analysis", "punctured");
            for l in one_or(lambda, 2..=6) {
                for p in one_or(copies, 1..=4) {
                    let d = punctured_key_distance(l, p)?;
                    let diff = (d.closed_form - d.explicit).abs();
                    let ok = diff <= PUNCTURED_TOLERANCE;
                    r.passed &= ok;
                    let path = format!("{:?}", d.path).to_lowercase();
                    r.push(vec![l.to_string(), p.to_string(), num(d.closed_form), num(d.explicit), path, sci(diff), verdict(ok)]);
                }
            }
            r
        }
        Analysis::Commuting | Analysis::RandomKey => {
            let count = if what == Analysis::Commuting { "copies" } else { "queries" };
            let mut r = Report::new("analyze", &["pair", "metric", "lambda", count, "value", "check"]);
            let reports = if what == Analysis::Commuting {
                r.set("analysis", "commuting");
                let c = copies.unwrap_or(2);
                r.set("copies", c);
                one_or(lambda, 1..=3).map(|l| commuting_measurement_check(l, c)).collect::<Result<Vec<_>, _>>()?
            } else {
                r.set("analysis", "random-key");
                let l = lambda.unwrap_or(2);
                one_or(queries, 0..=3).map(|q| random_key_indistinguishability_check(l, q)).collect::<Result<Vec<_>, _>>()?
            };
            for h in reports {
                let ok = h.value.abs() <= ZERO_TOLERANCE;
                r.passed &= ok;
                r.push(vec![
                    h.pair.to_string(),
                    h.metric.to_string(),
                    h.lambda.to_string(),
                    h.copies.to_string(),
                    sci(h.value),
                    verdict(ok),
                ]);
            }
            r
        }
        Analysis::Helstrom => {
            let l = lambda.unwrap_or(2);
            let mut cfg = SchemeConfig::new(scheme, l).with_instantiation(Instantiation::RandomTable).with_n(n);
            if scheme != SchemeKind::Prfs {
                cfg = cfg.with_ske(SkeMode::OneTimePad);
            }
            let mut r = Report::new("analyze", &["copies", "dim", "labels", "trace_distance", "optimal_win"]);
            r.set("analysis", "helstrom");
            describe(&mut r, &cfg);
            // The exact PRF-scheme ensemble pads λ-bit messages.
            let (m0, m1) = match scheme {
                SchemeKind::Owf => (BitString::zeros(l), BitString::ones(l)),
                _ => default_messages(&cfg),
            };
            r.set("m0", &m0);
            r.set("m1", &m1);
            for p in one_or(copies, 0..=1) {
                let a = optimal_advantage(&cfg, p, &m0, &m1)?;
                r.push(vec![p.to_string(), a.dim.to_string(), a.labels.to_string(), num(a.trace_distance), num(a.optimal_win_probability())]);
            }
            r
        }
    };
    Ok(report)
}
