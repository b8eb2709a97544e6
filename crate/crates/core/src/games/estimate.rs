//! Monte Carlo estimation of winning probabilities and the report schema.
//!
//! Text reports are `key=value` lines under the header
//! `# qpke-lab advantage report v1`; the keys appear in this order:
//! `game scheme lambda mutation adversary trials seed confidence wins invalid
//! win_rate ci_low ci_high advantage`. CSV reports use the same keys as
//! columns, in the same order ([`CSV_HEADER`]).

use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};

use super::{GameError, GameTranscript, Result};
use crate::qsim::rng::{split, SimRng};

pub const DEFAULT_CONFIDENCE: f64 = 0.99;
pub const MIN_TRIALS: usize = 100;
pub const REPORT_HEADER: &str = "# qpke-lab advantage report v1";
pub const CSV_HEADER: &str =
    "game,scheme,lambda,mutation,adversary,trials,seed,confidence,wins,invalid,win_rate,ci_low,ci_high,advantage";

#[derive(Clone, Debug, PartialEq)]
pub struct AdvantageEstimate {
    pub trials: usize,
    pub wins: usize,
    /// Runs that ended in a protocol violation (already counted as losses).
    pub invalid: usize,
    pub confidence: f64,
    pub win_rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl AdvantageEstimate {
    pub fn from_counts(trials: usize, wins: usize, invalid: usize, confidence: f64) -> Self {
        let n = trials as f64;
        let p = wins as f64 / n;
        let half = z_score(confidence) * (p * (1.0 - p) / n).sqrt();
        Self {
            trials,
            wins,
            invalid,
            confidence,
            win_rate: p,
            ci_low: (p - half).max(0.0),
            ci_high: (p + half).min(1.0),
        }
    }

    /// `2·p̂ − 1`, the bias of the guess towards `b`; comparable with a trace distance.
    pub fn advantage(&self) -> f64 {
        2.0 * self.win_rate - 1.0
    }

    /// Standard error of the win rate.
    pub fn sigma(&self) -> f64 {
        (self.win_rate * (1.0 - self.win_rate) / self.trials as f64).sqrt()
    }

    pub fn contains(&self, p: f64) -> bool {
        self.ci_low <= p && p <= self.ci_high
    }
}

/// Two-sided normal quantile for `confidence`.
pub fn z_score(confidence: f64) -> f64 {
    Normal::new(0.0, 1.0).expect("standard normal").inverse_cdf(1.0 - (1.0 - confidence) / 2.0)
}

/// Runs `trials` independent games, trial `i` on stream `i` of `seed`, and
/// returns the Wald interval at `confidence`. The result does not depend on
/// thread scheduling.
pub fn estimate_advantage<F>(trials: usize, seed: u64, confidence: f64, run: F) -> Result<AdvantageEstimate>
where
    F: Fn(u64, &mut SimRng) -> Result<GameTranscript> + Sync,
{
    if trials < MIN_TRIALS {
        return Err(GameError::Config(format!("at least {MIN_TRIALS} trials required, got {trials}")));
    }
    if !(0.0 < confidence && confidence < 1.0) {
        return Err(GameError::Config(format!("confidence {confidence} outside (0, 1)")));
    }
    let outcomes = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = split(seed, i);
            let t = run(i, &mut rng)?;
            Ok((t.win, t.is_valid()))
        })
        .collect::<Result<Vec<_>>>()?;
    let wins = outcomes.iter().filter(|o| o.0).count();
    let invalid = outcomes.iter().filter(|o| !o.1).count();
    Ok(AdvantageEstimate::from_counts(trials, wins, invalid, confidence))
}

/// Identifies what an estimate was measured on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReportContext {
    pub game: String,
    pub scheme: String,
    pub lambda: usize,
    pub mutation: String,
    pub adversary: String,
    pub seed: u64,
}

fn fields(ctx: &ReportContext, e: &AdvantageEstimate) -> [(&'static str, String); 14] {
    [
        ("game", ctx.game.clone()),
        ("scheme", ctx.scheme.clone()),
        ("lambda", ctx.lambda.to_string()),
        ("mutation", ctx.mutation.clone()),
        ("adversary", ctx.adversary.clone()),
        ("trials", e.trials.to_string()),
        ("seed", ctx.seed.to_string()),
        ("confidence", format!("{:.4}", e.confidence)),
        ("wins", e.wins.to_string()),
        ("invalid", e.invalid.to_string()),
        ("win_rate", format!("{:.6}", e.win_rate)),
        ("ci_low", format!("{:.6}", e.ci_low)),
        ("ci_high", format!("{:.6}", e.ci_high)),
        ("advantage", format!("{:.6}", e.advantage())),
    ]
}

pub fn render_text(ctx: &ReportContext, e: &AdvantageEstimate) -> String {
    let mut out = format!("{REPORT_HEADER}\n");
    for (k, v) in fields(ctx, e) {
        out += &format!("{k}={v}\n");
    }
    out
}

pub fn render_csv_row(ctx: &ReportContext, e: &AdvantageEstimate) -> String {
    fields(ctx, e).into_iter().map(|(_, v)| v).collect::<Vec<_>>().join(",")
}

/// Parses a text report back into `(key, value)` pairs in file order.
pub fn parse_text(report: &str) -> Result<Vec<(String, String)>> {
    let mut lines = report.lines();
    if lines.next() != Some(REPORT_HEADER) {
        return Err(GameError::Config("missing report header".into()));
    }
    lines
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            l.split_once('=')
                .map(|(k, v)| (k.to_owned(), v.to_owned()))
                .ok_or_else(|| GameError::Config(format!("bad report line {l:?}")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::GameKind;
    use crate::schemes::SchemeKind;
    use rand::Rng;

    fn coin(_: u64, rng: &mut SimRng) -> Result<GameTranscript> {
        let mut t = GameTranscript::new(GameKind::Cpa, SchemeKind::Owf, 1, "coin");
        t.win = rng.random();
        Ok(t)
    }

    #[test]
    fn wald_interval_shape() {
        let e = AdvantageEstimate::from_counts(100, 100, 0, 0.99);
        assert_eq!((e.ci_low, e.ci_high), (1.0, 1.0));
        let e = AdvantageEstimate::from_counts(10_000, 5000, 0, 0.99);
        assert!(e.contains(0.5) && e.ci_low < 0.5 && e.ci_high > 0.5);
        assert!((z_score(0.99) - 2.5758).abs() < 1e-3);
    }

    #[test]
    fn reproducible_and_schedule_independent() {
        let a = estimate_advantage(1000, 42, 0.99, coin).unwrap();
        let b = estimate_advantage(1000, 42, 0.99, coin).unwrap();
        let serial = (0..1000).filter(|&i| coin(i, &mut split(42, i)).unwrap().win).count();
        assert_eq!(a, b);
        assert_eq!(a.wins, serial);
    }

    #[test]
    fn coverage_of_fair_coin() {
        let reps = 100;
        let covered = (0..reps)
            .filter(|&r| estimate_advantage(10_000, 1000 + r, 0.99, coin).unwrap().contains(0.5))
            .count();
        assert!(covered >= 95, "{covered}/{reps}");
    }

    #[test]
    fn rejects_tiny_batches() {
        assert!(estimate_advantage(99, 1, 0.99, coin).is_err());
        assert!(estimate_advantage(100, 1, 1.0, coin).is_err());
    }

    #[test]
    fn text_report_round_trip() {
        let ctx = ReportContext {
            game: "cpa".into(),
            scheme: "owf".into(),
            lambda: 4,
            mutation: "none".into(),
            adversary: "random-guess".into(),
            seed: 3,
        };
        let e = AdvantageEstimate::from_counts(200, 101, 2, 0.99);
        let parsed = parse_text(&render_text(&ctx, &e)).unwrap();
        let keys: Vec<_> = parsed.iter().map(|(k, _)| k.as_str()).collect();
        assert_eq!(keys.join(","), CSV_HEADER);
        assert_eq!(render_csv_row(&ctx, &e).split(',').count(), keys.len());
    }
}
