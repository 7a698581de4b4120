use crate::{CliError, Scenario};
use nucont_core::nu::{run_checker, CheckReport, Context, Verdict};
use nucont_core::spectral::{spectrum_report, Provenance};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::time::Instant;

/// Command-line overrides.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub tol_scale: Option<f64>,
}

/// Everything a run decides. Wall-clock data lives in [`Timing`] so that
/// the report itself is byte-stable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub scenario: String,
    pub seed: u64,
    pub tol_scale: f64,
    pub negative_control: bool,
    /// `pass` iff no checker failed.
    pub verdict: Verdict,
    /// Oracle behind each spectral set of the limit.
    pub provenance: BTreeMap<String, Provenance>,
    pub checks: Vec<CheckReport>,
}

impl Report {
    /// 0 iff every checker that was not `hypothesis-unmet` passed.
    pub fn exit_code(&self) -> i32 {
        if self.verdict == Verdict::Pass {
            0
        } else {
            1
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub scenario: String,
    pub total_seconds: f64,
    pub checkers: Vec<(String, f64)>,
}

pub fn run_scenario(s: &Scenario, opts: RunOptions) -> Result<(Report, Timing), CliError> {
    let start = Instant::now();
    let seed = opts.seed.unwrap_or(s.seed);
    let tol_scale = opts.tol_scale.unwrap_or(1.0) * s.tolerances.scale.unwrap_or(1.0);
    if !(tol_scale.is_finite() && tol_scale > 0.0) {
        return Err(CliError::Validation(format!("tolerance scale must be positive, got {tol_scale}")));
    }
    let seq = s.sequence(seed)?;
    let provenance = match &seq {
        Some(q) => spectrum_report(q.limit(), &s.spectral, None)?.provenance,
        None => BTreeMap::new(),
    };
    let mut ctx = Context::new(seq, seed);
    ctx.cfg = s.spectral;
    ctx.truncation = s.truncation;
    ctx.tol_scale = tol_scale;
    if let Some(t) = s.tolerances.classification {
        ctx.classification_tol = t;
    }
    let mut checks = Vec::with_capacity(s.checkers.len());
    let mut times = Vec::with_capacity(s.checkers.len());
    for ch in &s.checkers {
        let t0 = Instant::now();
        checks.push(run_checker(&ctx, ch)?);
        times.push((ch.name().to_string(), t0.elapsed().as_secs_f64()));
    }
    let verdict = if checks.iter().any(|c| c.verdict == Verdict::Fail) {
        Verdict::Fail
    } else {
        Verdict::Pass
    };
    Ok((
        Report {
            scenario: s.name.clone(),
            seed,
            tol_scale,
            negative_control: s.negative_control,
            verdict,
            provenance,
            checks,
        },
        Timing {
            scenario: s.name.clone(),
            total_seconds: start.elapsed().as_secs_f64(),
            checkers: times,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse_scenario;

    #[test]
    fn hypothesis_unmet_does_not_fail_the_run() {
        let text = r#"{
            "name": "finite-commuting",
            "family": {"kind": "constant", "limit": {"variant": "finite-matrix", "matrix": [[[1, 0]]]}},
            "n_range": [1, 8],
            "checkers": [{"checker": "commuting-case"}, {"checker": "upper-semicontinuity"}]
        }"#;
        let s = parse_scenario(text).unwrap();
        let (r, _) = run_scenario(&s, RunOptions::default()).unwrap();
        assert_eq!(r.checks[0].verdict, Verdict::HypothesisUnmet);
        assert_eq!(r.checks[1].verdict, Verdict::Pass);
        assert_eq!(r.exit_code(), 0);
        assert_eq!(r.provenance["sigma"], Provenance::Eigen);
    }
}
