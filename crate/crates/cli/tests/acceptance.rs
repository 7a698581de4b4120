//! Acceptance suite. Prints one PASS/FAIL line per criterion with its wall
//! time against the budget. The process fails iff a criterion fails that is
//! not listed in `KNOWN_UNATTAINABLE`; those still print FAIL.

use nucont_cli::nucont_core as core;
use nucont_cli::{corpus, parse_scenario, run_scenario, Report, RunOptions, Timing};

use core::models::{OperatorModel, TruncationSpec};
use core::nu::{nu_nonuniqueness_demo, run_checker, CheckReport, Checker, Context, FamilySpec, OperatorSequence, Verdict};
use core::sets::{hausdorff_distance, PointCloud};
use core::spectral::{ap_spectrum_grid, fredholm_index_map, section_smin, spectrum_report, GridSpec, SpectralConfig};
use core::C64;
use std::collections::BTreeSet;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

/// Criteria that cannot pass as stated, with the reason. They are run and
/// reported like the others.
const KNOWN_UNATTAINABLE: &[(u32, &str)] = &[(
    6,
    "every 201x200 section of the unit shift has s_min >= 2 sin(pi/402) ~ 0.0156 > eps = 1e-2, \
     so the injection-modulus grid is empty and its distance to the circle is undefined",
)];

type Outcome = Result<(bool, String), String>;

struct Criterion {
    id: u32,
    budget: f64,
    run: fn() -> Outcome,
}

const CRITERIA: &[Criterion] = &[
    Criterion { id: 1, budget: 0.1, run: c1_nonuniqueness },
    Criterion { id: 2, budget: 10.0, run: c2_upper_semicontinuity },
    Criterion { id: 3, budget: 1.0, run: c3_commuting },
    Criterion { id: 4, budget: 1.0, run: c4_spectral_projection },
    Criterion { id: 5, budget: 2.0, run: c5_projector_family },
    Criterion { id: 6, budget: 10.0, run: c6_winding_and_ap },
    Criterion { id: 7, budget: 2.0, run: c7_index_continuity },
    Criterion { id: 8, budget: 5.0, run: c8_weyl },
    Criterion { id: 9, budget: 5.0, run: c9_ap_limsup },
    Criterion { id: 10, budget: 5.0, run: c10_aluthge },
    Criterion { id: 11, budget: 2.0, run: c11_radius },
    Criterion { id: 12, budget: 60.0, run: c12_determinism },
];

fn main() {
    let mut unexpected = 0;
    for c in CRITERIA {
        let t0 = Instant::now();
        let out = (c.run)();
        let secs = t0.elapsed().as_secs_f64();
        let (ok, detail) = match out {
            Ok((ok, d)) => (ok, d),
            Err(e) => (false, format!("error: {e}")),
        };
        let in_budget = secs <= c.budget;
        let pass = ok && in_budget;
        let known = KNOWN_UNATTAINABLE.iter().find(|(id, _)| *id == c.id);
        let mut line = format!(
            "criterion {:>2}  {}  {:>7.3} s (budget {} s)  {}",
            c.id,
            if pass { "PASS" } else { "FAIL" },
            secs,
            c.budget,
            detail
        );
        if ok && !in_budget {
            line.push_str("  [over time budget]");
        }
        if !pass {
            match known {
                Some((_, why)) => line.push_str(&format!("  [known unattainable: {why}]")),
                None => unexpected += 1,
            }
        }
        println!("{line}");
    }
    if unexpected > 0 {
        println!("{unexpected} criterion(s) failed unexpectedly");
        std::process::exit(1);
    }
}

fn builtin(name: &str) -> Result<(Report, Timing), String> {
    let text = corpus::builtin(name).ok_or_else(|| format!("no built-in scenario {name}"))?;
    let s = parse_scenario(text).map_err(|e| e.to_string())?;
    run_scenario(&s, RunOptions::default()).map_err(|e| e.to_string())
}

/// A built-in scenario restricted to the checkers named `keep`.
fn builtin_only(name: &str, keep: &str) -> Result<(Report, Timing), String> {
    let text = corpus::builtin(name).ok_or_else(|| format!("no built-in scenario {name}"))?;
    let mut s = parse_scenario(text).map_err(|e| e.to_string())?;
    s.checkers.retain(|c| c.name() == keep);
    run_scenario(&s, RunOptions::default()).map_err(|e| e.to_string())
}

fn check<'a>(r: &'a Report, checker: &str) -> Result<&'a CheckReport, String> {
    r.checks
        .iter()
        .find(|c| c.checker == checker)
        .ok_or_else(|| format!("{} has no {checker} check", r.scenario))
}

fn values(c: &CheckReport, quantity: &str) -> Vec<(usize, f64)> {
    c.series(quantity)
}

fn max_of(c: &CheckReport, quantity: &str) -> Result<f64, String> {
    let v = values(c, quantity);
    if v.is_empty() {
        return Err(format!("{} reports no {quantity}", c.checker));
    }
    Ok(v.iter().map(|x| x.1).fold(f64::NEG_INFINITY, f64::max))
}

fn json<T: serde::de::DeserializeOwned>(text: &str) -> Result<T, String> {
    serde_json::from_str(text).map_err(|e| format!("{e}: {text}"))
}

fn c1_nonuniqueness() -> Outcome {
    let r = nu_nonuniqueness_demo(None).map_err(|e| e.to_string())?;
    let zeros = [r.to_x.nu1, r.to_x.nu2, r.to_y.nu1, r.to_y.nu2];
    let ok = zeros.iter().all(|&v| v == 0.0) && r.to_x.bounded && r.to_y.bounded && r.limit_gap == 1.0 && r.pass;
    Ok((ok, format!("diagnostics {zeros:?}, ||0 - N|| = {}", r.limit_gap)))
}

fn c2_upper_semicontinuity() -> Outcome {
    let family: FamilySpec = json(r#"{"kind": "random-matrix", "rate": {"rate": "geometric", "ratio": 0.5}}"#)?;
    let checker: Checker = json(r#"{"checker": "upper-semicontinuity", "tol": 0.05, "tail": 25}"#)?;
    let mut good = 0;
    let mut worst = 0.0f64;
    for seed in 0..100u64 {
        let seq = OperatorSequence::from_spec(&family, (1, 64), seed).map_err(|e| e.to_string())?;
        let ctx = Context::new(Some(seq), seed);
        let rep = run_checker(&ctx, &checker).map_err(|e| format!("seed {seed}: {e}"))?;
        let d: Vec<f64> = values(&rep, "directed_distance")
            .into_iter()
            .filter(|(n, _)| *n >= 40)
            .map(|x| x.1)
            .collect();
        let monotone = values(&rep, "tail_nonincreasing").first().map(|x| x.1) == Some(1.0);
        let tail_max = d.iter().copied().fold(0.0, f64::max);
        worst = worst.max(tail_max);
        if d.len() == 25 && tail_max <= 0.05 && monotone {
            good += 1;
        }
    }
    Ok((
        good >= 95,
        format!("{good}/100 seeds within 0.05 and nonincreasing for n >= 40 (worst tail max {worst:e})"),
    ))
}

fn c3_commuting() -> Outcome {
    let (r, _) = builtin("diagonal-commuting")?;
    let c = check(&r, "commuting-case")?;
    let h = values(c, "hausdorff_distance");
    let ns: BTreeSet<usize> = h.iter().map(|x| x.0).collect();
    let err = h.iter().map(|(n, v)| (v - 1.0 / *n as f64).abs()).fold(0.0, f64::max);
    let cert = c.certificates.iter().any(|s| s.contains("accumulation point"));
    let ok = c.verdict == Verdict::Pass && ns == (1..=64).collect() && err <= 1e-12 && cert;
    Ok((ok, format!("max |d_H - 1/n| = {err:e} over n = 1..64, certificate: {cert}")))
}

fn c4_spectral_projection() -> Outcome {
    let (r, _) = builtin("spectral-projection")?;
    let c = check(&r, "spectral-projection")?;
    let idem = max_of(c, "idempotency_defect")?;
    let comm = max_of(c, "commutation_defect")?;
    let count = max_of(c, "riesz_count")?;
    let closed = max_of(c, "closed_form_deviation")?;
    let alt = max_of(c, "contour_independence")?;
    let ok = c.verdict == Verdict::Pass && idem <= 1e-9 && comm <= 1e-9 && count == 1.0 && closed <= 1e-8 && alt <= 1e-8;
    Ok((
        ok,
        format!("idempotency {idem:e}, commutation {comm:e}, riesz_count {count}, closed form {closed:e}, second contour {alt:e}"),
    ))
}

fn c5_projector_family() -> Outcome {
    let (r, _) = builtin("projector-family")?;
    let c = check(&r, "projector-family")?;
    let late = |q: &str| {
        values(c, q)
            .into_iter()
            .filter(|(n, _)| *n >= 30)
            .map(|x| x.1)
            .fold(0.0, f64::max)
    };
    let (dp, dpn) = (late("defect_p"), late("defect_pn"));
    let n0 = values(c, "n0").first().map(|x| x.1);
    let ok = c.verdict == Verdict::Pass && dp < 1e-8 && dpn < 1e-8 && n0.is_some_and(|n| n <= 30.0);
    Ok((ok, format!("max over n >= 30: (p_n - p) p {dp:e}, (p_n - p) p_n {dpn:e}; n0 = {n0:?}")))
}

fn unit_shift() -> Result<OperatorModel, String> {
    json(r#"{"variant": "weighted-shift", "prefix": [], "tail": {"rule": "constant", "c": [1, 0]}}"#)
}

fn c6_winding_and_ap() -> Outcome {
    let cfg = SpectralConfig::default();
    let symbol: OperatorModel = json(r#"{"variant": "toeplitz", "coeffs": {"1": [1, 0]}}"#)?;
    let lin = |k: usize, a: f64, b: f64| a + (b - a) * k as f64 / 19.0;
    let inner: Vec<C64> = (0..400).map(|k| C64::new(lin(k % 20, -0.63, 0.63), lin(k / 20, -0.63, 0.63))).collect();
    let outer: Vec<C64> = (0..400)
        .map(|k| C64::new(lin(k % 20, -2.0, 2.0), lin(k / 20, -2.0, 2.0)))
        .filter(|z| z.norm() > 1.1)
        .collect();
    let err = |e: core::Error| e.to_string();
    let inner_ok = fredholm_index_map(&symbol, &inner, &cfg).map_err(err)?.index_at.iter().all(|i| *i == Some(-1));
    let outer_ok = fredholm_index_map(&symbol, &outer, &cfg).map_err(err)?.index_at.iter().all(|i| *i == Some(0));

    // sigma_w against the closed unit disk, lattice point by lattice point
    let rep = spectrum_report(&symbol, &cfg, None).map_err(err)?;
    let weyl = rep.sigma_w.ok_or("no Weyl spectrum")?;
    let members: BTreeSet<(u64, u64)> = weyl.points().iter().map(|z| (z.re.to_bits(), z.im.to_bits())).collect();
    let tol = 1e-4;
    let mut mismatches = 0;
    for z in GridSpec::square(1.2, cfg.grid_step).points() {
        let inside = members.contains(&(z.re.to_bits(), z.im.to_bits()));
        let r = z.norm();
        if (r < 1.0 - tol && !inside) || (r > 1.0 + tol && inside) {
            mismatches += 1;
        }
    }
    let weyl_ok = mismatches == 0;

    // injection-modulus sigma_ap of the unit shift
    let shift = unit_shift()?;
    let spec = TruncationSpec { size: 200, extra_rows: Some(1) };
    let s0 = section_smin(&shift, C64::new(0.0, 0.0), spec).map_err(err)?;
    let s1 = section_smin(&shift, C64::new(1.0, 0.0), spec).map_err(err)?;
    let grid = GridSpec::square(1.5, 0.02).points();
    let ap = ap_spectrum_grid(&shift, &grid, spec, 1e-2).map_err(err)?;
    let circle = PointCloud::new((0..4096).map(|k| C64::from_polar(1.0, k as f64 * std::f64::consts::TAU / 4096.0)).collect())
        .map_err(err)?;
    let zero_excluded = !ap.points().contains(&C64::new(0.0, 0.0)) && s0 == 1.0;
    let (ap_ok, ap_detail) = if ap.is_empty() {
        (false, format!("injection-modulus grid is empty (s_min at 1 is {s1:e})"))
    } else {
        let d = hausdorff_distance(&ap, &circle).map_err(err)?;
        (d <= 0.05, format!("d_H(grid, circle) = {d:e}"))
    };
    Ok((
        inner_ok && outer_ok && weyl_ok && ap_ok && zero_excluded,
        format!(
            "index -1 inside: {inner_ok}, index 0 outside: {outer_ok}, sigma_w lattice mismatches {mismatches}; \
             s_min(0) = {s0}; {ap_detail}"
        ),
    ))
}

fn c7_index_continuity() -> Outcome {
    let (r, _) = builtin("shift-index-continuity")?;
    let c = check(&r, "index-continuity")?;
    let idx: BTreeSet<i64> = values(c, "index").iter().map(|x| x.1 as i64).collect();
    let limit = values(c, "limit_index").first().map(|x| x.1);
    let ok = c.verdict == Verdict::Pass && idx == BTreeSet::from([-1]) && limit == Some(-1.0) && values(c, "index").len() == 64;
    Ok((ok, format!("indices {idx:?}, limit index {limit:?}")))
}

fn c8_weyl() -> Outcome {
    let (r, t) = builtin_only("toeplitz-weyl", "weyl-continuity")?;
    let c = check(&r, "weyl-continuity")?;
    let h = values(c, "hausdorff_distance");
    let slack = std::f64::consts::SQRT_2 * SpectralConfig::default().grid_step;
    let within = h.iter().all(|(n, v)| *v <= 2.0 / *n as f64 + slack);
    let last = h.last().map(|x| x.1).unwrap_or(f64::INFINITY);
    let secs: f64 = t.checkers.iter().filter(|(n, _)| n == "weyl-continuity").map(|x| x.1).sum();
    let ok = c.verdict == Verdict::Pass && h.len() == 64 && within && last < 0.05 && last < h[0].1;
    Ok((
        ok,
        format!("d_H <= 2/n + {slack:.3} for all n: {within}; d_H at n = 64 is {last:e}; weyl checker {secs:.2} s"),
    ))
}

fn c9_ap_limsup() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for (name, want) in [
        ("shift-ap-limsup", Verdict::Pass),
        ("shift-perturbed-ap-limsup", Verdict::Pass),
        ("ap-limsup-nonfredholm", Verdict::HypothesisUnmet),
    ] {
        let (r, _) = builtin_only(name, "ap-limsup")?;
        let c = check(&r, "ap-limsup")?;
        ok &= c.verdict == want;
        let d = values(c, "directed_distance").first().map(|x| x.1);
        ok &= want != Verdict::Pass || d.is_some_and(|d| d <= 0.05);
        parts.push(format!("{name}: {} {}", c.verdict, d.map(|d| format!("({d:e})")).unwrap_or_default()));
    }
    Ok((ok, parts.join(", ")))
}

fn c10_aluthge() -> Outcome {
    let (r, _) = builtin("matrix-theorems")?;
    let a = check(&r, "aluthge-similarity")?;
    let h = check(&r, "hyponormal")?;
    let recon = max_of(a, "reconstruction_defect")?;
    let spec = max_of(a, "spectrum_distance")?;
    let dbl = max_of(h, "double_aluthge_defect")?;
    let mut trace = 0.0f64;
    for p in ["0.5", "1", "2"] {
        trace = trace.max(max_of(h, &format!("trace_defect_p{p}"))?);
    }
    let trials = values(a, "reconstruction_defect").len();
    let ok = a.verdict == Verdict::Pass
        && h.verdict == Verdict::Pass
        && trials == 50
        && recon <= 1e-9
        && spec <= 1e-6
        && dbl <= 1e-8
        && trace <= 1e-8;
    Ok((
        ok,
        format!("{trials} matrices: reconstruction {recon:e}, spectra {spec:e}, double Aluthge {dbl:e}, trace obstruction {trace:e}"),
    ))
}

fn c11_radius() -> Outcome {
    let (r, _) = builtin("matrix-theorems")?;
    let c = check(&r, "radius-perturbation")?;
    let radii = values(c, "radius");
    let q_zero = values(c, "radius_q_zero");
    let below = radii.iter().filter(|x| x.1 < 1.0).count();
    let min_q0 = q_zero.iter().map(|x| x.1).fold(f64::INFINITY, f64::min);
    let ok = c.verdict == Verdict::Pass && radii.len() == 100 && below == 100 && q_zero.len() == 100 && min_q0 >= 1.0 - 1e-8;
    Ok((ok, format!("{below}/100 perturbations below radius 1 certified q != 0; min r(p) for q = 0 is {min_q0}")))
}

fn reports(dir: &Path) -> Result<Vec<(String, Vec<u8>)>, String> {
    let mut out = Vec::new();
    for e in std::fs::read_dir(dir).map_err(|e| e.to_string())? {
        let p = e.map_err(|e| e.to_string())?.path();
        let name = p.file_name().unwrap_or_default().to_string_lossy().to_string();
        if name.ends_with(".json") && !name.ends_with(".timing.json") {
            out.push((name, std::fs::read(&p).map_err(|e| e.to_string())?));
        }
    }
    out.sort();
    Ok(out)
}

fn c12_determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_nucont");
    let base = std::env::temp_dir().join(format!("nucont-acceptance-{}", std::process::id()));
    let mut runs = Vec::new();
    for k in 0..2 {
        let dir = base.join(format!("run{k}"));
        let status = Command::new(bin)
            .args(["corpus", "--out-dir"])
            .arg(&dir)
            .output()
            .map_err(|e| e.to_string())?
            .status;
        if status.code() != Some(0) {
            return Ok((false, format!("corpus run {k} exited with {status}")));
        }
        runs.push(reports(&dir)?);
    }
    let identical = runs[0] == runs[1] && runs[0].len() == corpus::BUILTIN.len();
    let negatives: Vec<&str> = corpus::BUILTIN
        .iter()
        .filter(|(_, t)| parse_scenario(t).is_ok_and(|s| s.negative_control))
        .map(|(n, _)| *n)
        .collect();
    let mut codes = Vec::new();
    for n in &negatives {
        let out = Command::new(bin).args(["run", n]).output().map_err(|e| e.to_string())?;
        codes.push(out.status.code());
    }
    let _ = std::fs::remove_dir_all(&base);
    let ok = identical && negatives.len() == 3 && codes.iter().all(|c| *c == Some(1));
    Ok((
        ok,
        format!("{} reports byte-identical: {identical}; negative controls {negatives:?} exit {codes:?}", runs[0].len()),
    ))
}
