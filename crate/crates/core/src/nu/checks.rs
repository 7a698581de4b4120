//! One checker per continuity statement. A checker certifies the
//! statement's hypotheses from the model class, measures the conclusion on
//! the family, and returns a verdict with the full numeric trace.
//! Hypotheses that cannot be certified give `hypothesis-unmet`, never a
//! pass.

use super::{classify_convergence, nu_diagnostics, nu_nonuniqueness_demo, tail_window, tends_to_zero};
use super::{Classification, ConvergenceClass, NuDiagnostics, OperatorSequence};
use crate::contour::{
    nonzero_under_radius_perturbation, projection_report, projector_family_convergence, spectral_projection,
    verify_projection, CauchyContour, RadiusOutcome,
};
use crate::error::{Error, Result};
use crate::hyponormal::{
    aluthge, hyponormal_resolvent_identity_check, is_p_hyponormal, shift_hyponormality, thmd_similarity,
    IdentityVerdict,
};
use crate::linalg::{eigenvalues, operator_norm, ComplexMatrix, C64, ONE, ZERO};
use crate::models::{OperatorModel, TailRule, TruncationSpec};
use crate::random;
use crate::sets::{
    cluster_components, directed_distance, hausdorff_distance, isolated_points, liminf_estimate, limsup_estimate,
    CloudSequence, PointCloud,
};
use crate::spectral::{
    ap_spectrum_grid, ap_spectrum_oracle, essential_and_weyl, fredholm_index, riesz_points, spectrum_with, GridSpec,
    SpectralConfig,
};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    HypothesisUnmet,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::HypothesisUnmet => "hypothesis-unmet",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub n: usize,
    pub quantity: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub checker: String,
    pub verdict: Verdict,
    pub detail: String,
    /// Reasons the hypotheses hold, one per certified hypothesis.
    pub certificates: Vec<String>,
    pub trace: Vec<TraceRow>,
}

impl CheckReport {
    fn new(checker: &str) -> Self {
        CheckReport {
            checker: checker.to_string(),
            verdict: Verdict::Pass,
            detail: String::new(),
            certificates: Vec::new(),
            trace: Vec::new(),
        }
    }

    fn push(&mut self, n: usize, quantity: &str, value: f64) {
        self.trace.push(TraceRow {
            n,
            quantity: quantity.to_string(),
            value,
        });
    }

    fn certify(&mut self, reason: impl Into<String>) {
        self.certificates.push(reason.into());
    }

    fn finish(mut self, pass: bool, detail: impl Into<String>) -> Self {
        self.verdict = if pass { Verdict::Pass } else { Verdict::Fail };
        self.detail = detail.into();
        self
    }

    /// Values of one quantity, in trace order.
    pub fn series(&self, quantity: &str) -> Vec<(usize, f64)> {
        self.trace
            .iter()
            .filter(|r| r.quantity == quantity)
            .map(|r| (r.n, r.value))
            .collect()
    }
}

fn unmet(checker: &str, why: impl Into<String>) -> CheckReport {
    CheckReport {
        checker: checker.to_string(),
        verdict: Verdict::HypothesisUnmet,
        detail: why.into(),
        certificates: Vec::new(),
        trace: Vec::new(),
    }
}

/// `lambda_n = base + step / n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LambdaPath {
    pub base: C64,
    #[serde(default)]
    pub step: C64,
}

impl LambdaPath {
    pub fn at(&self, n: usize) -> C64 {
        self.base + self.step / n as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShiftCase {
    pub model: OperatorModel,
    pub hyponormal: bool,
}

fn default_p_values() -> Vec<f64> {
    vec![0.5, 1.0, 2.0]
}

/// Registered checkers with their parameter overrides. Omitted parameters
/// take the defaults documented per field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "checker", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Checker {
    /// Classifies the family; with `expect`, passes iff the class matches,
    /// otherwise iff the family ν-converges.
    NuClassification {
        #[serde(default)]
        tol: Option<f64>,
        #[serde(default)]
        tail: Option<usize>,
        #[serde(default)]
        expect: Option<ConvergenceClass>,
    },
    /// Zero sequence against the limits `0` and `y` (default `N`).
    NuNonuniqueness {
        #[serde(default)]
        y: Option<ComplexMatrix>,
    },
    /// `d_n = d(sigma(T_n), sigma(T))` on the tail; tolerance 0.05.
    UpperSemicontinuity {
        #[serde(default)]
        tol: Option<f64>,
        #[serde(default)]
        tail: Option<usize>,
    },
    /// Full Hausdorff convergence for commuting diagonal families.
    CommutingCase {
        #[serde(default)]
        tol: Option<f64>,
        #[serde(default)]
        tail: Option<usize>,
    },
    ComponentPersistence {
        center: C64,
        radius: f64,
        #[serde(default)]
        gap: Option<f64>,
    },
    ApLimsup {
        #[serde(default)]
        grid: Option<GridSpec>,
        #[serde(default)]
        truncation: Option<TruncationSpec>,
        /// Injection-modulus threshold.
        eps: f64,
        #[serde(default)]
        set_eps: Option<f64>,
        #[serde(default)]
        tail: Option<usize>,
        #[serde(default)]
        exclusion_radius: Option<f64>,
        #[serde(default)]
        tol: Option<f64>,
    },
    IndexContinuity {
        path: LambdaPath,
        /// Defaults to `path.base`.
        #[serde(default)]
        limit: Option<C64>,
        #[serde(default)]
        tail: Option<usize>,
    },
    WeylContinuity {
        #[serde(default)]
        tol: Option<f64>,
        #[serde(default)]
        tail: Option<usize>,
    },
    RieszLiminf {
        #[serde(default)]
        tol: Option<f64>,
        #[serde(default)]
        set_eps: Option<f64>,
        #[serde(default)]
        tail: Option<usize>,
    },
    IsoLiminf {
        #[serde(default)]
        tol: Option<f64>,
        #[serde(default)]
        set_eps: Option<f64>,
        #[serde(default)]
        tail: Option<usize>,
        #[serde(default)]
        exclusion_radius: Option<f64>,
        #[serde(default)]
        gap: Option<f64>,
    },
    SpectralProjection {
        contour: CauchyContour,
        #[serde(default)]
        alt_contour: Option<CauchyContour>,
        /// Idempotency and commutation tolerance, default 1e-9.
        #[serde(default)]
        tol: Option<f64>,
        /// Closed-form and contour-independence tolerance, default 1e-8.
        #[serde(default)]
        closed_form_tol: Option<f64>,
        /// Added to entry `(0, 1)` of the computed projection.
        #[serde(default)]
        corrupt: Option<f64>,
    },
    ProjectorFamily {
        contour: CauchyContour,
        #[serde(default)]
        tol: Option<f64>,
        /// Defects must be below `tol` from this index on; default 30.
        #[serde(default)]
        by_n: Option<usize>,
    },
    RadiusPerturbation {
        #[serde(default)]
        trials: Option<usize>,
        #[serde(default)]
        dim: Option<usize>,
    },
    AluthgeSimilarity {
        #[serde(default)]
        trials: Option<usize>,
        #[serde(default)]
        dim: Option<usize>,
    },
    Hyponormal {
        #[serde(default)]
        trials: Option<usize>,
        #[serde(default)]
        dim: Option<usize>,
        #[serde(default = "default_p_values")]
        p_values: Vec<f64>,
        #[serde(default)]
        shifts: Vec<ShiftCase>,
    },
    ResolventIdentity {
        lambdas: Vec<C64>,
    },
}

/// Names accepted in scenario files, in registration order.
pub const CHECKER_NAMES: &[&str] = &[
    "nu-classification",
    "nu-nonuniqueness",
    "upper-semicontinuity",
    "commuting-case",
    "component-persistence",
    "ap-limsup",
    "index-continuity",
    "weyl-continuity",
    "riesz-liminf",
    "iso-liminf",
    "spectral-projection",
    "projector-family",
    "radius-perturbation",
    "aluthge-similarity",
    "hyponormal",
    "resolvent-identity",
];

impl Checker {
    pub fn name(&self) -> &'static str {
        use Checker::*;
        match self {
            NuClassification { .. } => "nu-classification",
            NuNonuniqueness { .. } => "nu-nonuniqueness",
            UpperSemicontinuity { .. } => "upper-semicontinuity",
            CommutingCase { .. } => "commuting-case",
            ComponentPersistence { .. } => "component-persistence",
            ApLimsup { .. } => "ap-limsup",
            IndexContinuity { .. } => "index-continuity",
            WeylContinuity { .. } => "weyl-continuity",
            RieszLiminf { .. } => "riesz-liminf",
            IsoLiminf { .. } => "iso-liminf",
            SpectralProjection { .. } => "spectral-projection",
            ProjectorFamily { .. } => "projector-family",
            RadiusPerturbation { .. } => "radius-perturbation",
            AluthgeSimilarity { .. } => "aluthge-similarity",
            Hyponormal { .. } => "hyponormal",
            ResolventIdentity { .. } => "resolvent-identity",
        }
    }

    /// Whether the checker reads the scenario family.
    pub fn needs_family(&self) -> bool {
        !matches!(
            self,
            Checker::NuNonuniqueness { .. }
                | Checker::RadiusPerturbation { .. }
                | Checker::AluthgeSimilarity { .. }
                | Checker::Hyponormal { .. }
        )
    }

    /// Semantic checks that need no computation beyond the parameters.
    pub fn validate(&self) -> Result<()> {
        let positive = |x: Option<f64>, what: &str| -> Result<()> {
            match x {
                Some(v) if !(v.is_finite() && v > 0.0) => Err(Error::Domain(format!("{what} must be positive, got {v}"))),
                _ => Ok(()),
            }
        };
        match self {
            Checker::NuClassification { tol, .. }
            | Checker::UpperSemicontinuity { tol, .. }
            | Checker::CommutingCase { tol, .. }
            | Checker::WeylContinuity { tol, .. } => positive(*tol, "tol"),
            Checker::ComponentPersistence { center, radius, gap } => {
                positive(Some(*radius), "radius")?;
                positive(*gap, "gap")?;
                if center.norm() <= *radius {
                    return Err(Error::Hypothesis(format!(
                        "0 lies in U = B({center}, {radius}); the persistence statement needs 0 outside U"
                    )));
                }
                Ok(())
            }
            Checker::ApLimsup {
                grid,
                truncation,
                eps,
                set_eps,
                exclusion_radius,
                tol,
                ..
            } => {
                positive(Some(*eps), "eps")?;
                positive(*set_eps, "set_eps")?;
                positive(*tol, "tol")?;
                if let Some(r) = exclusion_radius {
                    if !(r.is_finite() && *r >= 0.0) {
                        return Err(Error::Domain("exclusion_radius must be nonnegative".into()));
                    }
                }
                if let Some(g) = grid {
                    g.validate()?;
                }
                if let Some(t) = truncation {
                    if t.extra_rows.is_none() {
                        return Err(Error::Contract("ap-limsup needs a rectangular truncation".into()));
                    }
                }
                Ok(())
            }
            Checker::RieszLiminf { tol, set_eps, .. } => {
                positive(*tol, "tol")?;
                positive(*set_eps, "set_eps")
            }
            Checker::IsoLiminf { tol, set_eps, gap, .. } => {
                positive(*tol, "tol")?;
                positive(*set_eps, "set_eps")?;
                positive(*gap, "gap")
            }
            Checker::SpectralProjection { tol, closed_form_tol, .. } => {
                positive(*tol, "tol")?;
                positive(*closed_form_tol, "closed_form_tol")
            }
            Checker::ProjectorFamily { contour, tol, .. } => {
                positive(*tol, "tol")?;
                if contour.index_of(ZERO) != Some(0) {
                    return Err(Error::Hypothesis(
                        "0 must lie in the exterior of the projector-family contour".into(),
                    ));
                }
                Ok(())
            }
            Checker::Hyponormal { p_values, .. } => {
                for &p in p_values {
                    positive(Some(p), "p")?;
                }
                Ok(())
            }
            Checker::IndexContinuity { .. }
            | Checker::NuNonuniqueness { .. }
            | Checker::RadiusPerturbation { .. }
            | Checker::AluthgeSimilarity { .. }
            | Checker::ResolventIdentity { .. } => Ok(()),
        }
    }
}

/// Shared state of one scenario run. Diagnostics and spectra are computed
/// once and reused by every checker.
#[derive(Debug)]
pub struct Context {
    seq: Option<OperatorSequence>,
    pub cfg: SpectralConfig,
    pub truncation: Option<TruncationSpec>,
    pub seed: u64,
    /// Multiplies every tolerance.
    pub tol_scale: f64,
    /// Tolerance of the ν-classification gate.
    pub classification_tol: f64,
    diag: OnceLock<NuDiagnostics>,
    spectra: OnceLock<(PointCloud, Vec<PointCloud>)>,
}

const SALT_RADIUS: u64 = 0x52_4144;
const SALT_ALUTHGE: u64 = 0x414c_5547;
const SALT_HYPO: u64 = 0x4859_504f;

impl Context {
    pub fn new(seq: Option<OperatorSequence>, seed: u64) -> Self {
        Context {
            seq,
            cfg: SpectralConfig::default(),
            truncation: None,
            seed,
            tol_scale: 1.0,
            classification_tol: 1e-6,
            diag: OnceLock::new(),
            spectra: OnceLock::new(),
        }
    }

    pub fn sequence(&self) -> Option<&OperatorSequence> {
        self.seq.as_ref()
    }

    fn seq(&self) -> Result<&OperatorSequence> {
        self.seq
            .as_ref()
            .ok_or_else(|| Error::Domain("this checker needs a family".into()))
    }

    fn tol(&self, given: Option<f64>, default: f64) -> f64 {
        given.unwrap_or(default) * self.tol_scale
    }

    pub fn diagnostics(&self) -> Result<&NuDiagnostics> {
        if let Some(d) = self.diag.get() {
            return Ok(d);
        }
        let d = nu_diagnostics(self.seq()?)?;
        Ok(self.diag.get_or_init(|| d))
    }

    pub fn classification(&self, tail: Option<usize>) -> Result<Classification> {
        classify_convergence(self.diagnostics()?, self.classification_tol * self.tol_scale, tail)
    }

    /// `(sigma(T), [sigma(T_n)])`.
    pub fn spectra(&self) -> Result<&(PointCloud, Vec<PointCloud>)> {
        if let Some(s) = self.spectra.get() {
            return Ok(s);
        }
        let seq = self.seq()?;
        let limit = spectrum_with(seq.limit(), &self.cfg)?;
        let members = seq.members()?;
        let clouds = members
            .par_iter()
            .map(|(n, m)| spectrum_with(m, &self.cfg).map_err(|e| Error::at_index(*n, e)))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.spectra.get_or_init(|| (limit, clouds)))
    }

    /// Gate shared by the convergence checkers.
    fn nu_gate(&self, report: &mut CheckReport, tail: Option<usize>) -> Result<bool> {
        let cl = self.classification(tail)?;
        if cl.class == ConvergenceClass::NotNu {
            return Ok(false);
        }
        report.certify(format!(
            "family is {} on n = {}..{} at tol {:e}",
            class_name(cl.class),
            cl.window.0,
            cl.window.1,
            cl.tol
        ));
        Ok(true)
    }
}

fn class_name(c: ConvergenceClass) -> &'static str {
    match c {
        ConvergenceClass::NormConvergent => "norm-convergent",
        ConvergenceClass::NuOnly => "nu-convergent (not in norm)",
        ConvergenceClass::NotNu => "not nu-convergent",
    }
}

/// Runs one checker. Errors that mean "hypothesis not certifiable" become
/// a `hypothesis-unmet` report; numerical breakdowns propagate.
pub fn run_checker(ctx: &Context, checker: &Checker) -> Result<CheckReport> {
    checker.validate()?;
    match dispatch(ctx, checker) {
        Ok(r) => Ok(r),
        Err(e) if e.is_hypothesis_like() => Ok(unmet(checker.name(), e.to_string())),
        Err(e) => Err(e),
    }
}

fn dispatch(ctx: &Context, checker: &Checker) -> Result<CheckReport> {
    use Checker::*;
    match checker {
        NuClassification { tol, tail, expect } => nu_classification(ctx, *tol, *tail, *expect),
        NuNonuniqueness { y } => nonuniqueness(y.as_ref()),
        UpperSemicontinuity { tol, tail } => upper_semicontinuity(ctx, *tol, *tail),
        CommutingCase { tol, tail } => commuting_case(ctx, *tol, *tail),
        ComponentPersistence { center, radius, gap } => component_persistence(ctx, *center, *radius, *gap),
        ApLimsup {
            grid,
            truncation,
            eps,
            set_eps,
            tail,
            exclusion_radius,
            tol,
        } => ap_limsup(ctx, grid, truncation, *eps, *set_eps, *tail, *exclusion_radius, *tol),
        IndexContinuity { path, limit, tail } => index_continuity(ctx, path, *limit, *tail),
        WeylContinuity { tol, tail } => weyl_continuity(ctx, *tol, *tail),
        RieszLiminf { tol, set_eps, tail } => riesz_liminf(ctx, *tol, *set_eps, *tail),
        IsoLiminf {
            tol,
            set_eps,
            tail,
            exclusion_radius,
            gap,
        } => iso_liminf(ctx, *tol, *set_eps, *tail, *exclusion_radius, *gap),
        SpectralProjection {
            contour,
            alt_contour,
            tol,
            closed_form_tol,
            corrupt,
        } => spectral_projection_check(ctx, contour, alt_contour.as_ref(), *tol, *closed_form_tol, *corrupt),
        ProjectorFamily { contour, tol, by_n } => projector_family(ctx, contour, *tol, *by_n),
        RadiusPerturbation { trials, dim } => radius_perturbation(ctx, trials.unwrap_or(100), dim.unwrap_or(4)),
        AluthgeSimilarity { trials, dim } => aluthge_similarity(ctx, trials.unwrap_or(50), dim.unwrap_or(6)),
        Hyponormal {
            trials,
            dim,
            p_values,
            shifts,
        } => hyponormal(ctx, trials.unwrap_or(50), dim.unwrap_or(6), p_values, shifts),
        ResolventIdentity { lambdas } => resolvent_identity(ctx, lambdas),
    }
}

fn nu_classification(
    ctx: &Context,
    tol: Option<f64>,
    tail: Option<usize>,
    expect: Option<ConvergenceClass>,
) -> Result<CheckReport> {
    let mut r = CheckReport::new("nu-classification");
    let diag = ctx.diagnostics()?;
    for row in &diag.rows {
        for (q, e) in [
            ("norm_tn", row.norm_tn),
            ("diff_norm", row.diff_norm),
            ("nu1", row.nu1),
            ("nu2", row.nu2),
        ] {
            r.push(row.n, q, e.upper);
            if !e.is_exact() {
                r.push(row.n, &format!("{q}_lower"), e.lower);
            }
        }
    }
    let cl = classify_convergence(diag, ctx.tol(tol, ctx.classification_tol), tail)?;
    let ok = match expect {
        Some(c) => cl.class == c,
        None => cl.class != ConvergenceClass::NotNu,
    };
    let detail = format!(
        "{} on n = {}..{} (tail max: diff {:e}, nu1 {:e}, nu2 {:e})",
        class_name(cl.class),
        cl.window.0,
        cl.window.1,
        cl.tail_max_diff,
        cl.tail_max_nu1,
        cl.tail_max_nu2
    );
    Ok(r.finish(ok, detail))
}

fn nonuniqueness(y: Option<&ComplexMatrix>) -> Result<CheckReport> {
    let mut r = CheckReport::new("nu-nonuniqueness");
    let demo = nu_nonuniqueness_demo(y)?;
    r.push(0, "nu1_to_x", demo.to_x.nu1);
    r.push(0, "nu2_to_x", demo.to_x.nu2);
    r.push(0, "nu1_to_y", demo.to_y.nu1);
    r.push(0, "nu2_to_y", demo.to_y.nu2);
    r.push(0, "limit_gap", demo.limit_gap);
    let detail = if demo.pass {
        format!("zero sequence nu-converges to 0 and to y with ||x - y|| = {}", demo.limit_gap)
    } else {
        format!("y is not a nu-limit: ||y^2|| = {:e}", demo.to_y.nu1)
    };
    Ok(r.finish(demo.pass, detail))
}

fn tail_values(series: &[f64], tail: Option<usize>) -> Result<&[f64]> {
    Ok(&series[tail_window(series.len(), tail)?])
}

/// Eigenvalue resolution of a finite matrix: spread of its eigenvalues
/// under a few unitary similarities, times ten.
fn eigen_noise_floor(a: &ComplexMatrix, seed: u64) -> Result<f64> {
    let base = PointCloud::new(eigenvalues(a)?.values)?;
    let mut rng = random::rng(seed, 0x4e4f_4953);
    let mut worst: f64 = 0.0;
    for _ in 0..3 {
        let u = random::unitary(&mut rng, a.rows())?;
        let b = &(&u * a) * &u.adjoint();
        let e = PointCloud::new(eigenvalues(&b)?.values)?;
        worst = worst.max(hausdorff_distance(&base, &e)?);
    }
    Ok(10.0 * worst.max(f64::EPSILON * operator_norm(a).max(1.0)))
}

fn nonincreasing(values: &[f64], slack: f64) -> bool {
    values.windows(2).all(|w| w[1] <= w[0] + slack)
}

fn upper_semicontinuity(ctx: &Context, tol: Option<f64>, tail: Option<usize>) -> Result<CheckReport> {
    let mut r = CheckReport::new("upper-semicontinuity");
    if !ctx.nu_gate(&mut r, tail)? {
        return Ok(unmet(r.checker.as_str(), "family is not nu-convergent on the tail window"));
    }
    let seq = ctx.seq()?;
    let (limit, clouds) = ctx.spectra()?;
    let d: Vec<f64> = clouds
        .iter()
        .zip(seq.indices())
        .map(|(c, n)| directed_distance(c, limit).map_err(|e| Error::at_index(n, e)))
        .collect::<Result<_>>()?;
    for (n, v) in seq.indices().zip(&d) {
        r.push(n, "directed_distance", *v);
    }
    let tol = ctx.tol(tol, 0.05);
    let t = tail_values(&d, tail)?;
    let worst = t.iter().copied().fold(0.0, f64::max);
    let floor = match seq.limit() {
        OperatorModel::FiniteMatrix { matrix } => eigen_noise_floor(matrix, ctx.seed)?,
        _ => 0.0,
    };
    let mono = nonincreasing(t, floor);
    r.push(0, "eigen_noise_floor", floor);
    r.push(0, "tail_nonincreasing", if mono { 1.0 } else { 0.0 });
    Ok(r.finish(
        worst <= tol,
        format!("tail max directed distance {worst:e} vs tol {tol:e}; tail nonincreasing up to {floor:e}: {mono}"),
    ))
}

/// `0 in acc sigma(T)` for a diagonal model, read off its tail rule.
fn zero_accumulates(tail: &TailRule) -> Option<String> {
    match *tail {
        TailRule::Harmonic { scale } if scale != ZERO => Some(format!(
            "0 is an accumulation point of sigma(T): entries {scale}/(j+1) are distinct and tend to 0"
        )),
        TailRule::Geometric { c, ratio } if c != ZERO && ratio != 0.0 && ratio.abs() < 1.0 => Some(format!(
            "0 is an accumulation point of sigma(T): entries {c} * {ratio}^j are distinct and tend to 0"
        )),
        _ => None,
    }
}

fn commuting_case(ctx: &Context, tol: Option<f64>, tail: Option<usize>) -> Result<CheckReport> {
    let name = "commuting-case";
    let mut r = CheckReport::new(name);
    let seq = ctx.seq()?;
    let OperatorModel::Diagonal { tail: rule, .. } = seq.limit() else {
        let why = if seq.limit().dim().is_some() {
            "finite-dimensional limit: its spectrum has no accumulation points"
        } else {
            "commutation and 0 in acc sigma(T) are certified only for diagonal models"
        };
        return Ok(unmet(name, why));
    };
    for (n, m) in seq.members()? {
        if !matches!(m, OperatorModel::Diagonal { .. }) {
            return Ok(unmet(name, format!("member n = {n} is not diagonal, commutation uncertified")));
        }
    }
    r.certify("diagonal models commute with each other");
    let Some(acc) = zero_accumulates(rule) else {
        return Ok(unmet(name, "tail rule does not accumulate at 0"));
    };
    r.certify(acc);
    if !ctx.nu_gate(&mut r, tail)? {
        return Ok(unmet(name, "family is not nu-convergent on the tail window"));
    }
    let (limit, clouds) = ctx.spectra()?;
    let h: Vec<f64> = clouds
        .iter()
        .map(|c| hausdorff_distance(c, limit))
        .collect::<Result<_>>()?;
    for (n, v) in seq.indices().zip(&h) {
        r.push(n, "hausdorff_distance", *v);
    }
    let tol = ctx.tol(tol, 0.05);
    let t = tail_values(&h, tail)?;
    Ok(r.finish(
        tends_to_zero(t, tol),
        format!(
            "tail Hausdorff distances from {:e} to {:e} vs tol {tol:e}",
            t[0],
            t[t.len() - 1]
        ),
    ))
}

fn component_persistence(ctx: &Context, center: C64, radius: f64, gap: Option<f64>) -> Result<CheckReport> {
    let name = "component-persistence";
    let mut r = CheckReport::new(name);
    let seq = ctx.seq()?;
    let gap = gap.unwrap_or(ctx.cfg.gap());
    let inside = |c: &PointCloud| c.points().iter().all(|z| (z - center).norm() < radius);
    let (limit, clouds) = ctx.spectra()?;
    if !cluster_components(limit, gap).iter().any(inside) {
        return Ok(unmet(name, format!("no component of sigma(T) lies in B({center}, {radius})")));
    }
    r.certify(format!("0 lies outside U = B({center}, {radius})"));
    r.certify("a cluster of sigma(T) lies inside U");
    let holds: Vec<bool> = clouds
        .iter()
        .map(|c| cluster_components(c, gap).iter().any(inside))
        .collect();
    for (n, h) in seq.indices().zip(&holds) {
        r.push(n, "component_inside", if *h { 1.0 } else { 0.0 });
    }
    let tail_ok = holds.iter().rev().take_while(|h| **h).count();
    if tail_ok == 0 {
        return Ok(r.finish(false, "no component of sigma(T_n) inside U at the last index"));
    }
    let n0 = seq.n_range().1 + 1 - tail_ok;
    r.push(0, "n0", n0 as f64);
    Ok(r.finish(true, format!("a component of sigma(T_n) lies in U for all tested n >= {n0}")))
}

/// Fredholmness of the limit at 0, certified per model class.
fn fredholm_at_zero(model: &OperatorModel, cfg: &SpectralConfig) -> Result<Option<String>> {
    if model.dim().is_some() {
        return Ok(Some("finite-dimensional operators are Fredholm".into()));
    }
    if let OperatorModel::Diagonal { tail, .. } = model {
        let l = tail.limit();
        return Ok((l != ZERO).then(|| format!("diagonal entries tend to {l} != 0, so T is Fredholm")));
    }
    if model.toeplitz_form().is_some() {
        return Ok(fredholm_index(model, ZERO, cfg)?
            .map(|i| format!("0 is off the symbol curve (index {i}), so T is Fredholm")));
    }
    Ok(None)
}

#[allow(clippy::too_many_arguments)]
fn ap_limsup(
    ctx: &Context,
    grid: &Option<GridSpec>,
    truncation: &Option<TruncationSpec>,
    eps: f64,
    set_eps: Option<f64>,
    tail: Option<usize>,
    exclusion_radius: Option<f64>,
    tol: Option<f64>,
) -> Result<CheckReport> {
    let name = "ap-limsup";
    let mut r = CheckReport::new(name);
    let seq = ctx.seq()?;
    let Some(cert) = fredholm_at_zero(seq.limit(), &ctx.cfg)? else {
        return Ok(unmet(name, "limit is not certified Fredholm"));
    };
    r.certify(cert);
    let spec = truncation
        .or(ctx.truncation)
        .ok_or_else(|| Error::Contract("ap-limsup needs a truncation".into()))?;
    let grid = grid.unwrap_or_else(|| GridSpec::square(1.5, ctx.cfg.grid_step));
    let step = grid.step;
    let points = grid.points();
    let w = tail_window(seq.len(), tail)?;
    let members = seq.members()?;
    let tail_members = &members[w];
    // equal consecutive members (constant families) share one grid sweep
    let mut clouds: Vec<PointCloud> = Vec::with_capacity(tail_members.len());
    for (k, (n, m)) in tail_members.iter().enumerate() {
        let cloud = match clouds.last() {
            Some(prev) if tail_members[k - 1].1 == *m => prev.clone(),
            _ => ap_spectrum_grid(m, &points, spec, eps).map_err(|e| Error::at_index(*n, e))?,
        };
        clouds.push(cloud);
    }
    for ((n, _), c) in tail_members.iter().zip(&clouds) {
        r.push(*n, "ap_grid_points", c.len() as f64);
    }
    let a_inf = limsup_estimate(&CloudSequence::new(clouds)?, set_eps.unwrap_or(0.25 * step), 1)?;
    let excl = exclusion_radius.unwrap_or(0.1);
    let a_inf = a_inf.filter(|z| z.norm() >= excl);
    r.push(0, "limsup_points", a_inf.len() as f64);
    if a_inf.is_empty() {
        return Ok(r.finish(false, "lim sup estimate is empty outside the exclusion disk (vacuous)"));
    }
    let target = ap_spectrum_oracle(seq.limit(), &ctx.cfg)?;
    let d = directed_distance(&a_inf, &target)?;
    r.push(0, "directed_distance", d);
    let tol = ctx.tol(tol, 0.05);
    Ok(r.finish(
        d <= tol,
        format!("d(lim sup sigma_ap(T_n) minus B(0, {excl}), sigma_ap(T)) = {d:e} vs tol {tol:e}"),
    ))
}

fn index_continuity(ctx: &Context, path: &LambdaPath, limit: Option<C64>, tail: Option<usize>) -> Result<CheckReport> {
    let name = "index-continuity";
    let mut r = CheckReport::new(name);
    let seq = ctx.seq()?;
    let members = seq.members()?;
    if seq.limit().toeplitz_form().is_none() || members.iter().any(|(_, m)| m.toeplitz_form().is_none()) {
        return Ok(unmet(name, "index oracle needs Toeplitz-class models"));
    }
    r.certify("winding-number index oracle applies to every member");
    let diag = ctx.diagnostics()?;
    let nu1: Vec<f64> = diag.rows.iter().map(|x| x.nu1.upper).collect();
    let gate = ctx.classification_tol * ctx.tol_scale;
    if !tends_to_zero(tail_values(&nu1, tail)?, gate) {
        return Ok(unmet(name, format!("||(T_n - T) T|| is not below {gate:e} on the tail")));
    }
    r.certify(format!("||(T_n - T) T|| <= {gate:e} on the tail window"));
    let lambda = limit.unwrap_or(path.base);
    let target = fredholm_index(seq.limit(), lambda, &ctx.cfg)?.ok_or(Error::UndefinedIndex { n: 0, lambda })?;
    let idx = members
        .par_iter()
        .map(|(n, m)| {
            let l = path.at(*n);
            fredholm_index(m, l, &ctx.cfg)?.ok_or(Error::UndefinedIndex { n: *n, lambda: l })
        })
        .collect::<Result<Vec<i64>>>()?;
    for ((n, _), i) in members.iter().zip(&idx) {
        r.push(*n, "index", *i as f64);
    }
    r.push(0, "limit_index", target as f64);
    let t = &idx[tail_window(idx.len(), tail)?];
    let ok = t.iter().all(|&i| i == target);
    Ok(r.finish(
        ok,
        format!("tail indices {:?}, limit index {target}", t.iter().collect::<std::collections::BTreeSet<_>>()),
    ))
}

fn weyl_continuity(ctx: &Context, tol: Option<f64>, tail: Option<usize>) -> Result<CheckReport> {
    let name = "weyl-continuity";
    let mut r = CheckReport::new(name);
    let seq = ctx.seq()?;
    let members = seq.members()?;
    if seq.limit().toeplitz_form().is_none() || members.iter().any(|(_, m)| m.toeplitz_form().is_none()) {
        return Ok(unmet(name, "members must be Toeplitz-class models"));
    }
    r.certify("Toeplitz operators with continuous symbol are essentially normal, hence essentially G1");
    match fredholm_index(seq.limit(), ZERO, &ctx.cfg)? {
        Some(i) => r.certify(format!("limit is Fredholm at 0 (index {i})")),
        None => r.certify("0 lies on the symbol curve, a continuum inside sigma_w(T), so 0 is in acc sigma_w(T)"),
    }
    if !ctx.nu_gate(&mut r, tail)? {
        return Ok(unmet(name, "family is not nu-convergent on the tail window"));
    }
    let (_, w_limit) = essential_and_weyl(seq.limit(), &ctx.cfg)?;
    let h = members
        .par_iter()
        .map(|(n, m)| {
            let (_, w) = essential_and_weyl(m, &ctx.cfg)?;
            hausdorff_distance(&w, &w_limit).map_err(|e| Error::at_index(*n, e))
        })
        .collect::<Result<Vec<f64>>>()?;
    for ((n, _), v) in members.iter().zip(&h) {
        r.push(*n, "hausdorff_distance", *v);
    }
    let tol = ctx.tol(tol, 0.05);
    let t = tail_values(&h, tail)?;
    Ok(r.finish(
        tends_to_zero(t, tol),
        format!(
            "tail Hausdorff distances of sigma_w from {:e} to {:e} vs tol {tol:e}",
            t[0],
            t[t.len() - 1]
        ),
    ))
}

fn liminf_of(clouds: &[PointCloud], set_eps: f64) -> Result<PointCloud> {
    liminf_estimate(&CloudSequence::new(clouds.to_vec())?, set_eps, 1)
}

fn riesz_liminf(ctx: &Context, tol: Option<f64>, set_eps: Option<f64>, tail: Option<usize>) -> Result<CheckReport> {
    let name = "riesz-liminf";
    let mut r = CheckReport::new(name);
    if !ctx.nu_gate(&mut r, tail)? {
        return Ok(unmet(name, "family is not nu-convergent on the tail window"));
    }
    let seq = ctx.seq()?;
    let members = seq.members()?;
    let w = tail_window(members.len(), tail)?;
    let pi0 = riesz_points(seq.limit(), &ctx.cfg)?;
    let clouds = members[w.clone()]
        .par_iter()
        .map(|(n, m)| riesz_points(m, &ctx.cfg).map_err(|e| Error::at_index(*n, e)))
        .collect::<Result<Vec<_>>>()?;
    for ((n, _), c) in members[w].iter().zip(&clouds) {
        r.push(*n, "riesz_points", c.len() as f64);
    }
    r.push(0, "limit_riesz_points", pi0.len() as f64);
    if pi0.is_empty() {
        return Ok(r.finish(true, "pi_0(T) is empty; the inclusion holds trivially"));
    }
    let lim = liminf_of(&clouds, set_eps.unwrap_or(0.25 * ctx.cfg.grid_step))?;
    if lim.is_empty() {
        return Ok(r.finish(false, "lim inf of pi_0(T_n) is empty while pi_0(T) is not"));
    }
    let d = directed_distance(&pi0, &lim)?;
    r.push(0, "directed_distance", d);
    let tol = ctx.tol(tol, 0.05);
    Ok(r.finish(d <= tol, format!("d(pi_0(T), lim inf pi_0(T_n)) = {d:e} vs tol {tol:e}")))
}

fn iso_liminf(
    ctx: &Context,
    tol: Option<f64>,
    set_eps: Option<f64>,
    tail: Option<usize>,
    exclusion_radius: Option<f64>,
    gap: Option<f64>,
) -> Result<CheckReport> {
    let mut r = CheckReport::new("iso-liminf");
    let seq = ctx.seq()?;
    let (limit, clouds) = ctx.spectra()?;
    let excl = exclusion_radius.unwrap_or(0.1);
    let iso = isolated_points(limit, gap.unwrap_or(ctx.cfg.gap())).filter(|z| z.norm() >= excl);
    for z in iso.points() {
        r.push(0, "iso_re", z.re);
        r.push(0, "iso_im", z.im);
    }
    if iso.is_empty() {
        return Ok(r.finish(true, "no isolated points outside the exclusion disk; the inclusion holds trivially"));
    }
    let w = tail_window(seq.len(), tail)?;
    let lim = liminf_of(&clouds[w], set_eps.unwrap_or(0.25 * ctx.cfg.grid_step))?;
    if lim.is_empty() {
        return Ok(r.finish(false, "lim inf of sigma(T_n) is empty while iso sigma(T) is not"));
    }
    let d = directed_distance(&iso, &lim)?;
    r.push(0, "directed_distance", d);
    let tol = ctx.tol(tol, 0.05);
    Ok(r.finish(
        d <= tol,
        format!("d(iso sigma(T) minus B(0, {excl}), lim inf sigma(T_n)) = {d:e} vs tol {tol:e}"),
    ))
}

fn finite_limit<'a>(ctx: &'a Context, name: &str) -> std::result::Result<&'a ComplexMatrix, CheckReport> {
    match ctx.seq.as_ref().map(|s| s.limit()) {
        Some(OperatorModel::FiniteMatrix { matrix }) => Ok(matrix),
        _ => Err(unmet(name, "needs a finite-matrix limit")),
    }
}

/// Eigenvalues grouped into clusters of diameter below `tol`, each given
/// by its mean and multiplicity.
fn eigen_clusters(values: &[C64], tol: f64) -> Vec<(C64, usize)> {
    let cloud = PointCloud::new(values.to_vec()).expect("finite eigenvalues");
    cluster_components(&cloud, tol)
        .into_iter()
        .map(|c| {
            let k = c.len();
            (c.points().iter().sum::<C64>() / k as f64, k)
        })
        .collect()
}

/// Sylvester's formula `sum_{l inside} prod_{m != l} (a - m)/(l - m)`
/// over distinct eigenvalues; valid when `a` is diagonalizable, which is
/// checked through the minimal polynomial. `None` otherwise.
fn closed_form_projection(a: &ComplexMatrix, c: &CauchyContour) -> Result<Option<ComplexMatrix>> {
    let n = a.rows();
    let scale = operator_norm(a).max(1.0);
    let eig = eigenvalues(a)?.values;
    let groups = eigen_clusters(&eig, 1e-6 * scale);
    let mut minpoly = ComplexMatrix::identity(n);
    for (mu, _) in &groups {
        minpoly = &minpoly * &a.shifted(*mu);
    }
    if operator_norm(&minpoly) > 1e-8 * scale.powi(groups.len() as i32) {
        return Ok(None);
    }
    let mut p = ComplexMatrix::zeros(n, n);
    for (l, _) in groups.iter().filter(|(l, _)| c.index_of(*l).unwrap_or(0) != 0) {
        let mut term = ComplexMatrix::identity(n);
        for (m, _) in groups.iter().filter(|(m, _)| m != l) {
            term = (&term * &a.shifted(*m)).scale(ONE / (l - m));
        }
        p = &p + &term;
    }
    Ok(Some(p))
}

fn spectral_projection_check(
    ctx: &Context,
    contour: &CauchyContour,
    alt: Option<&CauchyContour>,
    tol: Option<f64>,
    closed_tol: Option<f64>,
    corrupt: Option<f64>,
) -> Result<CheckReport> {
    let name = "spectral-projection";
    let a = match finite_limit(ctx, name) {
        Ok(a) => a,
        Err(r) => return Ok(r),
    };
    let mut r = CheckReport::new(name);
    let tol = ctx.tol(tol, 1e-9);
    let closed_tol = ctx.tol(closed_tol, 1e-8);
    let mut rep = spectral_projection(a, contour)?;
    r.certify(format!(
        "contour lies in the resolvent set (min s_min(a - z) = {:e})",
        rep.min_resolvent_margin.unwrap_or(f64::INFINITY)
    ));
    if let Some(x) = corrupt {
        let mut p = rep.p.clone();
        let col = 1.min(p.cols() - 1);
        p[(0, col)] += C64::new(x, 0.0);
        rep = projection_report(a, p)?;
    }
    let v = verify_projection(&rep, tol);
    r.push(0, "idempotency_defect", rep.idempotency_defect);
    r.push(0, "commutation_defect", rep.commutation_defect);
    r.push(0, "trace_defect", rep.trace_defect);
    r.push(0, "riesz_count", rep.riesz_count as f64);
    let eig = eigenvalues(a)?.values;
    let expected = eig.iter().filter(|z| contour.index_of(**z).unwrap_or(0) != 0).count();
    r.push(0, "enclosed_eigenvalues", expected as f64);
    let mut ok = v.pass && rep.riesz_count == expected;
    let mut notes = vec![v.detail.clone()];
    if rep.riesz_count != expected {
        notes.push(format!("riesz_count {} but {expected} eigenvalues enclosed", rep.riesz_count));
    }
    match closed_form_projection(a, contour)? {
        Some(pc) => {
            let dev = operator_norm(&(&rep.p - &pc));
            r.push(0, "closed_form_deviation", dev);
            ok &= dev <= closed_tol;
            notes.push(format!("closed-form deviation {dev:e}"));
        }
        None => notes.push("matrix not diagonalizable: closed-form comparison skipped".into()),
    }
    if let Some(c2) = alt {
        let p2 = spectral_projection(a, c2)?.p;
        let dev = operator_norm(&(&rep.p - &p2));
        r.push(0, "contour_independence", dev);
        ok &= dev <= closed_tol;
        notes.push(format!("second contour deviation {dev:e}"));
    }
    Ok(r.finish(ok, notes.join("; ")))
}

fn projector_family(ctx: &Context, contour: &CauchyContour, tol: Option<f64>, by_n: Option<usize>) -> Result<CheckReport> {
    let name = "projector-family";
    let mut r = CheckReport::new(name);
    let Some((a, members)) = ctx.seq()?.finite_members()? else {
        return Ok(unmet(name, "needs finite-matrix members and limit"));
    };
    let first = ctx.seq()?.n_range().0;
    let rep = projector_family_convergence(&a, &members, contour)?;
    r.certify("0 lies in the exterior of the contour");
    let diag = ctx.diagnostics()?;
    let worst_nu = diag.rows.iter().map(|x| x.nu1.upper.max(x.nu2.upper)).fold(0.0, f64::max);
    r.push(0, "max_nu_diagnostic", worst_nu);
    let tol = ctx.tol(tol, 1e-8);
    let by_n = by_n.unwrap_or(30);
    let mut ok = true;
    for (k, row) in rep.rows.iter().enumerate() {
        let n = first + k;
        if let (Some(dp), Some(dpn)) = (row.defect_p, row.defect_pn) {
            r.push(n, "defect_p", dp);
            r.push(n, "defect_pn", dpn);
        }
        if n >= by_n {
            ok &= row.admissible && row.defect_p.is_some_and(|x| x <= tol) && row.defect_pn.is_some_and(|x| x <= tol);
        }
    }
    let n0 = rep.n0.map(|k| first + k - 1);
    if let Some(n0) = n0 {
        r.push(0, "n0", n0 as f64);
    }
    Ok(r.finish(
        ok,
        format!(
            "defects below {tol:e} for n >= {by_n}: {ok}; contour admissible for n >= {}",
            n0.map_or("never".to_string(), |x| x.to_string())
        ),
    ))
}

fn radius_perturbation(ctx: &Context, trials: usize, dim: usize) -> Result<CheckReport> {
    let mut r = CheckReport::new("radius-perturbation");
    if dim < 1 {
        return Err(Error::Domain("dim must be at least 1".into()));
    }
    let rows = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<(f64, RadiusOutcome, f64)> {
            let mut rng = random::rng(ctx.seed, SALT_RADIUS + t as u64);
            let rank = rng.gen_range(1..=dim);
            let p = random::idempotent(&mut rng, dim, rank, 10.0)?;
            let delta = random::matrix(&mut rng, dim, dim);
            let rho = eigenvalues(&delta)?.max_modulus();
            let target = rng.gen_range(0.05..0.95);
            let q = &p - &delta.scale_real(target / rho);
            let v = nonzero_under_radius_perturbation(&p, &q)?;
            let v0 = nonzero_under_radius_perturbation(&p, &ComplexMatrix::zeros(dim, dim))?;
            Ok((v.radius, v.outcome, v0.radius))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut certified = 0;
    let mut q0_ok = 0;
    for (t, (radius, outcome, r0)) in rows.iter().enumerate() {
        r.push(t, "radius", *radius);
        r.push(t, "radius_q_zero", *r0);
        certified += usize::from(*outcome == RadiusOutcome::Certified);
        q0_ok += usize::from(*r0 >= 1.0 - 1e-8);
    }
    Ok(r.finish(
        certified == trials && q0_ok == trials,
        format!("{certified}/{trials} certified q != 0; {q0_ok}/{trials} report r(p) >= 1 - 1e-8 for q = 0"),
    ))
}

fn aluthge_similarity(ctx: &Context, trials: usize, dim: usize) -> Result<CheckReport> {
    let mut r = CheckReport::new("aluthge-similarity");
    if dim < 2 {
        return Err(Error::Domain("dim must be at least 2".into()));
    }
    let rows = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<(f64, f64)> {
            let mut rng = random::rng(ctx.seed, SALT_ALUTHGE + t as u64);
            let k = rng.gen_range(1..=(dim / 3).max(1));
            let m = random::with_kernel(&mut rng, dim, k)?;
            let rep = thmd_similarity(&m)?;
            Ok((rep.reconstruction_defect, rep.spectrum_distance))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut ok = 0;
    for (t, (rec, dist)) in rows.iter().enumerate() {
        r.push(t, "reconstruction_defect", *rec);
        r.push(t, "spectrum_distance", *dist);
        ok += usize::from(*rec <= 1e-9 * ctx.tol_scale && *dist <= 1e-6 * ctx.tol_scale);
    }
    Ok(r.finish(
        ok == trials,
        format!("{ok}/{trials} kernel-bearing matrices: reconstruction <= 1e-9 and spectra within 1e-6"),
    ))
}

fn hyponormal(ctx: &Context, trials: usize, dim: usize, p_values: &[f64], shifts: &[ShiftCase]) -> Result<CheckReport> {
    let mut r = CheckReport::new("hyponormal");
    if dim < 1 {
        return Err(Error::Domain("dim must be at least 1".into()));
    }
    let tol = 1e-8 * ctx.tol_scale;
    let rows = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<(Vec<f64>, f64, bool)> {
            let mut rng = random::rng(ctx.seed, SALT_HYPO + t as u64);
            let a = random::matrix(&mut rng, dim, dim);
            let traces = p_values
                .iter()
                .map(|&p| is_p_hyponormal(&a, p, tol).map(|v| v.trace_defect))
                .collect::<Result<Vec<_>>>()?;
            // a normal matrix with a kernel: its double Aluthge transform
            // must stay hyponormal
            let mut vals: Vec<C64> = (0..dim).map(|_| random::complex(&mut rng)).collect();
            vals[0] = ZERO;
            let nrm = random::normal(&mut rng, &vals)?;
            let twice = aluthge(&aluthge(&nrm)?)?;
            let v = is_p_hyponormal(&twice, 1.0, tol)?;
            let random_fails = !is_p_hyponormal(&a, 1.0, tol)?.pass;
            Ok((traces, v.defect, random_fails))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut ok = true;
    let mut non_normal = 0;
    for (t, (traces, defect, fails)) in rows.iter().enumerate() {
        for (p, tr) in p_values.iter().zip(traces) {
            r.push(t, &format!("trace_defect_p{p}"), *tr);
            ok &= *tr <= tol;
        }
        r.push(t, "double_aluthge_defect", *defect);
        ok &= *defect <= tol;
        non_normal += usize::from(*fails);
    }
    let mut shift_notes = Vec::new();
    for (k, case) in shifts.iter().enumerate() {
        let v = shift_hyponormality(&case.model)?;
        r.push(k, "shift_hyponormal", if v.pass { 1.0 } else { 0.0 });
        ok &= v.pass == case.hyponormal;
        shift_notes.push(format!("shift {k}: {}", if v.pass { "hyponormal" } else { "not hyponormal" }));
    }
    let mut detail = format!(
        "trace obstruction and double Aluthge defects within {tol:e}: {ok}; {non_normal}/{trials} random matrices fail 1-hyponormality"
    );
    if !shift_notes.is_empty() {
        detail.push_str("; ");
        detail.push_str(&shift_notes.join(", "));
    }
    Ok(r.finish(ok, detail))
}

fn resolvent_identity(ctx: &Context, lambdas: &[C64]) -> Result<CheckReport> {
    let name = "resolvent-identity";
    let s = match finite_limit(ctx, name) {
        Ok(a) => a,
        Err(r) => return Ok(r),
    };
    let mut r = CheckReport::new(name);
    let rep = hyponormal_resolvent_identity_check(s, lambdas)?;
    r.push(0, "hyponormal_defect", rep.hyponormal_defect);
    for (k, row) in rep.rows.iter().enumerate() {
        r.push(k, "distance", row.distance);
        if let Some(d) = row.deviation {
            r.push(k, "deviation", d);
        }
    }
    match rep.verdict {
        IdentityVerdict::NotApplicable => Ok(unmet(name, "limit is not hyponormal")),
        v => {
            r.certify(format!("limit is hyponormal (defect {:e})", rep.hyponormal_defect));
            let skipped = rep.rows.iter().filter(|x| x.skipped).count();
            Ok(r.finish(
                v == IdentityVerdict::Pass,
                format!("resolvent norm equals 1/d(lambda, sigma) at {} points ({skipped} skipped)", rep.rows.len() - skipped),
            ))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::{FamilySpec, Rate};
    use super::*;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn ctx(spec: FamilySpec, n: (usize, usize)) -> Context {
        Context::new(Some(OperatorSequence::from_spec(&spec, n, 7).unwrap()), 7)
    }

    fn diag_family() -> FamilySpec {
        let d = OperatorModel::diagonal(vec![], TailRule::harmonic(1.0));
        FamilySpec::Perturbation {
            limit: d.clone(),
            direction: d,
            rate: Rate::Harmonic { scale: 1.0 },
        }
    }

    #[test]
    fn names_are_registered() {
        let j = r#"{"checker":"upper-semicontinuity"}"#;
        let ch: Checker = serde_json::from_str(j).unwrap();
        assert_eq!(ch.name(), "upper-semicontinuity");
        assert!(CHECKER_NAMES.contains(&ch.name()));
        assert!(serde_json::from_str::<Checker>(r#"{"checker":"foo"}"#).is_err());
        assert!(serde_json::from_str::<Checker>(r#"{"checker":"hyponormal","bogus":1}"#).is_err());
    }

    #[test]
    fn commuting_diagonal_exact() {
        let mut cx = ctx(diag_family(), (1, 64));
        cx.classification_tol = 0.05;
        let rep = run_checker(&cx, &Checker::CommutingCase { tol: None, tail: None }).unwrap();
        assert_eq!(rep.verdict, Verdict::Pass, "{}", rep.detail);
        assert_eq!(rep.certificates.len(), 3);
        for (n, h) in rep.series("hausdorff_distance") {
            assert!((h - 1.0 / n as f64).abs() < 1e-12, "n={n} h={h}");
        }
    }

    #[test]
    fn commuting_finite_is_unmet() {
        let t = OperatorModel::finite(ComplexMatrix::real_diag(&[1.0, 2.0]));
        let cx = ctx(FamilySpec::Constant { limit: t }, (1, 16));
        let rep = run_checker(&cx, &Checker::CommutingCase { tol: None, tail: None }).unwrap();
        assert_eq!(rep.verdict, Verdict::HypothesisUnmet);
    }

    #[test]
    fn upper_semicontinuity_diagonal() {
        let mut cx = ctx(diag_family(), (1, 64));
        cx.classification_tol = 0.05;
        let rep = run_checker(&cx, &Checker::UpperSemicontinuity { tol: None, tail: None }).unwrap();
        assert_eq!(rep.verdict, Verdict::Pass);
        for (n, d) in rep.series("directed_distance") {
            assert!((d - 1.0 / n as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn nilpotent_upper_semicontinuity() {
        let spec = FamilySpec::Fixed {
            limit: OperatorModel::finite(ComplexMatrix::zeros(2, 2)),
            member: OperatorModel::finite(super::super::nilpotent_n()),
        };
        let cx = ctx(spec, (1, 64));
        let rep = run_checker(&cx, &Checker::UpperSemicontinuity { tol: None, tail: None }).unwrap();
        assert_eq!(rep.verdict, Verdict::Pass);
        assert!(rep.series("directed_distance").iter().all(|x| x.1 == 0.0));
    }

    #[test]
    fn component_persistence_first_index() {
        let spec = FamilySpec::Perturbation {
            limit: OperatorModel::finite(ComplexMatrix::real_diag(&[1.0, 5.0])),
            direction: OperatorModel::finite(ComplexMatrix::real_diag(&[1.0, 0.0])),
            rate: Rate::Harmonic { scale: 1.0 },
        };
        let cx = ctx(spec, (1, 64));
        let ch = Checker::ComponentPersistence {
            center: c(1.0),
            radius: 0.5,
            gap: None,
        };
        let rep = run_checker(&cx, &ch).unwrap();
        assert_eq!(rep.verdict, Verdict::Pass);
        // 1 + 1/n < 1.5 from n = 3 on
        assert_eq!(rep.series("n0"), vec![(0, 3.0)]);

        let moved = FamilySpec::Fixed {
            limit: OperatorModel::finite(ComplexMatrix::real_diag(&[1.0, 5.0])),
            member: OperatorModel::finite(ComplexMatrix::real_diag(&[2.0, 5.0])),
        };
        let rep = run_checker(&ctx(moved, (1, 16)), &ch).unwrap();
        assert_eq!(rep.verdict, Verdict::Fail);

        let bad = Checker::ComponentPersistence {
            center: c(0.2),
            radius: 0.5,
            gap: None,
        };
        assert!(run_checker(&cx, &bad).is_err());
    }

    #[test]
    fn index_continuity_examples() {
        let s = OperatorModel::shift(vec![], TailRule::constant(1.0));
        let spec = FamilySpec::Perturbation {
            limit: s.clone(),
            direction: s,
            rate: Rate::Harmonic { scale: 1.0 },
        };
        let mut cx = ctx(spec, (1, 64));
        cx.classification_tol = 0.05;
        let ch = Checker::IndexContinuity {
            path: LambdaPath {
                base: c(0.5),
                step: C64::new(0.0, 1.0),
            },
            limit: None,
            tail: None,
        };
        let rep = run_checker(&cx, &ch).unwrap();
        assert_eq!(rep.verdict, Verdict::Pass, "{}", rep.detail);
        assert!(rep.series("index").iter().all(|x| x.1 == -1.0));

        let out = Checker::IndexContinuity {
            path: LambdaPath { base: c(2.0), step: c(1.0) },
            limit: None,
            tail: None,
        };
        let rep = run_checker(&cx, &out).unwrap();
        assert_eq!(rep.verdict, Verdict::Pass);
        assert!(rep.series("index").iter().all(|x| x.1 == 0.0));

        // lambda_1 = 2 sits on the first symbol curve
        let on = Checker::IndexContinuity {
            path: LambdaPath { base: c(1.0), step: c(1.0) },
            limit: Some(c(0.5)),
            tail: None,
        };
        assert_eq!(run_checker(&cx, &on).unwrap().verdict, Verdict::HypothesisUnmet);
    }

    #[test]
    fn weyl_alternating_is_gated() {
        let z = OperatorModel::toeplitz([(1, c(1.0))]);
        let spec = FamilySpec::Alternating {
            limit: z.clone(),
            even: z,
            odd: OperatorModel::toeplitz([(2, c(1.0))]),
        };
        let rep = run_checker(&ctx(spec, (1, 16)), &Checker::WeylContinuity { tol: None, tail: None }).unwrap();
        assert_eq!(rep.verdict, Verdict::HypothesisUnmet);
    }

    #[test]
    fn ap_limsup_negative_control() {
        let t = OperatorModel::toeplitz([(0, c(1.0)), (1, c(1.0))]);
        let cx = ctx(FamilySpec::Constant { limit: t }, (1, 16));
        let ch = Checker::ApLimsup {
            grid: None,
            truncation: Some(TruncationSpec::rectangular(50, 1)),
            eps: 0.03,
            set_eps: None,
            tail: None,
            exclusion_radius: None,
            tol: None,
        };
        assert_eq!(run_checker(&cx, &ch).unwrap().verdict, Verdict::HypothesisUnmet);
    }

    #[test]
    fn riesz_and_iso_liminf() {
        let n = ComplexMatrix::from_fn(3, 3, |i, j| if (i, j) == (1, 0) { ONE } else { ZERO });
        let spec = FamilySpec::Perturbation {
            limit: OperatorModel::finite(ComplexMatrix::real_diag(&[0.0, 1.0, 5.0])),
            direction: OperatorModel::finite(n),
            rate: Rate::Harmonic { scale: 1.0 },
        };
        let mut cx = ctx(spec, (1, 64));
        cx.classification_tol = 0.05;
        let iso = Checker::IsoLiminf {
            tol: None,
            set_eps: None,
            tail: None,
            exclusion_radius: None,
            gap: None,
        };
        let rep = run_checker(&cx, &iso).unwrap();
        assert_eq!(rep.verdict, Verdict::Pass, "{}", rep.detail);
        assert_eq!(rep.series("iso_re").len(), 2);
        let rz = Checker::RieszLiminf {
            tol: None,
            set_eps: None,
            tail: None,
        };
        assert_eq!(run_checker(&cx, &rz).unwrap().verdict, Verdict::Pass);
    }

    #[test]
    fn spectral_projection_and_corruption() {
        let spec = FamilySpec::ConjugatedDiagonal {
            eigenvalues: vec![c(1.0), c(5.0), c(5.0)],
            direction: None,
            rate: Rate::Constant { value: 0.0 },
            cond_max: 50.0,
        };
        let cx = ctx(spec, (1, 8));
        let contour = CauchyContour::circle(c(1.0), 2.0, 128).unwrap();
        let alt = CauchyContour::circle(c(0.5), 1.5, 128).unwrap();
        let ch = Checker::SpectralProjection {
            contour: contour.clone(),
            alt_contour: Some(alt),
            tol: None,
            closed_form_tol: None,
            corrupt: None,
        };
        let rep = run_checker(&cx, &ch).unwrap();
        assert_eq!(rep.verdict, Verdict::Pass, "{}", rep.detail);
        assert_eq!(rep.series("riesz_count"), vec![(0, 1.0)]);
        let bad = Checker::SpectralProjection {
            contour,
            alt_contour: None,
            tol: None,
            closed_form_tol: None,
            corrupt: Some(1e-3),
        };
        assert_eq!(run_checker(&cx, &bad).unwrap().verdict, Verdict::Fail);
    }

    #[test]
    fn projector_family_vanishing_diagnostics() {
        let e = ComplexMatrix::from_fn(3, 3, |i, j| if (i, j) == (1, 0) { ONE } else { ZERO });
        let spec = FamilySpec::ConjugatedDiagonal {
            eigenvalues: vec![c(0.0), c(1.0), c(5.0)],
            direction: Some(e),
            rate: Rate::Geometric { ratio: 0.5, scale: 1.0 },
            cond_max: 20.0,
        };
        let cx = ctx(spec, (1, 40));
        let ch = Checker::ProjectorFamily {
            contour: CauchyContour::circle(c(1.0), 0.5, 128).unwrap(),
            tol: None,
            by_n: None,
        };
        let rep = run_checker(&cx, &ch).unwrap();
        assert_eq!(rep.verdict, Verdict::Pass, "{}", rep.detail);
        assert_eq!(rep.series("n0"), vec![(0, 1.0)]);
    }

    #[test]
    fn randomized_checkers_pass() {
        let cx = Context::new(None, 11);
        for ch in [
            Checker::RadiusPerturbation { trials: Some(20), dim: None },
            Checker::AluthgeSimilarity { trials: Some(10), dim: None },
            Checker::Hyponormal {
                trials: Some(10),
                dim: None,
                p_values: default_p_values(),
                shifts: vec![
                    ShiftCase {
                        model: OperatorModel::shift(vec![0.5], TailRule::constant(1.0)),
                        hyponormal: true,
                    },
                    ShiftCase {
                        model: OperatorModel::shift(vec![2.0], TailRule::constant(1.0)),
                        hyponormal: false,
                    },
                ],
            },
        ] {
            let rep = run_checker(&cx, &ch).unwrap();
            assert_eq!(rep.verdict, Verdict::Pass, "{}: {}", rep.checker, rep.detail);
        }
    }

    #[test]
    fn resolvent_identity_on_normal_limit() {
        let t = OperatorModel::finite(ComplexMatrix::diag(&[c(1.0), C64::new(0.0, 2.0)]));
        let cx = ctx(FamilySpec::Constant { limit: t }, (1, 8));
        let ch = Checker::ResolventIdentity {
            lambdas: vec![c(0.0), c(3.0), c(1.0)],
        };
        assert_eq!(run_checker(&cx, &ch).unwrap().verdict, Verdict::Pass);
        let j = OperatorModel::finite(ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap());
        let cx = ctx(FamilySpec::Constant { limit: j }, (1, 8));
        assert_eq!(run_checker(&cx, &ch).unwrap().verdict, Verdict::HypothesisUnmet);
    }
}
