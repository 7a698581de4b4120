//! ν-convergence diagnostics and the checkers built on them.
//!
//! `x_n` ν-converges to `x` when `||x_n||` is bounded and both
//! `||(x_n - x) x||` and `||(x_n - x) x_n||` tend to zero. Limits are
//! judged on a finite tail window: the tail maximum must be below the
//! tolerance and the last value must not exceed the first.

pub mod checks;
pub mod family;

pub use checks::{run_checker, CheckReport, Checker, Context, TraceRow, Verdict};
pub use family::{FamilySpec, OperatorSequence, Rate};

use crate::error::{Error, Result};
use crate::linalg::{operator_norm, ComplexMatrix};
use crate::models::{compose_difference_product, model_norm, BandOperator, NormEnclosure, OperatorModel};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NuRow {
    pub n: usize,
    pub norm_tn: NormEnclosure,
    /// `||T_n - T||`.
    pub diff_norm: NormEnclosure,
    /// `||(T_n - T) T||`.
    pub nu1: NormEnclosure,
    /// `||(T_n - T) T_n||`.
    pub nu2: NormEnclosure,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NuDiagnostics {
    pub norm_t: NormEnclosure,
    pub rows: Vec<NuRow>,
}

fn row(n: usize, t: &OperatorModel, tn: &OperatorModel) -> Result<NuRow> {
    let diff = BandOperator::from_model(tn)?.sub(&BandOperator::from_model(t)?)?;
    Ok(NuRow {
        n,
        norm_tn: model_norm(tn)?,
        diff_norm: diff.norm(),
        nu1: compose_difference_product(tn, t, t)?,
        nu2: compose_difference_product(tn, t, tn)?,
    })
}

/// The four ν quantities for every member, computed in parallel and
/// merged in index order. Errors carry the offending `n`.
pub fn nu_diagnostics(seq: &OperatorSequence) -> Result<NuDiagnostics> {
    let t = seq.limit();
    let norm_t = model_norm(t)?;
    let members = seq.members()?;
    let rows = members
        .par_iter()
        .map(|(n, tn)| row(*n, t, tn).map_err(|e| Error::at_index(*n, e)))
        .collect::<Result<Vec<_>>>()?;
    Ok(NuDiagnostics { norm_t, rows })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConvergenceClass {
    NormConvergent,
    NuOnly,
    NotNu,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub class: ConvergenceClass,
    /// Inclusive `n` range of the tail window.
    pub window: (usize, usize),
    pub tol: f64,
    pub tail_max_diff: f64,
    pub tail_max_nu1: f64,
    pub tail_max_nu2: f64,
}

pub const DEFAULT_TAIL: usize = 16;
pub const MIN_TAIL: usize = 5;

/// Tail window of `len` values: the last `tail` (default 16), never fewer
/// than 5.
pub fn tail_window(len: usize, tail: Option<usize>) -> Result<std::ops::Range<usize>> {
    if len < MIN_TAIL {
        return Err(Error::Domain(format!(
            "need at least {MIN_TAIL} indices for a tail window, got {len}"
        )));
    }
    let w = tail.unwrap_or(DEFAULT_TAIL).clamp(MIN_TAIL, len);
    Ok(len - w..len)
}

/// Finite-window limit test: tail max `<= tol` and last `<=` first.
pub fn tends_to_zero(tail: &[f64], tol: f64) -> bool {
    match (tail.first(), tail.last()) {
        (Some(&a), Some(&b)) => tail.iter().all(|&x| x <= tol) && b <= a,
        _ => false,
    }
}

fn max_of(xs: &[f64]) -> f64 {
    xs.iter().copied().fold(0.0, f64::max)
}

/// Limits are judged on upper bounds, so an enclosure never claims
/// convergence it has not certified.
pub fn classify_convergence(diag: &NuDiagnostics, tol: f64, tail: Option<usize>) -> Result<Classification> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let w = tail_window(diag.rows.len(), tail)?;
    let rows = &diag.rows[w.clone()];
    let diff: Vec<f64> = rows.iter().map(|r| r.diff_norm.upper).collect();
    let nu1: Vec<f64> = rows.iter().map(|r| r.nu1.upper).collect();
    let nu2: Vec<f64> = rows.iter().map(|r| r.nu2.upper).collect();
    let bounded = diag.rows.iter().all(|r| r.norm_tn.upper.is_finite());
    let class = if tends_to_zero(&diff, tol) {
        ConvergenceClass::NormConvergent
    } else if bounded && tends_to_zero(&nu1, tol) && tends_to_zero(&nu2, tol) {
        ConvergenceClass::NuOnly
    } else {
        ConvergenceClass::NotNu
    };
    Ok(Classification {
        class,
        window: (rows[0].n, rows[rows.len() - 1].n),
        tol,
        tail_max_diff: max_of(&diff),
        tail_max_nu1: max_of(&nu1),
        tail_max_nu2: max_of(&nu2),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NuLimitCheck {
    pub bounded: bool,
    /// `||(x_n - x) x||`.
    pub nu1: f64,
    /// `||(x_n - x) x_n||`.
    pub nu2: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonuniquenessReport {
    pub x: ComplexMatrix,
    pub y: ComplexMatrix,
    pub to_x: NuLimitCheck,
    pub to_y: NuLimitCheck,
    /// `||x - y||`.
    pub limit_gap: f64,
    pub pass: bool,
}

/// `N = [[0, 1], [0, 0]]`.
pub fn nilpotent_n() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).expect("2x2 literal")
}

fn nu_limit(xn: &ComplexMatrix, x: &ComplexMatrix) -> NuLimitCheck {
    let d = xn - x;
    let nu1 = operator_norm(&(&d * x));
    let nu2 = operator_norm(&(&d * xn));
    let bounded = operator_norm(xn).is_finite();
    NuLimitCheck {
        bounded,
        nu1,
        nu2,
        pass: bounded && nu1 == 0.0 && nu2 == 0.0,
    }
}

/// The constant zero sequence against the two candidate limits `0` and
/// `y` (default `N`). Both verdicts demand exact zeros; they hold iff
/// `y^2 = 0`.
pub fn nu_nonuniqueness_demo(y: Option<&ComplexMatrix>) -> Result<NonuniquenessReport> {
    let y = y.cloned().unwrap_or_else(nilpotent_n);
    if !y.is_square() || y.is_empty() {
        return Err(Error::shape("nu_nonuniqueness_demo", "y must be square and nonempty"));
    }
    let zero = ComplexMatrix::zeros(y.rows(), y.cols());
    let to_x = nu_limit(&zero, &zero);
    let to_y = nu_limit(&zero, &y);
    let limit_gap = operator_norm(&(&zero - &y));
    let pass = to_x.pass && to_y.pass && limit_gap > 0.0;
    Ok(NonuniquenessReport {
        x: zero,
        y,
        to_x,
        to_y,
        limit_gap,
        pass,
    })
}
