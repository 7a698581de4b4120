//! p-hyponormality, Aluthge transforms and the similarity `S = X T X^-1`
//! that replaces the part of `T` off its kernel by a twice-transformed
//! block.

use crate::error::{Error, Result};
use crate::linalg::{
    eigenvalues, hermitian_eigen, inverse, polar_decompose, psd_power, smallest_singular_value, svd, ComplexMatrix, C64,
};
use crate::models::{OperatorModel, TailRule};
use crate::sets::{hausdorff_distance, PointCloud};
use crate::tol::NumericConfig;
use serde::{Deserialize, Serialize};

fn square(a: &ComplexMatrix, op: &'static str) -> Result<()> {
    if !a.is_square() {
        return Err(Error::shape(op, format!("{}x{} matrix is not square", a.rows(), a.cols())));
    }
    if !a.is_finite() {
        return Err(Error::NonFinite(op));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyponormalVerdict {
    pub pass: bool,
    pub p: f64,
    /// `-lambda_min((A*A)^p - (AA*)^p)`, clipped at zero.
    pub defect: f64,
    /// `|trace((A*A)^p - (AA*)^p)|`; zero for every matrix.
    pub trace_defect: f64,
}

/// `(A*A)^p - (AA*)^p`.
pub fn hyponormal_difference(a: &ComplexMatrix, p: f64) -> Result<ComplexMatrix> {
    square(a, "is_p_hyponormal")?;
    let ah = a.adjoint();
    Ok(&psd_power(&(&ah * a), p)? - &psd_power(&(a * &ah), p)?)
}

pub fn is_p_hyponormal(a: &ComplexMatrix, p: f64, tol: f64) -> Result<HyponormalVerdict> {
    if !(tol >= 0.0) {
        return Err(Error::Domain(format!("tolerance must be nonnegative, got {tol}")));
    }
    let d = hyponormal_difference(a, p)?;
    if d.is_empty() {
        return Ok(HyponormalVerdict {
            pass: true,
            p,
            defect: 0.0,
            trace_defect: 0.0,
        });
    }
    // symmetrize away rounding before the Hermitian solver
    let h = (&d + &d.adjoint()).scale_real(0.5);
    let lmin = hermitian_eigen(&h)?.values[0];
    let defect = (-lmin).max(0.0);
    Ok(HyponormalVerdict {
        pass: defect <= tol,
        p,
        defect,
        trace_defect: d.trace().norm(),
    })
}

/// `|a|^(1/2) U |a|^(1/2)` with `a = U |a|`.
pub fn aluthge(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    square(a, "aluthge")?;
    if a.is_empty() {
        return Ok(a.clone());
    }
    let pol = polar_decompose(a)?;
    let r = psd_power(&pol.modulus, 0.5)?;
    Ok(&(&r * &pol.u) * &r)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityReport {
    #[serde(rename = "X")]
    pub x: ComplexMatrix,
    #[serde(rename = "S")]
    pub s: ComplexMatrix,
    pub kernel_dim: usize,
    /// `||S X - X T||`.
    pub reconstruction_defect: f64,
    /// Hausdorff distance between the eigenvalues of `S` and `T`.
    pub spectrum_distance: f64,
    /// `(||X||, ||X^-1||)`.
    pub norm_bounds: (f64, f64),
    pub x_smin: f64,
}

/// For `T` with a kernel: split `C^n = N(T) + N(T)^perp` with a unitary
/// `Q`, so `Q* T Q = [[0, C], [0, B]]`. With `B` invertible,
/// `Y = [[I, -C B^-1], [0, I]]` removes `C`, and
/// `X_B = |B^|^(1/2) |B|^(1/2)` carries `B` to its second Aluthge transform.
/// Then `X = Q diag(I, X_B) Y Q*` and `S = Q diag(0, B~) Q*`.
pub fn thmd_similarity(t: &ComplexMatrix) -> Result<SimilarityReport> {
    thmd_similarity_with(t, &NumericConfig::default())
}

pub fn thmd_similarity_with(t: &ComplexMatrix, cfg: &NumericConfig) -> Result<SimilarityReport> {
    square(t, "thmd_similarity")?;
    let n = t.rows();
    if n == 0 {
        return Err(Error::Hypothesis("empty matrix has no kernel vector".into()));
    }
    let f = svd(t)?;
    let smax = f.sigma[0];
    let cut = cfg.kernel_rank.at(smax);
    let rank = f.sigma.iter().filter(|&&s| s > cut).count();
    let k = n - rank;
    if k == 0 {
        return Err(Error::Hypothesis(format!(
            "no kernel: smallest singular value {:.3e} exceeds {:.3e}",
            f.sigma[n - 1],
            cut
        )));
    }
    // right singular vectors: kernel last, complement first
    let order: Vec<usize> = (rank..n).chain(0..rank).collect();
    let q = f.v.select_columns(&order);
    let tq = &(&q.adjoint() * t) * &q;
    let c = tq.block(0, k, k, n);
    let b = tq.block(k, n, k, n);

    let (x_block, s_block) = if rank == 0 {
        (ComplexMatrix::zeros(0, 0), ComplexMatrix::zeros(0, 0))
    } else {
        let bmod = polar_decompose(&b)?.modulus;
        let b_smin = smallest_singular_value(&b);
        if b_smin <= cfg.kernel_rank.at(smax) {
            return Err(Error::Hypothesis(format!(
                "compression to the kernel complement is singular (s_min {b_smin:.3e})"
            )));
        }
        let b_hat = aluthge(&b)?;
        let b_tilde = aluthge(&b_hat)?;
        let bhat_mod = polar_decompose(&b_hat)?.modulus;
        let xb = &psd_power(&bhat_mod, 0.5)? * &psd_power(&bmod, 0.5)?;
        (xb, b_tilde)
    };

    let mut xprime = ComplexMatrix::identity(n);
    let mut sprime = ComplexMatrix::zeros(n, n);
    for i in 0..rank {
        for j in 0..rank {
            xprime[(k + i, k + j)] = x_block[(i, j)];
            sprime[(k + i, k + j)] = s_block[(i, j)];
        }
    }
    if rank > 0 {
        let mut y = ComplexMatrix::identity(n);
        let cb = &c * &inverse(&b)?;
        for i in 0..k {
            for j in 0..rank {
                y[(i, k + j)] = -cb[(i, j)];
            }
        }
        xprime = &xprime * &y;
    }
    let x = &(&q * &xprime) * &q.adjoint();
    let s = &(&q * &sprime) * &q.adjoint();
    let reconstruction_defect = (&(&s * &x) - &(&x * t)).operator_norm();
    let es = PointCloud::new(eigenvalues(&s)?.values)?;
    let et = PointCloud::new(eigenvalues(t)?.values)?;
    let xinv = inverse(&x)?;
    Ok(SimilarityReport {
        kernel_dim: k,
        reconstruction_defect,
        spectrum_distance: hausdorff_distance(&es, &et)?,
        norm_bounds: (x.operator_norm(), xinv.operator_norm()),
        x_smin: smallest_singular_value(&x),
        x,
        s,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IdentityVerdict {
    Pass,
    Fail,
    /// `s` is not hyponormal, so the identity is not claimed.
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityRow {
    pub lambda: C64,
    /// `d(lambda, sigma(s))`.
    pub distance: f64,
    /// `| ||(s - lambda)^-1|| d - 1 |`; `None` when skipped.
    pub deviation: Option<f64>,
    pub skipped: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub verdict: IdentityVerdict,
    pub hyponormal_defect: f64,
    pub rows: Vec<IdentityRow>,
}

/// Largest accepted deviation for a hyponormal `s`.
pub const IDENTITY_TOL: f64 = 1e-8;

/// Checks `||(s - lambda)^-1|| = 1 / d(lambda, sigma(s))`. Points closer
/// than `1e-8 max(1, ||s||)` to the spectrum are skipped.
pub fn hyponormal_resolvent_identity_check(s: &ComplexMatrix, lambdas: &[C64]) -> Result<IdentityReport> {
    square(s, "hyponormal_resolvent_identity_check")?;
    let scale = s.operator_norm().max(1.0);
    let hyp = is_p_hyponormal(s, 1.0, 1e-8 * scale * scale)?;
    let eig = if s.is_empty() { vec![] } else { eigenvalues(s)?.values };
    let margin = 1e-8 * scale;
    let rows: Vec<IdentityRow> = lambdas
        .iter()
        .map(|&z| {
            let distance = eig.iter().map(|e| (e - z).norm()).fold(f64::INFINITY, f64::min);
            if distance <= margin {
                return IdentityRow {
                    lambda: z,
                    distance,
                    deviation: None,
                    skipped: true,
                };
            }
            let smin = smallest_singular_value(&s.shifted(z));
            IdentityRow {
                lambda: z,
                distance,
                deviation: Some((distance / smin - 1.0).abs()),
                skipped: false,
            }
        })
        .collect();
    let verdict = if !hyp.pass {
        IdentityVerdict::NotApplicable
    } else if rows.iter().filter_map(|r| r.deviation).all(|d| d <= IDENTITY_TOL) {
        IdentityVerdict::Pass
    } else {
        IdentityVerdict::Fail
    };
    Ok(IdentityReport {
        verdict,
        hyponormal_defect: hyp.defect,
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftVerdict {
    pub pass: bool,
    /// First `j` with `|w_j| < |w_(j-1)|`.
    pub first_decrease: Option<usize>,
}

/// A weighted shift is hyponormal iff its weight moduli are nondecreasing.
pub fn shift_hyponormality(model: &OperatorModel) -> Result<ShiftVerdict> {
    model.validate()?;
    let OperatorModel::WeightedShift { prefix, tail } = model else {
        return Err(Error::Domain(format!("expected a weighted shift, got a {} model", model.kind())));
    };
    let p = prefix.len();
    let w = |j: usize| if j < p { prefix[j].abs() } else { tail.value(j, p).norm() };
    for j in 0..p {
        if w(j + 1) < w(j) {
            return Ok(ShiftVerdict {
                pass: false,
                first_decrease: Some(j + 1),
            });
        }
    }
    // every tail rule is nonincreasing in modulus; only a flat tail passes
    let flat = match tail {
        TailRule::Constant { .. } => true,
        TailRule::Harmonic { scale } => scale.norm() == 0.0,
        TailRule::Geometric { c, .. } => c.norm() == 0.0,
    };
    Ok(ShiftVerdict {
        pass: flat,
        first_decrease: (!flat).then_some(p + 1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::test_util::{max_diff, random_matrix};
    use crate::linalg::{I, ZERO};

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn unitary(seed: u64, n: usize) -> ComplexMatrix {
        polar_decompose(&random_matrix(n, n, seed)).unwrap().u
    }

    #[test]
    fn hyponormal_examples() {
        let normal = ComplexMatrix::diag(&[c(1.0), I, c(-2.0)]);
        for p in [0.5, 1.0, 2.0] {
            let v = is_p_hyponormal(&normal, p, 1e-12).unwrap();
            assert!(v.pass && v.defect == 0.0);
        }
        let shift = ComplexMatrix::from_real_rows(&[&[0.0, 0.0, 0.0], &[1.0, 0.0, 0.0], &[0.0, 2.0, 0.0]]).unwrap();
        let d = hyponormal_difference(&shift, 1.0).unwrap();
        assert!(max_diff(&d, &ComplexMatrix::real_diag(&[1.0, 3.0, -4.0])) < 1e-12);
        let v = is_p_hyponormal(&shift, 1.0, 1e-8).unwrap();
        assert!(!v.pass && (v.defect - 4.0).abs() < 1e-12);
        assert!(is_p_hyponormal(&unitary(3, 4), 1.0, 1e-10).unwrap().pass);
    }

    #[test]
    fn trace_obstruction() {
        for seed in 0..10 {
            let a = random_matrix(5, 5, seed);
            for p in [0.5, 1.0, 2.0] {
                assert!(is_p_hyponormal(&a, p, 0.0).unwrap().trace_defect < 1e-8);
            }
        }
    }

    #[test]
    fn aluthge_examples() {
        let n = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!(aluthge(&n).unwrap().max_abs() < 1e-15);
        let d = ComplexMatrix::real_diag(&[2.0, 0.5, 3.0]);
        assert!(max_diff(&aluthge(&d).unwrap(), &d) < 1e-14);
    }

    #[test]
    fn aluthge_keeps_nonzero_eigenvalues() {
        for seed in 0..10 {
            let a = random_matrix(6, 6, seed + 40);
            let mut ea: Vec<C64> = eigenvalues(&a).unwrap().values;
            let mut eb: Vec<C64> = eigenvalues(&aluthge(&a).unwrap()).unwrap().values;
            let key = |z: &C64| (z.re * 1e6).round() as i64 * 10_000_000 + (z.im * 1e6).round() as i64;
            ea.sort_by_key(key);
            eb.sort_by_key(key);
            for (x, y) in ea.iter().zip(&eb) {
                assert!((x - y).norm() < 1e-6, "{x} {y}");
            }
        }
    }

    #[test]
    fn similarity_on_normal_block() {
        let t = ComplexMatrix::real_diag(&[0.0, 2.0, 3.0]);
        let r = thmd_similarity(&t).unwrap();
        assert_eq!(r.kernel_dim, 1);
        assert!(max_diff(&r.s, &t) < 1e-12);
        assert!(r.reconstruction_defect < 1e-12);

        let z = thmd_similarity(&ComplexMatrix::zeros(3, 3)).unwrap();
        assert_eq!(z.kernel_dim, 3);
        assert_eq!(z.s.max_abs(), 0.0);
        assert!(max_diff(&z.x, &ComplexMatrix::identity(3)) < 1e-15);
    }

    #[test]
    fn similarity_random_kernel() {
        for seed in 0..20 {
            let mut t = random_matrix(6, 6, seed + 100);
            // make column 0 a combination of the others: one-dimensional kernel
            let comb = (0..6).map(|i| t[(i, 1)] * 0.5 - t[(i, 2)] * c(0.25) * I).collect::<Vec<_>>();
            t.set_column(0, &comb);
            let r = thmd_similarity(&t).unwrap();
            assert_eq!(r.kernel_dim, 1);
            assert!(r.reconstruction_defect <= 1e-9, "{}", r.reconstruction_defect);
            assert!(r.spectrum_distance <= 1e-6, "{}", r.spectrum_distance);
            assert!(r.x_smin > 0.0);
            let dbl = is_p_hyponormal(&r.s, 1.0, 0.0).unwrap();
            assert!(dbl.trace_defect < 1e-8);
        }
    }

    #[test]
    fn similarity_hypotheses() {
        let inv = ComplexMatrix::identity(3);
        assert!(matches!(thmd_similarity(&inv), Err(Error::Hypothesis(_))));
        let jordan = ComplexMatrix::from_real_rows(&[&[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0], &[0.0, 0.0, 0.0]]).unwrap();
        assert!(matches!(thmd_similarity(&jordan), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn resolvent_identity() {
        let d = ComplexMatrix::real_diag(&[1.0, 5.0]);
        let r = hyponormal_resolvent_identity_check(&d, &[c(3.0), c(1.0)]).unwrap();
        assert_eq!(r.verdict, IdentityVerdict::Pass);
        assert!(r.rows[0].deviation.unwrap() < 1e-15);
        assert!(r.rows[1].skipped);

        let u = unitary(8, 4);
        let r = hyponormal_resolvent_identity_check(&u, &[ZERO]).unwrap();
        assert_eq!(r.verdict, IdentityVerdict::Pass);

        let n = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        let r = hyponormal_resolvent_identity_check(&n, &[c(0.5)]).unwrap();
        assert_eq!(r.verdict, IdentityVerdict::NotApplicable);
        assert!(r.rows[0].deviation.unwrap() > 0.1);
    }

    #[test]
    fn shift_monotonicity() {
        let ones = OperatorModel::shift(vec![], TailRule::constant(1.0));
        assert!(shift_hyponormality(&ones).unwrap().pass);
        let up = OperatorModel::shift(vec![1.0, 2.0, 3.0], TailRule::constant(3.0));
        assert!(shift_hyponormality(&up).unwrap().pass);
        let down = OperatorModel::shift(vec![2.0], TailRule::constant(1.0));
        let v = shift_hyponormality(&down).unwrap();
        assert!(!v.pass && v.first_decrease == Some(1));
        let decay = OperatorModel::shift(vec![], TailRule::harmonic(1.0));
        assert_eq!(shift_hyponormality(&decay).unwrap().first_decrease, Some(1));
        assert!(shift_hyponormality(&OperatorModel::diagonal(vec![], TailRule::constant(1.0))).is_err());
    }
}
