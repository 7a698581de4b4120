use super::{hermitian_eigen, svd, ComplexMatrix};
use crate::error::{Error, Result};
use crate::tol::NumericConfig;

/// `a = u * modulus` with `modulus = (a^* a)^{1/2}` and `u` the canonical
/// partial isometry whose initial space is the range of `modulus`.
#[derive(Debug, Clone)]
pub struct Polar {
    pub u: ComplexMatrix,
    pub modulus: ComplexMatrix,
}

/// Polar decomposition from the SVD `a = W S V^*`: `|a| = V S V^*` and
/// `U = sum_{s_i > tau} w_i v_i^*` with `tau = 1e-12 * s_max`. Kernel
/// directions of `a` are annihilated by `U`.
pub fn polar_decompose(a: &ComplexMatrix) -> Result<Polar> {
    polar_decompose_with(a, &NumericConfig::default())
}

pub fn polar_decompose_with(a: &ComplexMatrix, cfg: &NumericConfig) -> Result<Polar> {
    if !a.is_square() {
        return Err(Error::shape("polar_decompose", "non-square matrix"));
    }
    let n = a.rows();
    if n == 0 {
        return Ok(Polar {
            u: ComplexMatrix::zeros(0, 0),
            modulus: ComplexMatrix::zeros(0, 0),
        });
    }
    let s = svd(a)?;
    let smax = s.sigma[0];
    let tau = cfg.polar_rank.at(smax);
    let keep: Vec<usize> = (0..n).filter(|&i| s.sigma[i] > tau && s.sigma[i] > 0.0).collect();
    let w = s.u.select_columns(&keep);
    let v = s.v.select_columns(&keep);
    let u = &w * &v.adjoint();
    let vs = ComplexMatrix::from_fn(n, n, |i, j| s.v[(i, j)] * s.sigma[j]);
    let modulus = &vs * &s.v.adjoint();
    Ok(Polar { u, modulus })
}

/// `a^p` for Hermitian positive semidefinite `a`, through its spectral
/// decomposition. Eigenvalues in `[-tol, 0)` are clipped to zero.
pub fn psd_power(a: &ComplexMatrix, p: f64) -> Result<ComplexMatrix> {
    psd_power_with(a, p, &NumericConfig::default())
}

pub fn psd_power_with(a: &ComplexMatrix, p: f64, cfg: &NumericConfig) -> Result<ComplexMatrix> {
    if !a.is_square() {
        return Err(Error::shape("psd_power", "non-square matrix"));
    }
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::Domain(format!("power must be positive, got {p}")));
    }
    let scale = a.operator_norm();
    let tol = cfg.psd.at(scale);
    let defect = a.hermitian_defect();
    if defect > tol.max(f64::EPSILON * scale) * (a.rows().max(1) as f64).sqrt() {
        return Err(Error::Domain(format!(
            "matrix is not Hermitian (||A - A*||_F = {defect:e})"
        )));
    }
    let e = hermitian_eigen(a)?;
    if let Some(&min) = e.values.first() {
        if min < -tol {
            return Err(Error::Domain(format!(
                "matrix is indefinite (eigenvalue {min:e})"
            )));
        }
    }
    Ok(e.map(|x| if x <= 0.0 { 0.0 } else { x.powf(p) }))
}
