use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, ComplexMatrix};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GelfandRadius {
    /// `min_{1 <= n <= n_max} ||a^n||^(1/n)`, an upper bound for `r(a)`.
    pub bound: f64,
    pub argmin: usize,
    /// `||a^n||^(1/n)` for `n = 1..=n_max`.
    pub trace: Vec<f64>,
    /// Largest eigenvalue modulus, for comparison.
    pub eigen_max: f64,
}

/// Gelfand bound computed on `a / s`, `s = ||a||`, so powers stay in range.
pub fn spectral_radius_gelfand(a: &ComplexMatrix, n_max: usize) -> Result<GelfandRadius> {
    if !a.is_square() {
        return Err(Error::shape("spectral_radius_gelfand", "matrix is not square"));
    }
    if n_max < 2 {
        return Err(Error::Domain(format!("n_max must be at least 2, got {n_max}")));
    }
    if !a.is_finite() {
        return Err(Error::NonFinite("spectral_radius_gelfand"));
    }
    let eigen_max = if a.is_empty() { 0.0 } else { eigenvalues(a)?.max_modulus() };
    let s = a.operator_norm();
    if s == 0.0 {
        return Ok(GelfandRadius {
            bound: 0.0,
            argmin: 1,
            trace: vec![0.0; n_max],
            eigen_max,
        });
    }
    let b = a.scale_real(1.0 / s);
    let mut p = b.clone();
    let mut trace = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        if n > 1 {
            p = &p * &b;
        }
        let v = p.operator_norm().powf(1.0 / n as f64) * s;
        if !v.is_finite() {
            return Err(Error::NonFinite("spectral radius"));
        }
        trace.push(v);
    }
    let (argmin, bound) = trace
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
    Ok(GelfandRadius {
        bound,
        argmin: argmin + 1,
        trace,
        eigen_max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;

    #[test]
    fn examples() {
        let id = ComplexMatrix::identity(3);
        let r = spectral_radius_gelfand(&id, 5).unwrap();
        assert!(r.trace.iter().all(|&v| (v - 1.0).abs() < 1e-14));

        let nil = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        let r = spectral_radius_gelfand(&nil, 2).unwrap();
        assert_eq!(r.trace[1], 0.0);
        assert_eq!(r.bound, 0.0);

        let a = ComplexMatrix::from_real_rows(&[&[0.0, 4.0], &[1.0, 0.0]]).unwrap();
        let r = spectral_radius_gelfand(&a, 2).unwrap();
        assert!((r.trace[1] - 2.0).abs() < 1e-14);
        assert!((r.bound - 2.0).abs() < 1e-14);
        assert!((r.eigen_max - 2.0).abs() < 1e-12);
    }

    #[test]
    fn huge_entries_rescaled() {
        let a = ComplexMatrix::diag(&[C64::new(1e200, 0.0), C64::new(1.0, 0.0)]);
        let r = spectral_radius_gelfand(&a, 10).unwrap();
        assert!((r.bound / 1e200 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bad_inputs() {
        assert!(spectral_radius_gelfand(&ComplexMatrix::identity(2), 1).is_err());
        assert!(spectral_radius_gelfand(&ComplexMatrix::zeros(2, 3), 4).is_err());
    }
}
