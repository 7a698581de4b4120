//! Tolerance configuration and the single comparator every numeric
//! comparison in the crate goes through.

use serde::{Deserialize, Serialize};

/// Mixed absolute/relative tolerance: `|a - b| <= abs + rel * scale`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tol {
    pub abs: f64,
    pub rel: f64,
}

impl Tol {
    pub const fn abs(abs: f64) -> Self {
        Tol { abs, rel: 0.0 }
    }

    pub const fn rel(rel: f64) -> Self {
        Tol { abs: 0.0, rel }
    }

    pub const fn new(abs: f64, rel: f64) -> Self {
        Tol { abs, rel }
    }

    /// Threshold at the given magnitude scale.
    pub fn at(&self, scale: f64) -> f64 {
        self.abs + self.rel * scale.abs()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Tol {
            abs: self.abs * factor,
            rel: self.rel * factor,
        }
    }

    /// `|a - b|` within tolerance, scale taken as `max(|a|, |b|)`.
    pub fn eq(&self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.at(a.abs().max(b.abs()))
    }

    /// `a <= b` up to tolerance at scale `|b|`.
    pub fn le(&self, a: f64, b: f64) -> bool {
        a <= b + self.at(b)
    }

    /// Strictly below `b` by more than the tolerance.
    pub fn lt_strict(&self, a: f64, b: f64) -> bool {
        a < b - self.at(b)
    }

    /// Treats `a` as zero relative to `scale`.
    pub fn is_zero(&self, a: f64, scale: f64) -> bool {
        a.abs() <= self.at(scale)
    }
}

/// Crate-wide numeric defaults. Every field is a configuration value; the
/// defaults are the ones the test-suite and the scenario corpus assume.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NumericConfig {
    /// Relative cut-off below which singular values count as zero in the
    /// polar decomposition.
    pub polar_rank: Tol,
    /// Relative cut-off defining the kernel in the similarity construction.
    pub kernel_rank: Tol,
    /// Hermitian / semidefinite acceptance for fractional powers.
    pub psd: Tol,
    /// Pivot threshold for LU solves, relative to the matrix norm.
    pub pivot: Tol,
    /// Floor on the contour admissibility margin, relative to `||a||`.
    pub contour_margin: Tol,
    /// Maximum QR sweeps per eigenvalue.
    pub eig_iter_per_value: usize,
}

impl Default for NumericConfig {
    fn default() -> Self {
        NumericConfig {
            polar_rank: Tol::rel(1e-12),
            kernel_rank: Tol::rel(1e-10),
            psd: Tol::rel(1e-10),
            pivot: Tol::rel(1e-14),
            contour_margin: Tol::rel(1e-6),
            eig_iter_per_value: 60,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixed_tolerance() {
        let t = Tol::new(1e-12, 1e-9);
        assert!(t.eq(1.0, 1.0 + 5e-10));
        assert!(!t.eq(1.0, 1.0 + 5e-9));
        assert!(t.eq(0.0, 5e-13));
        assert!(t.le(1.0 + 5e-10, 1.0));
        assert!(!t.lt_strict(1.0 - 5e-10, 1.0));
        assert!(t.lt_strict(0.5, 1.0));
    }
}
