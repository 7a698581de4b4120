use super::{ComplexMatrix, C64};
use crate::error::{Error, Result};

/// Eigen-decomposition `a = vectors * diag(values) * vectors^*` of a
/// Hermitian matrix; values ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    /// `vectors * diag(f(values)) * vectors^*`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let fv: Vec<f64> = self.values.iter().map(|&x| f(x)).collect();
        let scaled = ComplexMatrix::from_fn(n, n, |i, j| self.vectors[(i, j)] * fv[j]);
        &scaled * &self.vectors.adjoint()
    }
}

const MAX_SWEEPS: usize = 60;

/// Cyclic Jacobi on the Hermitian part of `a`. The caller is responsible for
/// checking that `a` is Hermitian to its own tolerance.
pub fn hermitian_eigen(a: &ComplexMatrix) -> Result<HermitianEigen> {
    if !a.is_square() {
        return Err(Error::shape("hermitian_eigen", "non-square matrix"));
    }
    let n = a.rows();
    // symmetrize
    let mut m = ComplexMatrix::from_fn(n, n, |i, j| (a[(i, j)] + a[(j, i)].conj()) * 0.5);
    let mut v = ComplexMatrix::identity(n);
    let scale = m.frobenius_norm();
    if n <= 1 || scale == 0.0 {
        return Ok(finish(m, v));
    }
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= f64::EPSILON * scale * 1e-2 {
            return Ok(finish(m, v));
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                let g = apq.norm();
                if g == 0.0 || g <= 1e-3 * f64::EPSILON * scale {
                    m[(p, q)] = C64::new(0.0, 0.0);
                    m[(q, p)] = C64::new(0.0, 0.0);
                    continue;
                }
                let phase = apq / g;
                let zeta = (m[(q, q)].re - m[(p, p)].re) / (2.0 * g);
                let t = if zeta == 0.0 {
                    1.0
                } else {
                    zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let em = phase.conj();
                let ep = phase;
                for i in 0..n {
                    let x = m[(i, p)];
                    let y = m[(i, q)];
                    m[(i, p)] = x * c - y * em * s;
                    m[(i, q)] = x * s + y * em * c;
                }
                for j in 0..n {
                    let x = m[(p, j)];
                    let y = m[(q, j)];
                    m[(p, j)] = x * c - y * ep * s;
                    m[(q, j)] = x * s + y * ep * c;
                }
                m[(p, q)] = C64::new(0.0, 0.0);
                m[(q, p)] = C64::new(0.0, 0.0);
                m[(p, p)] = C64::new(m[(p, p)].re, 0.0);
                m[(q, q)] = C64::new(m[(q, q)].re, 0.0);
                for i in 0..n {
                    let x = v[(i, p)];
                    let y = v[(i, q)];
                    v[(i, p)] = x * c - y * em * s;
                    v[(i, q)] = x * s + y * em * c;
                }
            }
        }
    }
    Err(Error::NoConvergence {
        algorithm: "Hermitian Jacobi",
        iterations: MAX_SWEEPS,
    })
}

fn finish(m: ComplexMatrix, v: ComplexMatrix) -> HermitianEigen {
    let n = m.rows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.total_cmp(&m[(j, j)].re));
    HermitianEigen {
        values: order.iter().map(|&i| m[(i, i)].re).collect(),
        vectors: v.select_columns(&order),
    }
}
