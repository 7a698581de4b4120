use super::{dot_conj, norm2, ComplexMatrix, C64, ZERO};
use crate::error::{Error, Result};

/// Thin SVD `a = u * diag(sigma) * v^*`, `k = min(rows, cols)`.
#[derive(Debug, Clone)]
pub struct Svd {
    /// `rows x k`, orthonormal columns.
    pub u: ComplexMatrix,
    /// Nonincreasing, nonnegative.
    pub sigma: Vec<f64>,
    /// `cols x k`, orthonormal columns.
    pub v: ComplexMatrix,
}

impl Svd {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let k = self.sigma.len();
        let us = ComplexMatrix::from_fn(self.u.rows(), k, |i, j| self.u[(i, j)] * self.sigma[j]);
        &us * &self.v.adjoint()
    }
}

const MAX_SWEEPS: usize = 80;

/// One-sided (Hestenes) Jacobi on the columns of a tall matrix. Returns the
/// rotated columns and, if requested, the accumulated right rotation.
fn jacobi_columns(
    a: &ComplexMatrix,
    want_v: bool,
) -> Result<(Vec<Vec<C64>>, Option<Vec<Vec<C64>>>)> {
    let n = a.cols();
    let mut w: Vec<Vec<C64>> = (0..n).map(|j| a.column(j)).collect();
    let mut v: Option<Vec<Vec<C64>>> = want_v.then(|| {
        (0..n)
            .map(|j| {
                let mut e = vec![ZERO; n];
                e[j] = C64::new(1.0, 0.0);
                e
            })
            .collect()
    });
    let eps = f64::EPSILON;
    let mut norms: Vec<f64> = w.iter().map(|c| c.iter().map(|z| z.norm_sqr()).sum()).collect();

    for _sweep in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = norms[p];
                let beta = norms[q];
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                let gamma = dot_conj(&w[p], &w[q]);
                let g = gamma.norm();
                if g <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g; // e^{i phi}
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let pc = phase.conj();
                let (wp, wq) = pair_mut(&mut w, p, q);
                for (x, y) in wp.iter_mut().zip(wq.iter_mut()) {
                    let yq = *y * pc;
                    let xp = *x;
                    *x = xp * c - yq * s;
                    *y = xp * s + yq * c;
                }
                if let Some(v) = v.as_mut() {
                    let (vp, vq) = pair_mut(v, p, q);
                    for (x, y) in vp.iter_mut().zip(vq.iter_mut()) {
                        let yq = *y * pc;
                        let xp = *x;
                        *x = xp * c - yq * s;
                        *y = xp * s + yq * c;
                    }
                }
                norms[p] = w[p].iter().map(|z| z.norm_sqr()).sum();
                norms[q] = w[q].iter().map(|z| z.norm_sqr()).sum();
            }
        }
        if !rotated {
            return Ok((w, v));
        }
    }
    Err(Error::NoConvergence {
        algorithm: "one-sided Jacobi SVD",
        iterations: MAX_SWEEPS,
    })
}

fn pair_mut<T>(v: &mut [T], p: usize, q: usize) -> (&mut T, &mut T) {
    debug_assert!(p < q);
    let (lo, hi) = v.split_at_mut(q);
    (&mut lo[p], &mut hi[0])
}

/// Orthonormal completion of a partial set of orthonormal vectors in `C^dim`.
fn complete_basis(cols: &mut Vec<Vec<C64>>, dim: usize, target: usize) {
    let mut e = 0;
    while cols.len() < target && e < dim {
        let mut cand = vec![ZERO; dim];
        cand[e] = C64::new(1.0, 0.0);
        e += 1;
        for _ in 0..2 {
            for c in cols.iter() {
                let proj = dot_conj(c, &cand);
                for (x, y) in cand.iter_mut().zip(c) {
                    *x -= proj * y;
                }
            }
        }
        let nrm = norm2(&cand);
        if nrm > 1e-8 {
            cand.iter_mut().for_each(|x| *x /= nrm);
            cols.push(cand);
        }
    }
}

fn svd_tall(a: &ComplexMatrix) -> Result<Svd> {
    let (m, n) = (a.rows(), a.cols());
    let (w, v) = jacobi_columns(a, true)?;
    let v = v.expect("requested");
    let mut order: Vec<usize> = (0..n).collect();
    let sig: Vec<f64> = w.iter().map(|c| norm2(c)).collect();
    order.sort_by(|&i, &j| sig[j].total_cmp(&sig[i]).then(i.cmp(&j)));

    let smax = sig.iter().copied().fold(0.0, f64::max);
    let mut ucols: Vec<Vec<C64>> = Vec::with_capacity(n);
    let mut zero_slots = Vec::new();
    for (slot, &j) in order.iter().enumerate() {
        let s = sig[j];
        if s > 0.0 && s > smax * 1e-300 {
            ucols.push(w[j].iter().map(|z| z / s).collect());
        } else {
            zero_slots.push(slot);
            ucols.push(Vec::new());
        }
    }
    if !zero_slots.is_empty() {
        let mut basis: Vec<Vec<C64>> = ucols.iter().filter(|c| !c.is_empty()).cloned().collect();
        let have = basis.len();
        complete_basis(&mut basis, m, have + zero_slots.len());
        for (k, slot) in zero_slots.iter().enumerate() {
            ucols[*slot] = basis[have + k].clone();
        }
    }
    let u = ComplexMatrix::from_fn(m, n, |i, k| ucols[k][i]);
    let vm = ComplexMatrix::from_fn(n, n, |i, k| v[order[k]][i]);
    let sigma = order.iter().map(|&j| sig[j]).collect();
    Ok(Svd { u, sigma, v: vm })
}

/// Full thin SVD.
pub fn svd(a: &ComplexMatrix) -> Result<Svd> {
    if a.is_empty() {
        return Err(Error::shape("svd", "empty matrix"));
    }
    if !a.is_finite() {
        return Err(Error::NonFinite("svd input"));
    }
    if a.rows() >= a.cols() {
        svd_tall(a)
    } else {
        let t = svd_tall(&a.adjoint())?;
        Ok(Svd {
            u: t.v,
            sigma: t.sigma,
            v: t.u,
        })
    }
}

/// Singular values only, nonincreasing. Empty input gives an empty list.
pub fn singular_values(a: &ComplexMatrix) -> Vec<f64> {
    if a.is_empty() {
        return Vec::new();
    }
    let tall = if a.rows() >= a.cols() {
        a.clone()
    } else {
        a.adjoint()
    };
    // Quadratic convergence of cyclic Jacobi makes the sweep cap unreachable
    // for finite input.
    let (w, _) = jacobi_columns(&tall, false).expect("one-sided Jacobi sweep cap reached");
    let mut s: Vec<f64> = w.iter().map(|c| norm2(c)).collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// Smallest of the `min(rows, cols)` singular values.
pub fn smallest_singular_value(a: &ComplexMatrix) -> f64 {
    singular_values(a).last().copied().unwrap_or(0.0)
}
