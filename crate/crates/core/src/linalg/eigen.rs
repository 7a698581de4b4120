use super::{ComplexMatrix, C64, ZERO};
use crate::error::{Error, Result};
use crate::tol::NumericConfig;

/// Eigenvalues of a square matrix, with algebraic multiplicity.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult {
    /// Sorted by real part, then imaginary part.
    pub values: Vec<C64>,
    /// Henrici's departure from normality, `sqrt(||A||_F^2 - sum |l|^2) / ||A||_F`.
    /// Zero for normal matrices, one for nilpotent ones.
    pub condition_estimate: f64,
}

impl EigenResult {
    pub fn max_modulus(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Eigenvalues via Householder reduction to Hessenberg form followed by
/// Wilkinson-shifted complex QR sweeps with deflation.
pub fn eigenvalues(a: &ComplexMatrix) -> Result<EigenResult> {
    eigenvalues_with(a, &NumericConfig::default())
}

pub fn eigenvalues_with(a: &ComplexMatrix, cfg: &NumericConfig) -> Result<EigenResult> {
    if !a.is_square() {
        return Err(Error::shape(
            "eigenvalues",
            format!("{}x{} is not square", a.rows(), a.cols()),
        ));
    }
    if !a.is_finite() {
        return Err(Error::NonFinite("eigenvalues input"));
    }
    let n = a.rows();
    let mut h = a.clone();
    hessenberg_in_place(&mut h);
    let mut values = hessenberg_qr(&mut h, cfg.eig_iter_per_value.max(10) * n.max(1))?;
    values.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));

    let fro2 = a.frobenius_norm().powi(2);
    let lam2: f64 = values.iter().map(|z| z.norm_sqr()).sum();
    let condition_estimate = if fro2 > 0.0 {
        ((fro2 - lam2).max(0.0) / fro2).sqrt()
    } else {
        0.0
    };
    Ok(EigenResult {
        values,
        condition_estimate,
    })
}

/// Unitary similarity to upper Hessenberg form by Householder reflections.
pub(crate) fn hessenberg_in_place(a: &mut ComplexMatrix) {
    let n = a.rows();
    if n < 3 {
        return;
    }
    let mut v = vec![ZERO; n];
    for k in 0..n - 2 {
        let len = n - k - 1;
        let x: Vec<C64> = (0..len).map(|i| a[(k + 1 + i, k)]).collect();
        let xnorm = super::norm2(&x);
        if xnorm == 0.0 {
            continue;
        }
        let tail: f64 = x[1..].iter().map(|z| z.norm_sqr()).sum();
        if tail == 0.0 {
            continue;
        }
        let phase = if x[0].norm() > 0.0 {
            x[0] / x[0].norm()
        } else {
            C64::new(1.0, 0.0)
        };
        let alpha = -phase * xnorm;
        let vs = &mut v[..len];
        vs.copy_from_slice(&x);
        vs[0] -= alpha;
        let vn = super::norm2(vs);
        for z in vs.iter_mut() {
            *z /= vn;
        }
        // A <- (I - 2 v v*) A on rows k+1..n
        for j in k..n {
            let mut s = ZERO;
            for i in 0..len {
                s += vs[i].conj() * a[(k + 1 + i, j)];
            }
            let s = s * 2.0;
            for i in 0..len {
                let t = vs[i] * s;
                a[(k + 1 + i, j)] -= t;
            }
        }
        // A <- A (I - 2 v v*) on columns k+1..n
        for i in 0..n {
            let mut s = ZERO;
            for j in 0..len {
                s += a[(i, k + 1 + j)] * vs[j];
            }
            let s = s * 2.0;
            for j in 0..len {
                let t = s * vs[j].conj();
                a[(i, k + 1 + j)] -= t;
            }
        }
        for i in k + 2..n {
            a[(i, k)] = ZERO;
        }
    }
}

/// Unitary `G` with `G [x; y] = [r; 0]`, returned as `(g11, g12, g21, g22)`.
#[inline]
fn givens(x: C64, y: C64) -> (C64, C64, C64, C64) {
    let rho = (x.norm_sqr() + y.norm_sqr()).sqrt();
    if rho == 0.0 {
        let one = C64::new(1.0, 0.0);
        return (one, ZERO, ZERO, one);
    }
    (x.conj() / rho, y.conj() / rho, -y / rho, x / rho)
}

fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let m1 = (a + d) * 0.5 + disc;
    let m2 = (a + d) * 0.5 - disc;
    if (m1 - d).norm() <= (m2 - d).norm() {
        m1
    } else {
        m2
    }
}

/// Shifted QR on an upper Hessenberg matrix; only the active diagonal
/// window is updated since eigenvectors are not needed.
fn hessenberg_qr(h: &mut ComplexMatrix, max_iter: usize) -> Result<Vec<C64>> {
    let n = h.rows();
    let mut values = Vec::with_capacity(n);
    if n == 0 {
        return Ok(values);
    }
    let eps = f64::EPSILON;
    let norm_scale = h.max_abs().max(f64::MIN_POSITIVE);
    let mut hi = n - 1;
    let mut iter_since_deflation = 0usize;
    let mut total = 0usize;
    let mut rot = Vec::with_capacity(n);

    loop {
        if hi == 0 {
            values.push(h[(0, 0)]);
            break;
        }
        // locate the start of the unreduced block ending at `hi`
        let mut l = hi;
        while l > 0 {
            let sub = h[(l, l - 1)].norm();
            let diag = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            let scale = if diag > 0.0 { diag } else { norm_scale };
            if sub <= eps * scale {
                h[(l, l - 1)] = ZERO;
                break;
            }
            l -= 1;
        }
        if l == hi {
            values.push(h[(hi, hi)]);
            hi -= 1;
            iter_since_deflation = 0;
            continue;
        }
        total += 1;
        iter_since_deflation += 1;
        if total > max_iter {
            return Err(Error::NoConvergence {
                algorithm: "hessenberg QR",
                iterations: total,
            });
        }

        let mu = if iter_since_deflation % 11 == 10 {
            // exceptional shift to break cycles
            h[(hi, hi)] + C64::new(0.75 * h[(hi, hi - 1)].norm(), 0.5 * h[(hi, hi - 1)].norm())
        } else {
            wilkinson_shift(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            )
        };

        for k in l..=hi {
            h[(k, k)] -= mu;
        }
        rot.clear();
        for k in l..hi {
            let g = givens(h[(k, k)], h[(k + 1, k)]);
            for j in k..=hi {
                let x = h[(k, j)];
                let y = h[(k + 1, j)];
                h[(k, j)] = g.0 * x + g.1 * y;
                h[(k + 1, j)] = g.2 * x + g.3 * y;
            }
            h[(k + 1, k)] = ZERO;
            rot.push(g);
        }
        for (idx, g) in rot.iter().enumerate() {
            let k = l + idx;
            let top = (k + 2).min(hi);
            for i in l..=top {
                let x = h[(i, k)];
                let y = h[(i, k + 1)];
                h[(i, k)] = x * g.0.conj() + y * g.1.conj();
                h[(i, k + 1)] = x * g.2.conj() + y * g.3.conj();
            }
        }
        for k in l..=hi {
            h[(k, k)] += mu;
        }
    }
    Ok(values)
}
