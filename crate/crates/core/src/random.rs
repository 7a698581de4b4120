//! Seeded generators for randomized corpora. Every generator draws from a
//! ChaCha stream, so a seed fixes the output on every platform.

use crate::error::Result;
use crate::linalg::{inverse, polar_decompose, ComplexMatrix, C64, ONE, ZERO};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type SeededRng = ChaCha8Rng;

/// Independent stream per `(seed, salt)`.
pub fn rng(seed: u64, salt: u64) -> SeededRng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(salt);
    r
}

pub fn complex(rng: &mut SeededRng) -> C64 {
    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Entries with real and imaginary parts uniform on `[-1, 1)`.
pub fn matrix(rng: &mut SeededRng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex(rng))
}

/// Unitary factor of a random matrix.
pub fn unitary(rng: &mut SeededRng, n: usize) -> Result<ComplexMatrix> {
    loop {
        let g = matrix(rng, n, n);
        // a singular draw has a non-unique polar factor; redraw
        if crate::linalg::smallest_singular_value(&g) > 1e-3 {
            return Ok(polar_decompose(&g)?.u);
        }
    }
}

/// `U diag(s) V*` with `s` log-uniform in `[1, cond_max]`, one singular
/// value pinned to each end, so the 2-norm condition number is `cond_max`.
pub fn conditioned(rng: &mut SeededRng, n: usize, cond_max: f64) -> Result<ComplexMatrix> {
    let u = unitary(rng, n)?;
    let v = unitary(rng, n)?;
    let top = cond_max.max(1.0).ln();
    let s: Vec<C64> = (0..n)
        .map(|k| {
            let t = match k {
                0 => 0.0,
                1 => top,
                _ => rng.gen_range(0.0..=top),
            };
            C64::new(t.exp(), 0.0)
        })
        .collect();
    Ok(&(&u * &ComplexMatrix::diag(&s)) * &v.adjoint())
}

/// `U diag(values) U*`.
pub fn normal(rng: &mut SeededRng, values: &[C64]) -> Result<ComplexMatrix> {
    let u = unitary(rng, values.len())?;
    Ok(&(&u * &ComplexMatrix::diag(values)) * &u.adjoint())
}

/// `S diag(values) S^-1` together with `S`.
pub fn similar_diagonal(rng: &mut SeededRng, values: &[C64], cond_max: f64) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let s = conditioned(rng, values.len(), cond_max)?;
    let a = &(&s * &ComplexMatrix::diag(values)) * &inverse(&s)?;
    Ok((a, s))
}

/// Oblique idempotent of the given rank.
pub fn idempotent(rng: &mut SeededRng, n: usize, rank: usize, cond_max: f64) -> Result<ComplexMatrix> {
    let d: Vec<C64> = (0..n).map(|k| if k < rank { ONE } else { ZERO }).collect();
    Ok(similar_diagonal(rng, &d, cond_max)?.0)
}

/// Matrix with a kernel of dimension `kernel_dim`: a random matrix times a
/// rank-deficient diagonal, mixed by a unitary.
pub fn with_kernel(rng: &mut SeededRng, n: usize, kernel_dim: usize) -> Result<ComplexMatrix> {
    let g = matrix(rng, n, n);
    let q = unitary(rng, n)?;
    let d: Vec<C64> = (0..n).map(|k| if k < kernel_dim { ZERO } else { ONE }).collect();
    // T q_k = 0 for the first kernel_dim columns of q
    Ok(&(&g * &ComplexMatrix::diag(&d)) * &q.adjoint())
}
