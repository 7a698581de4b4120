use super::{ComplexMatrix, C64, ZERO};

/// Gram matrix `A^* A` of a banded `rows x cols` matrix, held as its upper
/// band: `band[i * (w + 1) + k] = G[i, i + k]`, `w = lower + upper`.
#[derive(Debug, Clone)]
pub struct BandedGram {
    n: usize,
    w: usize,
    band: Vec<C64>,
}

impl BandedGram {
    /// `a` has nonzeros only where `-upper <= i - j <= lower`.
    pub fn new(a: &ComplexMatrix, lower: usize, upper: usize) -> Self {
        Self::from_fn(a.rows(), a.cols(), lower, upper, |i, j| a[(i, j)])
    }

    /// Same, reading band entries of `A` from `entry(i, j)`.
    pub fn from_fn(
        rows: usize,
        cols: usize,
        lower: usize,
        upper: usize,
        entry: impl Fn(usize, usize) -> C64,
    ) -> Self {
        let w = lower + upper;
        let n = cols;
        // column j of A restricted to its band rows
        let col_rows = |j: usize| j.saturating_sub(upper)..(j + lower + 1).min(rows);
        let cols_data: Vec<Vec<C64>> = (0..n)
            .map(|j| col_rows(j).map(|i| entry(i, j)).collect())
            .collect();
        let mut band = vec![ZERO; n * (w + 1)];
        for i in 0..n {
            let ri = col_rows(i);
            for k in 0..=w.min(n - 1 - i) {
                let j = i + k;
                let rj = col_rows(j);
                let lo = ri.start.max(rj.start);
                let hi = ri.end.min(rj.end);
                let mut s = ZERO;
                for r in lo..hi {
                    s += cols_data[i][r - ri.start].conj() * cols_data[j][r - rj.start];
                }
                band[i * (w + 1) + k] = s;
            }
        }
        BandedGram { n, w, band }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Width `w` of the upper band.
    pub fn bandwidth(&self) -> usize {
        self.w
    }

    /// Upper band, `band[i * (w + 1) + k] = G[i, i + k]`.
    pub fn band(&self) -> &[C64] {
        &self.band
    }

    /// Whether `G - shift * I` is positive definite, by banded Cholesky.
    pub fn shifted_is_positive_definite(&self, shift: f64) -> bool {
        let mut r = self.band.clone();
        for i in 0..self.n {
            r[i * (self.w + 1)] -= shift;
        }
        band_cholesky_in_place(self.n, self.w, &mut r)
    }
}

/// Banded Cholesky of a Hermitian matrix stored as its upper band (layout
/// of [`BandedGram::band`]), overwriting `r`. False as soon as a pivot is
/// not positive.
pub fn band_cholesky_in_place(n: usize, w: usize, r: &mut [C64]) -> bool {
    let stride = w + 1;
    debug_assert!(r.len() >= n * stride);
    for i in 0..n {
        let d = r[i * stride].re;
        if !(d > 0.0) {
            return false;
        }
        let d = d.sqrt();
        r[i * stride] = C64::new(d, 0.0);
        let reach = w.min(n - 1 - i);
        let inv = 1.0 / d;
        for k in 1..=reach {
            r[i * stride + k] *= inv;
        }
        // trailing update G[j, l] -= conj(R[i, j]) R[i, l]
        for a in 1..=reach {
            let rij = r[i * stride + a].conj();
            if rij == ZERO {
                continue;
            }
            let j = i + a;
            for b in a..=reach {
                let t = rij * r[i * stride + b];
                r[j * stride + (b - a)] -= t;
            }
        }
    }
    true
}

/// Whether the smallest singular value of the banded `a` lies below `eps`,
/// decided as "`A^* A - eps^2 I` is not positive definite".
pub fn gram_smin_below(a: &ComplexMatrix, lower: usize, upper: usize, eps: f64) -> bool {
    !BandedGram::new(a, lower, upper).shifted_is_positive_definite(eps * eps)
}
