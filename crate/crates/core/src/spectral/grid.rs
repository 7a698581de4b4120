use crate::error::{Error, Result};
use crate::linalg::{band_cholesky_in_place, smallest_singular_value, BandedGram, C64, ZERO};
use crate::models::{BandOperator, OperatorModel, TruncationSpec};
use crate::sets::PointCloud;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Axis-aligned lattice `step * (a + i b)` inside a box. Lattice points are
/// integer multiples of `step`, so grids of different boxes agree on their
/// overlap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub re: [f64; 2],
    pub im: [f64; 2],
    pub step: f64,
}

impl GridSpec {
    pub fn square(half_width: f64, step: f64) -> Self {
        GridSpec {
            re: [-half_width, half_width],
            im: [-half_width, half_width],
            step,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.step.is_finite()
            && self.step > 0.0
            && self.re.iter().chain(&self.im).all(|x| x.is_finite())
            && self.re[0] <= self.re[1]
            && self.im[0] <= self.im[1];
        if !ok {
            return Err(Error::Domain(format!("malformed grid {self:?}")));
        }
        let count = ((self.re[1] - self.re[0]) / self.step + 1.0) * ((self.im[1] - self.im[0]) / self.step + 1.0);
        if count > 4.0e6 {
            return Err(Error::Domain(format!("grid of about {count:.0} points is too large")));
        }
        Ok(())
    }

    /// Points in row-major order (imaginary part outer).
    pub fn points(&self) -> Vec<C64> {
        let r = axis(self.re, self.step);
        let i = axis(self.im, self.step);
        let mut out = Vec::with_capacity(r.len() * i.len());
        for &y in &i {
            for &x in &r {
                out.push(C64::new(x, y));
            }
        }
        out
    }
}

fn axis(range: [f64; 2], step: f64) -> Vec<f64> {
    let lo = (range[0] / step - 1e-9).ceil() as i64;
    let hi = (range[1] / step + 1e-9).floor() as i64;
    (lo..=hi).map(|k| k as f64 * step).collect()
}

/// Lattice points of spacing `step` in the bounding box of `pts`, grown by
/// `margin`.
pub(crate) fn lattice_around(pts: &[C64], step: f64, margin: f64) -> Vec<C64> {
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for p in pts {
        x0 = x0.min(p.re);
        x1 = x1.max(p.re);
        y0 = y0.min(p.im);
        y1 = y1.max(p.im);
    }
    if pts.is_empty() {
        return Vec::new();
    }
    GridSpec {
        re: [x0 - margin, x1 + margin],
        im: [y0 - margin, y1 + margin],
        step,
    }
    .points()
}

/// Gram band of a `rows x cols` section `A` (`rows >= cols`) split so that
/// the band of `(A - lambda J)^* (A - lambda J)`, `J` the leading identity
/// columns, costs one pass per `lambda`:
/// `G0[i, j] - lambda conj(A[j, i]) - conj(lambda) A[i, j] + |lambda|^2 delta_ij`.
struct SectionBands {
    n: usize,
    w: usize,
    g0: Vec<C64>,
    // a_up[i * (w + 1) + k] = A[i, i + k], a_lo likewise conj(A[i + k, i])
    a_up: Vec<C64>,
    a_lo: Vec<C64>,
}

impl SectionBands {
    fn new(op: &BandOperator, spec: TruncationSpec) -> Result<Self> {
        let (lower, upper) = op.bandwidth();
        let (rows, cols) = spec.shape_for(op.dim(), lower)?;
        if rows < cols {
            return Err(Error::Contract(format!("section {rows}x{cols} has fewer rows than columns")));
        }
        let mut vals = vec![vec![ZERO; cols]; lower + upper + 1];
        for (&off, s) in op.bands() {
            let row = &mut vals[(off + upper as i64) as usize];
            for (j, v) in row.iter_mut().enumerate() {
                *v = s.at(j);
            }
        }
        let entry = |i: usize, j: usize| {
            let off = i as i64 - j as i64;
            if off >= -(upper as i64) && off <= lower as i64 {
                vals[(off + upper as i64) as usize][j]
            } else {
                ZERO
            }
        };
        let g = BandedGram::from_fn(rows, cols, lower, upper, entry);
        let (n, w) = (cols, g.bandwidth());
        let mut a_up = vec![ZERO; n * (w + 1)];
        let mut a_lo = vec![ZERO; n * (w + 1)];
        for i in 0..n {
            for k in 0..=w.min(n - 1 - i) {
                a_up[i * (w + 1) + k] = entry(i, i + k);
                a_lo[i * (w + 1) + k] = entry(i + k, i).conj();
            }
        }
        Ok(SectionBands {
            n,
            w,
            g0: g.band().to_vec(),
            a_up,
            a_lo,
        })
    }

    fn smin_below(&self, lambda: C64, eps: f64, scratch: &mut Vec<C64>) -> bool {
        let stride = self.w + 1;
        let diag = lambda.norm_sqr() - eps * eps;
        scratch.clear();
        scratch.extend(
            self.g0
                .iter()
                .zip(&self.a_up)
                .zip(&self.a_lo)
                .map(|((g, up), lo)| g - lambda * lo - lambda.conj() * up),
        );
        for i in 0..self.n {
            scratch[i * stride] += diag;
        }
        !band_cholesky_in_place(self.n, self.w, scratch)
    }
}

fn require_rectangular(spec: TruncationSpec) -> Result<()> {
    if spec.extra_rows.is_none() {
        return Err(Error::Contract(
            "injection-modulus grids need a rectangular truncation".into(),
        ));
    }
    Ok(())
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::Domain(format!("eps must be positive, got {eps}")));
    }
    Ok(())
}

fn grid_members(op: &BandOperator, grid: &[C64], spec: TruncationSpec, eps: f64, conj: bool) -> Result<PointCloud> {
    require_rectangular(spec)?;
    check_eps(eps)?;
    let sec = SectionBands::new(op, spec)?;
    let keep: Vec<bool> = grid
        .par_iter()
        .map_init(Vec::new, |buf, &z| sec.smin_below(if conj { z.conj() } else { z }, eps, buf))
        .collect();
    PointCloud::new(grid.iter().zip(keep).filter(|(_, k)| *k).map(|(z, _)| *z).collect())
}

/// Grid points whose rectangular section of `model - lambda` has smallest
/// singular value below `eps`. The comparison is decided by a banded
/// Cholesky factorization of the Gram matrix shifted by `eps^2`.
pub fn ap_spectrum_grid(model: &OperatorModel, grid: &[C64], spec: TruncationSpec, eps: f64) -> Result<PointCloud> {
    model.validate()?;
    grid_members(&BandOperator::from_model(model)?, grid, spec, eps, false)
}

/// Grid points where `model - lambda` fails the same test on the adjoint
/// side: `conj(lambda)` lies in the approximate-point grid of the adjoint.
pub fn surjectivity_spectrum_grid(
    model: &OperatorModel,
    grid: &[C64],
    spec: TruncationSpec,
    eps: f64,
) -> Result<PointCloud> {
    model.validate()?;
    grid_members(&BandOperator::from_model(model)?.adjoint(), grid, spec, eps, true)
}

/// Smallest singular value of the section of `model - lambda`, by SVD.
pub fn section_smin(model: &OperatorModel, lambda: C64, spec: TruncationSpec) -> Result<f64> {
    model.validate()?;
    let op = BandOperator::from_model(model)?;
    let (rows, cols) = spec.shape_for(op.dim(), op.bandwidth().0)?;
    let mut m = op.section(rows, cols);
    for k in 0..cols.min(rows) {
        m[(k, k)] -= lambda;
    }
    Ok(smallest_singular_value(&m))
}

/// Same as [`section_smin`] for the adjoint at `conj(lambda)`.
pub fn adjoint_section_smin(model: &OperatorModel, lambda: C64, spec: TruncationSpec) -> Result<f64> {
    model.validate()?;
    let op = BandOperator::from_model(model)?.adjoint();
    let (rows, cols) = spec.shape_for(op.dim(), op.bandwidth().0)?;
    let mut m = op.section(rows, cols);
    for k in 0..cols.min(rows) {
        m[(k, k)] -= lambda.conj();
    }
    Ok(smallest_singular_value(&m))
}
