use super::{eval_symbol, BandOperator, OperatorModel};
use crate::error::Result;
use crate::linalg::{norm2, operator_norm, C64, ZERO};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Certified bracket `lower <= ||A|| <= upper`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormEnclosure {
    pub lower: f64,
    pub upper: f64,
}

impl NormEnclosure {
    pub fn exact(x: f64) -> Self {
        NormEnclosure { lower: x, upper: x }
    }

    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Columns of the section used for the power-iteration lower bound.
const SECTION: usize = 512;
const POWER_STEPS: usize = 400;

impl BandOperator {
    /// Operator norm: exact for finite support or a single band, otherwise
    /// `[power-iteration lower bound on a section, Schur-test upper bound]`.
    pub fn norm(&self) -> NormEnclosure {
        let bands = self.bands();
        if bands.is_empty() {
            return NormEnclosure::exact(0.0);
        }
        let (lower_bw, _) = self.bandwidth();
        if let Some(cols) = self.support_cols() {
            let rows = match self.dim() {
                Some(d) => d,
                None => cols + lower_bw,
            };
            return NormEnclosure::exact(operator_norm(&self.section(rows, cols)));
        }
        if bands.len() == 1 {
            let (lo, hi) = bands.values().next().expect("one band").sup_abs();
            return NormEnclosure { lower: lo, upper: hi };
        }
        let band_lower = bands.values().map(|s| s.sup_abs().0).fold(0.0, f64::max);
        let triangle: f64 = bands.values().map(|s| s.sup_abs().1).sum();
        let upper = triangle.min(self.schur_bound());
        let lower = band_lower.max(self.power_lower_bound()).min(upper);
        NormEnclosure { lower, upper }
    }

    /// `sqrt(sup row sum * sup column sum)` with the tails bounded by the
    /// monotone term bounds.
    fn schur_bound(&self) -> f64 {
        let bands = self.bands();
        let maxoff = bands.keys().map(|k| k.abs()).max().unwrap_or(0) as usize;
        let p = bands.values().map(|s| s.tail_start()).max().unwrap_or(0);
        let j0 = p + 2 * maxoff + 64;
        let mut col_sup: f64 = bands.values().map(|s| s.tail_bound(j0)).sum();
        let mut row_sup: f64 = bands
            .iter()
            .map(|(&off, s)| s.tail_bound((j0 as i64 - off) as usize))
            .sum();
        for j in 0..j0 + maxoff {
            let col: f64 = bands.values().map(|s| s.at(j).norm()).sum();
            col_sup = col_sup.max(col);
            let row: f64 = bands
                .iter()
                .filter(|(&off, _)| j as i64 - off >= 0)
                .map(|(&off, s)| s.at((j as i64 - off) as usize).norm())
                .sum();
            row_sup = row_sup.max(row);
        }
        (row_sup * col_sup).sqrt()
    }

    /// `||A x|| / ||x||` after power iteration on the leading section; any
    /// such quotient is a lower bound for the norm.
    fn power_lower_bound(&self) -> f64 {
        let (lower_bw, _) = self.bandwidth();
        let cols = SECTION;
        let rows = cols + lower_bw;
        let bands: Vec<(i64, Vec<C64>)> = self
            .bands()
            .iter()
            .map(|(&off, s)| (off, (0..cols).map(|j| s.at(j)).collect()))
            .collect();
        let apply = |x: &[C64]| {
            let mut y = vec![ZERO; rows];
            for (off, v) in &bands {
                for j in 0..cols {
                    let i = j as i64 + off;
                    if i >= 0 && (i as usize) < rows {
                        y[i as usize] += v[j] * x[j];
                    }
                }
            }
            y
        };
        let apply_adj = |y: &[C64]| {
            let mut x = vec![ZERO; cols];
            for (off, v) in &bands {
                for j in 0..cols {
                    let i = j as i64 + off;
                    if i >= 0 && (i as usize) < rows {
                        x[j] += v[j].conj() * y[i as usize];
                    }
                }
            }
            x
        };
        // smooth start vector: overlaps the top of the spectrum of
        // near-Toeplitz sections
        let mut x: Vec<C64> = (0..cols)
            .map(|j| C64::new((std::f64::consts::PI * (j as f64 + 1.0) / (cols as f64 + 1.0)).sin(), 0.0))
            .collect();
        let mut best = 0.0f64;
        let mut prev = 0.0f64;
        for _ in 0..POWER_STEPS {
            let nx = norm2(&x);
            if nx == 0.0 {
                break;
            }
            x.iter_mut().for_each(|v| *v /= nx);
            let y = apply(&x);
            let q = norm2(&y);
            best = best.max(q);
            if (q - prev).abs() <= 1e-14 * q {
                break;
            }
            prev = q;
            x = apply_adj(&y);
        }
        best
    }
}

/// Norm of a model. Diagonal and weighted-shift models are single-band and
/// exact; Toeplitz models return `[max over sampled |phi|, sum |c_k|]`.
pub fn model_norm(model: &OperatorModel) -> Result<NormEnclosure> {
    model.validate()?;
    if let OperatorModel::ToeplitzTrigPoly { coeffs } = model {
        let upper: f64 = coeffs.values().map(|c| c.norm()).sum();
        let n = 4096;
        let lower = (0..n)
            .map(|k| eval_symbol(coeffs, TAU * k as f64 / n as f64).norm())
            .fold(0.0, f64::max)
            .min(upper);
        return Ok(NormEnclosure { lower, upper });
    }
    Ok(BandOperator::from_model(model)?.norm())
}

/// Enclosure of `||(a - b) c||`.
pub fn compose_difference_product(a: &OperatorModel, b: &OperatorModel, c: &OperatorModel) -> Result<NormEnclosure> {
    for m in [a, b, c] {
        m.validate()?;
    }
    let d = BandOperator::from_model(a)?.sub(&BandOperator::from_model(b)?)?;
    Ok(d.mul(&BandOperator::from_model(c)?)?.norm())
}
