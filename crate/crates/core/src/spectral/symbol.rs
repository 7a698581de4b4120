use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::models::eval_symbol;
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, TAU};
use std::sync::OnceLock;

pub const WINDING_START: usize = 512;
pub const WINDING_CAP: usize = 1 << 16;
const LEVELS: usize = 8; // 512 * 2^7 = 2^16

/// Closed curve `theta -> phi(theta)` of a trigonometric-polynomial symbol,
/// sampled on meshes of `512 * 2^k` points built on first use.
#[derive(Debug)]
pub struct SymbolCurve {
    coeffs: BTreeMap<i64, C64>,
    speed: f64,
    tol: f64,
    levels: [OnceLock<Vec<C64>>; LEVELS],
}

impl SymbolCurve {
    /// `tol_rel` scales the on-curve tolerance by `sum |k c_k|`, the
    /// largest possible speed of the curve.
    pub fn new(coeffs: &BTreeMap<i64, C64>, tol_rel: f64) -> Self {
        let speed: f64 = coeffs.iter().map(|(&k, c)| k.unsigned_abs() as f64 * c.norm()).sum();
        SymbolCurve {
            coeffs: coeffs.clone(),
            speed,
            tol: tol_rel * speed.max(1e-12),
            levels: Default::default(),
        }
    }

    pub fn coeffs(&self) -> &BTreeMap<i64, C64> {
        &self.coeffs
    }

    /// Points closer than this to the curve have an undefined index.
    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    /// `phi(2 pi k / N)`, `N = 512 * 2^level`.
    pub fn samples(&self, level: usize) -> &[C64] {
        self.levels[level].get_or_init(|| {
            let n = WINDING_START << level;
            (0..n).map(|k| eval_symbol(&self.coeffs, TAU * k as f64 / n as f64)).collect()
        })
    }

    /// Distance from `z` to the curve, through the polyline on 8192 points
    /// restricted to the coarse arcs that can hold the nearest point.
    pub fn distance(&self, z: C64) -> f64 {
        let coarse = self.samples(0);
        // every curve point is within half an arc length of a coarse sample
        let spacing = self.speed * TAU / coarse.len() as f64;
        let dist2: Vec<f64> = coarse.iter().map(|p| (p - z).norm_sqr()).collect();
        let screen = dist2.iter().copied().fold(f64::INFINITY, f64::min).sqrt();
        if screen > 4.0 * spacing + self.tol {
            return screen;
        }
        let reach2 = (screen + spacing) * (screen + spacing);
        let fine = self.samples(4);
        let (nc, ratio) = (coarse.len(), fine.len() / coarse.len());
        let mut best = f64::INFINITY;
        for (k, &d2) in dist2.iter().enumerate() {
            if d2 > reach2 {
                continue;
            }
            // fine segments covering the coarse arcs on both sides of sample k
            let start = (k + nc - 1) % nc * ratio;
            for t in 0..2 * ratio {
                let a = (start + t) % fine.len();
                best = best.min(segment_distance(fine[a], fine[(a + 1) % fine.len()], z));
            }
        }
        best
    }

    pub fn on_curve(&self, z: C64) -> bool {
        self.distance(z) <= self.tol
    }

    /// Winding number of the curve about `z`, summing argument increments
    /// on meshes refined until every increment is below `pi / 2`.
    pub fn winding(&self, z: C64) -> Result<i64> {
        let mut worst = 0.0;
        for level in 0..LEVELS {
            let s = self.samples(level);
            let mut total = 0.0;
            worst = 0.0f64;
            for k in 0..s.len() {
                let a = s[k] - z;
                let b = s[(k + 1) % s.len()] - z;
                let d = (b / a).arg();
                worst = worst.max(d.abs());
                total += d;
            }
            if worst < FRAC_PI_2 {
                return Ok((total / TAU).round() as i64);
            }
        }
        Err(Error::MeshTooCoarse {
            samples: WINDING_CAP,
            max_increment: worst,
        })
    }

    /// Fredholm index of `T - z`: minus the winding number, `None` on the
    /// curve.
    pub fn index(&self, z: C64) -> Result<Option<i64>> {
        if self.on_curve(z) {
            return Ok(None);
        }
        Ok(Some(-self.winding(z)?))
    }

    /// [`Self::index`] at many points. Rows of equal imaginary part share
    /// one sweep of the 8192-point polyline: its winding number about `z`
    /// is the signed count of crossings of the ray to the right of `z`.
    /// The polyline deviates from the curve by at most `dev`, so the two
    /// winding numbers agree once `z` is farther than `dev` from both;
    /// closer points fall back to [`Self::winding`].
    pub fn indices(&self, pts: &[C64]) -> Result<Vec<Option<i64>>> {
        let fine = self.samples(4);
        let h = TAU / fine.len() as f64;
        let curvature: f64 = self.coeffs.iter().map(|(&k, c)| (k * k) as f64 * c.norm()).sum();
        let dev = curvature * h * h / 4.0;
        let mut rows: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
        for (i, z) in pts.iter().enumerate() {
            rows.entry(z.im.to_bits()).or_default().push(i);
        }
        let per_row: Vec<Vec<(usize, Option<i64>)>> = rows
            .into_par_iter()
            .map(|(bits, members)| {
                let y = f64::from_bits(bits);
                let mut cross: Vec<(f64, i64)> = Vec::new();
                for k in 0..fine.len() {
                    let (a, b) = (fine[k], fine[(k + 1) % fine.len()]);
                    let sign = if a.im <= y && y < b.im {
                        1
                    } else if b.im <= y && y < a.im {
                        -1
                    } else {
                        continue;
                    };
                    let t = (y - a.im) / (b.im - a.im);
                    cross.push((a.re + t * (b.re - a.re), sign));
                }
                cross.sort_by(|p, q| p.0.total_cmp(&q.0));
                // suffix[j] = signed crossings at positions j..
                let mut suffix = vec![0i64; cross.len() + 1];
                for j in (0..cross.len()).rev() {
                    suffix[j] = suffix[j + 1] + cross[j].1;
                }
                members
                    .into_iter()
                    .map(|i| {
                        let z = pts[i];
                        let d = self.distance(z);
                        if d <= self.tol {
                            return Ok((i, None));
                        }
                        let w = if d > 2.0 * dev + 1e-12 {
                            suffix[cross.partition_point(|c| c.0 <= z.re)]
                        } else {
                            self.winding(z)?
                        };
                        Ok((i, Some(-w)))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        let mut out = vec![None; pts.len()];
        for (i, v) in per_row.into_iter().flatten() {
            out[i] = v;
        }
        Ok(out)
    }

    /// `count` points evenly spaced in the parameter.
    pub fn curve_points(&self, count: usize) -> Vec<C64> {
        (0..count)
            .map(|k| eval_symbol(&self.coeffs, TAU * k as f64 / count as f64))
            .collect()
    }
}

#[cfg(test)]
fn polyline_distance(pts: &[C64], z: C64) -> f64 {
    let n = pts.len();
    (0..n)
        .map(|k| segment_distance(pts[k], pts[(k + 1) % n], z))
        .fold(f64::INFINITY, f64::min)
}

fn segment_distance(a: C64, b: C64, z: C64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (z - a).norm();
    }
    let t = (((z - a) * d.conj()).re / len2).clamp(0.0, 1.0);
    (z - (a + d * t)).norm()
}
