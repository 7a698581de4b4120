//! Spectra of operator models from model-level oracles: eigenvalues for
//! finite matrices, closure rules for diagonal and weighted-shift models,
//! and the symbol winding number for Toeplitz-class models. Square
//! truncations of infinite models are never used as ground truth.

pub mod grid;
pub mod radius;
pub mod symbol;

pub use grid::{adjoint_section_smin, ap_spectrum_grid, section_smin, surjectivity_spectrum_grid, GridSpec};
pub use radius::{spectral_radius_gelfand, GelfandRadius};
pub use symbol::SymbolCurve;

use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, ComplexMatrix, C64, ZERO};
use crate::models::{truncate, OperatorModel, TailRule, ToeplitzForm, TruncationSpec};
use crate::sets::{cluster_components, isolated_points, Nearest, PointCloud};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::TAU;

/// Sampling densities of the oracles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectralConfig {
    /// Lattice spacing for filled regions.
    pub grid_step: f64,
    /// Points per sampled curve or circle.
    pub curve_samples: usize,
    /// Tail entries sampled from a diagonal rule.
    pub tail_samples: usize,
    /// On-curve tolerance relative to `sum |k c_k|`.
    pub curve_tol_rel: f64,
    /// Defaults to ten grid steps.
    pub isolation_gap: Option<f64>,
    /// Section size for eigenvalues of perturbed Toeplitz models.
    pub riesz_section: usize,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        SpectralConfig {
            grid_step: 0.02,
            curve_samples: 2048,
            tail_samples: 4096,
            curve_tol_rel: 1e-4,
            isolation_gap: None,
            riesz_section: 64,
        }
    }
}

impl SpectralConfig {
    pub fn gap(&self) -> f64 {
        self.isolation_gap.unwrap_or(10.0 * self.grid_step)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.grid_step.is_finite()
            && self.grid_step > 0.0
            && self.curve_samples >= 8
            && self.curve_tol_rel.is_finite()
            && self.curve_tol_rel > 0.0
            && self.isolation_gap.is_none_or(|g| g.is_finite() && g > 0.0)
            && self.riesz_section >= 1;
        if !ok {
            return Err(Error::Domain(format!("malformed spectral config {self:?}")));
        }
        Ok(())
    }
}

/// Which oracle produced a set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Eigen,
    ClosureRule,
    Winding,
    InjectionModulus,
    Unavailable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexMap {
    pub grid: Vec<C64>,
    /// `None` within the curve tolerance.
    pub index_at: Vec<Option<i64>>,
    pub curve_tolerance: f64,
}

impl IndexMap {
    pub fn get(&self, z: C64) -> Option<Option<i64>> {
        self.grid.iter().position(|&g| g == z).map(|k| self.index_at[k])
    }

    /// Grid points with a defined index that differs from the index of some
    /// other defined point closer than `radius`: the sampled set where
    /// `i(T - mu1) != i(T - mu2)` for nearby `mu1`, `mu2`.
    pub fn index_jumps(&self, radius: f64) -> Vec<C64> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Vec::new();
        }
        let cell = |z: C64| ((z.re / radius).floor() as i64, (z.im / radius).floor() as i64);
        let mut cells: BTreeMap<(i64, i64), Vec<usize>> = BTreeMap::new();
        for (k, z) in self.grid.iter().enumerate() {
            if self.index_at[k].is_some() {
                cells.entry(cell(*z)).or_default().push(k);
            }
        }
        let r2 = radius * radius;
        let mut out = Vec::new();
        for (k, z) in self.grid.iter().enumerate() {
            let Some(i) = self.index_at[k] else { continue };
            let (cx, cy) = cell(*z);
            let jumps = (-1..=1).any(|dx| {
                (-1..=1).any(|dy| {
                    cells.get(&(cx + dx, cy + dy)).is_some_and(|ks| {
                        ks.iter()
                            .any(|&j| self.index_at[j] != Some(i) && (self.grid[j] - z).norm_sqr() < r2)
                    })
                })
            });
            if jumps {
                out.push(*z);
            }
        }
        out
    }

    pub fn points_with(&self, keep: impl Fn(Option<i64>) -> bool) -> Vec<C64> {
        self.grid
            .iter()
            .zip(&self.index_at)
            .filter(|(_, &i)| keep(i))
            .map(|(z, _)| *z)
            .collect()
    }
}

/// Sets that are `None` had no oracle for the model class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub sigma: Option<PointCloud>,
    pub sigma_ap: Option<PointCloud>,
    pub sigma_e: Option<PointCloud>,
    pub sigma_w: Option<PointCloud>,
    pub riesz_points: Option<PointCloud>,
    pub provenance: BTreeMap<String, Provenance>,
}

/// Probe for an injection-modulus `sigma_ap` in [`spectrum_report`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApProbe {
    pub grid: GridSpec,
    pub truncation: TruncationSpec,
    pub eps: f64,
}

enum Class {
    Finite(ComplexMatrix),
    Diagonal { prefix: Vec<C64>, tail: TailRule },
    /// Constant-tail weighted shift; `kernel` when some weight vanishes.
    Disk { radius: f64, kernel: bool },
    /// Weighted shift with weights tending to zero: compact, quasinilpotent.
    Quasinilpotent,
    Toeplitz(ToeplitzForm),
    /// Finite-rank perturbation of a class without a Toeplitz form.
    Perturbed(Box<Classified>),
}

struct Classified {
    class: Class,
    /// Every set is translated by this.
    offset: C64,
}

fn unavailable(what: &str, model: &OperatorModel) -> Error {
    Error::OracleUnavailable(format!("{what} of a {} model", describe(model)))
}

fn describe(model: &OperatorModel) -> String {
    match model {
        OperatorModel::Shifted { base, .. } => format!("shifted {}", describe(base)),
        OperatorModel::Perturbed { base, .. } => format!("perturbed {}", describe(base)),
        m => m.kind().to_string(),
    }
}

fn classify(model: &OperatorModel) -> Result<Classified> {
    model.validate()?;
    if let Some(d) = model.dim() {
        return Ok(Classified {
            class: Class::Finite(truncate(model, TruncationSpec::square(d))?),
            offset: ZERO,
        });
    }
    let plain = |class| Ok(Classified { class, offset: ZERO });
    match model {
        OperatorModel::Diagonal { prefix, tail } => plain(Class::Diagonal {
            prefix: prefix.clone(),
            tail: *tail,
        }),
        OperatorModel::WeightedShift { prefix, tail } => match tail {
            TailRule::Constant { c } => plain(Class::Disk {
                radius: c.norm(),
                kernel: prefix.contains(&0.0) || c.norm() == 0.0,
            }),
            _ => plain(Class::Quasinilpotent),
        },
        OperatorModel::ToeplitzTrigPoly { .. } => plain(Class::Toeplitz(model.toeplitz_form().expect("toeplitz"))),
        OperatorModel::Shifted { base, lambda } => {
            let mut b = classify(base)?;
            match &mut b.class {
                Class::Toeplitz(f) => {
                    *f.coeffs.entry(0).or_insert(ZERO) -= lambda;
                    f.coeffs.retain(|_, c| *c != ZERO);
                }
                _ => b.offset -= lambda,
            }
            Ok(b)
        }
        OperatorModel::Perturbed { base, .. } => {
            if let Some(f) = model.toeplitz_form() {
                return plain(Class::Toeplitz(f));
            }
            plain(Class::Perturbed(Box::new(classify(base)?)))
        }
        OperatorModel::FiniteMatrix { .. } => unreachable!("finite models have a dimension"),
    }
}

fn translated(points: Vec<C64>, offset: C64) -> Result<PointCloud> {
    PointCloud::new(points.into_iter().map(|z| z + offset).collect())
}

fn circle(radius: f64, count: usize) -> Vec<C64> {
    if radius == 0.0 {
        return vec![ZERO];
    }
    (0..count)
        .map(|k| C64::from_polar(radius, TAU * k as f64 / count as f64))
        .collect()
}

fn disk(radius: f64, cfg: &SpectralConfig) -> Vec<C64> {
    let mut pts = circle(radius, cfg.curve_samples);
    pts.extend(
        GridSpec::square(radius, cfg.grid_step)
            .points()
            .into_iter()
            .filter(|z| z.norm() < radius),
    );
    pts
}

fn diagonal_entries(prefix: &[C64], tail: &TailRule, cfg: &SpectralConfig) -> Vec<C64> {
    let p = prefix.len();
    let mut pts = prefix.to_vec();
    match tail {
        TailRule::Constant { .. } => {}
        _ => pts.extend((p..p + cfg.tail_samples).map(|j| tail.value(j, p))),
    }
    pts.push(tail.limit());
    pts
}

fn distinct(values: &[C64], gap: f64) -> Result<PointCloud> {
    let cloud = PointCloud::new(values.to_vec())?;
    let reps = cluster_components(&cloud, gap)
        .into_iter()
        .map(|c| c.points().iter().sum::<C64>() / c.len() as f64)
        .collect();
    Ok(PointCloud::new(reps)?.canonical())
}

fn eigen_gap(m: &ComplexMatrix) -> f64 {
    1e-6 * m.max_abs().max(1.0)
}

struct Winding {
    curve: SymbolCurve,
    samples: Vec<C64>,
    lattice: Vec<C64>,
    index: Vec<Option<i64>>,
}

impl Winding {
    fn new(coeffs: &BTreeMap<i64, C64>, cfg: &SpectralConfig) -> Result<Self> {
        let curve = SymbolCurve::new(coeffs, cfg.curve_tol_rel);
        let samples = curve.curve_points(cfg.curve_samples);
        let lattice = grid::lattice_around(&samples, cfg.grid_step, cfg.grid_step);
        let index = curve.indices(&lattice)?;
        Ok(Winding {
            curve,
            samples,
            lattice,
            index,
        })
    }

    fn region(&self, keep: impl Fn(i64) -> bool) -> Vec<C64> {
        let mut pts = self.samples.clone();
        pts.extend(
            self.lattice
                .iter()
                .zip(&self.index)
                .filter(|(_, i)| i.is_some_and(&keep))
                .map(|(z, _)| *z),
        );
        pts
    }
}

impl Classified {
    fn sigma(&self, cfg: &SpectralConfig) -> Result<(PointCloud, Provenance)> {
        let (pts, prov) = match &self.class {
            Class::Finite(m) => (finite_eigs(m)?, Provenance::Eigen),
            Class::Diagonal { prefix, tail } => (diagonal_entries(prefix, tail, cfg), Provenance::ClosureRule),
            Class::Disk { radius, .. } => (disk(*radius, cfg), Provenance::ClosureRule),
            Class::Quasinilpotent => (vec![ZERO], Provenance::ClosureRule),
            Class::Toeplitz(f) => {
                let w = Winding::new(&f.coeffs, cfg)?;
                let mut pts = w.region(|k| k != 0);
                if f.bump.is_some() {
                    pts.extend(self.toeplitz_riesz(f, &w, cfg)?.points());
                }
                (pts, Provenance::Winding)
            }
            Class::Perturbed(_) => {
                return Err(Error::OracleUnavailable(
                    "spectrum of a finite-rank perturbation without a Toeplitz form".into(),
                ))
            }
        };
        Ok((translated(pts, self.offset)?, prov))
    }

    fn sigma_e(&self, cfg: &SpectralConfig) -> Result<(PointCloud, Provenance)> {
        let (pts, prov) = match &self.class {
            Class::Finite(_) => (vec![], Provenance::ClosureRule),
            Class::Diagonal { tail, .. } => (vec![tail.limit()], Provenance::ClosureRule),
            Class::Disk { radius, .. } => (circle(*radius, cfg.curve_samples), Provenance::ClosureRule),
            Class::Quasinilpotent => (vec![ZERO], Provenance::ClosureRule),
            Class::Toeplitz(f) => (
                SymbolCurve::new(&f.coeffs, cfg.curve_tol_rel).curve_points(cfg.curve_samples),
                Provenance::Winding,
            ),
            Class::Perturbed(base) => {
                let (c, p) = base.sigma_e(cfg)?;
                return Ok((translated(c.points().to_vec(), self.offset)?, p));
            }
        };
        Ok((translated(pts, self.offset)?, prov))
    }

    fn sigma_w(&self, cfg: &SpectralConfig) -> Result<(PointCloud, Provenance)> {
        let (pts, prov) = match &self.class {
            Class::Finite(_) => (vec![], Provenance::ClosureRule),
            Class::Diagonal { tail, .. } => (vec![tail.limit()], Provenance::ClosureRule),
            Class::Disk { radius, .. } => (disk(*radius, cfg), Provenance::ClosureRule),
            Class::Quasinilpotent => (vec![ZERO], Provenance::ClosureRule),
            Class::Toeplitz(f) => (Winding::new(&f.coeffs, cfg)?.region(|k| k != 0), Provenance::Winding),
            Class::Perturbed(base) => {
                let (c, p) = base.sigma_w(cfg)?;
                return Ok((translated(c.points().to_vec(), self.offset)?, p));
            }
        };
        Ok((translated(pts, self.offset)?, prov))
    }

    fn riesz(&self, cfg: &SpectralConfig) -> Result<(PointCloud, Provenance)> {
        let (cloud, prov) = match &self.class {
            Class::Finite(m) => (distinct(&finite_eigs(m)?, eigen_gap(m))?, Provenance::Eigen),
            Class::Diagonal { prefix, tail } => {
                let gap = cfg.gap();
                let all = PointCloud::new(diagonal_entries(prefix, tail, cfg))?;
                let limit = tail.limit();
                (
                    isolated_points(&all, gap).filter(|z| (z - limit).norm() > gap),
                    Provenance::ClosureRule,
                )
            }
            Class::Disk { .. } | Class::Quasinilpotent => (PointCloud::empty(), Provenance::ClosureRule),
            Class::Toeplitz(f) if f.bump.is_none() => (PointCloud::empty(), Provenance::Winding),
            Class::Toeplitz(f) => {
                let w = Winding::new(&f.coeffs, cfg)?;
                (self.toeplitz_riesz(f, &w, cfg)?, Provenance::Eigen)
            }
            Class::Perturbed(_) => {
                return Err(Error::OracleUnavailable(
                    "Riesz points of a finite-rank perturbation without a Toeplitz form".into(),
                ))
            }
        };
        Ok((translated(cloud.points().to_vec(), self.offset)?, prov))
    }

    /// Eigenvalues of the `m` and `2m` sections that agree, sit farther
    /// than the gap from the curve and have index zero there.
    fn toeplitz_riesz(&self, f: &ToeplitzForm, w: &Winding, cfg: &SpectralConfig) -> Result<PointCloud> {
        let bump = f.bump.as_ref().expect("bump");
        let model = OperatorModel::ToeplitzTrigPoly { coeffs: f.coeffs.clone() }.perturbed(bump.clone());
        let band = f.coeffs.keys().map(|k| k.unsigned_abs() as usize).max().unwrap_or(0);
        let m = cfg.riesz_section.max(2 * (bump.rows() + band));
        let small = truncate(&model, TruncationSpec::square(m))?;
        let large = truncate(&model, TruncationSpec::square(2 * m))?;
        let es = eigenvalues(&small)?.values;
        let el = eigenvalues(&large)?.values;
        let stable = 1e-6 * large.max_abs().max(1.0);
        let near = Nearest::new(&PointCloud::new(es)?);
        let gap = cfg.gap();
        let mut keep = Vec::new();
        for z in el {
            if near.distance(z) > stable || w.curve.distance(z) <= gap {
                continue;
            }
            if w.curve.index(z)? == Some(0) {
                keep.push(z);
            }
        }
        distinct(&keep, eigen_gap(&large).max(stable))
    }

    fn sigma_ap(&self, cfg: &SpectralConfig) -> Result<(PointCloud, Provenance)> {
        let (pts, prov) = match &self.class {
            Class::Finite(m) => (finite_eigs(m)?, Provenance::Eigen),
            Class::Diagonal { prefix, tail } => (diagonal_entries(prefix, tail, cfg), Provenance::ClosureRule),
            Class::Disk { radius, kernel } => {
                let mut pts = circle(*radius, cfg.curve_samples);
                if *kernel {
                    pts.push(ZERO);
                }
                (pts, Provenance::ClosureRule)
            }
            Class::Quasinilpotent => (vec![ZERO], Provenance::ClosureRule),
            Class::Toeplitz(f) if f.bump.is_none() => (Winding::new(&f.coeffs, cfg)?.region(|k| k > 0), Provenance::Winding),
            Class::Toeplitz(_) | Class::Perturbed(_) => {
                return Err(Error::OracleUnavailable(
                    "approximate-point spectrum of a perturbed model".into(),
                ))
            }
        };
        Ok((translated(pts, self.offset)?, prov))
    }
}

fn finite_eigs(m: &ComplexMatrix) -> Result<Vec<C64>> {
    if m.is_empty() {
        return Ok(vec![]);
    }
    Ok(eigenvalues(m)?.values)
}

fn with_model<T>(model: &OperatorModel, what: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::OracleUnavailable(_) => unavailable(what, model),
        other => other,
    })
}

pub fn spectrum(model: &OperatorModel) -> Result<PointCloud> {
    spectrum_with(model, &SpectralConfig::default())
}

/// Sampled spectrum. Finite matrices give eigenvalues, diagonal models the
/// closure of their entries, constant-tail shifts a filled disk and
/// Toeplitz-class models the symbol curve plus the nonzero-index region
/// and any Riesz points.
pub fn spectrum_with(model: &OperatorModel, cfg: &SpectralConfig) -> Result<PointCloud> {
    cfg.validate()?;
    with_model(model, "spectrum", classify(model)?.sigma(cfg).map(|r| r.0))
}

/// `(sigma_e, sigma_w)`.
pub fn essential_and_weyl(model: &OperatorModel, cfg: &SpectralConfig) -> Result<(PointCloud, PointCloud)> {
    cfg.validate()?;
    let c = classify(model)?;
    let e = with_model(model, "essential spectrum", c.sigma_e(cfg))?.0;
    let w = with_model(model, "Weyl spectrum", c.sigma_w(cfg))?.0;
    Ok((e, w))
}

pub fn riesz_points(model: &OperatorModel, cfg: &SpectralConfig) -> Result<PointCloud> {
    cfg.validate()?;
    with_model(model, "Riesz points", classify(model)?.riesz(cfg).map(|r| r.0))
}

/// Approximate-point spectrum from the model oracle (no truncation).
pub fn ap_spectrum_oracle(model: &OperatorModel, cfg: &SpectralConfig) -> Result<PointCloud> {
    cfg.validate()?;
    with_model(model, "approximate-point spectrum", classify(model)?.sigma_ap(cfg).map(|r| r.0))
}

/// Point spectrum, exposed only where it is finitely certified: finite
/// matrices (eigenvalues) and diagonal models (entries).
pub fn point_spectrum(model: &OperatorModel, cfg: &SpectralConfig) -> Result<PointCloud> {
    model.validate()?;
    match model {
        OperatorModel::FiniteMatrix { matrix } => PointCloud::new(finite_eigs(matrix)?),
        OperatorModel::Diagonal { prefix, tail } => {
            let mut e = diagonal_entries(prefix, tail, cfg);
            if !matches!(tail, TailRule::Constant { .. }) {
                e.pop();
            }
            PointCloud::new(e)
        }
        _ => Err(unavailable("point spectrum", model)),
    }
}

/// Fredholm index of `model - lambda` from the symbol winding number;
/// `None` on the curve.
pub fn fredholm_index(model: &OperatorModel, lambda: C64, cfg: &SpectralConfig) -> Result<Option<i64>> {
    model.validate()?;
    let f = model.toeplitz_form().ok_or_else(|| unavailable("Fredholm index", model))?;
    SymbolCurve::new(&f.coeffs, cfg.curve_tol_rel).index(lambda)
}

/// Index over a grid. Finite-rank perturbations do not change the index,
/// so any model with a Toeplitz form qualifies.
pub fn fredholm_index_map(model: &OperatorModel, grid: &[C64], cfg: &SpectralConfig) -> Result<IndexMap> {
    model.validate()?;
    let f = model.toeplitz_form().ok_or_else(|| unavailable("Fredholm index", model))?;
    let curve = SymbolCurve::new(&f.coeffs, cfg.curve_tol_rel);
    let index_at = grid.par_iter().map(|&z| curve.index(z)).collect::<Result<Vec<_>>>()?;
    Ok(IndexMap {
        grid: grid.to_vec(),
        index_at,
        curve_tolerance: curve.tolerance(),
    })
}

/// All sets at once. Sets without an oracle are `None` and tagged
/// `unavailable`; other errors propagate. With a probe, `sigma_ap` comes
/// from injection moduli instead of the model oracle.
pub fn spectrum_report(model: &OperatorModel, cfg: &SpectralConfig, probe: Option<&ApProbe>) -> Result<SpectrumReport> {
    cfg.validate()?;
    let c = classify(model)?;
    let mut provenance = BTreeMap::new();
    let mut take = |name: &str, r: Result<(PointCloud, Provenance)>| -> Result<Option<PointCloud>> {
        match r {
            Ok((cloud, p)) => {
                provenance.insert(name.to_string(), p);
                Ok(Some(cloud.canonical()))
            }
            Err(Error::OracleUnavailable(_)) => {
                provenance.insert(name.to_string(), Provenance::Unavailable);
                Ok(None)
            }
            Err(e) => Err(e),
        }
    };
    let sigma = take("sigma", c.sigma(cfg))?;
    let ap = match probe {
        Some(p) => {
            p.grid.validate()?;
            ap_spectrum_grid(model, &p.grid.points(), p.truncation, p.eps).map(|g| (g, Provenance::InjectionModulus))
        }
        None => c.sigma_ap(cfg),
    };
    let sigma_ap = take("sigma_ap", ap)?;
    let sigma_e = take("sigma_e", c.sigma_e(cfg))?;
    let sigma_w = take("sigma_w", c.sigma_w(cfg))?;
    let riesz_points = take("riesz_points", c.riesz(cfg))?;
    Ok(SpectrumReport {
        sigma,
        sigma_ap,
        sigma_e,
        sigma_w,
        riesz_points,
        provenance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::{directed_distance, hausdorff_distance};

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn unit_shift_symbol() -> OperatorModel {
        OperatorModel::toeplitz([(1, c(1.0))])
    }

    #[test]
    fn finite_spectrum() {
        let f = OperatorModel::finite(ComplexMatrix::real_diag(&[1.0, 2.0]));
        let s = spectrum(&f).unwrap().canonical();
        assert_eq!(s.len(), 2);
        assert!((s.points()[0] - c(1.0)).norm() < 1e-14 && (s.points()[1] - c(2.0)).norm() < 1e-14);
        let r = riesz_points(&f, &SpectralConfig::default()).unwrap();
        assert_eq!(r.len(), 2);
        let (e, w) = essential_and_weyl(&f, &SpectralConfig::default()).unwrap();
        assert!(e.is_empty() && w.is_empty());
    }

    #[test]
    fn diagonal_closure_approximates_interval() {
        let n = 200;
        let prefix: Vec<C64> = (0..=n).map(|k| c(k as f64 / n as f64)).collect();
        let d = OperatorModel::diagonal(prefix, TailRule::constant(0.5));
        let s = spectrum(&d).unwrap();
        let interval = PointCloud::from_reals(&(0..=10000).map(|k| k as f64 / 10000.0).collect::<Vec<_>>()).unwrap();
        assert!(hausdorff_distance(&s, &interval).unwrap() <= 0.5 / n as f64 + 1e-4);
    }

    #[test]
    fn unit_symbol_fills_disk() {
        let cfg = SpectralConfig::default();
        let s = spectrum_with(&unit_shift_symbol(), &cfg).unwrap();
        let truth = disk(1.0, &cfg);
        assert!(hausdorff_distance(&s, &PointCloud::new(truth).unwrap()).unwrap() < 2.0 * cfg.grid_step);
        assert!(s.points().iter().all(|z| z.norm() <= 1.0 + 1e-9));
    }

    #[test]
    fn weyl_disk_membership() {
        let cfg = SpectralConfig::default();
        let (e, w) = essential_and_weyl(&unit_shift_symbol(), &cfg).unwrap();
        assert!(e.points().iter().all(|z| (z.norm() - 1.0).abs() < 1e-12));
        let members: std::collections::HashSet<(i64, i64)> = w
            .points()
            .iter()
            .map(|z| ((z.re / cfg.grid_step).round() as i64, (z.im / cfg.grid_step).round() as i64))
            .collect();
        for z in GridSpec::square(1.2, cfg.grid_step).points() {
            let key = ((z.re / cfg.grid_step).round() as i64, (z.im / cfg.grid_step).round() as i64);
            if z.norm() < 1.0 - 1e-9 {
                assert!(members.contains(&key), "{z}");
            }
        }
        assert!(w.points().iter().all(|z| z.norm() <= 1.0 + 1e-9));
    }

    #[test]
    fn harmonic_diagonal_sets() {
        let cfg = SpectralConfig::default();
        let d = OperatorModel::diagonal(vec![], TailRule::harmonic(1.0));
        let (e, w) = essential_and_weyl(&d, &cfg).unwrap();
        assert_eq!(e.points(), &[ZERO]);
        assert_eq!(w.points(), &[ZERO]);

        let d5 = OperatorModel::diagonal(vec![c(5.0)], TailRule::harmonic(1.0));
        // entries 5, 1/2, 1/3, ...; 1/2 and 1/3 are 1/6 apart
        let r = riesz_points(&d5, &cfg).unwrap().canonical();
        assert_eq!(r.points(), &[c(5.0)]);
        let fine = SpectralConfig {
            isolation_gap: Some(0.1),
            ..cfg
        };
        let r = riesz_points(&d5, &fine).unwrap().canonical();
        assert_eq!(r.points(), &[c(0.5), c(5.0)]);
    }

    #[test]
    fn unperturbed_toeplitz_has_no_riesz_points() {
        assert!(riesz_points(&unit_shift_symbol(), &SpectralConfig::default()).unwrap().is_empty());
    }

    #[test]
    fn perturbed_shift_gains_an_eigenvalue() {
        // T = S + 2 e_0 e_0^*: 2 is an isolated eigenvalue (index 0, off the circle)
        let bump = ComplexMatrix::diag(&[c(2.0)]);
        let t = unit_shift_symbol().perturbed(bump);
        let cfg = SpectralConfig::default();
        let r = riesz_points(&t, &cfg).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r.points()[0] - c(2.0)).norm() < 1e-8);
        let s = spectrum_with(&t, &cfg).unwrap();
        assert!(s.points().iter().any(|z| (z - c(2.0)).norm() < 1e-8));
        assert!(matches!(ap_spectrum_oracle(&t, &cfg), Err(Error::OracleUnavailable(_))));
    }

    #[test]
    fn index_jumps_hug_the_symbol_curve() {
        let model = OperatorModel::toeplitz([(1, C64::new(1.0, 0.0))]);
        let grid = GridSpec::square(1.5, 0.05).points();
        let map = fredholm_index_map(&model, &grid, &SpectralConfig::default()).unwrap();
        let jumps = map.index_jumps(0.08);
        assert!(!jumps.is_empty());
        assert!(jumps.iter().all(|z| (z.norm() - 1.0).abs() < 0.08));
        // flagged on both sides of the circle
        assert!(jumps.iter().any(|z| z.norm() < 1.0) && jumps.iter().any(|z| z.norm() > 1.0));
        assert!(map.index_jumps(0.0).is_empty());
    }

    #[test]
    fn shift_sets() {
        let cfg = SpectralConfig::default();
        let s = OperatorModel::shift(vec![0.5], TailRule::constant(2.0));
        let (e, w) = essential_and_weyl(&s, &cfg).unwrap();
        assert!(e.points().iter().all(|z| (z.norm() - 2.0).abs() < 1e-12));
        assert!(w.points().iter().all(|z| z.norm() <= 2.0 + 1e-12));
        let ap = ap_spectrum_oracle(&s, &cfg).unwrap();
        assert!(ap.points().iter().all(|z| (z.norm() - 2.0).abs() < 1e-12));
        // the Toeplitz route agrees with the closure rule
        let idx = fredholm_index(&s, c(1.0), &cfg).unwrap();
        assert_eq!(idx, Some(-1));
        assert!(riesz_points(&s, &cfg).unwrap().is_empty());
    }

    #[test]
    fn shifted_toeplitz_stays_on_lattice() {
        let cfg = SpectralConfig::default();
        let t = unit_shift_symbol().shifted(c(0.5));
        let (_, w) = essential_and_weyl(&t, &cfg).unwrap();
        let base = essential_and_weyl(&unit_shift_symbol(), &cfg).unwrap().1;
        let moved = PointCloud::new(base.points().iter().map(|z| z - c(0.5)).collect()).unwrap();
        assert!(hausdorff_distance(&w, &moved).unwrap() < 1e-9 + cfg.grid_step);
        assert!(fredholm_index(&t, c(-0.5), &cfg).unwrap() == Some(-1));
    }

    #[test]
    fn unsupported_classes() {
        let d = OperatorModel::diagonal(vec![], TailRule::harmonic(1.0)).perturbed(ComplexMatrix::identity(2));
        let cfg = SpectralConfig::default();
        assert!(matches!(spectrum_with(&d, &cfg), Err(Error::OracleUnavailable(_))));
        // compact perturbations keep sigma_e and sigma_w
        let (e, _) = essential_and_weyl(&d, &cfg).unwrap();
        assert_eq!(e.points(), &[ZERO]);
        assert!(fredholm_index_map(&d, &[ZERO], &cfg).is_err());
    }

    #[test]
    fn report_invariants() {
        let cfg = SpectralConfig::default();
        let models = vec![
            OperatorModel::finite(ComplexMatrix::real_diag(&[1.0, 2.0, 2.0])),
            OperatorModel::diagonal(vec![c(5.0), C64::new(0.0, 2.0)], TailRule::harmonic(1.0)),
            OperatorModel::shift(vec![], TailRule::constant(1.0)),
            OperatorModel::toeplitz([(1, c(1.0)), (-1, c(0.5))]),
            unit_shift_symbol().perturbed(ComplexMatrix::diag(&[c(2.0)])),
        ];
        for m in &models {
            let r = spectrum_report(m, &cfg, None).unwrap();
            let sigma = r.sigma.as_ref().unwrap();
            let e = r.sigma_e.as_ref().unwrap();
            let w = r.sigma_w.as_ref().unwrap();
            let riesz = r.riesz_points.as_ref().unwrap();
            let slack = 1e-9;
            if !e.is_empty() {
                assert!(directed_distance(e, w).unwrap() <= slack, "{m:?}");
                for z in riesz.points() {
                    assert!(Nearest::new(e).distance(*z) > cfg.gap() - slack, "{m:?}");
                }
            }
            if !w.is_empty() {
                assert!(directed_distance(w, sigma).unwrap() <= slack, "{m:?}");
            }
            if let Some(ap) = &r.sigma_ap {
                if !ap.is_empty() {
                    assert!(directed_distance(ap, sigma).unwrap() <= 2.0 * cfg.grid_step, "{m:?}");
                }
            }
        }
    }

    #[test]
    fn report_with_probe_and_json() {
        let cfg = SpectralConfig::default();
        let s = OperatorModel::shift(vec![], TailRule::constant(1.0));
        let probe = ApProbe {
            grid: GridSpec::square(1.2, 0.1),
            truncation: TruncationSpec::rectangular(60, 1),
            eps: 0.1,
        };
        let r = spectrum_report(&s, &cfg, Some(&probe)).unwrap();
        assert_eq!(r.provenance["sigma_ap"], Provenance::InjectionModulus);
        assert_eq!(r.provenance["sigma"], Provenance::ClosureRule);
        let ap = r.sigma_ap.as_ref().unwrap();
        assert!(ap.points().iter().all(|z| (z.norm() - 1.0).abs() < 0.15));
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"injection-modulus\""));
        let back: SpectrumReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);

        let p = OperatorModel::diagonal(vec![], TailRule::harmonic(1.0)).perturbed(ComplexMatrix::identity(1));
        let r = spectrum_report(&p, &cfg, None).unwrap();
        assert!(r.sigma.is_none());
        assert_eq!(r.provenance["sigma"], Provenance::Unavailable);
    }
}
