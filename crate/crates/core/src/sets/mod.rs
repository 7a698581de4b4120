//! Finite point clouds standing for compact subsets of the plane, with the
//! Hausdorff metric, tail lim inf / lim sup estimators and gap clustering.

mod nearest;

pub use nearest::Nearest;

use crate::error::{Error, Result};
use crate::linalg::C64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;

/// Finite set of complex numbers. Multiplicity is kept but ignored by every
/// distance.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct PointCloud {
    points: Vec<C64>,
}

impl PointCloud {
    pub fn new(points: Vec<C64>) -> Result<Self> {
        if points.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("point cloud"));
        }
        Ok(PointCloud { points })
    }

    pub fn empty() -> Self {
        PointCloud { points: Vec::new() }
    }

    pub fn from_reals(xs: &[f64]) -> Result<Self> {
        Self::new(xs.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn points(&self) -> &[C64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Lexicographic (re, im) order with exact duplicates removed.
    pub fn canonical(&self) -> PointCloud {
        let mut p = self.points.clone();
        p.sort_by(cmp_point);
        p.dedup();
        PointCloud { points: p }
    }

    pub fn union(&self, other: &PointCloud) -> PointCloud {
        let mut p = self.points.clone();
        p.extend_from_slice(&other.points);
        PointCloud { points: p }
    }

    pub fn conj(&self) -> PointCloud {
        PointCloud {
            points: self.points.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn filter(&self, keep: impl Fn(C64) -> bool) -> PointCloud {
        PointCloud {
            points: self.points.iter().copied().filter(|&z| keep(z)).collect(),
        }
    }

    /// One `re,im` line per point, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for z in &self.points {
            let _ = writeln!(s, "{},{}", fmt17(z.re), fmt17(z.im));
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut points = Vec::new();
        for (k, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let parse = |s: Option<&str>| -> Result<f64> {
                s.map(str::trim)
                    .and_then(|s| s.parse::<f64>().ok())
                    .ok_or_else(|| Error::Domain(format!("line {}: expected `re,im`", k + 1)))
            };
            let mut parts = line.split(',');
            let re = parse(parts.next())?;
            let im = parse(parts.next())?;
            if parts.next().is_some() {
                return Err(Error::Domain(format!("line {}: too many fields", k + 1)));
            }
            points.push(C64::new(re, im));
        }
        Self::new(points)
    }
}

impl TryFrom<Vec<[f64; 2]>> for PointCloud {
    type Error = Error;
    fn try_from(v: Vec<[f64; 2]>) -> Result<Self> {
        PointCloud::new(v.into_iter().map(|[re, im]| C64::new(re, im)).collect())
    }
}

impl From<PointCloud> for Vec<[f64; 2]> {
    fn from(c: PointCloud) -> Self {
        c.points.iter().map(|z| [z.re, z.im]).collect()
    }
}

impl FromIterator<C64> for PointCloud {
    /// Panics on non-finite points.
    fn from_iter<I: IntoIterator<Item = C64>>(iter: I) -> Self {
        PointCloud::new(iter.into_iter().collect()).expect("finite points")
    }
}

/// `{:.16e}`: seventeen significant digits, exact `f64` round trip.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

pub(crate) fn cmp_point(a: &C64, b: &C64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// Sequence `E_1, E_2, ...`; index origin 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CloudSequence {
    clouds: Vec<PointCloud>,
}

impl CloudSequence {
    pub fn new(clouds: Vec<PointCloud>) -> Result<Self> {
        if clouds.is_empty() {
            return Err(Error::Domain("cloud sequence must be nonempty".into()));
        }
        Ok(CloudSequence { clouds })
    }

    pub fn len(&self) -> usize {
        self.clouds.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `E_n`, 1-based.
    pub fn get(&self, n: usize) -> Option<&PointCloud> {
        n.checked_sub(1).and_then(|i| self.clouds.get(i))
    }

    pub fn clouds(&self) -> &[PointCloud] {
        &self.clouds
    }

    fn tail(&self, tail_start: usize) -> Result<&[PointCloud]> {
        if tail_start == 0 || tail_start > self.clouds.len() {
            return Err(Error::Domain(format!(
                "tail start {tail_start} outside 1..={}",
                self.clouds.len()
            )));
        }
        Ok(&self.clouds[tail_start - 1..])
    }
}

/// `max_{x in a} min_{y in b} |x - y|`.
pub fn directed_distance(a: &PointCloud, b: &PointCloud) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Domain("directed distance of an empty cloud".into()));
    }
    let nb = Nearest::new(b);
    Ok(a.points.iter().map(|&x| nb.distance(x)).fold(0.0, f64::max))
}

pub fn hausdorff_distance(a: &PointCloud, b: &PointCloud) -> Result<f64> {
    Ok(directed_distance(a, b)?.max(directed_distance(b, a)?))
}

/// Default fraction of tail indices that stands in for "infinitely many".
pub const LIMSUP_FRACTION: f64 = 0.5;

fn tail_frequency_filter(
    seq: &CloudSequence,
    eps: f64,
    tail_start: usize,
    required: impl Fn(usize) -> usize,
) -> Result<PointCloud> {
    if !(eps > 0.0) {
        return Err(Error::Domain(format!("eps must be positive, got {eps}")));
    }
    let tail = seq.tail(tail_start)?;
    let need = required(tail.len());
    let index: Vec<Option<Nearest>> = tail
        .iter()
        .map(|c| (!c.is_empty()).then(|| Nearest::new(c)))
        .collect();
    let mut candidates: Vec<C64> = tail.iter().flat_map(|c| c.points.iter().copied()).collect();
    candidates.sort_by(cmp_point);
    candidates.dedup();
    let points = candidates
        .into_iter()
        .filter(|&z| {
            let mut hits = 0;
            for (k, nb) in index.iter().enumerate() {
                if nb.as_ref().is_some_and(|nb| nb.distance(z) < eps) {
                    hits += 1;
                    if hits >= need {
                        return true;
                    }
                }
                if hits + (index.len() - k - 1) < need {
                    return false;
                }
            }
            hits >= need
        })
        .collect();
    Ok(PointCloud { points })
}

/// Tail points `z` whose open `eps`-ball meets at least `fraction` of the
/// tail clouds `E_n, n >= tail_start`.
pub fn limsup_estimate_with(
    seq: &CloudSequence,
    eps: f64,
    tail_start: usize,
    fraction: f64,
) -> Result<PointCloud> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::Domain(format!("fraction {fraction} outside (0, 1]")));
    }
    tail_frequency_filter(seq, eps, tail_start, |len| {
        ((fraction * len as f64).ceil() as usize).max(1)
    })
}

pub fn limsup_estimate(seq: &CloudSequence, eps: f64, tail_start: usize) -> Result<PointCloud> {
    limsup_estimate_with(seq, eps, tail_start, LIMSUP_FRACTION)
}

/// Tail points `z` whose open `eps`-ball meets every tail cloud.
pub fn liminf_estimate(seq: &CloudSequence, eps: f64, tail_start: usize) -> Result<PointCloud> {
    tail_frequency_filter(seq, eps, tail_start, |len| len)
}

/// Connected components of the graph joining points at distance `< gap`.
/// Points inside a cluster and the clusters themselves are in canonical
/// order, so the output does not depend on the input order.
pub fn cluster_components(a: &PointCloud, gap: f64) -> Vec<PointCloud> {
    let mut pts = a.points.clone();
    pts.sort_by(cmp_point);
    let n = pts.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    fn union(p: &mut [usize], i: usize, j: usize) {
        let (ri, rj) = (find(p, i), find(p, j));
        if ri != rj {
            p[ri.max(rj)] = ri.min(rj);
        }
    }
    // Cells of side gap / 2 have diameter below gap, so each cell is one
    // cluster; cells more than two apart hold no close pairs.
    let side = gap / 2.0;
    if side == f64::INFINITY {
        return vec![PointCloud { points: pts }];
    }
    if !(side > 0.0) {
        return pts.into_iter().map(|z| PointCloud { points: vec![z] }).collect();
    }
    let mut cells: BTreeMap<(i64, i64), Vec<usize>> = BTreeMap::new();
    for (i, z) in pts.iter().enumerate() {
        let key = ((z.re / side).floor() as i64, (z.im / side).floor() as i64);
        cells.entry(key).or_default().push(i);
    }
    for members in cells.values() {
        for &j in &members[1..] {
            union(&mut parent, members[0], j);
        }
    }
    for (&(cx, cy), a) in &cells {
        for dx in -2..=2i64 {
            for dy in -2..=2i64 {
                if (dx, dy) <= (0, 0) {
                    continue;
                }
                let Some(b) = cells.get(&(cx + dx, cy + dy)) else { continue };
                if find(&mut parent, a[0]) == find(&mut parent, b[0]) {
                    continue;
                }
                if a.iter().any(|&i| b.iter().any(|&j| (pts[i] - pts[j]).norm_sqr() < gap * gap)) {
                    union(&mut parent, a[0], b[0]);
                }
            }
        }
    }
    let mut groups: Vec<Vec<C64>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(pts[i]);
    }
    groups.into_iter().map(|points| PointCloud { points }).collect()
}

/// Points forming a cluster by themselves (up to exact duplicates).
pub fn isolated_points(a: &PointCloud, gap: f64) -> PointCloud {
    cluster_components(a, gap)
        .into_iter()
        .filter_map(|c| {
            let first = c.points[0];
            c.points.iter().all(|&z| z == first).then_some(first)
        })
        .collect()
}
