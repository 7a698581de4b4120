use super::{cmp_point, PointCloud};
use crate::linalg::C64;

/// Nearest-point queries against a fixed cloud, by a sweep outward from the
/// query's real part over the points sorted by real part.
#[derive(Debug, Clone)]
pub struct Nearest {
    sorted: Vec<C64>,
}

impl Nearest {
    pub fn new(c: &PointCloud) -> Self {
        let mut sorted = c.points().to_vec();
        sorted.sort_by(cmp_point);
        sorted.dedup();
        Nearest { sorted }
    }

    /// `min |z - y|` over the cloud; `+inf` for an empty cloud.
    pub fn distance(&self, z: C64) -> f64 {
        let pts = &self.sorted;
        let start = pts.partition_point(|p| p.re < z.re);
        // squared distances; the sweep stops once the abscissa gap alone
        // exceeds the best distance, and the winner's distance is recomputed
        // with hypot
        let mut best = f64::INFINITY;
        let mut best_p = None;
        for p in &pts[start..] {
            let dx = p.re - z.re;
            if dx * dx > best {
                break;
            }
            let d = (p - z).norm_sqr();
            if d < best || best_p.is_none() {
                best = d;
                best_p = Some(*p);
            }
        }
        for p in pts[..start].iter().rev() {
            let dx = z.re - p.re;
            if dx * dx > best {
                break;
            }
            let d = (p - z).norm_sqr();
            if d < best || best_p.is_none() {
                best = d;
                best_p = Some(*p);
            }
        }
        best_p.map_or(f64::INFINITY, |p| (p - z).norm())
    }
}
