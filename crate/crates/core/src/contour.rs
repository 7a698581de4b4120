//! Cauchy contours, trapezoidal quadrature of the resolvent and the Riesz
//! projection `p = -(1 / 2 pi i) * integral (a - z)^-1 dz`.

use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, smallest_singular_value, ComplexMatrix, Lu, C64, I, ZERO};
use crate::tol::NumericConfig;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

/// One closed piece. Orientation `+1` keeps the enclosed domain on the
/// left; a polygon's orientation must match the sign of its vertex-order
/// area.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum Piece {
    Circle {
        center: C64,
        radius: f64,
        #[serde(default = "positive")]
        orientation: i8,
    },
    Polygon {
        vertices: Vec<C64>,
        #[serde(default = "positive")]
        orientation: i8,
    },
}

fn positive() -> i8 {
    1
}

impl Piece {
    pub fn circle(center: C64, radius: f64) -> Self {
        Piece::Circle {
            center,
            radius,
            orientation: 1,
        }
    }

    pub fn orientation(&self) -> i8 {
        match self {
            Piece::Circle { orientation, .. } | Piece::Polygon { orientation, .. } => *orientation,
        }
    }

    fn validate(&self) -> Result<()> {
        let o = self.orientation();
        if o != 1 && o != -1 {
            return Err(Error::Domain(format!("orientation must be +1 or -1, got {o}")));
        }
        match self {
            Piece::Circle { center, radius, .. } => {
                if !(center.re.is_finite() && center.im.is_finite() && radius.is_finite() && *radius > 0.0) {
                    return Err(Error::Domain(format!("bad circle: center {center}, radius {radius}")));
                }
            }
            Piece::Polygon { vertices, orientation } => {
                if vertices.len() < 3 || vertices.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
                    return Err(Error::Domain("polygon needs at least three finite vertices".into()));
                }
                let area = signed_area(vertices);
                if area == 0.0 {
                    return Err(Error::Domain("degenerate polygon".into()));
                }
                if (area > 0.0) != (*orientation > 0) {
                    return Err(Error::Domain(format!(
                        "polygon orientation {orientation} disagrees with its vertex order"
                    )));
                }
                let n = vertices.len();
                for i in 0..n {
                    for j in i + 1..n {
                        // adjacent edges share a vertex
                        if j == i + 1 || (i == 0 && j == n - 1) {
                            continue;
                        }
                        if segment_gap(vertices[i], vertices[(i + 1) % n], vertices[j], vertices[(j + 1) % n]) == 0.0 {
                            return Err(Error::Domain("self-intersecting polygon".into()));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn edges(&self) -> Vec<(C64, C64)> {
        match self {
            Piece::Polygon { vertices, .. } => {
                let n = vertices.len();
                (0..n).map(|i| (vertices[i], vertices[(i + 1) % n])).collect()
            }
            Piece::Circle { .. } => Vec::new(),
        }
    }

    /// Winding number about `z`; `None` when `z` lies on the piece.
    fn winding(&self, z: C64) -> Option<i64> {
        match self {
            Piece::Circle {
                center,
                radius,
                orientation,
            } => {
                let d = (z - center).norm();
                if d == *radius {
                    None
                } else if d < *radius {
                    Some(*orientation as i64)
                } else {
                    Some(0)
                }
            }
            Piece::Polygon { vertices, .. } => {
                let n = vertices.len();
                let mut total = 0.0;
                for i in 0..n {
                    let a = vertices[i] - z;
                    let b = vertices[(i + 1) % n] - z;
                    if point_segment_distance(z, vertices[i], vertices[(i + 1) % n]) == 0.0 {
                        return None;
                    }
                    total += (b / a).arg();
                }
                Some((total / TAU).round() as i64)
            }
        }
    }
}

fn signed_area(v: &[C64]) -> f64 {
    let n = v.len();
    0.5 * (0..n).map(|i| v[i].re * v[(i + 1) % n].im - v[(i + 1) % n].re * v[i].im).sum::<f64>()
}

fn point_segment_distance(z: C64, a: C64, b: C64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (z - a).norm();
    }
    let t = (((z - a) * d.conj()).re / len2).clamp(0.0, 1.0);
    (z - (a + d * t)).norm()
}

fn cross(a: C64, b: C64) -> f64 {
    a.re * b.im - a.im * b.re
}

/// Distance between two segments, `0` when they meet.
fn segment_gap(a: C64, b: C64, c: C64, d: C64) -> f64 {
    let d1 = cross(b - a, c - a);
    let d2 = cross(b - a, d - a);
    let d3 = cross(d - c, a - c);
    let d4 = cross(d - c, b - c);
    if d1 * d2 < 0.0 && d3 * d4 < 0.0 {
        return 0.0;
    }
    point_segment_distance(a, c, d)
        .min(point_segment_distance(b, c, d))
        .min(point_segment_distance(c, a, b))
        .min(point_segment_distance(d, a, b))
}

/// Gap between a circle and a segment, `0` when they meet.
fn circle_segment_gap(center: C64, r: f64, a: C64, b: C64) -> f64 {
    let near = point_segment_distance(center, a, b);
    let far = (a - center).norm().max((b - center).norm());
    if near <= r && r <= far {
        0.0
    } else if r < near {
        near - r
    } else {
        r - far
    }
}

fn piece_gap(p: &Piece, q: &Piece) -> f64 {
    match (p, q) {
        (
            Piece::Circle {
                center: c1, radius: r1, ..
            },
            Piece::Circle {
                center: c2, radius: r2, ..
            },
        ) => {
            let d = (c1 - c2).norm();
            (d - r1 - r2).max((r1 - r2).abs() - d).max(0.0)
        }
        (Piece::Circle { center, radius, .. }, poly) | (poly, Piece::Circle { center, radius, .. }) => poly
            .edges()
            .iter()
            .map(|&(a, b)| circle_segment_gap(*center, *radius, a, b))
            .fold(f64::INFINITY, f64::min),
        _ => {
            let mut g = f64::INFINITY;
            for &(a, b) in &p.edges() {
                for &(c, d) in &q.edges() {
                    g = g.min(segment_gap(a, b, c, d));
                }
            }
            g
        }
    }
}

pub const DEFAULT_NODES: usize = 128;

/// Oriented boundary of a Cauchy domain. `nodes_per_piece` is the node
/// count of each circle and the subinterval count of each polygon edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ContourRepr", into = "ContourRepr")]
pub struct CauchyContour {
    pieces: Vec<Piece>,
    nodes_per_piece: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ContourRepr {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    circle: Option<CircleRepr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pieces: Option<Vec<Piece>>,
    #[serde(default = "default_nodes")]
    nodes: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CircleRepr {
    center: C64,
    radius: f64,
    #[serde(default = "positive")]
    orientation: i8,
}

fn default_nodes() -> usize {
    DEFAULT_NODES
}

impl TryFrom<ContourRepr> for CauchyContour {
    type Error = Error;
    fn try_from(r: ContourRepr) -> Result<Self> {
        let pieces = match (r.circle, r.pieces) {
            (Some(c), None) => vec![Piece::Circle {
                center: c.center,
                radius: c.radius,
                orientation: c.orientation,
            }],
            (None, Some(p)) => p,
            _ => return Err(Error::Domain("contour needs exactly one of `circle` or `pieces`".into())),
        };
        CauchyContour::new(pieces, r.nodes)
    }
}

impl From<CauchyContour> for ContourRepr {
    fn from(c: CauchyContour) -> Self {
        match c.pieces.as_slice() {
            [Piece::Circle {
                center,
                radius,
                orientation,
            }] => ContourRepr {
                circle: Some(CircleRepr {
                    center: *center,
                    radius: *radius,
                    orientation: *orientation,
                }),
                pieces: None,
                nodes: c.nodes_per_piece,
            },
            _ => ContourRepr {
                circle: None,
                pieces: Some(c.pieces),
                nodes: c.nodes_per_piece,
            },
        }
    }
}

/// Quadrature node: the integral of `f` is approximated by `sum w f(z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub z: C64,
    pub w: C64,
}

impl CauchyContour {
    pub fn new(pieces: Vec<Piece>, nodes_per_piece: usize) -> Result<Self> {
        if nodes_per_piece == 0 {
            return Err(Error::Domain("nodes per piece must be positive".into()));
        }
        for p in &pieces {
            p.validate()?;
        }
        for i in 0..pieces.len() {
            for j in i + 1..pieces.len() {
                if piece_gap(&pieces[i], &pieces[j]) <= 0.0 {
                    return Err(Error::Domain(format!("contour pieces {i} and {j} meet")));
                }
            }
        }
        Ok(CauchyContour { pieces, nodes_per_piece })
    }

    pub fn circle(center: C64, radius: f64, nodes: usize) -> Result<Self> {
        CauchyContour::new(vec![Piece::circle(center, radius)], nodes)
    }

    pub fn empty() -> Self {
        CauchyContour {
            pieces: Vec::new(),
            nodes_per_piece: DEFAULT_NODES,
        }
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn nodes_per_piece(&self) -> usize {
        self.nodes_per_piece
    }

    pub fn with_nodes(&self, nodes: usize) -> Result<Self> {
        CauchyContour::new(self.pieces.clone(), nodes)
    }

    /// Nodes in piece order. Circles use the periodic trapezoid rule;
    /// polygon edges the composite trapezoid rule, with shared vertices
    /// merged.
    pub fn nodes(&self) -> Vec<Node> {
        let n = self.nodes_per_piece;
        let mut out = Vec::new();
        for p in &self.pieces {
            match p {
                Piece::Circle {
                    center,
                    radius,
                    orientation,
                } => {
                    let o = *orientation as f64;
                    for k in 0..n {
                        let e = C64::from_polar(1.0, TAU * k as f64 / n as f64);
                        out.push(Node {
                            z: center + e * radius,
                            w: I * e * (o * radius * TAU / n as f64),
                        });
                    }
                }
                Piece::Polygon { vertices, .. } => {
                    let m = vertices.len();
                    for i in 0..m {
                        let a = vertices[i];
                        let d = vertices[(i + 1) % m] - a;
                        let prev = a - vertices[(i + m - 1) % m];
                        // vertex a collects half a step from each adjacent edge
                        out.push(Node {
                            z: a,
                            w: (d + prev) / (2.0 * n as f64),
                        });
                        for t in 1..n {
                            out.push(Node {
                                z: a + d * (t as f64 / n as f64),
                                w: d / n as f64,
                            });
                        }
                    }
                }
            }
        }
        out
    }

    /// Winding number about `z`: `1` inside the domain, `0` outside, `None`
    /// on the contour.
    pub fn index_of(&self, z: C64) -> Option<i64> {
        let mut total = 0;
        for p in &self.pieces {
            total += p.winding(z)?;
        }
        Some(total)
    }

    /// Distance from `z` to the contour.
    pub fn distance(&self, z: C64) -> f64 {
        self.pieces
            .iter()
            .map(|p| match p {
                Piece::Circle { center, radius, .. } => ((z - center).norm() - radius).abs(),
                poly => poly
                    .edges()
                    .iter()
                    .map(|&(a, b)| point_segment_distance(z, a, b))
                    .fold(f64::INFINITY, f64::min),
            })
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolventCheck {
    pub admissible: bool,
    /// Smallest `s_min(a - z)` over the nodes; `None` without nodes.
    pub min_margin: Option<f64>,
    pub worst_node: Option<C64>,
}

fn node_margins(a: &ComplexMatrix, nodes: &[Node]) -> Vec<f64> {
    nodes.par_iter().map(|nd| smallest_singular_value(&a.shifted(nd.z))).collect()
}

fn worst(nodes: &[Node], margins: &[f64]) -> Option<(C64, f64)> {
    nodes
        .iter()
        .zip(margins)
        .fold(None, |acc: Option<(C64, f64)>, (nd, &m)| match acc {
            Some((_, best)) if best <= m => acc,
            _ => Some((nd.z, m)),
        })
}

/// Whether every quadrature node keeps `s_min(a - z) >= margin`.
pub fn contour_in_resolvent(a: &ComplexMatrix, c: &CauchyContour, margin: f64) -> Result<ResolventCheck> {
    square(a, "contour_in_resolvent")?;
    let nodes = c.nodes();
    let margins = node_margins(a, &nodes);
    Ok(match worst(&nodes, &margins) {
        None => ResolventCheck {
            admissible: true,
            min_margin: None,
            worst_node: None,
        },
        Some((z, m)) => ResolventCheck {
            admissible: m >= margin,
            min_margin: Some(m),
            worst_node: Some(z),
        },
    })
}

fn square(a: &ComplexMatrix, op: &'static str) -> Result<()> {
    if !a.is_square() {
        return Err(Error::shape(op, format!("{}x{} matrix is not square", a.rows(), a.cols())));
    }
    if !a.is_finite() {
        return Err(Error::NonFinite(op));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionReport {
    pub p: ComplexMatrix,
    /// `||p^2 - p||`.
    pub idempotency_defect: f64,
    /// `||p a - a p||`.
    pub commutation_defect: f64,
    pub trace: C64,
    /// `round(Re trace p)`, clamped at zero.
    pub riesz_count: usize,
    /// `|trace p - riesz_count|`.
    pub trace_defect: f64,
    /// Smallest `s_min(a - z)` over the nodes; `None` without nodes.
    pub min_resolvent_margin: Option<f64>,
}

/// Admissibility floor `1e-6 ||a||`.
pub fn margin_floor(a: &ComplexMatrix) -> f64 {
    NumericConfig::default()
        .contour_margin
        .at(a.operator_norm())
        .max(f64::MIN_POSITIVE)
}

pub fn spectral_projection(a: &ComplexMatrix, c: &CauchyContour) -> Result<ProjectionReport> {
    spectral_projection_with(a, c, margin_floor(a))
}

/// Riesz projection by quadrature, refused when some node comes closer to
/// the spectrum than `floor` (in smallest singular value).
pub fn spectral_projection_with(a: &ComplexMatrix, c: &CauchyContour, floor: f64) -> Result<ProjectionReport> {
    square(a, "spectral_projection")?;
    let n = a.rows();
    let nodes = c.nodes();
    let margins = node_margins(a, &nodes);
    let w = worst(&nodes, &margins);
    if let Some((z, m)) = w {
        if !(m >= floor) {
            return Err(Error::ContourTouchesSpectrum { z, margin: m });
        }
    }
    let pivot = NumericConfig::default().pivot;
    let resolvents = nodes
        .par_iter()
        .map(|nd| {
            let lu = Lu::new(&a.shifted(nd.z), pivot).map_err(|_| Error::ContourTouchesSpectrum {
                z: nd.z,
                margin: 0.0,
            })?;
            lu.solve(&ComplexMatrix::identity(n))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut p = ComplexMatrix::zeros(n, n);
    for (nd, r) in nodes.iter().zip(&resolvents) {
        p = &p + &r.scale(nd.w);
    }
    // -(1 / 2 pi i) = i / 2 pi
    let p = p.scale(I / (2.0 * PI));
    Ok(report(a, p, w.map(|x| x.1)))
}

fn report(a: &ComplexMatrix, p: ComplexMatrix, margin: Option<f64>) -> ProjectionReport {
    let idempotency_defect = (&(&p * &p) - &p).operator_norm();
    let commutation_defect = (&(&p * a) - &(a * &p)).operator_norm();
    let trace = if p.is_empty() { ZERO } else { p.trace() };
    let riesz_count = trace.re.round().max(0.0) as usize;
    ProjectionReport {
        idempotency_defect,
        commutation_defect,
        trace,
        riesz_count,
        trace_defect: (trace - C64::new(riesz_count as f64, 0.0)).norm(),
        min_resolvent_margin: margin,
        p,
    }
}

/// Report for a given `p`, without quadrature.
pub fn projection_report(a: &ComplexMatrix, p: ComplexMatrix) -> Result<ProjectionReport> {
    square(a, "projection_report")?;
    if p.rows() != a.rows() || p.cols() != a.cols() {
        return Err(Error::shape("projection_report", "p and a differ in shape"));
    }
    Ok(report(a, p, None))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verification {
    pub pass: bool,
    pub detail: String,
}

pub fn verify_projection(rep: &ProjectionReport, tol: f64) -> Verification {
    let idem = rep.idempotency_defect <= tol;
    let comm = rep.commutation_defect <= tol;
    Verification {
        pass: idem && comm,
        detail: format!(
            "||p^2 - p|| = {:.3e} ({}), ||pa - ap|| = {:.3e} ({}), tol {:.1e}",
            rep.idempotency_defect,
            if idem { "ok" } else { "too large" },
            rep.commutation_defect,
            if comm { "ok" } else { "too large" },
            tol
        ),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RadiusOutcome {
    /// `p != 0` and `r(p - q) < 1`, and indeed `q != 0`.
    Certified,
    /// `p = 0` or `r(p - q) >= 1`.
    NotApplicable,
    /// Hypotheses hold but `q = 0`.
    Contradiction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiusVerdict {
    pub outcome: RadiusOutcome,
    /// `r(p - q)` from the largest eigenvalue modulus.
    pub radius: f64,
    pub p_norm: f64,
    pub q_norm: f64,
}

/// Radius strictly below `1 - RADIUS_MARGIN` counts as `< 1`.
pub const RADIUS_MARGIN: f64 = 1e-8;

pub fn nonzero_under_radius_perturbation(p: &ComplexMatrix, q: &ComplexMatrix) -> Result<RadiusVerdict> {
    square(p, "nonzero_under_radius_perturbation")?;
    if q.rows() != p.rows() || q.cols() != p.cols() {
        return Err(Error::shape("nonzero_under_radius_perturbation", "p and q differ in shape"));
    }
    let p_norm = p.operator_norm();
    let idem = (&(p * p) - p).operator_norm();
    if idem > 1e-8 * p_norm.max(1.0).powi(2) {
        return Err(Error::Hypothesis(format!("p is not idempotent (||p^2 - p|| = {idem:.3e})")));
    }
    let d = p - q;
    let radius = if d.is_empty() { 0.0 } else { eigenvalues(&d)?.max_modulus() };
    let q_norm = q.operator_norm();
    // a nonzero idempotent has norm at least 1
    let p_nonzero = p_norm >= 0.5;
    let outcome = if p_nonzero && radius < 1.0 - RADIUS_MARGIN {
        if q_norm > 0.0 {
            RadiusOutcome::Certified
        } else {
            RadiusOutcome::Contradiction
        }
    } else {
        RadiusOutcome::NotApplicable
    };
    Ok(RadiusVerdict {
        outcome,
        radius,
        p_norm,
        q_norm,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyRow {
    pub n: usize,
    pub admissible: bool,
    pub min_resolvent_margin: Option<f64>,
    /// `||(p_n - p) p||`.
    pub defect_p: Option<f64>,
    /// `||(p_n - p) p_n||`.
    pub defect_pn: Option<f64>,
    pub norm_pn: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyReport {
    pub limit: ProjectionReport,
    pub rows: Vec<FamilyRow>,
    /// First `n` from which every member is admissible.
    pub n0: Option<usize>,
}

/// Projections `p_n` of `seq[n - 1]` against the projection `p` of `a`, for
/// a contour with `0` in its exterior.
pub fn projector_family_convergence(a: &ComplexMatrix, seq: &[ComplexMatrix], c: &CauchyContour) -> Result<FamilyReport> {
    match c.index_of(ZERO) {
        Some(0) => {}
        Some(k) => {
            return Err(Error::Hypothesis(format!(
                "0 must lie outside the contour (winding number {k})"
            )))
        }
        None => return Err(Error::Hypothesis("0 lies on the contour".into())),
    }
    let limit = spectral_projection(a, c)?;
    let p = &limit.p;
    let rows = seq
        .par_iter()
        .enumerate()
        .map(|(k, an)| {
            let n = k + 1;
            if an.rows() != a.rows() || an.cols() != a.cols() {
                return Err(Error::at_index(n, Error::shape("projector_family_convergence", "member shape")));
            }
            match spectral_projection(an, c) {
                Ok(r) => {
                    let d = &r.p - p;
                    Ok(FamilyRow {
                        n,
                        admissible: true,
                        min_resolvent_margin: r.min_resolvent_margin,
                        defect_p: Some((&d * p).operator_norm()),
                        defect_pn: Some((&d * &r.p).operator_norm()),
                        norm_pn: Some(r.p.operator_norm()),
                    })
                }
                Err(Error::ContourTouchesSpectrum { margin, .. }) => Ok(FamilyRow {
                    n,
                    admissible: false,
                    min_resolvent_margin: Some(margin),
                    defect_p: None,
                    defect_pn: None,
                    norm_pn: None,
                }),
                Err(e) => Err(Error::at_index(n, e)),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let n0 = match rows.iter().rposition(|r| !r.admissible) {
        None if rows.is_empty() => None,
        None => Some(1),
        Some(k) if k + 1 == rows.len() => None,
        Some(k) => Some(k + 2),
    };
    Ok(FamilyReport { limit, rows, n0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::inverse;
    use crate::linalg::test_util::{max_diff, random_matrix};

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn diag15() -> ComplexMatrix {
        ComplexMatrix::real_diag(&[1.0, 5.0])
    }

    #[test]
    fn resolvent_margins() {
        let a = diag15();
        let circ = CauchyContour::circle(c(1.0), 2.0, 128).unwrap();
        let r = contour_in_resolvent(&a, &circ, 1.999).unwrap();
        assert!(r.admissible);
        assert!((r.min_margin.unwrap() - 2.0).abs() < 1e-12);
        assert!(!contour_in_resolvent(&a, &circ, 2.001).unwrap().admissible);

        let on = CauchyContour::circle(c(0.0), 1.0, 4).unwrap();
        assert!(!contour_in_resolvent(&a, &on, 1e-12).unwrap().admissible);
        let e = contour_in_resolvent(&a, &CauchyContour::empty(), 1.0).unwrap();
        assert!(e.admissible && e.min_margin.is_none());
    }

    #[test]
    fn projection_examples() {
        let a = diag15();
        let circ = CauchyContour::circle(c(1.0), 2.0, 128).unwrap();
        let r = spectral_projection(&a, &circ).unwrap();
        assert!(max_diff(&r.p, &ComplexMatrix::real_diag(&[1.0, 0.0])) < 1e-12);
        assert_eq!(r.riesz_count, 1);
        assert!(r.trace_defect < 1e-12);

        let none = CauchyContour::circle(c(3.0), 0.5, 128).unwrap();
        let r = spectral_projection(&a, &none).unwrap();
        assert!(r.p.max_abs() < 1e-12 && r.riesz_count == 0);

        let all = CauchyContour::circle(c(3.0), 4.0, 128).unwrap();
        let r = spectral_projection(&a, &all).unwrap();
        assert!(max_diff(&r.p, &ComplexMatrix::identity(2)) < 1e-12 && r.riesz_count == 2);
    }

    #[test]
    fn touching_contour_refused() {
        let a = diag15();
        let on = CauchyContour::circle(c(0.0), 1.0, 4).unwrap();
        match spectral_projection(&a, &on) {
            Err(Error::ContourTouchesSpectrum { z, .. }) => assert!((z - c(1.0)).norm() < 1e-12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn polygons_and_holes() {
        let a = ComplexMatrix::real_diag(&[0.0, 1.0, 5.0]);
        let square = Piece::Polygon {
            vertices: vec![c(-0.5) + I * -0.5, c(1.5) + I * -0.5, c(1.5) + I * 0.5, c(-0.5) + I * 0.5],
            orientation: 1,
        };
        let hole = Piece::Circle {
            center: ZERO,
            radius: 0.25,
            orientation: -1,
        };
        let cont = CauchyContour::new(vec![square, hole], 256).unwrap();
        assert_eq!(cont.index_of(ZERO), Some(0));
        assert_eq!(cont.index_of(c(1.0)), Some(1));
        let r = spectral_projection(&a, &cont).unwrap();
        assert_eq!(r.riesz_count, 1);
        assert!(max_diff(&r.p, &ComplexMatrix::real_diag(&[0.0, 1.0, 0.0])) < 1e-4, "{:?}", r.p);
    }

    #[test]
    fn polygon_orientation_checked() {
        let cw = Piece::Polygon {
            vertices: vec![c(0.0), I, c(1.0) + I, c(1.0)],
            orientation: 1,
        };
        assert!(CauchyContour::new(vec![cw], 16).is_err());
        let bow = Piece::Polygon {
            vertices: vec![c(0.0), c(1.0) + I, c(1.0), I],
            orientation: 1,
        };
        assert!(CauchyContour::new(vec![bow], 16).is_err());
    }

    #[test]
    fn meeting_pieces_rejected() {
        let p = vec![Piece::circle(c(0.0), 1.0), Piece::circle(c(1.5), 1.0)];
        assert!(CauchyContour::new(p, 16).is_err());
        let nested = vec![
            Piece::circle(c(0.0), 2.0),
            Piece::Circle {
                center: c(0.0),
                radius: 1.0,
                orientation: -1,
            },
        ];
        assert!(CauchyContour::new(nested, 16).is_ok());
    }

    #[test]
    fn contour_json() {
        let cont: CauchyContour =
            serde_json::from_str(r#"{"circle": {"center": [1.0, 0.0], "radius": 2.0}, "nodes": 64}"#).unwrap();
        assert_eq!(cont, CauchyContour::circle(c(1.0), 2.0, 64).unwrap());
        let back: CauchyContour = serde_json::from_str(&serde_json::to_string(&cont).unwrap()).unwrap();
        assert_eq!(back, cont);
        let multi: CauchyContour = serde_json::from_str(
            r#"{"pieces": [{"circle": {"center": [0, 0], "radius": 2}}, {"circle": {"center": [0, 0], "radius": 1, "orientation": -1}}]}"#,
        )
        .unwrap();
        assert_eq!(multi.nodes_per_piece(), DEFAULT_NODES);
        assert!(serde_json::from_str::<CauchyContour>(r#"{"circle": {"center": [0, 0], "radius": -1}}"#).is_err());
        assert!(serde_json::from_str::<CauchyContour>(r#"{"nodes": 3}"#).is_err());
    }

    #[test]
    fn verification() {
        let a = diag15();
        let exact = projection_report(&a, ComplexMatrix::real_diag(&[1.0, 0.0])).unwrap();
        assert!(verify_projection(&exact, 1e-10).pass);
        let zero = projection_report(&a, ComplexMatrix::zeros(2, 2)).unwrap();
        assert!(verify_projection(&zero, 1e-10).pass);
        let mut bad = ComplexMatrix::real_diag(&[1.0, 0.0]);
        bad[(0, 1)] += 0.1;
        let bad = projection_report(&a, bad).unwrap();
        assert!(!verify_projection(&bad, 1e-3).pass);
    }

    #[test]
    fn radius_examples() {
        let p = ComplexMatrix::real_diag(&[1.0, 0.0]);
        assert_eq!(nonzero_under_radius_perturbation(&p, &p).unwrap().outcome, RadiusOutcome::Certified);
        let z = nonzero_under_radius_perturbation(&p, &ComplexMatrix::zeros(2, 2)).unwrap();
        assert_eq!(z.outcome, RadiusOutcome::NotApplicable);
        assert!((z.radius - 1.0).abs() < 1e-12);
        let q = ComplexMatrix::real_diag(&[0.5, 0.2]);
        let v = nonzero_under_radius_perturbation(&p, &q).unwrap();
        assert_eq!(v.outcome, RadiusOutcome::Certified);
        assert!((v.radius - 0.5).abs() < 1e-12);
        assert!(nonzero_under_radius_perturbation(&q, &p).is_err());
    }

    #[test]
    fn node_doubling_and_contour_independence() {
        for seed in 0..5 {
            let s = &ComplexMatrix::identity(4) + &random_matrix(4, 4, seed).scale_real(0.2);
            let d = ComplexMatrix::real_diag(&[0.0, 1.0, 3.0, 3.5]);
            let a = &(&s * &d) * &inverse(&s).unwrap();
            let c64 = CauchyContour::circle(c(0.0), 0.5, 64).unwrap();
            let p64 = spectral_projection(&a, &c64).unwrap().p;
            let p128 = spectral_projection(&a, &c64.with_nodes(128).unwrap()).unwrap().p;
            assert!(max_diff(&p64, &p128) < 1e-9);
            let other = CauchyContour::circle(c(-0.2), 0.6, 128).unwrap();
            let p2 = spectral_projection(&a, &other).unwrap().p;
            assert!(max_diff(&p128, &p2) < 1e-8);
            let rest = CauchyContour::circle(c(2.25), 1.75, 256).unwrap();
            let q = spectral_projection(&a, &rest).unwrap().p;
            assert!(max_diff(&(&p128 + &q), &ComplexMatrix::identity(4)) < 1e-8);
        }
    }

    #[test]
    fn family_examples() {
        let a = ComplexMatrix::real_diag(&[1.0, 5.0]);
        let circ = CauchyContour::circle(c(1.0), 0.5, 128).unwrap();
        let constant = vec![a.clone(); 5];
        let r = projector_family_convergence(&a, &constant, &circ).unwrap();
        assert_eq!(r.n0, Some(1));
        assert!(r.rows.iter().all(|row| row.defect_p == Some(0.0) && row.defect_pn == Some(0.0)));

        // eigenvalue 1 + 1/n sits outside at n = 1 and on a node at n = 2
        let moving: Vec<ComplexMatrix> = (1..=6)
            .map(|n| ComplexMatrix::real_diag(&[1.0 + 1.0 / n as f64, 5.0]))
            .collect();
        let r = projector_family_convergence(&a, &moving, &circ).unwrap();
        assert!(r.rows[0].admissible);
        assert!((r.rows[0].defect_p.unwrap() - 1.0).abs() < 1e-10);
        assert!(!r.rows[1].admissible);
        assert!(r.rows[2].admissible);
        assert_eq!(r.n0, Some(3));

        let inside = CauchyContour::circle(c(0.5), 1.0, 64).unwrap();
        assert!(matches!(
            projector_family_convergence(&a, &constant, &inside),
            Err(Error::Hypothesis(_))
        ));
    }
}
