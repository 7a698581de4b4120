//! Symbolic descriptors of finite and structured infinite operators on
//! `l^2(N)`, their finite sections, norms and symbol data.

mod band;
mod norm;
mod seq;

pub use band::BandOperator;
pub use norm::{compose_difference_product, model_norm, NormEnclosure};
pub use seq::Seq;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64, ZERO};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::TAU;

/// Entries beyond an explicit prefix. Indices are 0-based and global, so a
/// rule continues the prefix rather than restarting after it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TailRule {
    /// `c` at every index.
    Constant { c: C64 },
    /// `scale / (j + 1)`: the `k`-th entry (1-based) is `scale / k`.
    Harmonic { scale: C64 },
    /// `c * ratio^(j - prefix_len)`, `|ratio| < 1`.
    Geometric { c: C64, ratio: f64 },
}

impl TailRule {
    pub fn constant(c: f64) -> Self {
        TailRule::Constant { c: C64::new(c, 0.0) }
    }

    pub fn harmonic(scale: f64) -> Self {
        TailRule::Harmonic {
            scale: C64::new(scale, 0.0),
        }
    }

    /// Value at global index `j >= prefix_len`.
    pub fn value(&self, j: usize, prefix_len: usize) -> C64 {
        match *self {
            TailRule::Constant { c } => c,
            TailRule::Harmonic { scale } => scale / (j as f64 + 1.0),
            TailRule::Geometric { c, ratio } => c * ratio.powi((j - prefix_len) as i32),
        }
    }

    /// `lim_j value(j)`.
    pub fn limit(&self) -> C64 {
        match *self {
            TailRule::Constant { c } => c,
            _ => ZERO,
        }
    }

    fn validate(&self) -> Result<()> {
        let finite = |z: C64| z.re.is_finite() && z.im.is_finite();
        match *self {
            TailRule::Constant { c } if !finite(c) => Err(Error::NonFinite("tail constant")),
            TailRule::Harmonic { scale } if !finite(scale) => Err(Error::NonFinite("tail scale")),
            TailRule::Geometric { c, ratio } => {
                if !finite(c) || !ratio.is_finite() {
                    Err(Error::NonFinite("geometric tail"))
                } else if ratio.abs() >= 1.0 {
                    Err(Error::EnclosureUnavailable(format!(
                        "geometric tail ratio {ratio} is not eventually monotone (need |ratio| < 1)"
                    )))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    fn is_real_nonnegative(&self) -> bool {
        let ok = |z: C64| z.im == 0.0 && z.re >= 0.0;
        match *self {
            TailRule::Constant { c } => ok(c),
            TailRule::Harmonic { scale } => ok(scale),
            TailRule::Geometric { c, ratio } => ok(c) && ratio >= 0.0,
        }
    }

    fn conj(&self) -> Self {
        match *self {
            TailRule::Constant { c } => TailRule::Constant { c: c.conj() },
            TailRule::Harmonic { scale } => TailRule::Harmonic {
                scale: scale.conj(),
            },
            TailRule::Geometric { c, ratio } => TailRule::Geometric {
                c: c.conj(),
                ratio,
            },
        }
    }
}

/// Operator descriptor. Every variant except `FiniteMatrix` acts on
/// `l^2(N)`; composites inherit the ambient space of their base.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "kebab-case", deny_unknown_fields)]
pub enum OperatorModel {
    FiniteMatrix {
        matrix: ComplexMatrix,
    },
    Diagonal {
        prefix: Vec<C64>,
        tail: TailRule,
    },
    /// `e_i -> w_i e_{i+1}`.
    WeightedShift {
        prefix: Vec<f64>,
        tail: TailRule,
    },
    /// Entry `(i, j)` is `c_{i-j}`; symbol `sum_k c_k e^{ik theta}`.
    #[serde(rename = "toeplitz")]
    ToeplitzTrigPoly {
        #[serde(with = "coeff_keys")]
        coeffs: BTreeMap<i64, C64>,
    },
    /// `base - lambda * I`.
    Shifted {
        base: Box<OperatorModel>,
        lambda: C64,
    },
    /// `base + bump`, the bump occupying the leading block.
    Perturbed {
        base: Box<OperatorModel>,
        bump: ComplexMatrix,
    },
}

/// Band offsets travel as JSON object keys, i.e. strings.
mod coeff_keys {
    use super::C64;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    use std::collections::BTreeMap;

    pub fn serialize<S: Serializer>(m: &BTreeMap<i64, C64>, s: S) -> Result<S::Ok, S::Error> {
        m.iter()
            .map(|(k, v)| (k.to_string(), *v))
            .collect::<BTreeMap<String, C64>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<i64, C64>, D::Error> {
        BTreeMap::<String, C64>::deserialize(d)?
            .into_iter()
            .map(|(k, v)| {
                k.trim()
                    .parse::<i64>()
                    .map(|k| (k, v))
                    .map_err(|_| D::Error::custom(format!("band offset `{k}` is not an integer")))
            })
            .collect()
    }
}

/// Toeplitz symbol plus a finite-rank remainder in the leading block.
#[derive(Debug, Clone, PartialEq)]
pub struct ToeplitzForm {
    pub coeffs: BTreeMap<i64, C64>,
    pub bump: Option<ComplexMatrix>,
}

impl ToeplitzForm {
    pub fn symbol(&self, theta: f64) -> C64 {
        eval_symbol(&self.coeffs, theta)
    }
}

pub(crate) fn eval_symbol(coeffs: &BTreeMap<i64, C64>, theta: f64) -> C64 {
    let t = theta.rem_euclid(TAU);
    coeffs
        .iter()
        .map(|(&k, &c)| c * C64::from_polar(1.0, k as f64 * t))
        .sum()
}

impl OperatorModel {
    pub fn finite(matrix: ComplexMatrix) -> Self {
        OperatorModel::FiniteMatrix { matrix }
    }

    pub fn diagonal(prefix: Vec<C64>, tail: TailRule) -> Self {
        OperatorModel::Diagonal { prefix, tail }
    }

    pub fn shift(prefix: Vec<f64>, tail: TailRule) -> Self {
        OperatorModel::WeightedShift { prefix, tail }
    }

    pub fn toeplitz(coeffs: impl IntoIterator<Item = (i64, C64)>) -> Self {
        OperatorModel::ToeplitzTrigPoly {
            coeffs: coeffs.into_iter().collect(),
        }
    }

    pub fn shifted(self, lambda: C64) -> Self {
        OperatorModel::Shifted {
            base: Box::new(self),
            lambda,
        }
    }

    pub fn perturbed(self, bump: ComplexMatrix) -> Self {
        OperatorModel::Perturbed {
            base: Box::new(self),
            bump,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            OperatorModel::FiniteMatrix { .. } => "finite-matrix",
            OperatorModel::Diagonal { .. } => "diagonal",
            OperatorModel::WeightedShift { .. } => "weighted-shift",
            OperatorModel::ToeplitzTrigPoly { .. } => "toeplitz",
            OperatorModel::Shifted { .. } => "shifted",
            OperatorModel::Perturbed { .. } => "perturbed",
        }
    }

    /// Ambient dimension; `None` for `l^2(N)`.
    pub fn dim(&self) -> Option<usize> {
        match self {
            OperatorModel::FiniteMatrix { matrix } => Some(matrix.rows()),
            OperatorModel::Shifted { base, .. } | OperatorModel::Perturbed { base, .. } => base.dim(),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            OperatorModel::FiniteMatrix { matrix } => {
                if !matrix.is_square() || matrix.is_empty() {
                    return Err(Error::shape("finite-matrix model", "matrix must be square and nonempty"));
                }
                Ok(())
            }
            OperatorModel::Diagonal { prefix, tail } => {
                if prefix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                    return Err(Error::NonFinite("diagonal prefix"));
                }
                tail.validate()
            }
            OperatorModel::WeightedShift { prefix, tail } => {
                if prefix.iter().any(|w| !w.is_finite() || *w < 0.0) {
                    return Err(Error::Domain("shift weights must be finite and nonnegative".into()));
                }
                tail.validate()?;
                if !tail.is_real_nonnegative() {
                    return Err(Error::Domain("shift tail must produce nonnegative real weights".into()));
                }
                Ok(())
            }
            OperatorModel::ToeplitzTrigPoly { coeffs } => {
                if coeffs.values().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                    return Err(Error::NonFinite("toeplitz coefficients"));
                }
                Ok(())
            }
            OperatorModel::Shifted { base, lambda } => {
                if !lambda.re.is_finite() || !lambda.im.is_finite() {
                    return Err(Error::NonFinite("shift parameter"));
                }
                base.validate()
            }
            OperatorModel::Perturbed { base, bump } => {
                base.validate()?;
                if !bump.is_square() {
                    return Err(Error::shape("perturbed model", "bump must be square"));
                }
                if let Some(d) = base.dim() {
                    if bump.rows() > d {
                        return Err(Error::shape(
                            "perturbed model",
                            format!("{0}x{0} bump exceeds ambient dimension {d}", bump.rows()),
                        ));
                    }
                }
                Ok(())
            }
        }
    }

    /// Symbol data when the model is a Toeplitz operator plus a finite-rank
    /// term. Constant-tail weighted shifts qualify with symbol `w z`.
    pub fn toeplitz_form(&self) -> Option<ToeplitzForm> {
        match self {
            OperatorModel::ToeplitzTrigPoly { coeffs } => Some(ToeplitzForm {
                coeffs: coeffs.clone(),
                bump: None,
            }),
            OperatorModel::WeightedShift {
                prefix,
                tail: TailRule::Constant { c },
            } => {
                let w = *c;
                let mut coeffs = BTreeMap::new();
                coeffs.insert(1, w);
                let bump = (!prefix.is_empty() && prefix.iter().any(|&p| C64::new(p, 0.0) != w)).then(|| {
                    let n = prefix.len() + 1;
                    ComplexMatrix::from_fn(n, n, |i, j| {
                        if i == j + 1 {
                            C64::new(prefix[j], 0.0) - w
                        } else {
                            ZERO
                        }
                    })
                });
                Some(ToeplitzForm { coeffs, bump })
            }
            OperatorModel::Shifted { base, lambda } => {
                let mut f = base.toeplitz_form()?;
                *f.coeffs.entry(0).or_insert(ZERO) -= lambda;
                Some(f)
            }
            OperatorModel::Perturbed { base, bump } => {
                let mut f = base.toeplitz_form()?;
                f.bump = Some(match f.bump.take() {
                    None => bump.clone(),
                    Some(b) => {
                        let n = b.rows().max(bump.rows());
                        &b.padded(n, n) + &bump.padded(n, n)
                    }
                });
                Some(f)
            }
            _ => None,
        }
    }

    /// `(lower, upper)` bandwidth: nonzeros only where `-upper <= i-j <= lower`.
    pub fn bandwidth(&self) -> Result<(usize, usize)> {
        Ok(BandOperator::from_model(self)?.bandwidth())
    }

    /// `self + s * other`, staying inside the descriptor catalog. Tails are
    /// merged only when they have the same kind (and ratio).
    pub fn add_scaled(&self, other: &OperatorModel, s: C64) -> Result<OperatorModel> {
        use OperatorModel::*;
        if s == ZERO {
            return Ok(self.clone());
        }
        let out = match (self, other) {
            (FiniteMatrix { matrix: a }, FiniteMatrix { matrix: b }) => {
                if a.rows() != b.rows() {
                    return Err(Error::Domain("finite models of different dimensions".into()));
                }
                FiniteMatrix {
                    matrix: a + &b.scale(s),
                }
            }
            (Diagonal { prefix: p1, tail: t1 }, Diagonal { prefix: p2, tail: t2 }) => {
                let (prefix, tail) = merge_rules(p1, t1, p2, t2, s)?;
                Diagonal { prefix, tail }
            }
            (WeightedShift { prefix: p1, tail: t1 }, WeightedShift { prefix: p2, tail: t2 }) => {
                let c1: Vec<C64> = p1.iter().map(|&w| C64::new(w, 0.0)).collect();
                let c2: Vec<C64> = p2.iter().map(|&w| C64::new(w, 0.0)).collect();
                let (prefix, tail) = merge_rules(&c1, t1, &c2, t2, s)?;
                if prefix.iter().any(|z| z.im != 0.0) {
                    return Err(Error::Domain("shift weights must stay real".into()));
                }
                WeightedShift {
                    prefix: prefix.iter().map(|z| z.re).collect(),
                    tail,
                }
            }
            (ToeplitzTrigPoly { coeffs: a }, ToeplitzTrigPoly { coeffs: b }) => {
                let mut c = a.clone();
                for (&k, &v) in b {
                    *c.entry(k).or_insert(ZERO) += s * v;
                }
                ToeplitzTrigPoly { coeffs: c }
            }
            (Shifted { base, lambda }, _) => Shifted {
                base: Box::new(base.add_scaled(other, s)?),
                lambda: *lambda,
            },
            (Perturbed { base, bump }, _) => Perturbed {
                base: Box::new(base.add_scaled(other, s)?),
                bump: bump.clone(),
            },
            (_, Shifted { base, lambda }) => Shifted {
                base: Box::new(self.add_scaled(base, s)?),
                lambda: *lambda * s,
            },
            (_, Perturbed { base, bump }) => Perturbed {
                base: Box::new(self.add_scaled(base, s)?),
                bump: bump.scale(s),
            },
            (base, FiniteMatrix { matrix }) if base.dim().is_none() => Perturbed {
                base: Box::new(base.clone()),
                bump: matrix.scale(s),
            },
            (a, b) => {
                return Err(Error::Domain(format!(
                    "cannot combine {} and {} models within the catalog",
                    a.kind(),
                    b.kind()
                )))
            }
        };
        out.validate()?;
        Ok(out)
    }

    /// Adjoint, when it stays inside the catalog.
    pub fn adjoint(&self) -> Result<OperatorModel> {
        use OperatorModel::*;
        Ok(match self {
            FiniteMatrix { matrix } => FiniteMatrix {
                matrix: matrix.adjoint(),
            },
            Diagonal { prefix, tail } => Diagonal {
                prefix: prefix.iter().map(|z| z.conj()).collect(),
                tail: tail.conj(),
            },
            ToeplitzTrigPoly { coeffs } => ToeplitzTrigPoly {
                coeffs: coeffs.iter().map(|(&k, &c)| (-k, c.conj())).collect(),
            },
            Shifted { base, lambda } => Shifted {
                base: Box::new(base.adjoint()?),
                lambda: lambda.conj(),
            },
            Perturbed { base, bump } => Perturbed {
                base: Box::new(base.adjoint()?),
                bump: bump.adjoint(),
            },
            WeightedShift { .. } => {
                return Err(Error::OracleUnavailable(
                    "the backward weighted shift is outside the model catalog".into(),
                ))
            }
        })
    }
}

/// Merges `(p1, t1) + s (p2, t2)` as prefix-plus-rule sequences.
fn merge_rules(p1: &[C64], t1: &TailRule, p2: &[C64], t2: &TailRule, s: C64) -> Result<(Vec<C64>, TailRule)> {
    let len = p1.len().max(p2.len());
    let at = |p: &[C64], t: &TailRule, j: usize| if j < p.len() { p[j] } else { t.value(j, p.len()) };
    // Geometric tails are anchored at their own prefix length; extending a
    // prefix re-anchors the rule.
    let reanchor = |p: &[C64], t: &TailRule| match *t {
        TailRule::Geometric { c, ratio } => TailRule::Geometric {
            c: c * ratio.powi((len - p.len()) as i32),
            ratio,
        },
        other => other,
    };
    let (r1, r2) = (reanchor(p1, t1), reanchor(p2, t2));
    let tail = match (r1, r2) {
        (a, TailRule::Constant { c }) if c == ZERO => a,
        (TailRule::Constant { c }, b) if c == ZERO => scale_rule(&b, s),
        (TailRule::Constant { c: a }, TailRule::Constant { c: b }) => TailRule::Constant { c: a + s * b },
        (TailRule::Harmonic { scale: a }, TailRule::Harmonic { scale: b }) => TailRule::Harmonic { scale: a + s * b },
        (TailRule::Geometric { c: a, ratio: x }, TailRule::Geometric { c: b, ratio: y }) if x == y => {
            TailRule::Geometric { c: a + s * b, ratio: x }
        }
        _ => {
            return Err(Error::Domain(
                "tails of different kinds do not combine into a single tail rule".into(),
            ))
        }
    };
    let prefix = (0..len).map(|j| at(p1, t1, j) + s * at(p2, t2, j)).collect();
    Ok((prefix, tail))
}

fn scale_rule(t: &TailRule, s: C64) -> TailRule {
    match *t {
        TailRule::Constant { c } => TailRule::Constant { c: c * s },
        TailRule::Harmonic { scale } => TailRule::Harmonic { scale: scale * s },
        TailRule::Geometric { c, ratio } => TailRule::Geometric { c: c * s, ratio },
    }
}

/// Square `m x m` or rectangular `(m + extra) x m` leading section.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruncationSpec {
    pub size: usize,
    #[serde(default)]
    pub extra_rows: Option<usize>,
}

impl TruncationSpec {
    pub fn square(size: usize) -> Self {
        TruncationSpec {
            size,
            extra_rows: None,
        }
    }

    pub fn rectangular(size: usize, extra_rows: usize) -> Self {
        TruncationSpec {
            size,
            extra_rows: Some(extra_rows),
        }
    }

    /// `(rows, cols)` of the section for a model of ambient dimension `dim`
    /// and lower bandwidth `lower`. Finite models cap both at `dim`.
    pub fn shape_for(&self, dim: Option<usize>, lower: usize) -> Result<(usize, usize)> {
        if self.size == 0 {
            return Err(Error::Contract("truncation size must be at least 1".into()));
        }
        let cap = |x: usize| dim.map_or(x, |d| x.min(d));
        let cols = cap(self.size);
        let rows = match self.extra_rows {
            None => cols,
            Some(k) => {
                let full = dim.is_some_and(|d| cols + k >= d);
                if k < lower && !full {
                    return Err(Error::Contract(format!(
                        "rectangular section needs at least {lower} extra rows (got {k})"
                    )));
                }
                cap(cols + k)
            }
        };
        Ok((rows, cols))
    }
}

/// Leading section of `model` in the canonical basis.
pub fn truncate(model: &OperatorModel, spec: TruncationSpec) -> Result<ComplexMatrix> {
    model.validate()?;
    let op = BandOperator::from_model(model)?;
    let (rows, cols) = spec.shape_for(op.dim(), op.bandwidth().0)?;
    Ok(op.section(rows, cols))
}

/// `phi(theta) = sum_k c_k e^{ik theta}`.
pub fn symbol_eval(model: &OperatorModel, theta: f64) -> Result<C64> {
    match model {
        OperatorModel::ToeplitzTrigPoly { coeffs } => Ok(eval_symbol(coeffs, theta)),
        other => Err(Error::Domain(format!(
            "symbol requested for a {} model",
            other.kind()
        ))),
    }
}
