use crate::error::{Error, Result};
use crate::linalg::{inverse, operator_norm, ComplexMatrix, C64};
use crate::models::OperatorModel;
use crate::random;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Scalar rate `r(n)` of a perturbation family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rate", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Rate {
    /// `scale / n`.
    Harmonic {
        #[serde(default = "one")]
        scale: f64,
    },
    /// `scale * ratio^n`.
    Geometric {
        ratio: f64,
        #[serde(default = "one")]
        scale: f64,
    },
    Constant { value: f64 },
}

fn one() -> f64 {
    1.0
}

impl Rate {
    pub fn at(&self, n: usize) -> f64 {
        match *self {
            Rate::Harmonic { scale } => scale / n as f64,
            Rate::Geometric { ratio, scale } => scale * ratio.powi(n as i32),
            Rate::Constant { value } => value,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Rate::Harmonic { scale } => scale.is_finite(),
            Rate::Geometric { ratio, scale } => ratio.is_finite() && scale.is_finite(),
            Rate::Constant { value } => value.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::NonFinite("rate"))
        }
    }
}

/// Declarative family description. Randomized kinds draw from the scenario
/// seed, so the seed fixes every member.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FamilySpec {
    /// `T_n = T`.
    Constant { limit: OperatorModel },
    /// `T_n = member` for every `n`.
    Fixed { limit: OperatorModel, member: OperatorModel },
    /// `T_n = T + r(n) D`.
    Perturbation {
        limit: OperatorModel,
        direction: OperatorModel,
        rate: Rate,
    },
    /// `T_n = members[n - first]`.
    Explicit {
        limit: OperatorModel,
        members: Vec<OperatorModel>,
        #[serde(default = "first_index")]
        first: usize,
    },
    /// `T_n = even` for even `n`, `odd` otherwise.
    Alternating {
        limit: OperatorModel,
        even: OperatorModel,
        odd: OperatorModel,
    },
    /// Random `T` and unit-norm direction `E`, `T_n = T + r(n) E`. Without
    /// `dim`, the size is drawn from `2..=8`.
    RandomMatrix {
        #[serde(default)]
        dim: Option<usize>,
        rate: Rate,
    },
    /// `T = S diag(eigenvalues) S^-1` with random `S` of condition number
    /// `cond_max`, and `T_n = T + r(n) S M S^-1` for `M = direction`.
    ConjugatedDiagonal {
        eigenvalues: Vec<C64>,
        #[serde(default)]
        direction: Option<ComplexMatrix>,
        #[serde(default = "zero_rate")]
        rate: Rate,
        #[serde(default = "default_cond")]
        cond_max: f64,
    },
}

fn first_index() -> usize {
    1
}

fn zero_rate() -> Rate {
    Rate::Constant { value: 0.0 }
}

fn default_cond() -> f64 {
    50.0
}

const SALT_FAMILY: u64 = 0x46_414d;

#[derive(Debug, Clone, PartialEq)]
enum Rule {
    Constant,
    Fixed(OperatorModel),
    Perturbation { direction: OperatorModel, rate: Rate },
    Explicit { members: Vec<OperatorModel>, first: usize },
    Alternating { even: OperatorModel, odd: OperatorModel },
}

/// A limit together with an index rule `n -> T_n` on `first..=last`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSequence {
    limit: OperatorModel,
    rule: Rule,
    first: usize,
    last: usize,
    /// Similarity used by conjugated families, kept for closed forms.
    similarity: Option<ComplexMatrix>,
}

impl OperatorSequence {
    pub fn constant(limit: OperatorModel, n_range: (usize, usize)) -> Result<Self> {
        Self::from_spec(&FamilySpec::Constant { limit }, n_range, 0)
    }

    pub fn perturbation(limit: OperatorModel, direction: OperatorModel, rate: Rate, n_range: (usize, usize)) -> Result<Self> {
        Self::from_spec(&FamilySpec::Perturbation { limit, direction, rate }, n_range, 0)
    }

    pub fn from_spec(spec: &FamilySpec, n_range: (usize, usize), seed: u64) -> Result<Self> {
        let (first, last) = n_range;
        if first == 0 || last < first {
            return Err(Error::Domain(format!("n_range must satisfy 1 <= first <= last, got {n_range:?}")));
        }
        let mut similarity = None;
        let (limit, rule) = match spec {
            FamilySpec::Constant { limit } => (limit.clone(), Rule::Constant),
            FamilySpec::Fixed { limit, member } => (limit.clone(), Rule::Fixed(member.clone())),
            FamilySpec::Perturbation { limit, direction, rate } => {
                rate.validate()?;
                (
                    limit.clone(),
                    Rule::Perturbation {
                        direction: direction.clone(),
                        rate: *rate,
                    },
                )
            }
            FamilySpec::Explicit { limit, members, first: f } => {
                if *f > first || f + members.len() <= last {
                    return Err(Error::Domain(format!(
                        "explicit family covers {}..{} but n_range is {first}..={last}",
                        f,
                        f + members.len()
                    )));
                }
                (
                    limit.clone(),
                    Rule::Explicit {
                        members: members.clone(),
                        first: *f,
                    },
                )
            }
            FamilySpec::Alternating { limit, even, odd } => (
                limit.clone(),
                Rule::Alternating {
                    even: even.clone(),
                    odd: odd.clone(),
                },
            ),
            FamilySpec::RandomMatrix { dim, rate } => {
                rate.validate()?;
                let mut rng = random::rng(seed, SALT_FAMILY);
                let d = match dim {
                    Some(0) => return Err(Error::Domain("random family needs dim >= 1".into())),
                    Some(d) => *d,
                    None => rng.gen_range(2..=8),
                };
                let t = random::matrix(&mut rng, d, d).scale_real(1.0 / (d as f64).sqrt());
                let e = random::matrix(&mut rng, d, d);
                let e = e.scale_real(1.0 / operator_norm(&e));
                (
                    OperatorModel::finite(t),
                    Rule::Perturbation {
                        direction: OperatorModel::finite(e),
                        rate: *rate,
                    },
                )
            }
            FamilySpec::ConjugatedDiagonal {
                eigenvalues,
                direction,
                rate,
                cond_max,
            } => {
                rate.validate()?;
                let d = eigenvalues.len();
                if d == 0 || !(cond_max.is_finite() && *cond_max >= 1.0) {
                    return Err(Error::Domain("conjugated family needs eigenvalues and cond_max >= 1".into()));
                }
                let mut rng = random::rng(seed, SALT_FAMILY);
                let (a, s) = random::similar_diagonal(&mut rng, eigenvalues, *cond_max)?;
                let m = direction.clone().unwrap_or_else(|| ComplexMatrix::zeros(d, d));
                if m.rows() != d || m.cols() != d {
                    return Err(Error::shape("conjugated family", "direction must match the eigenvalue count"));
                }
                let e = &(&s * &m) * &inverse(&s)?;
                similarity = Some(s);
                (
                    OperatorModel::finite(a),
                    Rule::Perturbation {
                        direction: OperatorModel::finite(e),
                        rate: *rate,
                    },
                )
            }
        };
        limit.validate()?;
        let seq = OperatorSequence {
            limit,
            rule,
            first,
            last,
            similarity,
        };
        seq.check_ambient()?;
        Ok(seq)
    }

    fn check_ambient(&self) -> Result<()> {
        let dim = self.limit.dim();
        let probes: Vec<&OperatorModel> = match &self.rule {
            Rule::Constant => vec![],
            Rule::Fixed(m) => vec![m],
            Rule::Perturbation { direction, .. } => vec![direction],
            Rule::Explicit { members, .. } => members.iter().collect(),
            Rule::Alternating { even, odd } => vec![even, odd],
        };
        for m in probes {
            m.validate()?;
            if m.dim() != dim {
                return Err(Error::Domain(format!(
                    "family member on a different space ({} vs {} limit)",
                    m.kind(),
                    self.limit.kind()
                )));
            }
        }
        // surfaces catalog mismatches before any checker runs
        self.member(self.first)?;
        Ok(())
    }

    pub fn limit(&self) -> &OperatorModel {
        &self.limit
    }

    pub fn n_range(&self) -> (usize, usize) {
        (self.first, self.last)
    }

    pub fn indices(&self) -> std::ops::RangeInclusive<usize> {
        self.first..=self.last
    }

    pub fn len(&self) -> usize {
        self.last - self.first + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn similarity(&self) -> Option<&ComplexMatrix> {
        self.similarity.as_ref()
    }

    pub fn member(&self, n: usize) -> Result<OperatorModel> {
        match &self.rule {
            Rule::Constant => Ok(self.limit.clone()),
            Rule::Fixed(m) => Ok(m.clone()),
            Rule::Perturbation { direction, rate } => self.limit.add_scaled(direction, C64::new(rate.at(n), 0.0)),
            Rule::Explicit { members, first } => members
                .get(n.wrapping_sub(*first))
                .cloned()
                .ok_or_else(|| Error::Domain(format!("no explicit member for n = {n}"))),
            Rule::Alternating { even, odd } => Ok(if n % 2 == 0 { even.clone() } else { odd.clone() }),
        }
    }

    /// `(n, T_n)` over the whole range.
    pub fn members(&self) -> Result<Vec<(usize, OperatorModel)>> {
        self.indices()
            .map(|n| self.member(n).map(|m| (n, m)).map_err(|e| Error::at_index(n, e)))
            .collect()
    }

    /// All members are finite matrices (and so is the limit).
    pub fn finite_members(&self) -> Result<Option<(ComplexMatrix, Vec<ComplexMatrix>)>> {
        let OperatorModel::FiniteMatrix { matrix } = &self.limit else {
            return Ok(None);
        };
        let mut out = Vec::with_capacity(self.len());
        for (_, m) in self.members()? {
            match m {
                OperatorModel::FiniteMatrix { matrix } => out.push(matrix),
                _ => return Ok(None),
            }
        }
        Ok(Some((matrix.clone(), out)))
    }
}
