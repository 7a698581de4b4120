use super::{OperatorModel, Seq};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64, ZERO};
use std::collections::BTreeMap;

/// Operator as a finite set of diagonals: entry `(j + off, j)` is
/// `bands[off].at(j)`. Every band is zero where its row index would be
/// negative, and (for finite `dim`) outside the `dim x dim` block.
#[derive(Debug, Clone, PartialEq)]
pub struct BandOperator {
    dim: Option<usize>,
    bands: BTreeMap<i64, Seq>,
}

impl BandOperator {
    pub fn zero(dim: Option<usize>) -> Self {
        BandOperator {
            dim,
            bands: BTreeMap::new(),
        }
    }

    pub fn identity(dim: Option<usize>) -> Self {
        let mut op = BandOperator::zero(dim);
        let d = match dim {
            Some(d) => Seq::finite(vec![C64::new(1.0, 0.0); d]),
            None => Seq::constant(C64::new(1.0, 0.0)),
        };
        op.insert(0, d);
        op
    }

    pub fn from_matrix(m: &ComplexMatrix, dim: Option<usize>) -> Self {
        let n = m.rows();
        let mut op = BandOperator::zero(dim);
        for off in -(n as i64 - 1)..=(n as i64 - 1) {
            let start = (-off).max(0) as usize;
            let end = (n as i64 - off.max(0)) as usize;
            let vals: Vec<C64> = (0..end)
                .map(|j| if j < start { ZERO } else { m[((j as i64 + off) as usize, j)] })
                .collect();
            op.insert(off, Seq::finite(vals));
        }
        op
    }

    pub fn from_model(model: &OperatorModel) -> Result<Self> {
        Ok(match model {
            OperatorModel::FiniteMatrix { matrix } => BandOperator::from_matrix(matrix, Some(matrix.rows())),
            OperatorModel::Diagonal { prefix, tail } => {
                let mut op = BandOperator::zero(None);
                op.insert(0, Seq::rule(prefix, tail));
                op
            }
            OperatorModel::WeightedShift { prefix, tail } => {
                let p: Vec<C64> = prefix.iter().map(|&w| C64::new(w, 0.0)).collect();
                let mut op = BandOperator::zero(None);
                op.insert(1, Seq::rule(&p, tail));
                op
            }
            OperatorModel::ToeplitzTrigPoly { coeffs } => {
                let mut op = BandOperator::zero(None);
                for (&k, &c) in coeffs {
                    op.insert(k, Seq::constant(c).masked((-k).max(0) as usize));
                }
                op
            }
            OperatorModel::Shifted { base, lambda } => {
                let b = BandOperator::from_model(base)?;
                let id = BandOperator::identity(b.dim);
                b.add_scaled(&id, -lambda)?
            }
            OperatorModel::Perturbed { base, bump } => {
                let b = BandOperator::from_model(base)?;
                if let Some(d) = b.dim {
                    if bump.rows() > d {
                        return Err(Error::shape("perturbed model", "bump exceeds ambient dimension"));
                    }
                }
                b.add_scaled(&BandOperator::from_matrix(bump, b.dim), C64::new(1.0, 0.0))?
            }
        })
    }

    fn insert(&mut self, off: i64, s: Seq) {
        let s = match self.dim {
            Some(d) => {
                // rows j + off must lie in [0, d)
                let end = (d as i64 - off).clamp(0, d as i64) as usize;
                s.truncated(end)
            }
            None => s,
        };
        if s != Seq::zero() {
            self.bands.insert(off, s);
        } else {
            self.bands.remove(&off);
        }
    }

    pub fn dim(&self) -> Option<usize> {
        self.dim
    }

    pub fn bands(&self) -> &BTreeMap<i64, Seq> {
        &self.bands
    }

    /// `(lower, upper)`.
    pub fn bandwidth(&self) -> (usize, usize) {
        let lower = self.bands.keys().copied().max().unwrap_or(0).max(0) as usize;
        let upper = (-self.bands.keys().copied().min().unwrap_or(0)).max(0) as usize;
        (lower, upper)
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        let off = i as i64 - j as i64;
        self.bands.get(&off).map_or(ZERO, |s| s.at(j))
    }

    pub fn section(&self, rows: usize, cols: usize) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(rows, cols);
        for (&off, s) in &self.bands {
            for j in 0..cols {
                let i = j as i64 + off;
                if i >= 0 && (i as usize) < rows {
                    m[(i as usize, j)] = s.at(j);
                }
            }
        }
        m
    }

    fn check_space(&self, other: &BandOperator) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::Domain(format!(
                "operators act on different spaces ({:?} vs {:?})",
                self.dim, other.dim
            )));
        }
        Ok(())
    }

    pub fn add_scaled(&self, other: &BandOperator, s: C64) -> Result<BandOperator> {
        self.check_space(other)?;
        let mut out = self.clone();
        for (&off, b) in &other.bands {
            let sum = match out.bands.get(&off) {
                Some(a) => a.add(&b.scale(s)),
                None => b.scale(s),
            };
            out.insert(off, sum);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &BandOperator) -> Result<BandOperator> {
        self.add_scaled(other, C64::new(-1.0, 0.0))
    }

    /// `self * other`: `(AB)(j + a + b, j) = A_a(j + b) B_b(j)`.
    pub fn mul(&self, other: &BandOperator) -> Result<BandOperator> {
        self.check_space(other)?;
        let mut acc: BTreeMap<i64, Seq> = BTreeMap::new();
        for (&b, sb) in &other.bands {
            for (&a, sa) in &self.bands {
                let term = sa.offset(b).mul(sb);
                let e = acc.entry(a + b).or_insert_with(Seq::zero);
                *e = e.add(&term);
            }
        }
        let mut out = BandOperator::zero(self.dim);
        for (off, s) in acc {
            out.insert(off, s);
        }
        Ok(out)
    }

    /// Adjoint: band `off` becomes band `-off`, read along rows.
    pub fn adjoint(&self) -> BandOperator {
        let mut out = BandOperator::zero(self.dim);
        for (&off, s) in &self.bands {
            // A*(j - off, j) = conj(A(j, j - off)) = conj(s_off(j - off))
            out.insert(-off, s.offset(-off).conj().masked(off.max(0) as usize));
        }
        out
    }

    /// Largest column index carrying a nonzero entry plus one, when finite.
    pub fn support_cols(&self) -> Option<usize> {
        if let Some(d) = self.dim {
            return Some(d);
        }
        if self.bands.values().any(Seq::has_tail) {
            return None;
        }
        Some(self.bands.values().map(Seq::tail_start).max().unwrap_or(0))
    }
}

#[cfg(test)]
mod tests {
    use super::super::{truncate, TailRule, TruncationSpec};
    use super::*;
    use crate::linalg::test_util::{max_diff, random_matrix};

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn models() -> Vec<OperatorModel> {
        vec![
            OperatorModel::diagonal(vec![c(2.0), c(-1.0)], TailRule::harmonic(1.0)),
            OperatorModel::shift(vec![0.5, 2.0], TailRule::constant(1.0)),
            OperatorModel::toeplitz([(1, c(1.0)), (-1, c(0.25)), (-2, C64::new(0.0, 0.5))]),
            OperatorModel::toeplitz([(1, c(1.0))]).perturbed(random_matrix(3, 3, 1)),
            OperatorModel::diagonal(vec![], TailRule::Geometric { c: c(1.0), ratio: 0.5 }).shifted(c(0.25)),
        ]
    }

    #[test]
    fn products_match_dense_sections() {
        let ms = models();
        let m = 24;
        for a in &ms {
            for b in &ms {
                let pa = BandOperator::from_model(a).unwrap();
                let pb = BandOperator::from_model(b).unwrap();
                let prod = pa.mul(&pb).unwrap();
                // the leading m x m block of AB needs m + bw columns of A
                let wide = m + 8;
                let da = truncate(a, TruncationSpec::square(wide)).unwrap();
                let db = truncate(b, TruncationSpec::square(wide)).unwrap();
                let dense = (&da * &db).block(0, m, 0, m);
                assert!(max_diff(&prod.section(m, m), &dense) < 1e-14, "{a:?} * {b:?}");
            }
        }
    }

    #[test]
    fn finite_products() {
        let a = random_matrix(5, 5, 2);
        let b = random_matrix(5, 5, 3);
        let pa = BandOperator::from_matrix(&a, Some(5));
        let pb = BandOperator::from_matrix(&b, Some(5));
        let p = pa.mul(&pb).unwrap();
        assert!(max_diff(&p.section(5, 5), &(&a * &b)) < 1e-14);
        assert!(max_diff(&pa.adjoint().section(5, 5), &a.adjoint()) == 0.0);
    }

    #[test]
    fn adjoint_matches_dense() {
        for a in models() {
            let op = BandOperator::from_model(&a).unwrap();
            let d = truncate(&a, TruncationSpec::square(20)).unwrap();
            assert!(max_diff(&op.adjoint().section(20, 20), &d.adjoint()) == 0.0);
        }
    }

    #[test]
    fn mixed_spaces_rejected() {
        let f = BandOperator::from_matrix(&random_matrix(2, 2, 0), Some(2));
        let g = BandOperator::identity(None);
        assert!(f.mul(&g).is_err());
    }
}
