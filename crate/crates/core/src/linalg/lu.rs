use super::{ComplexMatrix, C64, ZERO};
use crate::error::{Error, Result};
use crate::tol::{NumericConfig, Tol};

/// Partial-pivoting LU factorization `P a = L U`, packed in one matrix.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: ComplexMatrix,
    perm: Vec<usize>,
}

impl Lu {
    /// Factorizes `a`, failing when a pivot falls below `pivot.at(||a||_max)`.
    pub fn new(a: &ComplexMatrix, pivot: Tol) -> Result<Lu> {
        if !a.is_square() {
            return Err(Error::shape("lu", "non-square matrix"));
        }
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let threshold = pivot.at(a.max_abs() * n as f64);
        for k in 0..n {
            let (p, best) = (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .max_by(|x, y| x.1.total_cmp(&y.1))
                .expect("nonempty pivot column");
            if best <= threshold || best == 0.0 {
                return Err(Error::Singular {
                    pivot: best,
                    at: None,
                });
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    let t = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = t;
                }
            }
            let d = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / d;
                lu[(i, k)] = f;
                if f == ZERO {
                    continue;
                }
                for j in k + 1..n {
                    let t = lu[(k, j)];
                    lu[(i, j)] -= f * t;
                }
            }
        }
        Ok(Lu { lu, perm })
    }

    pub fn solve(&self, b: &ComplexMatrix) -> Result<ComplexMatrix> {
        let n = self.lu.rows();
        if b.rows() != n {
            return Err(Error::shape(
                "solve",
                format!("rhs has {} rows, system has {n}", b.rows()),
            ));
        }
        let mut x = ComplexMatrix::zeros(n, b.cols());
        for c in 0..b.cols() {
            let mut y: Vec<C64> = self.perm.iter().map(|&p| b[(p, c)]).collect();
            for i in 0..n {
                let mut s = y[i];
                for k in 0..i {
                    s -= self.lu[(i, k)] * y[k];
                }
                y[i] = s;
            }
            for i in (0..n).rev() {
                let mut s = y[i];
                for k in i + 1..n {
                    s -= self.lu[(i, k)] * y[k];
                }
                y[i] = s / self.lu[(i, i)];
            }
            x.set_column(c, &y);
        }
        Ok(x)
    }
}

/// Solves `a x = b`.
pub fn solve(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    Lu::new(a, NumericConfig::default().pivot)?.solve(b)
}

pub fn inverse(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    solve(a, &ComplexMatrix::identity(a.rows()))
}

#[cfg(test)]
mod tests {
    use super::super::test_util::{max_diff, random_matrix};
    use super::*;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn examples() {
        let b = random_matrix(3, 2, 1);
        assert!(max_diff(&solve(&ComplexMatrix::identity(3), &b).unwrap(), &b) == 0.0);

        let x = solve(
            &ComplexMatrix::real_diag(&[2.0, 4.0]),
            &ComplexMatrix::from_vec(2, 1, vec![c(1.0), c(1.0)]).unwrap(),
        )
        .unwrap();
        assert_eq!(x.column(0), vec![c(0.5), c(0.25)]);

        let a = ComplexMatrix::real_diag(&[1.0, 5.0]).shifted(c(3.0));
        let r = solve(&a, &ComplexMatrix::identity(2)).unwrap();
        assert!(max_diff(&r, &ComplexMatrix::real_diag(&[-0.5, 0.5])) < 1e-16);
    }

    #[test]
    fn singular_detected() {
        let a = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 4.0]]).unwrap();
        assert!(matches!(
            solve(&a, &ComplexMatrix::identity(2)),
            Err(Error::Singular { .. })
        ));
    }

    #[test]
    fn residual_bound() {
        for seed in 0..10 {
            let a = random_matrix(8, 8, seed);
            let b = random_matrix(8, 3, seed + 50);
            let x = solve(&a, &b).unwrap();
            let r = &(&a * &x) - &b;
            assert!(r.operator_norm() <= 1e-10 * a.operator_norm() * x.operator_norm());
        }
    }
}
