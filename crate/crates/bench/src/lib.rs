//! Seeded inputs shared by the benchmarks.

use nucont_core::models::{OperatorModel, TailRule, TruncationSpec};
use nucont_core::random;
use nucont_core::sets::PointCloud;
use nucont_core::spectral::GridSpec;
use nucont_core::{ComplexMatrix, C64};

pub fn random_matrix(n: usize, seed: u64) -> ComplexMatrix {
    random::matrix(&mut random::rng(seed, 0), n, n)
}

/// `S diag(1, 5, .., 5) S^-1` with `cond(S) <= 50`.
pub fn projection_input(n: usize, seed: u64) -> ComplexMatrix {
    let mut values = vec![C64::new(5.0, 0.0); n];
    values[0] = C64::new(1.0, 0.0);
    random::similar_diagonal(&mut random::rng(seed, 0), &values, 50.0)
        .expect("well-conditioned similarity")
        .0
}

pub fn unit_shift() -> OperatorModel {
    OperatorModel::shift(vec![], TailRule::Constant { c: C64::new(1.0, 0.0) })
}

pub fn section(m: usize) -> TruncationSpec {
    TruncationSpec { size: m, extra_rows: Some(1) }
}

pub fn grid(step: f64) -> Vec<C64> {
    GridSpec::square(1.5, step).points()
}

/// `count` points on the circle of radius `r`.
pub fn circle_cloud(count: usize, r: f64) -> PointCloud {
    PointCloud::new(
        (0..count)
            .map(|k| C64::from_polar(r, k as f64 * std::f64::consts::TAU / count as f64))
            .collect(),
    )
    .expect("finite points")
}
