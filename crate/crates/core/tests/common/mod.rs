#![allow(dead_code)]

use std::sync::Arc;

use ec_core::FiniteMetricSpace;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

/// A runner with a fixed seed so every run draws the same cases.
pub fn runner(seed: u64, cases: u32) -> TestRunner {
    let mut bytes = [0u8; 32];
    bytes[..8].copy_from_slice(&seed.to_le_bytes());
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::from_seed(RngAlgorithm::ChaCha, &bytes))
}

/// Planar point sets on a coarse grid, so pairwise distances are separated
/// and generic scales avoid ties.
pub fn planar_points(min: usize, max: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::btree_set((0u8..8, 0u8..8), min..=max)
        .prop_map(|cells| cells.into_iter().map(|(x, y)| vec![x as f64 / 4.0, y as f64 / 4.0]).collect())
}

pub fn space(points: &[Vec<f64>]) -> Arc<FiniteMetricSpace> {
    Arc::new(FiniteMetricSpace::from_points(points, 0).unwrap())
}

/// Scale strictly between two grid distances.
pub fn generic_scale() -> impl Strategy<Value = f64> {
    (1u32..12).prop_map(|k| 0.25 * k as f64 + 0.0625)
}

/// The 4-cycle: unit square corners, counterclockwise from the origin.
pub fn square() -> Arc<FiniteMetricSpace> {
    Arc::new(ec_core::spaces::unit_square())
}

/// Flat torus `(Z/n)²` with the max-coordinate wraparound metric.
pub fn flat_torus(n: usize) -> Arc<FiniteMetricSpace> {
    let wrap = |a: usize, b: usize| {
        let d = a.abs_diff(b);
        d.min(n - d)
    };
    let m: Vec<Vec<f64>> = (0..n * n)
        .map(|i| {
            (0..n * n)
                .map(|j| {
                    let (xi, yi, xj, yj) = (i / n, i % n, j / n, j % n);
                    wrap(xi, xj).max(wrap(yi, yj)) as f64
                })
                .collect()
        })
        .collect();
    Arc::new(FiniteMetricSpace::from_matrix(&m, 0, ec_core::MetricKind::Metric).unwrap())
}
