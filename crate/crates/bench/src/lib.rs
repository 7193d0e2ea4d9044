//! Fixtures shared by the benchmarks in `benches/`.

use std::sync::Arc;

use ec_core::{sample, Family, FiniteMetricSpace, SamplerSpec};

/// A family sampled at the density its reference scale needs.
pub fn fixture(family: Family) -> Arc<FiniteMetricSpace> {
    Arc::new(sample(&SamplerSpec::at_reference_density(family)).expect("fixture families sample"))
}

/// Regular `n`-gon on the unit circle.
pub fn polygon(n: usize) -> Arc<FiniteMetricSpace> {
    let points: Vec<Vec<f64>> = (0..n)
        .map(|k| {
            let t = std::f64::consts::TAU * k as f64 / n as f64;
            vec![t.cos(), t.sin()]
        })
        .collect();
    Arc::new(FiniteMetricSpace::from_points(&points, 0).unwrap())
}
