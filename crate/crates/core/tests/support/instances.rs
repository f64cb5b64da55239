//! Random well-spread geometries shared by the solver tests and the
//! acceptance suite.

use std::f64::consts::TAU;

use lorasf_core::GeometryMatrix;
use rand::rngs::StdRng;
use rand::Rng;

pub struct Instance {
    pub g: GeometryMatrix,
    pub weights: Vec<f64>,
    pub residuals_us: Vec<f64>,
}

/// Bearings spread so that no gap between neighbours exceeds 200 degrees,
/// sigmas in [2, 60] m, residuals in [-3, 3] us.
pub fn random_instance(rng: &mut StdRng, n: usize) -> Instance {
    loop {
        let mut bearings: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..TAU)).collect();
        bearings.sort_by(f64::total_cmp);
        let max_gap = bearings
            .windows(2)
            .map(|w| w[1] - w[0])
            .chain(std::iter::once(bearings[0] + TAU - bearings[n - 1]))
            .fold(0.0, f64::max);
        let min_gap = bearings.windows(2).map(|w| w[1] - w[0]).fold(TAU, f64::min);
        if max_gap > 200f64.to_radians() || min_gap < 10f64.to_radians() {
            continue;
        }
        let weights = (0..n)
            .map(|_| {
                let s: f64 = rng.random_range(2.0..60.0);
                1.0 / (s * s)
            })
            .collect();
        let residuals_us = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
        return Instance {
            g: GeometryMatrix::from_bearings(&bearings).unwrap(),
            weights,
            residuals_us,
        };
    }
}
