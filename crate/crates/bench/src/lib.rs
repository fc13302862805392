//! Deterministic inputs shared by the benchmarks.

use qspline_core::spline::conditioning::{sweep_instance, SweepConfig};
use qspline_core::spline::TridiagonalSystem;
use qspline_core::stateprep::TargetVector;
use qspline_core::Result;

/// Real vector of length `len` whose magnitudes spread over `[1/kappa, 1]`
/// along a golden-ratio sequence, with alternating signs. `kappa(x) = kappa`
/// whenever `len >= 2`.
pub fn spread_vector(len: usize, kappa: f64) -> Result<TargetVector> {
    let values: Vec<f64> = (0..len)
        .map(|k| {
            let u = match k {
                0 => 0.0,
                1 => 1.0,
                _ => (k as f64 * 0.618_033_988_749_895).fract(),
            };
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sign * kappa.powf(-u)
        })
        .collect();
    TargetVector::from_real(&values)
}

/// Moment system of exactly `size` unknowns from the conditioning sweep
/// generator, boundary type `trial % 3`.
pub fn spline_system(size: usize, trial: usize) -> Result<TridiagonalSystem> {
    let config = SweepConfig {
        min_size: size,
        max_size: size,
        trials: 1,
        seed: 11,
        h_min: 0.1,
        h_max: 10.0,
    };
    sweep_instance(&config, trial)
}
