//! Singular-value bounds and condition numbers of the moment systems.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{build_system, BoundaryCondition, SplineDataset, TridiagonalSystem};
use crate::error::{Error, Result};

/// Absolute slack on interval membership and on the `[0, 4]` envelope.
pub const CONTAINMENT_TOL: f64 = 1e-9;

/// Largest matrix handed to the dense SVD.
pub const MAX_DENSE_SIZE: usize = 1024;

/// Gershgorin-type singular-value enclosure: every singular value lies in
/// `union_i [max(0, |a_ii| - s_i), |a_ii| + s_i]` with `s_i = max(r_i, c_i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvBounds {
    pub row_sums: Vec<f64>,
    pub col_sums: Vec<f64>,
    pub radii: Vec<f64>,
    pub intervals: Vec<(f64, f64)>,
    pub frobenius: f64,
}

impl SvBounds {
    pub fn contains(&self, sigma: f64) -> bool {
        self.intervals
            .iter()
            .any(|&(lo, hi)| sigma >= lo - CONTAINMENT_TOL && sigma <= hi + CONTAINMENT_TOL)
    }

    /// Hull of the union.
    pub fn hull(&self) -> (f64, f64) {
        self.intervals
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(a, b)| {
                (lo.min(a), hi.max(b))
            })
    }
}

pub fn gershgorin_sv_bounds(a: &DMatrix<f64>) -> SvBounds {
    let n = a.nrows();
    let off = |i: usize, j: usize| if i == j { 0.0 } else { a[(i, j)].abs() };
    let row_sums: Vec<f64> = (0..n).map(|i| (0..n).map(|j| off(i, j)).sum()).collect();
    let col_sums: Vec<f64> = (0..n).map(|j| (0..n).map(|i| off(i, j)).sum()).collect();
    let radii: Vec<f64> = row_sums.iter().zip(&col_sums).map(|(r, c)| r.max(*c)).collect();
    let intervals = (0..n)
        .map(|i| {
            let d = a[(i, i)].abs();
            ((d - radii[i]).max(0.0), d + radii[i])
        })
        .collect();
    SvBounds {
        row_sums,
        col_sums,
        radii,
        intervals,
        frobenius: a.norm(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub size: usize,
    pub boundary: String,
    pub sigma_max: f64,
    pub sigma_min: f64,
    pub kappa: f64,
    pub within_4sqrt2: bool,
    pub within_4: bool,
    pub gershgorin_contains_all: bool,
    pub gershgorin_within_0_4: bool,
    pub frobenius_sq: f64,
    /// `4 size + (size - 2) / 2`.
    pub frobenius_floor: f64,
    pub frobenius_ok: bool,
    /// `9n/2 - 1/2` with `n` the interval count; flagged, not asserted.
    pub frobenius_alt_floor: f64,
    pub frobenius_alt_ok: bool,
}

impl ConditionReport {
    /// Every asserted property holds.
    pub fn passes(&self) -> bool {
        self.within_4sqrt2 && self.gershgorin_contains_all && self.gershgorin_within_0_4 && self.frobenius_ok
    }
}

pub fn condition_report(system: &TridiagonalSystem) -> Result<ConditionReport> {
    let size = system.size();
    if size > MAX_DENSE_SIZE {
        return Err(Error::ResourceLimit {
            requested: size,
            max: MAX_DENSE_SIZE,
        });
    }
    let a = system.to_dense();
    let bounds = gershgorin_sv_bounds(&a);
    let sv = a.singular_values();
    let sigma_max = sv.max();
    let sigma_min = sv.min();
    let kappa = sigma_max / sigma_min;
    let (lo, hi) = bounds.hull();
    let frobenius_sq = bounds.frobenius.powi(2);
    let frobenius_floor = 4.0 * size as f64 + (size as f64 - 2.0) / 2.0;
    let intervals = if system.is_periodic() { size } else { size - 1 } as f64;
    let frobenius_alt_floor = 4.5 * intervals - 0.5;
    Ok(ConditionReport {
        size,
        boundary: system.boundary.name().to_string(),
        sigma_max,
        sigma_min,
        kappa,
        within_4sqrt2: kappa <= 4.0 * std::f64::consts::SQRT_2,
        within_4: kappa <= 4.0,
        gershgorin_contains_all: sv.iter().all(|&s| bounds.contains(s)),
        gershgorin_within_0_4: lo >= 0.0 && hi <= 4.0 + CONTAINMENT_TOL,
        frobenius_sq,
        frobenius_floor,
        frobenius_ok: frobenius_sq >= frobenius_floor - 1e-9,
        frobenius_alt_floor,
        frobenius_alt_ok: frobenius_sq >= frobenius_alt_floor - 1e-9,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub min_size: usize,
    pub max_size: usize,
    pub trials: usize,
    pub seed: u64,
    pub h_min: f64,
    pub h_max: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            min_size: 8,
            max_size: 256,
            trials: 1000,
            seed: 0,
            h_min: 1e-3,
            h_max: 1e3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCase {
    pub trial: usize,
    pub size: usize,
    pub boundary: String,
    pub kappa: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub systems: usize,
    pub max_kappa: f64,
    pub worst_case: SweepCase,
    pub max_sigma_max: f64,
    pub min_sigma_min: f64,
    pub bound_4sqrt2_ok: bool,
    pub bound_4_ok: bool,
    pub above_4: usize,
    pub gershgorin_ok: bool,
    pub frobenius_ok: bool,
    pub frobenius_alt_failures: usize,
}

impl SweepReport {
    pub fn passes(&self) -> bool {
        self.bound_4sqrt2_ok && self.gershgorin_ok && self.frobenius_ok
    }
}

/// The system for trial `trial`: boundary type cycles with the trial index,
/// size is uniform in the configured range.
pub fn sweep_instance(config: &SweepConfig, trial: usize) -> Result<TridiagonalSystem> {
    let seed = config.seed ^ (trial as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let size = rng.random_range(config.min_size.max(2)..=config.max_size.max(2));
    let boundary = match trial % 3 {
        0 => BoundaryCondition::clamped(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)),
        1 => BoundaryCondition::SecondDerivative {
            start: rng.random_range(-5.0..5.0),
            end: rng.random_range(-5.0..5.0),
        },
        _ => BoundaryCondition::Periodic,
    };
    let intervals = if boundary.is_periodic() { size } else { size - 1 };
    let data = SplineDataset::seeded(
        rng.random(),
        intervals,
        config.h_min,
        config.h_max,
        boundary.is_periodic(),
    )?;
    build_system(&data, &boundary)
}

/// Condition reports over `config.trials` seeded systems, computed in parallel.
pub fn sweep(config: &SweepConfig) -> Result<SweepReport> {
    if config.trials == 0 || config.min_size > config.max_size {
        return Err(Error::InvalidInput(
            "sweep needs trials >= 1 and min_size <= max_size".into(),
        ));
    }
    let reports = (0..config.trials)
        .into_par_iter()
        .map(|t| sweep_instance(config, t).and_then(|s| condition_report(&s)))
        .collect::<Result<Vec<_>>>()?;
    let (worst, top) = reports
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.kappa.total_cmp(&b.1.kappa))
        .expect("at least one trial");
    Ok(SweepReport {
        systems: reports.len(),
        max_kappa: top.kappa,
        worst_case: SweepCase {
            trial: worst,
            size: top.size,
            boundary: top.boundary.clone(),
            kappa: top.kappa,
        },
        max_sigma_max: reports.iter().map(|r| r.sigma_max).fold(0.0, f64::max),
        min_sigma_min: reports.iter().map(|r| r.sigma_min).fold(f64::INFINITY, f64::min),
        bound_4sqrt2_ok: reports.iter().all(|r| r.within_4sqrt2),
        bound_4_ok: reports.iter().all(|r| r.within_4),
        above_4: reports.iter().filter(|r| !r.within_4).count(),
        gershgorin_ok: reports
            .iter()
            .all(|r| r.gershgorin_contains_all && r.gershgorin_within_0_4),
        frobenius_ok: reports.iter().all(|r| r.frobenius_ok),
        frobenius_alt_failures: reports.iter().filter(|r| !r.frobenius_alt_ok).count(),
    })
}
