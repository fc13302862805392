//! End-to-end quantum spline: `|d>` by binned preparation, `|M>` by HHL, the
//! lost normalization from one row of the moment system, and evaluation as
//! `S = ||M|| ||X|| Re<M|X> + Y` with swap-test inner products.
//!
//! Derivatives reuse the same form with the feature vectors of `S'` and `S''`
//! (see [`crate::spline::derivative_features`]).

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::{swap_test_real, EstimationMode, DEFAULT_FAILURE_BUDGET};
use crate::hhl::{solve_with_state, HhlConfig, LinearSystem, PostselectionMode};
use crate::spline::{self, BoundaryCondition, SplineDataset, TridiagonalSystem};
use crate::stateprep::{prepare_binned, BinnedCost, TargetVector};
use crate::statevector::Statevector;

/// Right-hand sides below this are treated as identically zero.
pub const ZERO_RHS_TOL: f64 = 1e-12;

/// Largest solution weight tolerated on padding coordinates.
pub const PADDING_TOL: f64 = 1e-8;

/// How `Re<a|b>` is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InnerProductEstimator {
    /// Exact value from the statevectors.
    Exact,
    /// Swap test read from the exact phase-register distribution.
    #[default]
    SwapTest,
    /// Swap test read from seeded samples.
    SwapTestShots { shots: usize, seed: u64 },
}

impl InnerProductEstimator {
    pub fn estimate(&self, a: &Statevector, b: &Statevector, epsilon: f64, delta: f64) -> Result<f64> {
        match *self {
            Self::Exact => Ok(a.inner_product(b)?.re),
            Self::SwapTest => Ok(swap_test_real(a, b, epsilon, delta, EstimationMode::Exact)?.value),
            Self::SwapTestShots { shots, seed } => {
                Ok(swap_test_real(a, b, epsilon, delta, EstimationMode::Shots { shots, seed })?.value)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub phase_bits: usize,
    pub epsilon: f64,
    pub failure_budget: f64,
    pub estimator: InnerProductEstimator,
    pub postselection: PostselectionMode,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            phase_bits: 10,
            epsilon: 1e-3,
            failure_budget: DEFAULT_FAILURE_BUDGET,
            estimator: InnerProductEstimator::SwapTest,
            postselection: PostselectionMode::Exact,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitDiagnostics {
    pub rhs_kappa: f64,
    pub prep: Option<BinnedCost>,
    pub prep_fidelity: f64,
    pub success_probability: f64,
    pub residual_weight: f64,
    pub padding_weight: f64,
    /// `|<M_hhl|M_classical>|^2` over the unknowns.
    pub classical_fidelity: f64,
    pub classical_norm: f64,
    /// `| |scale| - ||M|| | / ||M||`.
    pub scale_relative_error: f64,
    /// Row of the moment system used to recover the scale.
    pub scale_row: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantumFit {
    pub dataset: SplineDataset,
    pub boundary: BoundaryCondition,
    pub config: PipelineConfig,
    pub unknowns: usize,
    /// Normalized moment state over the padded unknowns; absent for linear data.
    pub state: Option<Statevector>,
    /// Signed factor with `M ≈ scale * Re|M>`.
    pub scale: f64,
    pub diagnostics: FitDiagnostics,
}

impl QuantumFit {
    /// Recovered knot moments `M_0..M_n`.
    pub fn moments(&self, system: &TridiagonalSystem) -> Vec<f64> {
        let unknowns: Vec<f64> = match &self.state {
            Some(s) => s.amplitudes()[..self.unknowns]
                .iter()
                .map(|z| self.scale * z.re)
                .collect(),
            None => vec![0.0; self.unknowns],
        };
        spline::SplineSolution::from_unknowns(system, &unknowns).moments
    }
}

pub fn quantum_fit(data: &SplineDataset, boundary: &BoundaryCondition, config: &PipelineConfig) -> Result<QuantumFit> {
    let system = spline::build_system(data, boundary)?;
    let classical = spline::thomas_solve(&system)?.unknowns(&system);
    let classical_norm = classical.iter().map(|v| v * v).sum::<f64>().sqrt();
    let size = system.size();
    let d = &system.rhs;

    if d.iter().all(|v| v.abs() < ZERO_RHS_TOL) {
        return Ok(QuantumFit {
            dataset: data.clone(),
            boundary: *boundary,
            config: *config,
            unknowns: size,
            state: None,
            scale: 0.0,
            diagnostics: FitDiagnostics {
                rhs_kappa: 0.0,
                prep: None,
                prep_fidelity: 1.0,
                success_probability: 1.0,
                residual_weight: 0.0,
                padding_weight: 0.0,
                classical_fidelity: 1.0,
                classical_norm,
                scale_relative_error: 0.0,
                scale_row: None,
            },
        });
    }

    let target = TargetVector::from_real(d)?;
    let prep = prepare_binned(&target)?;
    let prep_fidelity = target.normalized_state().fidelity(&prep.state)?;

    let dense = system.to_dense();
    let linear = LinearSystem::from_real(&dense, d)?;
    let hhl_config = HhlConfig::for_spline(config.phase_bits).with_mode(config.postselection);
    let result = solve_with_state(&linear, &prep.state, &hhl_config)?;
    if result.padding_weight > PADDING_TOL {
        return Err(Error::InvalidInput(format!(
            "solution carries weight {:.3e} on padding coordinates",
            result.padding_weight
        )));
    }
    let state = result.solution_state.clone();

    let reference = Statevector::from_real(&classical)?;
    let classical_fidelity = state.fidelity(&reference)?;

    let row = (0..size)
        .max_by(|&a, &b| d[a].abs().total_cmp(&d[b].abs()))
        .expect("nonempty system");
    let scale = recover_scale(&state, &dense, d[row], row, config)?;

    Ok(QuantumFit {
        dataset: data.clone(),
        boundary: *boundary,
        config: *config,
        unknowns: size,
        state: Some(state),
        scale,
        diagnostics: FitDiagnostics {
            rhs_kappa: target.kappa(),
            prep: Some(prep.cost),
            prep_fidelity,
            success_probability: result.success_probability,
            residual_weight: result.residual_weight,
            padding_weight: result.padding_weight,
            classical_fidelity,
            classical_norm,
            scale_relative_error: (scale.abs() - classical_norm).abs() / classical_norm,
            scale_row: Some(row),
        },
    })
}

/// `d_k / sum_j A_kj M_j` with each `M_j` read off by an inner product
/// against `|j>`.
fn recover_scale(state: &Statevector, a: &DMatrix<f64>, d_k: f64, k: usize, config: &PipelineConfig) -> Result<f64> {
    let cols: Vec<usize> = (0..a.ncols()).filter(|&j| a[(k, j)] != 0.0).collect();
    let reads = cols
        .par_iter()
        .map(|&j| {
            let basis = Statevector::basis(state.num_qubits(), j)?;
            config
                .estimator
                .estimate(state, &basis, config.epsilon, config.failure_budget)
        })
        .collect::<Result<Vec<f64>>>()?;
    let denom: f64 = cols.iter().zip(&reads).map(|(&j, m)| a[(k, j)] * m).sum();
    if denom.abs() < ZERO_RHS_TOL {
        return Err(Error::InvalidInput(format!(
            "normalization recovery failed: row {k} pairs to zero"
        )));
    }
    Ok(d_k / denom)
}

/// Per-quantity bound `|scale| ||X|| epsilon`, excluding the scale error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorBudget {
    pub value: f64,
    pub first: f64,
    pub second: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantumEvaluation {
    pub x: f64,
    pub interval: usize,
    pub value: f64,
    pub first: f64,
    pub second: f64,
    pub error_budget: ErrorBudget,
}

/// Feature state of `S^{(order)}` at `x` over the padded unknowns.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureState {
    pub features: spline::EvalFeatures,
    /// `None` when both features vanish.
    pub state: Option<Statevector>,
    pub norm: f64,
}

pub fn feature_state(fit: &QuantumFit, system: &TridiagonalSystem, x: f64, order: usize) -> Result<FeatureState> {
    let features = spline::derivative_features(&fit.dataset, x, order)?;
    let norm = features.norm();
    let state = if norm == 0.0 {
        None
    } else {
        let dim = 1usize << crate::statevector::qubits_for(fit.unknowns);
        let mut amps = vec![0.0; dim];
        amps[system.unknown_index(features.interval)] += features.left;
        amps[system.unknown_index(features.interval + 1)] += features.right;
        Some(Statevector::from_real(&amps)?)
    };
    Ok(FeatureState { features, state, norm })
}

pub fn quantum_evaluate(fit: &QuantumFit, x: f64, epsilon: f64) -> Result<QuantumEvaluation> {
    let system = spline::build_system(&fit.dataset, &fit.boundary)?;
    let interval = fit.dataset.locate(x)?;
    let parts = (0..3usize)
        .into_par_iter()
        .map(|order| {
            let f = feature_state(fit, &system, x, order)?;
            match (&fit.state, &f.state) {
                (Some(m), Some(xs)) => {
                    let overlap = fit
                        .config
                        .estimator
                        .estimate(m, xs, epsilon, fit.config.failure_budget)?;
                    Ok((
                        fit.scale * f.norm * overlap + f.features.offset,
                        fit.scale.abs() * f.norm * epsilon,
                    ))
                }
                _ => Ok((f.features.offset, 0.0)),
            }
        })
        .collect::<Result<Vec<(f64, f64)>>>()?;
    Ok(QuantumEvaluation {
        x,
        interval,
        value: parts[0].0,
        first: parts[1].0,
        second: parts[2].0,
        error_budget: ErrorBudget {
            value: parts[0].1,
            first: parts[1].1,
            second: parts[2].1,
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparePoint {
    pub x: f64,
    pub classical: spline::SplineValue,
    pub quantum: QuantumEvaluation,
    pub abs_error: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub points: Vec<ComparePoint>,
    /// Largest error in `S`, `S'`, `S''`.
    pub max_abs_error: [f64; 3],
    pub diagnostics: FitDiagnostics,
    pub scale: f64,
}

pub fn compare_report(
    data: &SplineDataset,
    boundary: &BoundaryCondition,
    grid: &[f64],
    config: &PipelineConfig,
) -> Result<CompareReport> {
    let fit = quantum_fit(data, boundary, config)?;
    let solution = spline::fit(data, boundary)?;
    let points = grid
        .par_iter()
        .map(|&x| {
            let classical = spline::evaluate(data, &solution, x)?;
            let quantum = quantum_evaluate(&fit, x, config.epsilon)?;
            let abs_error = [
                (quantum.value - classical.value).abs(),
                (quantum.first - classical.first).abs(),
                (quantum.second - classical.second).abs(),
            ];
            Ok(ComparePoint {
                x,
                classical,
                quantum,
                abs_error,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut max_abs_error = [0.0f64; 3];
    for p in &points {
        for (m, e) in max_abs_error.iter_mut().zip(p.abs_error) {
            *m = m.max(e);
        }
    }
    Ok(CompareReport {
        points,
        max_abs_error,
        diagnostics: fit.diagnostics,
        scale: fit.scale,
    })
}
