//! Amplitude estimation and the swap-test inner-product estimator.
//!
//! An instance is a state `|phi> = sin(theta)|0>|u> + cos(theta)|1>|v>` with a
//! designated flag qubit. The Grover-type operator
//! `G = (2|phi><phi| - I)(Y ⊗ I)`, `Y = diag(-1, 1)` on the flag, rotates the
//! plane spanned by the two branches by `-2 theta`, so phase estimation on `G`
//! started from `|phi>` peaks at `theta / pi` and `1 - theta / pi`.
//!
//! `epsilon` passed to [`estimate_amplitude`] is a precision on the phase
//! fraction. The resulting error on `theta` is at most `pi * epsilon`; the
//! swap test converts its own target accordingly.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::qpe::{required_qubits, run_qpe, PhaseEstimationConfig};
use crate::stateprep::PrepPlan;
use crate::statevector::{sample_distribution, Operator, Statevector};

/// Failure probability used when none is given.
pub const DEFAULT_FAILURE_BUDGET: f64 = 0.1;

/// How the phase register is read out.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub enum EstimationMode {
    /// Most probable outcome of the exact distribution.
    #[default]
    Exact,
    /// Most frequent outcome over `shots` seeded samples.
    Shots { shots: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeInstance {
    state: Statevector,
    flag: usize,
}

impl AmplitudeInstance {
    pub fn new(state: Statevector, flag: usize) -> Result<Self> {
        if flag >= state.num_qubits() {
            return Err(Error::QubitOutOfRange {
                index: flag,
                num_qubits: state.num_qubits(),
            });
        }
        Ok(Self { state, flag })
    }

    /// `sin(theta)|0>|u> + cos(theta)|1>|v>` with the flag as the top qubit.
    pub fn from_branches(theta: f64, u: &Statevector, v: &Statevector) -> Result<Self> {
        if u.num_qubits() != v.num_qubits() {
            return Err(Error::DimensionMismatch {
                expected: u.dim(),
                found: v.dim(),
            });
        }
        let (s, c) = theta.sin_cos();
        let mut amps: Vec<Complex64> = u.amplitudes().iter().map(|a| a * s).collect();
        amps.extend(v.amplitudes().iter().map(|a| a * c));
        let flag = u.num_qubits();
        Self::new(Statevector::from_amplitudes(amps)?, flag)
    }

    pub fn state(&self) -> &Statevector {
        &self.state
    }

    pub fn flag(&self) -> usize {
        self.flag
    }

    /// `sin^2(theta)`: probability of the flag reading 0.
    pub fn good_probability(&self) -> f64 {
        self.state.probabilities_on(&[self.flag]).map(|p| p[0]).unwrap_or(0.0)
    }

    /// `theta` in `[0, pi/2]`.
    pub fn theta(&self) -> f64 {
        self.good_probability().clamp(0.0, 1.0).sqrt().asin()
    }
}

/// Dense `G = (2|phi><phi| - I)(Y ⊗ I)`.
pub fn build_grover_operator(instance: &AmplitudeInstance) -> Result<Operator> {
    let phi = instance.state.amplitudes();
    let dim = phi.len();
    let flag = 1usize << instance.flag;
    let m = DMatrix::from_fn(dim, dim, |r, c| {
        let reflect = phi[r] * phi[c].conj() * 2.0
            - if r == c {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            };
        if c & flag == 0 {
            -reflect
        } else {
            reflect
        }
    });
    Operator::unitary(m)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeEstimate {
    /// Folded estimate `pi * min(phi, 1 - phi)`.
    pub theta: f64,
    /// `sin^2` of the estimate.
    pub probability: f64,
    pub phase_bits: usize,
    pub outcome: usize,
    /// Mass of the phase-register value that was read.
    pub outcome_probability: f64,
}

/// Phase estimation on `G` with enough bits for phase precision `epsilon`
/// at failure probability `delta`.
pub fn estimate_amplitude(
    instance: &AmplitudeInstance,
    epsilon: f64,
    delta: f64,
    mode: EstimationMode,
) -> Result<AmplitudeEstimate> {
    let n = required_qubits(epsilon, delta)?;
    estimate_amplitude_with_bits(instance, n, mode)
}

/// [`estimate_amplitude`] with an explicit phase-register width.
pub fn estimate_amplitude_with_bits(
    instance: &AmplitudeInstance,
    phase_bits: usize,
    mode: EstimationMode,
) -> Result<AmplitudeEstimate> {
    let g = build_grover_operator(instance)?;
    let cfg = PhaseEstimationConfig::with_bits(phase_bits)?;
    let outcome = run_qpe(&g, &instance.state, &cfg)?;
    let y = match mode {
        EstimationMode::Exact => outcome.most_likely(),
        EstimationMode::Shots { shots, seed } => {
            if shots == 0 {
                return Err(Error::InvalidInput("shots must be at least 1".into()));
            }
            let hist = sample_distribution(&outcome.distribution, shots, seed);
            let mut best = 0;
            for (i, &h) in hist.iter().enumerate() {
                if h > hist[best] {
                    best = i;
                }
            }
            best
        }
    };
    let phi = outcome.phase_of(y);
    let theta = PI * phi.min(1.0 - phi);
    Ok(AmplitudeEstimate {
        theta,
        probability: theta.sin().powi(2),
        phase_bits,
        outcome: y,
        outcome_probability: outcome.probability(y),
    })
}

/// Hadamard-test state `(|0>(|x> + |y>) + |1>(|x> - |y>)) / 2` with the flag
/// on top. The flag reads 0 with probability `(1 + Re<x|y>) / 2`.
pub fn hadamard_test_instance(x: &Statevector, y: &Statevector) -> Result<AmplitudeInstance> {
    if x.num_qubits() != y.num_qubits() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            found: y.dim(),
        });
    }
    let s = x.num_qubits();
    let system: Vec<usize> = (0..s).collect();
    let prep = |v: &Statevector| PrepPlan::for_amplitudes(v.amplitudes()).and_then(|p| p.to_operator());
    let ops = vec![Some(prep(x)?), Some(prep(y)?)];
    let mut state = Statevector::zero(s + 1)?;
    state.apply_hadamards_mut(&[s])?;
    state.apply_multiplexed_mut(&[s], &system, &ops)?;
    state.apply_hadamards_mut(&[s])?;
    AmplitudeInstance::new(state, s)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwapTestEstimate {
    /// Estimate of `Re<x|y>`.
    pub value: f64,
    pub epsilon: f64,
    pub phase_bits: usize,
}

/// Estimates `Re<x|y>` to within `epsilon` with failure probability `delta`.
///
/// `Re<x|y> = 2 sin^2(theta) - 1` has slope at most 2 in `theta`, so the phase
/// fraction is needed to `epsilon / (2 pi)`.
pub fn swap_test_real(
    x: &Statevector,
    y: &Statevector,
    epsilon: f64,
    delta: f64,
    mode: EstimationMode,
) -> Result<SwapTestEstimate> {
    let instance = hadamard_test_instance(x, y)?;
    let est = estimate_amplitude(&instance, epsilon / (2.0 * PI), delta, mode)?;
    Ok(SwapTestEstimate {
        value: 2.0 * est.probability - 1.0,
        epsilon,
        phase_bits: est.phase_bits,
    })
}

/// Estimates `<x|y>`; each part gets `epsilon / sqrt(2)` so the complex error
/// stays within `epsilon`. `Im<x|y> = Re<x|-i y>`.
pub fn swap_test_full(
    x: &Statevector,
    y: &Statevector,
    epsilon: f64,
    delta: f64,
    mode: EstimationMode,
) -> Result<Complex64> {
    let part = epsilon / std::f64::consts::SQRT_2;
    let rotated = y.scaled(Complex64::new(0.0, -1.0));
    let (re, im) = rayon::join(
        || swap_test_real(x, y, part, delta, mode),
        || swap_test_real(x, &rotated, part, delta, mode),
    );
    Ok(Complex64::new(re?.value, im?.value))
}
