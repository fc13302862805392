//! Quantum phase estimation.
//!
//! Register layout for every simulation in this module: the system register
//! occupies qubits `0..s` and the phase register qubits `s..s+n`, with phase
//! qubit `s + k` controlling `U^{2^k}`. The inverse QFT is applied exactly to
//! the phase register, and the controlled powers come from repeated squaring
//! of the dense operator.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statevector::{Operator, Statevector};

/// Register widths for one run of phase estimation.
///
/// `accuracy_bits` (m) is the precision `2^{-m}` asked of the estimate and
/// `phase_bits - accuracy_bits` (p) the extra bits that buy confidence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseEstimationConfig {
    pub phase_bits: usize,
    pub accuracy_bits: usize,
    pub failure_budget: Option<f64>,
}

impl PhaseEstimationConfig {
    /// `n` phase bits, all of them counted as accuracy bits.
    pub fn with_bits(phase_bits: usize) -> Result<Self> {
        Self::new(phase_bits, 0)
    }

    /// `m` accuracy bits plus `p` confidence bits.
    pub fn new(accuracy_bits: usize, confidence_bits: usize) -> Result<Self> {
        let phase_bits = accuracy_bits + confidence_bits;
        if phase_bits == 0 {
            return Err(Error::InvalidInput(
                "phase estimation needs at least one phase bit".into(),
            ));
        }
        Ok(Self {
            phase_bits,
            accuracy_bits,
            failure_budget: None,
        })
    }

    /// Sizes the register for precision `epsilon` with failure probability at most `delta`.
    pub fn from_tolerance(epsilon: f64, delta: f64) -> Result<Self> {
        let n = required_qubits(epsilon, delta)?;
        let m = (1.0 / epsilon).log2().ceil() as usize;
        Ok(Self {
            phase_bits: n,
            accuracy_bits: m,
            failure_budget: Some(delta),
        })
    }

    pub fn confidence_bits(&self) -> usize {
        self.phase_bits - self.accuracy_bits
    }

    /// `N = 2^n`.
    pub fn outcomes(&self) -> usize {
        1 << self.phase_bits
    }
}

/// `ceil(log2 1/epsilon) + ceil(log2(2 + 1/(2 delta)))`.
pub fn required_qubits(epsilon: f64, delta: f64) -> Result<usize> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidInput(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::InvalidInput(format!("delta must lie in (0, 1/2), got {delta}")));
    }
    let accuracy = (1.0 / epsilon).log2().ceil();
    let confidence = (2.0 + 1.0 / (2.0 * delta)).log2().ceil();
    Ok((accuracy + confidence) as usize)
}

/// Output distribution of the phase register.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseOutcome {
    pub phase_bits: usize,
    pub distribution: Vec<f64>,
}

impl PhaseOutcome {
    pub fn probability(&self, y: usize) -> f64 {
        self.distribution[y % self.distribution.len()]
    }

    /// Most probable register value; ties go to the smaller value.
    pub fn most_likely(&self) -> usize {
        let mut best = 0;
        for (y, &p) in self.distribution.iter().enumerate() {
            if p > self.distribution[best] {
                best = y;
            }
        }
        best
    }

    /// `y / 2^n`.
    pub fn phase_of(&self, y: usize) -> f64 {
        y as f64 / self.distribution.len() as f64
    }

    /// Probability of the two neighbours `y_theta = floor(theta N)` and
    /// `y_theta + 1 (mod N)` bracketing `theta`.
    pub fn bracket_probability(&self, theta: f64) -> f64 {
        let (lo, hi) = bracket(theta, self.phase_bits);
        self.probability(lo) + self.probability(hi)
    }
}

/// `(floor(theta N), floor(theta N) + 1 mod N)`.
pub fn bracket(theta: f64, phase_bits: usize) -> (usize, usize) {
    let n = 1usize << phase_bits;
    let lo = ((theta * n as f64).floor() as usize) % n;
    (lo, (lo + 1) % n)
}

fn check_unitary(op: &Operator) -> Result<()> {
    if !op.is_unitary() {
        return Err(Error::NotUnitary {
            deviation: op.unitarity_deviation(),
        });
    }
    Ok(())
}

/// Register indices for a system of `system_qubits` with `phase_bits` phase qubits above it.
pub fn layout(system_qubits: usize, phase_bits: usize) -> (Vec<usize>, Vec<usize>) {
    let system = (0..system_qubits).collect();
    let phase = (system_qubits..system_qubits + phase_bits).collect();
    (system, phase)
}

/// Steps 2-4 of phase estimation applied in place: Hadamards on the phase
/// register, controlled `U^{2^k}` from phase qubit `k`, inverse QFT.
///
/// `powers[k]` must be `U^{2^k}`.
pub fn apply_phase_estimation(
    state: &mut Statevector,
    powers: &[Operator],
    phase: &[usize],
    system: &[usize],
) -> Result<()> {
    if powers.len() != phase.len() {
        return Err(Error::DimensionMismatch {
            expected: phase.len(),
            found: powers.len(),
        });
    }
    state.apply_hadamards_mut(phase)?;
    for (op, &ctrl) in powers.iter().zip(phase) {
        state.apply_controlled_mut(op, &[ctrl], system)?;
    }
    state.apply_qft_mut(phase, true)
}

/// Exact inverse of [`apply_phase_estimation`].
pub fn undo_phase_estimation(
    state: &mut Statevector,
    powers: &[Operator],
    phase: &[usize],
    system: &[usize],
) -> Result<()> {
    if powers.len() != phase.len() {
        return Err(Error::DimensionMismatch {
            expected: phase.len(),
            found: powers.len(),
        });
    }
    state.apply_qft_mut(phase, false)?;
    for (op, &ctrl) in powers.iter().zip(phase).rev() {
        state.apply_controlled_mut(&op.adjoint(), &[ctrl], system)?;
    }
    state.apply_hadamards_mut(phase)
}

/// Joint state `(phase register) ⊗ (system register)` after phase estimation
/// started from `|0>^n |input>`.
pub fn run_qpe_superposed(
    unitary: &Operator,
    input: &Statevector,
    config: &PhaseEstimationConfig,
) -> Result<Statevector> {
    check_unitary(unitary)?;
    if unitary.num_qubits() != input.num_qubits() {
        return Err(Error::DimensionMismatch {
            expected: unitary.num_qubits(),
            found: input.num_qubits(),
        });
    }
    let n = config.phase_bits;
    let (system, phase) = layout(input.num_qubits(), n);
    let mut state = Statevector::tensor(&Statevector::zero(n)?, input)?;
    let powers = unitary.power_ladder(n);
    apply_phase_estimation(&mut state, &powers, &phase, &system)?;
    Ok(state)
}

/// Phase-register distribution of phase estimation on `eigenstate`.
pub fn run_qpe(unitary: &Operator, eigenstate: &Statevector, config: &PhaseEstimationConfig) -> Result<PhaseOutcome> {
    let state = run_qpe_superposed(unitary, eigenstate, config)?;
    let (_, phase) = layout(eigenstate.num_qubits(), config.phase_bits);
    Ok(PhaseOutcome {
        phase_bits: config.phase_bits,
        distribution: state.probabilities_on(&phase)?,
    })
}

/// Exact mass on the good approximates of `theta` next to the
/// `1 - 1/(2(2^p - 2))` lower bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoodSetReport {
    pub theta: f64,
    /// `{(2^p alpha_m + t) mod N : t = 0..=2^p}` with `alpha_m = floor(theta 2^m)`.
    pub good_set: Vec<usize>,
    pub probability: f64,
    pub bound: f64,
    pub bound_holds: bool,
    /// Mass on every `y` with circular distance `|theta - y/N| <= 2^{-m}`.
    pub window_probability: f64,
}

/// Runs phase estimation on `diag(1, e^{2 pi i theta})` with eigenstate `|1>`
/// and sums the distribution over the good set. The bound is reported, never
/// substituted for the exact value.
pub fn good_set_probability(theta: f64, config: &PhaseEstimationConfig) -> Result<GoodSetReport> {
    let p = config.confidence_bits();
    if p < 2 {
        return Err(Error::BoundInapplicable { p });
    }
    if !(0.0..1.0).contains(&theta) {
        return Err(Error::InvalidInput(format!("theta must lie in [0, 1), got {theta}")));
    }
    let outcome = run_qpe(&phase_unitary(theta), &Statevector::basis(1, 1)?, config)?;
    let n = config.outcomes();
    let m = config.accuracy_bits;
    let alpha = (theta * (1u64 << m) as f64).floor() as usize;
    let good_set: Vec<usize> = (0..=(1usize << p)).map(|t| ((alpha << p) + t) % n).collect();
    let probability = good_set.iter().map(|&y| outcome.probability(y)).sum();
    let bound = 1.0 - 1.0 / (2.0 * ((1u64 << p) as f64 - 2.0));
    let precision = 2f64.powi(-(m as i32));
    let window_probability = (0..n)
        .filter(|&y| circular_distance(theta, outcome.phase_of(y)) <= precision + 1e-15)
        .map(|y| outcome.probability(y))
        .sum();
    Ok(GoodSetReport {
        theta,
        good_set,
        probability,
        bound,
        bound_holds: probability >= bound,
        window_probability,
    })
}

/// Distance between two phases on the unit circle.
pub fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

/// `diag(1, e^{2 pi i theta})`.
pub fn phase_unitary(theta: f64) -> Operator {
    crate::statevector::gates::phase(std::f64::consts::TAU * theta)
}
