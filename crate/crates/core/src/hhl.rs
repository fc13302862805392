//! HHL on the statevector simulator.
//!
//! Register layout: system qubits `0..s`, phase register `s..s+n`, inversion
//! ancilla on qubit `s+n`. The ancilla starts in `|1>`; the success branch is
//! ancilla `|0>`. Non-Hermitian matrices are embedded as `[[0, A], [A†, 0]]`
//! with right-hand side `(b, 0)`, and the solution is read from the lower half.
//!
//! Eigenvalues are decoded with a signed convention: phase fractions in
//! `[1/2, 1)` map to negative eigenvalues.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::qpe::{apply_phase_estimation, undo_phase_estimation};
use crate::stateprep::TargetVector;
use crate::statevector::{qubits_for, sample_distribution, Operator, Statevector};

/// Upper bound on every singular value of a spline system.
pub const SPLINE_EIGENVALUE_BOUND: f64 = 4.0;

/// Lower bound on every singular value of a spline system:
/// `min_i (a_ii - (r_i + c_i) / 2)` with `a_ii = 2`, `r_i <= 1`, `c_i <= 2`.
pub const SPLINE_EIGENVALUE_FLOOR: f64 = 0.5;

/// Weight allowed on eigenvalues strictly between zero and the floor.
pub const ILL_CONDITIONED_TOLERANCE: f64 = 1e-8;

const HERMITIAN_TOL: f64 = 1e-12;

/// `A x = b` with `A` padded to a power of two by identity rows.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem {
    dim: usize,
    operator: Operator,
    rhs: TargetVector,
    hermitian: bool,
}

impl LinearSystem {
    pub fn new(matrix: DMatrix<Complex64>, rhs: TargetVector) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidInput(format!(
                "matrix must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let dim = matrix.nrows();
        if rhs.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: rhs.len(),
            });
        }
        if dim == 0 {
            return Err(Error::InvalidInput("empty system".into()));
        }
        let padded = 1usize << qubits_for(dim);
        let mut full = DMatrix::identity(padded, padded);
        full.view_mut((0, 0), (dim, dim)).copy_from(&matrix);
        let scale = matrix.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let hermitian = (&matrix - matrix.adjoint())
            .iter()
            .all(|z| z.norm() <= HERMITIAN_TOL * scale);
        Ok(Self {
            dim,
            operator: Operator::new(full)?,
            rhs,
            hermitian,
        })
    }

    pub fn from_real(matrix: &DMatrix<f64>, rhs: &[f64]) -> Result<Self> {
        Self::new(matrix.map(|v| Complex64::new(v, 0.0)), TargetVector::from_real(rhs)?)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Padded operator.
    pub fn operator(&self) -> &Operator {
        &self.operator
    }

    pub fn rhs(&self) -> &TargetVector {
        &self.rhs
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    /// Original (unpadded) matrix.
    pub fn matrix(&self) -> DMatrix<Complex64> {
        self.operator.matrix().view((0, 0), (self.dim, self.dim)).into_owned()
    }

    /// Normalized right-hand side on the padded dimension.
    pub fn rhs_state(&self) -> Result<Statevector> {
        Statevector::from_unnormalized(self.rhs.entries())
    }

    /// The Hermitian matrix actually fed to phase estimation.
    pub fn hamiltonian(&self) -> Operator {
        if self.hermitian {
            self.operator.clone()
        } else {
            hermitian_embed(&self.operator)
        }
    }
}

/// `[[0, A], [A†, 0]]`.
pub fn hermitian_embed(a: &Operator) -> Operator {
    let d = a.dim();
    let mut m = DMatrix::zeros(2 * d, 2 * d);
    m.view_mut((0, d), (d, d)).copy_from(a.matrix());
    m.view_mut((d, 0), (d, d)).copy_from(&a.matrix().adjoint());
    Operator::new(m).expect("doubling a power of two stays a power of two")
}

/// Eigendecomposition of a Hermitian operator.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<Complex64>,
}

pub fn hermitian_eigen(a: &Operator) -> Result<HermitianEigen> {
    let deviation = a.hermiticity_deviation();
    let scale = a.matrix().iter().map(|z| z.norm()).fold(1.0, f64::max);
    if deviation > 1e-10 * scale {
        return Err(Error::NotHermitian { deviation });
    }
    let eig = a.matrix().clone().symmetric_eigen();
    Ok(HermitianEigen {
        values: eig.eigenvalues.iter().copied().collect(),
        vectors: eig.eigenvectors,
    })
}

impl HermitianEigen {
    /// `V diag(f(sigma)) V†`.
    pub fn map(&self, f: impl Fn(f64) -> Complex64) -> DMatrix<Complex64> {
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            self.values.len(),
            self.values.iter().map(|&s| f(s)),
        ));
        &self.vectors * d * self.vectors.adjoint()
    }
}

/// `e^{iAt}` by exact eigendecomposition.
pub fn evolve(a: &Operator, t: f64) -> Result<Operator> {
    let eig = hermitian_eigen(a)?;
    Operator::unitary(eig.map(|s| Complex64::from_polar(1.0, s * t)))
}

/// `2 pi (1/2 - 2^{-n}) / lambda_bound`: eigenvalues in `[-lambda, lambda]`
/// land strictly inside the signed phase window.
pub fn evolution_time(phase_bits: usize, eigenvalue_bound: f64) -> f64 {
    TAU * (0.5 - 2f64.powi(-(phase_bits as i32))) / eigenvalue_bound
}

/// `sigma = 2 pi wrap(value / 2^n) / t` with `wrap: [1/2, 1) -> [-1/2, 0)`.
pub fn signed_phase_decode(value: usize, phase_bits: usize, t: f64) -> f64 {
    let n = (1u64 << phase_bits) as f64;
    let mut frac = value as f64 / n;
    if frac >= 0.5 {
        frac -= 1.0;
    }
    TAU * frac / t
}

/// Largest absolute row sum.
pub fn gershgorin_row_bound(a: &Operator) -> f64 {
    a.matrix()
        .row_iter()
        .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub enum PostselectionMode {
    /// Report the exact ancilla branch mass.
    #[default]
    Exact,
    /// Estimate the branch mass from seeded ancilla measurements.
    Sampled { shots: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HhlConfig {
    pub phase_bits: usize,
    pub evolution_time: f64,
    pub eigenvalue_bound: f64,
    pub eigenvalue_floor: f64,
    pub inversion_constant: f64,
    pub mode: PostselectionMode,
}

impl HhlConfig {
    /// `C = floor = bound / kappa`.
    pub fn new(phase_bits: usize, eigenvalue_bound: f64, kappa: f64) -> Result<Self> {
        if phase_bits == 0 {
            return Err(Error::InvalidInput("need at least one phase bit".into()));
        }
        if !(eigenvalue_bound > 0.0 && kappa >= 1.0) {
            return Err(Error::InvalidInput(format!(
                "need a positive eigenvalue bound and kappa >= 1, got {eigenvalue_bound} and {kappa}"
            )));
        }
        let floor = eigenvalue_bound / kappa;
        Ok(Self {
            phase_bits,
            evolution_time: evolution_time(phase_bits, eigenvalue_bound),
            eigenvalue_bound,
            eigenvalue_floor: floor,
            inversion_constant: floor,
            mode: PostselectionMode::Exact,
        })
    }

    /// Spline systems: singular values in `[1/2, 4]`.
    pub fn for_spline(phase_bits: usize) -> Self {
        Self::new(
            phase_bits,
            SPLINE_EIGENVALUE_BOUND,
            SPLINE_EIGENVALUE_BOUND / SPLINE_EIGENVALUE_FLOOR,
        )
        .expect("constant spline configuration is valid")
    }

    /// General systems: bound from the Gershgorin rows of the Hamiltonian.
    pub fn for_system(system: &LinearSystem, phase_bits: usize, kappa: f64) -> Result<Self> {
        Self::new(phase_bits, gershgorin_row_bound(&system.hamiltonian()), kappa)
    }

    pub fn with_mode(mut self, mode: PostselectionMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn configured_kappa(&self) -> f64 {
        self.eigenvalue_bound / self.eigenvalue_floor
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HhlResult {
    /// Clean solution on the padded system dimension, normalized.
    pub solution_state: Statevector,
    /// Ancilla success mass (estimated in sampled mode).
    pub success_probability: f64,
    pub exact_success_probability: f64,
    /// Estimate of `||f(A) b|| / ||b||`.
    pub norm_estimate: f64,
    /// Success-branch weight left outside `|0>` on the phase register.
    pub residual_weight: f64,
    /// Clean-state weight on the auxiliary half of the embedding.
    pub embedding_weight: f64,
    /// Solution weight on padding coordinates.
    pub padding_weight: f64,
    pub naive_repetitions: f64,
    pub amplified_repetitions: f64,
    pub phase_bits: usize,
}

impl HhlResult {
    /// First `dim` amplitudes, renormalized.
    pub fn solution(&self, dim: usize) -> Vec<Complex64> {
        let v = &self.solution_state.amplitudes()[..dim];
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.iter().map(|z| z / norm).collect()
    }
}

/// Weight of `b` on eigenvectors with `0 < |sigma| < floor`.
pub fn ill_conditioned_weight(eig: &HermitianEigen, b: &Statevector, floor: f64) -> f64 {
    let top = eig.values.iter().fold(1.0f64, |m, s| m.max(s.abs()));
    let null = 1e-10 * top;
    eig.values
        .iter()
        .enumerate()
        .filter(|(_, s)| s.abs() > null && s.abs() < floor * (1.0 - 1e-12))
        .map(|(j, _)| {
            let v = eig.vectors.column(j);
            v.iter()
                .zip(b.amplitudes())
                .map(|(a, x)| a.conj() * x)
                .sum::<Complex64>()
                .norm_sqr()
        })
        .sum()
}

/// Solves with `|b>` amplitude-encoded from the system's right-hand side.
pub fn solve(system: &LinearSystem, config: &HhlConfig) -> Result<HhlResult> {
    solve_with_state(system, &system.rhs_state()?, config)
}

/// Solves with a supplied `|b>` on the padded system dimension.
pub fn solve_with_state(system: &LinearSystem, b: &Statevector, config: &HhlConfig) -> Result<HhlResult> {
    if config.inversion_constant > config.eigenvalue_floor * (1.0 + 1e-12) {
        return Err(Error::InvalidInput(format!(
            "inversion constant {} exceeds the eigenvalue floor {}",
            config.inversion_constant, config.eigenvalue_floor
        )));
    }
    let h = system.hamiltonian();
    let input = lift_rhs(system, b)?;
    let eig = hermitian_eigen(&h)?;
    let weight = ill_conditioned_weight(&eig, &input, config.eigenvalue_floor);
    if weight > ILL_CONDITIONED_TOLERANCE {
        return Err(Error::IllConditioned {
            weight,
            floor: config.eigenvalue_floor,
        });
    }
    let c = config.inversion_constant;
    let amplitudes: Vec<Option<f64>> = (0..1usize << config.phase_bits)
        .map(|y| {
            (y != 0).then(|| {
                let sigma = signed_phase_decode(y, config.phase_bits, config.evolution_time);
                (c / sigma).clamp(-1.0, 1.0)
            })
        })
        .collect();
    run(system, &eig, &input, config, &amplitudes, 1.0 / c)
}

/// Prepares a state proportional to `p(A)|b>` for Hermitian `A`, with
/// `p(sigma) = sum_k coefficients[k] sigma^k`. The rotation amplitudes are
/// rescaled by the largest `|p|` over the decodable grid when it exceeds 1.
pub fn apply_matrix_function(system: &LinearSystem, coefficients: &[f64], config: &HhlConfig) -> Result<HhlResult> {
    if !system.is_hermitian() {
        return Err(Error::NotHermitian {
            deviation: system.operator.hermiticity_deviation(),
        });
    }
    if coefficients.is_empty() {
        return Err(Error::InvalidInput("polynomial needs at least one coefficient".into()));
    }
    let eval = |s: f64| coefficients.iter().rev().fold(0.0, |acc, &k| acc * s + k);
    let values: Vec<f64> = (0..1usize << config.phase_bits)
        .map(|y| eval(signed_phase_decode(y, config.phase_bits, config.evolution_time)))
        .collect();
    let scale = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let amplitudes: Vec<Option<f64>> = values.iter().map(|v| Some(v / scale)).collect();
    let b = system.rhs_state()?;
    let eig = hermitian_eigen(&system.operator)?;
    run(system, &eig, &b, config, &amplitudes, scale)
}

/// `|b>` on the Hamiltonian's dimension: `(b, 0)` when embedded.
fn lift_rhs(system: &LinearSystem, b: &Statevector) -> Result<Statevector> {
    if b.dim() != system.operator.dim() {
        return Err(Error::DimensionMismatch {
            expected: system.operator.dim(),
            found: b.dim(),
        });
    }
    if system.hermitian {
        return Ok(b.clone());
    }
    let mut amps = b.amplitudes().to_vec();
    amps.resize(2 * b.dim(), Complex64::new(0.0, 0.0));
    Statevector::from_amplitudes(amps)
}

/// `[[sqrt(1 - a^2), a], [-a, sqrt(1 - a^2)]]`: sends `|1>` to `a|0> + sqrt(1 - a^2)|1>`.
fn ancilla_rotation(a: f64) -> Operator {
    let r = (1.0 - a * a).max(0.0).sqrt();
    let m = DMatrix::from_row_slice(2, 2, &[r, a, -a, r]).map(|v| Complex64::new(v, 0.0));
    Operator::new(m).expect("2x2 rotation")
}

fn run(
    system: &LinearSystem,
    eig: &HermitianEigen,
    input: &Statevector,
    config: &HhlConfig,
    amplitudes: &[Option<f64>],
    norm_scale: f64,
) -> Result<HhlResult> {
    let n = config.phase_bits;
    let s = input.num_qubits();
    let sys: Vec<usize> = (0..s).collect();
    let phase: Vec<usize> = (s..s + n).collect();
    let ancilla = s + n;

    let unitary = Operator::unitary(eig.map(|v| Complex64::from_polar(1.0, v * config.evolution_time)))?;
    let powers = unitary.power_ladder(n);

    let start = Statevector::tensor(&Statevector::basis(1, 1)?, &Statevector::zero(n)?)?;
    let mut state = Statevector::tensor(&start, input)?;
    apply_phase_estimation(&mut state, &powers, &phase, &sys)?;
    let ops: Vec<Option<Operator>> = amplitudes.iter().map(|a| a.map(ancilla_rotation)).collect();
    state.apply_multiplexed_mut(&phase, &[ancilla], &ops)?;
    undo_phase_estimation(&mut state, &powers, &phase, &sys)?;

    let exact_success = state.probabilities_on(&[ancilla])?[0];
    let success = match config.mode {
        PostselectionMode::Exact => exact_success,
        PostselectionMode::Sampled { shots, seed } => {
            if shots == 0 {
                return Err(Error::InvalidInput("shots must be at least 1".into()));
            }
            let hist = sample_distribution(&[exact_success, 1.0 - exact_success], shots, seed);
            hist[0] as f64 / shots as f64
        }
    };
    if success < crate::statevector::MIN_BRANCH_PROBABILITY {
        return Err(Error::DegeneratePostselection { probability: success });
    }

    let mut flags = phase.clone();
    flags.push(ancilla);
    let (clean, joint) = state.postselect_register(&flags, 0)?;
    let residual_weight = (1.0 - joint / exact_success).max(0.0);

    let (solution_state, embedding_weight) = if system.hermitian {
        (clean, 0.0)
    } else {
        let (lower, kept) = clean.postselect_register(&[s - 1], 1)?;
        (lower, 1.0 - kept)
    };
    let padding_weight: f64 = solution_state.amplitudes()[system.dim..]
        .iter()
        .map(|z| z.norm_sqr())
        .sum();

    Ok(HhlResult {
        solution_state,
        success_probability: success,
        exact_success_probability: exact_success,
        norm_estimate: success.sqrt() * norm_scale,
        residual_weight,
        embedding_weight,
        padding_weight,
        naive_repetitions: 1.0 / success,
        amplified_repetitions: 1.0 / success.sqrt(),
        phase_bits: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn c(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    fn state_of(v: &[Complex64]) -> Statevector {
        Statevector::from_unnormalized(v).unwrap()
    }

    fn fidelity(result: &HhlResult, expected: &[Complex64]) -> f64 {
        let got = result.solution(expected.len());
        state_of(&got).fidelity(&state_of(expected)).unwrap()
    }

    fn random_hermitian(d: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
        let a = DMatrix::from_fn(d, d, |_, _| {
            Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        (&a + a.adjoint()) * c(0.5)
    }

    /// Exact clean output: `sum_j gamma_j (sum_y |a_j(y)|^2 r(y)) |u_j>` with
    /// the closed-form phase-estimation weights `|a_j(y)|^2`.
    fn analytic_solution(
        eig: &HermitianEigen,
        b: &Statevector,
        config: &HhlConfig,
        r: impl Fn(usize) -> f64,
    ) -> Vec<Complex64> {
        let n = 1usize << config.phase_bits;
        let big = n as f64;
        let mut out = vec![c(0.0); b.dim()];
        for (j, &sigma) in eig.values.iter().enumerate() {
            let phi = sigma * config.evolution_time / TAU;
            let w: f64 = (0..n)
                .map(|y| {
                    let d = phi - y as f64 / big;
                    let den = big * (PI * d).sin();
                    let p = if den.abs() < 1e-13 {
                        1.0
                    } else {
                        ((big * PI * d).sin() / den).powi(2)
                    };
                    p * r(y)
                })
                .sum();
            let u = eig.vectors.column(j);
            let gamma: Complex64 = u.iter().zip(b.amplitudes()).map(|(a, x)| a.conj() * x).sum();
            for (o, ui) in out.iter_mut().zip(u.iter()) {
                *o += gamma * w * ui;
            }
        }
        out
    }

    #[test]
    fn embedding_shape() {
        let a = Operator::new(DMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(0.0), c(0.0)])).unwrap();
        let e = hermitian_embed(&a);
        assert_eq!(e.dim(), 4);
        assert_eq!(e.matrix()[(0, 3)], c(1.0));
        assert_eq!(e.matrix()[(3, 0)], c(1.0));
        assert_eq!(e.matrix().iter().filter(|z| z.norm() > 0.0).count(), 2);

        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let m = DMatrix::from_fn(4, 4, |_, _| Complex64::new(rng.random::<f64>(), rng.random::<f64>()));
        let e = hermitian_embed(&Operator::new(m.clone()).unwrap());
        assert!(e.hermiticity_deviation() <= 1e-12);
        let mut vals = hermitian_eigen(&e).unwrap().values;
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for k in 0..4 {
            assert_abs_diff_eq!(vals[k], -vals[7 - k], epsilon = 1e-10);
        }
        let sv = m.singular_values();
        let mut sv: Vec<f64> = sv.iter().copied().collect();
        sv.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for k in 0..4 {
            assert_abs_diff_eq!(vals[4 + k], sv[k], epsilon = 1e-10);
        }
    }

    #[test]
    fn evolution_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = Operator::new(random_hermitian(4, &mut rng)).unwrap();
        let zero = evolve(&h, 0.0).unwrap();
        assert!((zero.matrix() - DMatrix::identity(4, 4))
            .iter()
            .all(|z| z.norm() < 1e-10));
        let fwd = evolve(&h, 0.7).unwrap();
        let back = evolve(&h, -0.7).unwrap();
        let prod = fwd.compose(&back).unwrap();
        assert!((prod.matrix() - DMatrix::identity(4, 4))
            .iter()
            .all(|z| z.norm() < 1e-10));

        let d = Operator::diagonal(&[c(0.3), c(-1.1)]).unwrap();
        let u = evolve(&d, 2.0).unwrap();
        assert_abs_diff_eq!(
            (u.matrix()[(0, 0)] - Complex64::from_polar(1.0, 0.6)).norm(),
            0.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            (u.matrix()[(1, 1)] - Complex64::from_polar(1.0, -2.2)).norm(),
            0.0,
            epsilon = 1e-12
        );

        let bad = Operator::new(DMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(0.0), c(0.0)])).unwrap();
        assert!(matches!(evolve(&bad, 1.0), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn decode_convention() {
        let t = 1.3;
        assert_eq!(signed_phase_decode(0, 4, t), 0.0);
        assert_abs_diff_eq!(signed_phase_decode(8, 4, t), -PI / t, epsilon = 1e-15);
        assert_abs_diff_eq!(signed_phase_decode(7, 4, t), TAU * 7.0 / 16.0 / t, epsilon = 1e-15);

        // Singular value 1/2 of an off-diagonal 2x2 shows up as +-1/2.
        let a = DMatrix::from_row_slice(2, 2, &[c(0.0), c(0.5), c(0.0), c(0.0)]);
        let e = hermitian_embed(&Operator::new(a).unwrap());
        let t = TAU / 4.0;
        for sigma in hermitian_eigen(&e).unwrap().values {
            if sigma.abs() < 1e-12 {
                continue;
            }
            let phi = (sigma * t / TAU).rem_euclid(1.0);
            let y = (phi * 16.0).round() as usize;
            assert_abs_diff_eq!(signed_phase_decode(y, 4, t), sigma, epsilon = 1e-12);
        }
    }

    #[test]
    fn identity_returns_rhs() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let b: Vec<Complex64> = (0..4).map(|_| Complex64::new(rng.random(), rng.random())).collect();
        let sys = LinearSystem::new(DMatrix::identity(4, 4), TargetVector::new(b.clone()).unwrap()).unwrap();
        let cfg = HhlConfig::new(4, 1.0, 1.0).unwrap();
        let res = solve(&sys, &cfg).unwrap();
        assert_abs_diff_eq!(fidelity(&res, &b), 1.0, epsilon = 1e-10);
        assert!(res.residual_weight <= 1e-8);
    }

    #[test]
    fn dyadic_diagonal_example() {
        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0), c(0.5)]));
        let sys = LinearSystem::new(a, TargetVector::from_real(&[0.0, 1.0]).unwrap()).unwrap();
        let mut cfg = HhlConfig::new(4, 1.0, 2.0).unwrap();
        cfg.evolution_time = TAU / 4.0;
        let res = solve(&sys, &cfg).unwrap();
        assert_abs_diff_eq!(fidelity(&res, &[c(0.0), c(1.0)]), 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(res.norm_estimate, 2.0, epsilon = 1e-6);
        assert!(res.residual_weight <= 1e-8);
    }

    #[test]
    fn matches_analytic_clean_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..3 {
            let h = random_hermitian(4, &mut rng) + DMatrix::identity(4, 4) * c(2.0);
            let b: Vec<Complex64> = (0..4)
                .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>()))
                .collect();
            let sys = LinearSystem::new(h, TargetVector::new(b).unwrap()).unwrap();
            let eig = hermitian_eigen(sys.operator()).unwrap();
            let lo = eig.values.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
            let bound = gershgorin_row_bound(sys.operator());
            let cfg = HhlConfig::new(6, bound, bound / lo).unwrap();
            let res = solve(&sys, &cfg).unwrap();
            let b = sys.rhs_state().unwrap();
            let r = |y: usize| {
                if y == 0 {
                    0.0
                } else {
                    (cfg.inversion_constant / signed_phase_decode(y, cfg.phase_bits, cfg.evolution_time))
                        .clamp(-1.0, 1.0)
                }
            };
            let expect = analytic_solution(&eig, &b, &cfg, r);
            assert!(fidelity(&res, &expect) >= 1.0 - 1e-10);
            let clean_mass: f64 = expect.iter().map(|z| z.norm_sqr()).sum();
            assert_abs_diff_eq!(
                clean_mass,
                res.exact_success_probability * (1.0 - res.residual_weight),
                epsilon = 1e-10
            );
        }
    }

    #[test]
    fn non_hermitian_via_embedding() {
        let a = DMatrix::from_row_slice(3, 3, &[2.0, 1.0, 0.0, 0.25, 2.0, 0.75, 0.0, 1.0, 2.0]);
        let b = [1.0, -2.0, 0.5];
        let sys = LinearSystem::from_real(&a, &b).unwrap();
        assert!(!sys.is_hermitian());
        let direct = a.clone().lu().solve(&nalgebra::DVector::from_column_slice(&b)).unwrap();
        let expect: Vec<Complex64> = direct.iter().map(|&v| c(v)).collect();
        let res = solve(&sys, &HhlConfig::for_spline(10)).unwrap();
        assert!(fidelity(&res, &expect) >= 0.999);
        assert!(res.padding_weight <= 1e-8);
        assert!(res.embedding_weight <= 1e-3);
    }

    #[test]
    fn doubling_bits_halves_infidelity() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let h = random_hermitian(4, &mut rng) * c(0.3) + DMatrix::identity(4, 4) * c(1.5);
        let b: Vec<Complex64> = (0..4).map(|_| c(rng.random::<f64>() + 0.1)).collect();
        let sys = LinearSystem::new(h.clone(), TargetVector::new(b.clone()).unwrap()).unwrap();
        let direct = h.lu().solve(&nalgebra::DVector::from_vec(b)).unwrap();
        let expect: Vec<Complex64> = direct.iter().copied().collect();
        let bound = gershgorin_row_bound(sys.operator());
        let infid = |n: usize| {
            let res = solve(&sys, &HhlConfig::new(n, bound, 8.0 * bound).unwrap()).unwrap();
            1.0 - fidelity(&res, &expect)
        };
        let (coarse, fine) = (infid(4), infid(8));
        assert!(fine <= coarse / 2.0, "{coarse} -> {fine}");
    }

    #[test]
    fn pseudoinverse_on_singular_diagonal() {
        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0), c(0.0)]));
        let sys = LinearSystem::new(a, TargetVector::from_real(&[1.0, 1.0]).unwrap()).unwrap();
        let mut cfg = HhlConfig::new(4, 1.0, 2.0).unwrap();
        cfg.evolution_time = TAU / 4.0;
        let res = solve(&sys, &cfg).unwrap();
        assert_abs_diff_eq!(fidelity(&res, &[c(1.0), c(0.0)]), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn rejects_weight_below_floor() {
        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0), c(0.1)]));
        let sys = LinearSystem::new(a, TargetVector::from_real(&[1.0, 1.0]).unwrap()).unwrap();
        assert!(matches!(
            solve(&sys, &HhlConfig::new(4, 1.0, 2.0).unwrap()),
            Err(Error::IllConditioned { .. })
        ));
    }

    #[test]
    fn success_probability_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let h = random_hermitian(4, &mut rng) * c(0.2) + DMatrix::identity(4, 4) * c(2.0);
        let b: Vec<Complex64> = (0..4).map(|_| Complex64::new(rng.random(), rng.random())).collect();
        let sys = LinearSystem::new(h, TargetVector::new(b).unwrap()).unwrap();
        let cfg = HhlConfig::new(8, 4.0, 8.0).unwrap();
        let res = solve(&sys, &cfg).unwrap();
        let kappa = cfg.configured_kappa();
        assert!(res.success_probability >= 1.0 / (kappa * kappa));

        let sampled = solve(
            &sys,
            &cfg.with_mode(PostselectionMode::Sampled { shots: 20000, seed: 1 }),
        )
        .unwrap();
        assert!((sampled.success_probability - res.success_probability).abs() < 0.02);
        assert_eq!(sampled.solution_state, res.solution_state);
    }

    #[test]
    fn linearity_in_rhs() {
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.5]).map(c);
        let b = vec![c(0.3), Complex64::new(-0.2, 0.4)];
        let alpha = Complex64::new(-2.5, 1.25);
        let scaled: Vec<Complex64> = b.iter().map(|z| z * alpha).collect();
        let cfg = HhlConfig::for_spline(6);
        let r1 = solve(
            &LinearSystem::new(a.clone(), TargetVector::new(b).unwrap()).unwrap(),
            &cfg,
        )
        .unwrap();
        let r2 = solve(&LinearSystem::new(a, TargetVector::new(scaled).unwrap()).unwrap(), &cfg).unwrap();
        assert!(r1.solution_state.fidelity(&r2.solution_state).unwrap() >= 1.0 - 1e-10);
    }

    fn diagonal_system(d: &[f64], b: &[f64]) -> LinearSystem {
        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(d.len(), d.iter().map(|&v| c(v))));
        LinearSystem::new(a, TargetVector::from_real(b).unwrap()).unwrap()
    }

    #[test]
    fn polynomial_examples() {
        let mut cfg = HhlConfig::new(4, 1.0, 2.0).unwrap();
        cfg.evolution_time = TAU / 4.0;

        let sys = diagonal_system(&[0.5, 0.25], &[1.0, 1.0]);
        let id = apply_matrix_function(&sys, &[1.0], &cfg).unwrap();
        assert_abs_diff_eq!(fidelity(&id, &[c(1.0), c(1.0)]), 1.0, epsilon = 1e-10);

        let lin = apply_matrix_function(&sys, &[0.0, 1.0], &cfg).unwrap();
        assert!(fidelity(&lin, &[c(0.5), c(0.25)]) >= 1.0 - 1e-6);
        assert_abs_diff_eq!(lin.norm_estimate, (0.3125f64 / 2.0).sqrt(), epsilon = 1e-9);

        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..4 {
            let d: Vec<f64> = (0..4).map(|_| (rng.random_range(1..=4) as f64) / 4.0).collect();
            let b: Vec<f64> = (0..4).map(|_| rng.random::<f64>() + 0.1).collect();
            let sys = diagonal_system(&d, &b);
            let sq = apply_matrix_function(&sys, &[0.0, 0.0, 1.0], &cfg).unwrap();
            let once = apply_matrix_function(&sys, &[0.0, 1.0], &cfg).unwrap();
            let mid: Vec<f64> = once.solution(4).iter().map(|z| z.re).collect();
            let twice = apply_matrix_function(&diagonal_system(&d, &mid), &[0.0, 1.0], &cfg).unwrap();
            assert!(sq.solution_state.fidelity(&twice.solution_state).unwrap() >= 1.0 - 1e-10);
        }
    }
}
