//! Dense complex statevector simulation.
//!
//! Qubit ordering is little-endian everywhere in this crate: qubit `k` is bit
//! `k` of the basis index, so qubit 0 is the least significant bit. When a
//! list of qubits is read as a register value, the first listed qubit is the
//! least significant bit of that value.
//!
//! Every operation here is a pure function from inputs to a fresh output; the
//! `*_mut` methods on [`Statevector`] are the in-place kernels they share.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rustfft::{FftDirection, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hard cap on the register size of a dense state.
pub const MAX_QUBITS: usize = 24;

/// Tolerance used when validating unitarity, Hermiticity and normalization.
pub const VALIDATION_TOL: f64 = 1e-10;

/// Branches lighter than this cannot be postselected.
pub const MIN_BRANCH_PROBABILITY: f64 = 1e-14;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A normalized amplitude vector over `num_qubits` qubits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Statevector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

fn check_qubit_count(num_qubits: usize) -> Result<()> {
    if num_qubits > MAX_QUBITS {
        return Err(Error::ResourceLimit {
            requested: num_qubits,
            max: MAX_QUBITS,
        });
    }
    Ok(())
}

/// Number of qubits needed to index `len` entries; `len` must be a power of two.
pub(crate) fn log2_exact(len: usize) -> Option<usize> {
    if len.is_power_of_two() {
        Some(len.trailing_zeros() as usize)
    } else {
        None
    }
}

/// Smallest `q` with `2^q >= len` (and 0 for `len <= 1`).
pub fn qubits_for(len: usize) -> usize {
    len.max(1).next_power_of_two().trailing_zeros() as usize
}

impl Statevector {
    /// `|index>` on `num_qubits` qubits.
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        check_qubit_count(num_qubits)?;
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(Error::InvalidInput(format!(
                "basis index {index} out of range for dimension {dim}"
            )));
        }
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[index] = ONE;
        Ok(Self { num_qubits, amplitudes })
    }

    /// `|0...0>`.
    pub fn zero(num_qubits: usize) -> Result<Self> {
        Self::basis(num_qubits, 0)
    }

    /// Wraps amplitudes that are already normalized (within [`VALIDATION_TOL`]).
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let num_qubits = log2_exact(amplitudes.len()).ok_or_else(|| {
            Error::InvalidInput(format!("amplitude count {} is not a power of two", amplitudes.len()))
        })?;
        check_qubit_count(num_qubits)?;
        let norm = l2_norm(&amplitudes);
        if (norm - 1.0).abs() > VALIDATION_TOL {
            return Err(Error::InvalidInput(format!("amplitudes have norm {norm}, expected 1")));
        }
        Ok(Self { num_qubits, amplitudes })
    }

    /// Normalizes `values`, zero-padding to the next power of two.
    pub fn from_unnormalized(values: &[Complex64]) -> Result<Self> {
        let norm = l2_norm(values);
        if values.is_empty() || norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidInput("cannot normalize an all-zero vector".into()));
        }
        let num_qubits = qubits_for(values.len());
        check_qubit_count(num_qubits)?;
        let mut amplitudes = vec![ZERO; 1 << num_qubits];
        for (dst, v) in amplitudes.iter_mut().zip(values) {
            *dst = v / norm;
        }
        Ok(Self { num_qubits, amplitudes })
    }

    /// Same as [`Statevector::from_unnormalized`] for real data.
    pub fn from_real(values: &[f64]) -> Result<Self> {
        let values: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        Self::from_unnormalized(&values)
    }

    /// `high ⊗ low`: `low` occupies the least significant qubits.
    pub fn tensor(high: &Statevector, low: &Statevector) -> Result<Self> {
        let num_qubits = high.num_qubits + low.num_qubits;
        check_qubit_count(num_qubits)?;
        let mut amplitudes = Vec::with_capacity(1 << num_qubits);
        for h in &high.amplitudes {
            amplitudes.extend(low.amplitudes.iter().map(|l| h * l));
        }
        Ok(Self { num_qubits, amplitudes })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        l2_norm(&self.amplitudes)
    }

    /// Multiplies every amplitude by `factor` (a global phase when `|factor| = 1`).
    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            num_qubits: self.num_qubits,
            amplitudes: self.amplitudes.iter().map(|a| a * factor).collect(),
        }
    }

    /// `<self|other>`.
    pub fn inner_product(&self, other: &Statevector) -> Result<Complex64> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits,
                found: other.num_qubits,
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &Statevector) -> Result<f64> {
        Ok(self.inner_product(other)?.norm_sqr())
    }

    fn check_qubits(&self, qubits: &[usize]) -> Result<usize> {
        let mut mask = 0usize;
        for &q in qubits {
            if q >= self.num_qubits {
                return Err(Error::QubitOutOfRange {
                    index: q,
                    num_qubits: self.num_qubits,
                });
            }
            if mask & (1 << q) != 0 {
                return Err(Error::InvalidInput(format!("qubit {q} listed twice")));
            }
            mask |= 1 << q;
        }
        Ok(mask)
    }

    /// Marginal distribution of the register formed by `qubits`.
    pub fn probabilities_on(&self, qubits: &[usize]) -> Result<Vec<f64>> {
        self.check_qubits(qubits)?;
        let mut probs = vec![0.0; 1 << qubits.len()];
        for (idx, amp) in self.amplitudes.iter().enumerate() {
            probs[gather_bits(idx, qubits)] += amp.norm_sqr();
        }
        Ok(probs)
    }

    /// Conditions on `qubit == outcome`. The returned state keeps the qubit.
    pub fn postselect(&self, qubit: usize, outcome: bool) -> Result<(Statevector, f64)> {
        self.check_qubits(&[qubit])?;
        let want = usize::from(outcome) << qubit;
        let probability: f64 = self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(idx, _)| idx & (1 << qubit) == want)
            .map(|(_, a)| a.norm_sqr())
            .sum();
        if probability < MIN_BRANCH_PROBABILITY {
            return Err(Error::DegeneratePostselection { probability });
        }
        let scale = 1.0 / probability.sqrt();
        let amplitudes = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(idx, a)| if idx & (1 << qubit) == want { a * scale } else { ZERO })
            .collect();
        Ok((
            Statevector {
                num_qubits: self.num_qubits,
                amplitudes,
            },
            probability,
        ))
    }

    /// Conditions the register `qubits` on `value` and removes it from the state.
    pub fn postselect_register(&self, qubits: &[usize], value: usize) -> Result<(Statevector, f64)> {
        let mask = self.check_qubits(qubits)?;
        if value >= 1 << qubits.len() {
            return Err(Error::InvalidInput(format!(
                "register value {value} does not fit in {} qubits",
                qubits.len()
            )));
        }
        let want = scatter_bits(value, qubits);
        let kept: Vec<usize> = (0..self.num_qubits).filter(|q| mask & (1 << q) == 0).collect();
        let mut amplitudes = vec![ZERO; 1 << kept.len()];
        let mut probability = 0.0;
        for (idx, amp) in self.amplitudes.iter().enumerate() {
            if idx & mask == want {
                amplitudes[gather_bits(idx, &kept)] = *amp;
                probability += amp.norm_sqr();
            }
        }
        if probability < MIN_BRANCH_PROBABILITY {
            return Err(Error::DegeneratePostselection { probability });
        }
        let scale = 1.0 / probability.sqrt();
        amplitudes.iter_mut().for_each(|a| *a *= scale);
        Ok((
            Statevector {
                num_qubits: kept.len(),
                amplitudes,
            },
            probability,
        ))
    }

    /// Draws `shots` measurements of `qubits`; the histogram is indexed by register value.
    pub fn sample(&self, qubits: &[usize], shots: usize, seed: u64) -> Result<Vec<u64>> {
        if shots == 0 {
            return Err(Error::InvalidInput("shots must be at least 1".into()));
        }
        let probs = self.probabilities_on(qubits)?;
        Ok(sample_distribution(&probs, shots, seed))
    }

    /// Applies `op` to `targets` in place.
    pub fn apply_mut(&mut self, op: &Operator, targets: &[usize]) -> Result<()> {
        self.apply_conditioned_mut(op, targets, &[], 0)
    }

    /// Applies `op` to `targets` on the subspace where every control qubit is 1.
    pub fn apply_controlled_mut(&mut self, op: &Operator, controls: &[usize], targets: &[usize]) -> Result<()> {
        let all_ones = (1usize << controls.len()) - 1;
        self.apply_conditioned_mut(op, targets, controls, all_ones)
    }

    /// Applies `op` to `targets` on the subspace where the register `controls`
    /// holds `value`.
    pub fn apply_conditioned_mut(
        &mut self,
        op: &Operator,
        targets: &[usize],
        controls: &[usize],
        value: usize,
    ) -> Result<()> {
        if op.num_qubits() != targets.len() {
            return Err(Error::DimensionMismatch {
                expected: 1 << targets.len(),
                found: op.dim(),
            });
        }
        let tmask = self.check_qubits(targets)?;
        let cmask = self.check_qubits(controls)?;
        if tmask & cmask != 0 {
            return Err(Error::InvalidInput("control and target qubits overlap".into()));
        }
        let cvalue = scatter_bits(value, controls);
        let m = op.matrix();
        apply_kernel(&mut self.amplitudes, targets, |idx| {
            (idx & cmask == cvalue).then_some(m)
        });
        Ok(())
    }

    /// Uniformly controlled operation: applies `ops[v]` to `targets` on the
    /// subspace where the register `selectors` holds `v`. `None` entries act as
    /// the identity.
    pub fn apply_multiplexed_mut(
        &mut self,
        selectors: &[usize],
        targets: &[usize],
        ops: &[Option<Operator>],
    ) -> Result<()> {
        if ops.len() != 1 << selectors.len() {
            return Err(Error::DimensionMismatch {
                expected: 1 << selectors.len(),
                found: ops.len(),
            });
        }
        for op in ops.iter().flatten() {
            if op.num_qubits() != targets.len() {
                return Err(Error::DimensionMismatch {
                    expected: 1 << targets.len(),
                    found: op.dim(),
                });
            }
        }
        let tmask = self.check_qubits(targets)?;
        let smask = self.check_qubits(selectors)?;
        if tmask & smask != 0 {
            return Err(Error::InvalidInput("selector and target qubits overlap".into()));
        }
        apply_kernel(&mut self.amplitudes, targets, |idx| {
            ops[gather_bits(idx, selectors)].as_ref().map(Operator::matrix)
        });
        Ok(())
    }

    /// Quantum Fourier transform on the register `qubits`:
    /// `|x> -> N^{-1/2} sum_y exp(+2 pi i x y / N) |y>`, or its inverse.
    ///
    /// Evaluated fiber by fiber with an FFT; equal to applying [`qft_operator`].
    pub fn apply_qft_mut(&mut self, qubits: &[usize], inverse: bool) -> Result<()> {
        let mask = self.check_qubits(qubits)?;
        if qubits.is_empty() {
            return Ok(());
        }
        let len = 1usize << qubits.len();
        let direction = if inverse {
            FftDirection::Forward
        } else {
            FftDirection::Inverse
        };
        let fft = FftPlanner::<f64>::new().plan_fft(len, direction);
        let offsets: Vec<usize> = (0..len).map(|v| scatter_bits(v, qubits)).collect();
        let scale = 1.0 / (len as f64).sqrt();
        let mut buf = vec![ZERO; len];
        for base in 0..self.amplitudes.len() {
            if base & mask != 0 {
                continue;
            }
            for (b, off) in buf.iter_mut().zip(&offsets) {
                *b = self.amplitudes[base | off];
            }
            fft.process(&mut buf);
            for (b, off) in buf.iter().zip(&offsets) {
                self.amplitudes[base | off] = b * scale;
            }
        }
        Ok(())
    }

    /// Hadamard on each listed qubit.
    pub fn apply_hadamards_mut(&mut self, qubits: &[usize]) -> Result<()> {
        let h = gates::hadamard();
        for &q in qubits {
            self.apply_mut(&h, &[q])?;
        }
        Ok(())
    }
}

/// Draws `shots` samples from `probs` with a seeded ChaCha stream.
pub fn sample_distribution(probs: &[f64], shots: usize, seed: u64) -> Vec<u64> {
    let mut counts = vec![0u64; probs.len()];
    // Clamp rounding noise so the sampler never sees a negative weight.
    let weights: Vec<f64> = probs.iter().map(|p| p.max(0.0)).collect();
    let dist = WeightedIndex::new(&weights).expect("distribution has positive mass");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..shots {
        counts[dist.sample(&mut rng)] += 1;
    }
    counts
}

pub(crate) fn l2_norm(values: &[Complex64]) -> f64 {
    values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// Reads the bits of `idx` at positions `qubits` into a packed value.
pub(crate) fn gather_bits(idx: usize, qubits: &[usize]) -> usize {
    qubits
        .iter()
        .enumerate()
        .fold(0, |acc, (k, &q)| acc | (((idx >> q) & 1) << k))
}

/// Inverse of [`gather_bits`]: places bit `k` of `value` at position `qubits[k]`.
pub(crate) fn scatter_bits(value: usize, qubits: &[usize]) -> usize {
    qubits
        .iter()
        .enumerate()
        .fold(0, |acc, (k, &q)| acc | (((value >> k) & 1) << q))
}

fn apply_kernel<'a, F>(amps: &mut [Complex64], targets: &[usize], select: F)
where
    F: Fn(usize) -> Option<&'a DMatrix<Complex64>>,
{
    let tmask = targets.iter().fold(0usize, |m, &q| m | (1 << q));
    let len = 1usize << targets.len();
    let offsets: Vec<usize> = (0..len).map(|v| scatter_bits(v, targets)).collect();
    let mut buf = vec![ZERO; len];
    for base in 0..amps.len() {
        if base & tmask != 0 {
            continue;
        }
        let Some(m) = select(base) else { continue };
        for (b, off) in buf.iter_mut().zip(&offsets) {
            *b = amps[base | off];
        }
        for (r, off) in offsets.iter().enumerate() {
            let mut acc = ZERO;
            for (c, b) in buf.iter().enumerate() {
                acc += m[(r, c)] * b;
            }
            amps[base | off] = acc;
        }
    }
}

/// A dense operator on `num_qubits` qubits, optionally validated as unitary or
/// Hermitian at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    matrix: DMatrix<Complex64>,
    num_qubits: usize,
    unitary: bool,
    hermitian: bool,
}

impl Operator {
    /// Wraps a square matrix whose dimension is a power of two.
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidInput(format!(
                "operator must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let num_qubits = log2_exact(matrix.nrows()).ok_or_else(|| {
            Error::InvalidInput(format!("operator dimension {} is not a power of two", matrix.nrows()))
        })?;
        check_qubit_count(num_qubits)?;
        Ok(Self {
            matrix,
            num_qubits,
            unitary: false,
            hermitian: false,
        })
    }

    /// Validates `U^dagger U = I` entrywise within [`VALIDATION_TOL`].
    pub fn unitary(matrix: DMatrix<Complex64>) -> Result<Self> {
        let mut op = Self::new(matrix)?;
        let deviation = op.unitarity_deviation();
        if deviation > VALIDATION_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        op.unitary = true;
        Ok(op)
    }

    /// Validates `A = A^dagger` entrywise within [`VALIDATION_TOL`].
    pub fn hermitian(matrix: DMatrix<Complex64>) -> Result<Self> {
        let mut op = Self::new(matrix)?;
        let deviation = op.hermiticity_deviation();
        if deviation > VALIDATION_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        op.hermitian = true;
        Ok(op)
    }

    pub fn identity(num_qubits: usize) -> Result<Self> {
        check_qubit_count(num_qubits)?;
        let dim = 1 << num_qubits;
        Ok(Self {
            matrix: DMatrix::identity(dim, dim),
            num_qubits,
            unitary: true,
            hermitian: true,
        })
    }

    /// Diagonal operator; flagged unitary when every entry has modulus one.
    pub fn diagonal(entries: &[Complex64]) -> Result<Self> {
        let matrix = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(entries));
        let mut op = Self::new(matrix)?;
        op.unitary = entries.iter().all(|e| (e.norm() - 1.0).abs() <= VALIDATION_TOL);
        op.hermitian = entries.iter().all(|e| e.im.abs() <= VALIDATION_TOL);
        Ok(op)
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.matrix
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn is_unitary(&self) -> bool {
        self.unitary
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn unitarity_deviation(&self) -> f64 {
        let prod = self.matrix.adjoint() * &self.matrix;
        let eye = DMatrix::<Complex64>::identity(self.dim(), self.dim());
        max_abs_diff(&prod, &eye)
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        max_abs_diff(&self.matrix, &self.matrix.adjoint())
    }

    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
            num_qubits: self.num_qubits,
            unitary: self.unitary,
            hermitian: self.hermitian,
        }
    }

    /// `self * rhs`; the product of unitaries stays flagged unitary.
    pub fn compose(&self, rhs: &Operator) -> Result<Self> {
        if self.dim() != rhs.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: rhs.dim(),
            });
        }
        Ok(Self {
            matrix: &self.matrix * &rhs.matrix,
            num_qubits: self.num_qubits,
            unitary: self.unitary && rhs.unitary,
            hermitian: false,
        })
    }

    /// `[U, U^2, U^4, ..., U^{2^(count-1)}]` by repeated squaring.
    pub fn power_ladder(&self, count: usize) -> Vec<Operator> {
        let mut out = Vec::with_capacity(count);
        let mut current = self.clone();
        for _ in 0..count {
            let next = Operator {
                matrix: &current.matrix * &current.matrix,
                num_qubits: self.num_qubits,
                unitary: self.unitary,
                hermitian: self.hermitian,
            };
            out.push(current);
            current = next;
        }
        out
    }

    /// Image of a state under this operator acting on all of its qubits.
    pub fn apply_to(&self, state: &Statevector) -> Result<Statevector> {
        let targets: Vec<usize> = (0..state.num_qubits()).collect();
        apply_operator(state, self, &targets)
    }
}

pub(crate) fn max_abs_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Single-qubit gates and register-level operators.
pub mod gates {
    use super::*;

    pub fn hadamard() -> Operator {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(s, 0.0),
                Complex64::new(s, 0.0),
                Complex64::new(s, 0.0),
                Complex64::new(-s, 0.0),
            ],
        );
        Operator {
            matrix: m,
            num_qubits: 1,
            unitary: true,
            hermitian: true,
        }
    }

    pub fn pauli_x() -> Operator {
        let m = DMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
        Operator {
            matrix: m,
            num_qubits: 1,
            unitary: true,
            hermitian: true,
        }
    }

    /// `diag(1, e^{i phi})`.
    pub fn phase(phi: f64) -> Operator {
        Operator::diagonal(&[ONE, Complex64::from_polar(1.0, phi)]).expect("2x2 diagonal is a valid operator")
    }

    /// Real rotation `[[cos a/2, -sin a/2], [sin a/2, cos a/2]]`.
    pub fn ry(angle: f64) -> Operator {
        let (s, c) = (angle / 2.0).sin_cos();
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(c, 0.0),
                Complex64::new(-s, 0.0),
                Complex64::new(s, 0.0),
                Complex64::new(c, 0.0),
            ],
        );
        Operator {
            matrix: m,
            num_qubits: 1,
            unitary: true,
            hermitian: false,
        }
    }

    /// Dense QFT matrix on `num_qubits` qubits with entries `exp(+2 pi i x y / N) / sqrt(N)`.
    pub fn qft_operator(num_qubits: usize) -> Result<Operator> {
        check_qubit_count(num_qubits)?;
        let n = 1usize << num_qubits;
        let scale = 1.0 / (n as f64).sqrt();
        let m = DMatrix::from_fn(n, n, |y, x| {
            let turns = ((x * y) % n) as f64 / n as f64;
            Complex64::from_polar(scale, 2.0 * std::f64::consts::PI * turns)
        });
        Ok(Operator {
            matrix: m,
            num_qubits,
            unitary: true,
            hermitian: false,
        })
    }
}

/// `|index>` on `num_qubits` qubits.
pub fn make_basis_state(num_qubits: usize, index: usize) -> Result<Statevector> {
    Statevector::basis(num_qubits, index)
}

pub fn apply_operator(state: &Statevector, op: &Operator, targets: &[usize]) -> Result<Statevector> {
    let mut out = state.clone();
    out.apply_mut(op, targets)?;
    Ok(out)
}

pub fn apply_controlled(
    state: &Statevector,
    op: &Operator,
    controls: &[usize],
    targets: &[usize],
) -> Result<Statevector> {
    let mut out = state.clone();
    out.apply_controlled_mut(op, controls, targets)?;
    Ok(out)
}

pub fn inner_product(a: &Statevector, b: &Statevector) -> Result<Complex64> {
    a.inner_product(b)
}

pub fn probabilities_on(state: &Statevector, qubits: &[usize]) -> Result<Vec<f64>> {
    state.probabilities_on(qubits)
}

pub fn postselect(state: &Statevector, qubit: usize, outcome: bool) -> Result<(Statevector, f64)> {
    state.postselect(qubit, outcome)
}

pub fn sample(state: &Statevector, qubits: &[usize], shots: usize, seed: u64) -> Result<Vec<u64>> {
    state.sample(qubits, shots, seed)
}
