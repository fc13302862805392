//! Amplitude-encoding state preparation.
//!
//! Three routes are provided:
//!
//! * [`amplitude_encode`]: a binary rotation tree (one uniformly controlled
//!   `R_y` layer per qubit followed by a diagonal phase layer). This is also
//!   how the index-register transform `S` of the LCU procedure and every
//!   controlled component preparation are realized.
//! * [`prepare_flat`]: LCU over the nonzero entries with `|x_j> = |j>`. The
//!   expected number of repetitions grows with the spread of magnitudes.
//! * [`prepare_binned`]: splits the entries into magnitude bins whose
//!   internal spread is at most 2, prepares each bin flat and combines the
//!   bins with a second LCU. The combination costs `sum_j ||y_j|| / ||x||`,
//!   which Cauchy-Schwarz bounds by `sqrt(q)`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statevector::{gates, qubits_for, Operator, Statevector};

/// Slack applied to the `<= sqrt(q)` and `<= sqrt(nnz)` cost checks.
const COST_BOUND_TOL: f64 = 1e-12;

/// A classical vector to be amplitude-encoded. At least one entry is nonzero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetVector {
    entries: Vec<Complex64>,
}

impl TargetVector {
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidInput("target vector is empty".into()));
        }
        if entries.iter().any(|e| !e.re.is_finite() || !e.im.is_finite()) {
            return Err(Error::InvalidInput("target vector has non-finite entries".into()));
        }
        if entries.iter().all(|e| e.norm() == 0.0) {
            return Err(Error::InvalidInput("target vector is all zeros".into()));
        }
        Ok(Self { entries })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Indices of the nonzero entries.
    pub fn support(&self) -> Vec<usize> {
        (0..self.entries.len())
            .filter(|&k| self.entries[k].norm() != 0.0)
            .collect()
    }

    pub fn min_nonzero_magnitude(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.norm())
            .filter(|&m| m != 0.0)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_magnitude(&self) -> f64 {
        self.entries.iter().map(|e| e.norm()).fold(0.0, f64::max)
    }

    /// `max_k |x_k| / min_{x_k != 0} |x_k|`.
    pub fn kappa(&self) -> f64 {
        self.max_magnitude() / self.min_nonzero_magnitude()
    }

    /// `x / ||x||`, zero-padded to a power of two.
    pub fn normalized_state(&self) -> Statevector {
        Statevector::from_unnormalized(&self.entries).expect("target vector is nonzero")
    }
}

/// Rotation-tree description of a state-preparation circuit.
///
/// Level `l` holds `2^l` `R_y` angles, one per value of the `l` most
/// significant index bits; it rotates index bit `q - 1 - l`. The final layer
/// applies `e^{i phase_k}` to basis state `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrepPlan {
    num_qubits: usize,
    levels: Vec<Vec<f64>>,
    phases: Vec<f64>,
}

impl PrepPlan {
    /// Builds the tree for `values / ||values||` (zero-padded to `2^q`).
    pub fn for_amplitudes(values: &[Complex64]) -> Result<Self> {
        let target = TargetVector::new(values.to_vec())?;
        let num_qubits = qubits_for(values.len());
        let dim = 1usize << num_qubits;
        let mut weights = vec![0.0; dim];
        let mut phases = vec![0.0; dim];
        for (k, v) in target.entries.iter().enumerate() {
            weights[k] = v.norm_sqr();
            phases[k] = v.arg();
        }
        // Subtree weights, leaves first; tree[l] has 2^l nodes.
        let mut tree = vec![weights];
        while tree[0].len() > 1 {
            let parent: Vec<f64> = tree[0].chunks(2).map(|c| c[0] + c[1]).collect();
            tree.insert(0, parent);
        }
        let levels = (0..num_qubits)
            .map(|l| {
                let children = &tree[l + 1];
                (0..1usize << l)
                    .map(|p| 2.0 * children[2 * p + 1].sqrt().atan2(children[2 * p].sqrt()))
                    .collect()
            })
            .collect();
        Ok(Self {
            num_qubits,
            levels,
            phases,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    /// Number of rotation layers, `ceil(log2 m)`.
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn levels(&self) -> &[Vec<f64>] {
        &self.levels
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    fn check_targets(&self, targets: &[usize]) -> Result<()> {
        if targets.len() != self.num_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits,
                found: targets.len(),
            });
        }
        Ok(())
    }

    fn phase_layer(&self, inverse: bool) -> Vec<Option<Operator>> {
        let sign = if inverse { -1.0 } else { 1.0 };
        let diag = |ks: &[f64]| {
            let entries: Vec<Complex64> = ks.iter().map(|&p| Complex64::from_polar(1.0, sign * p)).collect();
            Some(Operator::diagonal(&entries).expect("phase layer is diagonal"))
        };
        if self.num_qubits == 0 {
            vec![diag(&self.phases)]
        } else {
            self.phases.chunks(2).map(diag).collect()
        }
    }

    fn rotation_layer(&self, level: usize, inverse: bool) -> Vec<Option<Operator>> {
        let sign = if inverse { -1.0 } else { 1.0 };
        self.levels[level]
            .iter()
            .map(|&a| (a != 0.0).then(|| gates::ry(sign * a)))
            .collect()
    }

    /// Applies the preparation unitary to `targets` (`targets[k]` is index bit `k`).
    pub fn apply_mut(&self, state: &mut Statevector, targets: &[usize]) -> Result<()> {
        self.check_targets(targets)?;
        let q = self.num_qubits;
        for l in 0..q {
            let target = targets[q - 1 - l];
            let selectors = &targets[q - l..];
            state.apply_multiplexed_mut(selectors, &[target], &self.rotation_layer(l, false))?;
        }
        self.apply_phases(state, targets, false)
    }

    /// Applies the inverse of [`PrepPlan::apply_mut`].
    pub fn apply_inverse_mut(&self, state: &mut Statevector, targets: &[usize]) -> Result<()> {
        self.check_targets(targets)?;
        self.apply_phases(state, targets, true)?;
        let q = self.num_qubits;
        for l in (0..q).rev() {
            let target = targets[q - 1 - l];
            let selectors = &targets[q - l..];
            state.apply_multiplexed_mut(selectors, &[target], &self.rotation_layer(l, true))?;
        }
        Ok(())
    }

    fn apply_phases(&self, state: &mut Statevector, targets: &[usize], inverse: bool) -> Result<()> {
        let layer = self.phase_layer(inverse);
        if self.num_qubits == 0 {
            let op = layer[0].as_ref().expect("scalar phase");
            state.apply_mut(op, &[])
        } else {
            state.apply_multiplexed_mut(&targets[1..], &targets[..1], &layer)
        }
    }

    /// The state this plan prepares from `|0...0>`.
    pub fn prepared_state(&self) -> Result<Statevector> {
        let mut s = Statevector::zero(self.num_qubits)?;
        let targets: Vec<usize> = (0..self.num_qubits).collect();
        self.apply_mut(&mut s, &targets)?;
        Ok(s)
    }

    /// Dense unitary of the circuit, column `k` being the image of `|k>`.
    pub fn to_operator(&self) -> Result<Operator> {
        let dim = 1usize << self.num_qubits;
        let targets: Vec<usize> = (0..self.num_qubits).collect();
        let mut m = nalgebra::DMatrix::<Complex64>::zeros(dim, dim);
        for k in 0..dim {
            let mut s = Statevector::basis(self.num_qubits, k)?;
            self.apply_mut(&mut s, &targets)?;
            for (r, a) in s.amplitudes().iter().enumerate() {
                m[(r, k)] = *a;
            }
        }
        Operator::new(m)
    }
}

/// Rotation-tree encoding of `x / ||x||`.
pub fn amplitude_encode(x: &TargetVector) -> Result<(PrepPlan, Statevector)> {
    let plan = PrepPlan::for_amplitudes(x.entries())?;
    let state = plan.prepared_state()?;
    Ok((plan, state))
}

/// Coefficients `alpha_j` and component states `|x_j>` of a linear combination.
#[derive(Debug, Clone, PartialEq)]
pub struct LcuSpec {
    pub coefficients: Vec<Complex64>,
    pub components: Vec<Statevector>,
}

impl LcuSpec {
    pub fn new(coefficients: Vec<Complex64>, components: Vec<Statevector>) -> Result<Self> {
        if coefficients.is_empty() || coefficients.len() != components.len() {
            return Err(Error::InvalidInput(format!(
                "need matching nonempty coefficient and component lists, got {} and {}",
                coefficients.len(),
                components.len()
            )));
        }
        if coefficients.iter().any(|a| a.norm() == 0.0 || !a.norm().is_finite()) {
            return Err(Error::InvalidInput(
                "LCU coefficients must be finite and nonzero".into(),
            ));
        }
        let nq = components[0].num_qubits();
        if let Some(bad) = components.iter().find(|c| c.num_qubits() != nq) {
            return Err(Error::DimensionMismatch {
                expected: nq,
                found: bad.num_qubits(),
            });
        }
        Ok(Self {
            coefficients,
            components,
        })
    }

    /// `s = sum_j |alpha_j|`.
    pub fn one_norm(&self) -> f64 {
        self.coefficients.iter().map(|a| a.norm()).sum()
    }

    /// The unnormalized target `y = sum_j alpha_j |x_j>`, computed classically.
    pub fn combination(&self) -> Vec<Complex64> {
        let dim = self.components[0].dim();
        let mut y = vec![Complex64::new(0.0, 0.0); dim];
        for (a, c) in self.coefficients.iter().zip(&self.components) {
            for (yi, ci) in y.iter_mut().zip(c.amplitudes()) {
                *yi += a * ci;
            }
        }
        y
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LcuOutcome {
    pub state: Statevector,
    pub success_probability: f64,
}

/// Simulates `S ⊗ I`, the controlled component preparations, `S^dagger ⊗ I`
/// and postselection of `|0>` on the index register.
///
/// The index register sits above the system register. Phases `e^{i theta_j}`
/// ride on the controlled preparations; `S` only carries `sqrt(r_j / s)`.
pub fn lcu_combine(spec: &LcuSpec) -> Result<LcuOutcome> {
    let terms = spec.coefficients.len();
    let sys_qubits = spec.components[0].num_qubits();
    let idx_qubits = qubits_for(terms);
    let system: Vec<usize> = (0..sys_qubits).collect();
    let index: Vec<usize> = (sys_qubits..sys_qubits + idx_qubits).collect();

    let roots: Vec<Complex64> = spec
        .coefficients
        .iter()
        .map(|a| Complex64::new(a.norm().sqrt(), 0.0))
        .collect();
    let s_plan = PrepPlan::for_amplitudes(&roots)?;

    let mut ops: Vec<Option<Operator>> = vec![None; 1 << idx_qubits];
    for (j, (a, c)) in spec.coefficients.iter().zip(&spec.components).enumerate() {
        let phase = a / a.norm();
        let phased: Vec<Complex64> = c.amplitudes().iter().map(|v| v * phase).collect();
        ops[j] = Some(PrepPlan::for_amplitudes(&phased)?.to_operator()?);
    }

    let mut state = Statevector::zero(sys_qubits + idx_qubits)?;
    s_plan.apply_mut(&mut state, &index)?;
    state.apply_multiplexed_mut(&index, &system, &ops)?;
    s_plan.apply_inverse_mut(&mut state, &index)?;
    let (state, success_probability) = state.postselect_register(&index, 0)?;
    Ok(LcuOutcome {
        state,
        success_probability,
    })
}

/// Cost record of a flat (single-LCU) preparation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlatCost {
    pub kappa: f64,
    pub nonzero: usize,
    /// `s = sum_j |x_j|`.
    pub one_norm: f64,
    /// `||y|| = ||x||`.
    pub two_norm: f64,
    pub success_probability: f64,
    /// `s / ||y||`, the amplitude-amplification repetition factor.
    pub amplitude_ratio: f64,
    /// `s^2 / ||y||^2 = 1 / success_probability`.
    pub expected_repetitions: f64,
    /// `s / (||y|| sqrt(nnz))`, which is 1 for uniform magnitudes.
    pub relative_factor: f64,
    /// `s / ||y|| <= sqrt(nnz) <= kappa sqrt(nnz)`.
    pub bound_ok: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlatPrep {
    pub state: Statevector,
    pub cost: FlatCost,
}

/// LCU with `|x_j> = |j>` over the nonzero entries of `x`.
pub fn prepare_flat(x: &TargetVector) -> Result<FlatPrep> {
    let support = x.support();
    let sys_qubits = qubits_for(x.len());
    let components = support
        .iter()
        .map(|&k| Statevector::basis(sys_qubits, k))
        .collect::<Result<Vec<_>>>()?;
    let coefficients = support.iter().map(|&k| x.entries()[k]).collect();
    let spec = LcuSpec::new(coefficients, components)?;
    let outcome = lcu_combine(&spec)?;

    let one_norm = spec.one_norm();
    let two_norm = x.norm();
    let nonzero = support.len();
    let amplitude_ratio = one_norm / two_norm;
    let root_nnz = (nonzero as f64).sqrt();
    Ok(FlatPrep {
        state: outcome.state,
        cost: FlatCost {
            kappa: x.kappa(),
            nonzero,
            one_norm,
            two_norm,
            success_probability: outcome.success_probability,
            amplitude_ratio,
            expected_repetitions: amplitude_ratio * amplitude_ratio,
            relative_factor: amplitude_ratio / root_nnz,
            bound_ok: amplitude_ratio <= root_nnz * (1.0 + COST_BOUND_TOL),
        },
    })
}

/// Split of `x` into magnitude bins `x = y_1 + ... + y_q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinDecomposition {
    /// Smallest nonzero magnitude `|x_0'|`.
    pub base_magnitude: f64,
    pub kappa: f64,
    /// Bin `j` (0-based) holds the entries with `|x_k| / |x_0'|` in
    /// `[2^j, 2^{j+1})`; the last bin is closed on the right.
    pub bins: Vec<Vec<Complex64>>,
    /// `lambda_j = ||y_j|| / ||x||`.
    pub weights: Vec<f64>,
}

impl BinDecomposition {
    pub fn bin_count(&self) -> usize {
        self.bins.len()
    }

    /// `sum_j ||y_j|| / ||x||`.
    pub fn weight_sum(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// `max(1, ceil(log2 kappa))`.
pub fn bin_count_for(kappa: f64) -> usize {
    let mut q = kappa.log2().ceil().max(1.0) as usize;
    // Guard the float log against landing one off at exact powers of two.
    while q > 1 && 2f64.powi(q as i32 - 1) >= kappa {
        q -= 1;
    }
    while 2f64.powi(q as i32) < kappa {
        q += 1;
    }
    q
}

fn bin_index(ratio: f64, q: usize) -> usize {
    let mut j = ratio.log2().floor().max(0.0) as usize;
    while j > 0 && 2f64.powi(j as i32) > ratio {
        j -= 1;
    }
    while 2f64.powi(j as i32 + 1) <= ratio {
        j += 1;
    }
    j.min(q - 1)
}

pub fn bin_decompose(x: &TargetVector) -> BinDecomposition {
    let base = x.min_nonzero_magnitude();
    let kappa = x.kappa();
    let q = bin_count_for(kappa);
    let zero = Complex64::new(0.0, 0.0);
    let mut bins = vec![vec![zero; x.len()]; q];
    for (k, v) in x.entries().iter().enumerate() {
        let mag = v.norm();
        if mag == 0.0 {
            continue;
        }
        bins[bin_index(mag / base, q)][k] = *v;
    }
    let norm = x.norm();
    let weights = bins
        .iter()
        .map(|b| b.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt() / norm)
        .collect();
    BinDecomposition {
        base_magnitude: base,
        kappa,
        bins,
        weights,
    }
}

/// Cost record of the binned preparation. The per-bin flat costs and the
/// bin-combination cost are reported separately.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinnedCost {
    pub kappa: f64,
    pub bin_count: usize,
    pub nonempty_bins: usize,
    /// `sum_j ||y_j|| / ||x||`.
    pub weight_sum: f64,
    pub sqrt_bin_count: f64,
    /// `weight_sum <= sqrt(q)`.
    pub cauchy_schwarz_ok: bool,
    /// Postselection probability of the bin-combining LCU.
    pub combine_success_probability: f64,
    pub bins: Vec<FlatCost>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BinnedPrep {
    pub state: Statevector,
    pub cost: BinnedCost,
}

pub fn prepare_binned(x: &TargetVector) -> Result<BinnedPrep> {
    let decomposition = bin_decompose(x);
    let nonempty: Vec<usize> = (0..decomposition.bin_count())
        .filter(|&j| decomposition.weights[j] > 0.0)
        .collect();
    let flats = nonempty
        .par_iter()
        .map(|&j| TargetVector::new(decomposition.bins[j].clone()).and_then(|y| prepare_flat(&y)))
        .collect::<Result<Vec<_>>>()?;

    let coefficients = nonempty
        .iter()
        .map(|&j| Complex64::new(decomposition.weights[j], 0.0))
        .collect();
    let components = flats.iter().map(|f| f.state.clone()).collect();
    let outcome = lcu_combine(&LcuSpec::new(coefficients, components)?)?;

    let q = decomposition.bin_count();
    let weight_sum = decomposition.weight_sum();
    let sqrt_q = (q as f64).sqrt();
    Ok(BinnedPrep {
        state: outcome.state,
        cost: BinnedCost {
            kappa: decomposition.kappa,
            bin_count: q,
            nonempty_bins: nonempty.len(),
            weight_sum,
            sqrt_bin_count: sqrt_q,
            cauchy_schwarz_ok: weight_sum <= sqrt_q + COST_BOUND_TOL,
            combine_success_probability: outcome.success_probability,
            bins: flats.into_iter().map(|f| f.cost).collect(),
        },
    })
}
