//! Classical cubic splines: divided differences, the moment system for the
//! three boundary types, direct solvers and evaluation with derivatives.
//!
//! The unknowns are the knot moments `M_i = S''(x_i)`. Clamped and natural
//! boundaries give an `(n+1)`-square tridiagonal system; the periodic boundary
//! gives an `n`-square cyclic one in `M_1..M_n` with `M_0 = M_n`.

pub mod conditioning;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Pivots below this magnitude abort the tridiagonal solve.
pub const PIVOT_TOL: f64 = 1e-13;

const PERIODIC_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplineDataset {
    x: Vec<f64>,
    y: Vec<f64>,
}

impl SplineDataset {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                found: y.len(),
            });
        }
        if x.len() < 2 {
            return Err(Error::InvalidInput("a spline needs at least two knots".into()));
        }
        if x.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("knots and values must be finite".into()));
        }
        if let Some(i) = x.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput(format!(
                "knots must be strictly increasing (x[{}] = {} >= x[{}] = {})",
                i,
                x[i],
                i + 1,
                x[i + 1]
            )));
        }
        Ok(Self { x, y })
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    /// Number of intervals `n`.
    pub fn intervals(&self) -> usize {
        self.x.len() - 1
    }

    pub fn spacings(&self) -> Vec<f64> {
        self.x.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.x[0], self.x[self.x.len() - 1])
    }

    /// Index `i` with `x` in `[x_i, x_{i+1}]`; interior knots belong to the left interval.
    pub fn locate(&self, x: f64) -> Result<usize> {
        let (lo, hi) = self.domain();
        if !(lo..=hi).contains(&x) {
            return Err(Error::OutOfDomain { x, lo, hi });
        }
        let j = self.x.partition_point(|&k| k < x);
        Ok(j.saturating_sub(1).min(self.intervals() - 1))
    }

    /// Seeded dataset with log-uniform spacings in `[h_min, h_max]` and values
    /// in `[-1, 1]`; periodic datasets repeat `y_0` at the last knot.
    pub fn seeded(seed: u64, intervals: usize, h_min: f64, h_max: f64, periodic: bool) -> Result<Self> {
        if intervals == 0 || !(h_min > 0.0 && h_max >= h_min) {
            return Err(Error::InvalidInput(
                "need at least one interval and 0 < h_min <= h_max".into(),
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b) = (h_min.ln(), h_max.ln());
        let mut x = vec![rng.random_range(-1.0..1.0)];
        for _ in 0..intervals {
            let h = if a == b { h_min } else { rng.random_range(a..b).exp() };
            x.push(x[x.len() - 1] + h);
        }
        let mut y: Vec<f64> = (0..=intervals).map(|_| rng.random_range(-1.0..1.0)).collect();
        if periodic {
            y[intervals] = y[0];
        }
        Self::new(x, y)
    }
}

/// Clamped (first-derivative), natural-type (second-derivative) or periodic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BoundaryCondition {
    FirstDerivative { start: f64, end: f64 },
    SecondDerivative { start: f64, end: f64 },
    Periodic,
}

impl BoundaryCondition {
    pub fn clamped(start: f64, end: f64) -> Self {
        Self::FirstDerivative { start, end }
    }

    pub fn natural() -> Self {
        Self::SecondDerivative { start: 0.0, end: 0.0 }
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self, Self::Periodic)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::FirstDerivative { .. } => "type1",
            Self::SecondDerivative { .. } => "type2",
            Self::Periodic => "periodic",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DividedDifferences {
    /// `S[x_i, x_{i+1}]`, length `n`.
    pub first: Vec<f64>,
    /// `S[x_i, x_{i+1}, x_{i+2}]`, length `n - 1`.
    pub second: Vec<f64>,
}

pub fn divided_differences(data: &SplineDataset) -> DividedDifferences {
    let (x, y) = (&data.x, &data.y);
    let first: Vec<f64> = (0..data.intervals())
        .map(|i| (y[i + 1] - y[i]) / (x[i + 1] - x[i]))
        .collect();
    let second = (0..first.len().saturating_sub(1))
        .map(|i| (first[i + 1] - first[i]) / (x[i + 2] - x[i]))
        .collect();
    DividedDifferences { first, second }
}

/// Row `r` reads `lower[r] u_{r-1} + diag[r] u_r + upper[r] u_{r+1} = rhs[r]`
/// with indices taken cyclically. Outside the periodic case `lower[0]` and
/// `upper[size-1]` are zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TridiagonalSystem {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
    pub rhs: Vec<f64>,
    pub boundary: BoundaryCondition,
}

impl TridiagonalSystem {
    pub fn size(&self) -> usize {
        self.diag.len()
    }

    pub fn is_periodic(&self) -> bool {
        self.boundary.is_periodic()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.size();
        let mut a = DMatrix::zeros(n, n);
        for r in 0..n {
            a[(r, r)] += self.diag[r];
            if n > 1 {
                a[(r, (r + n - 1) % n)] += self.lower[r];
                a[(r, (r + 1) % n)] += self.upper[r];
            }
        }
        a
    }

    /// `max_r |(A u - d)_r|`.
    pub fn residual(&self, u: &[f64]) -> f64 {
        let a = self.to_dense();
        let r = a * DVector::from_column_slice(u) - DVector::from_column_slice(&self.rhs);
        r.amax()
    }

    /// Position of knot moment `M_knot` among the unknowns.
    pub fn unknown_index(&self, knot: usize) -> usize {
        if self.is_periodic() {
            (knot + self.size() - 1) % self.size()
        } else {
            knot
        }
    }
}

pub fn build_system(data: &SplineDataset, boundary: &BoundaryCondition) -> Result<TridiagonalSystem> {
    let n = data.intervals();
    let h = data.spacings();
    let dd = divided_differences(data);
    let interior = |i: usize| {
        let mu = h[i - 1] / (h[i - 1] + h[i]);
        (mu, 1.0 - mu, 6.0 * dd.second[i - 1])
    };

    let size = if boundary.is_periodic() { n } else { n + 1 };
    let mut sys = TridiagonalSystem {
        lower: vec![0.0; size],
        diag: vec![2.0; size],
        upper: vec![0.0; size],
        rhs: vec![0.0; size],
        boundary: *boundary,
    };

    match *boundary {
        BoundaryCondition::FirstDerivative { start, end } => {
            sys.upper[0] = 1.0;
            sys.rhs[0] = 6.0 * (dd.first[0] - start) / h[0];
            sys.lower[n] = 1.0;
            sys.rhs[n] = 6.0 * (end - dd.first[n - 1]) / h[n - 1];
        }
        BoundaryCondition::SecondDerivative { start, end } => {
            sys.rhs[0] = 2.0 * start;
            sys.rhs[n] = 2.0 * end;
        }
        BoundaryCondition::Periodic => {
            if n < 2 {
                return Err(Error::InvalidInput(
                    "periodic splines need at least two intervals".into(),
                ));
            }
            let (first, last) = (data.y[0], data.y[n]);
            if (first - last).abs() > PERIODIC_TOL * first.abs().max(last.abs()).max(1.0) {
                return Err(Error::NotPeriodic { first, last });
            }
        }
    }

    if boundary.is_periodic() {
        // Row r holds the equation for M_{r+1}.
        for i in 1..n {
            let (mu, lambda, d) = interior(i);
            sys.lower[i - 1] = mu;
            sys.upper[i - 1] = lambda;
            sys.rhs[i - 1] = d;
        }
        let lambda = h[0] / (h[n - 1] + h[0]);
        sys.lower[n - 1] = 1.0 - lambda;
        sys.upper[n - 1] = lambda;
        sys.rhs[n - 1] = 6.0 * (dd.first[0] - dd.first[n - 1]) / (h[0] + h[n - 1]);
    } else {
        for i in 1..n {
            let (mu, lambda, d) = interior(i);
            sys.lower[i] = mu;
            sys.upper[i] = lambda;
            sys.rhs[i] = d;
        }
    }
    Ok(sys)
}

/// Knot moments `M_0..M_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplineSolution {
    pub moments: Vec<f64>,
}

impl SplineSolution {
    /// Expands a solution of the moment system to all knots.
    pub fn from_unknowns(system: &TridiagonalSystem, unknowns: &[f64]) -> Self {
        let mut moments = unknowns.to_vec();
        if system.is_periodic() {
            moments.insert(0, unknowns[unknowns.len() - 1]);
        }
        Self { moments }
    }

    /// Inverse of [`SplineSolution::from_unknowns`].
    pub fn unknowns(&self, system: &TridiagonalSystem) -> Vec<f64> {
        if system.is_periodic() {
            self.moments[1..].to_vec()
        } else {
            self.moments.clone()
        }
    }
}

/// Plain Thomas sweep on `lower`/`diag`/`upper` ignoring any corners.
fn thomas(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut pivot = diag[0];
    for i in 0..n {
        if i > 0 {
            pivot = diag[i] - lower[i] * c[i - 1];
        }
        if pivot.abs() < PIVOT_TOL {
            return Err(Error::SingularPivot { row: i, pivot });
        }
        c[i] = if i + 1 < n { upper[i] / pivot } else { 0.0 };
        d[i] = (rhs[i] - if i > 0 { lower[i] * d[i - 1] } else { 0.0 }) / pivot;
    }
    for i in (0..n.saturating_sub(1)).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Ok(d)
}

/// Solves the moment system: Thomas for the plain tridiagonal case, a
/// Sherman-Morrison corner correction for the cyclic case.
pub fn thomas_solve(system: &TridiagonalSystem) -> Result<SplineSolution> {
    let n = system.size();
    let unknowns = if !system.is_periodic() {
        thomas(&system.lower, &system.diag, &system.upper, &system.rhs)?
    } else if n == 2 {
        let a = system.to_dense();
        let det = a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)];
        if det.abs() < PIVOT_TOL {
            return Err(Error::SingularPivot { row: 1, pivot: det });
        }
        let (r0, r1) = (system.rhs[0], system.rhs[1]);
        vec![
            (r0 * a[(1, 1)] - a[(0, 1)] * r1) / det,
            (a[(0, 0)] * r1 - a[(1, 0)] * r0) / det,
        ]
    } else {
        // A = T + u v^T with u = (gamma, 0, .., alpha), v = (1, 0, .., beta / gamma).
        let beta = system.lower[0];
        let alpha = system.upper[n - 1];
        let gamma = -system.diag[0];
        let mut diag = system.diag.clone();
        diag[0] -= gamma;
        diag[n - 1] -= alpha * beta / gamma;
        let x = thomas(&system.lower, &diag, &system.upper, &system.rhs)?;
        let mut u = vec![0.0; n];
        u[0] = gamma;
        u[n - 1] = alpha;
        let z = thomas(&system.lower, &diag, &system.upper, &u)?;
        let num = x[0] + beta * x[n - 1] / gamma;
        let den = 1.0 + z[0] + beta * z[n - 1] / gamma;
        if den.abs() < PIVOT_TOL {
            return Err(Error::SingularPivot { row: n - 1, pivot: den });
        }
        let f = num / den;
        x.iter().zip(&z).map(|(xi, zi)| xi - f * zi).collect()
    };
    Ok(SplineSolution::from_unknowns(system, &unknowns))
}

/// Builds and solves in one step.
pub fn fit(data: &SplineDataset, boundary: &BoundaryCondition) -> Result<SplineSolution> {
    thomas_solve(&build_system(data, boundary)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplineValue {
    pub value: f64,
    pub first: f64,
    pub second: f64,
}

/// `S`, `S'` and `S''` at `x` from the piece covering it.
pub fn evaluate(data: &SplineDataset, solution: &SplineSolution, x: f64) -> Result<SplineValue> {
    let i = data.locate(x)?;
    Ok(evaluate_piece(data, solution, i, x))
}

/// Evaluates piece `i` at `x` without locating; used for one-sided knot checks.
pub fn evaluate_piece(data: &SplineDataset, solution: &SplineSolution, i: usize, x: f64) -> SplineValue {
    let (xl, xr) = (data.x[i], data.x[i + 1]);
    let (yl, yr) = (data.y[i], data.y[i + 1]);
    let (ml, mr) = (solution.moments[i], solution.moments[i + 1]);
    let h = xr - xl;
    let (a, b) = (xr - x, x - xl);
    SplineValue {
        value: ml * a.powi(3) / (6.0 * h)
            + mr * b.powi(3) / (6.0 * h)
            + (yl - ml * h * h / 6.0) * a / h
            + (yr - mr * h * h / 6.0) * b / h,
        first: -ml * a * a / (2.0 * h) + mr * b * b / (2.0 * h) + (yr - yl) / h - (mr - ml) * h / 6.0,
        second: (ml * a + mr * b) / h,
    }
}

/// `S^{(k)}(x) = M_i X_i + M_{i+1} X_{i+1} + Y_i` on interval `i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalFeatures {
    pub interval: usize,
    pub left: f64,
    pub right: f64,
    pub offset: f64,
}

impl EvalFeatures {
    pub fn norm(&self) -> f64 {
        self.left.hypot(self.right)
    }

    pub fn apply(&self, solution: &SplineSolution) -> f64 {
        solution.moments[self.interval] * self.left + solution.moments[self.interval + 1] * self.right + self.offset
    }
}

/// Features of `S`.
pub fn eval_features(data: &SplineDataset, x: f64) -> Result<EvalFeatures> {
    derivative_features(data, x, 0)
}

/// Features of `S`, `S'` or `S''` for `order` 0, 1 or 2.
pub fn derivative_features(data: &SplineDataset, x: f64, order: usize) -> Result<EvalFeatures> {
    let i = data.locate(x)?;
    let (xl, xr) = (data.x[i], data.x[i + 1]);
    let (yl, yr) = (data.y[i], data.y[i + 1]);
    let h = xr - xl;
    let (a, b) = (xr - x, x - xl);
    let (left, right, offset) = match order {
        0 => (
            a.powi(3) / (6.0 * h) - h * a / 6.0,
            b.powi(3) / (6.0 * h) - h * b / 6.0,
            (yl * a + yr * b) / h,
        ),
        1 => (-a * a / (2.0 * h) + h / 6.0, b * b / (2.0 * h) - h / 6.0, (yr - yl) / h),
        2 => (a / h, b / h, 0.0),
        _ => {
            return Err(Error::InvalidInput(format!(
                "derivative order must be 0, 1 or 2, got {order}"
            )))
        }
    };
    Ok(EvalFeatures {
        interval: i,
        left,
        right,
        offset,
    })
}
