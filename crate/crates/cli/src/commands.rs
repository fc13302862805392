use std::fs;

use anyhow::{bail, ensure, Context, Result};
use nalgebra::DMatrix;
use qspline_core::estimation::DEFAULT_FAILURE_BUDGET;
use qspline_core::hhl::{self, HhlConfig, LinearSystem, PostselectionMode};
use qspline_core::pipeline::{self, InnerProductEstimator, PipelineConfig, QuantumFit};
use qspline_core::qpe::{self, PhaseEstimationConfig};
use qspline_core::spline::conditioning::{self, SweepConfig};
use qspline_core::spline::{self, BoundaryCondition};
use qspline_core::stateprep::{self, TargetVector};
use qspline_core::{Complex64, Statevector};
use serde_json::{json, Value};

use crate::{
    input, json, BoundaryArgs, BoundaryKind, ConditioningArgs, EvalArgs, FitArgs, HhlSolveArgs, PrepArgs, PrepMethod,
    QpeDemoArgs, Report, RunMode, TableFormat,
};

/// Exact-simulation tolerance on prepared-state fidelity.
const FIDELITY_TOL: f64 = 1e-10;

/// Collects failed checks next to the values they were computed from.
#[derive(Default)]
struct Checks(Vec<String>);

impl Checks {
    fn require(&mut self, ok: bool, what: impl FnOnce() -> String) -> bool {
        if !ok {
            self.0.push(what());
        }
        ok
    }

    fn report(self, body: &Value) -> Result<Report> {
        Ok(Report {
            body: json::to_string(body)?,
            failures: self.0,
        })
    }
}

pub fn boundary_condition(
    kind: BoundaryKind,
    f0p: Option<f64>,
    fnp: Option<f64>,
    f0pp: Option<f64>,
    fnpp: Option<f64>,
) -> Result<BoundaryCondition> {
    let first = f0p.is_some() || fnp.is_some();
    let second = f0pp.is_some() || fnpp.is_some();
    Ok(match kind {
        BoundaryKind::Clamped | BoundaryKind::Type1 => {
            ensure!(!second, "--f0pp/--fnpp do not apply to first-derivative boundaries");
            BoundaryCondition::clamped(f0p.unwrap_or(0.0), fnp.unwrap_or(0.0))
        }
        BoundaryKind::Natural => {
            ensure!(
                !first && !second,
                "natural boundaries take no derivative values; use type2"
            );
            BoundaryCondition::natural()
        }
        BoundaryKind::Type2 => {
            ensure!(!first, "--f0p/--fnp do not apply to second-derivative boundaries");
            BoundaryCondition::SecondDerivative {
                start: f0pp.unwrap_or(0.0),
                end: fnpp.unwrap_or(0.0),
            }
        }
        BoundaryKind::Periodic => {
            ensure!(!first && !second, "periodic boundaries take no derivative values");
            BoundaryCondition::Periodic
        }
    })
}

fn boundary_from(args: &BoundaryArgs) -> Result<BoundaryCondition> {
    boundary_condition(args.boundary, args.f0p, args.fnp, args.f0pp, args.fnpp)
}

pub fn fit(args: &FitArgs) -> Result<Report> {
    let data = input::read_dataset(&args.input)?;
    let boundary = boundary_from(&args.boundary)?;
    ensure!(args.epsilon > 0.0, "--epsilon must be positive");
    let (estimator, postselection) = match args.mode {
        RunMode::Exact => (InnerProductEstimator::SwapTest, PostselectionMode::Exact),
        RunMode::Shots => {
            ensure!(args.shots > 0, "--shots must be positive");
            let (shots, seed) = (args.shots, args.seed);
            (
                InnerProductEstimator::SwapTestShots { shots, seed },
                PostselectionMode::Sampled { shots, seed },
            )
        }
    };
    let config = PipelineConfig {
        phase_bits: args.phase_bits,
        epsilon: args.epsilon,
        failure_budget: DEFAULT_FAILURE_BUDGET,
        estimator,
        postselection,
    };
    let fit = pipeline::quantum_fit(&data, &boundary, &config)?;
    if let Some(path) = &args.out {
        fs::write(path, json::to_string(&fit)? + "\n").with_context(|| format!("writing {}", path.display()))?;
    }

    let d = &fit.diagnostics;
    let mut checks = Checks::default();
    checks.require(d.prep_fidelity >= 1.0 - FIDELITY_TOL, || {
        format!(
            "right-hand-side preparation fidelity {} below 1 - {FIDELITY_TOL:e}",
            d.prep_fidelity
        )
    });
    checks.require(d.padding_weight <= pipeline::PADDING_TOL, || {
        format!(
            "padding weight {} exceeds {:e}",
            d.padding_weight,
            pipeline::PADDING_TOL
        )
    });
    let body = json!({
        "out": args.out.as_ref().map(|p| p.display().to_string()),
        "boundary": boundary.name(),
        "unknowns": fit.unknowns,
        "phase_bits": config.phase_bits,
        "scale": fit.scale,
        "rhs_kappa": d.rhs_kappa,
        "q": d.prep.as_ref().map(|c| c.bin_count),
        "prep_fidelity": d.prep_fidelity,
        "success_prob": d.success_probability,
        "residual_weight": d.residual_weight,
        "padding_weight": d.padding_weight,
        "classical_fidelity": d.classical_fidelity,
        "scale_relative_error": d.scale_relative_error,
    });
    checks.report(&body)
}

pub fn eval(args: &EvalArgs) -> Result<Report> {
    let text = fs::read_to_string(&args.fit).with_context(|| format!("reading {}", args.fit.display()))?;
    let fit: QuantumFit = serde_json::from_str(&text).with_context(|| format!("parsing {}", args.fit.display()))?;
    let epsilon = args.epsilon.unwrap_or(fit.config.epsilon);
    ensure!(epsilon > 0.0, "--epsilon must be positive");
    let e = pipeline::quantum_evaluate(&fit, args.at, epsilon)?;
    let body = json!({
        "x": e.x,
        "interval": e.interval,
        "S": e.value,
        "S1": e.first,
        "S2": e.second,
        "epsilon": epsilon,
        "error_budget": { "S": e.error_budget.value, "S1": e.error_budget.first, "S2": e.error_budget.second },
    });
    Checks::default().report(&body)
}

pub fn qpe_demo(args: &QpeDemoArgs) -> Result<Report> {
    ensure!((0.0..1.0).contains(&args.theta), "--theta must lie in [0, 1)");
    let config = PhaseEstimationConfig::with_bits(args.bits)?;
    let outcome = qpe::run_qpe(&qpe::phase_unitary(args.theta), &Statevector::basis(1, 1)?, &config)?;
    let total: f64 = outcome.distribution.iter().sum();
    let (lo, hi) = qpe::bracket(args.theta, args.bits);
    let bracket = outcome.bracket_probability(args.theta);
    let floor = 4.0 / std::f64::consts::PI.powi(2);

    let mut checks = Checks::default();
    checks.require((total - 1.0).abs() <= 1e-10, || {
        format!("outcome probabilities sum to {total}")
    });
    checks.require(bracket >= floor - 1e-12, || {
        format!("bracket probability {bracket} below 4/pi^2")
    });

    let best = outcome.most_likely();
    if args.format == TableFormat::Text {
        let mut body = format!("theta = {}  bits = {}  most likely y = {best}\n", args.theta, args.bits);
        body += &format!("{:>6}  {:>12}  {:>12}\n", "y", "y/2^n", "probability");
        for (y, p) in outcome.distribution.iter().enumerate() {
            let mark = if y == lo || y == hi { " *" } else { "" };
            body += &format!("{y:>6}  {:>12.6}  {p:>12.6e}{mark}\n", outcome.phase_of(y));
        }
        body += &format!("bracket ({lo}, {hi}) probability {bracket:.6} >= 4/pi^2 = {floor:.6}");
        return Ok(Report {
            body,
            failures: checks.0,
        });
    }
    let rows: Vec<Value> = outcome
        .distribution
        .iter()
        .enumerate()
        .map(|(y, &p)| json!({ "y": y, "phase": outcome.phase_of(y), "probability": p }))
        .collect();
    let body = json!({
        "theta": args.theta,
        "bits": args.bits,
        "most_likely": best,
        "bracket": [lo, hi],
        "bracket_probability": bracket,
        "bracket_floor": floor,
        "outcomes": rows,
    });
    checks.report(&body)
}

pub fn prep(args: &PrepArgs) -> Result<Report> {
    let entries = input::read_vector(&args.vector)?
        .into_iter()
        .map(|(re, im)| Complex64::new(re, im))
        .collect();
    let target = TargetVector::new(entries)?;
    let reference = target.normalized_state();
    let mut checks = Checks::default();
    let body = match args.method {
        PrepMethod::Flat => {
            let p = stateprep::prepare_flat(&target)?;
            let fidelity = reference.fidelity(&p.state)?;
            checks.require(fidelity >= 1.0 - FIDELITY_TOL, || format!("fidelity {fidelity}"));
            checks.require(p.cost.bound_ok, || {
                format!("one-norm ratio {} above sqrt(nnz)", p.cost.amplitude_ratio)
            });
            json!({
                "method": "flat",
                "kappa": p.cost.kappa,
                "q": 1,
                "success_prob": p.cost.success_probability,
                "fidelity": fidelity,
                "cost": p.cost,
            })
        }
        PrepMethod::Binned => {
            let p = stateprep::prepare_binned(&target)?;
            let fidelity = reference.fidelity(&p.state)?;
            let c = &p.cost;
            checks.require(fidelity >= 1.0 - FIDELITY_TOL, || format!("fidelity {fidelity}"));
            checks.require(c.cauchy_schwarz_ok, || {
                format!("bin weight sum {} above sqrt(q) = {}", c.weight_sum, c.sqrt_bin_count)
            });
            checks.require(c.bin_count == stateprep::bin_count_for(c.kappa), || {
                format!("bin count {} differs from ceil(log2 kappa)", c.bin_count)
            });
            json!({
                "method": "binned",
                "kappa": c.kappa,
                "q": c.bin_count,
                "success_prob": c.combine_success_probability,
                "fidelity": fidelity,
                "cost": c,
            })
        }
    };
    checks.report(&body)
}

pub fn conditioning(args: &ConditioningArgs) -> Result<Report> {
    let mut checks = Checks::default();
    if args.sweep {
        let config = SweepConfig {
            min_size: args.sizes.0,
            max_size: args.sizes.1,
            trials: args.trials,
            seed: args.seed,
            h_min: args.h_min,
            h_max: args.h_max,
        };
        ensure!(config.min_size >= 2, "system sizes start at 2");
        ensure!(
            0.0 < config.h_min && config.h_min <= config.h_max,
            "need 0 < --h-min <= --h-max"
        );
        let r = conditioning::sweep(&config)?;
        checks.require(r.bound_4sqrt2_ok, || {
            format!("max kappa {} above 4 sqrt 2", r.max_kappa)
        });
        checks.require(r.gershgorin_ok, || {
            "a singular value left the Gershgorin union or [0, 4]".into()
        });
        checks.require(r.frobenius_ok, || "a Frobenius norm fell below its floor".into());
        return checks.report(&json!({
            "max_kappa": r.max_kappa,
            "bound_4sqrt2_ok": r.bound_4sqrt2_ok,
            "bound_4_ok": r.bound_4_ok,
            "sweep": config,
            "report": r,
        }));
    }
    let Some(path) = &args.input else {
        bail!("pass --sweep or --input")
    };
    let Some(kind) = args.boundary else {
        bail!("--input needs --boundary")
    };
    let data = input::read_dataset(path)?;
    let boundary = boundary_condition(kind, args.f0p, args.fnp, args.f0pp, args.fnpp)?;
    let r = conditioning::condition_report(&spline::build_system(&data, &boundary)?)?;
    checks.require(r.passes(), || "singular-value bounds violated".into());
    checks.report(&json!({
        "max_kappa": r.kappa,
        "bound_4sqrt2_ok": r.within_4sqrt2,
        "bound_4_ok": r.within_4,
        "report": r,
    }))
}

pub fn hhl_solve(args: &HhlSolveArgs) -> Result<Report> {
    let a = input::read_matrix(&args.matrix)?;
    let b = input::read_real_vector(&args.rhs)?;
    ensure!(
        b.len() == a.nrows(),
        "rhs has {} entries, matrix has {} rows",
        b.len(),
        a.nrows()
    );
    let direct = direct_solve(&a, &b)?;

    let system = LinearSystem::from_real(&a, &b)?;
    let sv = a.clone().singular_values();
    let bound = hhl::gershgorin_row_bound(&system.hamiltonian());
    let kappa = match args.kappa {
        Some(k) => k,
        None => bound / sv.min(),
    };
    let mut config = HhlConfig::for_system(&system, args.phase_bits, kappa)?;
    if let Some(shots) = args.shots {
        config = config.with_mode(PostselectionMode::Sampled { shots, seed: args.seed });
    }
    let result = hhl::solve(&system, &config)?;
    let solution = result.solution(a.nrows());
    let direct_norm = direct.iter().map(|v| v * v).sum::<f64>().sqrt();
    let overlap: Complex64 = solution
        .iter()
        .zip(&direct)
        .map(|(s, &x)| s.conj() * x / direct_norm)
        .sum();
    let fidelity = overlap.norm_sqr();
    let b_norm = b.iter().map(|v| v * v).sum::<f64>().sqrt();

    let mut checks = Checks::default();
    if let Some(min) = args.min_fidelity {
        checks.require(fidelity >= min, || format!("fidelity {fidelity} below {min}"));
    }
    checks.report(&json!({
        "fidelity_vs_direct": fidelity,
        "success_prob": result.success_probability,
        "norm_estimate": result.norm_estimate,
        "direct_norm_ratio": direct_norm / b_norm,
        "hermitian": system.is_hermitian(),
        "kappa_configured": config.configured_kappa(),
        "eigenvalue_bound": config.eigenvalue_bound,
        "phase_bits": config.phase_bits,
        "residual_weight": result.residual_weight,
        "solution": solution.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
    }))
}

fn direct_solve(a: &DMatrix<f64>, b: &[f64]) -> Result<Vec<f64>> {
    let x = a
        .clone()
        .lu()
        .solve(&nalgebra::DVector::from_column_slice(b))
        .context("matrix is singular")?;
    Ok(x.iter().copied().collect())
}
