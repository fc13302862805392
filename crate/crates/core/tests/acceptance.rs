//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::f64::consts::{PI, SQRT_2};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use nalgebra::DVector;
use qspline_core::estimation::{swap_test_real, EstimationMode, DEFAULT_FAILURE_BUDGET};
use qspline_core::hhl::{solve, HhlConfig, LinearSystem};
use qspline_core::pipeline::{quantum_evaluate, quantum_fit, PipelineConfig};
use qspline_core::qpe::{good_set_probability, phase_unitary, run_qpe, PhaseEstimationConfig};
use qspline_core::spline::conditioning::{sweep, SweepConfig};
use qspline_core::spline::{self, BoundaryCondition, SplineDataset};
use qspline_core::stateprep::{lcu_combine, prepare_binned, LcuSpec, TargetVector};
use qspline_core::{Complex64, Statevector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn eigenstate() -> Statevector {
    Statevector::basis(1, 1).unwrap()
}

fn qpe_dyadic() -> Outcome {
    let mut r = rng(1);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let n = r.random_range(2..=8usize);
        let k = r.random_range(0..1usize << n);
        let theta = k as f64 / (1u64 << n) as f64;
        let out = run_qpe(
            &phase_unitary(theta),
            &eigenstate(),
            &PhaseEstimationConfig::with_bits(n).unwrap(),
        )
        .unwrap();
        worst = worst.max((out.probability(k) - 1.0).abs());
    }
    outcome(worst <= 1e-10, format!("max |P(k) - 1| = {worst:.3e}"))
}

fn qpe_bracket() -> Outcome {
    let mut r = rng(2);
    let floor = 4.0 / (PI * PI);
    let mut worst = f64::INFINITY;
    let mut checked = 0;
    while checked < 200 {
        let n = r.random_range(2..=10usize);
        let theta: f64 = r.random();
        let big = (1u64 << n) as f64;
        if (theta * big).fract() == 0.0 {
            continue;
        }
        let out = run_qpe(
            &phase_unitary(theta),
            &eigenstate(),
            &PhaseEstimationConfig::with_bits(n).unwrap(),
        )
        .unwrap();
        worst = worst.min(out.bracket_probability(theta));
        checked += 1;
    }
    outcome(
        worst >= floor - 1e-12,
        format!("min bracket mass = {worst:.6} vs 4/pi^2 = {floor:.6}"),
    )
}

fn qpe_good_set() -> Outcome {
    let mut r = rng(3);
    let mut lines = Vec::new();
    let mut pass = true;
    for p in 2..=4usize {
        let mut failures = 0;
        let mut worst = f64::INFINITY;
        let mut window_min = f64::INFINITY;
        let mut bound = 0.0;
        for _ in 0..50 {
            let m = r.random_range(2..=3usize);
            let theta: f64 = r.random();
            let report = good_set_probability(theta, &PhaseEstimationConfig::new(m, p).unwrap()).unwrap();
            bound = report.bound;
            worst = worst.min(report.probability - report.bound);
            window_min = window_min.min(report.window_probability - report.bound);
            if !report.bound_holds {
                failures += 1;
            }
        }
        pass &= failures == 0;
        lines.push(format!(
            "p={p}: {failures}/50 below {bound:.4} (worst margin {worst:+.4}; two-sided window worst margin {window_min:+.4})"
        ));
    }
    outcome(pass, lines.join("; "))
}

fn spread_vector(r: &mut ChaCha8Rng) -> (TargetVector, f64) {
    let m = r.random_range(2..=64usize);
    let kappa = 10f64.powf(r.random_range(0.0..6.0));
    let mut mags: Vec<f64> = (0..m).map(|_| kappa.powf(r.random::<f64>())).collect();
    mags[0] = 1.0;
    mags[m - 1] = kappa;
    let v = mags
        .iter()
        .map(|&a| Complex64::from_polar(a, r.random_range(0.0..2.0 * PI)))
        .collect();
    (TargetVector::new(v).unwrap(), kappa)
}

fn state_prep() -> Outcome {
    let mut r = rng(4);
    let mut worst_fid: f64 = 1.0;
    let mut q_ok = true;
    let mut cs_ok = true;
    for _ in 0..100 {
        let (x, _) = spread_vector(&mut r);
        let prep = prepare_binned(&x).unwrap();
        worst_fid = worst_fid.min(x.normalized_state().fidelity(&prep.state).unwrap());
        let q = (x.kappa().log2().ceil() as usize).max(1);
        q_ok &= prep.cost.bin_count == q;
        cs_ok &= prep.cost.weight_sum <= (prep.cost.bin_count as f64).sqrt() + 1e-12;
    }
    outcome(
        worst_fid >= 1.0 - 1e-10 && q_ok && cs_ok,
        format!("min fidelity = {worst_fid:.15}, q = ceil(log2 kappa): {q_ok}, weight sum <= sqrt(q): {cs_ok}"),
    )
}

fn lcu_mass() -> Outcome {
    let mut r = rng(5);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let terms = r.random_range(1..=6usize);
        let qubits = r.random_range(1..=4usize);
        let coefficients: Vec<Complex64> = (0..terms)
            .map(|_| Complex64::from_polar(r.random_range(0.05..2.0), r.random_range(0.0..2.0 * PI)))
            .collect();
        let components: Vec<Statevector> = (0..terms)
            .map(|_| {
                let v: Vec<Complex64> = (0..1 << qubits)
                    .map(|_| Complex64::new(r.random::<f64>() - 0.5, r.random::<f64>() - 0.5))
                    .collect();
                Statevector::from_unnormalized(&v).unwrap()
            })
            .collect();
        let spec = LcuSpec::new(coefficients, components).unwrap();
        let y = spec.combination();
        let y2: f64 = y.iter().map(|z| z.norm_sqr()).sum();
        let s = spec.one_norm();
        let got = lcu_combine(&spec).unwrap().success_probability;
        worst = worst.max((got - y2 / (s * s)).abs());
    }
    outcome(worst <= 1e-10, format!("max |P - ||y||^2/s^2| = {worst:.3e}"))
}

fn spline_boundary(kind: usize, r: &mut ChaCha8Rng) -> BoundaryCondition {
    match kind % 3 {
        0 => BoundaryCondition::clamped(r.random_range(-2.0..2.0), r.random_range(-2.0..2.0)),
        1 => BoundaryCondition::SecondDerivative {
            start: r.random_range(-2.0..2.0),
            end: r.random_range(-2.0..2.0),
        },
        _ => BoundaryCondition::Periodic,
    }
}

fn hhl_oracle() -> Outcome {
    let mut r = rng(6);
    let mut min8 = f64::INFINITY;
    let mut min12 = f64::INFINITY;
    let mut min_success = f64::INFINITY;
    let mut kappa_cfg = 0.0;
    for case in 0..30 {
        let bc = spline_boundary(case, &mut r);
        let size = r.random_range(2..=16usize);
        let intervals = if bc.is_periodic() { size.max(2) } else { size - 1 };
        let data = SplineDataset::seeded(r.random(), intervals, 0.1, 10.0, bc.is_periodic()).unwrap();
        let sys = spline::build_system(&data, &bc).unwrap();
        if sys.rhs.iter().all(|v| v.abs() < 1e-12) {
            continue;
        }
        let truth = spline::thomas_solve(&sys).unwrap().unknowns(&sys);
        let reference = Statevector::from_real(&truth).unwrap();
        let linear = LinearSystem::from_real(&sys.to_dense(), &sys.rhs).unwrap();
        for (bits, slot) in [(8usize, &mut min8), (12, &mut min12)] {
            let cfg = HhlConfig::for_spline(bits);
            kappa_cfg = cfg.configured_kappa();
            let res = solve(&linear, &cfg).unwrap();
            let got = Statevector::from_unnormalized(&res.solution(linear.dim())).unwrap();
            *slot = slot.min(got.fidelity(&reference).unwrap());
            min_success = min_success.min(res.success_probability);
        }
    }
    let floor = 1.0 / (kappa_cfg * kappa_cfg);
    outcome(
        min8 >= 0.99 && min12 >= 0.999 && min_success >= floor,
        format!(
            "min fidelity n=8: {min8:.6}, n=12: {min12:.6}; min success {min_success:.4} vs 1/kappa^2 = {floor:.4}"
        ),
    )
}

fn classical_spline() -> Outcome {
    let mut r = rng(7);
    let mut worst: f64 = 0.0;
    let mut worst_dense: f64 = 0.0;
    for case in 0..500 {
        let bc = spline_boundary(case, &mut r);
        let n = r.random_range(if bc.is_periodic() { 2 } else { 1 }..=64usize);
        let data = SplineDataset::seeded(r.random(), n, 0.05, 5.0, bc.is_periodic()).unwrap();
        let sys = spline::build_system(&data, &bc).unwrap();
        let sol = spline::thomas_solve(&sys).unwrap();

        let dense = sys
            .to_dense()
            .lu()
            .solve(&DVector::from_column_slice(&sys.rhs))
            .unwrap();
        let u = DVector::from_vec(sol.unknowns(&sys));
        worst_dense = worst_dense.max((&u - &dense).norm() / dense.norm().max(1e-300));

        let mut err: f64 = 0.0;
        for (&x, &y) in data.x().iter().zip(data.y()) {
            err = err.max((spline::evaluate(&data, &sol, x).unwrap().value - y).abs());
        }
        for i in 1..n {
            let x = data.x()[i];
            let a = spline::evaluate_piece(&data, &sol, i - 1, x);
            let b = spline::evaluate_piece(&data, &sol, i, x);
            err = err
                .max((a.value - b.value).abs())
                .max((a.first - b.first).abs())
                .max((a.second - b.second).abs());
        }
        let (lo, hi) = data.domain();
        let s0 = spline::evaluate(&data, &sol, lo).unwrap();
        let sn = spline::evaluate(&data, &sol, hi).unwrap();
        err = err.max(match bc {
            BoundaryCondition::FirstDerivative { start, end } => (s0.first - start).abs().max((sn.first - end).abs()),
            BoundaryCondition::SecondDerivative { start, end } => {
                (s0.second - start).abs().max((sn.second - end).abs())
            }
            BoundaryCondition::Periodic => (s0.value - sn.value)
                .abs()
                .max((s0.first - sn.first).abs())
                .max((s0.second - sn.second).abs()),
        });
        worst = worst.max(err);
    }
    outcome(
        worst <= 1e-10 && worst_dense <= 1e-10,
        format!("max condition error = {worst:.3e}, max Thomas-vs-dense relative error = {worst_dense:.3e}"),
    )
}

fn conditioning() -> Outcome {
    let report = sweep(&SweepConfig {
        min_size: 2,
        max_size: 256,
        trials: 10_000,
        seed: 8,
        h_min: 1e-3,
        h_max: 1e3,
    })
    .unwrap();
    outcome(
        report.gershgorin_ok && report.bound_4sqrt2_ok,
        format!(
            "{} systems, Gershgorin containment {}, max kappa = {:.6} (<= 4 sqrt 2 = {:.6}: {}; <= 4 reported: {}, {} above 4), sigma in [{:.4}, {:.4}]",
            report.systems,
            report.gershgorin_ok,
            report.max_kappa,
            4.0 * SQRT_2,
            report.bound_4sqrt2_ok,
            report.bound_4_ok,
            report.above_4,
            report.min_sigma_min,
            report.max_sigma_max
        ),
    )
}

fn end_to_end() -> Outcome {
    let data = SplineDataset::new(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 0.0]).unwrap();
    let bc = BoundaryCondition::natural();
    let config = PipelineConfig::default();
    let fit = quantum_fit(&data, &bc, &config).unwrap();
    let q = quantum_evaluate(&fit, 0.5, config.epsilon).unwrap();
    let c = spline::evaluate(&data, &spline::fit(&data, &bc).unwrap(), 0.5).unwrap();
    outcome(
        (q.value - 0.6875).abs() <= 0.02 && (c.value - 0.6875).abs() <= 1e-12,
        format!("quantum S(0.5) = {:.6}, classical S(0.5) = {:.15}", q.value, c.value),
    )
}

fn swap_test() -> Outcome {
    let mut r = rng(10);
    let mut pass = true;
    let mut worst = [0.0f64; 2];
    for (k, eps) in [1e-2, 1e-3].into_iter().enumerate() {
        for _ in 0..100 {
            let qubits = r.random_range(1..=2usize);
            let mut draw = || {
                let v: Vec<Complex64> = (0..1 << qubits)
                    .map(|_| Complex64::new(r.random::<f64>() - 0.5, r.random::<f64>() - 0.5))
                    .collect();
                Statevector::from_unnormalized(&v).unwrap()
            };
            let (x, y) = (draw(), draw());
            let est = swap_test_real(&x, &y, eps, DEFAULT_FAILURE_BUDGET, EstimationMode::Exact).unwrap();
            let err = (est.value - x.inner_product(&y).unwrap().re).abs();
            worst[k] = worst[k].max(err);
            pass &= err <= eps;
        }
    }
    outcome(
        pass,
        format!("max error eps=1e-2: {:.3e}, eps=1e-3: {:.3e}", worst[0], worst[1]),
    )
}

fn main() -> ExitCode {
    type Check = fn() -> Outcome;
    let criteria: [(u32, &str, Check, Option<u64>); 10] = [
        (1, "phase estimation, dyadic phases", qpe_dyadic, Some(10)),
        (2, "phase estimation, two-outcome bound", qpe_bracket, Some(30)),
        (3, "phase estimation, good-set bound", qpe_good_set, None),
        (4, "binned state preparation", state_prep, Some(30)),
        (5, "LCU postselection mass", lcu_mass, None),
        (6, "HHL vs Thomas on spline systems", hhl_oracle, Some(120)),
        (7, "classical spline conditions", classical_spline, None),
        (8, "conditioning sweep", conditioning, Some(300)),
        (9, "end-to-end three-point example", end_to_end, None),
        (10, "swap test precision", swap_test, None),
    ];
    let mut failed = 0;
    for (id, name, check, budget) in criteria {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let in_time = budget.map_or(true, |s| elapsed <= Duration::from_secs(s));
        let pass = result.pass && in_time;
        if !pass {
            failed += 1;
        }
        let limit = budget.map(|s| format!(" (limit {s} s)")).unwrap_or_default();
        println!(
            "criterion {id:>2} {}: {name}: {} [{:.2} s{limit}]",
            if pass { "PASS" } else { "FAIL" },
            result.detail,
            elapsed.as_secs_f64()
        );
    }
    println!("{} of 10 criteria passed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
