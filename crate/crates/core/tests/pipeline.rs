use proptest::prelude::*;
use qspline_core::pipeline::{compare_report, quantum_evaluate, quantum_fit, InnerProductEstimator, PipelineConfig};
use qspline_core::spline::{self, BoundaryCondition, SplineDataset};

fn boundaries() -> [BoundaryCondition; 3] {
    [
        BoundaryCondition::clamped(0.5, -1.0),
        BoundaryCondition::natural(),
        BoundaryCondition::Periodic,
    ]
}

/// Small seeded datasets, one per boundary type.
fn corpus() -> Vec<(SplineDataset, BoundaryCondition)> {
    boundaries()
        .into_iter()
        .enumerate()
        .flat_map(|(k, b)| {
            [3usize, 6].into_iter().map(move |n| {
                let d = SplineDataset::seeded(100 + 10 * k as u64 + n as u64, n, 0.2, 2.0, b.is_periodic()).unwrap();
                (d, b)
            })
        })
        .collect()
}

fn grid(d: &SplineDataset, points: usize) -> Vec<f64> {
    let (a, b) = d.domain();
    (0..points)
        .map(|k| a + (b - a) * (k as f64 + 0.5) / points as f64)
        .collect()
}

#[test]
fn corpus_error_is_within_tolerance() {
    for (d, b) in corpus() {
        let r = compare_report(&d, &b, &grid(&d, 3), &PipelineConfig::default()).unwrap();
        let ymax = d.y().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(
            r.max_abs_error[0] <= 0.05 * (1.0 + ymax),
            "{}: {:?}",
            b.name(),
            r.max_abs_error
        );
        assert!(r.diagnostics.prep_fidelity >= 1.0 - 1e-10);
        if let Some(cost) = &r.diagnostics.prep {
            assert!(cost.cauchy_schwarz_ok);
            assert!(cost.bin_count >= 1);
        }
    }
}

#[test]
fn doubling_phase_bits_does_not_increase_error() {
    // Exact inner products isolate the HHL discretization error.
    let at = |bits| {
        let config = PipelineConfig {
            phase_bits: bits,
            estimator: InnerProductEstimator::Exact,
            ..PipelineConfig::default()
        };
        corpus()
            .iter()
            .map(|(d, b)| compare_report(d, b, &grid(d, 9), &config).unwrap().max_abs_error[0])
            .fold(0.0, f64::max)
    };
    let (coarse, fine) = (at(5), at(10));
    assert!(fine <= coarse, "5 bits {coarse:e}, 10 bits {fine:e}");
}

#[test]
fn fifteen_point_clamped_fit() {
    let d = SplineDataset::seeded(2024, 14, 0.5, 1.5, false).unwrap();
    let fit = quantum_fit(&d, &BoundaryCondition::clamped(1.0, 0.0), &PipelineConfig::default()).unwrap();
    assert!(fit.diagnostics.classical_fidelity >= 0.99);
    assert!(fit.diagnostics.scale_relative_error <= 0.05);
}

#[test]
fn second_derivative_at_the_middle_knot() {
    let d = SplineDataset::new(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 0.0]).unwrap();
    let fit = quantum_fit(&d, &BoundaryCondition::natural(), &PipelineConfig::default()).unwrap();
    let e = quantum_evaluate(&fit, 1.0, 1e-3).unwrap();
    assert!((e.second + 3.0).abs() < 0.05, "{}", e.second);
    assert_eq!(e.value, 1.0);
}

#[test]
fn reports_are_reproducible_and_serialize() {
    let (d, b) = &corpus()[1];
    let config = PipelineConfig {
        estimator: InnerProductEstimator::SwapTestShots { shots: 500, seed: 9 },
        ..PipelineConfig::default()
    };
    let one = serde_json::to_string(&compare_report(d, b, &grid(d, 2), &config).unwrap()).unwrap();
    let two = serde_json::to_string(&compare_report(d, b, &grid(d, 2), &config).unwrap()).unwrap();
    assert_eq!(one, two);

    let fit = quantum_fit(d, b, &config).unwrap();
    let back: qspline_core::pipeline::QuantumFit = serde_json::from_str(&serde_json::to_string(&fit).unwrap()).unwrap();
    assert_eq!(back, fit);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn exact_features_reproduce_the_classical_fit(seed in any::<u64>(), n in 2usize..7, kind in 0usize..3, u in 0.0f64..1.0) {
        let b = boundaries()[kind];
        let n = if b.is_periodic() { n.max(3) } else { n };
        let d = SplineDataset::seeded(seed, n, 0.1, 3.0, b.is_periodic()).unwrap();
        let config = PipelineConfig { estimator: InnerProductEstimator::Exact, ..PipelineConfig::default() };
        let fit = quantum_fit(&d, &b, &config).unwrap();
        let system = spline::build_system(&d, &b).unwrap();
        let (lo, hi) = d.domain();
        let x = lo + (hi - lo) * u;
        // Substitute the classical moments: the feature decomposition must be exact.
        let classical = spline::fit(&d, &b).unwrap();
        let reference = spline::evaluate(&d, &classical, x).unwrap();
        for order in 0..3 {
            let f = spline::derivative_features(&d, x, order).unwrap();
            let want = [reference.value, reference.first, reference.second][order];
            prop_assert!((f.apply(&classical) - want).abs() <= 1e-9 * (1.0 + want.abs()));
        }
        // And the quantum moments stay within the HHL fidelity of the classical ones.
        let m = fit.moments(&system);
        let scale = classical.moments.iter().map(|v| v.abs()).fold(1.0, f64::max);
        for (a, c) in m.iter().zip(&classical.moments) {
            prop_assert!((a - c).abs() <= 0.05 * scale, "{m:?} vs {:?}", classical.moments);
        }
    }
}
