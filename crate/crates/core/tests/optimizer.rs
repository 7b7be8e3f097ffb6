use proptest::prelude::*;
use rydgate::optimizer::{optimize, sensitivity_scan, OptimizationProblem, Stage};

fn problem(seed: u64) -> OptimizationProblem<f64> {
    OptimizationProblem::new(
        vec!["a".into(), "b".into()],
        vec![0.8, -0.6],
        vec![-1.0, -1.0],
        vec![1.0, 1.0],
        seed,
    )
}

// Rippled bowl: the simplex finds a local maximum, annealing keeps moving.
fn objective(x: &[f64]) -> rydgate::Result<f64> {
    let r2 = (x[0] - 0.3).powi(2) + (x[1] + 0.2).powi(2);
    Ok(1.0 - 0.01 * r2 + 2e-4 * (40.0 * x[0]).cos() * (37.0 * x[1]).cos())
}

#[test]
fn finds_bowl_and_respects_budget() {
    let mut p = problem(7);
    p.budget = 300;
    let r = optimize(&p, objective).unwrap();
    assert!(r.log.len() <= 300);
    assert!(r.budget_exhausted);
    assert!((r.best_x[0] - 0.3).abs() < 0.1 && (r.best_x[1] + 0.2).abs() < 0.1, "{:?}", r.best_x);
    let best_logged = r.log.iter().map(|e| e.value).fold(f64::NEG_INFINITY, f64::max);
    assert_eq!(best_logged, r.best_value);
}

#[test]
fn seeded_runs_are_identical() {
    let a = optimize(&problem(11), objective).unwrap();
    let b = optimize(&problem(11), objective).unwrap();
    assert_eq!(a.log, b.log);
    assert_eq!(a.best_x, b.best_x);
    let c = optimize(&problem(12), objective).unwrap();
    assert_ne!(a.log, c.log);
}

#[test]
fn annealing_acceptance_follows_boltzmann() {
    let (mut expected, mut variance, mut observed, mut trials) = (0.0, 0.0, 0.0, 0);
    for seed in 0..20 {
        let r = optimize(&problem(seed), objective).unwrap();
        for e in r.log.iter().filter(|e| e.stage == Stage::Annealing) {
            let (Some(d), Some(t)) = (e.delta, e.temperature) else { panic!("annealing entries carry delta and T") };
            if d <= 0.0 {
                assert!(e.accepted);
                continue;
            }
            let p = (-d / t).exp();
            expected += p;
            variance += p * (1.0 - p);
            observed += f64::from(u8::from(e.accepted));
            trials += 1;
        }
    }
    assert!(trials > 1000 && expected > 50.0, "{trials} uphill proposals, {expected} expected accepts");
    let z = (observed - expected) / variance.sqrt();
    assert!(z.abs() < 3.0, "observed {observed}, expected {expected}, z = {z}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn never_worse_than_start(x0 in -1.0f64..1.0, y0 in -1.0f64..1.0, seed in 0u64..1000) {
        let mut p = problem(seed);
        p.start = vec![x0, y0];
        p.budget = 150;
        let r = optimize(&p, objective).unwrap();
        prop_assert!(r.best_value >= objective(&p.start).unwrap());
        for e in &r.log {
            prop_assert!(e.x.iter().all(|v| (-1.0..=1.0).contains(v)));
        }
    }

    #[test]
    fn half_width_scales_with_budget(k in 0.5f64..50.0, b in 1e-4f64..1e-2) {
        let f = |d: f64| Ok(1.0 - k * d * d);
        let one = sensitivity_scan(f, 1e-3, b, 1e-9).unwrap();
        let four = sensitivity_scan(f, 1e-3, 4.0 * b, 1e-9).unwrap();
        prop_assert!((four.half_width / one.half_width - 2.0).abs() < 1e-6);
        prop_assert!((one.half_width - (b / k).sqrt()).abs() < 1e-7 * (b / k).sqrt().max(1.0));
    }
}
