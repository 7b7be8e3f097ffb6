use rydgate::gate_engine::{GateEngine, GateSetup, LOGICAL_DIM};
use std::f64::consts::PI;

fn setup() -> GateSetup<f64> {
    let mut s = GateSetup::ccz_defaults(0.1763437, 0.04920619, 49.756527, 1.27);
    s.schedule.t_wait1 = 0.0227026;
    s.schedule.t_wait2 = 0.0359369;
    s
}

#[test]
fn gate_properties() {
    let mut s = setup();
    s.sample_dt = Some(0.002);
    let engine = GateEngine::new(&s).unwrap();
    let a = engine.run(&s, PI).unwrap();

    // |000> is untouched.
    for y in 0..LOGICAL_DIM {
        let want = if y == 0 { 1.0 } else { 0.0 };
        assert_eq!(a.propagator[(y, 0)].re, want);
        assert_eq!(a.propagator[(y, 0)].im, 0.0);
    }
    // The chain is mirror symmetric, which swaps |011> and |101>.
    for y in 0..LOGICAL_DIM {
        let (yy, d) = (match y { 3 => 5, 5 => 3, o => o }, a.propagator[(y, 3)]);
        assert!((d - a.propagator[(yy, 5)]).norm() < 1e-9, "row {y}");
    }
    assert!((a.loss[3] - a.loss[5]).abs() < 1e-9);

    // Single excitations return to their input, losing only norm.
    for x in [1, 2, 4] {
        let stay = a.propagator[(x, x)].norm_sqr();
        assert!((stay + a.loss[x] - 1.0).abs() < 1e-6, "{x}: {stay} + {}", a.loss[x]);
        assert!(a.leakage[x].abs() < 1e-6);
    }

    for traj in a.trajectories.iter().flatten() {
        for w in traj.norms_squared().windows(2) {
            assert!(w[1] <= w[0] + 1e-9);
        }
    }

    let b = engine.run(&s, PI).unwrap();
    assert_eq!(a.propagator, b.propagator);
    assert_eq!(a.loss, b.loss);
}

#[test]
fn calibrated_point_reaches_high_fidelity() {
    let s = setup();
    let r = GateEngine::new(&s).unwrap().run(&s, PI).unwrap();
    let f = r.fidelity();
    assert!(f.average > 0.99, "{}", f.average);
    let cond = r.conditional_phases();
    assert!((cond[7].abs() - PI).abs() < 0.1, "{}", cond[7]);
}

#[test]
fn rejects_phase_outside_range() {
    let s = setup();
    let engine = GateEngine::new(&s).unwrap();
    assert!(engine.run(&s, -PI).is_err());
    assert!(engine.run(&s, 4.0).is_err());
}
