use num_complex::Complex64;
use proptest::prelude::*;
use rydgate::fidelity::{average_gate_fidelity, density_matrix_fidelity, ideal_gate, single_state_fidelity};
use rydgate::linalg::CMatrix;

fn vector(parts: &[(f64, f64)]) -> Vec<Complex64> {
    parts.iter().map(|&(re, im)| Complex64::new(re, im)).collect()
}

fn normalized(v: Vec<Complex64>) -> Vec<Complex64> {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / n).collect()
}

fn entries() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 8)
}

#[test]
fn identity_and_ideal_gates_score_one() {
    let id = CMatrix::<f64>::identity(8);
    assert!((average_gate_fidelity(&id, 0.0).average - 1.0).abs() < 1e-12);
    for phi in [std::f64::consts::PI, 0.75 * std::f64::consts::PI, 0.3, -1.2] {
        let r = average_gate_fidelity(&ideal_gate(phi), phi);
        assert!((r.average - 1.0).abs() < 1e-12, "{phi}: {}", r.average);
        assert!((r.worst.1 - 1.0).abs() < 1e-12);
    }
}

proptest! {
    #[test]
    fn pure_shortcut_equals_general_path(a in entries(), b in entries(), scale in 0.05f64..1.0) {
        prop_assume!(a.iter().chain(&b).map(|(x, y)| x * x + y * y).sum::<f64>() > 1e-2);
        let reference = normalized(vector(&a));
        let sim: Vec<Complex64> = normalized(vector(&b)).into_iter().map(|z| z * scale.sqrt()).collect();
        let fast = single_state_fidelity(&sim, &reference).unwrap();
        let general = density_matrix_fidelity(&sim, &reference).unwrap();
        prop_assert!((fast - general).abs() < 1e-12, "{fast} vs {general}");
    }

    #[test]
    fn global_phase_invariant(entries in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 64), theta in -3.1f64..3.1, phi in -3.1f64..3.1) {
        let u = CMatrix::from_fn(8, 8, |i, j| Complex64::new(entries[8 * i + j].0, entries[8 * i + j].1) * 0.3);
        let v = u.scale(Complex64::from_polar(1.0, theta));
        let a = average_gate_fidelity(&u, phi);
        let b = average_gate_fidelity(&v, phi);
        prop_assert!((a.average - b.average).abs() < 1e-12);
        prop_assert!((a.worst.1 - b.worst.1).abs() < 1e-12);
    }
}

#[test]
fn unnormalized_reference_rejected() {
    let r = vec![Complex64::new(0.5, 0.0); 8];
    assert!(single_state_fidelity(&r, &r).is_err());
}
