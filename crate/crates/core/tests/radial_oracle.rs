mod common;

use common::numerov;
use rydgate::atomic_data::{AtomicConstants, RydbergLevel};
use rydgate::matrix_elements::radial_dipole;

const H: f64 = 0.005;

fn numerov_integral(a: &RydbergLevel, b: &RydbergLevel, k: &AtomicConstants<f64>) -> f64 {
    let na = k.effective_n(a).unwrap();
    let nb = k.effective_n(b).unwrap();
    let edge = numerov::outer_edge(na.max(nb));
    let wa = numerov::solve(na, a.l, a.j(), edge, H);
    let wb = numerov::solve(nb, b.l, b.j(), edge, H);
    numerov::radial_integral(&wa, &wb, H)
}

#[test]
fn closed_form_matches_numerov_within_one_percent() {
    let k = AtomicConstants::<f64>::rubidium87();
    let s = [RydbergLevel::s12(70, 1), RydbergLevel::s12(71, 1)];
    let p = [RydbergLevel::p12(70, 1), RydbergLevel::p32(70, 1)];
    for a in &s {
        for b in &p {
            let closed = radial_dipole(a, b, &k).unwrap();
            let oracle = numerov_integral(a, b, &k);
            let rel = (closed.abs() - oracle.abs()).abs() / oracle.abs();
            println!("{a} {b}: closed {closed:.3} numerov {oracle:.3} rel {rel:.2e}");
            assert!(rel < 0.01, "{a} {b}: {closed} vs {oracle}");
        }
    }
}

#[test]
fn neighbour_ratio_order_unity_and_stable() {
    let k = AtomicConstants::<f64>::rubidium87();
    let ratio = |n: u32| {
        let p = RydbergLevel::p32(n, 1);
        radial_dipole(&p, &RydbergLevel::s12(n + 1, 1), &k).unwrap() / radial_dipole(&p, &RydbergLevel::s12(n, 1), &k).unwrap()
    };
    let r70 = ratio(70);
    assert!(r70.abs() > 0.5 && r70.abs() < 2.0, "{r70}");
    for n in [69, 71] {
        assert!(((ratio(n) - r70) / r70).abs() < 0.01, "n = {n}: {} vs {r70}", ratio(n));
    }
    let p = RydbergLevel::p32(70, 1);
    let oracle = numerov_integral(&p, &RydbergLevel::s12(71, 1), &k) / numerov_integral(&p, &RydbergLevel::s12(70, 1), &k);
    assert!(((oracle - r70) / r70).abs() < 0.01);
}
