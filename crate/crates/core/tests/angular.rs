use proptest::prelude::*;
use rydgate::atomic_data::{AtomicConstants, RydbergLevel};
use rydgate::collective_basis::{build_interaction_basis, extend_with_logical};
use rydgate::hamiltonian::{assemble_static, FieldDrive, HamiltonianModel};
use rydgate::matrix_elements::{angular_factor, clebsch_gordan, ddi_element, radial_dipole, HalfInteger};
use rydgate::units::{um_to_bohr, HARTREE_MHZ};

fn h(twice: i32) -> HalfInteger {
    HalfInteger::from_twice(twice)
}

fn cg(j1: i32, m1: i32, j2: i32, m2: i32, j: i32, m: i32) -> f64 {
    clebsch_gordan(h(j1), h(m1), h(j2), h(m2), h(j), h(m)).unwrap().value()
}

fn fact(n: i32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Racah's sum evaluated in floating point, arguments doubled.
fn racah(j1: i32, m1: i32, j2: i32, m2: i32, j: i32, m: i32) -> f64 {
    if m1 + m2 != m || j > j1 + j2 || j < (j1 - j2).abs() || m.abs() > j {
        return 0.0;
    }
    let f = |x: i32| fact(x / 2);
    let pre = ((j + 1) as f64 * f(j1 + j2 - j) * f(j1 - j2 + j) * f(-j1 + j2 + j) / f(j1 + j2 + j + 2)).sqrt()
        * (f(j1 + m1) * f(j1 - m1) * f(j2 + m2) * f(j2 - m2) * f(j + m) * f(j - m)).sqrt();
    let mut sum = 0.0;
    for k in 0..=(j1 + j2 + j) / 2 {
        let k2 = 2 * k;
        let args = [j1 + j2 - j - k2, j1 - m1 - k2, j2 + m2 - k2, j - j2 + m1 + k2, j - j1 - m2 + k2];
        if args.iter().any(|&a| a < 0) {
            continue;
        }
        let denom: f64 = fact(k) * args.iter().map(|&a| f(a)).product::<f64>();
        sum += if k % 2 == 0 { 1.0 } else { -1.0 } / denom;
    }
    pre * sum
}

#[test]
fn racah_closed_form_value() {
    assert!((cg(2, 0, 2, 0, 4, 0) - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
}

proptest! {
    #[test]
    fn matches_floating_racah(j1 in 0i32..6, j2 in 0i32..6, a in 0i32..7, b in 0i32..7, dj in 0i32..6) {
        let m1 = -j1 + 2 * (a % (j1 + 1));
        let m2 = -j2 + 2 * (b % (j2 + 1));
        let jt = (j1 - j2).abs() + 2 * (dj % ((j1 + j2 - (j1 - j2).abs()) / 2 + 1));
        let m = m1 + m2;
        prop_assume!(m.abs() <= jt);
        let exact = cg(j1, m1, j2, m2, jt, m);
        prop_assert!((exact - racah(j1, m1, j2, m2, jt, m)).abs() < 1e-12);
    }

    #[test]
    fn orthonormal_over_projections(j1 in 0i32..7, j2 in 0i32..7, pick in 0usize..64) {
        let js: Vec<i32> = ((j1 - j2).abs()..=j1 + j2).step_by(2).collect();
        let ja = js[pick % js.len()];
        let jb = js[(pick / js.len()) % js.len()];
        let lim = ja.min(jb);
        for m in (-lim..=lim).step_by(2) {
            let mut s = 0.0;
            for m1 in (-j1..=j1).step_by(2) {
                let m2 = m - m1;
                if m2.abs() > j2 {
                    continue;
                }
                s += cg(j1, m1, j2, m2, ja, m) * cg(j1, m1, j2, m2, jb, m);
            }
            let want = if ja == jb { 1.0 } else { 0.0 };
            prop_assert!((s - want).abs() < 1e-12, "j1 {j1} j2 {j2} J {ja} {jb} M {m}: {s}");
        }
    }

    #[test]
    fn projection_violation_exactly_zero(j1 in 0i32..6, j2 in 0i32..6, a in 0i32..7, b in 0i32..7, shift in 1i32..3) {
        let m1 = -j1 + 2 * (a % (j1 + 1));
        let m2 = -j2 + 2 * (b % (j2 + 1));
        let m = m1 + m2 + 2 * shift;
        let jt = j1 + j2;
        prop_assume!(m.abs() <= jt);
        let v = clebsch_gordan(h(j1), h(m1), h(j2), h(m2), h(jt), h(m)).unwrap();
        prop_assert!(v.is_zero());
    }
}

fn inventory() -> Vec<RydbergLevel> {
    let mut v = Vec::new();
    for n in [69, 70, 71] {
        for m in [-1, 1] {
            v.push(RydbergLevel::s12(n, m));
            v.push(RydbergLevel::p12(n, m));
        }
        for m in [-3, -1, 1, 3] {
            v.push(RydbergLevel::p32(n, m));
        }
    }
    v
}

#[test]
fn ddi_symmetric_and_conserves_projection() {
    let k = AtomicConstants::<f64>::rubidium87();
    let inv = inventory();
    let pick = |i: usize| inv[i % inv.len()];
    for i in 0..40usize {
        for j in 0..40usize {
            let bra = (pick(i * 7), pick(i * 3 + 1));
            let ket = (pick(j * 5 + 2), pick(j * 11 + 3));
            let v = ddi_element(bra, ket, 10.0, &k).unwrap_or(0.0);
            let w = ddi_element(ket, bra, 10.0, &k).unwrap_or(0.0);
            assert_eq!(v, w, "{bra:?} {ket:?}");
            if bra.0.twice_mj + bra.1.twice_mj != ket.0.twice_mj + ket.1.twice_mj {
                assert_eq!(v, 0.0);
            }
        }
    }
}

#[test]
fn ddi_scales_as_inverse_cube() {
    let k = AtomicConstants::<f64>::rubidium87();
    let bra = (RydbergLevel::p32(70, 1), RydbergLevel::p32(70, 1));
    let ket = (RydbergLevel::s12(70, 1), RydbergLevel::s12(71, 1));
    let v10 = ddi_element(bra, ket, 10.0, &k).unwrap();
    for r in [3.0, 7.5, 12.0, 20.0, 31.7] {
        let v = ddi_element(bra, ket, r, &k).unwrap();
        let want = v10 * (10.0f64 / r).powi(3);
        assert!(((v - want) / want).abs() < 1e-12, "R = {r}: {v} vs {want}");
    }
}

#[test]
fn ddi_term_by_term() {
    let k = AtomicConstants::<f64>::rubidium87();
    let (p, s, s1) = (RydbergLevel::p32(70, 1), RydbergLevel::s12(70, 1), RydbergLevel::s12(71, 1));
    let rp = radial_dipole(&p, &s, &k).unwrap();
    let rp1 = radial_dipole(&p, &s1, &k).unwrap();
    // a.b - 3 a_z b_z = -(a_+ b_- + a_- b_+ + 2 a_0 b_0) in spherical components.
    let mut sum = 0.0;
    for (q, w) in [(-1, 1.0), (0, 2.0), (1, 1.0)] {
        sum += w * angular_factor::<f64>(&p, &s, q) * rp * angular_factor::<f64>(&p, &s1, -q) * rp1;
    }
    let r = um_to_bohr(10.0);
    let want = -HARTREE_MHZ * sum / (r * r * r);
    let got = ddi_element((p, p), (s, s1), 10.0, &k).unwrap();
    assert!(((got - want) / want).abs() < 1e-12);
    assert!(got.abs() > 0.1 && got.abs() < 100.0, "{got} MHz");
}

#[test]
fn assembled_block_real_symmetric_and_block_diagonal() {
    let k = AtomicConstants::<f64>::rubidium87();
    let basis = build_interaction_basis(70, 2.0, &k).unwrap();
    let ext = extend_with_logical(&basis, &k).unwrap();
    let model = HamiltonianModel::new(ext.clone(), 10.0, FieldDrive::dc(0.18), 300.0, k);
    let parts = assemble_static(&model).unwrap();
    assert!(parts.ddi.nnz() > 0);
    for (i, j, v) in parts.ddi.iter() {
        assert_eq!(parts.ddi.get(j, i), v);
        assert_eq!(ext.states[i].twice_m, ext.states[j].twice_m);
    }
}
