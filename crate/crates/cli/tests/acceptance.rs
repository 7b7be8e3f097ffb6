//! Acceptance run: one PASS/FAIL line per criterion, details indented below.
//!
//! Figure-level criteria (1-5) are reported but do not fail the target; the
//! property suite (6) does.

#[path = "../../core/tests/common/numerov.rs"]
mod numerov;

use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rydgate::atomic_data::{AtomicConstants, RydbergLevel};
use rydgate::collective_basis::{build_interaction_basis, extend_with_logical};
use rydgate::dynamics::{propagate, uniform_samples};
use rydgate::fidelity::{average_gate_fidelity, density_matrix_fidelity, ideal_gate, single_state_fidelity};
use rydgate::floquet::sideband_amplitudes;
use rydgate::gate_engine::{GateEngine, LOGICAL_DIM};
use rydgate::hamiltonian::{assemble_static, AssembledHamiltonian, FieldDrive, HamiltonianModel};
use rydgate::linalg::CMatrix;
use rydgate::matrix_elements::{clebsch_gordan, ddi_element, radial_dipole, HalfInteger};
use rydgate::ode::IntegratorConfig;
use rydgate_cli::experiments::{self, Bundle};
use rydgate_cli::reproduce::{self, apply_working_point, stored_config, Check};

struct Criterion {
    title: &'static str,
    details: Vec<String>,
    pass: bool,
}

impl Criterion {
    fn from_checks(title: &'static str, checks: &[Check]) -> Self {
        let details = checks.iter().map(|c| format!("{} {}: {} (expected {})", tag(c.pass), c.name, c.measured, c.expected)).collect();
        Self { title, details, pass: checks.iter().all(|c| c.pass != Some(false)) }
    }

    fn failed(title: &'static str, why: String) -> Self {
        Self { title, details: vec![why], pass: false }
    }

    fn print(&self, k: usize) {
        println!("criterion {k} {}: {}", if self.pass { "PASS" } else { "FAIL" }, self.title);
        for d in &self.details {
            println!("    {d}");
        }
    }
}

fn tag(pass: Option<bool>) -> &'static str {
    match pass {
        Some(true) => "ok  ",
        Some(false) => "MISS",
        None => "info",
    }
}

fn figure(title: &'static str, name: &str) -> Criterion {
    match stored_config(name).and_then(|c| reproduce::reproduce_with(name, c)) {
        Ok(r) => Criterion::from_checks(title, &r.checks),
        Err(e) => Criterion::failed(title, format!("run failed: {e}")),
    }
}

fn main() {
    let start = Instant::now();
    let mut results: Vec<Criterion> = Vec::new();

    results.push(figure("Fig. 1(c) doublet structure and right sideband", "fig1c"));
    results[0].print(1);
    results.push(figure("Fig. 2 period and first return", "fig2"));
    results[1].print(2);

    // Table I calibration; its phi = pi optimum feeds criteria 4 and 5.
    let mut working_point = None;
    let c3 = match stored_config("table1").and_then(|cfg| experiments::run_optimize(&cfg, &mut Bundle::default())) {
        Ok(o) => {
            working_point = o.rows.iter().find(|r| (r.phi - PI).abs() < 1e-9).map(|r| (o.parameters.clone(), r.best.clone()));
            Criterion::from_checks("Table I fidelities at 300 K and 4 K", &reproduce::check_table1(&o))
        }
        Err(e) => Criterion::failed("Table I fidelities at 300 K and 4 K", format!("run failed: {e}")),
    };
    c3.print(3);
    results.push(c3);

    let at_working_point = |name: &str| {
        let mut cfg = stored_config(name)?;
        if let Some((params, best)) = &working_point {
            apply_working_point(&mut cfg, params, best)?;
        }
        reproduce::reproduce_with(name, cfg)
    };
    let c4 = match at_working_point("fig5") {
        Ok(r) => Criterion::from_checks("Toffoli transfer |111> -> |110>", &r.checks),
        Err(e) => Criterion::failed("Toffoli transfer |111> -> |110>", format!("run failed: {e}")),
    };
    c4.print(4);
    results.push(c4);
    let c5 = match at_working_point("sensitivity") {
        Ok(r) => Criterion::from_checks("0.1 pp parameter half-widths within x3", &r.checks),
        Err(e) => Criterion::failed("0.1 pp parameter half-widths within x3", format!("run failed: {e}")),
    };
    c5.print(5);
    results.push(c5);

    let c6 = property_suite();
    c6.print(6);
    let properties_pass = c6.pass;
    results.push(c6);

    println!("    info next-nearest pair: {}", next_nearest_report());
    let passed = results.iter().filter(|c| c.pass).count();
    println!("acceptance: {passed}/{} criteria pass in {:.0} s", results.len(), start.elapsed().as_secs_f64());
    if !properties_pass {
        std::process::exit(1);
    }
}

/// Fidelity at the calibrated CCZ point with and without the (1,3) pair.
fn next_nearest_report() -> String {
    let run = |nn: bool| -> Result<f64, String> {
        let mut cfg = stored_config("fig4").map_err(|e| e.to_string())?;
        cfg.set("next_nearest", if nn { "true" } else { "false" }).map_err(|e| e.to_string())?;
        cfg.set("sample_dt", "0 ns").map_err(|e| e.to_string())?;
        Ok(experiments::gate(&cfg, &mut Bundle::default()).map_err(|e| e.to_string())?.fidelity.average)
    };
    match (run(true), run(false)) {
        (Ok(a), Ok(b)) => format!("F = {:.4}% with the (1,3) pair, {:.4}% without", a * 100.0, b * 100.0),
        (a, b) => format!("run failed: {a:?} {b:?}"),
    }
}

struct Suite {
    details: Vec<String>,
    pass: bool,
}

impl Suite {
    fn check(&mut self, name: &str, ok: bool, measured: String) {
        self.pass &= ok;
        self.details.push(format!("{} {name}: {measured}", tag(Some(ok))));
    }
}

fn property_suite() -> Criterion {
    let mut s = Suite { details: Vec::new(), pass: true };
    angular(&mut s);
    radial(&mut s);
    sidebands(&mut s);
    propagation(&mut s);
    fidelity(&mut s);
    gate(&mut s);
    Criterion { title: "property suite", details: s.details, pass: s.pass }
}

fn cg(j1: i32, m1: i32, j2: i32, m2: i32, j: i32, m: i32) -> rydgate::matrix_elements::ExactCoefficient {
    let h = HalfInteger::from_twice;
    clebsch_gordan(h(j1), h(m1), h(j2), h(m2), h(j), h(m)).expect("valid arguments")
}

fn angular(s: &mut Suite) {
    let mut worst: f64 = 0.0;
    let mut nonzero_violations = 0;
    for j1 in 0i32..=6 {
        for j2 in 0..=6 {
            let js: Vec<i32> = ((j1 - j2).abs()..=j1 + j2).step_by(2).collect();
            for &ja in &js {
                for &jb in &js {
                    for m in (-ja.min(jb)..=ja.min(jb)).step_by(2) {
                        let mut sum = 0.0;
                        for m1 in (-j1..=j1).step_by(2) {
                            let m2 = m - m1;
                            if m2.abs() <= j2 {
                                sum += cg(j1, m1, j2, m2, ja, m).value::<f64>() * cg(j1, m1, j2, m2, jb, m).value::<f64>();
                            }
                        }
                        worst = worst.max((sum - if ja == jb { 1.0 } else { 0.0 }).abs());
                    }
                }
                for m1 in (-j1..=j1).step_by(2) {
                    for m2 in (-j2..=j2).step_by(2) {
                        for m in (-ja..=ja).step_by(2) {
                            if m != m1 + m2 && !cg(j1, m1, j2, m2, ja, m).is_zero() {
                                nonzero_violations += 1;
                            }
                        }
                    }
                }
            }
        }
    }
    s.check("CG orthonormality (j <= 3)", worst <= 1e-12, format!("max deviation {worst:.1e} (<= 1e-12)"));
    s.check("CG projection violations", nonzero_violations == 0, format!("{nonzero_violations} nonzero (0)"));

    let k = AtomicConstants::<f64>::rubidium87();
    let basis = build_interaction_basis(70, 2.0, &k).expect("basis");
    let ext = extend_with_logical(&basis, &k).expect("extended basis");
    let parts = assemble_static(&HamiltonianModel::new(ext.clone(), 10.0, FieldDrive::dc(0.18), 300.0, k.clone())).expect("assembly");
    let asym = parts.ddi.iter().filter(|&(i, j, v)| parts.ddi.get(j, i) != v).count();
    let cross = parts.ddi.iter().filter(|&(i, j, _)| ext.states[i].twice_m != ext.states[j].twice_m).count();
    s.check("DDI real symmetric", asym == 0, format!("{asym} asymmetric of {} entries", parts.ddi.nnz()));
    s.check("DDI Delta M block diagonal", cross == 0, format!("{cross} cross-sector entries"));
    let bra = (RydbergLevel::p32(70, 1), RydbergLevel::p32(70, 1));
    let ket = (RydbergLevel::s12(70, 1), RydbergLevel::s12(71, 1));
    let v10 = ddi_element(bra, ket, 10.0, &k).expect("ddi");
    let scaling = [3.0, 7.5, 20.0, 31.7]
        .iter()
        .map(|&r| ((ddi_element(bra, ket, r, &k).expect("ddi") - v10 * (10.0f64 / r).powi(3)) / v10).abs() * (r / 10.0f64).powi(3))
        .fold(0.0, f64::max);
    s.check("DDI R^-3 scaling", scaling <= 1e-12, format!("max relative error {scaling:.1e} (<= 1e-12)"));
}

fn radial(s: &mut Suite) {
    let k = AtomicConstants::<f64>::rubidium87();
    let h = 0.005;
    let mut worst: f64 = 0.0;
    for a in [RydbergLevel::s12(70, 1), RydbergLevel::s12(71, 1)] {
        for b in [RydbergLevel::p12(70, 1), RydbergLevel::p32(70, 1)] {
            let (na, nb) = (k.effective_n(&a).expect("n*"), k.effective_n(&b).expect("n*"));
            let edge = numerov::outer_edge(na.max(nb));
            let oracle = numerov::radial_integral(&numerov::solve(na, a.l, a.j(), edge, h), &numerov::solve(nb, b.l, b.j(), edge, h), h);
            let closed = radial_dipole(&a, &b, &k).expect("radial");
            worst = worst.max((closed.abs() - oracle.abs()).abs() / oracle.abs());
        }
    }
    s.check("radial integrals vs Numerov", worst < 0.01, format!("max relative deviation {worst:.2e} (< 1e-2)"));
}

fn sidebands(s: &mut Suite) {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut parseval: f64 = 0.0;
    for _ in 0..200 {
        let drive = FieldDrive::<f64>::new(rng.gen_range(0.0..0.25), rng.gen_range(0.0..0.1), rng.gen_range(10.0..100.0));
        let spec = sideband_amplitudes(rng.gen_range(-3000.0..3000.0), &drive, 60).expect("sidebands");
        parseval = parseval.max((spec.power_sum() - 1.0).abs());
    }
    s.check("Floquet Parseval", parseval <= 1e-10, format!("max |sum a_s^2 - 1| = {parseval:.1e} (<= 1e-10)"));
    let spec = sideband_amplitudes(-2000.0, &FieldDrive::<f64>::new(0.0, 0.1, 40.0), 9).expect("sidebands");
    let odd = spec.indices().filter(|s| s % 2 != 0).map(|s| spec.get(s).abs()).fold(0.0, f64::max);
    s.check("odd sidebands at F_S = 0", odd <= 1e-12, format!("max |a_odd| = {odd:.1e} (<= 1e-12)"));

    let (kappa, drive) = (-2067.3, FieldDrive::new(0.1805, 0.05, 50.0));
    let spec = sideband_amplitudes(kappa, &drive, 8).expect("sidebands");
    let n = 4096;
    let h = 1.0 / drive.nu / n as f64;
    let mean = drive.mean_square();
    let g = |t: f64| drive.field(t).powi(2) - mean;
    let (x, w) = (0.6f64.sqrt() / 2.0, [5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0]);
    let mut phase = Vec::with_capacity(n);
    let mut acc = 0.0;
    for j in 0..n {
        phase.push(-2.0 * PI * kappa * acc);
        let mid = (j as f64 + 0.5) * h;
        acc += h * (w[0] * g(mid - x * h) + w[1] * g(mid) + w[2] * g(mid + x * h));
    }
    let fourier = spec
        .indices()
        .map(|sb| {
            let c: Complex64 = (0..n)
                .map(|j| Complex64::from_polar(1.0, phase[j] + 2.0 * PI * drive.nu * j as f64 * h * sb as f64))
                .sum::<Complex64>()
                / n as f64;
            (c - spec.get(sb)).norm()
        })
        .fold(0.0, f64::max);
    s.check("a_s vs direct Fourier oracle", fourier <= 1e-8, format!("max deviation {fourier:.1e} (<= 1e-8)"));
}

fn propagation(s: &mut Suite) {
    let k = AtomicConstants::<f64>::rubidium87();
    let basis = build_interaction_basis(70, 2.0, &k).expect("basis");
    let r = basis.reference.expect("reference state");
    let model = HamiltonianModel::new(basis, 10.0, FieldDrive::new(0.17634, 0.05, 50.0), 300.0, k);
    let h = AssembledHamiltonian::new(&model).expect("hamiltonian");
    let mut y0 = vec![Complex64::new(0.0, 0.0); h.dim()];
    y0[r] = Complex64::new(1.0, 0.0);
    let cfg = IntegratorConfig::default();

    let traj = propagate(&h, &y0, 0.0, 1.3, &uniform_samples(0.0, 1.3, 650), &cfg).expect("propagation");
    let rise = traj.norms_squared().windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
    s.check("norm^2 non-increasing", rise <= 1e-9, format!("largest step increase {rise:.1e} (<= 1e-9)"));

    let mut parts = (*h.parts).clone();
    parts.gamma.iter_mut().for_each(|g| *g = 0.0);
    let lossless = AssembledHamiltonian { parts: Arc::new(parts), ..h.clone() };
    let traj = propagate(&lossless, &y0, 0.0, 1.3, &uniform_samples(0.0, 1.3, 130), &cfg).expect("propagation");
    let drift = traj.norms_squared().iter().map(|n| (n - 1.0).abs()).fold(0.0, f64::max);
    s.check("norm^2 conserved without decay", drift <= 1e-8, format!("max drift {drift:.1e} (<= 1e-8)"));

    let mut ok = true;
    let mut ratios = Vec::new();
    for rtol in [1e-8, 1e-10] {
        let run = |rtol: f64| {
            let cfg = IntegratorConfig { rtol, atol: rtol * 1e-2, ..cfg };
            propagate(&h, &y0, 0.0, 0.635, &[], &cfg).expect("propagation").last().to_vec()
        };
        let (a, b) = (run(rtol), run(rtol / 2.0));
        let change = a.iter().zip(&b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        ok &= change < 10.0 * rtol;
        ratios.push(format!("{:.1} rtol at rtol {rtol:.0e}", change / rtol));
    }
    s.check("self-convergence under rtol halving", ok, format!("{} (< 10 rtol)", ratios.join(", ")));
}

fn fidelity(s: &mut Suite) {
    let mut worst: f64 = 0.0;
    worst = worst.max((average_gate_fidelity(&CMatrix::<f64>::identity(8), 0.0).average - 1.0).abs());
    for phi in [PI, 0.75 * PI, 0.5 * PI, 0.25 * PI] {
        worst = worst.max((average_gate_fidelity(&ideal_gate(phi), phi).average - 1.0).abs());
    }
    s.check("identity / ideal gates", worst <= 1e-12, format!("max |F - 1| = {worst:.1e} (<= 1e-12)"));

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut random = |n: usize| -> Vec<Complex64> { (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect() };
    let u = CMatrix { rows: 8, cols: 8, data: random(64).into_iter().map(|z| z * 0.3).collect() };
    let phase_gap = (0..20)
        .map(|j| {
            let v = u.scale(Complex64::from_polar(1.0, 0.3 * j as f64));
            (average_gate_fidelity(&u, 1.0).average - average_gate_fidelity(&v, 1.0).average).abs()
        })
        .fold(0.0, f64::max);
    s.check("global-phase invariance", phase_gap <= 1e-12, format!("max change {phase_gap:.1e}"));

    let mut gap: f64 = 0.0;
    for _ in 0..500 {
        let r = random(8);
        let nr = r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let reference: Vec<Complex64> = r.iter().map(|z| z / nr).collect();
        let sim = random(8);
        let ns = sim.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() / 0.9;
        let sim: Vec<Complex64> = sim.iter().map(|z| z / ns).collect();
        let fast = single_state_fidelity(&sim, &reference).expect("fidelity");
        let general = density_matrix_fidelity(&sim, &reference).expect("fidelity");
        gap = gap.max((fast - general).abs());
    }
    s.check("pure-state shortcut vs general path", gap <= 1e-12, format!("max difference {gap:.1e} (<= 1e-12)"));
}

fn gate(s: &mut Suite) {
    let run = || -> Result<_, String> {
        let cfg = stored_config("fig4").map_err(|e| e.to_string())?;
        let setup = experiments::gate_setup(&cfg).map_err(|e| e.to_string())?;
        let engine = GateEngine::new(&setup).map_err(|e| e.to_string())?;
        engine.run(&setup, PI).map_err(|e| e.to_string())
    };
    let (a, b) = match (run(), run()) {
        (Ok(a), Ok(b)) => (a, b),
        (a, b) => return s.check("gate runs", false, format!("{:?} {:?}", a.err(), b.err())),
    };
    let exact = (0..LOGICAL_DIM).all(|y| a.propagator[(y, 0)] == Complex64::new(if y == 0 { 1.0 } else { 0.0 }, 0.0));
    s.check("|000> column is identity", exact, format!("{}", if exact { "exact" } else { "differs" }));
    let swap = |y: usize| match y {
        3 => 5,
        5 => 3,
        o => o,
    };
    let mirror = (0..LOGICAL_DIM).map(|y| (a.propagator[(y, 3)] - a.propagator[(swap(y), 5)]).norm()).fold(0.0, f64::max);
    s.check("|011> / |101> columns equivalent", mirror <= 1e-9, format!("max difference {mirror:.1e} (<= 1e-9)"));
    let same = a.propagator == b.propagator && a.loss == b.loss;
    s.check("reruns bit-identical", same, if same { "identical".into() } else { "differ".into() });
}
