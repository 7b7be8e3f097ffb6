//! Experiments bound to a [`RunConfig`]: each returns typed results plus the
//! files and summary lines that make up its output bundle.

use std::time::Instant;

use num_complex::Complex;
use rydgate::atomic_data::AtomicConstants;
use rydgate::collective_basis::build_interaction_basis;
use rydgate::dynamics::{first_return, propagate, transfer_fraction, uniform_samples, FirstReturn};
use rydgate::floquet::{refine_peak, resonance_scan, sideband_amplitudes, stark_map, ForsterDefect, ResonanceScan, StarkMap};
use rydgate::gate_engine::{
    compose_toffoli, logical_label, tune_waits, GateEngine, GateResult, GateSetup, PulseSchedule, ToffoliTrace,
    WaitTuning, WaitTuningOptions, LOGICAL_DIM,
};
use rydgate::hamiltonian::{AssembledHamiltonian, FieldDrive, HamiltonianModel};
use rydgate::ode::IntegratorConfig;
use rydgate::optimizer::{
    optimize, sensitivity_scan, AnnealingConfig, GateObjective, GateParameter, OptimizationProblem, OptimizationResult,
    SensitivityResult,
};
use rydgate::fidelity::FidelityReport;
use rydgate::Real;

use crate::config::{ConfigError, RunConfig};
use crate::RunError;

/// Files and summary of one experiment.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Bundle {
    pub files: Vec<(String, String)>,
    pub summary: Vec<String>,
}

impl Bundle {
    fn file(&mut self, name: &str, contents: String) {
        self.files.push((name.to_string(), contents));
    }

    fn line(&mut self, s: impl Into<String>) {
        self.summary.push(s.into());
    }
}

fn cfg_err(e: ConfigError) -> RunError {
    RunError::Config(e)
}

fn usage(msg: impl Into<String>) -> RunError {
    RunError::Config(ConfigError { line: 0, column: 0, message: msg.into() })
}

pub fn integrator(cfg: &RunConfig) -> Result<IntegratorConfig<Real>, RunError> {
    Ok(IntegratorConfig { rtol: cfg.number("rtol").map_err(cfg_err)?, atol: cfg.number("atol").map_err(cfg_err)?, ..Default::default() })
}

fn n_of(cfg: &RunConfig) -> Result<u32, RunError> {
    let n = cfg.integer("n").map_err(cfg_err)?;
    u32::try_from(n).map_err(|_| usage(format!("n = {n} out of range")))
}

/// Interaction-basis model (no ground states) for spectroscopy and Fig. 2-type runs.
pub fn interaction_model(cfg: &RunConfig) -> Result<HamiltonianModel<Real>, RunError> {
    let k = AtomicConstants::rubidium87();
    let basis = build_interaction_basis(n_of(cfg)?, cfg.number("window").map_err(cfg_err)?, &k)?;
    let drive = FieldDrive::new(
        cfg.number("F_S").map_err(cfg_err)?,
        cfg.number("F_RF").map_err(cfg_err)?,
        cfg.number("nu").map_err(cfg_err)?,
    );
    let mut m = HamiltonianModel::new(basis, cfg.number("R").map_err(cfg_err)?, drive, cfg.number("temperature").map_err(cfg_err)?, k);
    m.next_nearest = cfg.flag("next_nearest");
    Ok(m)
}

pub fn gate_setup(cfg: &RunConfig) -> Result<GateSetup<Real>, RunError> {
    let num = |k: &str| cfg.number(k).map_err(cfg_err);
    let drive = FieldDrive::new(num("F_S")?, num("F_RF")?, num("nu")?);
    let schedule = PulseSchedule::new(num("T_ex")?, num("T_wait1")?, num("T_RF")?, num("T_wait2")?, num("T_deex")?, drive);
    let dt = num("sample_dt")?;
    Ok(GateSetup {
        n: n_of(cfg)?,
        window_ghz: num("window")?,
        separation_um: num("R")?,
        temperature: num("temperature")?,
        next_nearest: cfg.flag("next_nearest"),
        schedule,
        integrator: integrator(cfg)?,
        sample_dt: (dt > 0.0).then_some(dt),
        laser_frame_field: None,
        constants: AtomicConstants::rubidium87(),
    })
}

fn header(cfg: &RunConfig, what: &str) -> String {
    format!("# rydgate {} {what}\n# experiment = {}\n", env!("CARGO_PKG_VERSION"), cfg.experiment())
}

// ---------------------------------------------------------------- stark-scan

pub struct ScanOutcome {
    pub scan: ResonanceScan<Real>,
    pub grid_step: Real,
    pub seconds: f64,
}

pub fn field_grid(cfg: &RunConfig) -> Result<Vec<Real>, RunError> {
    let (lo, hi, step) = (
        cfg.number("F_min").map_err(cfg_err)?,
        cfg.number("F_max").map_err(cfg_err)?,
        cfg.number("F_step").map_err(cfg_err)?,
    );
    if !(step > 0.0 && hi > lo) {
        return Err(usage("field grid needs F_max > F_min and F_step > 0"));
    }
    let count = ((hi - lo) / step).round() as usize;
    Ok((0..=count).map(|i| lo + step * i as Real).collect())
}

pub fn stark_scan(cfg: &RunConfig, out: &mut Bundle) -> Result<ScanOutcome, RunError> {
    let model = interaction_model(cfg)?;
    let grid = field_grid(cfg)?;
    let t_int = cfg.number("t_int").map_err(cfg_err)?;
    let clock = Instant::now();
    let scan = resonance_scan(&model, &grid, t_int, &integrator(cfg)?)?;
    let seconds = clock.elapsed().as_secs_f64();

    let role = |f: Real| -> (String, String) {
        for d in &scan.doublets {
            if d.lower.f_s == f {
                return (d.order.to_string(), "lower".into());
            }
            if d.upper.f_s == f {
                return (d.order.to_string(), "upper".into());
            }
        }
        match scan.peaks.iter().find(|p| p.f_s == f) {
            Some(_) => ("".into(), "peak".into()),
            None => ("".into(), "".into()),
        }
    };
    let mut csv = header(cfg, "resonance scan");
    csv.push_str(&format!("# t_int = {t_int} us, F_RF = {} V/cm, nu = {} MHz\n", model.drive.f_rf, model.drive.nu));
    csv.push_str("F_S_Vcm,rho,order,satellite\n");
    for (f, r) in scan.f_s.iter().zip(&scan.rho) {
        let (o, s) = role(*f);
        csv.push_str(&format!("{f:.6},{r:.10},{o},{s}\n"));
    }
    out.file("scan.csv", csv);
    out.line(format!("grid: {} points, {:.4}..{:.4} V/cm; {:.1} s", grid.len(), grid[0], grid[grid.len() - 1], seconds));
    out.line(format!("doublets: {}", scan.doublets.len()));
    for d in &scan.doublets {
        out.line(format!(
            "  s={:+} satellites {:.4} / {:.4} V/cm (rho {:.3} / {:.3}), center {:.5} V/cm, defect {:.2} MHz",
            d.order, d.lower.f_s, d.upper.f_s, d.lower.rho, d.upper.rho, d.center_f_s, d.center_detuning
        ));
    }
    for (s, p) in &scan.unpaired {
        out.line(format!("  unpaired peak order {s:+} at {:.4} V/cm (rho {:.3})", p.f_s, p.rho));
    }
    for (s, meas, pred) in scan.center_spacings() {
        out.line(format!("  spacing s={s:+}->{:+}: {meas:.5} V/cm, nu-equivalent {}", s + 1, pred.map_or("n/a".into(), |p| format!("{p:.5} V/cm"))));
    }
    Ok(ScanOutcome { scan, grid_step: cfg.number("F_step").map_err(cfg_err)?, seconds })
}

// --------------------------------------------------------------- floquet-map

pub fn floquet_map(cfg: &RunConfig, out: &mut Bundle) -> Result<StarkMap<Real>, RunError> {
    let model = interaction_model(cfg)?;
    let grid = field_grid(cfg)?;
    let s_range = (cfg.integer("s_min").map_err(cfg_err)? as i32, cfg.integer("s_max").map_err(cfg_err)? as i32);
    let map = stark_map(&model, &grid, s_range, true)?;
    let fin = *map.finals.first().ok_or_else(|| usage("transfer target missing from basis"))?;
    let nu = model.drive.nu;
    let mut csv = header(cfg, "Stark map with RF sidebands of the transfer target");
    let orders: Vec<i32> = (s_range.0..=s_range.1).collect();
    let cols: Vec<String> = orders.iter().map(|s| format!("final_s{s:+}_MHz")).collect();
    csv.push_str(&format!("F_S_Vcm,initial_MHz,{}\n", cols.join(",")));
    for (k, f) in map.f_s.iter().enumerate() {
        let e = &map.energies[k];
        let reps: Vec<String> = orders.iter().map(|s| format!("{:.6}", e[fin] + *s as Real * nu)).collect();
        csv.push_str(&format!("{f:.6},{:.6},{}\n", e[map.initial], reps.join(",")));
    }
    out.file("stark_map.csv", csv);

    let defect = ForsterDefect::from_model(&model)?;
    let spectrum = sideband_amplitudes(defect.delta_kappa, &model.drive, 4)?;
    let mut sb = header(cfg, "sideband amplitudes of the Förster defect");
    sb.push_str("s,amplitude\n");
    for s in spectrum.indices() {
        sb.push_str(&format!("{s},{:.12}\n", spectrum.get(s)));
    }
    out.file("sidebands.csv", sb);
    out.line(format!("defect at zero field {:.4} MHz, differential Stark coefficient {:.3} MHz/(V/cm)^2", defect.zero_field_mhz, defect.delta_kappa));
    for s in orders {
        let f: Vec<String> = map.crossing_fields(s).iter().map(|f| format!("{f:.5}")).collect();
        out.line(format!("crossings s={s:+}: [{}] V/cm", f.join(", ")));
    }
    out.line(format!("sideband power sum {:.12}", spectrum.power_sum()));
    Ok(map)
}

// ------------------------------------------------------------------ dynamics

pub struct DynamicsOutcome {
    pub f_s: Real,
    pub times: Vec<Real>,
    pub p_initial: Vec<Real>,
    pub first_return: Option<FirstReturn<Real>>,
    pub seconds: f64,
}

pub fn dynamics(cfg: &RunConfig, out: &mut Bundle) -> Result<DynamicsOutcome, RunError> {
    let mut model = interaction_model(cfg)?;
    let config = integrator(cfg)?;
    let clock = Instant::now();
    if cfg.flag("refine_field") {
        let hw = cfg.number("refine_halfwidth").map_err(cfg_err)?;
        let f = model.drive.f_s;
        let t_int = cfg.number("t_int").map_err(cfg_err)?;
        let peak = refine_peak(&model, f - hw, f + hw, t_int, 1e-6, &config)?;
        out.line(format!("refined F_S: {:.7} V/cm (transfer {:.4} after {t_int} us)", peak.f_s, peak.rho));
        model.drive.f_s = peak.f_s;
    }
    let h = AssembledHamiltonian::new(&model)?;
    let basis = &model.basis;
    let r = basis.reference.ok_or_else(|| usage("reference state missing"))?;
    let mut psi = vec![Complex::new(0.0, 0.0); basis.len()];
    psi[r] = Complex::new(1.0, 0.0);
    let t_total = cfg.number("t_total").map_err(cfg_err)?;
    let dt = cfg.number("sample_dt").map_err(cfg_err)?;
    let n = if dt > 0.0 { (t_total / dt).round().max(1.0) as usize } else { 1300 };
    let traj = propagate(&h, &psi, 0.0, t_total, &uniform_samples(0.0, t_total, n), &config)?;
    let seconds = clock.elapsed().as_secs_f64();
    let p = traj.population(r);
    let mut csv = header(cfg, "population dynamics from |RRR>");
    csv.push_str(&format!("# F_S = {} V/cm\n", model.drive.f_s));
    csv.push_str("t_us,p_RRR,transfer,norm2\n");
    for (k, t) in traj.times.iter().enumerate() {
        let a = &traj.amplitudes[k];
        let norm: Real = a.iter().map(|z| z.norm_sqr()).sum();
        csv.push_str(&format!("{t:.6},{:.10},{:.10},{:.10}\n", p[k], transfer_fraction(basis, a), norm));
    }
    out.file("dynamics.csv", csv);
    let fr = first_return(&traj.times, &p);
    match fr {
        Some(fr) => out.line(format!(
            "first minimum {:.4} at {:.3} us; return {:.4} at {:.3} us",
            fr.p_min, fr.t_min, fr.p_return, fr.t_return
        )),
        None => out.line("no complete oscillation within the window"),
    }
    out.line(format!("{} steps accepted, {:.2} s", traj.stats.accepted, seconds));
    Ok(DynamicsOutcome { f_s: model.drive.f_s, times: traj.times.clone(), p_initial: p, first_return: fr, seconds })
}

// ---------------------------------------------------------------- gate / fidelity

pub struct GateOutcome {
    pub setup: GateSetup<Real>,
    pub engine: GateEngine<Real>,
    pub result: GateResult<Real>,
    pub fidelity: FidelityReport<Real>,
    pub tuning: Option<WaitTuning<Real>>,
    pub toffoli: Vec<ToffoliTrace<Real>>,
}

fn propagator_csv(cfg: &RunConfig, r: &GateResult<Real>) -> String {
    let mut csv = header(cfg, "logical propagator, local phases removed in the corrected columns");
    csv.push_str("out,in,re,im,abs,arg,corrected_arg\n");
    let corr = r.corrected_propagator();
    for x in 0..LOGICAL_DIM {
        for y in 0..LOGICAL_DIM {
            let u = r.propagator[(y, x)];
            if u.norm() == 0.0 {
                continue;
            }
            csv.push_str(&format!(
                "{},{},{:.12},{:.12},{:.12},{:.12},{:.12}\n",
                logical_label(y),
                logical_label(x),
                u.re,
                u.im,
                u.norm(),
                u.arg(),
                corr[(y, x)].arg()
            ));
        }
    }
    csv
}

fn trajectories_csv(cfg: &RunConfig, engine: &GateEngine<Real>, r: &GateResult<Real>) -> Result<String, RunError> {
    let mut csv = header(cfg, "per-input populations and weighted phase");
    csv.push_str("input,t_us,p_logical,p_rydberg,weighted_phase,norm2\n");
    for x in 0..LOGICAL_DIM {
        let Some(traj) = &r.trajectories[x] else { continue };
        let sector = &engine.inputs[x];
        let phase = engine.weighted_phase(r, x)?.unwrap_or_default();
        for (k, t) in traj.times.iter().enumerate() {
            let a = &traj.amplitudes[k];
            let norm: Real = a.iter().map(|z| z.norm_sqr()).sum();
            csv.push_str(&format!(
                "{},{t:.6},{:.10},{:.10},{:.10},{:.10}\n",
                logical_label(x),
                a[sector.logical].norm_sqr(),
                a[sector.rydberg].norm_sqr(),
                phase.get(k).copied().unwrap_or(0.0),
                norm
            ));
        }
    }
    Ok(csv)
}

pub fn gate(cfg: &RunConfig, out: &mut Bundle) -> Result<GateOutcome, RunError> {
    let mut setup = gate_setup(cfg)?;
    let phi = cfg.number("phi").map_err(cfg_err)?;
    let engine = GateEngine::new(&setup)?;
    let mut tuning = None;
    if cfg.flag("tune_waits") {
        let t = tune_waits(&engine, &setup, phi, &WaitTuningOptions::default())?;
        out.line(format!(
            "tuned waits: T_wait1 = {:.3} ns, T_wait2 = {:.3} ns; residuals 111: {:.2e} rad, 011: {:.2e} rad ({} runs)",
            t.t_wait1 * 1e3,
            t.t_wait2 * 1e3,
            t.residual_111,
            t.residual_011,
            t.evaluations
        ));
        setup.schedule.t_wait1 = t.t_wait1;
        setup.schedule.t_wait2 = t.t_wait2;
        tuning = Some(t);
    }
    let result = engine.run(&setup, phi)?;
    let fidelity = result.fidelity();
    out.file("gate_report.txt", result.report());
    out.file("propagator.csv", propagator_csv(cfg, &result));
    let mut fcsv = header(cfg, "216-state fidelities");
    fcsv.push_str(&fidelity.csv());
    out.file("fidelity.csv", fcsv);
    if setup.sample_dt.is_some() {
        out.file("trajectories.csv", trajectories_csv(cfg, &engine, &result)?);
    }
    let toffoli = if cfg.flag("toffoli") {
        let traces = compose_toffoli(&result.corrected_propagator(), &(0..LOGICAL_DIM).collect::<Vec<_>>());
        let mut csv = header(cfg, "H_t U H_t populations per stage");
        let labels: Vec<String> = (0..LOGICAL_DIM).map(|y| format!("p{}", logical_label(y))).collect();
        csv.push_str(&format!("input,stage,{}\n", labels.join(",")));
        for tr in &traces {
            for (k, stage) in ["after_H", "after_CCZ", "after_H2"].iter().enumerate() {
                let p: Vec<String> = tr.stages[k].iter().map(|v| format!("{v:.10}")).collect();
                csv.push_str(&format!("{},{stage},{}\n", logical_label(tr.input), p.join(",")));
            }
        }
        out.file("toffoli.csv", csv);
        let t111 = &traces[7];
        out.line(format!("Toffoli |111> -> P(110) = {:.4}, P(111) = {:.4}", t111.output()[6], t111.output()[7]));
        traces
    } else {
        Vec::new()
    };
    let cond = result.conditional_phases();
    out.line(format!("phi_target = {phi:.6} rad, temperature = {} K", setup.temperature));
    out.line(format!(
        "conditional phases: 011 {:.4}, 101 {:.4}, 110 {:.4}, 111 {:.4} rad",
        cond[3], cond[5], cond[6], cond[7]
    ));
    out.line(format!("|U(111,111)|^2 = {:.4}", result.survival()[7]));
    out.line(format!(
        "average fidelity {:.5}; worst {:.5} for |{}>; computational-basis average {:.5}",
        fidelity.average, fidelity.worst.1, fidelity.worst.0, fidelity.computational_average
    ));
    Ok(GateOutcome { setup, engine, result, fidelity, tuning, toffoli })
}

// ------------------------------------------------------------------ optimize

pub struct OptimizeRow {
    pub phi: Real,
    pub best: Vec<Real>,
    pub fidelities: Vec<(Real, Real)>,
    pub result: OptimizationResult<Real>,
}

pub struct OptimizeOutcome {
    pub parameters: Vec<GateParameter>,
    pub rows: Vec<OptimizeRow>,
    pub seconds: f64,
}

fn parameters(cfg: &RunConfig) -> Result<Vec<GateParameter>, RunError> {
    cfg.words("parameters")
        .iter()
        .map(|w| GateParameter::parse(w).map_err(|_| usage(format!("unknown parameter `{w}`"))))
        .collect()
}

fn pick(list: &[Real], k: usize, key: &str) -> Result<Real, RunError> {
    match list.len() {
        1 => Ok(list[0]),
        _ => list.get(k).copied().ok_or_else(|| usage(format!("`{key}` has fewer entries than `phi`"))),
    }
}

pub fn run_optimize(cfg: &RunConfig, out: &mut Bundle) -> Result<OptimizeOutcome, RunError> {
    let params = parameters(cfg)?;
    let phis = cfg.list("phi").to_vec();
    let temps = cfg.list("evaluate_temperatures").to_vec();
    let clock = Instant::now();
    let mut rows = Vec::new();
    let names: Vec<String> = params.iter().map(|p| p.name().to_string()).collect();
    for (k, &phi) in phis.iter().enumerate() {
        let mut c = cfg.clone();
        for key in ["F_RF", "nu"] {
            let v = pick(cfg.list(key), k, key)?;
            c.set(key, &format!("{v} {}", if key == "nu" { "MHz" } else { "V/cm" })).map_err(cfg_err)?;
        }
        c.set("sample_dt", "0 ns").map_err(cfg_err)?;
        let base = gate_setup(&c)?;
        let objective = GateObjective::new(base, params.clone(), phi);
        let mut lower = Vec::new();
        let mut upper = Vec::new();
        for p in &params {
            let b = cfg.list(&format!("bounds.{}", p.name()));
            if b.len() != 2 {
                return Err(usage(format!("bounds.{} needs two values", p.name())));
            }
            lower.push(b[0]);
            upper.push(b[1]);
        }
        let mut problem = OptimizationProblem::new(names.clone(), objective.start(), lower, upper, cfg.integer("seed").map_err(cfg_err)? as u64);
        problem.budget = cfg.integer("budget").map_err(cfg_err)? as usize;
        problem.simplex_tolerance = cfg.number("simplex_tolerance").map_err(cfg_err)?;
        problem.annealing = AnnealingConfig {
            initial_temperature: cfg.number("anneal_t0").map_err(cfg_err)?,
            cooling: cfg.number("cooling").map_err(cfg_err)?,
            steps_per_temperature: cfg.integer("steps_per_temperature").map_err(cfg_err)? as usize,
            proposals: cfg.integer("proposals").map_err(cfg_err)? as usize,
            proposal_scale: cfg.number("proposal_scale").map_err(cfg_err)?,
        };
        let result = optimize(&problem, |x| objective.evaluate(x))?;
        let mut fidelities = Vec::new();
        for &t in &temps {
            let mut s = objective.setup_at(&result.best_x);
            s.temperature = t;
            let f = GateObjective::new(s, Vec::new(), phi).evaluate(&[])?;
            fidelities.push((t, f));
        }
        let mut log = header(cfg, &format!("evaluation log, phi = {phi}"));
        log.push_str(&result.log_csv(&names));
        out.file(&format!("optimize_log_{k}.csv"), log);
        let xs: Vec<String> = params.iter().zip(&result.best_x).map(|(p, v)| format!("{} = {v:.7} {}", p.name(), p.unit())).collect();
        let fs: Vec<String> = fidelities.iter().map(|(t, f)| format!("F({t} K) = {:.5}", f)).collect();
        out.line(format!(
            "phi = {:.4} pi: {}; {}; {} evaluations{}",
            phi / std::f64::consts::PI,
            xs.join(", "),
            fs.join(", "),
            result.log.len(),
            if result.budget_exhausted { " (budget exhausted)" } else { "" }
        ));
        rows.push(OptimizeRow { phi, best: result.best_x.clone(), fidelities, result });
    }
    let seconds = clock.elapsed().as_secs_f64();
    let mut csv = header(cfg, "optimized working points");
    let tcols: Vec<String> = temps.iter().map(|t| format!("F_{t}K")).collect();
    let pcols: Vec<String> = params.iter().map(|p| format!("{}_{}", p.name(), p.unit().replace('/', "per"))).collect();
    csv.push_str(&format!("phi_rad,{},{}\n", pcols.join(","), tcols.join(",")));
    for r in &rows {
        let xs: Vec<String> = r.best.iter().map(|v| format!("{v:.9}")).collect();
        let fs: Vec<String> = r.fidelities.iter().map(|(_, f)| format!("{f:.8}")).collect();
        csv.push_str(&format!("{:.9},{},{}\n", r.phi, xs.join(","), fs.join(",")));
    }
    out.file("optimize.csv", csv);
    out.line(format!("total {:.1} s", seconds));
    Ok(OptimizeOutcome { parameters: params, rows, seconds })
}

// --------------------------------------------------------------- sensitivity

pub struct SensitivityOutcome {
    pub rows: Vec<(GateParameter, SensitivityResult<Real>)>,
    pub working_fidelity: Real,
}

pub fn sensitivity(cfg: &RunConfig, out: &mut Bundle) -> Result<SensitivityOutcome, RunError> {
    let params = parameters(cfg)?;
    let phi = cfg.number("phi").map_err(cfg_err)?;
    let budget = cfg.number("fidelity_budget").map_err(cfg_err)?;
    let tol = cfg.number("sensitivity_tolerance").map_err(cfg_err)?;
    let mut base = gate_setup(cfg)?;
    base.sample_dt = None;
    let mut rows = Vec::new();
    let mut working = Real::NAN;
    let mut csv = header(cfg, &format!("half-widths for a fidelity drop of {budget}"));
    csv.push_str("parameter,unit,minus,plus,half_width,warning\n");
    for p in params {
        let objective = GateObjective::new(base.clone(), vec![p], phi);
        let x0 = objective.start()[0];
        let step = cfg.number(&format!("step.{}", p.name())).map_err(cfg_err)?;
        let r = sensitivity_scan(|d| objective.evaluate(&[x0 + d]), step, budget, tol)?;
        working = objective.evaluate(&[x0])?;
        csv.push_str(&format!(
            "{},{},{:.6e},{:.6e},{:.6e},{}\n",
            p.name(),
            p.unit(),
            r.minus,
            r.plus,
            r.half_width,
            r.warning.clone().unwrap_or_default()
        ));
        out.line(format!(
            "{}: half-width {:.3e} {} (-{:.3e} / +{:.3e}){}",
            p.name(),
            r.half_width,
            p.unit(),
            r.minus,
            r.plus,
            r.warning.as_ref().map_or(String::new(), |w| format!("; warning: {w}"))
        ));
        rows.push((p, r));
    }
    out.file("sensitivity.csv", csv);
    out.line(format!("working-point fidelity {working:.5}"));
    Ok(SensitivityOutcome { rows, working_fidelity: working })
}
