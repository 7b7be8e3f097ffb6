//! The three-step CCΦ protocol: laser excitation of every `|1>`, wait / RF /
//! wait, and deexcitation, propagated over the extended basis for each of
//! the eight logical inputs.
//!
//! Logical labels read `|c1 c2 t>` with index `4 c1 + 2 c2 + t`. In the chain
//! the target sits in the middle: physical atoms are `(c1, t, c2)`.

use std::sync::Arc;

use num_complex::Complex;
use rayon::prelude::*;

use crate::atomic_data::AtomicConstants;
use crate::collective_basis::{build_interaction_basis, extend_with_logical, AtomState, BasisSet, Label, ATOMS};
use crate::dynamics::{norm_squared, propagate, uniform_samples, weighted_phase_series, Trajectory};
use crate::error::{Error, Result};
use crate::fidelity::{average_gate_fidelity, FidelityReport};
use crate::hamiltonian::{assemble_static, AssembledHamiltonian, FieldDrive, HamiltonianModel, LaserCoupling, StaticParts};
use crate::linalg::CMatrix;
use crate::ode::IntegratorConfig;
use crate::optimizer::{nelder_mead, NelderMeadConfig};
use crate::scalar::{c, Scalar};

pub const LOGICAL_DIM: usize = 8;

/// Physical ground-state bits `(c1, t, c2)` of logical index `x`.
pub fn physical_bits(x: usize) -> [u8; ATOMS] {
    let (c1, c2, t) = ((x >> 2 & 1) as u8, (x >> 1 & 1) as u8, (x & 1) as u8);
    [c1, t, c2]
}

pub fn logical_label(x: usize) -> String {
    format!("{}{}{}", x >> 2 & 1, x >> 1 & 1, x & 1)
}

fn logical_atoms(x: usize) -> Label {
    physical_bits(x).map(AtomState::Ground)
}

/// Timing of the protocol; durations in µs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSchedule<T> {
    pub t_ex: T,
    pub t_wait1: T,
    pub t_rf: T,
    pub t_wait2: T,
    pub t_deex: T,
    /// DC field throughout, RF only inside the RF window.
    pub drive: FieldDrive<T>,
    pub ex_phase: T,
    pub deex_phase: T,
}

impl<T: Scalar> PulseSchedule<T> {
    pub fn new(t_ex: T, t_wait1: T, t_rf: T, t_wait2: T, t_deex: T, drive: FieldDrive<T>) -> Self {
        Self { t_ex, t_wait1, t_rf, t_wait2, t_deex, drive, ex_phase: T::zero(), deex_phase: T::PI() }
    }

    pub fn validate(&self) -> Result<()> {
        self.drive.validate()?;
        let all = [self.t_ex, self.t_wait1, self.t_rf, self.t_wait2, self.t_deex];
        if all.iter().any(|t| !(*t >= T::zero())) {
            return Err(Error::ScheduleInconsistent(format!("negative or NaN duration in {all:?}")));
        }
        if !(self.t_ex > T::zero()) || !(self.t_deex > T::zero()) {
            return Err(Error::ScheduleInconsistent("excitation and deexcitation need positive durations".into()));
        }
        Ok(())
    }

    /// Segment boundaries `[0, ex, wait1, rf, wait2, deex]`.
    pub fn boundaries(&self) -> [T; 6] {
        let mut b = [T::zero(); 6];
        for (i, d) in [self.t_ex, self.t_wait1, self.t_rf, self.t_wait2, self.t_deex].into_iter().enumerate() {
            b[i + 1] = b[i] + d;
        }
        b
    }

    pub fn total(&self) -> T {
        self.boundaries()[5]
    }

    /// Electric field at time `t`; RF phase is zero at switch-on.
    pub fn field(&self, t: T) -> T {
        let b = self.boundaries();
        if t >= b[2] && t <= b[3] && self.t_rf > T::zero() {
            self.rf_drive().field(t)
        } else {
            self.drive.f_s
        }
    }

    fn rf_drive(&self) -> FieldDrive<T> {
        let start = self.boundaries()[2];
        FieldDrive { rf_phase: self.drive.rf_phase - T::TAU() * self.drive.nu * start, ..self.drive }
    }

    /// `(t0, t1, drive, laser)` per non-empty segment.
    fn segments(&self) -> Vec<(T, T, FieldDrive<T>, Option<LaserCoupling<T>>)> {
        let b = self.boundaries();
        let dc = self.drive.without_rf();
        let rf = if self.drive.f_rf > T::zero() { self.rf_drive() } else { dc };
        let specs = [
            (dc, Some(LaserCoupling::pi_pulse(self.t_ex, self.ex_phase))),
            (dc, None),
            (rf, None),
            (dc, None),
            (dc, Some(LaserCoupling::pi_pulse(self.t_deex, self.deex_phase))),
        ];
        specs
            .into_iter()
            .enumerate()
            .filter(|(i, _)| b[i + 1] > b[*i])
            .map(|(i, (d, l))| (b[i], b[i + 1], d, l))
            .collect()
    }
}

/// Physical register and numerical settings shared by gate runs.
#[derive(Debug, Clone, PartialEq)]
pub struct GateSetup<T> {
    pub n: u32,
    pub window_ghz: T,
    pub separation_um: T,
    pub temperature: T,
    pub next_nearest: bool,
    pub schedule: PulseSchedule<T>,
    pub integrator: IntegratorConfig<T>,
    /// Trajectory sampling interval, µs; `None` records segment ends only.
    pub sample_dt: Option<T>,
    /// Field at which the lasers are resonant; `None` follows `F_S`.
    pub laser_frame_field: Option<T>,
    pub constants: AtomicConstants<T>,
}

impl<T: Scalar> GateSetup<T> {
    pub fn laser_field(&self) -> T {
        self.laser_frame_field.unwrap_or(self.schedule.drive.f_s)
    }

    /// R = 10 µm, 300 K, 20 ns for excitation, waits and deexcitation.
    pub fn ccz_defaults(f_s: T, f_rf: T, nu: T, t_rf: T) -> Self {
        let d = c::<T>(0.02);
        Self {
            n: 70,
            window_ghz: c(2.0),
            separation_um: c(10.0),
            temperature: c(300.0),
            next_nearest: true,
            schedule: PulseSchedule::new(d, d, t_rf, d, d, FieldDrive::new(f_s, f_rf, nu)),
            integrator: IntegratorConfig::default(),
            sample_dt: None,
            laser_frame_field: None,
            constants: AtomicConstants::rubidium87(),
        }
    }
}

/// Per-input static Hamiltonians for one register geometry and laser frame.
#[derive(Debug, Clone)]
pub struct GateEngine<T> {
    pub extended: BasisSet<T>,
    pub inputs: Vec<InputSector<T>>,
    key: (T, T, T, bool),
}

#[derive(Debug, Clone)]
pub struct InputSector<T> {
    pub basis: BasisSet<T>,
    pub parts: Option<Arc<StaticParts<T>>>,
    /// Position of the logical input in `basis`.
    pub logical: usize,
    /// Position of the state with every `|1>` promoted to the laser level.
    pub rydberg: usize,
}

impl<T: Scalar> GateEngine<T> {
    pub fn new(setup: &GateSetup<T>) -> Result<Self> {
        let k = &setup.constants;
        let interaction = build_interaction_basis(setup.n, setup.window_ghz, k)?;
        let extended = extend_with_logical(&interaction, k)?;
        let r = AtomState::Rydberg(extended.reference_level);
        let inputs = (0..LOGICAL_DIM)
            .map(|x| {
                let bits = physical_bits(x);
                let basis = extended.restrict(|s| {
                    (0..ATOMS).all(|a| (bits[a] == 0) == (s.atoms[a] == AtomState::Ground(0)))
                });
                let parts = if bits.iter().any(|&b| b == 1) {
                    let mut model = HamiltonianModel::new(
                        basis.clone(),
                        setup.separation_um,
                        setup.schedule.drive.without_rf(),
                        setup.temperature,
                        k.clone(),
                    );
                    model.next_nearest = setup.next_nearest;
                    model.laser_frame_field = Some(setup.laser_field());
                    Some(Arc::new(assemble_static(&model)?))
                } else {
                    None
                };
                let logical = basis.position(&logical_atoms(x)).expect("logical state in its sector");
                let excited = bits.map(|b| if b == 1 { r } else { AtomState::Ground(0) });
                let rydberg = basis.position(&excited).unwrap_or(logical);
                Ok(InputSector { basis, parts, logical, rydberg })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { extended, inputs, key: Self::key_of(setup) })
    }

    fn key_of(setup: &GateSetup<T>) -> (T, T, T, bool) {
        (setup.separation_um, setup.temperature, setup.laser_field(), setup.next_nearest)
    }

    /// Whether this engine was built for the geometry, temperature and laser frame of `setup`.
    pub fn matches(&self, setup: &GateSetup<T>) -> bool {
        self.key == Self::key_of(setup) && self.extended.n == setup.n && self.extended.window_ghz == setup.window_ghz
    }

    /// Runs all eight inputs.
    pub fn run(&self, setup: &GateSetup<T>, phi_target: T) -> Result<GateResult<T>> {
        self.run_inputs(setup, phi_target, &[true; LOGICAL_DIM])
    }

    /// Runs the selected inputs; skipped columns are left zero.
    pub fn run_inputs(&self, setup: &GateSetup<T>, phi_target: T, which: &[bool; LOGICAL_DIM]) -> Result<GateResult<T>> {
        if !self.matches(setup) {
            return Err(Error::ScheduleInconsistent("engine built for a different register or laser frame".into()));
        }
        if !(phi_target > -T::PI() && phi_target <= T::PI()) {
            return Err(Error::ScheduleInconsistent(format!("phi_target {phi_target} outside (-pi, pi]")));
        }
        let schedule = &setup.schedule;
        schedule.validate()?;
        let runs: Vec<Option<Trajectory<T>>> = (0..LOGICAL_DIM)
            .into_par_iter()
            .map(|x| {
                if !which[x] {
                    return Ok(None);
                }
                self.propagate_input(x, setup).map(Some)
            })
            .collect::<Result<_>>()?;
        let mut propagator = CMatrix::zeros(LOGICAL_DIM, LOGICAL_DIM);
        let mut loss = [T::zero(); LOGICAL_DIM];
        let mut leakage = [T::zero(); LOGICAL_DIM];
        for (x, run) in runs.iter().enumerate() {
            let Some(traj) = run else { continue };
            let sector = &self.inputs[x];
            let end = traj.last();
            let mut logical_pop = T::zero();
            for y in 0..LOGICAL_DIM {
                if let Some(p) = sector.basis.position(&logical_atoms(y)) {
                    propagator[(y, x)] = end[p];
                    logical_pop += end[p].norm_sqr();
                }
            }
            let norm = norm_squared(end);
            loss[x] = T::one() - norm;
            leakage[x] = norm - logical_pop;
        }
        Ok(GateResult {
            propagator,
            trajectories: runs,
            loss,
            leakage,
            phi_target,
            temperature: setup.temperature,
            schedule: *schedule,
        })
    }

    fn propagate_input(&self, x: usize, setup: &GateSetup<T>) -> Result<Trajectory<T>> {
        let sector = &self.inputs[x];
        let schedule = &setup.schedule;
        let dim = sector.basis.len();
        let mut psi = vec![Complex::new(T::zero(), T::zero()); dim];
        psi[sector.logical] = Complex::new(T::one(), T::zero());
        let Some(parts) = &sector.parts else {
            // |000> carries no energy, coupling or decay: it is left exactly alone.
            let mut times = vec![T::zero()];
            let mut amplitudes = vec![psi.clone()];
            for (_, t1, _, _) in schedule.segments() {
                times.push(t1);
                amplitudes.push(psi.clone());
            }
            return Ok(Trajectory { times, amplitudes, markers: schedule.boundaries().to_vec(), stats: Default::default() });
        };
        let base = AssembledHamiltonian { parts: parts.clone(), drive: schedule.drive.without_rf(), laser: None };
        let mut out: Option<Trajectory<T>> = None;
        for (t0, t1, drive, laser) in schedule.segments() {
            let h = base.with_drive(drive).with_laser(laser);
            let samples = match setup.sample_dt {
                Some(dt) if dt > T::zero() => {
                    let k = ((t1 - t0) / dt).ceil().to_usize().unwrap_or(1).max(1);
                    uniform_samples(t0, t1, k)
                }
                _ => Vec::new(),
            };
            let traj = propagate(&h, &psi, t0, t1, &samples, &setup.integrator)?;
            psi = traj.last().to_vec();
            match &mut out {
                None => out = Some(traj),
                Some(acc) => acc.extend(traj),
            }
        }
        let mut traj = out.expect("schedule has excitation and deexcitation segments");
        traj.markers = schedule.boundaries().to_vec();
        traj.markers.dedup();
        Ok(traj)
    }

    /// Weighted phase of input `x` against its fully excited partner.
    pub fn weighted_phase(&self, result: &GateResult<T>, x: usize) -> Result<Option<Vec<T>>> {
        let Some(traj) = &result.trajectories[x] else { return Ok(None) };
        let s = &self.inputs[x];
        weighted_phase_series(traj, s.logical, s.rydberg).map(Some)
    }
}

/// Runs the protocol once, building the engine on the fly.
pub fn run_gate<T: Scalar>(setup: &GateSetup<T>, phi_target: T) -> Result<GateResult<T>> {
    GateEngine::new(setup)?.run(setup, phi_target)
}

#[derive(Debug, Clone)]
pub struct GateResult<T> {
    /// `U[out, in]` on the logical states.
    pub propagator: CMatrix<T>,
    pub trajectories: Vec<Option<Trajectory<T>>>,
    /// Decayed population per input.
    pub loss: [T; LOGICAL_DIM],
    /// Surviving population outside the logical states per input.
    pub leakage: [T; LOGICAL_DIM],
    pub phi_target: T,
    pub temperature: T,
    pub schedule: PulseSchedule<T>,
}

impl<T: Scalar> GateResult<T> {
    /// Single-qubit phases `θ_q = arg U[e_q] - arg U[000]` for `(c1, c2, t)`.
    pub fn local_phases(&self) -> [T; 3] {
        let u = &self.propagator;
        let base = u[(0, 0)].arg();
        [4, 2, 1].map(|x| wrap_phase(u[(x, x)].arg() - base))
    }

    /// Propagator with the single-qubit Z rotations removed (virtual-Z frame
    /// update after the gate), so that only conditional phases remain.
    pub fn corrected_propagator(&self) -> CMatrix<T> {
        let theta = self.local_phases();
        let mut u = self.propagator.clone();
        for y in 0..LOGICAL_DIM {
            let phase: T = [4, 2, 1].iter().zip(&theta).filter(|(b, _)| y & **b != 0).map(|(_, t)| *t).sum();
            let rot = Complex::from_polar(T::one(), -phase);
            for x in 0..LOGICAL_DIM {
                u[(y, x)] = u[(y, x)] * rot;
            }
        }
        u
    }

    /// Conditional phases `arg U'[x] - arg U'[000]` in the corrected frame.
    pub fn conditional_phases(&self) -> [T; LOGICAL_DIM] {
        let u = self.corrected_propagator();
        let base = u[(0, 0)].arg();
        std::array::from_fn(|x| wrap_phase(u[(x, x)].arg() - base))
    }

    /// 216-state fidelity of the corrected propagator against `CCΦ(φ_target)`.
    pub fn fidelity(&self) -> FidelityReport<T> {
        let mut r = average_gate_fidelity(&self.corrected_propagator(), self.phi_target);
        r.temperature = Some(self.temperature);
        r
    }

    /// `|U[x, x]|^2` for every input.
    pub fn survival(&self) -> [T; LOGICAL_DIM] {
        std::array::from_fn(|x| self.propagator[(x, x)].norm_sqr())
    }

    /// Plain-text report: propagator magnitudes and phases, loss, timings.
    pub fn report(&self) -> String {
        let u = &self.propagator;
        let cond = self.conditional_phases();
        let local = self.local_phases();
        let s = &self.schedule;
        let mut out = String::new();
        out.push_str(&format!(
            "# schedule: T_ex={} T_wait1={} T_RF={} T_wait2={} T_deex={} us; F_S={} F_RF={} V/cm; nu={} MHz\n",
            s.t_ex, s.t_wait1, s.t_rf, s.t_wait2, s.t_deex, s.drive.f_s, s.drive.f_rf, s.drive.nu
        ));
        out.push_str(&format!("# phi_target={} temperature={} K\n", self.phi_target, self.temperature));
        out.push_str(&format!("# local phases (c1, c2, t): {:.6} {:.6} {:.6} rad\n", local[0], local[1], local[2]));
        out.push_str("input\t|U|\targ U\tconditional\tloss\tleakage\n");
        for x in 0..LOGICAL_DIM {
            out.push_str(&format!(
                "{}\t{:.8}\t{:.6}\t{:.6}\t{:.3e}\t{:.3e}\n",
                logical_label(x),
                u[(x, x)].norm(),
                u[(x, x)].arg(),
                cond[x],
                self.loss[x],
                self.leakage[x]
            ));
        }
        out
    }
}

/// Maps an angle into `(-π, π]`.
pub fn wrap_phase<T: Scalar>(a: T) -> T {
    let tau = T::TAU();
    let mut r = a - tau * (a / tau).round();
    if r <= -T::PI() {
        r += tau;
    }
    r
}

/// Populations of one Toffoli run: after the first Hadamard on the target,
/// after the CCZ propagator, after the second Hadamard.
#[derive(Debug, Clone, PartialEq)]
pub struct ToffoliTrace<T> {
    pub input: usize,
    pub stages: [[T; LOGICAL_DIM]; 3],
}

impl<T: Scalar> ToffoliTrace<T> {
    pub fn output(&self) -> &[T; LOGICAL_DIM] {
        &self.stages[2]
    }
}

/// `H_t U H_t` on the given logical inputs, with ideal Hadamards on the target.
pub fn compose_toffoli<T: Scalar>(propagator: &CMatrix<T>, inputs: &[usize]) -> Vec<ToffoliTrace<T>> {
    let h = |v: &[Complex<T>]| -> Vec<Complex<T>> {
        let s = c::<T>(std::f64::consts::FRAC_1_SQRT_2);
        let mut out = v.to_vec();
        for x in (0..LOGICAL_DIM).step_by(2) {
            out[x] = (v[x] + v[x + 1]) * s;
            out[x + 1] = (v[x] - v[x + 1]) * s;
        }
        out
    };
    let pops = |v: &[Complex<T>]| std::array::from_fn(|i| v[i].norm_sqr());
    inputs
        .iter()
        .map(|&x| {
            let mut v = vec![Complex::new(T::zero(), T::zero()); LOGICAL_DIM];
            v[x] = Complex::new(T::one(), T::zero());
            let a = h(&v);
            let b = propagator.matvec(&a);
            let d = h(&b);
            ToffoliTrace { input: x, stages: [pops(&a), pops(&b), pops(&d)] }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaitTuningOptions<T> {
    /// Bounds on each wait, µs.
    pub bounds: (T, T),
    pub max_evaluations: usize,
    /// Largest acceptable `|Δφ(111) - φ| + |Δφ(011)|`, rad.
    pub max_residual: T,
}

impl<T: Scalar> Default for WaitTuningOptions<T> {
    fn default() -> Self {
        Self { bounds: (T::zero(), c(0.2)), max_evaluations: 80, max_residual: c(0.1) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaitTuning<T> {
    pub t_wait1: T,
    pub t_wait2: T,
    /// `Δφ(111) - φ_target`, wrapped.
    pub residual_111: T,
    /// `Δφ(011)`, wrapped.
    pub residual_011: T,
    pub evaluations: usize,
}

const TUNING_INPUTS: [bool; LOGICAL_DIM] = [true, true, true, true, true, false, false, true];

/// Conditional-phase errors `(Δφ(111) - φ, Δφ(011))` of a run.
pub fn phase_errors<T: Scalar>(result: &GateResult<T>, phi_target: T) -> (T, T) {
    let cond = result.conditional_phases();
    (wrap_phase(cond[7] - phi_target), cond[3])
}

/// Chooses both waits so that `|Δφ(111) - φ| + |Δφ(011)|` is minimal, by a
/// bounded simplex search in the wait plane started from the template.
pub fn tune_waits<T: Scalar>(
    engine: &GateEngine<T>,
    setup: &GateSetup<T>,
    phi_target: T,
    options: &WaitTuningOptions<T>,
) -> Result<WaitTuning<T>> {
    let (lo, hi) = options.bounds;
    if !(lo >= T::zero() && hi > lo) {
        return Err(Error::ScheduleInconsistent(format!("wait bounds ({lo}, {hi})")));
    }
    let eval = |w: &[T]| -> Result<(T, T)> {
        let mut s = setup.clone();
        s.schedule.t_wait1 = w[0];
        s.schedule.t_wait2 = w[1];
        s.sample_dt = None;
        let r = engine.run_inputs(&s, phi_target, &TUNING_INPUTS)?;
        Ok(phase_errors(&r, phi_target))
    };
    let start = [setup.schedule.t_wait1.max(lo).min(hi), setup.schedule.t_wait2.max(lo).min(hi)];
    let step = (hi - lo) * c(0.05);
    let cfg = NelderMeadConfig {
        initial_step: vec![step, step],
        lower: vec![lo, lo],
        upper: vec![hi, hi],
        tol_diameter: c(1e-5),
        max_evaluations: options.max_evaluations,
    };
    let nm = nelder_mead(|w: &[T]| eval(w).map(|(a, b)| a.abs() + b.abs()), &start, &cfg)?;
    let (r111, r011) = eval(&nm.best_x)?;
    let residual = r111.abs() + r011.abs();
    if residual > options.max_residual {
        return Err(Error::NoSolutionInBounds { residual: residual.as_f64() });
    }
    Ok(WaitTuning {
        t_wait1: nm.best_x[0],
        t_wait2: nm.best_x[1],
        residual_111: r111,
        residual_011: r011,
        evaluations: nm.evaluations + 1,
    })
}
