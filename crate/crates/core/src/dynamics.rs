//! Propagation of amplitude vectors and the observables read off them.

use num_complex::Complex;

use crate::atomic_data::RydbergLevel;
use crate::collective_basis::{AtomState, BasisSet};
use crate::error::{Error, Result};
use crate::hamiltonian::AssembledHamiltonian;
use crate::ode::{integrate, IntegratorConfig, IntegratorStats};
use crate::scalar::{c, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub times: Vec<T>,
    pub amplitudes: Vec<Vec<Complex<T>>>,
    /// Segment boundaries, µs.
    pub markers: Vec<T>,
    pub stats: IntegratorStats,
}

impl<T: Scalar> Trajectory<T> {
    pub fn last(&self) -> &[Complex<T>] {
        self.amplitudes.last().map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn norms_squared(&self) -> Vec<T> {
        self.amplitudes.iter().map(|a| norm_squared(a)).collect()
    }

    pub fn population(&self, state: usize) -> Vec<T> {
        self.amplitudes.iter().map(|a| a[state].norm_sqr()).collect()
    }

    /// Appends a later trajectory, dropping its duplicated first sample.
    pub fn extend(&mut self, next: Trajectory<T>) {
        let skip = usize::from(matches!((self.times.last(), next.times.first()), (Some(a), Some(b)) if a == b));
        self.times.extend(next.times.into_iter().skip(skip));
        self.amplitudes.extend(next.amplitudes.into_iter().skip(skip));
        self.markers.extend(next.markers);
        self.stats += next.stats;
    }
}

pub fn norm_squared<T: Scalar>(a: &[Complex<T>]) -> T {
    a.iter().map(|x| x.norm_sqr()).sum()
}

/// `n` equally spaced sample times in `(t0, t1]`.
pub fn uniform_samples<T: Scalar>(t0: T, t1: T, n: usize) -> Vec<T> {
    let dt = (t1 - t0) / c(n as f64);
    (1..=n).map(|k| if k == n { t1 } else { t0 + dt * c(k as f64) }).collect()
}

/// Propagates `initial` from `t0` to `t1`, recording `t0`, every sample time
/// inside `(t0, t1)` and `t1`. With an RF drive the step is capped at
/// `1/(20 ν)`.
pub fn propagate<T: Scalar>(
    hamiltonian: &AssembledHamiltonian<T>,
    initial: &[Complex<T>],
    t0: T,
    t1: T,
    samples: &[T],
    config: &IntegratorConfig<T>,
) -> Result<Trajectory<T>> {
    if initial.len() != hamiltonian.dim() {
        return Err(Error::DimensionMismatch { expected: hamiltonian.dim(), got: initial.len() });
    }
    let n0 = norm_squared(initial);
    if n0 > T::one() + c(1e-12) {
        return Err(Error::InvalidPropagation(format!("initial norm^2 {n0} exceeds 1")));
    }
    let mut cfg = *config;
    let drive = hamiltonian.drive;
    if drive.f_rf > T::zero() {
        let cap = (c::<T>(20.0) * drive.nu).recip();
        cfg.max_step = Some(cfg.max_step.map_or(cap, |m| m.min(cap)));
    }
    let mut stops: Vec<T> = samples.iter().copied().filter(|&t| t > t0 && t < t1).collect();
    stops.push(t1);
    let mut times = vec![t0];
    let mut amplitudes = vec![initial.to_vec()];
    let mut y = initial.to_vec();
    let stats = integrate(hamiltonian, &mut y, t0, t1, &stops, &cfg, |t, y| {
        times.push(t);
        amplitudes.push(y.to_vec());
    })?;
    Ok(Trajectory { times, amplitudes, markers: vec![t0, t1], stats })
}

/// First minimum of a population curve and the following maximum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstReturn<T> {
    pub t_min: T,
    pub p_min: T,
    pub t_return: T,
    pub p_return: T,
}

/// First dip of a Rabi-like curve and the maximum that follows it, located
/// between crossings of the midpoint level so that micromotion ripples are
/// ignored. `t_return` estimates the oscillation period.
pub fn first_return<T: Scalar>(times: &[T], pop: &[T]) -> Option<FirstReturn<T>> {
    let n = pop.len().min(times.len());
    if n < 3 {
        return None;
    }
    let lowest = pop[..n].iter().copied().fold(T::infinity(), T::min);
    let mid = (pop[0] + lowest) * c(0.5);
    let down = (0..n).find(|&i| pop[i] < mid)?;
    let up = (down..n).find(|&i| pop[i] > mid)?;
    let next = (up..n).find(|&i| pop[i] < mid).unwrap_or(n);
    let arg = |r: std::ops::Range<usize>, better: fn(T, T) -> bool| {
        r.clone().fold(r.start, |b, i| if better(pop[i], pop[b]) { i } else { b })
    };
    let imin = arg(down..up, |a, b| a < b);
    let imax = arg(up..next, |a, b| a > b);
    Some(FirstReturn { t_min: times[imin], p_min: pop[imin], t_return: times[imax], p_return: pop[imax] })
}

/// Expected number of atoms in `(n+1)S_{1/2}`.
pub fn transfer_fraction<T: Scalar>(basis: &BasisSet<T>, amplitudes: &[Complex<T>]) -> T {
    let target = basis.n + 1;
    let is_target = |a: &AtomState| matches!(a, AtomState::Rydberg(RydbergLevel { n, l: 0, .. }) if *n == target);
    basis
        .states
        .iter()
        .zip(amplitudes)
        .map(|(s, a)| a.norm_sqr() * c(s.atoms.iter().filter(|x| is_target(x)).count() as f64))
        .sum()
}

/// Population-weighted phase of a logical amplitude and its Rydberg partner.
pub fn weighted_phase<T: Scalar>(a_l: Complex<T>, a_r: Complex<T>) -> Result<T> {
    combine(a_l.norm_sqr(), a_l.arg(), a_r.norm_sqr(), a_r.arg())
}

fn combine<T: Scalar>(pl: T, phl: T, pr: T, phr: T) -> Result<T> {
    let w = pl + pr;
    if w == T::zero() {
        return Err(Error::BothAmplitudesZero);
    }
    Ok((pr * phr + pl * phl) / w)
}

/// Nearest-branch unwrapping of successive phases.
pub fn unwrap_phases<T: Scalar>(raw: &[T]) -> Vec<T> {
    let mut out = Vec::with_capacity(raw.len());
    let tau = T::TAU();
    for (i, &p) in raw.iter().enumerate() {
        if i == 0 {
            out.push(p);
            continue;
        }
        let prev = out[i - 1];
        let k = ((prev - p) / tau).round();
        out.push(p + k * tau);
    }
    out
}

/// Weighted phase along a trajectory, with each component unwrapped before
/// weighting. Samples where an amplitude vanishes keep its last phase.
pub fn weighted_phase_series<T: Scalar>(traj: &Trajectory<T>, logical: usize, rydberg: usize) -> Result<Vec<T>> {
    let follow = |idx: usize| {
        let mut last = T::zero();
        let raw: Vec<T> = traj
            .amplitudes
            .iter()
            .map(|a| {
                if a[idx].norm_sqr() > c(1e-24) {
                    last = a[idx].arg();
                }
                last
            })
            .collect();
        unwrap_phases(&raw)
    };
    let (phl, phr) = (follow(logical), follow(rydberg));
    traj.amplitudes
        .iter()
        .enumerate()
        .map(|(k, a)| combine(a[logical].norm_sqr(), phl[k], a[rydberg].norm_sqr(), phr[k]))
        .collect()
}

/// Population bookkeeping at one sample: decay loss `1 - |ψ|^2` and leakage
/// (surviving population outside the watched states).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossBreakdown<T> {
    pub time: T,
    pub decay_loss: T,
    pub leakage: T,
}

pub fn loss_breakdown<T: Scalar>(traj: &Trajectory<T>, watch: &[usize]) -> Vec<LossBreakdown<T>> {
    traj.times
        .iter()
        .zip(&traj.amplitudes)
        .map(|(&time, a)| {
            let norm = norm_squared(a);
            let watched: T = watch.iter().map(|&i| a[i].norm_sqr()).sum();
            LossBreakdown { time, decay_loss: T::one() - norm, leakage: norm - watched }
        })
        .collect()
}

/// CSV with `time_us`, then population and unwrapped phase per watched state.
pub fn trajectory_csv<T: Scalar>(traj: &Trajectory<T>, basis: &BasisSet<T>, watch: &[usize]) -> String {
    let mut out = String::from("time_us");
    for &i in watch {
        let label = basis.states[i].label().replace(", ", " ");
        out.push_str(&format!(",pop {label},phase {label}"));
    }
    out.push('\n');
    let phases: Vec<Vec<T>> = watch
        .iter()
        .map(|&i| unwrap_phases(&traj.amplitudes.iter().map(|a| a[i].arg()).collect::<Vec<_>>()))
        .collect();
    for (k, (t, a)) in traj.times.iter().zip(&traj.amplitudes).enumerate() {
        out.push_str(&format!("{:.9}", t));
        for (w, &i) in watch.iter().enumerate() {
            out.push_str(&format!(",{:.12e},{:.12e}", a[i].norm_sqr(), phases[w][k]));
        }
        out.push('\n');
    }
    out
}
