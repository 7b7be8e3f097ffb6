//! Floquet sidebands of RF-modulated levels, Stark maps with their sideband
//! replicas, and resonance scans of the transfer fraction.
//!
//! A level with Stark coefficient `κ` (shift `κ F^2`) in the field
//! `F_S + F_RF cos(2πνt)` picks up the oscillating phase
//! `-(x1 sin ωt + x2 sin 2ωt)` with `x1 = 2κ F_S F_RF / ν` and
//! `x2 = κ F_RF^2 / (4ν)`. Expanding gives
//! `Σ_s a_s e^{-isωt}` with `a_s = Σ_k J_{s-2k}(x1) J_k(x2)`, so sideband `s`
//! sits at `E + κ<F^2> + sν`.

use num_complex::Complex;
use rayon::prelude::*;

use crate::atomic_data::RydbergLevel;
use crate::collective_basis::{AtomState, BasisSet};
use crate::dynamics::{propagate, transfer_fraction};
use crate::error::{Error, Result};
use crate::hamiltonian::{AssembledHamiltonian, FieldDrive, HamiltonianModel};
use crate::ode::IntegratorConfig;
use crate::scalar::{c, Scalar};
use crate::special::bessel_j;

#[derive(Debug, Clone, PartialEq)]
pub struct SidebandSpectrum<T> {
    pub stark_coefficient: T,
    pub drive: FieldDrive<T>,
    /// Amplitudes for `s = -s_max ..= s_max`.
    pub amplitudes: Vec<T>,
    pub s_max: i32,
}

impl<T: Scalar> SidebandSpectrum<T> {
    pub fn get(&self, s: i32) -> T {
        if s.abs() > self.s_max {
            return T::zero();
        }
        self.amplitudes[(s + self.s_max) as usize]
    }

    pub fn indices(&self) -> impl Iterator<Item = i32> {
        -self.s_max..=self.s_max
    }

    pub fn power_sum(&self) -> T {
        self.amplitudes.iter().map(|a| *a * *a).sum()
    }
}

/// Phase-modulation indices `(x1, x2)`; order one or below keeps the first
/// sidebands strong.
pub fn modulation_depth<T: Scalar>(stark_coefficient: T, drive: &FieldDrive<T>) -> (T, T) {
    if drive.f_rf == T::zero() {
        return (T::zero(), T::zero());
    }
    let x1 = c::<T>(2.0) * stark_coefficient * drive.f_s * drive.f_rf / drive.nu;
    let x2 = stark_coefficient * drive.f_rf * drive.f_rf / (c::<T>(4.0) * drive.nu);
    (x1, x2)
}

pub fn sideband_amplitudes<T: Scalar>(stark_coefficient: T, drive: &FieldDrive<T>, s_max: i32) -> Result<SidebandSpectrum<T>> {
    if s_max < 1 {
        return Err(Error::InvalidSideband(format!("s_max = {s_max} must be at least 1")));
    }
    drive.validate()?;
    let size = (2 * s_max + 1) as usize;
    let mut amplitudes = vec![T::zero(); size];
    if drive.f_rf == T::zero() {
        amplitudes[s_max as usize] = T::one();
        return Ok(SidebandSpectrum { stark_coefficient, drive: *drive, amplitudes, s_max });
    }
    if !(drive.nu > T::zero()) {
        return Err(Error::InvalidSideband("nu must be positive".into()));
    }
    let (x1, x2) = modulation_depth(stark_coefficient, drive);
    let tail = c::<T>(1e-14);
    let j2 = |k: i32| bessel_j(k, x2);
    for (slot, s) in (-s_max..=s_max).enumerate() {
        let mut sum = bessel_j(s, x1) * j2(0);
        let mut converged = false;
        for k in 1..=400 {
            let plus = bessel_j(s - 2 * k, x1) * j2(k);
            let minus = bessel_j(s + 2 * k, x1) * j2(-k);
            sum += plus + minus;
            if plus.abs() < tail && minus.abs() < tail && k as f64 > x2.abs().as_f64() {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::SidebandNotConverged { x1: x1.as_f64(), x2: x2.as_f64() });
        }
        amplitudes[slot] = sum;
    }
    Ok(SidebandSpectrum { stark_coefficient, drive: *drive, amplitudes, s_max })
}

/// Crossing between the initial curve and the `s`-th replica of a final curve.
#[derive(Debug, Clone, PartialEq)]
pub struct Crossing<T> {
    pub s: i32,
    pub f_s: T,
    pub final_state: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StarkMap<T> {
    pub f_s: Vec<T>,
    /// `energies[k][i]`: state `i` at field `f_s[k]`, MHz relative to the reference at zero field.
    pub energies: Vec<Vec<T>>,
    pub initial: usize,
    pub finals: Vec<usize>,
    pub s_range: (i32, i32),
    pub crossings: Vec<Crossing<T>>,
}

/// Indices of the transfer targets: every ordering of
/// `{nS, nP1/2, (n+1)S}` with all `m_j = +1/2`.
pub fn final_states<T: Scalar>(basis: &BasisSet<T>) -> Vec<usize> {
    let n = basis.n;
    let mut wanted = [RydbergLevel::s12(n, 1), RydbergLevel::p12(n, 1), RydbergLevel::s12(n + 1, 1)];
    wanted.sort();
    basis
        .states
        .iter()
        .enumerate()
        .filter(|(_, s)| {
            let mut levels: Vec<RydbergLevel> = s.atoms.iter().filter_map(AtomState::rydberg).copied().collect();
            levels.sort();
            levels == wanted
        })
        .map(|(i, _)| i)
        .collect()
}

/// Stark curves `E0 + κ F_S^2` for every basis state, plus the crossings of
/// the reference state with each sideband replica `E_final + sν` of the
/// transfer targets. With `ac_shift` the RF offset `κ F_RF^2 / 2` is added.
pub fn stark_map<T: Scalar>(
    model: &HamiltonianModel<T>,
    f_grid: &[T],
    s_range: (i32, i32),
    ac_shift: bool,
) -> Result<StarkMap<T>> {
    let parts = crate::hamiltonian::assemble_static(&HamiltonianModel { laser_frame_field: None, ..model.clone() })?;
    let basis = &model.basis;
    let initial = basis.reference.ok_or(Error::EmptyBasis { window_ghz: basis.window_ghz.as_f64() })?;
    let finals = final_states(basis);
    let drive = model.drive;
    let rf2 = if ac_shift { drive.f_rf * drive.f_rf / c(2.0) } else { T::zero() };
    let curve = |i: usize, f: T| parts.energy_mhz[i] + parts.stark_coef[i] * (f * f + rf2);
    let energies: Vec<Vec<T>> = f_grid.iter().map(|&f| (0..basis.len()).map(|i| curve(i, f)).collect()).collect();

    let mut crossings = Vec::new();
    for s in s_range.0..=s_range.1 {
        let offset = c::<T>(s as f64) * drive.nu;
        for &fi in &finals {
            let defect = |f: T| curve(fi, f) - curve(initial, f) - offset;
            for w in f_grid.windows(2) {
                let (mut a, mut b) = (w[0], w[1]);
                let (mut da, db) = (defect(a), defect(b));
                if da == T::zero() {
                    crossings.push(Crossing { s, f_s: a, final_state: fi });
                    continue;
                }
                if da * db >= T::zero() {
                    continue;
                }
                for _ in 0..200 {
                    let m = (a + b) / c(2.0);
                    let dm = defect(m);
                    if dm == T::zero() || (b - a) <= T::epsilon() * m.abs() {
                        a = m;
                        b = m;
                        break;
                    }
                    if dm * da < T::zero() {
                        b = m;
                    } else {
                        a = m;
                        da = dm;
                    }
                }
                crossings.push(Crossing { s, f_s: (a + b) / c(2.0), final_state: fi });
            }
        }
    }
    crossings.sort_by(|x, y| x.f_s.partial_cmp(&y.f_s).unwrap_or(std::cmp::Ordering::Equal).then(x.final_state.cmp(&y.final_state)));
    Ok(StarkMap { f_s: f_grid.to_vec(), energies, initial, finals, s_range, crossings })
}

impl<T: Scalar> StarkMap<T> {
    /// Distinct crossing fields per sideband order (degenerate finals merged).
    pub fn crossing_fields(&self, s: i32) -> Vec<T> {
        let mut out: Vec<T> = Vec::new();
        for cr in self.crossings.iter().filter(|cr| cr.s == s) {
            if out.last().map_or(true, |&f| (cr.f_s - f).abs() > c(1e-9)) {
                out.push(cr.f_s);
            }
        }
        out
    }
}

/// Local maximum of a scan curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak<T> {
    pub f_s: T,
    pub rho: T,
    pub prominence: T,
}

/// Förster defect `Δ_F(F_S) = Δ0 + Δκ (F_S^2 + F_RF^2/2)` between the
/// transfer target and `|RRR>`, MHz, without interactions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForsterDefect<T> {
    pub zero_field_mhz: T,
    pub delta_kappa: T,
    pub f_rf: T,
}

impl<T: Scalar> ForsterDefect<T> {
    pub fn from_model(model: &HamiltonianModel<T>) -> Result<Self> {
        let parts = crate::hamiltonian::assemble_static(&HamiltonianModel { laser_frame_field: None, ..model.clone() })?;
        let basis = &model.basis;
        let initial = basis.reference.ok_or(Error::EmptyBasis { window_ghz: basis.window_ghz.as_f64() })?;
        let fin = *final_states(basis)
            .first()
            .ok_or_else(|| Error::InvalidBasis("transfer target missing from basis".into()))?;
        Ok(Self {
            zero_field_mhz: parts.energy_mhz[fin] - parts.energy_mhz[initial],
            delta_kappa: parts.stark_coef[fin] - parts.stark_coef[initial],
            f_rf: model.drive.f_rf,
        })
    }

    pub fn at(&self, f_s: T) -> T {
        self.zero_field_mhz + self.delta_kappa * (f_s * f_s + self.f_rf * self.f_rf / c(2.0))
    }

    /// DC field where the defect equals `detuning`, if real.
    pub fn field_at(&self, detuning: T) -> Option<T> {
        let f2 = (detuning - self.zero_field_mhz) / self.delta_kappa - self.f_rf * self.f_rf / c(2.0);
        (f2 >= T::zero()).then(|| f2.sqrt())
    }
}

/// Two satellites of the resonance with sideband order `order`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Doublet<T> {
    pub order: i32,
    pub lower: Peak<T>,
    pub upper: Peak<T>,
    /// Mean Förster defect of the satellites, MHz.
    pub center_detuning: T,
    /// DC field at which the defect equals `center_detuning`.
    pub center_f_s: T,
}

impl<T: Scalar> Doublet<T> {
    pub fn splitting(&self) -> T {
        self.upper.f_s - self.lower.f_s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResonanceScan<T> {
    pub f_s: Vec<T>,
    pub rho: Vec<T>,
    pub t_int: T,
    pub drive: FieldDrive<T>,
    pub defect: ForsterDefect<T>,
    pub peaks: Vec<Peak<T>>,
    pub doublets: Vec<Doublet<T>>,
    /// Sideband orders with a single resolved peak.
    pub unpaired: Vec<(i32, Peak<T>)>,
}

impl<T: Scalar> ResonanceScan<T> {
    /// For consecutive doublets `(s, s+1)`: measured center spacing and the
    /// spacing predicted by moving the defect of doublet `s` by exactly `ν`,
    /// both in V/cm.
    pub fn center_spacings(&self) -> Vec<(i32, T, Option<T>)> {
        self.doublets
            .windows(2)
            .filter(|w| w[1].order == w[0].order + 1)
            .map(|w| {
                let predicted = self.defect.field_at(w[0].center_detuning + self.drive.nu).map(|f| f - w[0].center_f_s);
                (w[0].order, w[1].center_f_s - w[0].center_f_s, predicted)
            })
            .collect()
    }
}

/// Smallest prominence for a local maximum to count as a resonance peak.
pub const MIN_PEAK_PROMINENCE: f64 = 0.08;

/// Transfer fraction after `t_int` from `|RRR>` at every grid field.
pub fn resonance_scan<T: Scalar>(
    template: &HamiltonianModel<T>,
    f_grid: &[T],
    t_int: T,
    config: &IntegratorConfig<T>,
) -> Result<ResonanceScan<T>> {
    let base = AssembledHamiltonian::new(&HamiltonianModel { laser: None, laser_frame_field: None, ..template.clone() })?;
    let basis = &template.basis;
    let reference = basis.reference.ok_or(Error::EmptyBasis { window_ghz: basis.window_ghz.as_f64() })?;
    let mut psi0 = vec![Complex::new(T::zero(), T::zero()); basis.len()];
    psi0[reference] = Complex::new(T::one(), T::zero());
    let rho: Vec<T> = f_grid
        .par_iter()
        .map(|&f| {
            let h = base.with_drive(FieldDrive { f_s: f, ..template.drive });
            let traj = propagate(&h, &psi0, T::zero(), t_int, &[], config)?;
            Ok(transfer_fraction(basis, traj.last()))
        })
        .collect::<Result<_>>()?;
    let defect = ForsterDefect::from_model(template)?;
    let peaks = find_peaks(f_grid, &rho, c(MIN_PEAK_PROMINENCE));
    let nu = if template.drive.f_rf > T::zero() { template.drive.nu } else { T::zero() };
    let (doublets, unpaired) = group_doublets(&peaks, &defect, nu);
    Ok(ResonanceScan { f_s: f_grid.to_vec(), rho, t_int, drive: template.drive, defect, peaks, doublets, unpaired })
}

/// Field in `[lo, hi]` maximizing the transfer after `t_int`, by golden
/// section to `tol` V/cm. Assumes a single maximum in the bracket.
pub fn refine_peak<T: Scalar>(
    template: &HamiltonianModel<T>,
    lo: T,
    hi: T,
    t_int: T,
    tol: T,
    config: &IntegratorConfig<T>,
) -> Result<Peak<T>> {
    if !(hi > lo) || !(tol > T::zero()) {
        return Err(Error::InvalidSideband(format!("peak bracket [{lo}, {hi}] with tolerance {tol}")));
    }
    let base = AssembledHamiltonian::new(&HamiltonianModel { laser: None, laser_frame_field: None, ..template.clone() })?;
    let basis = &template.basis;
    let reference = basis.reference.ok_or(Error::EmptyBasis { window_ghz: basis.window_ghz.as_f64() })?;
    let mut psi0 = vec![Complex::new(T::zero(), T::zero()); basis.len()];
    psi0[reference] = Complex::new(T::one(), T::zero());
    let rho = |f: T| -> Result<T> {
        let h = base.with_drive(FieldDrive { f_s: f, ..template.drive });
        Ok(transfer_fraction(basis, propagate(&h, &psi0, T::zero(), t_int, &[], config)?.last()))
    };
    let g = c::<T>((5f64.sqrt() - 1.0) / 2.0);
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (rho(x1)?, rho(x2)?);
    while b - a > tol {
        if f1 >= f2 {
            b = x2;
            (x2, f2) = (x1, f1);
            x1 = b - g * (b - a);
            f1 = rho(x1)?;
        } else {
            a = x1;
            (x1, f1) = (x2, f2);
            x2 = a + g * (b - a);
            f2 = rho(x2)?;
        }
    }
    let (f_s, best) = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    Ok(Peak { f_s, rho: best, prominence: T::nan() })
}

/// Local maxima with topographic prominence at least `min_prominence`.
pub fn find_peaks<T: Scalar>(x: &[T], y: &[T], min_prominence: T) -> Vec<Peak<T>> {
    let n = y.len();
    let mut out = Vec::new();
    if n < 3 {
        return out;
    }
    for i in 0..n {
        let left_ok = i == 0 || y[i] > y[i - 1];
        let right_ok = i + 1 == n || y[i] >= y[i + 1];
        if !(left_ok && right_ok) {
            continue;
        }
        // Lowest point between this peak and the nearest higher sample on each side.
        let mut left_min = y[i];
        let mut j = i;
        while j > 0 {
            j -= 1;
            if y[j] > y[i] {
                break;
            }
            left_min = left_min.min(y[j]);
        }
        let mut right_min = y[i];
        let mut j = i;
        while j + 1 < n {
            j += 1;
            if y[j] > y[i] {
                break;
            }
            right_min = right_min.min(y[j]);
        }
        let prominence = y[i] - left_min.max(right_min);
        if prominence >= min_prominence {
            out.push(Peak { f_s: x[i], rho: y[i], prominence });
        }
    }
    out
}

/// Assigns each peak the sideband order `round(Δ_F / ν)` and pairs the two
/// most prominent peaks of every order into a doublet. With `nu = 0` all
/// peaks belong to order 0.
pub fn group_doublets<T: Scalar>(
    peaks: &[Peak<T>],
    defect: &ForsterDefect<T>,
    nu: T,
) -> (Vec<Doublet<T>>, Vec<(i32, Peak<T>)>) {
    let order = |p: &Peak<T>| {
        if nu > T::zero() {
            (defect.at(p.f_s) / nu).round().to_i32().unwrap_or(0)
        } else {
            0
        }
    };
    let mut orders: Vec<i32> = peaks.iter().map(order).collect();
    orders.sort_unstable();
    orders.dedup();
    let mut doublets = Vec::new();
    let mut unpaired = Vec::new();
    for s in orders {
        let mut group: Vec<Peak<T>> = peaks.iter().filter(|p| order(p) == s).copied().collect();
        group.sort_by(|a, b| b.prominence.partial_cmp(&a.prominence).unwrap_or(std::cmp::Ordering::Equal));
        match group.as_slice() {
            [single] => unpaired.push((s, *single)),
            [a, b, ..] => {
                let (lower, upper) = if a.f_s < b.f_s { (*a, *b) } else { (*b, *a) };
                let center_detuning = (defect.at(lower.f_s) + defect.at(upper.f_s)) / c(2.0);
                let center_f_s = defect.field_at(center_detuning).unwrap_or((lower.f_s + upper.f_s) / c(2.0));
                doublets.push(Doublet { order: s, lower, upper, center_detuning, center_f_s });
            }
            [] => {}
        }
    }
    (doublets, unpaired)
}
