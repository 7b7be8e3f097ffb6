//! Time-dependent non-Hermitian collective Hamiltonian.
//!
//! Entries are in MHz (cycles per µs); the Schrödinger equation reads
//! `dψ/dt = -2πi H(t) ψ`. Decay enters as `-i Γ/(4π)` on the diagonal so that
//! populations decay at `Γ` per µs.

use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex;

use crate::atomic_data::{lifetime, polarizability, AtomicConstants, RydbergLevel};
use crate::collective_basis::{AtomState, BasisSet, ATOMS};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, Csr};
use crate::matrix_elements::{ddi_prefactor, dipole_element, DDI_WEIGHTS};
use crate::ode::OdeSystem;
use crate::scalar::{c, Scalar};

/// `F(t) = F_S + F_RF cos(2π ν t + phase)`, fields in V/cm and ν in MHz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldDrive<T> {
    pub f_s: T,
    pub f_rf: T,
    pub nu: T,
    /// RF phase at `t = 0`, radians.
    pub rf_phase: T,
}

impl<T: Scalar> FieldDrive<T> {
    pub fn new(f_s: T, f_rf: T, nu: T) -> Self {
        Self { f_s, f_rf, nu, rf_phase: T::zero() }
    }

    pub fn dc(f_s: T) -> Self {
        Self::new(f_s, T::zero(), T::zero())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.f_s >= T::zero()) || !(self.f_rf >= T::zero()) {
            return Err(Error::InvalidDrive(format!("negative amplitude F_S = {}, F_RF = {}", self.f_s, self.f_rf)));
        }
        if self.f_rf > T::zero() && !(self.nu > T::zero()) {
            return Err(Error::InvalidDrive(format!("RF amplitude {} needs nu > 0", self.f_rf)));
        }
        Ok(())
    }

    pub fn field(&self, t: T) -> T {
        if self.f_rf == T::zero() {
            return self.f_s;
        }
        self.f_s + self.f_rf * (T::TAU() * self.nu * t + self.rf_phase).cos()
    }

    /// Period-averaged `<F^2> = F_S^2 + F_RF^2/2`.
    pub fn mean_square(&self) -> T {
        self.f_s * self.f_s + self.f_rf * self.f_rf / c(2.0)
    }

    pub fn without_rf(&self) -> Self {
        Self { f_rf: T::zero(), ..*self }
    }
}

/// Resonant rectangular laser coupling `|1> <-> |R>` on every atom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaserCoupling<T> {
    /// Rabi frequency Ω in rad/µs; a π pulse lasts `π/Ω`.
    pub rabi: T,
    pub phase: T,
}

impl<T: Scalar> LaserCoupling<T> {
    pub fn pi_pulse(duration: T, phase: T) -> Self {
        Self { rabi: T::PI() / duration, phase }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianModel<T> {
    pub basis: BasisSet<T>,
    /// Nearest-neighbour distance R, µm; atoms 1 and 3 sit at 2R.
    pub separation_um: T,
    pub drive: FieldDrive<T>,
    pub temperature: T,
    pub laser: Option<LaserCoupling<T>>,
    /// Include the (1,3) pair at 2R.
    pub next_nearest: bool,
    /// Work in the frame of a laser resonant with `|1> -> |R>` at this DC
    /// field: each Rydberg atom is shifted by `-(E_R + α_R F^2/2)`.
    pub laser_frame_field: Option<T>,
    pub constants: AtomicConstants<T>,
}

impl<T: Scalar> HamiltonianModel<T> {
    pub fn new(basis: BasisSet<T>, separation_um: T, drive: FieldDrive<T>, temperature: T, constants: AtomicConstants<T>) -> Self {
        Self {
            basis,
            separation_um,
            drive,
            temperature,
            laser: None,
            next_nearest: true,
            laser_frame_field: None,
            constants,
        }
    }

    fn validate(&self) -> Result<()> {
        self.drive.validate()?;
        if !(self.separation_um > T::zero()) {
            return Err(Error::ZeroSeparation(self.separation_um.as_f64()));
        }
        if self.temperature < T::zero() {
            return Err(Error::InvalidDrive(format!("negative temperature {}", self.temperature)));
        }
        Ok(())
    }
}

/// Field-independent pieces of the Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct StaticParts<T> {
    /// Zero-field energy relative to the reference (plus laser-frame offset), MHz.
    pub energy_mhz: Vec<T>,
    /// Σ α/2 over Rydberg atoms, MHz/(V/cm)^2.
    pub stark_coef: Vec<T>,
    /// Total decay rate, 1/µs.
    pub gamma: Vec<T>,
    /// Real symmetric dipole-dipole block, MHz.
    pub ddi: Csr<T>,
    /// `(rydberg index, ground index)` pairs connected by the laser.
    pub laser_pairs: Vec<(usize, usize)>,
}

impl<T: Scalar> StaticParts<T> {
    pub fn dim(&self) -> usize {
        self.energy_mhz.len()
    }
}

/// Assembles diagonal energies, Stark coefficients, decay rates and the DDI
/// block over the model's basis.
pub fn assemble_static<T: Scalar>(model: &HamiltonianModel<T>) -> Result<StaticParts<T>> {
    model.validate()?;
    let basis = &model.basis;
    let k = &model.constants;
    let n = basis.len();
    let reference = basis.reference_level;

    let mut levels: Vec<RydbergLevel> = basis
        .states
        .iter()
        .flat_map(|s| s.atoms.iter().filter_map(|a| a.rydberg().copied()))
        .collect();
    levels.sort();
    levels.dedup();
    let mut alpha = HashMap::new();
    let mut rate = HashMap::new();
    for l in &levels {
        alpha.insert(*l, polarizability(l, k)?);
        let tau_us = lifetime(l, model.temperature, k)? * c(1e6);
        rate.insert(*l, tau_us.recip());
    }
    let frame_shift = match model.laser_frame_field {
        Some(f) => polarizability(&reference, k)? / c(2.0) * f * f,
        None => T::zero(),
    };

    let mut energy_mhz = Vec::with_capacity(n);
    let mut stark_coef = Vec::with_capacity(n);
    let mut gamma = Vec::with_capacity(n);
    for s in &basis.states {
        let ryd: Vec<&RydbergLevel> = s.atoms.iter().filter_map(|a| a.rydberg()).collect();
        energy_mhz.push(s.e0_ghz * c(1e3) - frame_shift * c(ryd.len() as f64));
        stark_coef.push(ryd.iter().map(|l| alpha[*l] / c(2.0)).sum());
        gamma.push(ryd.iter().map(|l| rate[*l]).sum());
    }

    // Single-atom dipole table over the levels present, per q.
    let mut dip: HashMap<(RydbergLevel, RydbergLevel, i32), T> = HashMap::new();
    for a in &levels {
        for b in &levels {
            for (q, _) in DDI_WEIGHTS {
                if a.l.abs_diff(b.l) == 1 && a.twice_mj == b.twice_mj + 2 * q {
                    dip.insert((*a, *b, q), dipole_element(a, b, q, k)?);
                }
            }
        }
    }
    let d = |a: &RydbergLevel, b: &RydbergLevel, q: i32| dip.get(&(*a, *b, q)).copied().unwrap_or(T::zero());

    let mut pairs = vec![(0usize, 1usize, model.separation_um), (1, 2, model.separation_um)];
    if model.next_nearest {
        pairs.push((0, 2, model.separation_um * c(2.0)));
    }
    let mut triplets = Vec::new();
    for (i, si) in basis.states.iter().enumerate() {
        for (j, sj) in basis.states.iter().enumerate().skip(i + 1) {
            if si.twice_m != sj.twice_m {
                continue;
            }
            for &(p, q, r) in &pairs {
                let spectator_same = (0..ATOMS).filter(|&x| x != p && x != q).all(|x| si.atoms[x] == sj.atoms[x]);
                if !spectator_same {
                    continue;
                }
                let (AtomState::Rydberg(a1), AtomState::Rydberg(b1), AtomState::Rydberg(a2), AtomState::Rydberg(b2)) =
                    (si.atoms[p], si.atoms[q], sj.atoms[p], sj.atoms[q])
                else {
                    continue;
                };
                let mut v = T::zero();
                for (qq, w) in DDI_WEIGHTS {
                    v += c::<T>(w) * d(&a1, &a2, qq) * d(&b1, &b2, -qq);
                }
                if v != T::zero() {
                    let v = v * ddi_prefactor(r);
                    triplets.push((i, j, v));
                    triplets.push((j, i, v));
                }
            }
        }
    }
    let ddi = Csr::from_triplets(n, triplets);

    let r_state = AtomState::Rydberg(reference);
    let mut laser_pairs = Vec::new();
    for (i, si) in basis.states.iter().enumerate() {
        for atom in 0..ATOMS {
            if si.atoms[atom] != r_state {
                continue;
            }
            let mut g = si.atoms;
            g[atom] = AtomState::Ground(1);
            if let Some(j) = basis.position(&g) {
                laser_pairs.push((i, j));
            }
        }
    }
    Ok(StaticParts { energy_mhz, stark_coef, gamma, ddi, laser_pairs })
}

/// Assembled Hamiltonian for one drive/laser configuration. Cloning with a
/// different drive or laser shares the static parts.
#[derive(Debug, Clone)]
pub struct AssembledHamiltonian<T> {
    pub parts: Arc<StaticParts<T>>,
    pub drive: FieldDrive<T>,
    pub laser: Option<LaserCoupling<T>>,
}

impl<T: Scalar> AssembledHamiltonian<T> {
    pub fn new(model: &HamiltonianModel<T>) -> Result<Self> {
        Ok(Self { parts: Arc::new(assemble_static(model)?), drive: model.drive, laser: model.laser })
    }

    pub fn with_drive(&self, drive: FieldDrive<T>) -> Self {
        Self { drive, ..self.clone() }
    }

    pub fn with_laser(&self, laser: Option<LaserCoupling<T>>) -> Self {
        Self { laser, ..self.clone() }
    }

    pub fn dim(&self) -> usize {
        self.parts.dim()
    }

    /// Laser matrix element `<R|H|1>` in MHz.
    fn laser_element(&self) -> Option<Complex<T>> {
        self.laser.map(|l| Complex::from_polar(l.rabi / (c::<T>(2.0) * T::TAU()), l.phase))
    }

    /// Complex diagonal at time `t`, MHz.
    pub fn diagonal(&self, t: T) -> Vec<Complex<T>> {
        let f = self.drive.field(t);
        let f2 = f * f;
        let four_pi = c::<T>(2.0) * T::TAU();
        let p = &self.parts;
        (0..p.dim())
            .map(|i| Complex::new(p.energy_mhz[i] + p.stark_coef[i] * f2, -p.gamma[i] / four_pi))
            .collect()
    }

    /// Dense `H(t)` in MHz.
    pub fn evaluate(&self, t: T) -> CMatrix<T> {
        let n = self.dim();
        let mut h = CMatrix::zeros(n, n);
        for (i, d) in self.diagonal(t).into_iter().enumerate() {
            h[(i, i)] = d;
        }
        for (i, j, v) in self.parts.ddi.iter() {
            h[(i, j)] += Complex::new(v, T::zero());
        }
        if let Some(w) = self.laser_element() {
            for &(r, g) in &self.parts.laser_pairs {
                h[(r, g)] += w;
                h[(g, r)] += w.conj();
            }
        }
        h
    }
}

impl<T: Scalar> OdeSystem<T> for AssembledHamiltonian<T> {
    fn dim(&self) -> usize {
        self.parts.dim()
    }

    fn rhs(&self, t: T, y: &[Complex<T>], dy: &mut [Complex<T>]) {
        let p = &self.parts;
        let f = self.drive.field(t);
        let f2 = f * f;
        let two_pi = T::TAU();
        let half = c::<T>(0.5);
        // -2πi (E + iD) y = 2π (D - iE) y, with D = -Γ/(4π)
        for i in 0..p.dim() {
            let e = p.energy_mhz[i] + p.stark_coef[i] * f2;
            let mut acc = Complex::new(e, T::zero()) * y[i];
            for k in p.ddi.row_ptr[i]..p.ddi.row_ptr[i + 1] {
                acc += y[p.ddi.col[k]] * p.ddi.val[k];
            }
            dy[i] = Complex::new(acc.im * two_pi, -acc.re * two_pi) - y[i] * (p.gamma[i] * half);
        }
        if let Some(w) = self.laser_element() {
            let w = w * two_pi;
            let minus_i = Complex::new(T::zero(), -T::one());
            for &(r, g) in &p.laser_pairs {
                dy[r] += minus_i * w * y[g];
                dy[g] += minus_i * w.conj() * y[r];
            }
        }
    }
}
