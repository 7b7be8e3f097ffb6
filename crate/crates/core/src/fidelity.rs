//! Average gate fidelity over the 216 products of `{|0>, |1>, |±>, |±i>}`.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gate_engine::LOGICAL_DIM;
use crate::linalg::CMatrix;
use crate::scalar::{c, Scalar};

pub const SINGLE_QUBIT_LABELS: [&str; 6] = ["0", "1", "+", "-", "+i", "-i"];

/// `(α, β)` of the six single-qubit states.
pub fn single_qubit_state<T: Scalar>(k: usize) -> [Complex<T>; 2] {
    let z = Complex::new(T::zero(), T::zero());
    let one = Complex::new(T::one(), T::zero());
    let s = c::<T>(std::f64::consts::FRAC_1_SQRT_2);
    let r = Complex::new(s, T::zero());
    match k {
        0 => [one, z],
        1 => [z, one],
        2 => [r, r],
        3 => [r, -r],
        4 => [r, Complex::new(T::zero(), s)],
        5 => [r, Complex::new(T::zero(), -s)],
        _ => panic!("single-qubit state index {k} out of range"),
    }
}

/// Product state `|a> ⊗ |b> ⊗ |c>` in the `|c1 c2 t>` ordering.
pub fn product_state<T: Scalar>(a: usize, b: usize, t: usize) -> Vec<Complex<T>> {
    let (qa, qb, qt) = (single_qubit_state::<T>(a), single_qubit_state::<T>(b), single_qubit_state::<T>(t));
    (0..LOGICAL_DIM).map(|x| qa[x >> 2 & 1] * qb[x >> 1 & 1] * qt[x & 1]).collect()
}

/// Ideal `CCΦ(φ)`: identity except `e^{iφ}` on `|111>`.
pub fn ideal_gate<T: Scalar>(phi: T) -> CMatrix<T> {
    let mut u = CMatrix::identity(LOGICAL_DIM);
    u[(7, 7)] = Complex::from_polar(T::one(), phi);
    u
}

fn check_reference<T: Scalar>(reference: &[Complex<T>]) -> Result<()> {
    let n: T = reference.iter().map(|z| z.norm_sqr()).sum();
    if (n - T::one()).abs() > c(1e-10) {
        return Err(Error::NonNormalizedReference(n.sqrt().as_f64()));
    }
    Ok(())
}

/// `|<ref|sim>|`: Uhlmann fidelity of a pure reference and a pure,
/// possibly subnormalized, simulated state.
pub fn single_state_fidelity<T: Scalar>(sim: &[Complex<T>], reference: &[Complex<T>]) -> Result<T> {
    if sim.len() != reference.len() {
        return Err(Error::DimensionMismatch { expected: reference.len(), got: sim.len() });
    }
    check_reference(reference)?;
    let overlap: Complex<T> = reference.iter().zip(sim).map(|(r, s)| r.conj() * *s).sum();
    Ok(overlap.norm())
}

fn projector<T: Scalar>(v: &[Complex<T>]) -> CMatrix<T> {
    CMatrix::from_fn(v.len(), v.len(), |i, j| v[i] * v[j].conj())
}

/// `Tr sqrt(sqrt(ρ_ref) ρ_sim sqrt(ρ_ref))` with both density matrices
/// formed explicitly; eigenvalues below `1e-12` of the largest are dropped.
/// Cross-check for [`single_state_fidelity`].
pub fn density_matrix_fidelity<T: Scalar>(sim: &[Complex<T>], reference: &[Complex<T>]) -> Result<T> {
    if sim.len() != reference.len() {
        return Err(Error::DimensionMismatch { expected: reference.len(), got: sim.len() });
    }
    check_reference(reference)?;
    let rho_ref = projector(reference);
    let rho_sim = projector(sim);
    let cut = |scale: T| move |x: T| if x > scale * c(1e-12) { x.sqrt() } else { T::zero() };
    let sq = crate::linalg::hermitian_function(&rho_ref, cut(T::one()));
    let m = sq.matmul(&rho_sim).matmul(&sq);
    let m = CMatrix::from_fn(m.rows, m.cols, |i, j| (m[(i, j)] + m[(j, i)].conj()) * c::<T>(0.5));
    let scale = (0..m.rows).map(|i| m[(i, i)].re).fold(T::zero(), T::max).max(T::min_positive_value());
    Ok(crate::linalg::hermitian_function(&m, cut(scale)).trace().re)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FidelityReport<T> {
    /// Labels such as `"+ 1 -i"` in `(c1, c2, t)` order.
    pub per_state: Vec<(String, T)>,
    pub average: T,
    pub worst: (String, T),
    /// Average over the eight computational basis inputs only.
    pub computational_average: T,
    pub phi_target: T,
    pub temperature: Option<T>,
}

impl<T: Scalar> FidelityReport<T> {
    pub fn csv(&self) -> String {
        let mut out = String::from("input,fidelity\n");
        for (l, f) in &self.per_state {
            out.push_str(&format!("{l},{f:.12}\n"));
        }
        out
    }

    pub fn summary(&self) -> String {
        let temp = self.temperature.map_or("-".to_string(), |t| format!("{t} K"));
        format!(
            "phi_target={:.6} temperature={} average={:.6} worst={:.6} ({}) computational={:.6}",
            self.phi_target, temp, self.average, self.worst.1, self.worst.0, self.computational_average
        )
    }
}

/// Fidelity of `propagator` against `CCΦ(φ)` for every product input.
pub fn average_gate_fidelity<T: Scalar>(propagator: &CMatrix<T>, phi_target: T) -> FidelityReport<T> {
    assert!(propagator.rows == LOGICAL_DIM && propagator.cols == LOGICAL_DIM, "propagator must be 8x8");
    let ideal = ideal_gate(phi_target);
    let per_state: Vec<(String, T)> = (0..216usize)
        .into_par_iter()
        .map(|k| {
            let (a, b, t) = (k / 36, k / 6 % 6, k % 6);
            let psi = product_state::<T>(a, b, t);
            let sim = propagator.matvec(&psi);
            let reference = ideal.matvec(&psi);
            let overlap: Complex<T> = reference.iter().zip(&sim).map(|(r, s)| r.conj() * *s).sum();
            let label = format!("{} {} {}", SINGLE_QUBIT_LABELS[a], SINGLE_QUBIT_LABELS[b], SINGLE_QUBIT_LABELS[t]);
            (label, overlap.norm())
        })
        .collect();
    let average = per_state.iter().map(|(_, f)| *f).sum::<T>() / c(216.0);
    let worst = per_state
        .iter()
        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal))
        .cloned()
        .expect("216 states");
    let computational_average = per_state
        .iter()
        .enumerate()
        .filter(|(k, _)| [k / 36, k / 6 % 6, k % 6].iter().all(|&q| q < 2))
        .map(|(_, (_, f))| *f)
        .sum::<T>()
        / c(8.0);
    FidelityReport { per_state, average, worst, computational_average, phi_target, temperature: None }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_cases() {
        let r = [Complex::new(0.6f64, 0.0), Complex::new(0.0, 0.8)];
        assert!((single_state_fidelity(&r, &r).unwrap() - 1.0).abs() < 1e-15);
        let o = [Complex::new(0.8, 0.0), Complex::new(0.0, -0.6)];
        assert!(single_state_fidelity(&o, &r).unwrap() < 1e-15);
        let half = [r[0] * 0.9, r[1] * 0.9];
        assert!((single_state_fidelity(&half, &r).unwrap() - 0.9).abs() < 1e-15);
        assert!(matches!(single_state_fidelity(&r, &half), Err(Error::NonNormalizedReference(_))));
    }

    #[test]
    fn ideal_gates_score_one() {
        let r = average_gate_fidelity(&CMatrix::<f64>::identity(8), 0.0);
        assert!((r.average - 1.0).abs() < 1e-12);
        let r = average_gate_fidelity(&ideal_gate(std::f64::consts::PI), std::f64::consts::PI);
        assert!((r.average - 1.0).abs() < 1e-12);
        assert_eq!(r.per_state.len(), 216);
    }

    #[test]
    fn identity_scored_against_ccz() {
        // |<ψ|CCZ|ψ>| = |1 - 2|ψ_111|^2| averaged over the 216 products
        let r = average_gate_fidelity(&CMatrix::<f64>::identity(8), std::f64::consts::PI);
        let mut want = 0.0;
        let p = [1.0, 0.0, 0.5, 0.5, 0.5, 0.5];
        for a in p {
            for b in p {
                for t in p {
                    want += (1.0f64 - 2.0 * a * b * t).abs();
                }
            }
        }
        assert!((r.average - want / 216.0).abs() < 1e-12);
    }
}
