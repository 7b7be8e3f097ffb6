//! Dipole matrix elements: exact Clebsch-Gordan coefficients, quasiclassical
//! radial integrals, and the pairwise dipole-dipole interaction.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::atomic_data::{AtomicConstants, RydbergLevel};
use crate::error::{Error, Result};
use crate::scalar::{c, Scalar};
use crate::special::anger;
use crate::units::{um_to_bohr, HARTREE_MHZ};

/// Angular-momentum quantum number, stored doubled so half-integers are exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfInteger(i32);

impl HalfInteger {
    pub const fn from_twice(twice: i32) -> Self {
        Self(twice)
    }

    pub const fn from_int(k: i32) -> Self {
        Self(2 * k)
    }

    pub const fn twice(self) -> i32 {
        self.0
    }

    pub fn value(self) -> f64 {
        f64::from(self.0) / 2.0
    }
}

impl fmt::Display for HalfInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// A Clebsch-Gordan coefficient held exactly as `sign * sqrt(square)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactCoefficient {
    pub negative: bool,
    pub square: BigRational,
}

impl ExactCoefficient {
    pub fn zero() -> Self {
        Self { negative: false, square: BigRational::zero() }
    }

    pub fn is_zero(&self) -> bool {
        self.square.is_zero()
    }

    /// Signed square `sign * c^2`, still exact.
    pub fn signed_square(&self) -> BigRational {
        if self.negative {
            -self.square.clone()
        } else {
            self.square.clone()
        }
    }

    pub fn value<T: Scalar>(&self) -> T {
        let v = c::<T>(ratio_to_f64(&self.square).sqrt());
        if self.negative {
            -v
        } else {
            v
        }
    }
}

fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn factorial(n: i32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

fn check_pair(j: HalfInteger, m: HalfInteger) -> Result<()> {
    if j.0 < 0 || (j.0 - m.0) % 2 != 0 {
        return Err(Error::InvalidAngularMomentum(format!("j = {j}, m = {m}")));
    }
    Ok(())
}

/// `<j1 m1; j2 m2 | J M>` in the Condon-Shortley convention, via the Racah
/// closed form in exact integer arithmetic.
pub fn clebsch_gordan(
    j1: HalfInteger,
    m1: HalfInteger,
    j2: HalfInteger,
    m2: HalfInteger,
    j: HalfInteger,
    m: HalfInteger,
) -> Result<ExactCoefficient> {
    check_pair(j1, m1)?;
    check_pair(j2, m2)?;
    check_pair(j, m)?;
    if (j1.0 + j2.0 + j.0) % 2 != 0 {
        return Err(Error::InvalidAngularMomentum(format!("j1 + j2 + J = {j1} + {j2} + {j} is not an integer")));
    }
    if m1.0 + m2.0 != m.0
        || j.0 < (j1.0 - j2.0).abs()
        || j.0 > j1.0 + j2.0
        || m1.0.abs() > j1.0
        || m2.0.abs() > j2.0
        || m.0.abs() > j.0
    {
        return Ok(ExactCoefficient::zero());
    }
    // All quantities below are integers.
    let h = |x: i32| x / 2;
    let (a, b, cc) = (h(j1.0 + j2.0 - j.0), h(j1.0 - j2.0 + j.0), h(-j1.0 + j2.0 + j.0));
    let big_j = h(j1.0 + j2.0 + j.0);
    let triangle = factorial(a) * factorial(b) * factorial(cc);
    let norm = BigInt::from(j.0 + 1)
        * triangle
        * factorial(h(j1.0 + m1.0))
        * factorial(h(j1.0 - m1.0))
        * factorial(h(j2.0 + m2.0))
        * factorial(h(j2.0 - m2.0))
        * factorial(h(j.0 + m.0))
        * factorial(h(j.0 - m.0));
    let d1 = a;
    let d2 = h(j1.0 - m1.0);
    let d3 = h(j2.0 + m2.0);
    let d4 = h(j.0 - j2.0 + m1.0);
    let d5 = h(j.0 - j1.0 - m2.0);
    let kmin = 0.max(-d4).max(-d5);
    let kmax = d1.min(d2).min(d3);
    let mut sum = BigRational::zero();
    for k in kmin..=kmax {
        let den = factorial(k)
            * factorial(d1 - k)
            * factorial(d2 - k)
            * factorial(d3 - k)
            * factorial(d4 + k)
            * factorial(d5 + k);
        let term = BigRational::new(BigInt::one(), den);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    let square = BigRational::new(norm, factorial(big_j + 1)) * &sum * &sum;
    Ok(ExactCoefficient { negative: sum.is_negative(), square })
}

/// Reduced angular factor `<l j m| C^1_q |l' j' m'>` for a spin-1/2 electron,
/// computed by decoupling both states into `|l m_l> |1/2 m_s>`.
pub fn angular_factor<T: Scalar>(a: &RydbergLevel, b: &RydbergLevel, q: i32) -> T {
    if a.twice_mj != b.twice_mj + 2 * q || a.l.abs_diff(b.l) != 1 {
        return T::zero();
    }
    let hi = |x: u32| HalfInteger::from_twice(x as i32);
    let (la, lb) = (HalfInteger::from_int(a.l as i32), HalfInteger::from_int(b.l as i32));
    let one = HalfInteger::from_int(1);
    let zero = HalfInteger::from_int(0);
    let cg = |j1, m1, j2, m2, j, m| clebsch_gordan(j1, m1, j2, m2, j, m).expect("valid arguments");
    let parity = cg(lb, zero, one, zero, la, zero);
    let ratio = BigRational::new(BigInt::from(2 * b.l + 1), BigInt::from(2 * a.l + 1));
    let mut total = 0.0;
    for twice_ms in [-1, 1] {
        let ms = HalfInteger::from_twice(twice_ms);
        let mla = HalfInteger::from_twice(a.twice_mj - twice_ms);
        let mlb = HalfInteger::from_twice(b.twice_mj - twice_ms);
        if mla.0.abs() > la.0 || mlb.0.abs() > lb.0 {
            continue;
        }
        let half = HalfInteger::from_twice(1);
        let ca = cg(la, mla, half, ms, hi(a.twice_j), HalfInteger::from_twice(a.twice_mj));
        let cb = cg(lb, mlb, half, ms, hi(b.twice_j), HalfInteger::from_twice(b.twice_mj));
        let cq = cg(lb, mlb, one, HalfInteger::from_int(q), la, mla);
        let terms = [&ca, &cb, &cq, &parity];
        if terms.iter().any(|t| t.is_zero()) {
            continue;
        }
        let negative = terms.iter().filter(|t| t.negative).count() % 2 == 1;
        let square = terms.iter().fold(ratio.clone(), |acc, t| acc * &t.square);
        let v = ratio_to_f64(&square).sqrt();
        total += if negative { -v } else { v };
    }
    c(total)
}

/// Quasiclassical radial integral `<a|r|b>` in atomic units.
///
/// Closed form in Anger functions of the Kepler-orbit eccentricity, built from
/// the j-resolved effective quantum numbers of both levels.
pub fn radial_dipole<T: Scalar>(a: &RydbergLevel, b: &RydbergLevel, constants: &AtomicConstants<T>) -> Result<T> {
    if a.l.abs_diff(b.l) != 1 {
        return Err(Error::ForbiddenTransition(a.to_string(), b.to_string()));
    }
    let n1 = constants.effective_n(a)?;
    let n2 = constants.effective_n(b)?;
    let two = c::<T>(2.0);
    let s = n2 - n1;
    let dl = c::<T>(b.l as f64 - a.l as f64);
    let nc = two * n1 * n2 / (n1 + n2);
    let lc = c::<T>((a.l + b.l + 1) as f64) / two;
    let g = lc / nc;
    let e = (T::one() - g * g).sqrt();
    let x = e * s;
    let one = T::one();
    let bracket = (one + dl * g) * anger(one - s, x) - (one - dl * g) * anger(-one - s, x)
        + two / T::PI() * (T::PI() * s).sin() * (one - e);
    Ok(nc * nc / (two * s) * bracket)
}

/// Spherical-component dipole element `<a| r_q |b>` in atomic units.
pub fn dipole_element<T: Scalar>(a: &RydbergLevel, b: &RydbergLevel, q: i32, constants: &AtomicConstants<T>) -> Result<T> {
    let ang = angular_factor::<T>(a, b, q);
    if ang == T::zero() {
        return Ok(T::zero());
    }
    Ok(radial_dipole(a, b, constants)? * ang)
}

/// Weights of `a_q b_{-q}` in `a.b - 3 a_z b_z` (the `sqrt(6) C^{20}_{1q,1-q}` factors).
pub const DDI_WEIGHTS: [(i32, f64); 3] = [(-1, 1.0), (0, 2.0), (1, 1.0)];

/// Pairwise coupling `<bra| V_dd |ket>` for two atoms on the quantization axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairCoupling<T> {
    pub bra: (RydbergLevel, RydbergLevel),
    pub ket: (RydbergLevel, RydbergLevel),
    pub separation_um: T,
    pub value_mhz: T,
}

impl<T: Scalar> PairCoupling<T> {
    pub fn compute(
        bra: (RydbergLevel, RydbergLevel),
        ket: (RydbergLevel, RydbergLevel),
        separation_um: T,
        constants: &AtomicConstants<T>,
    ) -> Result<Self> {
        let value_mhz = ddi_element(bra, ket, separation_um, constants)?;
        Ok(Self { bra, ket, separation_um, value_mhz })
    }
}

/// Dipole-dipole matrix element between two-atom states, MHz.
pub fn ddi_element<T: Scalar>(
    bra: (RydbergLevel, RydbergLevel),
    ket: (RydbergLevel, RydbergLevel),
    separation_um: T,
    constants: &AtomicConstants<T>,
) -> Result<T> {
    if !(separation_um > T::zero()) {
        return Err(Error::ZeroSeparation(separation_um.as_f64()));
    }
    if bra.0.twice_mj + bra.1.twice_mj != ket.0.twice_mj + ket.1.twice_mj {
        return Ok(T::zero());
    }
    let mut sum = T::zero();
    for (q, w) in DDI_WEIGHTS {
        let da = dipole_element(&bra.0, &ket.0, q, constants)?;
        if da == T::zero() {
            continue;
        }
        sum += c::<T>(w) * da * dipole_element(&bra.1, &ket.1, -q, constants)?;
    }
    Ok(ddi_prefactor(separation_um) * sum)
}

/// `-E_h / R^3` with `R` in bohr, converting an a.u. dipole product to MHz.
pub fn ddi_prefactor<T: Scalar>(separation_um: T) -> T {
    let r = c::<T>(um_to_bohr(1.0)) * separation_um;
    -c::<T>(HARTREE_MHZ) / (r * r * r)
}
