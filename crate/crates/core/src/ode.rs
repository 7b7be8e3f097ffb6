//! Adaptive Dormand-Prince 8(5,3) integrator for complex linear systems.
//!
//! The step error is measured in the max norm over components, so `rtol`
//! bounds the worst amplitude rather than the average one.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{c, Scalar};

/// Right-hand side `dy/dt = f(t, y)` over complex state vectors.
pub trait OdeSystem<T: Scalar> {
    fn dim(&self) -> usize;
    fn rhs(&self, t: T, y: &[Complex<T>], dy: &mut [Complex<T>]);
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig<T> {
    pub rtol: T,
    pub atol: T,
    /// Upper bound on the step; `None` leaves it to the error control.
    pub max_step: Option<T>,
    pub first_step: Option<T>,
    /// Accepted plus rejected steps before giving up.
    pub max_steps: usize,
}

impl<T: Scalar> Default for IntegratorConfig<T> {
    fn default() -> Self {
        Self { rtol: c(1e-10), atol: c(1e-12), max_step: None, first_step: None, max_steps: 5_000_000 }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IntegratorStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_calls: usize,
}

impl std::ops::AddAssign for IntegratorStats {
    fn add_assign(&mut self, o: Self) {
        self.accepted += o.accepted;
        self.rejected += o.rejected;
        self.rhs_calls += o.rhs_calls;
    }
}

const STAGES: usize = 12;

const C: [f64; STAGES] = [
    0.0,
    0.05260015195876773,
    0.0789002279381516,
    0.1183503419072274,
    0.2816496580927726,
    0.3333333333333333,
    0.25,
    0.3076923076923077,
    0.6512820512820513,
    0.6,
    0.8571428571428571,
    1.0,
];

const A: [[f64; STAGES]; STAGES] = [
    [0.0; 12],
    [0.05260015195876773, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.0197250569845379, 0.0591751709536137, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.02958758547680685, 0.0, 0.08876275643042054, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.2413651341592667, 0.0, -0.8845494793282861, 0.924834003261792, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.037037037037037035, 0.0, 0.0, 0.17082860872947386, 0.12546768756682242, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.037109375, 0.0, 0.0, 0.17025221101954405, 0.06021653898045596, -0.017578125, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [
        0.03709200011850479, 0.0, 0.0, 0.17038392571223998, 0.10726203044637328, -0.015319437748624402,
        0.008273789163814023, 0.0, 0.0, 0.0, 0.0, 0.0,
    ],
    [
        0.6241109587160757, 0.0, 0.0, -3.3608926294469414, -0.868219346841726, 27.59209969944671,
        20.154067550477894, -43.48988418106996, 0.0, 0.0, 0.0, 0.0,
    ],
    [
        0.47766253643826434, 0.0, 0.0, -2.4881146199716677, -0.590290826836843, 21.230051448181193,
        15.279233632882423, -33.28821096898486, -0.020331201708508627, 0.0, 0.0, 0.0,
    ],
    [
        -0.9371424300859873, 0.0, 0.0, 5.186372428844064, 1.0914373489967295, -8.149787010746927,
        -18.52006565999696, 22.739487099350505, 2.4936055526796523, -3.0467644718982196, 0.0, 0.0,
    ],
    [
        2.273310147516538, 0.0, 0.0, -10.53449546673725, -2.0008720582248625, -17.9589318631188,
        27.94888452941996, -2.8589982771350235, -8.87285693353063, 12.360567175794303, 0.6433927460157636, 0.0,
    ],
];

const B: [f64; STAGES] = [
    0.054293734116568765,
    0.0,
    0.0,
    0.0,
    0.0,
    4.450312892752409,
    1.8915178993145003,
    -5.801203960010585,
    0.3111643669578199,
    -0.1521609496625161,
    0.20136540080403034,
    0.04471061572777259,
];

const E3: [f64; STAGES] = [
    -0.18980075407240762,
    0.0,
    0.0,
    0.0,
    0.0,
    4.450312892752409,
    1.8915178993145003,
    -5.801203960010585,
    -0.4226823213237919,
    -0.1521609496625161,
    0.20136540080403034,
    0.02265179219836082,
];

const E5: [f64; STAGES] = [
    0.01312004499419488,
    0.0,
    0.0,
    0.0,
    0.0,
    -1.2251564463762044,
    -0.4957589496572502,
    1.6643771824549864,
    -0.35032884874997366,
    0.3341791187130175,
    0.08192320648511571,
    -0.022355307863886294,
];

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 10.0;

/// Integrates from `t0` to `t1`, landing exactly on every time in `stops`
/// (which must be increasing and inside `(t0, t1]`) and reporting the state
/// there through `observe`. `y` holds the final state on return.
pub fn integrate<T: Scalar, S: OdeSystem<T>>(
    system: &S,
    y: &mut [Complex<T>],
    t0: T,
    t1: T,
    stops: &[T],
    config: &IntegratorConfig<T>,
    mut observe: impl FnMut(T, &[Complex<T>]),
) -> Result<IntegratorStats> {
    let n = system.dim();
    if y.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: y.len() });
    }
    if !(t1 > t0) {
        return Err(Error::InvalidPropagation(format!("t1 = {t1} must exceed t0 = {t0}")));
    }
    let zero = Complex::new(T::zero(), T::zero());
    let mut k = vec![vec![zero; n]; STAGES];
    let mut stage = vec![zero; n];
    let mut y_new = vec![zero; n];
    let mut f_new = vec![zero; n];
    let mut stats = IntegratorStats::default();

    let a: Vec<Vec<T>> = A.iter().map(|row| row.iter().map(|&x| c(x)).collect()).collect();
    let (bc, cc): (Vec<T>, Vec<T>) = (B.iter().map(|&x| c(x)).collect(), C.iter().map(|&x| c(x)).collect());
    let (e3, e5): (Vec<T>, Vec<T>) = (E3.iter().map(|&x| c(x)).collect(), E5.iter().map(|&x| c(x)).collect());
    let exponent = c::<T>(-1.0 / 8.0);

    system.rhs(t0, y, &mut k[0]);
    stats.rhs_calls += 1;
    let max_step = config.max_step.unwrap_or(t1 - t0).min(t1 - t0);
    let mut h = match config.first_step {
        Some(h) => h,
        None => initial_step(system, t0, y, &k[0], config, &mut stats),
    }
    .min(max_step);

    let mut t = t0;
    let mut next_stop = 0;
    let mut step_count = 0usize;
    while t < t1 {
        let target = stops.get(next_stop).copied().unwrap_or(t1).min(t1);
        let mut rejected = false;
        loop {
            step_count += 1;
            if step_count > config.max_steps {
                return Err(Error::ToleranceNotMet { t: t.as_f64(), steps: step_count - 1 });
            }
            let min_step = c::<T>(10.0) * T::epsilon() * t.abs().max(T::min_positive_value());
            if h < min_step {
                return Err(Error::StepSizeUnderflow { t: t.as_f64(), h: h.as_f64() });
            }
            let mut landing = false;
            let mut step = h.min(max_step);
            if t + step >= target {
                step = target - t;
                landing = true;
            }
            for s in 1..STAGES {
                for i in 0..n {
                    let mut acc = zero;
                    for (j, kj) in k.iter().enumerate().take(s) {
                        let aij = a[s][j];
                        if aij != T::zero() {
                            acc += kj[i] * aij;
                        }
                    }
                    stage[i] = y[i] + acc * step;
                }
                system.rhs(t + cc[s] * step, &stage, &mut k[s]);
            }
            stats.rhs_calls += STAGES - 1;
            let mut err5 = T::zero();
            let mut err3 = T::zero();
            for i in 0..n {
                let mut acc = zero;
                let mut d5 = zero;
                let mut d3 = zero;
                for s in 0..STAGES {
                    let ks = k[s][i];
                    if bc[s] != T::zero() {
                        acc += ks * bc[s];
                    }
                    if e5[s] != T::zero() {
                        d5 += ks * e5[s];
                    }
                    if e3[s] != T::zero() {
                        d3 += ks * e3[s];
                    }
                }
                y_new[i] = y[i] + acc * step;
                let scale = config.atol + y[i].norm().max(y_new[i].norm()) * config.rtol;
                err5 = err5.max((d5 / scale).norm_sqr());
                err3 = err3.max((d3 / scale).norm_sqr());
            }
            let err = if err5 == T::zero() && err3 == T::zero() {
                T::zero()
            } else {
                let denom = err5 + c::<T>(0.01) * err3;
                step.abs() * err5 / denom.sqrt()
            };
            if err < T::one() {
                let mut factor = if err == T::zero() {
                    c(MAX_FACTOR)
                } else {
                    (c::<T>(SAFETY) * err.powf(exponent)).min(c(MAX_FACTOR))
                };
                if rejected {
                    factor = factor.min(T::one());
                }
                // A step shortened to land on a stop says nothing about the
                // natural step length; keep the previous proposal.
                if !landing || step >= h {
                    h = step * factor;
                } else {
                    h = h.max(step * factor);
                }
                t = if landing { target } else { t + step };
                y.copy_from_slice(&y_new);
                system.rhs(t, y, &mut f_new);
                stats.rhs_calls += 1;
                std::mem::swap(&mut k[0], &mut f_new);
                stats.accepted += 1;
                if landing && next_stop < stops.len() && target == stops[next_stop] {
                    observe(t, y);
                    next_stop += 1;
                }
                break;
            }
            h = step * (c::<T>(SAFETY) * err.powf(exponent)).max(c(MIN_FACTOR));
            rejected = true;
            stats.rejected += 1;
        }
    }
    Ok(stats)
}

fn rms<T: Scalar>(v: &[Complex<T>], scale: &[T]) -> T {
    let s: T = v.iter().zip(scale).map(|(x, s)| (*x / *s).norm_sqr()).sum();
    (s / c::<T>(v.len().max(1) as f64)).sqrt()
}

fn initial_step<T: Scalar, S: OdeSystem<T>>(
    system: &S,
    t0: T,
    y0: &[Complex<T>],
    f0: &[Complex<T>],
    config: &IntegratorConfig<T>,
    stats: &mut IntegratorStats,
) -> T {
    let scale: Vec<T> = y0.iter().map(|y| config.atol + y.norm() * config.rtol).collect();
    let d0 = rms(y0, &scale);
    let d1 = rms(f0, &scale);
    let small = c::<T>(1e-5);
    let h0 = if d0 < small || d1 < small { c(1e-6) } else { c::<T>(0.01) * d0 / d1 };
    let y1: Vec<Complex<T>> = y0.iter().zip(f0).map(|(y, f)| *y + *f * h0).collect();
    let mut f1 = vec![Complex::new(T::zero(), T::zero()); y0.len()];
    system.rhs(t0 + h0, &y1, &mut f1);
    stats.rhs_calls += 1;
    let diff: Vec<Complex<T>> = f1.iter().zip(f0).map(|(a, b)| *a - *b).collect();
    let d2 = rms(&diff, &scale) / h0;
    let h1 = if d1 <= c(1e-15) && d2 <= c(1e-15) {
        (h0 * c(1e-3)).max(c(1e-6))
    } else {
        (c::<T>(0.01) / d1.max(d2)).powf(c(1.0 / 8.0))
    };
    (h0 * c(100.0)).min(h1)
}
