//! Numerov radial wavefunctions in an l-dependent Rb core model potential.
//!
//! Inward integration in `x = sqrt(r)` at the quantum-defect energy, cut at
//! the core radius. Used as an independent check of the closed-form radial
//! integrals.

#![allow(dead_code)]

const ALPHA_C: f64 = 9.0760;
const Z: f64 = 37.0;
const FINE_STRUCTURE: f64 = 7.297_352_569_3e-3;

// a1 a2 a3 a4 rc per l (l >= 3 share the last row).
const PARAMS: [[f64; 5]; 4] = [
    [3.69628474, 1.64915255, -9.86069196, 0.19579987, 1.66242117],
    [4.44088978, 1.92828831, -16.79597770, -0.81633314, 1.50195124],
    [3.78717363, 1.57027864, -11.6558897, 0.52942835, 4.86851938],
    [2.39848933, 1.76810544, -12.0710678, 0.77256589, 4.79831327],
];

pub struct Wavefunction {
    pub x: Vec<f64>,
    /// `X(x)` with `u(r) = x^{1/2} X(x)`, normalized so `∫ u^2 dr = 1`.
    pub values: Vec<f64>,
}

fn potential(r: f64, l: u32, j: f64) -> f64 {
    let [a1, a2, a3, a4, rc] = PARAMS[l.min(3) as usize];
    let zl = 1.0 + (Z - 1.0) * (-a1 * r).exp() - r * (a3 + a4 * r) * (-a2 * r).exp();
    let pol = -ALPHA_C / (2.0 * r.powi(4)) * (1.0 - (-(r / rc).powi(6)).exp());
    let lf = l as f64;
    let ls = (j * (j + 1.0) - lf * (lf + 1.0) - 0.75) / 2.0;
    let so = if l > 0 { FINE_STRUCTURE * FINE_STRUCTURE / (2.0 * r.powi(3)) * ls } else { 0.0 };
    -zl / r + pol + so
}

/// Solves at energy `-1/(2 n*^2)` hartree on the grid `x = x_max - k h`.
pub fn solve(n_star: f64, l: u32, j: f64, x_max: f64, h: f64) -> Wavefunction {
    let energy = -0.5 / (n_star * n_star);
    let rc = PARAMS[l.min(3) as usize][4];
    let x_min = rc.sqrt();
    let steps = ((x_max - x_min) / h).floor() as usize;
    let lf = l as f64;
    let cent = (2.0 * lf + 0.5) * (2.0 * lf + 1.5);
    let g = |x: f64| {
        let r = x * x;
        8.0 * r * (potential(r, l, j) - energy) + cent / r
    };
    let xs: Vec<f64> = (0..=steps).map(|k| x_max - k as f64 * h).collect();
    let mut y = vec![0.0; xs.len()];
    y[0] = 1e-10;
    y[1] = 1e-10 * (1.0 + h * g(xs[1]).max(0.0).sqrt());
    let h2 = h * h / 12.0;
    for k in 1..steps {
        let (g0, g1, g2) = (g(xs[k - 1]), g(xs[k]), g(xs[k + 1]));
        y[k + 1] = (2.0 * y[k] * (1.0 + 5.0 * h2 * g1) - y[k - 1] * (1.0 - h2 * g0)) / (1.0 - h2 * g2);
    }
    let norm: f64 = integrate(&xs, h, |k| 2.0 * xs[k] * xs[k] * y[k] * y[k]);
    let s = norm.sqrt();
    for v in &mut y {
        *v /= s;
    }
    Wavefunction { x: xs, values: y }
}

fn integrate(xs: &[f64], h: f64, f: impl Fn(usize) -> f64) -> f64 {
    (0..xs.len()).map(|k| f(k) * if k == 0 || k == xs.len() - 1 { 0.5 } else { 1.0 }).sum::<f64>() * h
}

/// `∫ u_a u_b r dr` for two wavefunctions on the same grid.
pub fn radial_integral(a: &Wavefunction, b: &Wavefunction, h: f64) -> f64 {
    let len = a.x.len().min(b.x.len());
    integrate(&a.x[..len], h, |k| 2.0 * a.x[k].powi(4) * a.values[k] * b.values[k])
}

/// Outer grid edge safely beyond both classical turning points.
pub fn outer_edge(n_star_max: f64) -> f64 {
    (2.0 * n_star_max * (n_star_max + 15.0)).sqrt()
}
