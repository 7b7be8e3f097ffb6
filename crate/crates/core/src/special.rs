//! Bessel-type integrals used by the quasiclassical matrix elements and the
//! Floquet sideband expansion.

use crate::scalar::{c, Scalar};

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre<T: Scalar>(order: usize) -> (Vec<T>, Vec<T>) {
    let mut nodes = vec![T::zero(); order];
    let mut weights = vec![T::zero(); order];
    let n = order as f64;
    for i in 0..order.div_ceil(2) {
        // Tricomi initial guess, refined by Newton in f64.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=order {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = c(x);
        nodes[order - 1 - i] = c(-x);
        weights[i] = c(w);
        weights[order - 1 - i] = c(w);
    }
    (nodes, weights)
}

/// Anger function `J_nu(x) = (1/pi) ∫_0^pi cos(nu θ - x sin θ) dθ`.
///
/// Reduces to the Bessel function for integer `nu`.
pub fn anger<T: Scalar>(nu: T, x: T) -> T {
    const ORDER: usize = 20;
    let (nodes, weights) = gauss_legendre::<T>(ORDER);
    let panels = 4 + (nu.abs() + x.abs()).ceil().to_usize().unwrap_or(0);
    let pi = T::PI();
    let h = pi / c::<T>(panels as f64);
    let half = h / c(2.0);
    let mut sum = T::zero();
    for p in 0..panels {
        let mid = h * c::<T>(p as f64) + half;
        for (&t, &w) in nodes.iter().zip(&weights) {
            let theta = mid + half * t;
            sum += w * (nu * theta - x * theta.sin()).cos();
        }
    }
    sum * half / pi
}

/// Integer-order Bessel function of the first kind.
///
/// Periodic trapezoid rule on the Bessel integral, which converges
/// geometrically once the sample count exceeds `|n| + |x|`.
pub fn bessel_j<T: Scalar>(n: i32, x: T) -> T {
    let m = 2 * (n.unsigned_abs() as usize + x.abs().ceil().to_usize().unwrap_or(0) + 32);
    let two_pi = T::TAU();
    let step = two_pi / c::<T>(m as f64);
    let nn = c::<T>(n as f64);
    let mut sum = T::zero();
    for k in 0..m {
        let theta = step * c::<T>(k as f64);
        sum += (nn * theta - x * theta.sin()).cos();
    }
    sum / c::<T>(m as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre::<f64>(10);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(18)).sum();
        assert!((s - 2.0 / 19.0).abs() < 1e-14);
    }

    #[test]
    fn bessel_reference_values() {
        // Abramowitz & Stegun table 9.1
        assert!((bessel_j(0, 1.0_f64) - 0.765_197_686_557_966_6).abs() < 1e-15);
        assert!((bessel_j(1, 2.5_f64) - 0.497_094_102_464_274_2).abs() < 1e-15);
        assert!((bessel_j(-3, 1.0_f64) + 0.019_563_353_982_668_4).abs() < 1e-15);
    }

    #[test]
    fn anger_matches_bessel_at_integer_order() {
        for n in -3..=3 {
            let a = anger(n as f64, 1.7);
            let b = bessel_j(n, 1.7);
            assert!((a - b).abs() < 1e-14, "n={n}: {a} vs {b}");
        }
    }

    #[test]
    fn f32_bessel() {
        assert!((bessel_j(0, 1.0_f32) - 0.765_197_7).abs() < 1e-6);
    }
}
