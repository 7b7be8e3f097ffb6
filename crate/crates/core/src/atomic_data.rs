//! Rubidium Rydberg levels: zero-field energies, lifetimes and quadratic
//! polarizabilities, all driven by a versioned constants file.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::matrix_elements::dipole_element;
use crate::scalar::{c, Scalar};
use crate::units::{ghz_to_hartree, AU_FIELD_V_PER_CM, HARTREE_MHZ};

/// The bundled 87Rb constants file.
pub const RB87_DATA: &str = include_str!("../data/rb87.dat");

const L_LETTERS: [char; 4] = ['S', 'P', 'D', 'F'];

/// Fine-structure series `(l, j)`, with `j` stored doubled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Series {
    pub l: u32,
    pub twice_j: u32,
}

impl Series {
    pub fn new(l: u32, twice_j: u32) -> Result<Self> {
        if twice_j != 2 * l + 1 && (l == 0 || twice_j != 2 * l - 1) {
            return Err(Error::InvalidLevel(format!("l = {l}, j = {twice_j}/2")));
        }
        Ok(Self { l, twice_j })
    }

    pub fn parse(s: &str) -> Option<Self> {
        let mut chars = s.chars();
        let letter = chars.next()?;
        let l = L_LETTERS.iter().position(|&c| c == letter)? as u32;
        let j = chars.as_str().strip_suffix("/2")?.parse().ok()?;
        Self::new(l, j).ok()
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let letter = L_LETTERS.get(self.l as usize).copied().unwrap_or('?');
        write!(f, "{letter}{}/2", self.twice_j)
    }
}

/// One-atom state `|n l j m_j>`; `j` and `m_j` are stored doubled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RydbergLevel {
    pub n: u32,
    pub l: u32,
    pub twice_j: u32,
    pub twice_mj: i32,
}

impl RydbergLevel {
    pub fn new(n: u32, l: u32, twice_j: u32, twice_mj: i32) -> Result<Self> {
        let level = Self { n, l, twice_j, twice_mj };
        Series::new(l, twice_j)?;
        if n < 5 || l >= n {
            return Err(Error::InvalidLevel(format!("{level}")));
        }
        if twice_mj.unsigned_abs() > twice_j || (twice_mj - twice_j as i32) % 2 != 0 {
            return Err(Error::InvalidLevel(format!("{level}")));
        }
        Ok(level)
    }

    pub fn s12(n: u32, twice_mj: i32) -> Self {
        Self::new(n, 0, 1, twice_mj).expect("valid S1/2 level")
    }

    pub fn p12(n: u32, twice_mj: i32) -> Self {
        Self::new(n, 1, 1, twice_mj).expect("valid P1/2 level")
    }

    pub fn p32(n: u32, twice_mj: i32) -> Self {
        Self::new(n, 1, 3, twice_mj).expect("valid P3/2 level")
    }

    pub fn series(&self) -> Series {
        Series { l: self.l, twice_j: self.twice_j }
    }

    pub fn j(&self) -> f64 {
        self.twice_j as f64 / 2.0
    }

    pub fn mj(&self) -> f64 {
        self.twice_mj as f64 / 2.0
    }

    /// Same level with `m_j -> -m_j`.
    pub fn mirrored(&self) -> Self {
        Self { twice_mj: -self.twice_mj, ..*self }
    }
}

impl fmt::Display for RydbergLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.twice_mj < 0 { '-' } else { '+' };
        write!(f, "{}{}({sign}{}/2)", self.n, self.series(), self.twice_mj.abs())
    }
}

/// Lifetime parameterization for one series.
///
/// `1/tau_0 = 1/(tau_s n*^gamma)` and
/// `Gamma_BBR = A/n*^D * 2.14e10 / (exp(315780 B / (n*^C T)) - 1)` in 1/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LifetimeFit<T> {
    pub tau_s_ns: T,
    pub gamma: T,
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AtomicConstants<T> {
    pub species: String,
    pub version: String,
    pub rydberg_ghz: T,
    /// `(delta0, delta2)` per series.
    pub rydberg_ritz: BTreeMap<Series, (T, T)>,
    pub lifetime_fit: BTreeMap<Series, LifetimeFit<T>>,
    /// Overrides keyed by `(n, series, |2 m_j|)`, MHz/(V/cm)^2.
    pub polarizability_table: BTreeMap<(u32, Series, u32), T>,
    /// Half-width of the perturbation-sum energy window, GHz.
    pub polarizability_window_ghz: T,
    pub n_min: u32,
    pub n_max: u32,
}

impl<T: Scalar> AtomicConstants<T> {
    /// The 87Rb constants shipped with the crate.
    pub fn rubidium87() -> Self {
        Self::parse(RB87_DATA).expect("bundled constants file is valid")
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut species = None;
        let mut version = None;
        let mut rydberg = None;
        let mut rydberg_ritz = BTreeMap::new();
        let mut lifetime_fit = BTreeMap::new();
        let mut polarizability_table = BTreeMap::new();
        let mut window = c(200.0);
        let mut n_min = 20;
        let mut n_max = 150;

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let err = |msg: String| Error::ConstantsParse { line: line_no, msg };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err("expected `key = value`".into()))?;
            let (key, value) = (key.trim(), value.trim());
            let numbers = || -> Result<Vec<T>> {
                value
                    .split_whitespace()
                    .map(|v| v.parse::<f64>().map(c).map_err(|e| err(format!("{v}: {e}"))))
                    .collect()
            };
            let series_of = |s: &str| Series::parse(s).ok_or_else(|| err(format!("bad series `{s}`")));
            match key {
                "species" => species = Some(value.to_string()),
                "version" => version = Some(value.to_string()),
                "rydberg_ghz" => rydberg = Some(single(numbers()?, &err)?),
                "polarizability_window_ghz" => window = single(numbers()?, &err)?,
                "coverage.n_min" => n_min = single(numbers()?, &err)?.to_u32().ok_or_else(|| err("n_min".into()))?,
                "coverage.n_max" => n_max = single(numbers()?, &err)?.to_u32().ok_or_else(|| err("n_max".into()))?,
                _ => {
                    if let Some(s) = key.strip_prefix("defect.") {
                        let v = numbers()?;
                        if v.len() != 2 {
                            return Err(err("defect needs `delta0 delta2`".into()));
                        }
                        rydberg_ritz.insert(series_of(s)?, (v[0], v[1]));
                    } else if let Some(s) = key.strip_prefix("lifetime.") {
                        let v = numbers()?;
                        if v.len() != 6 {
                            return Err(err("lifetime needs `tau_s gamma A B C D`".into()));
                        }
                        if v[0] <= T::zero() {
                            return Err(err("tau_s must be positive".into()));
                        }
                        let fit = LifetimeFit { tau_s_ns: v[0], gamma: v[1], a: v[2], b: v[3], c: v[4], d: v[5] };
                        lifetime_fit.insert(series_of(s)?, fit);
                    } else if let Some(rest) = key.strip_prefix("polarizability.") {
                        let (level, mj) = rest
                            .rsplit_once('.')
                            .ok_or_else(|| err("expected polarizability.<n><series>.<|m_j|>".into()))?;
                        let digits = level.chars().take_while(|c| c.is_ascii_digit()).count();
                        let n: u32 = level[..digits].parse().map_err(|_| err(format!("bad n in `{level}`")))?;
                        let series = series_of(&level[digits..])?;
                        let twice_mj = mj
                            .strip_suffix("/2")
                            .and_then(|m| m.parse::<u32>().ok())
                            .ok_or_else(|| err(format!("bad m_j `{mj}`")))?;
                        polarizability_table.insert((n, series, twice_mj), single(numbers()?, &err)?);
                    } else {
                        return Err(err(format!("unknown key `{key}`")));
                    }
                }
            }
        }
        let missing = |what: &str| Error::ConstantsParse { line: 0, msg: format!("missing `{what}`") };
        Ok(Self {
            species: species.ok_or_else(|| missing("species"))?,
            version: version.ok_or_else(|| missing("version"))?,
            rydberg_ghz: rydberg.ok_or_else(|| missing("rydberg_ghz"))?,
            rydberg_ritz,
            lifetime_fit,
            polarizability_table,
            polarizability_window_ghz: window,
            n_min,
            n_max,
        })
    }

    /// Effective principal quantum number `n*`.
    pub fn effective_n(&self, level: &RydbergLevel) -> Result<T> {
        self.effective_n_series(level.n, level.series())
    }

    fn effective_n_series(&self, n: u32, series: Series) -> Result<T> {
        if n < self.n_min || n > self.n_max {
            return Err(Error::OutOfCoverage(format!("{n}{series}")));
        }
        let &(d0, d2) = self
            .rydberg_ritz
            .get(&series)
            .ok_or_else(|| Error::MissingDefect(series.to_string()))?;
        let nn = c::<T>(n as f64);
        let x = nn - d0;
        Ok(nn - d0 - d2 / (x * x))
    }

    fn series_energy(&self, n: u32, series: Series) -> Result<T> {
        let ns = self.effective_n_series(n, series)?;
        Ok(-self.rydberg_ghz / (ns * ns))
    }
}

fn single<T: Copy>(v: Vec<T>, err: &impl Fn(String) -> Error) -> Result<T> {
    match v.as_slice() {
        [x] => Ok(*x),
        _ => Err(err("expected exactly one number".into())),
    }
}

/// Zero-field energy below the ionization limit, GHz (negative).
pub fn level_energy<T: Scalar>(level: &RydbergLevel, constants: &AtomicConstants<T>) -> Result<T> {
    constants.series_energy(level.n, level.series())
}

/// Effective lifetime in seconds at `temperature` kelvin.
pub fn lifetime<T: Scalar>(level: &RydbergLevel, temperature: T, constants: &AtomicConstants<T>) -> Result<T> {
    let fit = constants
        .lifetime_fit
        .get(&level.series())
        .ok_or_else(|| Error::MissingLifetime(level.series().to_string()))?;
    if temperature < T::zero() {
        return Err(Error::InvalidLevel(format!("negative temperature {temperature}")));
    }
    let ns = constants.effective_n(level)?;
    let tau0 = fit.tau_s_ns * c(1e-9) * ns.powf(fit.gamma);
    let mut rate = tau0.recip();
    if temperature > T::zero() {
        let arg = c::<T>(315_780.0) * fit.b / (ns.powf(fit.c) * temperature);
        rate += fit.a / ns.powf(fit.d) * c(2.14e10) / arg.exp_m1();
    }
    Ok(rate.recip())
}

/// Quadratic polarizability `alpha` with shift `alpha F^2 / 2`, MHz/(V/cm)^2.
///
/// Table overrides win; otherwise a second-order sum over dipole-coupled
/// levels inside the configured energy window, checked against the doubled
/// window.
pub fn polarizability<T: Scalar>(level: &RydbergLevel, constants: &AtomicConstants<T>) -> Result<T> {
    let key = (level.n, level.series(), level.twice_mj.unsigned_abs());
    if let Some(&alpha) = constants.polarizability_table.get(&key) {
        return Ok(alpha);
    }
    let window = constants.polarizability_window_ghz;
    let alpha = polarizability_sum(level, window, constants)?;
    let wide = polarizability_sum(level, window * c(2.0), constants)?;
    let rel = ((alpha - wide) / wide).abs();
    if rel > c(1e-3) {
        return Err(Error::PolarizabilityNotConverged { level: level.to_string(), rel_change: rel.as_f64() });
    }
    Ok(alpha)
}

/// Second-order perturbation sum over levels within `window_ghz` of `level`.
pub fn polarizability_sum<T: Scalar>(level: &RydbergLevel, window_ghz: T, constants: &AtomicConstants<T>) -> Result<T> {
    let e0 = level_energy(level, constants)?;
    // Level spacing ~ 2 Ry / n^3 bounds how far n' can reach.
    let spacing = c::<T>(2.0) * constants.rydberg_ghz / c::<T>(f64::from(level.n).powi(3));
    let reach = (window_ghz / spacing).ceil().to_u32().unwrap_or(0) + 3;
    let lo = level.n.saturating_sub(reach).max(constants.n_min);
    let hi = (level.n + reach).min(constants.n_max);
    let mut sum = T::zero();
    let lps: &[u32] = if level.l == 0 { &[1] } else { &[level.l - 1, level.l + 1] };
    for &lp in lps {
        for twice_jp in [2 * lp + 1, (2 * lp).wrapping_sub(1)] {
            if lp == 0 && twice_jp != 1 {
                continue;
            }
            if twice_jp.abs_diff(level.twice_j) > 2 || level.twice_mj.unsigned_abs() > twice_jp {
                continue;
            }
            let series = Series { l: lp, twice_j: twice_jp };
            if !constants.rydberg_ritz.contains_key(&series) {
                return Err(Error::MissingDefect(series.to_string()));
            }
            for np in lo.max(lp + 1)..=hi {
                let e = constants.series_energy(np, series)?;
                if (e - e0).abs() > window_ghz {
                    continue;
                }
                let other = RydbergLevel { n: np, l: lp, twice_j: twice_jp, twice_mj: level.twice_mj };
                let z = dipole_element(level, &other, 0, constants)?;
                sum += z * z / c::<T>(ghz_to_hartree((e0 - e).as_f64()));
            }
        }
    }
    let au_to_mhz_per_field2 = HARTREE_MHZ / (AU_FIELD_V_PER_CM * AU_FIELD_V_PER_CM);
    Ok(c::<T>(2.0) * sum * c(au_to_mhz_per_field2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rb() -> AtomicConstants<f64> {
        AtomicConstants::rubidium87()
    }

    #[test]
    fn parses_bundled_file() {
        let k = rb();
        assert_eq!(k.species, "87Rb");
        assert_eq!(k.rydberg_ritz.len(), 5);
        assert_eq!(k.lifetime_fit.len(), 5);
    }

    #[test]
    fn rejects_unknown_keys() {
        let text = "species = X\nversion = 1\nrydberg_ghz = 1\nbogus = 3\n";
        assert!(matches!(
            AtomicConstants::<f64>::parse(text),
            Err(Error::ConstantsParse { line: 4, .. })
        ));
    }

    #[test]
    fn missing_defect_names_series() {
        let text = "species = X\nversion = 1\nrydberg_ghz = 1\n";
        let k = AtomicConstants::<f64>::parse(text).unwrap();
        let e = level_energy(&RydbergLevel::s12(70, 1), &k).unwrap_err();
        assert_eq!(e, Error::MissingDefect("S1/2".into()));
    }

    #[test]
    fn level_labels() {
        assert_eq!(RydbergLevel::p32(70, -3).to_string(), "70P3/2(-3/2)");
        assert!(RydbergLevel::new(70, 0, 3, 1).is_err());
        assert!(RydbergLevel::new(70, 1, 3, 5).is_err());
        assert!(RydbergLevel::new(70, 1, 3, 2).is_err());
    }

    #[test]
    fn table_override_wins() {
        let mut k = rb();
        k.polarizability_table.insert((70, Series { l: 1, twice_j: 3 }, 1), -1.0);
        assert_eq!(polarizability(&RydbergLevel::p32(70, -1), &k).unwrap(), -1.0);
    }
}
