//! Flat `key = value unit` run configuration.
//!
//! One assignment per line, `#` starts a comment. Quantities carry a unit
//! (`R = 10 um`, `F_S = 176.34 mV/cm`) and may list several values sharing
//! one unit (`phi = 0.25 0.5 pi`). Values are stored in the library units:
//! µm, µs, V/cm, MHz, GHz (window), K, rad, and fidelity as a fraction.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
#[error("line {line}, column {column}: {message}")]
pub struct ConfigError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

fn err(line: usize, column: usize, message: impl Into<String>) -> ConfigError {
    ConfigError { line, column, message: message.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dim {
    Length,
    Time,
    Field,
    Frequency,
    Window,
    Temperature,
    Angle,
    Fidelity,
}

impl Dim {
    /// Accepted suffixes and their factor to the canonical unit.
    fn units(self) -> &'static [(&'static str, f64)] {
        match self {
            Dim::Length => &[("um", 1.0), ("nm", 1e-3), ("mm", 1e3)],
            Dim::Time => &[("us", 1.0), ("ns", 1e-3), ("ms", 1e3)],
            Dim::Field => &[("V/cm", 1.0), ("mV/cm", 1e-3)],
            Dim::Frequency => &[("MHz", 1.0), ("kHz", 1e-3), ("GHz", 1e3)],
            Dim::Window => &[("GHz", 1.0), ("MHz", 1e-3)],
            Dim::Temperature => &[("K", 1.0)],
            Dim::Angle => &[("rad", 1.0), ("deg", std::f64::consts::PI / 180.0), ("pi", std::f64::consts::PI)],
            Dim::Fidelity => &[("pp", 1e-2), ("%", 1e-2)],
        }
    }

    pub fn canonical(self) -> &'static str {
        self.units()[0].0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Quantity(Dim),
    Number,
    Integer,
    Flag,
    Word,
    Words,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Numbers(Vec<f64>),
    Flag(bool),
    Words(Vec<String>),
}

/// Every recognised key with its kind and default.
pub const SCHEMA: &[(&str, Kind, &str)] = &[
    ("experiment", Kind::Word, ""),
    ("n", Kind::Integer, "70"),
    ("window", Kind::Quantity(Dim::Window), "2 GHz"),
    ("R", Kind::Quantity(Dim::Length), "10 um"),
    ("next_nearest", Kind::Flag, "true"),
    ("temperature", Kind::Quantity(Dim::Temperature), "300 K"),
    ("F_S", Kind::Quantity(Dim::Field), "0.1763437 V/cm"),
    ("F_RF", Kind::Quantity(Dim::Field), "0.05 V/cm"),
    ("nu", Kind::Quantity(Dim::Frequency), "50 MHz"),
    ("T_ex", Kind::Quantity(Dim::Time), "20 ns"),
    ("T_wait1", Kind::Quantity(Dim::Time), "20 ns"),
    ("T_RF", Kind::Quantity(Dim::Time), "1.27 us"),
    ("T_wait2", Kind::Quantity(Dim::Time), "20 ns"),
    ("T_deex", Kind::Quantity(Dim::Time), "20 ns"),
    ("phi", Kind::Quantity(Dim::Angle), "1 pi"),
    ("rtol", Kind::Number, "1e-10"),
    ("atol", Kind::Number, "1e-12"),
    ("sample_dt", Kind::Quantity(Dim::Time), "0 ns"),
    ("t_int", Kind::Quantity(Dim::Time), "0.635 us"),
    ("t_total", Kind::Quantity(Dim::Time), "2.6 us"),
    ("F_min", Kind::Quantity(Dim::Field), "0.03 V/cm"),
    ("F_max", Kind::Quantity(Dim::Field), "0.195 V/cm"),
    ("F_step", Kind::Quantity(Dim::Field), "1 mV/cm"),
    ("refine_field", Kind::Flag, "false"),
    ("refine_halfwidth", Kind::Quantity(Dim::Field), "1 mV/cm"),
    ("s_min", Kind::Integer, "-1"),
    ("s_max", Kind::Integer, "1"),
    ("tune_waits", Kind::Flag, "false"),
    ("toffoli", Kind::Flag, "false"),
    ("parameters", Kind::Words, "F_RF nu T_wait1 T_wait2"),
    ("bounds.R", Kind::Quantity(Dim::Length), "9 11 um"),
    ("bounds.T_RF", Kind::Quantity(Dim::Time), "0.5 2 us"),
    ("bounds.F_S", Kind::Quantity(Dim::Field), "0.15 0.2 V/cm"),
    ("bounds.F_RF", Kind::Quantity(Dim::Field), "0.02 0.07 V/cm"),
    ("bounds.nu", Kind::Quantity(Dim::Frequency), "40 60 MHz"),
    ("bounds.T_wait1", Kind::Quantity(Dim::Time), "0 200 ns"),
    ("bounds.T_wait2", Kind::Quantity(Dim::Time), "0 200 ns"),
    ("step.R", Kind::Quantity(Dim::Length), "1 nm"),
    ("step.T_RF", Kind::Quantity(Dim::Time), "1 ns"),
    ("step.F_S", Kind::Quantity(Dim::Field), "1e-6 V/cm"),
    ("step.F_RF", Kind::Quantity(Dim::Field), "1e-6 V/cm"),
    ("step.nu", Kind::Quantity(Dim::Frequency), "1 kHz"),
    ("step.T_wait1", Kind::Quantity(Dim::Time), "0.1 ns"),
    ("step.T_wait2", Kind::Quantity(Dim::Time), "0.1 ns"),
    ("budget", Kind::Integer, "2000"),
    ("seed", Kind::Integer, "1"),
    ("anneal_t0", Kind::Number, "1e-4"),
    ("cooling", Kind::Number, "0.95"),
    ("steps_per_temperature", Kind::Integer, "20"),
    ("proposals", Kind::Integer, "1600"),
    ("proposal_scale", Kind::Number, "0.02"),
    ("simplex_tolerance", Kind::Number, "1e-4"),
    ("evaluate_temperatures", Kind::Quantity(Dim::Temperature), "300 K"),
    ("sensitivity_tolerance", Kind::Number, "1e-2"),
    ("fidelity_budget", Kind::Quantity(Dim::Fidelity), "0.1 pp"),
];

pub const EXPERIMENTS: [&str; 7] = ["stark-scan", "dynamics", "gate", "fidelity", "optimize", "sensitivity", "floquet-map"];

fn schema(key: &str) -> Option<(Kind, &'static str)> {
    SCHEMA.iter().find(|(k, _, _)| *k == key).map(|(_, kind, d)| (*kind, *d))
}

/// A parsed configuration with defaults filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    values: BTreeMap<&'static str, Value>,
    /// Keys set explicitly in the file.
    explicit: Vec<&'static str>,
}

fn parse_value(kind: Kind, text: &str, line: usize, column: usize) -> Result<Value, ConfigError> {
    let tokens: Vec<&str> = text.split_whitespace().collect();
    if tokens.is_empty() {
        return Err(err(line, column, "missing value"));
    }
    let numbers = |toks: &[&str]| -> Result<Vec<f64>, ConfigError> {
        toks.iter()
            .map(|t| t.parse::<f64>().map_err(|_| err(line, column, format!("`{t}` is not a number"))))
            .collect()
    };
    match kind {
        Kind::Quantity(dim) => {
            let (unit, nums) = tokens.split_last().expect("non-empty");
            let Some((_, factor)) = dim.units().iter().find(|(u, _)| u == unit) else {
                let known: Vec<&str> = dim.units().iter().map(|(u, _)| *u).collect();
                return Err(err(line, column, format!("expected a unit out of {known:?} after the value, got `{unit}`")));
            };
            if nums.is_empty() {
                return Err(err(line, column, "unit without a value"));
            }
            Ok(Value::Numbers(numbers(nums)?.into_iter().map(|v| v * factor).collect()))
        }
        Kind::Number => Ok(Value::Numbers(numbers(&tokens)?)),
        Kind::Integer => {
            let v = numbers(&tokens)?;
            if v.iter().any(|x| x.fract() != 0.0) {
                return Err(err(line, column, "expected an integer"));
            }
            Ok(Value::Numbers(v))
        }
        Kind::Flag => match tokens.as_slice() {
            ["true"] => Ok(Value::Flag(true)),
            ["false"] => Ok(Value::Flag(false)),
            _ => Err(err(line, column, "expected `true` or `false`")),
        },
        Kind::Word => match tokens.as_slice() {
            [w] => Ok(Value::Words(vec![w.to_string()])),
            _ => Err(err(line, column, "expected a single word")),
        },
        Kind::Words => Ok(Value::Words(tokens.iter().map(|s| s.to_string()).collect())),
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut values = BTreeMap::new();
        for (key, kind, default) in SCHEMA {
            if !default.is_empty() {
                values.insert(*key, parse_value(*kind, default, 0, 0).expect("schema defaults parse"));
            }
        }
        let mut explicit = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("");
            if content.trim().is_empty() {
                continue;
            }
            let Some(eq) = content.find('=') else {
                let col = content.len() - content.trim_start().len() + 1;
                return Err(err(line, col, "expected `key = value`"));
            };
            let key = content[..eq].trim();
            let key_col = content.len() - content.trim_start().len() + 1;
            let Some((kind, _)) = schema(key) else {
                return Err(err(line, key_col, format!("unknown key `{key}`")));
            };
            let static_key = SCHEMA.iter().find(|(k, _, _)| *k == key).map(|(k, _, _)| *k).expect("known");
            if explicit.contains(&static_key) {
                return Err(err(line, key_col, format!("`{key}` set twice")));
            }
            let rest = &content[eq + 1..];
            let value_col = eq + 2 + (rest.len() - rest.trim_start().len());
            let value = parse_value(kind, rest, line, value_col)?;
            if key == "experiment" {
                if let Value::Words(w) = &value {
                    if !EXPERIMENTS.contains(&w[0].as_str()) {
                        return Err(err(line, value_col, format!("unknown experiment `{}`; expected one of {EXPERIMENTS:?}", w[0])));
                    }
                }
            }
            values.insert(static_key, value);
            explicit.push(static_key);
        }
        if !explicit.contains(&"experiment") {
            return Err(err(1, 1, "the configuration must set `experiment`"));
        }
        Ok(Self { values, explicit })
    }

    pub fn experiment(&self) -> &str {
        match &self.values["experiment"] {
            Value::Words(w) => &w[0],
            _ => unreachable!("experiment is a word"),
        }
    }

    pub fn is_explicit(&self, key: &str) -> bool {
        self.explicit.iter().any(|k| *k == key)
    }

    pub fn list(&self, key: &str) -> &[f64] {
        match self.values.get(key) {
            Some(Value::Numbers(v)) => v,
            _ => panic!("`{key}` is not a numeric key"),
        }
    }

    /// Single numeric value; a list is a usage error.
    pub fn number(&self, key: &str) -> Result<f64, ConfigError> {
        match self.list(key) {
            [v] => Ok(*v),
            other => Err(err(0, 0, format!("`{key}` needs exactly one value, got {}", other.len()))),
        }
    }

    pub fn integer(&self, key: &str) -> Result<i64, ConfigError> {
        self.number(key).map(|v| v as i64)
    }

    pub fn flag(&self, key: &str) -> bool {
        matches!(self.values.get(key), Some(Value::Flag(true)))
    }

    pub fn words(&self, key: &str) -> &[String] {
        match self.values.get(key) {
            Some(Value::Words(w)) => w,
            _ => panic!("`{key}` is not a word key"),
        }
    }

    /// Overrides one key, as if it had been written in the file.
    pub fn set(&mut self, key: &str, text: &str) -> Result<(), ConfigError> {
        let Some((kind, _)) = schema(key) else {
            return Err(err(0, 0, format!("unknown key `{key}`")));
        };
        let static_key = SCHEMA.iter().find(|(k, _, _)| *k == key).map(|(k, _, _)| *k).expect("known");
        self.values.insert(static_key, parse_value(kind, text, 0, 0)?);
        if !self.explicit.contains(&static_key) {
            self.explicit.push(static_key);
        }
        Ok(())
    }
}

/// Fully resolved echo in schema order, in canonical units.
impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (key, kind, _) in SCHEMA {
            let Some(v) = self.values.get(key) else { continue };
            let text = match v {
                Value::Numbers(n) => {
                    let nums: Vec<String> = n.iter().map(|x| format!("{x}")).collect();
                    match kind {
                        Kind::Quantity(d) => format!("{} {}", nums.join(" "), d.canonical()),
                        _ => nums.join(" "),
                    }
                }
                Value::Flag(b) => b.to_string(),
                Value::Words(w) => w.join(" "),
            };
            let mark = if self.is_explicit(key) { "" } else { "  # default" };
            writeln!(f, "{key} = {text}{mark}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn units_convert() {
        let c = RunConfig::parse("experiment = gate\nR = 9800 nm\nT_RF = 1270 ns\nF_S = 180.5 mV/cm\nphi = 0.5 pi\n").unwrap();
        assert!((c.number("R").unwrap() - 9.8).abs() < 1e-12);
        assert!((c.number("T_RF").unwrap() - 1.27).abs() < 1e-12);
        assert!((c.number("F_S").unwrap() - 0.1805).abs() < 1e-12);
        assert!((c.number("phi").unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert_eq!(c.number("nu").unwrap(), 50.0);
    }

    #[test]
    fn errors_carry_position() {
        let e = RunConfig::parse("experiment = gate\n  bogus = 3\n").unwrap_err();
        assert_eq!((e.line, e.column), (2, 3));
        let e = RunConfig::parse("experiment = gate\nR = 10\n").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(e.message.contains("unit"));
        let e = RunConfig::parse("experiment = gate\nR = ten um\n").unwrap_err();
        assert_eq!((e.line, e.column), (2, 5));
    }

    #[test]
    fn experiment_required_and_known() {
        assert!(RunConfig::parse("").is_err());
        assert!(RunConfig::parse("R = 10 um").is_err());
        assert!(RunConfig::parse("experiment = teleport").is_err());
    }

    #[test]
    fn echo_reparses() {
        let c = RunConfig::parse("experiment = optimize\nphi = 0.25 1 pi\nseed = 7\n").unwrap();
        let echo = c.to_string();
        let again = RunConfig::parse(&echo).unwrap();
        assert_eq!(again.list("phi"), c.list("phi"));
        assert_eq!(again.number("F_S").unwrap(), c.number("F_S").unwrap());
    }
}
