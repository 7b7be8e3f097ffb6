//! Configuration-driven experiments and figure reproduction on top of the
//! `rydgate` library.

pub mod config;
pub mod experiments;
pub mod reproduce;

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use thiserror::Error;

pub use config::{ConfigError, RunConfig};
pub use experiments::Bundle;

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "RYDGATE_OUT";

#[derive(Debug, Error)]
pub enum RunError {
    #[error("configuration error: {0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Physics(#[from] rydgate::Error),
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("unknown figure `{0}`; expected one of {figures:?}", figures = reproduce::FIGURES)]
    UnknownFigure(String),
}

impl RunError {
    /// 1 for physics failures, 2 for configuration and usage errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Physics(_) | RunError::Io { .. } => 1,
            RunError::Config(_) | RunError::UnknownFigure(_) => 2,
        }
    }
}

/// Runs the experiment named in `cfg`.
pub fn run(cfg: &RunConfig) -> Result<Bundle, RunError> {
    let mut b = Bundle::default();
    match cfg.experiment() {
        "stark-scan" => drop(experiments::stark_scan(cfg, &mut b)?),
        "floquet-map" => drop(experiments::floquet_map(cfg, &mut b)?),
        "dynamics" => drop(experiments::dynamics(cfg, &mut b)?),
        "gate" | "fidelity" => drop(experiments::gate(cfg, &mut b)?),
        "optimize" => drop(experiments::run_optimize(cfg, &mut b)?),
        "sensitivity" => drop(experiments::sensitivity(cfg, &mut b)?),
        other => unreachable!("parser admitted experiment `{other}`"),
    }
    Ok(b)
}

/// `--out`, else `$RYDGATE_OUT/<name>`, else `rydgate-out/<name>`.
pub fn output_dir(explicit: Option<&Path>, name: &str) -> PathBuf {
    match explicit {
        Some(p) => p.to_path_buf(),
        None => std::env::var_os(OUT_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("rydgate-out")).join(name),
    }
}

/// Writes data files, `config.resolved` and `summary.txt` into `dir`.
pub fn write_bundle(dir: &Path, cfg: &RunConfig, bundle: &Bundle) -> Result<(), RunError> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| RunError::Io { path, source }
    };
    std::fs::create_dir_all(dir).map_err(io(dir))?;
    for (name, contents) in &bundle.files {
        let p = dir.join(name);
        std::fs::write(&p, contents).map_err(io(&p))?;
    }
    let p = dir.join("config.resolved");
    std::fs::write(&p, cfg.to_string()).map_err(io(&p))?;
    let stamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let mut summary = format!("# rydgate {} {} (unix time {stamp})\n", env!("CARGO_PKG_VERSION"), cfg.experiment());
    for l in &bundle.summary {
        summary.push_str(l);
        summary.push('\n');
    }
    let p = dir.join("summary.txt");
    std::fs::write(&p, summary).map_err(io(&p))?;
    Ok(())
}
