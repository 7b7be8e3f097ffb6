use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rydgate_cli::reproduce::{reproduce, FIGURES};
use rydgate_cli::{output_dir, run, write_bundle, RunConfig, RunError};

#[derive(Parser)]
#[command(name = "rydgate", version, about = "RF-assisted three-body Förster resonance and CCΦ gate simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a configuration file.
    Run {
        config: PathBuf,
        /// Output directory (default: $RYDGATE_OUT/<config name> or rydgate-out/<config name>).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rerun a stored figure configuration and compare against reference values.
    Reproduce {
        #[arg(value_name = "FIGURE", help = format!("one of {}", FIGURES.join(", ")))]
        figure: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn execute(cli: Cli) -> Result<(), RunError> {
    match cli.command {
        Command::Run { config, out } => {
            let text = std::fs::read_to_string(&config).map_err(|source| RunError::Io { path: config.clone(), source })?;
            let cfg = RunConfig::parse(&text)?;
            let bundle = run(&cfg)?;
            let name = config.file_stem().and_then(|s| s.to_str()).unwrap_or("run");
            let dir = output_dir(out.as_deref(), name);
            write_bundle(&dir, &cfg, &bundle)?;
            for line in &bundle.summary {
                println!("{line}");
            }
            println!("output: {}", dir.display());
        }
        Command::Reproduce { figure, out } => {
            let r = reproduce(&figure)?;
            let dir = output_dir(out.as_deref(), &figure);
            write_bundle(&dir, &r.config, &r.bundle)?;
            for line in &r.bundle.summary {
                println!("{line}");
            }
            println!("output: {}", dir.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
