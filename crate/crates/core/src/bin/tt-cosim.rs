use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use tt_cosim::bundled;
use tt_cosim::engine::{self, Scenario};
use tt_cosim::report::{self, Format};
use tt_cosim::scenario::parse_scenario_named;

/// Time-triggered co-simulation of a braking car.
#[derive(Parser)]
#[command(name = "tt-cosim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file (or a bundled scenario by name).
    Run {
        scenario: PathBuf,
        #[arg(long, value_enum, default_value_t = OutputFormat::Summary)]
        format: OutputFormat,
        /// Write the output here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the blue, red and green speed-over-distance curves into a directory.
    Curves { dir: PathBuf },
    /// Parse and validate a scenario without running it.
    Validate { scenario: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Csv,
    Summary,
}

enum Failure {
    Invalid(String),
    Runtime(String),
}

fn load(path: &Path) -> Result<Scenario, Failure> {
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("scenario");
    let text = match fs::read_to_string(path) {
        Ok(text) => text,
        Err(e) => match bundled::text(&path.to_string_lossy()) {
            Some(text) => text.to_string(),
            None => {
                return Err(Failure::Runtime(format!(
                    "cannot read {}: {e}",
                    path.display()
                )))
            }
        },
    };
    parse_scenario_named(&text, stem)
        .map_err(|errs| Failure::Invalid(format!("{}:\n{errs}", path.display())))
}

fn write_out(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::Runtime(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn execute(command: Command) -> Result<(), Failure> {
    match command {
        Command::Run {
            scenario,
            format,
            out,
        } => {
            let sc = load(&scenario)?;
            let trace = engine::run(&sc).map_err(|e| Failure::Runtime(e.to_string()))?;
            let format = match format {
                OutputFormat::Csv => Format::Csv,
                OutputFormat::Summary => Format::Summary,
            };
            write_out(out.as_deref(), &report::emit_trace(&trace, format))
        }
        Command::Curves { dir } => {
            let mut traces = Vec::new();
            for name in ["braking_ideal", "braking_naive", "braking_extrapolating"] {
                let sc = bundled::load(name).map_err(|e| Failure::Invalid(e.to_string()))?;
                traces.push(engine::run(&sc).map_err(|e| Failure::Runtime(e.to_string()))?);
            }
            fs::create_dir_all(&dir)
                .map_err(|e| Failure::Runtime(format!("cannot create {}: {e}", dir.display())))?;
            for (name, csv) in report::emit_braking_curves(&traces[0], &traces[1], &traces[2]) {
                write_out(Some(&dir.join(format!("{name}.csv"))), &csv)?;
            }
            Ok(())
        }
        Command::Validate { scenario } => {
            let sc = load(&scenario)?;
            println!("ok: {} ({})", sc.name, sc.run.mode.as_str());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
