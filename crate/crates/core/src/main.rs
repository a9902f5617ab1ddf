use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use fiberwise::scenario::{builtin, builtin_names, emit_report, load_config, run_scenario, OutputFormat, RunReport};
use fiberwise::Error;

const OUT_DIR_VAR: &str = "FIBERWISE_OUT_DIR";

#[derive(Parser)]
#[command(name = "fiberwise", version, about = "Expansivity and fiber entropy diagnostics for random dynamical systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// List the built-in scenarios.
    List,
    /// Run a built-in scenario or a config file.
    Run {
        /// Built-in name, path to a JSON config, or inline JSON.
        scenario: String,
        /// Output directory. Defaults to $FIBERWISE_OUT_DIR, then the config's output path, then stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
        /// Replaces every seed in the config.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Check a config without running it.
    Validate { path: String },
}

fn rejected(e: &Error) -> ExitCode {
    eprintln!("{e}");
    if matches!(e, Error::Config(_) | Error::Json(_)) {
        ExitCode::from(1)
    } else {
        ExitCode::from(2)
    }
}

fn summary(report: &RunReport) {
    for r in &report.results {
        match (&r.error, r.verdict) {
            (Some(e), _) => eprintln!("{:<20} error: {e}", r.diagnostic),
            (None, Some(v)) => eprintln!("{:<20} {}", r.diagnostic, serde_json::to_string(&v).unwrap_or_default()),
            (None, None) => eprintln!("{:<20} ok", r.diagnostic),
        }
    }
    eprintln!("wall clock: {} ms", report.timing.wall_clock_ms);
}

fn write_outputs(report: &RunReport, format: OutputFormat, dir: Option<PathBuf>) -> std::io::Result<()> {
    let files = emit_report(report, format);
    match dir {
        Some(dir) => {
            std::fs::create_dir_all(&dir)?;
            for f in files {
                let path = dir.join(&f.name);
                std::fs::write(&path, f.contents)?;
                eprintln!("wrote {}", path.display());
            }
        }
        None => {
            let mut out = std::io::stdout().lock();
            let many = files.len() > 1;
            for f in files {
                if many {
                    writeln!(out, "# {}", f.name)?;
                }
                out.write_all(f.contents.as_bytes())?;
            }
        }
    }
    Ok(())
}

fn run(scenario: &str, out: Option<PathBuf>, format: Option<Format>, seed: Option<u64>) -> ExitCode {
    let mut cfg = match load_config(scenario) {
        Ok(c) => c,
        Err(e) => return rejected(&e),
    };
    if let Some(seed) = seed {
        cfg.override_seed(seed);
    }
    let format = match format {
        Some(Format::Json) => OutputFormat::Json,
        Some(Format::Csv) => OutputFormat::Csv,
        None => cfg.output.format,
    };
    let dir = out
        .or_else(|| std::env::var_os(OUT_DIR_VAR).map(PathBuf::from))
        .or_else(|| cfg.output.path.clone().map(PathBuf::from));
    let report = match run_scenario(&cfg) {
        Ok(r) => r,
        Err(e) => return rejected(&e),
    };
    summary(&report);
    if let Err(e) = write_outputs(&report, format, dir) {
        eprintln!("cannot write report: {e}");
        return ExitCode::from(2);
    }
    if report.failed() {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::List => {
            for name in builtin_names() {
                let b = builtin(name).expect("registered");
                println!("{name:<24} {}", b.summary);
            }
            ExitCode::SUCCESS
        }
        Command::Run { scenario, out, format, seed } => run(&scenario, out, format, seed),
        Command::Validate { path } => match load_config(&path) {
            Ok(cfg) => {
                println!("{}: ok ({} diagnostics)", cfg.name, cfg.diagnostics.len());
                ExitCode::SUCCESS
            }
            Err(e) => rejected(&e),
        },
    }
}
