use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ermakov_qosc_cli::{parse_config, run, thread_limit, Command, Fault, RunConfig, RunError};

/// Exact wavefunctions of the time-dependent-mass quantum oscillator.
#[derive(Parser)]
#[command(name = "ermakov-qosc", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Solve the auxiliary equations and write trajectory.csv
    Solve(Common),
    /// Write psi_n{n}_t{t}.csv for the configured quantum numbers and times
    Wavefunctions(Common),
    /// Run every check and write report.csv and report.txt
    Verify(Common),
    /// Verify all presets with default parameters
    Demo(Common),
}

#[derive(Args)]
struct Common {
    /// Configuration file (TOML); defaults to the stationary preset
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory, overriding [output] dir
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Print the resolved configuration and exit without writing anything
    #[arg(long)]
    dry_run: bool,
    /// Corrupt the solution on purpose, e.g. sigma-scale=1.01
    #[arg(long, value_name = "FAULT")]
    inject_fault: Option<Fault>,
}

fn load(path: Option<&PathBuf>) -> Result<RunConfig, String> {
    match path {
        None => Ok(RunConfig::for_preset("stationary")),
        Some(p) => {
            let text =
                fs::read_to_string(p).map_err(|e| format!("cannot read {}: {e}", p.display()))?;
            parse_config(&text).map_err(|e| format!("{}: {e}", p.display()))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, common) = match cli.command {
        Sub::Solve(c) => (Command::Solve, c),
        Sub::Wavefunctions(c) => (Command::Wavefunctions, c),
        Sub::Verify(c) => (Command::Verify, c),
        Sub::Demo(c) => (Command::Demo, c),
    };

    let mut config = match load(common.config.as_ref()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(out) = common.out {
        config.output.dir = out;
    }

    if common.dry_run {
        print!("{}", config.to_toml());
        if let Some(f) = common.inject_fault {
            println!("# inject-fault: sigma-scale={}", f.sigma_scale);
        }
        return ExitCode::SUCCESS;
    }

    match thread_limit(std::env::var("ERMAKOV_QOSC_THREADS").ok().as_deref()) {
        Ok(Some(n)) => {
            if let Err(e) = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
            {
                eprintln!("error: cannot size thread pool: {e}");
                return ExitCode::from(2);
            }
        }
        Ok(None) => {}
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }

    let out = config.output.dir.clone();
    match run(command, &config, &out, common.inject_fault) {
        Ok(outcome) => {
            print!("{}", outcome.summary);
            for path in &outcome.written {
                eprintln!("wrote {}", path.display());
            }
            ExitCode::from(outcome.exit_code())
        }
        Err(e @ RunError::Config(_)) | Err(e @ RunError::Threads(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
