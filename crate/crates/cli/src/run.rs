//! Subcommand execution and artifact writing.

use std::fmt;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use ermakov_qosc::format::fmt_f64;
use ermakov_qosc::pointmap::SolutionFamily;
use ermakov_qosc::scenario::PRESETS;
use ermakov_qosc::verify::{default_times, run_full_verification, VerificationReport};

use crate::config::{ConfigError, RunConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Trajectory CSV only.
    Solve,
    /// One CSV per `(n, t)`.
    Wavefunctions,
    /// Full verification report, plus trajectory and wavefunctions when
    /// enabled in `[output]`.
    Verify,
    /// `verify` on every preset with default parameters.
    Demo,
}

/// `sigma-scale=<r>`: multiply the Ermakov solution by `r` before anything
/// downstream uses it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fault {
    pub sigma_scale: f64,
}

impl FromStr for Fault {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let value = s
            .strip_prefix("sigma-scale=")
            .ok_or_else(|| format!("unknown fault `{s}` (expected sigma-scale=<r>)"))?;
        let r: f64 = value
            .parse()
            .map_err(|_| format!("sigma-scale needs a number, got `{value}`"))?;
        if !(r.is_finite() && r > 0.0) {
            return Err(format!("sigma-scale must be positive and finite, got {r}"));
        }
        Ok(Self { sigma_scale: r })
    }
}

#[derive(Debug)]
pub enum RunError {
    Config(ConfigError),
    Solver(ermakov_qosc::Error),
    Io { path: PathBuf, source: io::Error },
    Threads(String),
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Config(e) => write!(f, "{e}"),
            Self::Solver(e) => write!(f, "solver error: {e}"),
            Self::Io { path, source } => write!(f, "cannot write {}: {source}", path.display()),
            Self::Threads(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<ermakov_qosc::Error> for RunError {
    fn from(e: ermakov_qosc::Error) -> Self {
        Self::Solver(e)
    }
}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        Self::Config(e)
    }
}

#[derive(Debug, Default)]
pub struct RunOutcome {
    /// False only when a verification report failed.
    pub passed: bool,
    pub written: Vec<PathBuf>,
    /// Human-readable report summaries, one per scenario.
    pub summary: String,
}

impl RunOutcome {
    pub fn exit_code(&self) -> u8 {
        if self.passed {
            0
        } else {
            1
        }
    }
}

/// Writes `path` through a temporary file in the same directory and a rename,
/// so readers never observe a partial file.
pub fn write_atomic(
    path: &Path,
    body: impl FnOnce(&mut dyn Write) -> io::Result<()>,
) -> Result<(), RunError> {
    let io_err = |source| RunError::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(io_err)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    {
        let mut w = BufWriter::new(tmp.as_file_mut());
        body(&mut w).map_err(io_err)?;
        w.flush().map_err(io_err)?;
    }
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

/// `psi_n{n}_t{t}.csv` with the shortest round-trip spelling of `t`.
pub fn wavefunction_file_name(n: usize, t: f64) -> String {
    format!("psi_n{n}_t{}.csv", fmt_f64(t))
}

/// Reads `ERMAKOV_QOSC_THREADS`; `None` leaves the pool size to rayon.
pub fn thread_limit(value: Option<&str>) -> Result<Option<usize>, RunError> {
    match value.map(str::trim) {
        None | Some("") => Ok(None),
        Some(v) => match v.parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(RunError::Threads(format!(
                "ERMAKOV_QOSC_THREADS must be a positive integer, got `{v}`"
            ))),
        },
    }
}

/// Runs `command` and writes its artifacts under `out`.
pub fn run(
    command: Command,
    config: &RunConfig,
    out: &Path,
    fault: Option<Fault>,
) -> Result<RunOutcome, RunError> {
    let scale = fault.map_or(1.0, |f| f.sigma_scale);
    match command {
        Command::Solve => {
            let mut outcome = RunOutcome {
                passed: true,
                ..RunOutcome::default()
            };
            let family = solve(config, scale)?;
            outcome.written.push(write_trajectory(&family, out)?);
            Ok(outcome)
        }
        Command::Wavefunctions => {
            let family = solve(config, scale)?;
            Ok(RunOutcome {
                passed: true,
                written: write_wavefunctions(config, &family, out)?,
                summary: String::new(),
            })
        }
        Command::Verify => verify(config, out, scale),
        Command::Demo => {
            let mut outcome = RunOutcome {
                passed: true,
                ..RunOutcome::default()
            };
            for preset in PRESETS {
                let mut c = RunConfig::for_preset(preset);
                c.ermakov = config.ermakov.clone();
                c.grid = config.grid.clone();
                c.checks = config.checks.clone();
                c.output = config.output.clone();
                c.validate()?;
                let sub = verify(&c, &out.join(preset), scale)?;
                outcome.passed &= sub.passed;
                outcome.written.extend(sub.written);
                outcome.summary.push_str(&sub.summary);
            }
            let path = out.join("demo_summary.txt");
            write_atomic(&path, |w| w.write_all(outcome.summary.as_bytes()))?;
            outcome.written.push(path);
            Ok(outcome)
        }
    }
}

fn solve(config: &RunConfig, scale: f64) -> Result<SolutionFamily, RunError> {
    let spec = config.scenario()?;
    let n_max = config
        .output
        .wavefunction_n
        .iter()
        .copied()
        .max()
        .unwrap_or(0)
        .max(16);
    Ok(SolutionFamily::solve(&spec, &config.solve_options(scale))?.with_n_max(n_max))
}

fn write_trajectory(family: &SolutionFamily, out: &Path) -> Result<PathBuf, RunError> {
    let path = out.join("trajectory.csv");
    write_atomic(&path, |w| family.solution().write_trajectory_csv(w))?;
    Ok(path)
}

fn write_wavefunctions(
    config: &RunConfig,
    family: &SolutionFamily,
    out: &Path,
) -> Result<Vec<PathBuf>, RunError> {
    let grid = match config.explicit_grid()? {
        Some(g) => g,
        None => family.default_grid(config.grid.n)?,
    };
    let times = config
        .grid
        .times
        .clone()
        .unwrap_or_else(|| default_times(family.spec()));
    let mut written = Vec::new();
    for &n in &config.output.wavefunction_n {
        for &t in &times {
            let psi = family.eval_psi_n(n, t, &grid)?;
            let path = out.join(wavefunction_file_name(n, t));
            write_atomic(&path, |w| psi.write_csv(w))?;
            written.push(path);
        }
    }
    Ok(written)
}

fn verify(config: &RunConfig, out: &Path, scale: f64) -> Result<RunOutcome, RunError> {
    let spec = config.scenario()?;
    let mut written = Vec::new();
    if config.output.trajectory || config.output.wavefunctions {
        // a failed solve still produces a report below
        if let Ok(family) = solve(config, scale) {
            if config.output.trajectory {
                written.push(write_trajectory(&family, out)?);
            }
            if config.output.wavefunctions {
                written.extend(write_wavefunctions(config, &family, out)?);
            }
        }
    }
    let report: VerificationReport = run_full_verification(&spec, &config.verify_options(scale)?);
    let summary = report.summary();
    if config.output.report {
        let csv = out.join("report.csv");
        write_atomic(&csv, |w| report.write_csv(w))?;
        let txt = out.join("report.txt");
        write_atomic(&txt, |w| w.write_all(summary.as_bytes()))?;
        written.extend([csv, txt]);
    }
    Ok(RunOutcome {
        passed: report.passed(),
        written,
        summary,
    })
}
