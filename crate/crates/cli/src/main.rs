//! `nodal`: forward nodal sets, reconstruction, closed-loop verification
//! and asymptotic tables.

use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nodal_core::inverse::{reconstruct, InverseError, ReconstructionOptions};
use nodal_core::io::{read_config, read_nodal_file, write_json, IoError, NodalFile};
use nodal_core::pipeline::{asympt, even_range, forward_dataset, verify, PipelineError, Table};
use nodal_core::{ForwardError, Mode, ProblemConfig, SolverOptions};
use serde_json::json;

const GRID_ENV: &str = "NODAL_GRID_N";

#[derive(Parser)]
#[command(
    name = "nodal",
    version,
    about = "Inverse nodal problem for a Dirac operator with a jump"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute eigenvalues and nodal points and write a nodal file.
    Forward(ForwardArgs),
    /// Reconstruct theta, V and m from a nodal file.
    Invert(InvertArgs),
    /// Forward-generate, reconstruct and compare against the config.
    Verify(VerifyArgs),
    /// Tabulate forward results against their asymptotic expansions.
    Asympt(AsymptArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Paper,
    Consistent,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Paper => Mode::Paper,
            ModeArg::Consistent => Mode::Consistent,
        }
    }
}

#[derive(Args)]
struct ForwardArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value_t = 1)]
    n_min: i64,
    #[arg(long)]
    n_max: i64,
    /// Only even indices.
    #[arg(long)]
    even: bool,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct InvertArgs {
    #[arg(long)]
    nodes: PathBuf,
    #[arg(long, value_enum, default_value_t = ModeArg::Consistent)]
    mode: ModeArg,
    /// Reporting grid points per half interval.
    #[arg(long, default_value_t = 64)]
    grid_size: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    n_max: i64,
    #[arg(long, value_enum, default_value_t = ModeArg::Consistent)]
    mode: ModeArg,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the convergence table as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct AsymptArgs {
    #[arg(long)]
    config: PathBuf,
    /// Comma-separated indices.
    #[arg(long = "n", value_delimiter = ',', required = true)]
    ns: Vec<i64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    csv: Option<PathBuf>,
}

/// Error carrying its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Display) -> Self {
        Failure {
            code,
            message: message.to_string(),
        }
    }
}

impl From<ForwardError> for Failure {
    fn from(e: ForwardError) -> Self {
        Failure::new(3, e)
    }
}

impl From<InverseError> for Failure {
    fn from(e: InverseError) -> Self {
        Failure::new(4, e)
    }
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Forward(f) => f.into(),
            PipelineError::Inverse(i) => i.into(),
        }
    }
}

fn io_failure(e: IoError) -> Failure {
    match e {
        IoError::Dataset(d) => d.into(),
        other => Failure::new(1, other),
    }
}

fn load_config(path: &Path) -> Result<ProblemConfig, Failure> {
    read_config(path).map_err(|e| Failure::new(2, e))
}

fn solver_options() -> Result<SolverOptions, Failure> {
    match std::env::var(GRID_ENV) {
        Ok(v) => {
            let n: usize = v.trim().parse().map_err(|_| {
                Failure::new(1, format!("{GRID_ENV}={v} is not a positive integer"))
            })?;
            if n < 2 {
                return Err(Failure::new(1, format!("{GRID_ENV} must be at least 2")));
            }
            Ok(SolverOptions::with_steps(n))
        }
        Err(_) => Ok(SolverOptions::default()),
    }
}

fn emit<T: serde::Serialize>(out: Option<&Path>, value: &T) -> Result<(), Failure> {
    match out {
        Some(path) => write_json(path, value).map_err(|e| Failure::new(1, e)),
        None => {
            let text = serde_json::to_string_pretty(value).map_err(|e| Failure::new(1, e))?;
            println!("{text}");
            Ok(())
        }
    }
}

fn write_csv(path: &Path, table: &Table) -> Result<(), Failure> {
    let fail = |e: csv::Error| Failure::new(1, format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(fail)?;
    w.write_record(&table.columns).map_err(fail)?;
    for row in &table.rows {
        w.write_record(row.iter().map(|v| v.to_string()))
            .map_err(fail)?;
    }
    w.flush().map_err(|e| Failure::new(1, e))
}

fn run_forward(a: ForwardArgs) -> Result<(), Failure> {
    let config = load_config(&a.config)?;
    if a.n_min < 1 || a.n_max < a.n_min {
        return Err(Failure::new(
            1,
            format!("need 1 <= n-min <= n-max, got {}..{}", a.n_min, a.n_max),
        ));
    }
    let ns: Vec<i64> = if a.even {
        even_range(a.n_min, a.n_max)
    } else {
        (a.n_min..=a.n_max).collect()
    };
    let dataset = forward_dataset(&config, &ns, &solver_options()?)?;
    eprintln!("computed {} nodal sets", dataset.entries.len());
    emit(a.out.as_deref(), &NodalFile::new(&dataset, Some(&config)))
}

fn run_invert(a: InvertArgs) -> Result<(), Failure> {
    let file = read_nodal_file(&a.nodes).map_err(io_failure)?;
    let dataset = file.dataset().map_err(io_failure)?;
    let opts = ReconstructionOptions {
        points_per_half: a.grid_size,
        ..Default::default()
    };
    let result = reconstruct(&dataset, a.mode.into(), &opts)?;
    eprintln!(
        "theta = {:.6}, c = {:.6}, m = {:.6}",
        result.theta_hat, result.c_hat, result.m_hat
    );
    let report = json!({
        "version": nodal_core::io::FORMAT_VERSION,
        "source": a.nodes.display().to_string(),
        "n_values": dataset.entries.iter().map(|e| e.n).collect::<Vec<_>>(),
        "reconstruction": result,
    });
    emit(a.out.as_deref(), &report)
}

fn run_verify(a: VerifyArgs) -> Result<(), Failure> {
    let config = load_config(&a.config)?;
    if a.n_max < 2 {
        return Err(Failure::new(1, "n-max must be at least 2"));
    }
    let report = verify(
        &config,
        a.n_max,
        a.mode.into(),
        &solver_options()?,
        &Default::default(),
    )?;
    for c in &report.checks {
        let value = c.value.map_or("n/a".to_string(), |v| format!("{v:.3e}"));
        eprintln!(
            "{:<10} {value:>10} <= {:.0e}  {}",
            c.name,
            c.threshold,
            if c.pass { "PASS" } else { "FAIL" }
        );
    }
    if let Some(f) = &report.failure {
        eprintln!("reconstruction failed: {f}");
    }
    if let Some(cv) = &report.convention {
        eprintln!(
            "second-order convention: {} (stable: {}, pipeline uses {})",
            cv.best, cv.stable, cv.pipeline
        );
    }
    if let Some(path) = &a.csv {
        write_csv(path, &report.table())?;
    }
    emit(a.out.as_deref(), &report)
}

fn run_asympt(a: AsymptArgs) -> Result<(), Failure> {
    let config = load_config(&a.config)?;
    if let Some(bad) = a.ns.iter().find(|&&n| n < 1) {
        return Err(Failure::new(
            1,
            format!("indices must be positive, got {bad}"),
        ));
    }
    let report = asympt(&config, &a.ns, &solver_options()?)?;
    let s = &report.slopes;
    let show = |v: Option<f64>| v.map_or("n/a".to_string(), |v| format!("{v:.3}"));
    eprintln!(
        "log-log slopes: eigenvalue {}, nodes consistent {}, nodes paper {}, delta {}",
        show(s.eigenvalue),
        show(s.node_consistent),
        show(s.node_paper),
        show(s.delta)
    );
    if let Some(path) = &a.csv {
        write_csv(path, &report.table())?;
    }
    emit(a.out.as_deref(), &report)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Forward(a) => run_forward(a),
        Command::Invert(a) => run_invert(a),
        Command::Verify(a) => run_verify(a),
        Command::Asympt(a) => run_asympt(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
