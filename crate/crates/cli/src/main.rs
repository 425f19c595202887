//! `polyheat`: runs one experiment per invocation and persists a manifest and
//! CSV outputs. Exit status is 0 on success, 2 when a hypothesis or regime
//! condition is violated, and 1 for any other failure.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{Command, RunConfig};

/// Numerical experiments for the semilinear polyharmonic heat equation.
#[derive(Debug, Parser)]
#[command(name = "polyheat", version)]
struct Cli {
    /// Defaults to the command stored in the config file.
    #[command(subcommand)]
    command: Option<Sub>,

    #[command(flatten)]
    flags: Flags,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Sub {
    /// Tabulate the kernel profile E_d(1, r) and fit its majorant
    KernelProfile,
    /// Sweep smoothing ratios, derive the uniform constant and check the Orlicz bounds
    VerifySmoothing,
    /// Luxemburg norm of a field
    Norm,
    /// Decreasing rearrangement and its running average
    Rearrange,
    /// Sample a witness function and scan its Orlicz membership
    Witness,
    /// Picard/Duhamel solve from a bump datum or an input field
    Solve,
    /// Solve by splitting the datum into a smooth part and a small part
    SplitSolve,
    /// Solve and fit the decay exponent of the first tracked norm
    Decay,
    /// Certify the logarithmic inequality and integrate kappa and zeta
    CertifyLog,
    /// Check the Stirling and power bounds for Gamma
    VerifyGamma,
}

impl From<Sub> for Command {
    fn from(s: Sub) -> Self {
        match s {
            Sub::KernelProfile => Command::KernelProfile,
            Sub::VerifySmoothing => Command::VerifySmoothing,
            Sub::Norm => Command::Norm,
            Sub::Rearrange => Command::Rearrange,
            Sub::Witness => Command::Witness,
            Sub::Solve => Command::Solve,
            Sub::SplitSolve => Command::SplitSolve,
            Sub::Decay => Command::Decay,
            Sub::CertifyLog => Command::CertifyLog,
            Sub::VerifyGamma => Command::VerifyGamma,
        }
    }
}

/// Every flag overrides the matching config-file key.
#[derive(Debug, Args)]
struct Flags {
    /// TOML run configuration
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (POLYHEAT_OUT overrides the config file, this flag overrides both)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for sweeps
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Spatial dimension
    #[arg(long = "N", global = true)]
    dimension: Option<usize>,
    /// Grid points per axis
    #[arg(long, global = true)]
    points: Option<usize>,
    #[arg(long, global = true)]
    box_length: Option<f64>,
    /// Order of the operator (−Δ)^d
    #[arg(long, global = true)]
    d: Option<u32>,

    #[arg(long, global = true)]
    m: Option<f64>,
    #[arg(long, global = true)]
    lambda: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    sign: Option<f64>,

    /// Time horizon
    #[arg(long = "T", global = true)]
    horizon: Option<f64>,
    #[arg(long, global = true)]
    steps: Option<usize>,
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    max_iter: Option<usize>,
    /// Orlicz size of the small part in split-solve
    #[arg(long, global = true)]
    eps: Option<f64>,
    /// Picard metric: weighted or expl2
    #[arg(long, global = true)]
    metric: Option<String>,

    /// Tracked Lebesgue exponents, comma separated; `inf` is accepted
    #[arg(long, global = true, value_delimiter = ',')]
    p: Option<Vec<f64>>,
    /// Young function: expl2, phi8 or lp:<p>
    #[arg(long, global = true)]
    phi: Option<String>,

    /// Sup amplitude of the bump datum
    #[arg(long, global = true)]
    amp: Option<f64>,
    /// Support radius of the bump datum
    #[arg(long, global = true)]
    width: Option<f64>,
    /// Field file replacing the generated datum
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Witness: orl-leb-i, orl-leb-ii, orl-leb-iii:<r> or discontinuity
    #[arg(long, global = true)]
    witness: Option<String>,
    #[arg(long, global = true)]
    alpha: Option<f64>,

    /// Random fields in the smoothing corpus
    #[arg(long, global = true)]
    fields: Option<usize>,
    /// Start of the decay fit window
    #[arg(long, global = true)]
    window_start: Option<f64>,
    /// End of the decay fit window
    #[arg(long, global = true)]
    window_end: Option<f64>,
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn resolve(cli: Cli) -> Result<RunConfig, String> {
    let f = cli.flags;
    let from_file = f.config.is_some();
    let mut c = match &f.config {
        Some(path) => RunConfig::load(path).map_err(|e| e.to_string())?,
        None => RunConfig::default(),
    };
    match cli.command {
        Some(sub) => c.command = sub.into(),
        None if !from_file => return Err("a subcommand or --config is required (see --help)".into()),
        None => {}
    }
    if let Some(dir) = std::env::var_os("POLYHEAT_OUT") {
        c.output_dir = dir.into();
    }
    set(&mut c.output_dir, f.out);
    set(&mut c.seed, f.seed);
    set(&mut c.grid.dimension, f.dimension);
    set(&mut c.grid.points, f.points);
    set(&mut c.grid.box_length, f.box_length);
    set(&mut c.operator.d, f.d);
    set(&mut c.nonlinearity.m, f.m);
    set(&mut c.nonlinearity.lambda, f.lambda);
    set(&mut c.nonlinearity.sign, f.sign);
    set(&mut c.solver.horizon, f.horizon);
    set(&mut c.solver.steps, f.steps);
    set(&mut c.solver.tol, f.tol);
    set(&mut c.solver.max_iter, f.max_iter);
    set(&mut c.solver.eps, f.eps);
    set(&mut c.solver.metric, f.metric);
    set(&mut c.norms.p, f.p);
    set(&mut c.norms.phi, f.phi);
    set(&mut c.data.amp, f.amp);
    set(&mut c.data.width, f.width);
    if f.input.is_some() {
        c.data.input = f.input;
    }
    set(&mut c.data.witness, f.witness);
    set(&mut c.data.alpha, f.alpha);
    set(&mut c.sweep.fields, f.fields);
    if f.window_start.is_some() {
        c.sweep.window_start = f.window_start;
    }
    if f.window_end.is_some() {
        c.sweep.window_end = f.window_end;
    }
    if let Some(jobs) = f.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global()
            .map_err(|e| format!("cannot start {jobs} workers: {e}"))?;
    }
    Ok(c)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let config = match resolve(cli) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
    };
    match commands::run(&config) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is_hypothesis_violation() => {
            eprintln!("hypothesis violation: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
