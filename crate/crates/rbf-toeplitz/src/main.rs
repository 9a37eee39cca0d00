use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rbf_toeplitz::cli::{
    run, Command, ExperimentSpec, OutputFormat, ReproTarget, RhsMode, SolverVariant,
};
use rbf_toeplitz::error::Error;
use rbf_toeplitz::kernels::RadialKernel;

#[derive(Parser)]
#[command(
    name = "rbf-toeplitz",
    about = "Banded Toeplitz preconditioners for RBF interpolation: solvers, stencils, spectra, and table/figure reproduction"
)]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Subcommand)]
enum CliCommand {
    /// Solve the interpolation system on [-N, N]^d
    Solve(CommonArgs),
    /// Build (or load from cache) the preconditioner stencil
    Stencil(CommonArgs),
    /// Eigenvalues of the preconditioned operator on [-N, N]
    Spectrum(CommonArgs),
    /// Sample the stencil symbol (Gaussian) or reciprocal kernel symbol (multiquadric)
    Symbol(CommonArgs),
    /// Regenerate published tables and figure data with a PASS/FLAG manifest
    Repro {
        /// table1..table6, fig1, fig2, fig5, fig6, or all
        target: String,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Args)]
struct CommonArgs {
    /// Kernel: gaussian or multiquadric
    #[arg(long, default_value = "gaussian")]
    kernel: String,
    /// Gaussian shape parameter
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    /// Multiquadric offset
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    /// Finite-section halfwidth used to build the stencil
    #[arg(long, default_value_t = 64)]
    n: usize,
    /// Stencil halfband (2m+1 coefficients kept)
    #[arg(long, default_value_t = 9)]
    m: usize,
    /// Grid halfwidth: the system has 2N+1 unknowns per axis
    #[arg(long = "N", default_value_t = 2048)]
    cap_n: usize,
    /// Grid dimension
    #[arg(long, default_value_t = 1)]
    d: usize,
    /// Seed for the uniform right-hand side
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Relative stopping tolerance
    #[arg(long, default_value_t = 1e-13)]
    tol: f64,
    #[arg(long = "max-iters", default_value_t = 200)]
    max_iters: usize,
    /// Right-hand side: uniform, squares, or a path to a file of floats
    #[arg(long, default_value = "uniform")]
    rhs: String,
    /// unpreconditioned, preconditioned, projected-stable, projected-unstable
    /// (default: preconditioned for gaussian, projected-stable for multiquadric)
    #[arg(long)]
    variant: Option<String>,
    /// Output directory
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// csv or json
    #[arg(long, default_value = "csv")]
    format: String,
}

fn build_spec(command: Command, args: &CommonArgs) -> Result<ExperimentSpec, Error> {
    let kernel = match args.kernel.as_str() {
        "gaussian" => RadialKernel::gaussian(args.lambda)?,
        "multiquadric" => RadialKernel::multiquadric(args.c)?,
        other => {
            return Err(Error::Parameter(format!(
                "unknown kernel '{other}' (expected gaussian or multiquadric)"
            )))
        }
    };
    let variant = match &args.variant {
        Some(text) => SolverVariant::parse(text)?,
        None if kernel.is_gaussian() => SolverVariant::Preconditioned,
        None => SolverVariant::ProjectedStable,
    };
    let rhs = match args.rhs.as_str() {
        "uniform" => RhsMode::Uniform,
        "squares" => RhsMode::Squares,
        path => RhsMode::File(PathBuf::from(path)),
    };
    let format = match args.format.as_str() {
        "csv" => OutputFormat::Csv,
        "json" => OutputFormat::Json,
        other => {
            return Err(Error::Parameter(format!(
                "unknown format '{other}' (expected csv or json)"
            )))
        }
    };
    Ok(ExperimentSpec {
        command,
        kernel,
        n: args.n,
        m: args.m,
        cap_n: args.cap_n,
        d: args.d,
        seed: args.seed,
        tol: args.tol,
        max_iters: args.max_iters,
        rhs,
        variant,
        format,
        out: args.out.clone(),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let spec = match &cli.command {
        CliCommand::Solve(args) => build_spec(Command::Solve, args),
        CliCommand::Stencil(args) => build_spec(Command::Stencil, args),
        CliCommand::Spectrum(args) => build_spec(Command::Spectrum, args),
        CliCommand::Symbol(args) => build_spec(Command::Symbol, args),
        CliCommand::Repro { target, common } => {
            ReproTarget::parse(target).and_then(|t| build_spec(Command::Repro(t), common))
        }
    };
    let spec = match spec {
        Ok(spec) => spec,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match run(&spec) {
        Ok(code) => ExitCode::from(code as u8),
        Err(Error::Parameter(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
