use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use hsl_lab::catalog::names;
use hsl_lab::pipeline::{self, CheckOptions, Run, Subject, SuperMode};
use hsl_lab::report::{curves_csv, default_tolerance, TOL_ENV};

#[derive(Parser)]
#[command(name = "hsl-lab", version, about = "Checks for surfaces with harmonic Gauss maps and superharmonic maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the applicable pipeline on a catalog entry or grid file.
    Check {
        subject: String,
        #[arg(long, default_value_t = 64)]
        grid: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Estimate convergence orders over several grids.
    Convergence {
        subject: String,
        #[arg(long, value_delimiter = ',', default_value = "32,64,128")]
        grids: Vec<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Superspace identity suite.
    Super {
        #[arg(long, value_enum, default_value_t = Mode::Polynomial)]
        mode: Mode,
        #[arg(long, value_delimiter = ',', default_value = "32,64")]
        grids: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// List catalog entries.
    List,
}

#[derive(Args)]
struct Common {
    /// Tolerance for exact checks; defaults to $HSL_LAB_TOL or 1e-10.
    #[arg(long)]
    tol: Option<f64>,
    /// Comma-separated spectral parameters: `2`, `i`, `0.3-1.2i`, `cis:0.628`.
    #[arg(long, value_delimiter = ',', value_parser = parse_lambda)]
    lambdas: Option<Vec<Complex64>>,
    /// Distinguished unit imaginary, as 3, 4 or 8 comma-separated components.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    u: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct Output {
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write per-λ residual curves as CSV.
    #[arg(long)]
    plot_data: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Polynomial,
    Grid,
}

fn parse_lambda(s: &str) -> Result<Complex64, String> {
    let s = s.trim();
    let l = if let Some(angle) = s.strip_prefix("cis:") {
        let t: f64 = angle.parse().map_err(|e| format!("bad angle {angle:?}: {e}"))?;
        Complex64::from_polar(1.0, t)
    } else {
        s.parse::<Complex64>().map_err(|e| format!("bad spectral parameter {s:?}: {e}"))?
    };
    if l.norm() == 0.0 || !l.is_finite() {
        return Err(format!("spectral parameter must be finite and nonzero, got {s:?}"));
    }
    Ok(l)
}

fn options(common: &Common, grid: usize) -> Result<CheckOptions> {
    let tol = common.tol.unwrap_or_else(default_tolerance);
    if tol.is_nan() || tol <= 0.0 {
        bail!("tolerance must be positive (check --tol or ${TOL_ENV})");
    }
    Ok(CheckOptions {
        grid,
        tol,
        lambdas: common.lambdas.clone().unwrap_or_else(pipeline::default_lambdas),
        u: common.u.clone(),
        seed: common.seed,
        ..CheckOptions::default()
    })
}

fn emit(run: &Run, out: &Output) -> Result<usize> {
    let json = run.report.to_json()?;
    match &out.out {
        Some(p) => fs::write(p, format!("{json}\n")).with_context(|| format!("writing {}", p.display()))?,
        None => println!("{json}"),
    }
    if let Some(p) = &out.plot_data {
        fs::write(p, curves_csv(&run.curves)).with_context(|| format!("writing {}", p.display()))?;
    }
    for c in run.report.checks.iter().filter(|c| !c.pass) {
        eprintln!("{c}");
    }
    Ok(run.report.failures())
}

fn run(cli: Cli) -> Result<usize> {
    match cli.command {
        Command::Check { subject, grid, common } => {
            let opts = options(&common, grid)?;
            emit(&pipeline::check(&Subject::resolve(&subject)?, &opts)?, &common.output)
        }
        Command::Convergence { subject, grids, common } => {
            let opts = options(&common, grids.iter().copied().max().unwrap_or(0))?;
            emit(&pipeline::convergence(&Subject::resolve(&subject)?, &grids, &opts)?, &common.output)
        }
        Command::Super { mode, grids, seed, output } => {
            let mode = match mode {
                Mode::Polynomial => SuperMode::Polynomial,
                Mode::Grid => SuperMode::Grid,
            };
            emit(&pipeline::run_super(mode, seed, &grids)?, &output)
        }
        Command::List => {
            for n in names() {
                println!("{n}");
            }
            Ok(0)
        }
    }
}

/// Failure count, saturated so that it never wraps to 0; 255 is reserved for errors.
fn exit_code(failures: usize) -> ExitCode {
    ExitCode::from(failures.min(254) as u8)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(n) => exit_code(n),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(255)
        }
    }
}
