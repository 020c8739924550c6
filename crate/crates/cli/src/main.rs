//! `qnl` — batch driver for the nonlocal quasilinear solver: solve a
//! configured problem, run the verification suites, or run a
//! manufactured-solution convergence study.
//!
//! Exit codes: 0 success, 1 configuration error, 2 non-convergence or
//! failed verification.

mod config;
mod verify;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};

use config::RunConfig;
use qnl_core::moser::boundedness_report;
use qnl_core::solver::{fixed_point_solve, mms_study};

#[derive(Parser)]
#[command(name = "qnl", version, about = "Finite element solver and verification harness for a nonlocal quasilinear problem")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the configured problem and write solution + report artifacts.
    Solve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a verification suite and print JSON verdicts.
    Verify {
        #[arg(long)]
        suite: String,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Run the manufactured-solution convergence study.
    Mms {
        #[arg(long)]
        config: PathBuf,
    },
}

const EXIT_OK: u8 = 0;
const EXIT_CONFIG: u8 = 1;
const EXIT_FAILED: u8 = 2;

fn load_config(path: &PathBuf) -> anyhow::Result<RunConfig> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    RunConfig::parse(&text)
}

fn cmd_solve(config: PathBuf, out: PathBuf) -> anyhow::Result<u8> {
    let cfg = load_config(&config)?;
    cfg.solve.validate()?;
    let grid = cfg.build_grid()?;
    let set = cfg.build_set(grid.clone())?;
    let rho = cfg.build_kernel(&grid)?;
    let op = cfg.build_operator(grid.clone())?;
    // everything above is configuration; failures past this point are
    // solver outcomes, not config errors
    let (u, mut report) = fixed_point_solve(&set, &rho, &op, &cfg.solve, None)
        .map_err(|e| anyhow::anyhow!("solver failed: {e}"))?;
    if report.converged {
        report.boundedness = Some(boundedness_report(&u, &set, &rho, &op)?);
    }
    fs::create_dir_all(&out).with_context(|| format!("cannot create {}", out.display()))?;
    let sol_path = out.join("solution.csv");
    let mut file = fs::File::create(&sol_path)?;
    u.write_csv(&mut file)?;
    let report_path = out.join("report.json");
    fs::write(&report_path, serde_json::to_string_pretty(&report)?)?;
    // echo the effective configuration for reproducibility
    fs::write(out.join("config.echo.toml"), cfg.to_toml()?)?;
    println!(
        "wrote {} and {} (converged: {}, outer iterations: {})",
        sol_path.display(),
        report_path.display(),
        report.converged,
        report.outer_iters
    );
    Ok(if report.converged { EXIT_OK } else { EXIT_FAILED })
}

fn cmd_verify(suite: String, config: Option<PathBuf>) -> anyhow::Result<u8> {
    let cfg = match config {
        Some(path) => load_config(&path)?,
        None => RunConfig::default(),
    };
    let report = verify::run_suite(&suite, &cfg)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(if report.pass { EXIT_OK } else { EXIT_FAILED })
}

fn cmd_mms(config: PathBuf) -> anyhow::Result<u8> {
    let cfg = load_config(&config)?;
    cfg.solve.validate()?;
    if cfg.mms.mesh_sizes.is_empty() {
        anyhow::bail!("mms.mesh_sizes must not be empty");
    }
    let pi = std::f64::consts::PI;
    let u_star = move |x: f64, y: f64| (pi * x).cos() * (pi * y).cos();
    let grad = move |x: f64, y: f64| {
        [-pi * (pi * x).sin() * (pi * y).cos(), -pi * (pi * x).cos() * (pi * y).sin()]
    };
    let a = cfg.problem.a;
    let f = move |x: f64, y: f64| (2.0 * pi * pi + a) * u_star(x, y);
    let (rows, compatible) =
        mms_study(&u_star, &grad, &f, cfg.problem.p, a, &cfg.mms.mesh_sizes, &cfg.solve)
            .map_err(|e| anyhow::anyhow!("study failed: {e}"))?;
    if !compatible {
        eprintln!("warning: exact solution is not compatible with the homogeneous flux boundary");
    }
    println!("n,h,l2_error,w1p_error,l2_order,w1p_order");
    for row in &rows {
        let fmt = |o: Option<f64>| o.map(|v| format!("{v:.4}")).unwrap_or_default();
        println!(
            "{},{:.6e},{:.6e},{:.6e},{},{}",
            row.n,
            row.h,
            row.l2_error,
            row.w1p_error,
            fmt(row.l2_order),
            fmt(row.w1p_order)
        );
    }
    Ok(EXIT_OK)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Solve { config, out } => cmd_solve(config, out),
        Command::Verify { suite, config } => cmd_verify(suite, config),
        Command::Mms { config } => cmd_mms(config),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}
