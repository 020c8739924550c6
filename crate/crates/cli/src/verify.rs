//! Named verification suites for the `verify` subcommand. All checks are
//! deterministic: probe fields are closed-form, not randomized.

use std::sync::Arc;

use anyhow::bail;
use serde::Serialize;

use crate::config::RunConfig;
use qnl_core::convolution::{convolve, gradient_bound_check, young_check, Kernel, KernelPreset};
use qnl_core::grid::{DiscreteField, GridSpec};
use qnl_core::moser::boundedness_report;
use qnl_core::solver::fixed_point_solve;
use qnl_core::structure::{
    default_sample_cloud, norm2, p_laplacian_neumann, pq_laplacian, robin_p_laplacian,
    validate_exponent_conditions, validate_growth, Mode,
};

#[derive(Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub suite: String,
    pub pass: bool,
    pub checks: Vec<Check>,
}

fn check(checks: &mut Vec<Check>, name: &str, pass: bool, detail: String) {
    checks.push(Check { name: name.to_string(), pass, detail });
}

fn probe_fields(grid: &Arc<GridSpec>) -> Vec<DiscreteField> {
    let pi = std::f64::consts::PI;
    vec![
        DiscreteField::constant(grid.clone(), 2.0).unwrap(),
        DiscreteField::from_fn(grid.clone(), |x, y| (pi * x).cos() * (pi * y).cos()).unwrap(),
        DiscreteField::from_fn(grid.clone(), |x, y| (3.0 * x - 2.0 * y).sin() + 0.5).unwrap(),
        DiscreteField::from_fn(grid.clone(), |x, y| (10.0 * x * y).tanh() - x).unwrap(),
    ]
}

fn suite_extension(cfg: &RunConfig, checks: &mut Vec<Check>) -> anyhow::Result<()> {
    let grid = cfg.build_grid()?;
    let op = cfg.build_operator(grid.clone())?;
    let h = grid.h_max();
    let mut identity_ok = true;
    let mut worst_ratio = 0.0f64;
    let mut bound_ok = true;
    for u in probe_fields(&grid) {
        let back = op.restrict(op.extend(&u).unwrap().field())?;
        identity_ok &= back.values() == u.values();
        for p in [1.5, 2.0, 3.0] {
            let ratio = op.extension_norm_ratio(&u, p)?;
            let bound = 2f64.powf(4.0 / p) + 10.0 * h;
            bound_ok &= ratio <= bound;
            worst_ratio = worst_ratio.max(ratio / bound);
        }
    }
    check(checks, "restriction-identity", identity_ok, "E(u) restricted to the source grid equals u".into());
    check(checks, "norm-ratio-bound", bound_ok, format!("worst ratio/bound = {worst_ratio:.3}"));
    Ok(())
}

fn suite_convolution(cfg: &RunConfig, checks: &mut Vec<Check>) -> anyhow::Result<()> {
    let grid = cfg.build_grid()?;
    let op = cfg.build_operator(grid.clone())?;
    let t = op.target().clone();
    let presets = [
        ("delta", KernelPreset::Delta),
        ("box", KernelPreset::Box { radius: 0.2 }),
        ("gaussian", KernelPreset::Gaussian { sigma: 0.15 }),
        ("bump", KernelPreset::Bump { radius: 0.25 }),
    ];
    let mut young_ok = true;
    let mut grad_ok = true;
    for (_, preset) in presets {
        let rho = Kernel::preset(preset, t.h_x(), t.h_y(), true)?;
        for u in probe_fields(&grid) {
            let ext = op.extend(&u)?;
            for r in [1.0, 2.0, 4.0] {
                young_ok &= young_check(&rho, &ext, r)?.pass;
            }
            grad_ok &= gradient_bound_check(&rho, &ext, 2.0)?.pass;
        }
    }
    check(checks, "young-inequality", young_ok, "convolution norm bounded by kernel mass times field norm".into());
    check(checks, "gradient-bound", grad_ok, "convolved gradient bounded with dimension factor 2".into());

    // delta kernel reproduces the field exactly
    let rho = Kernel::preset(KernelPreset::Delta, t.h_x(), t.h_y(), false)?;
    let u = &probe_fields(&grid)[1];
    let ext = op.extend(u)?;
    let conv = convolve(&rho, &ext)?;
    let max_diff = conv
        .values()
        .iter()
        .zip(ext.field().values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    check(checks, "delta-identity", max_diff <= 1e-14, format!("max deviation {max_diff:.2e}"));
    Ok(())
}

fn suite_hypotheses(cfg: &RunConfig, checks: &mut Vec<Check>) -> anyhow::Result<()> {
    let grid = cfg.build_grid()?;
    let cloud = default_sample_cloud();
    let p_lap = p_laplacian_neumann(grid.clone(), 2.0, 1.0)?;
    let pq = pq_laplacian(grid.clone(), 2.5, 1.5, 0.5, 1.0)?;
    let robin = robin_p_laplacian(grid.clone(), 2.0, 1.0, 0.5)?;
    for (name, set, mode) in [
        ("p-laplacian-A", &p_lap, Mode::A),
        ("p-laplacian-H", &p_lap, Mode::H),
        ("pq-laplacian-A", &pq, Mode::A),
        ("robin-H", &robin, Mode::H),
    ] {
        let exp = validate_exponent_conditions(set, mode);
        let growth = validate_growth(set, mode, &cloud);
        let ok = exp.no_violation_found() && growth.no_violation_found();
        let detail = if ok {
            "no violation found".to_string()
        } else {
            let mut v = exp.violations;
            v.extend(growth.violations);
            v.join("; ")
        };
        check(checks, name, ok, detail);
    }

    // a canned violator must be rejected naming its clause
    let mut bad = p_laplacian_neumann(grid, 2.0, 1.0)?;
    let p = bad.p;
    bad.a_fn = Arc::new(move |_x, s: f64, xi: [f64; 2]| {
        let m = (1.0 + s.abs()) * norm2(xi).powf(p - 2.0);
        [m * xi[0], m * xi[1]]
    });
    let verdict = validate_growth(&bad, Mode::A, &cloud);
    let named = verdict.violations.iter().any(|v| v.starts_with("A1"));
    check(
        checks,
        "counterexample-rejected",
        !verdict.no_violation_found() && named,
        format!("violations: {}", verdict.violations.join("; ")),
    );
    Ok(())
}

fn suite_moser(cfg: &RunConfig, checks: &mut Vec<Check>) -> anyhow::Result<()> {
    let grid = cfg.build_grid()?;
    let set = cfg.build_set(grid.clone())?;
    let rho = cfg.build_kernel(&grid)?;
    let op = cfg.build_operator(grid.clone())?;
    let (u, rep) = fixed_point_solve(&set, &rho, &op, &cfg.solve, None)?;
    check(checks, "solve-converged", rep.converged, format!("outer iterations: {}", rep.outer_iters));
    if rep.converged {
        let report = boundedness_report(&u, &set, &rho, &op)?;
        check(checks, "boundedness-certificate", report.pass(), report.verdict.clone());
        check(
            checks,
            "ladder-recovers-max",
            report.sup_check.limit_matches_max,
            format!("ladder limit {} vs nodal max {}", report.probe.sup_norm, report.nodal_max),
        );
    }
    Ok(())
}

pub fn run_suite(suite: &str, cfg: &RunConfig) -> anyhow::Result<VerifyReport> {
    let mut checks = Vec::new();
    match suite {
        "extension" => suite_extension(cfg, &mut checks)?,
        "convolution" => suite_convolution(cfg, &mut checks)?,
        "hypotheses" => suite_hypotheses(cfg, &mut checks)?,
        "moser" => suite_moser(cfg, &mut checks)?,
        "all" => {
            suite_extension(cfg, &mut checks)?;
            suite_convolution(cfg, &mut checks)?;
            suite_hypotheses(cfg, &mut checks)?;
            suite_moser(cfg, &mut checks)?;
        }
        other => bail!("unknown suite '{other}' (expected extension, convolution, hypotheses, moser, all)"),
    }
    let pass = checks.iter().all(|c| c.pass);
    Ok(VerifyReport { suite: suite.to_string(), pass, checks })
}
