//! A-posteriori boundedness verification: truncated power test functions,
//! a termwise energy inequality, a divergent `L^r` exponent ladder, and the
//! `L^r → L^∞` limit with level-set threshold checks.
//!
//! On a fixed grid every nodal field is trivially bounded; these routines
//! certify that the discrete solution's norms behave the way the a priori
//! estimates demand: the ladder norms increase toward the nodal maximum,
//! the truncated energy inequality holds with explicit constants, and the
//! level-set lower bounds are met at every ladder exponent.

use serde::Serialize;

use crate::convolution::Kernel;
use crate::error::{Error, Result};
use crate::extension::ExtensionOperator;
use crate::grid::{DiscreteField, Region};
use crate::solver::{freeze, residual, FrozenNonlocalData};
use crate::structure::{
    critical_exponents, default_sample_cloud, norm2, validate_exponent_conditions, validate_growth,
    CoefficientSet, Mode,
};

/// Exponent ladder bookkeeping: the sequence `r_n`, the corresponding
/// `L^{r_n}` norms, and the auxiliary exponents `q₁`, `q₂` when the
/// critical exponents are finite.
#[derive(Debug, Clone, Serialize)]
pub struct MoserProbe {
    pub p: f64,
    pub n_dim: u32,
    pub q_ratio: f64,
    /// True when the Sobolev exponent is infinite and the ladder had to
    /// fall back to the base exponent `p`.
    pub infinite_sobolev: bool,
    pub q1: Option<f64>,
    pub q2: Option<f64>,
    /// Ladder exponents `r_n`, strictly increasing by the factor `q_ratio`.
    pub exponents: Vec<f64>,
    /// `L^{r_n}` norms of the probed field.
    pub norms: Vec<f64>,
    /// Power levels `κ_n` with `r_n = (κ_n + 1)·base`.
    pub kappas: Vec<f64>,
    /// Largest ladder norm (the sequence is nondecreasing).
    pub sup_norm: f64,
}

impl MoserProbe {
    pub fn validate(&self) -> Result<()> {
        if !(self.q_ratio > 1.0) {
            return Err(Error::InvalidParameter(format!("ladder ratio must exceed 1, got {}", self.q_ratio)));
        }
        for w in self.exponents.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::InvalidParameter("ladder exponents must be strictly increasing".into()));
            }
        }
        let (p_star, p_lower) = critical_exponents(self.p, self.n_dim)?;
        if let Some(q1) = self.q1 {
            if !(q1 > self.p && q1 < p_star) {
                return Err(Error::InvalidParameter(format!("q1 = {q1} outside its open interval")));
            }
        }
        if let Some(q2) = self.q2 {
            if !(q2 > self.p && q2 < p_lower) {
                return Err(Error::InvalidParameter(format!("q2 = {q2} outside its open interval")));
            }
        }
        Ok(())
    }
}

/// Nodal truncated power test function `u · min(u, h)^{κp}`.
///
/// Requires `u ≥ 0` nodally when `κp` is fractional; signed fields must be
/// split with [`DiscreteField::pos_neg_parts`] first.
pub fn moser_test_function(u: &DiscreteField, kappa: f64, p: f64, h: f64) -> Result<DiscreteField> {
    if !(kappa >= 0.0) {
        return Err(Error::InvalidParameter(format!("kappa must be nonnegative, got {kappa}")));
    }
    if !(h > 0.0) {
        return Err(Error::InvalidParameter(format!("truncation level must be positive, got {h}")));
    }
    let kp = kappa * p;
    let integral_power = kp.fract() == 0.0;
    let vals: Result<Vec<f64>> = u
        .values()
        .iter()
        .map(|&ui| {
            let t = ui.min(h);
            if t >= 0.0 {
                Ok(ui * t.powf(kp))
            } else if integral_power {
                Ok(ui * t.powi(kp as i32))
            } else {
                Err(Error::Domain(
                    "negative nodal values with fractional power; split the field with pos_neg_parts first".into(),
                ))
            }
        })
        .collect();
    DiscreteField::new(u.grid().clone(), vals?)
}

/// One side-by-side evaluation of the energy inequality for a nonnegative
/// field (one sign part of the solution).
#[derive(Debug, Clone, Serialize)]
pub struct EnergyPart {
    pub label: String,
    /// `a₄ (∫ |∇v|^p v_h^{κp} + κp ∫_{v≤h} |∇v|^p v_h^{κp})`.
    pub lhs: f64,
    /// Sum of the explicit upper-bound terms.
    pub rhs: f64,
    /// Galerkin slack `‖residual‖₂ · ‖φ‖₂` added to the right side.
    pub slack: f64,
    pub pass: bool,
    pub margin: f64,
}

/// Termwise energy inequality verdict, with the signed solution handled by
/// checking its positive and negative parts separately.
#[derive(Debug, Clone, Serialize)]
pub struct EnergyCheck {
    pub kappa: f64,
    pub h: f64,
    pub tol: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
    pub margin: f64,
    pub parts: Vec<EnergyPart>,
}

const ENERGY_TOL: f64 = 0.05;

fn energy_part(
    label: &str,
    v: &DiscreteField,
    residual_l2: f64,
    set: &CoefficientSet,
    data: &FrozenNonlocalData,
    kappa: f64,
    h: f64,
) -> Result<EnergyPart> {
    let grid = v.grid();
    let p = set.p;
    let kp = kappa * p;
    let vals = v.values();
    let v_h: Vec<f64> = vals.iter().map(|&x| x.min(h).max(0.0)).collect();
    let vh_pow: Vec<f64> = v_h.iter().map(|&x| x.powf(kp)).collect();

    // left side: gradient energy against the truncated power weight, with
    // the extra κp share on the region below the truncation level
    let mut grad_term = 0.0;
    let mut grad_term_trunc = 0.0;
    for tri in grid.triangles() {
        let mut g = [0.0, 0.0];
        let mut weight = 0.0;
        let mut below = 0.0;
        for (vtx, gr) in tri.vertices.iter().zip(tri.grads.iter()) {
            g[0] += vals[*vtx] * gr[0];
            g[1] += vals[*vtx] * gr[1];
            weight += vh_pow[*vtx] / 3.0;
            if vals[*vtx] <= h {
                below += 1.0 / 3.0;
            }
        }
        let e = norm2(g).powf(p);
        grad_term += tri.area * e * weight;
        grad_term_trunc += tri.area * e * weight * below;
    }
    let a4 = set.constants.a4;
    let lhs = a4 * (grad_term + kp * grad_term_trunc);

    // right side, term by term with the set's own growth constants
    let exps = set.exponents();
    let m = grid.lumped_weights();
    let bw = grid.boundary_quadrature().weights().to_vec();
    let c = &set.constants;
    let [al1, al2, al3] = set.alphas;
    let mut rhs = 0.0;
    if c.a5 > 0.0 {
        if exps.p_star.is_infinite() {
            return Err(Error::ValidationRefused(
                "flux lower bound uses the Sobolev exponent, which is infinite here".into(),
            ));
        }
        rhs += (kp + 1.0)
            * c.a5
            * vals
                .iter()
                .zip(&vh_pow)
                .zip(&m)
                .map(|((&vi, &wp), &mi)| mi * vi.powf(exps.p_star) * wp)
                .sum::<f64>();
    }
    if c.a6 > 0.0 {
        rhs += (kp + 1.0) * c.a6 * vh_pow.iter().zip(&m).map(|(&wp, &mi)| mi * wp).sum::<f64>();
    }
    // reaction bound evaluated at the frozen nonlocal data
    let f = set.f_bound.values();
    for i in 0..vals.len() {
        if vals[i] == 0.0 {
            continue;
        }
        let wv = data.w.values()[i].abs();
        let gv = norm2(data.g[i]);
        let bound = f[i] + c.b1 * wv.powf(al1) + c.b2 * gv.powf(al2);
        rhs += m[i] * bound * vals[i] * vh_pow[i];
        if bw[i] > 0.0 {
            rhs += bw[i] * (c.c1 * vals[i].powf(al3) + c.c2) * vals[i] * vh_pow[i];
        }
    }
    let phi = moser_test_function(v, kappa, p, h)?;
    let phi_l2 = phi.values().iter().map(|x| x * x).sum::<f64>().sqrt();
    let slack = residual_l2 * phi_l2;
    let budget = rhs + slack;
    let pass = lhs <= budget * (1.0 + ENERGY_TOL) + 1e-12;
    let margin = if budget > 0.0 { (budget - lhs) / budget } else { 0.0 };
    Ok(EnergyPart { label: label.to_string(), lhs, rhs: budget, slack, pass, margin })
}

/// Evaluate both sides of the truncated energy inequality for a converged
/// solution, splitting signed fields into their positive and negative
/// parts. Refuses coefficient sets that fail the growth and exponent
/// hypotheses required by the estimate.
pub fn energy_inequality_check(
    u: &DiscreteField,
    set: &CoefficientSet,
    data: &FrozenNonlocalData,
    kappa: f64,
    h: f64,
) -> Result<EnergyCheck> {
    set.validate_basic()?;
    let exp_verdict = validate_exponent_conditions(set, Mode::H);
    let growth_verdict = validate_growth(set, Mode::H, &default_sample_cloud());
    if !exp_verdict.no_violation_found() || !growth_verdict.no_violation_found() {
        let mut all = exp_verdict.violations;
        all.extend(growth_verdict.violations);
        return Err(Error::ValidationRefused(format!(
            "energy inequality requires the full hypothesis set; violated: {}",
            all.join("; ")
        )));
    }
    let residual_l2 = {
        let r = residual(u, data, set)?;
        r.iter().map(|x| x * x).sum::<f64>().sqrt()
    };
    let (pos, neg) = u.pos_neg_parts();
    let mut parts = Vec::new();
    if pos.max_abs() > 0.0 || neg.max_abs() == 0.0 {
        parts.push(energy_part("positive", &pos, residual_l2, set, data, kappa, h)?);
    }
    if neg.max_abs() > 0.0 {
        parts.push(energy_part("negative", &neg, residual_l2, set, data, kappa, h)?);
    }
    let lhs = parts.iter().map(|p| p.lhs).sum();
    let rhs = parts.iter().map(|p| p.rhs).sum();
    let pass = parts.iter().all(|p| p.pass);
    let margin = parts.iter().map(|p| p.margin).fold(f64::INFINITY, f64::min);
    Ok(EnergyCheck { kappa, h, tol: ENERGY_TOL, lhs, rhs, pass, margin, parts })
}

/// Geometric exponent ladder `r_n = base · q^n`, where the base is the
/// Sobolev exponent when finite and `p` otherwise (flagged).
pub fn lr_ladder(u: &DiscreteField, p: f64, n_dim: u32, q_ratio: f64, n_steps: usize) -> Result<MoserProbe> {
    if !(q_ratio > 1.0) {
        return Err(Error::InvalidParameter(format!("ladder ratio must exceed 1, got {q_ratio}")));
    }
    let (p_star, p_lower) = critical_exponents(p, n_dim)?;
    let infinite_sobolev = p_star.is_infinite();
    let base = if infinite_sobolev { p } else { p_star };
    let mut exponents = Vec::with_capacity(n_steps + 1);
    let mut norms = Vec::with_capacity(n_steps + 1);
    let mut kappas = Vec::with_capacity(n_steps + 1);
    for n in 0..=n_steps {
        let r = base * q_ratio.powi(n as i32);
        exponents.push(r);
        kappas.push(r / base - 1.0);
        norms.push(u.lp_norm(r, Region::Interior)?);
    }
    let sup_norm = norms.iter().cloned().fold(0.0, f64::max);
    let probe = MoserProbe {
        p,
        n_dim,
        q_ratio,
        infinite_sobolev,
        q1: if p_star.is_finite() { Some((p + p_star) / 2.0) } else { None },
        q2: if p_lower.is_finite() { Some((p + p_lower) / 2.0) } else { None },
        exponents,
        norms,
        kappas,
        sup_norm,
    };
    probe.validate()?;
    Ok(probe)
}

#[derive(Debug, Clone, Serialize)]
pub struct ThresholdRow {
    pub t: f64,
    /// Lumped measure of the level set `{|u| > t}`.
    pub measure: f64,
    /// Skipped when no node exceeds the threshold.
    pub skipped: bool,
    /// `‖u‖_{L^r} ≥ t·|Ω_t|^{1/r}` at every ladder exponent.
    pub level_bound_ok: bool,
    /// Largest-exponent ladder norm exceeds `t·(1 − tol)`.
    pub tail_ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SupLimitVerdict {
    pub tol: f64,
    pub nodal_max: f64,
    pub ladder_limit: f64,
    /// Largest-exponent ladder norm within `tol` of the nodal maximum.
    pub limit_matches_max: bool,
    pub rows: Vec<ThresholdRow>,
    pub pass: bool,
}

const SUP_TOL: f64 = 0.02;

/// Level-set threshold checks along an exponent ladder, and the verdict
/// that the ladder limit recovers the nodal supremum.
pub fn sup_limit_check(u: &DiscreteField, probe: &MoserProbe, thresholds: &[f64]) -> Result<SupLimitVerdict> {
    probe.validate()?;
    if probe.norms.len() != probe.exponents.len() || probe.norms.is_empty() {
        return Err(Error::InvalidParameter("probe carries no ladder norms".into()));
    }
    let nodal_max = u.max_abs();
    let ladder_limit = *probe.norms.last().unwrap();
    let limit_matches_max =
        nodal_max == 0.0 || (nodal_max - ladder_limit).abs() <= SUP_TOL * nodal_max;
    let m = u.grid().lumped_weights();
    let mut rows = Vec::with_capacity(thresholds.len());
    for &t in thresholds {
        if !(t >= 0.0) {
            return Err(Error::InvalidParameter(format!("threshold must be nonnegative, got {t}")));
        }
        if t >= nodal_max {
            return Err(Error::InvalidParameter(format!(
                "threshold {t} is not below the nodal maximum {nodal_max}"
            )));
        }
        let measure: f64 = u
            .values()
            .iter()
            .zip(&m)
            .filter(|(v, _)| v.abs() > t)
            .map(|(_, &mi)| mi)
            .sum();
        if measure == 0.0 {
            rows.push(ThresholdRow { t, measure, skipped: true, level_bound_ok: true, tail_ok: true });
            continue;
        }
        let mut level_bound_ok = true;
        for (&r, &norm) in probe.exponents.iter().zip(&probe.norms) {
            let lower = t * measure.powf(1.0 / r);
            if norm < lower * (1.0 - 1e-9) {
                level_bound_ok = false;
            }
        }
        let tail_ok = ladder_limit >= t * (1.0 - SUP_TOL);
        rows.push(ThresholdRow { t, measure, skipped: false, level_bound_ok, tail_ok });
    }
    let pass = limit_matches_max && rows.iter().all(|r| r.level_bound_ok && r.tail_ok);
    Ok(SupLimitVerdict { tol: SUP_TOL, nodal_max, ladder_limit, limit_matches_max, rows, pass })
}

/// Full boundedness certificate for a converged solution: the interior
/// ladder, the boundary (trace) ladder, the threshold checks, and the
/// energy inequality at `κ = 1`, `h = max/2`.
#[derive(Debug, Clone, Serialize)]
pub struct BoundednessReport {
    pub nodal_max: f64,
    pub probe: MoserProbe,
    /// Boundary `L^r` norms along the same ladder (trace analog).
    pub boundary_norms: Vec<f64>,
    pub boundary_max: f64,
    pub sup_check: SupLimitVerdict,
    pub energy: Option<EnergyCheck>,
    pub failures: Vec<String>,
    pub verdict: String,
}

impl BoundednessReport {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

const LADDER_STEPS: usize = 14;
const FALLBACK_RATIO: f64 = 1.6;

/// Assemble the boundedness certificate. The ladder ratio follows the
/// midpoint choice `q₁ = (p·r̃ + p*)/2` when the Sobolev exponent is
/// finite, and a fixed geometric ratio otherwise.
pub fn boundedness_report(
    u: &DiscreteField,
    set: &CoefficientSet,
    rho: &Kernel,
    op: &ExtensionOperator,
) -> Result<BoundednessReport> {
    set.validate_basic()?;
    let p = set.p;
    let exps = set.exponents();
    let q_ratio = if exps.p_star.is_finite() {
        let q1 = (p * exps.r_tilde + exps.p_star) / 2.0;
        let ratio = exps.p_star / q1;
        if ratio > 1.0 {
            ratio
        } else {
            FALLBACK_RATIO
        }
    } else {
        FALLBACK_RATIO
    };
    let probe = lr_ladder(u, p, exps.n, q_ratio, LADDER_STEPS)?;
    let nodal_max = u.max_abs();
    let thresholds: Vec<f64> = if nodal_max > 0.0 {
        [0.25, 0.5, 0.9].iter().map(|f| f * nodal_max).collect()
    } else {
        Vec::new()
    };
    let sup_check = sup_limit_check(u, &probe, &thresholds)?;
    let mut boundary_norms = Vec::with_capacity(probe.exponents.len());
    for &r in &probe.exponents {
        boundary_norms.push(u.lp_norm(r, Region::Boundary)?);
    }
    let boundary_max = u
        .values()
        .iter()
        .enumerate()
        .filter(|(i, _)| u.grid().is_boundary_node(*i))
        .map(|(_, v)| v.abs())
        .fold(0.0, f64::max);
    let energy = if nodal_max > 0.0 {
        let data = freeze(u, rho, op)?;
        Some(energy_inequality_check(u, set, &data, 1.0, nodal_max / 2.0)?)
    } else {
        None
    };
    let mut failures = Vec::new();
    if !sup_check.pass {
        failures.push("ladder limit or threshold bounds failed".to_string());
    }
    if let Some(e) = &energy {
        if !e.pass {
            failures.push(format!("energy inequality violated: lhs {} > rhs {}", e.lhs, e.rhs));
        }
    }
    if let (Some(&last), true) = (boundary_norms.last(), boundary_max > 0.0) {
        if (boundary_max - last).abs() > SUP_TOL * boundary_max {
            failures.push("boundary trace ladder does not recover the boundary maximum".to_string());
        }
    }
    let verdict = if failures.is_empty() {
        "bounded, certified at desk scale".to_string()
    } else {
        format!("certificate incomplete: {}", failures.join("; "))
    };
    Ok(BoundednessReport {
        nodal_max,
        probe,
        boundary_norms,
        boundary_max,
        sup_check,
        energy,
        failures,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convolution::KernelPreset;
    use crate::extension::CutoffSpec;
    use crate::grid::GridSpec;
    use crate::solver::{local_solve, SolveConfig};
    use crate::structure::{mms_forcing, p_laplacian_neumann};
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn grid(n: usize) -> Arc<GridSpec> {
        Arc::new(GridSpec::unit_square(n).unwrap())
    }

    #[test]
    fn test_function_kp_zero_is_identity() {
        let g = grid(7);
        let u = DiscreteField::from_fn(g, |x, y| x - y).unwrap();
        let phi = moser_test_function(&u, 0.0, 2.0, 0.5).unwrap();
        assert_eq!(phi.values(), u.values());
    }

    #[test]
    fn test_function_truncation_inactive() {
        let g = grid(7);
        let u = DiscreteField::from_fn(g, |x, y| 0.2 + 0.3 * x * y).unwrap();
        let phi = moser_test_function(&u, 1.0, 2.0, 10.0).unwrap();
        for (p, v) in phi.values().iter().zip(u.values()) {
            assert!((p - v.powi(3)).abs() < 1e-15);
        }
    }

    #[test]
    fn test_function_matches_pointwise_recomputation() {
        let g = grid(9);
        let u = DiscreteField::from_fn(g, |x, y| (3.1 * x + 1.7 * y).sin().abs()).unwrap();
        let (kappa, p, h) = (1.0, 2.0, 0.5);
        let phi = moser_test_function(&u, kappa, p, h).unwrap();
        for (p_v, v) in phi.values().iter().zip(u.values()) {
            assert!((p_v - v * v.min(h).powf(kappa * p)).abs() < 1e-15);
        }
    }

    #[test]
    fn test_function_rejects_signed_fractional_power() {
        let g = grid(5);
        let u = DiscreteField::from_fn(g, |x, _| x - 0.5).unwrap();
        let err = moser_test_function(&u, 0.75, 2.0, 1.0).unwrap_err();
        assert!(err.to_string().contains("pos_neg_parts"));
        // integral power is fine on signed fields
        moser_test_function(&u, 1.0, 2.0, 1.0).unwrap();
    }

    #[test]
    fn ladder_constant_field() {
        let g = grid(9);
        let u = DiscreteField::constant(g, 3.0).unwrap();
        let probe = lr_ladder(&u, 1.5, 2, 1.6, 10).unwrap();
        assert!(!probe.infinite_sobolev);
        assert_eq!(probe.exponents[0], 6.0);
        for n in &probe.norms {
            assert!((n - 3.0).abs() < 1e-12, "constant ladder norm {n}");
        }
        assert!(probe.sup_norm <= 3.0 + 1e-12);
    }

    #[test]
    fn ladder_flags_infinite_sobolev_exponent() {
        let g = grid(9);
        let u = DiscreteField::constant(g, 1.0).unwrap();
        let probe = lr_ladder(&u, 2.0, 2, 1.6, 5).unwrap();
        assert!(probe.infinite_sobolev);
        assert_eq!(probe.exponents[0], 2.0);
        assert!(probe.q1.is_none() && probe.q2.is_none());
    }

    #[test]
    fn ladder_monotone_toward_max() {
        let g = grid(17);
        let u = DiscreteField::from_fn(g, |x, y| 5.0 * (PI * x).sin() * (PI * y).sin()).unwrap();
        let probe = lr_ladder(&u, 1.5, 2, 1.6, 14).unwrap();
        for w in probe.norms.windows(2) {
            assert!(w[1] >= w[0] - 1e-12, "power-mean monotonicity violated");
        }
        let max = u.max_abs();
        for n in &probe.norms {
            assert!(*n <= max * (1.0 + 1e-12));
        }
        assert!((probe.sup_norm - max).abs() <= 0.02 * max, "limit {} vs max {max}", probe.sup_norm);
    }

    #[test]
    fn ladder_homogeneity() {
        let g = grid(9);
        let u = DiscreteField::from_fn(g, |x, y| (x + 2.0 * y).cos().abs() + 0.1).unwrap();
        let p1 = lr_ladder(&u, 1.5, 2, 1.7, 8).unwrap();
        let p2 = lr_ladder(&u.scale(2.0), 1.5, 2, 1.7, 8).unwrap();
        for (a, b) in p1.norms.iter().zip(&p2.norms) {
            assert!((2.0 * a - b).abs() <= 1e-12 * b.max(1.0));
        }
    }

    #[test]
    fn ladder_tracks_injected_spike() {
        let g = grid(9);
        let mut u = DiscreteField::constant(g, 1.0).unwrap();
        let mid = u.grid().index(4, 4);
        u.values_mut()[mid] = 1e6;
        let probe = lr_ladder(&u, 1.5, 2, 1.6, 14).unwrap();
        assert!((probe.sup_norm - 1e6).abs() <= 0.02 * 1e6);
    }

    #[test]
    fn energy_holds_on_constant_solution() {
        let g = grid(9);
        let set = p_laplacian_neumann(g.clone(), 2.0, 1.0).unwrap();
        let u = DiscreteField::constant(g.clone(), 2.0).unwrap();
        let data = FrozenNonlocalData::zero(g);
        let check = energy_inequality_check(&u, &set, &data, 1.0, 1.0).unwrap();
        assert!(check.pass);
        assert!(check.lhs.abs() < 1e-14, "constant field has zero gradient energy");
        assert!(check.rhs > 0.0);
    }

    #[test]
    fn energy_refuses_invalid_hypotheses() {
        let g = grid(5);
        let mut set = p_laplacian_neumann(g.clone(), 2.0, 1.0).unwrap();
        set.alphas = [0.0, set.p - 1.0, 0.0]; // gradient growth at the forbidden endpoint
        let u = DiscreteField::constant(g.clone(), 1.0).unwrap();
        let data = FrozenNonlocalData::zero(g);
        let err = energy_inequality_check(&u, &set, &data, 1.0, 1.0).unwrap_err();
        assert!(matches!(err, Error::ValidationRefused(_)), "got {err}");
    }

    #[test]
    fn energy_holds_on_signed_manufactured_solution() {
        let g = grid(17);
        let f = DiscreteField::from_fn(g.clone(), |x, y| {
            (2.0 * PI * PI + 1.0) * (PI * x).cos() * (PI * y).cos()
        })
        .unwrap();
        let set = mms_forcing(2.0, 1.0, f).unwrap();
        let data = FrozenNonlocalData::zero(g.clone());
        let cfg = SolveConfig::default();
        let (u, rep) = local_solve(&data, &set, &DiscreteField::zeros(g), &cfg).unwrap();
        assert!(rep.converged);
        let check = energy_inequality_check(&u, &set, &data, 1.0, u.max_abs() / 2.0).unwrap();
        assert!(check.pass, "lhs {} rhs {} margin {}", check.lhs, check.rhs, check.margin);
        assert_eq!(check.parts.len(), 2, "signed solution checks both parts");
    }

    #[test]
    fn energy_small_kappa_approximates_plain_pairing() {
        let g = grid(9);
        let set = p_laplacian_neumann(g.clone(), 2.0, 1.0).unwrap();
        let data = FrozenNonlocalData::zero(g.clone());
        let cfg = SolveConfig::default();
        let (u, _) = local_solve(&data, &set, &DiscreteField::zeros(g), &cfg).unwrap();
        let big = u.max_abs() * 2.0;
        let tiny = energy_inequality_check(&u, &set, &data, 1e-6, big).unwrap();
        // with κ ≈ 0 and inactive truncation the left side is the plain
        // gradient energy of the solution
        let plain = u.gradient_seminorm(2.0).unwrap().powi(2);
        assert!((tiny.lhs - plain).abs() <= 1e-4 * plain.max(1e-12), "{} vs {plain}", tiny.lhs);
    }

    #[test]
    fn sup_limit_strip_example() {
        let g = grid(33);
        let u = DiscreteField::from_fn(g, |x, _| x).unwrap();
        let probe = lr_ladder(&u, 1.5, 2, 1.6, 14).unwrap();
        let verdict = sup_limit_check(&u, &probe, &[0.9]).unwrap();
        let row = &verdict.rows[0];
        assert!(!row.skipped);
        // nodes with x > 0.9 form roughly a 0.1-wide strip
        assert!((row.measure - 0.1).abs() < 0.05, "strip measure {}", row.measure);
        assert!(row.level_bound_ok && row.tail_ok);
        assert!(verdict.pass, "limit {} max {}", verdict.ladder_limit, verdict.nodal_max);
    }

    #[test]
    fn sup_limit_constant_field() {
        let g = grid(9);
        let u = DiscreteField::constant(g, 4.0).unwrap();
        let probe = lr_ladder(&u, 1.5, 2, 1.6, 12).unwrap();
        let verdict = sup_limit_check(&u, &probe, &[2.0, 0.01]).unwrap();
        assert!(verdict.pass);
        for row in &verdict.rows {
            assert!((row.measure - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sup_limit_rejects_threshold_above_max() {
        let g = grid(9);
        let u = DiscreteField::constant(g, 1.0).unwrap();
        let probe = lr_ladder(&u, 1.5, 2, 1.6, 5).unwrap();
        assert!(sup_limit_check(&u, &probe, &[2.0]).is_err());
    }

    #[test]
    fn report_zero_field_passes() {
        let g = grid(9);
        let set = p_laplacian_neumann(g.clone(), 2.0, 1.0).unwrap();
        let rho = Kernel::preset(KernelPreset::Delta, g.h_x(), g.h_y(), false).unwrap();
        let op = ExtensionOperator::new(g.clone(), CutoffSpec::new(0.1).unwrap()).unwrap();
        let u = DiscreteField::zeros(g);
        let report = boundedness_report(&u, &set, &rho, &op).unwrap();
        assert!(report.pass(), "failures: {:?}", report.failures);
        assert_eq!(report.nodal_max, 0.0);
    }

    #[test]
    fn report_certifies_converged_solution() {
        let g = grid(17);
        let set = p_laplacian_neumann(g.clone(), 2.0, 1.0).unwrap();
        let rho = Kernel::preset(KernelPreset::Gaussian { sigma: 0.15 }, g.h_x(), g.h_y(), true).unwrap();
        let op = ExtensionOperator::new(g.clone(), CutoffSpec::new(0.1).unwrap()).unwrap();
        let cfg = SolveConfig { inner_tol: 1e-12, outer_tol: 1e-12, ..Default::default() };
        let (u, rep) = crate::solver::fixed_point_solve(&set, &rho, &op, &cfg, None).unwrap();
        assert!(rep.converged);
        let report = boundedness_report(&u, &set, &rho, &op).unwrap();
        assert!(report.pass(), "verdict: {}", report.verdict);
        let gap = (report.nodal_max - report.probe.sup_norm).abs();
        assert!(gap <= 0.02 * report.nodal_max);
    }
}
