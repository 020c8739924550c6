//! Coefficient triples `(A, B, C)` with their structure constants, critical
//! exponent arithmetic and sampled hypothesis validators.
//!
//! The growth validators are falsifiers, not proofs: the hypotheses
//! quantify over almost every `x` and all `(s, xi)`, so a finite sample
//! cloud can only refute. A passing verdict reads "no violation found".

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::DiscreteField;

pub type Point2 = [f64; 2];
pub type Vec2 = [f64; 2];

/// `A(x, s, xi)` -> flux vector.
pub type FluxFn = Arc<dyn Fn(Point2, f64, Vec2) -> Vec2 + Send + Sync>;
/// Jacobian of `A` in `xi` (2x2, row major).
pub type FluxJacFn = Arc<dyn Fn(Point2, f64, Vec2) -> [[f64; 2]; 2] + Send + Sync>;
/// `B(x, s, xi)` -> reaction value; `s` and `xi` are the frozen nonlocal data.
pub type SourceFn = Arc<dyn Fn(Point2, f64, Vec2) -> f64 + Send + Sync>;
/// `C(x, s)` -> boundary flux value.
pub type BoundaryFn = Arc<dyn Fn(Point2, f64) -> f64 + Send + Sync>;
/// Derivative of `C` in `s`.
pub type BoundaryDerivFn = Arc<dyn Fn(Point2, f64) -> f64 + Send + Sync>;

pub fn norm2(v: Vec2) -> f64 {
    (v[0] * v[0] + v[1] * v[1]).sqrt()
}

/// The nonnegative constants of the growth conditions.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct StructureConstants {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
    pub a5: f64,
    pub a6: f64,
    pub b1: f64,
    pub b2: f64,
    pub c1: f64,
    pub c2: f64,
}

impl StructureConstants {
    fn validate(&self) -> Result<()> {
        let all = [self.a1, self.a2, self.a3, self.a4, self.a5, self.a6, self.b1, self.b2, self.c1, self.c2];
        if all.iter().any(|c| !(*c >= 0.0)) {
            return Err(Error::InvalidParameter("structure constants must be nonnegative".into()));
        }
        if !(self.a4 > 0.0) {
            return Err(Error::InvalidParameter("ellipticity constant a4 must be positive".into()));
        }
        Ok(())
    }
}

/// Full coefficient data of the boundary value problem.
#[derive(Clone)]
pub struct CoefficientSet {
    pub name: String,
    pub p: f64,
    /// Zeroth-order constant in front of `|u|^{p-2} u`.
    pub a: f64,
    pub a_fn: FluxFn,
    pub b_fn: SourceFn,
    pub c_fn: BoundaryFn,
    /// Analytic Jacobian of the flux in `xi`, when available.
    pub a_jac: Option<FluxJacFn>,
    /// Analytic derivative of the boundary flux in `s`, when available.
    pub c_deriv: Option<BoundaryDerivFn>,
    pub constants: StructureConstants,
    /// Growth exponents `alpha_1, alpha_2, alpha_3`.
    pub alphas: [f64; 3],
    /// Nonnegative bound function for the reaction growth.
    pub f_bound: DiscreteField,
    /// Integrability tag of `f_bound`.
    pub r: f64,
}

impl fmt::Debug for CoefficientSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CoefficientSet")
            .field("name", &self.name)
            .field("p", &self.p)
            .field("a", &self.a)
            .field("constants", &self.constants)
            .field("alphas", &self.alphas)
            .field("r", &self.r)
            .finish()
    }
}

impl CoefficientSet {
    pub fn validate_basic(&self) -> Result<()> {
        if !(self.p > 1.0) {
            return Err(Error::InvalidParameter(format!("p must exceed 1, got {}", self.p)));
        }
        if !(self.a > 0.0) {
            return Err(Error::InvalidParameter(format!("zeroth-order constant a must be positive, got {}", self.a)));
        }
        self.constants.validate()?;
        if self.alphas.iter().any(|a| !(*a >= 0.0)) {
            return Err(Error::InvalidParameter("growth exponents must be nonnegative".into()));
        }
        if self.f_bound.values().iter().any(|v| *v < 0.0) {
            return Err(Error::InvalidParameter("reaction bound function must be nonnegative".into()));
        }
        Ok(())
    }

    pub fn exponents(&self) -> ExponentData {
        ExponentData::new(self.p, 2, self.r, self.alphas)
    }
}

/// Critical exponents `(p*, p_*)` for dimension `n`; infinite when `p >= n`.
pub fn critical_exponents(p: f64, n: u32) -> Result<(f64, f64)> {
    if !(p > 1.0) {
        return Err(Error::InvalidExponent(p));
    }
    if n < 2 {
        return Err(Error::InvalidParameter(format!("dimension must be at least 2, got {n}")));
    }
    let nf = n as f64;
    if p < nf {
        Ok((nf * p / (nf - p), (nf - 1.0) * p / (nf - p)))
    } else {
        Ok((f64::INFINITY, f64::INFINITY))
    }
}

/// Exponent bookkeeping derived from `p`, the dimension and the growth data.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct ExponentData {
    pub n: u32,
    pub p: f64,
    pub p_star: f64,
    pub p_lower_star: f64,
    /// `max{r, p*/(p*-alpha_1), p/(p-alpha_2)}`.
    pub r_tilde: f64,
}

impl ExponentData {
    pub fn new(p: f64, n: u32, r: f64, alphas: [f64; 3]) -> Self {
        let (p_star, p_lower_star) = critical_exponents(p, n).expect("validated p");
        let r1 = if p_star.is_infinite() { 1.0 } else { p_star / (p_star - alphas[0]) };
        let r2 = p / (p - alphas[1]);
        ExponentData { n, p, p_star, p_lower_star, r_tilde: r.max(r1).max(r2) }
    }

    /// Whether the ladder condition `r_tilde < p*/p` holds.
    pub fn ladder_condition(&self) -> bool {
        self.r_tilde < self.p_star / self.p
    }
}

/// Which hypothesis family a validator targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Existence hypotheses: growth (A1)-(A5) and the exponent window
    /// `alpha_i in [0, p-1)`, `r in [1, p*)`.
    A,
    /// Boundedness hypotheses: growth (H1)-(H4) and the tighter window on
    /// `alpha_1, alpha_2` with `r in [1, p*/p)`.
    H,
}

/// Verdict of a sampled validation: the list of violated clause names, or
/// "no violation found" when empty.
#[derive(Debug, Clone, serde::Serialize)]
pub struct Verdict {
    pub violations: Vec<String>,
}

impl Verdict {
    pub fn no_violation_found(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check the exponent windows of the chosen hypothesis family.
pub fn validate_exponent_conditions(set: &CoefficientSet, mode: Mode) -> Verdict {
    let mut violations = Vec::new();
    let p = set.p;
    let [a1, a2, a3] = set.alphas;
    let exp = set.exponents();
    match mode {
        Mode::A => {
            for (name, alpha) in [("alpha1", a1), ("alpha2", a2), ("alpha3", a3)] {
                if !(alpha < p - 1.0) {
                    violations.push(format!("A-exponent-range: {name} = {alpha} outside [0, p-1) = [0, {})", p - 1.0));
                }
            }
            if !(set.r >= 1.0 && set.r < exp.p_star) {
                violations.push(format!("A-exponent-range: r = {} outside [1, p*) = [1, {})", set.r, exp.p_star));
            }
        }
        Mode::H => {
            if !(a1 < exp.p_star - p) {
                violations.push(format!("H-exponent-range: alpha1 = {a1} outside [0, p*-p) = [0, {})", exp.p_star - p));
            }
            let bound2 = if exp.p_star.is_infinite() {
                p - 1.0
            } else {
                (p - 1.0).min(p / exp.p_star * (exp.p_star - p))
            };
            if !(a2 < bound2) {
                violations.push(format!("H-exponent-range: alpha2 = {a2} outside [0, {bound2})"));
            }
            if !(set.r >= 1.0 && set.r < exp.p_star / p) {
                violations.push(format!("H-exponent-range: r = {} outside [1, p*/p) = [1, {})", set.r, exp.p_star / p));
            }
        }
    }
    Verdict { violations }
}

/// One evaluation sample `(x, s, xi)` for the growth falsifiers.
pub type Sample = (Point2, f64, Vec2);

/// The documented default cloud: a 5x5 tensor grid over the unit square,
/// `s in {0, ±1, ±10}`, `xi` the origin plus 8 directions on circles of
/// radius 1 and 10.
pub fn default_sample_cloud() -> Vec<Sample> {
    let mut xs = Vec::new();
    for i in 0..5 {
        for j in 0..5 {
            xs.push([i as f64 / 4.0, j as f64 / 4.0]);
        }
    }
    let ss = [0.0, 1.0, -1.0, 10.0, -10.0];
    let mut xis = vec![[0.0, 0.0]];
    for radius in [1.0, 10.0] {
        for k in 0..8 {
            let th = std::f64::consts::PI * k as f64 / 4.0;
            xis.push([radius * th.cos(), radius * th.sin()]);
        }
    }
    let mut cloud = Vec::new();
    for &x in &xs {
        for &s in &ss {
            for &xi in &xis {
                cloud.push((x, s, xi));
            }
        }
    }
    cloud
}

const GROWTH_SLACK: f64 = 1e-9;

fn le(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs * (1.0 + GROWTH_SLACK) + 1e-12
}

/// Sampled falsification of the growth clauses. Both monotonicity readings
/// of (A2) are checked: the stated form `A(x, s, xi-xi')·(xi-xi') > 0` and
/// the difference form `(A(x,s,xi)-A(x,s,xi'))·(xi-xi') > 0`.
pub fn validate_growth(set: &CoefficientSet, mode: Mode, samples: &[Sample]) -> Verdict {
    let mut violations = Vec::new();
    let p = set.p;
    let k = &set.constants;
    let [al1, al2, al3] = set.alphas;
    let exp = set.exponents();
    let f_at = |x: Point2| nearest_value(&set.f_bound, x);
    let mut seen = std::collections::BTreeSet::new();
    let mut record = |clause: &str, detail: String| {
        if seen.insert(clause.to_string()) {
            violations.push(format!("{clause}: {detail}"));
        }
    };

    for &(x, s, xi) in samples {
        let a_val = (set.a_fn)(x, s, xi);
        let a_mag = norm2(a_val);
        let xi_mag = norm2(xi);
        match mode {
            Mode::A => {
                if !le(a_mag, k.a1 * xi_mag.powf(p - 1.0) + k.a2 * s.abs().powf(p - 1.0) + k.a3) {
                    record("A1", format!("|A| = {a_mag} at s = {s}, |xi| = {xi_mag}"));
                }
                let pairing = a_val[0] * xi[0] + a_val[1] * xi[1];
                if !(pairing >= k.a4 * xi_mag.powf(p) - k.a5 - 1e-12) {
                    record("A3", format!("A·xi = {pairing} at |xi| = {xi_mag}"));
                }
            }
            Mode::H => {
                let s_pow = if exp.p_star.is_infinite() {
                    if k.a2 == 0.0 { 0.0 } else { f64::INFINITY }
                } else {
                    s.abs().powf(exp.p_star * (p - 1.0) / p)
                };
                if !le(a_mag, k.a1 * xi_mag.powf(p - 1.0) + k.a2 * s_pow + k.a3) {
                    record("H1", format!("|A| = {a_mag} at s = {s}, |xi| = {xi_mag}"));
                }
                let s_star = if exp.p_star.is_infinite() {
                    if k.a5 == 0.0 { 0.0 } else { f64::INFINITY }
                } else {
                    s.abs().powf(exp.p_star)
                };
                let pairing = a_val[0] * xi[0] + a_val[1] * xi[1];
                if !(pairing >= k.a4 * xi_mag.powf(p) - k.a5 * s_star - k.a6 - 1e-12) {
                    record("H2", format!("A·xi = {pairing} at s = {s}, |xi| = {xi_mag}"));
                }
            }
        }

        // reaction growth (A4)/(H3)
        let b_val = (set.b_fn)(x, s, xi).abs();
        let b_bound = f_at(x) + k.b1 * s.abs().powf(al1) + k.b2 * xi_mag.powf(al2);
        let clause = if mode == Mode::A { "A4" } else { "H3" };
        if !le(b_val, b_bound) {
            record(clause, format!("|B| = {b_val} exceeds bound {b_bound} at s = {s}, |xi| = {xi_mag}"));
        }

        // boundary growth (A5)/(H4)
        let c_val = (set.c_fn)(x, s).abs();
        match mode {
            Mode::A => {
                if !le(c_val, k.c1 * s.abs().powf(al3) + k.c2) {
                    record("A5", format!("|C| = {c_val} at s = {s}"));
                }
            }
            Mode::H => {
                let bound = if exp.p_lower_star.is_infinite() {
                    if k.c1 == 0.0 { k.c2 } else { f64::INFINITY }
                } else {
                    k.c1 * s.abs().powf(exp.p_lower_star - 1.0) + k.c2
                };
                if !le(c_val, bound) {
                    record("H4", format!("|C| = {c_val} at s = {s}"));
                }
            }
        }
    }

    // strict monotonicity pairings on distinct xi samples
    if mode == Mode::A {
        let xis: Vec<Vec2> = {
            let mut v: Vec<Vec2> = Vec::new();
            for &(_, _, xi) in samples.iter() {
                if !v.iter().any(|w| w == &xi) {
                    v.push(xi);
                }
                if v.len() >= 12 {
                    break;
                }
            }
            v
        };
        let x0 = samples.first().map(|s| s.0).unwrap_or([0.5, 0.5]);
        for &s in &[0.0, 1.0, -2.0] {
            for (i, &xi) in xis.iter().enumerate() {
                for &xj in xis.iter().skip(i + 1) {
                    let d = [xi[0] - xj[0], xi[1] - xj[1]];
                    if d == [0.0, 0.0] {
                        continue;
                    }
                    let a_d = (set.a_fn)(x0, s, d);
                    if !(a_d[0] * d[0] + a_d[1] * d[1] > 0.0) {
                        record("A2", format!("A(x, {s}, d)·d <= 0 for d = ({}, {})", d[0], d[1]));
                    }
                    let ai = (set.a_fn)(x0, s, xi);
                    let aj = (set.a_fn)(x0, s, xj);
                    let diff = (ai[0] - aj[0]) * d[0] + (ai[1] - aj[1]) * d[1];
                    if !(diff > 0.0) {
                        record("A2-difference", format!("(A(xi)-A(xi'))·(xi-xi') = {diff}"));
                    }
                }
            }
        }
    }

    Verdict { violations }
}

fn nearest_value(f: &DiscreteField, x: Point2) -> f64 {
    let g = f.grid();
    let r = g.rect();
    let ix = ((x[0] - r.x_min) / g.h_x()).round().clamp(0.0, (g.n_x() - 1) as f64) as usize;
    let iy = ((x[1] - r.y_min) / g.h_y()).round().clamp(0.0, (g.n_y() - 1) as f64) as usize;
    f.values()[g.index(ix, iy)]
}

fn p_flux(p: f64) -> FluxFn {
    Arc::new(move |_x, _s, xi| {
        let m = norm2(xi);
        if m == 0.0 {
            [0.0, 0.0]
        } else {
            let c = m.powf(p - 2.0);
            [c * xi[0], c * xi[1]]
        }
    })
}

/// Regularized Jacobian of `|xi|^{p-2} xi`; the regularization only enters
/// here, never in residual evaluation.
fn p_flux_jac(p: f64, eps: f64) -> FluxJacFn {
    Arc::new(move |_x, _s, xi| {
        let m2 = xi[0] * xi[0] + xi[1] * xi[1] + eps * eps;
        let m = m2.sqrt();
        let c = m.powf(p - 2.0);
        let d = (p - 2.0) * m.powf(p - 4.0);
        [
            [c + d * xi[0] * xi[0], d * xi[0] * xi[1]],
            [d * xi[0] * xi[1], c + d * xi[1] * xi[1]],
        ]
    })
}

pub const JAC_REGULARIZATION: f64 = 1e-10;

fn bounded_reaction() -> (SourceFn, f64) {
    // B(x, s, xi) = 2 + 0.1 tanh(s): bounded, so b1 = b2 = 0 and f ≡ 2.1
    (Arc::new(|_x, s, _xi| 2.0 + 0.1 * s.tanh()), 2.1)
}

fn zero_boundary() -> (BoundaryFn, Option<BoundaryDerivFn>) {
    (Arc::new(|_x, _s| 0.0), Some(Arc::new(|_x, _s| 0.0)))
}

/// `p`-Laplacian flux with homogeneous Neumann boundary and a bounded
/// nonlocal reaction.
pub fn p_laplacian_neumann(grid: Arc<crate::grid::GridSpec>, p: f64, a: f64) -> Result<CoefficientSet> {
    let (b_fn, f_const) = bounded_reaction();
    let (c_fn, c_deriv) = zero_boundary();
    let set = CoefficientSet {
        name: "p_laplacian_neumann".into(),
        p,
        a,
        a_fn: p_flux(p),
        b_fn,
        c_fn,
        a_jac: Some(p_flux_jac(p, JAC_REGULARIZATION)),
        c_deriv,
        constants: StructureConstants { a1: 1.0, a2: 0.0, a3: 0.0, a4: 1.0, a5: 0.0, a6: 0.0, b1: 0.0, b2: 0.0, c1: 0.0, c2: 0.0 },
        alphas: [0.0, 0.0, 0.0],
        f_bound: DiscreteField::constant(grid, f_const)?,
        r: 2.0,
    };
    set.validate_basic()?;
    Ok(set)
}

/// `(p,q)`-Laplacian flux `|xi|^{p-2} xi + mu |xi|^{q-2} xi` with `q < p`.
pub fn pq_laplacian(grid: Arc<crate::grid::GridSpec>, p: f64, q: f64, mu: f64, a: f64) -> Result<CoefficientSet> {
    if !(1.0 < q && q < p) || !(mu >= 0.0) {
        return Err(Error::InvalidParameter(format!("need 1 < q < p and mu >= 0, got p = {p}, q = {q}, mu = {mu}")));
    }
    let fp = p_flux(p);
    let fq = p_flux(q);
    let a_fn: FluxFn = {
        let (fp, fq) = (fp.clone(), fq.clone());
        Arc::new(move |x, s, xi| {
            let u = fp(x, s, xi);
            let v = fq(x, s, xi);
            [u[0] + mu * v[0], u[1] + mu * v[1]]
        })
    };
    let jp = p_flux_jac(p, JAC_REGULARIZATION);
    let jq = p_flux_jac(q, JAC_REGULARIZATION);
    let a_jac: FluxJacFn = Arc::new(move |x, s, xi| {
        let u = jp(x, s, xi);
        let v = jq(x, s, xi);
        [
            [u[0][0] + mu * v[0][0], u[0][1] + mu * v[0][1]],
            [u[1][0] + mu * v[1][0], u[1][1] + mu * v[1][1]],
        ]
    });
    let (b_fn, f_const) = bounded_reaction();
    let (c_fn, c_deriv) = zero_boundary();
    let set = CoefficientSet {
        name: "pq_laplacian".into(),
        p,
        a,
        a_fn,
        b_fn,
        c_fn,
        a_jac: Some(a_jac),
        c_deriv,
        // |A| <= |xi|^{p-1} + mu |xi|^{q-1} <= (1+mu)|xi|^{p-1} + mu
        constants: StructureConstants { a1: 1.0 + mu, a2: 0.0, a3: mu, a4: 1.0, a5: 0.0, a6: 0.0, b1: 0.0, b2: 0.0, c1: 0.0, c2: 0.0 },
        alphas: [0.0, 0.0, 0.0],
        f_bound: DiscreteField::constant(grid, f_const)?,
        r: 2.0,
    };
    set.validate_basic()?;
    Ok(set)
}

/// `p`-Laplacian with absorbing Robin boundary flux `C(x, s) = -lambda
/// |s|^{p-2} s`. Stores `alpha_3 = p-1`, which leaves the A-window (the
/// interval is half open) while the H-form boundary growth still holds with
/// `c1 = c2 = lambda`.
pub fn robin_p_laplacian(grid: Arc<crate::grid::GridSpec>, p: f64, a: f64, lambda: f64) -> Result<CoefficientSet> {
    if !(lambda >= 0.0) {
        return Err(Error::InvalidParameter(format!("Robin coefficient must be nonnegative, got {lambda}")));
    }
    let c_fn: BoundaryFn = Arc::new(move |_x, s: f64| -lambda * s.abs().powf(p - 1.0) * s.signum());
    let c_deriv: BoundaryDerivFn = Arc::new(move |_x, s| -lambda * (p - 1.0) * (s * s + JAC_REGULARIZATION * JAC_REGULARIZATION).sqrt().powf(p - 2.0));
    let (b_fn, f_const) = bounded_reaction();
    let set = CoefficientSet {
        name: "robin_p_laplacian".into(),
        p,
        a,
        a_fn: p_flux(p),
        b_fn,
        c_fn,
        a_jac: Some(p_flux_jac(p, JAC_REGULARIZATION)),
        c_deriv: Some(c_deriv),
        constants: StructureConstants { a1: 1.0, a2: 0.0, a3: 0.0, a4: 1.0, a5: 0.0, a6: 0.0, b1: 0.0, b2: 0.0, c1: lambda, c2: lambda },
        alphas: [0.0, 0.0, p - 1.0],
        f_bound: DiscreteField::constant(grid, f_const)?,
        r: 2.0,
    };
    set.validate_basic()?;
    Ok(set)
}

/// Linear-in-flux set whose reaction ignores the nonlocal data: `B(x) =
/// f(x)` sampled nodally, for manufactured-solution studies.
pub fn mms_forcing(p: f64, a: f64, f: DiscreteField) -> Result<CoefficientSet> {
    let f_bound = {
        let mut b = f.clone();
        for v in b.values_mut() {
            *v = v.abs();
        }
        b
    };
    let f_lookup = f.clone();
    let b_fn: SourceFn = Arc::new(move |x, _s, _xi| nearest_value(&f_lookup, x));
    let (c_fn, c_deriv) = zero_boundary();
    let set = CoefficientSet {
        name: "mms_forcing".into(),
        p,
        a,
        a_fn: p_flux(p),
        b_fn,
        c_fn,
        a_jac: Some(p_flux_jac(p, JAC_REGULARIZATION)),
        c_deriv,
        constants: StructureConstants { a1: 1.0, a2: 0.0, a3: 0.0, a4: 1.0, a5: 0.0, a6: 0.0, b1: 0.0, b2: 0.0, c1: 0.0, c2: 0.0 },
        alphas: [0.0, 0.0, 0.0],
        f_bound,
        r: 2.0,
    };
    set.validate_basic()?;
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;

    fn grid() -> Arc<GridSpec> {
        Arc::new(GridSpec::unit_square(5).unwrap())
    }

    #[test]
    fn critical_exponent_values() {
        assert_eq!(critical_exponents(1.5, 2).unwrap(), (6.0, 3.0));
        let (ps, pls) = critical_exponents(2.0, 2).unwrap();
        assert!(ps.is_infinite() && pls.is_infinite());
        assert_eq!(critical_exponents(2.0, 3).unwrap(), (6.0, 4.0));
        assert!(critical_exponents(0.9, 2).is_err());
    }

    #[test]
    fn critical_exponent_monotone_in_p() {
        let mut last = 0.0;
        for k in 1..=20 {
            let p = 1.0 + k as f64 * 0.045; // stays below N = 2
            let (ps, _) = critical_exponents(p, 2).unwrap();
            assert!(ps > last);
            last = ps;
        }
    }

    #[test]
    fn exponent_window_checks() {
        let mut set = p_laplacian_neumann(grid(), 1.5, 1.0).unwrap();
        set.alphas = [0.4, 0.4, 0.4];
        assert!(validate_exponent_conditions(&set, Mode::A).no_violation_found());
        // H window: alpha2 bound = min{0.5, (1.5/6)(6-1.5)} = 0.5
        assert!(validate_exponent_conditions(&set, Mode::H).no_violation_found());
        // boundary case of the half-open interval
        set.alphas = [0.4, 0.4, 0.5];
        let v = validate_exponent_conditions(&set, Mode::A);
        assert!(!v.no_violation_found());
        assert!(v.violations[0].contains("alpha3"));
    }

    #[test]
    fn p_laplacian_growth_equalities() {
        let set = p_laplacian_neumann(grid(), 1.5, 1.0).unwrap();
        let cloud = default_sample_cloud();
        assert!(validate_growth(&set, Mode::A, &cloud).no_violation_found());
        assert!(validate_growth(&set, Mode::H, &cloud).no_violation_found());
    }

    #[test]
    fn pq_laplacian_monotonicity() {
        let set = pq_laplacian(grid(), 2.5, 1.5, 1.0, 1.0).unwrap();
        let cloud = default_sample_cloud();
        let v = validate_growth(&set, Mode::A, &cloud);
        assert!(v.no_violation_found(), "{:?}", v.violations);
    }

    #[test]
    fn robin_preset_a_invalid_h_valid() {
        let set = robin_p_laplacian(grid(), 1.5, 1.0, 0.5).unwrap();
        let exps = validate_exponent_conditions(&set, Mode::A);
        assert!(exps.violations.iter().any(|v| v.contains("alpha3")));
        assert!(validate_exponent_conditions(&set, Mode::H).no_violation_found());
        let cloud = default_sample_cloud();
        assert!(validate_growth(&set, Mode::H, &cloud).no_violation_found());
    }

    #[test]
    fn growth_falsification_soundness() {
        // A = (1+|s|) |xi|^{p-2} xi with a2 = 0 violates (A1) at s = 10
        let p = 1.5;
        let mut set = p_laplacian_neumann(grid(), p, 1.0).unwrap();
        set.a_fn = Arc::new(move |_x, s: f64, xi: Vec2| {
            let m = norm2(xi);
            if m == 0.0 {
                return [0.0, 0.0];
            }
            let c = (1.0 + s.abs()) * m.powf(p - 2.0);
            [c * xi[0], c * xi[1]]
        });
        let v = validate_growth(&set, Mode::A, &default_sample_cloud());
        assert!(v.violations.iter().any(|c| c.starts_with("A1")), "{:?}", v.violations);
    }

    #[test]
    fn mms_forcing_bound_is_abs() {
        let f = DiscreteField::from_fn(grid(), |x, _| x - 0.5).unwrap();
        let set = mms_forcing(2.0, 1.0, f).unwrap();
        assert!(set.f_bound.values().iter().all(|v| *v >= 0.0));
        let v = validate_growth(&set, Mode::A, &default_sample_cloud());
        assert!(v.no_violation_found(), "{:?}", v.violations);
    }
}
