//! Discrete weak form of the boundary value problem and its solvers: a
//! damped Newton iteration for the local quasilinear problem with frozen
//! nonlocal data, and a relaxed fixed-point iteration on that data.
//!
//! The zeroth-order, reaction and boundary terms are mass-lumped; the flux
//! term is assembled per triangle with the exact piecewise-linear gradient
//! and midpoint (centroid) coefficient evaluation.

use std::sync::Arc;

use crate::convolution::{convolve, convolve_gradient, Kernel};
use crate::error::{Error, Result};
use crate::extension::ExtensionOperator;
use crate::grid::{DiscreteField, GridSpec, Region};
use crate::structure::{CoefficientSet, JAC_REGULARIZATION};

/// Nonlocal data frozen for one local solve: `w = (ρ∗E(u))|_Ω` and
/// `g = ∇(ρ∗E(u))|_Ω` per node.
#[derive(Debug, Clone)]
pub struct FrozenNonlocalData {
    pub w: DiscreteField,
    pub g: Vec<[f64; 2]>,
}

impl FrozenNonlocalData {
    /// Zero data, for problems whose reaction ignores the nonlocal terms.
    pub fn zero(grid: Arc<GridSpec>) -> Self {
        let n = grid.node_count();
        FrozenNonlocalData { w: DiscreteField::zeros(grid), g: vec![[0.0; 2]; n] }
    }
}

/// Compute the frozen nonlocal data for the current iterate.
pub fn freeze(u: &DiscreteField, rho: &Kernel, op: &ExtensionOperator) -> Result<FrozenNonlocalData> {
    let eu = op.extend(u)?;
    let w = op.restrict(&convolve(rho, &eu)?)?;
    let g = op.restrict_vectors(&convolve_gradient(rho, &eu)?)?;
    Ok(FrozenNonlocalData { w, g })
}

/// How the Newton Jacobian is formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum JacobianMode {
    Analytic,
    FiniteDifference,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveConfig {
    /// Euclidean residual norm target of the inner Newton solve.
    pub inner_tol: f64,
    /// Relative `W^{1,p}` update target of the outer fixed point.
    pub outer_tol: f64,
    /// Outer relaxation factor in `(0, 1]`.
    pub theta: f64,
    pub max_inner: usize,
    pub max_outer: usize,
    pub jacobian: JacobianMode,
    pub fd_step: f64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            inner_tol: 1e-10,
            outer_tol: 1e-10,
            theta: 1.0,
            max_inner: 60,
            max_outer: 200,
            jacobian: JacobianMode::Analytic,
            fd_step: 1e-6,
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.inner_tol > 0.0 && self.outer_tol > 0.0) {
            return Err(Error::InvalidParameter("solver tolerances must be positive".into()));
        }
        if !(self.theta > 0.0 && self.theta <= 1.0) {
            return Err(Error::InvalidParameter(format!("relaxation theta must lie in (0,1], got {}", self.theta)));
        }
        if !(self.fd_step > 0.0) {
            return Err(Error::InvalidParameter("finite-difference step must be positive".into()));
        }
        Ok(())
    }
}

/// Report of one inner Newton solve.
#[derive(Debug, Clone, serde::Serialize)]
pub struct InnerReport {
    pub converged: bool,
    pub iterations: usize,
    pub residual_history: Vec<f64>,
}

/// Final norms of a solution field.
#[derive(Debug, Clone, serde::Serialize)]
pub struct FinalNorms {
    pub lp: f64,
    pub w1p: f64,
    pub linf: f64,
    pub boundary_lp: f64,
}

impl FinalNorms {
    pub fn of(u: &DiscreteField, p: f64) -> Result<Self> {
        Ok(FinalNorms {
            lp: u.lp_norm(p, Region::Interior)?,
            w1p: u.w1p_norm(p)?,
            linf: u.max_abs(),
            boundary_lp: u.lp_norm(p, Region::Boundary)?,
        })
    }
}

/// Full record of a coupled solve.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SolveReport {
    pub converged: bool,
    pub outer_iters: usize,
    pub inner_iters: Vec<usize>,
    /// Residual norms of every inner iteration, one list per outer step.
    pub residual_history: Vec<Vec<f64>>,
    /// Relative `W^{1,p}` update per outer step.
    pub update_history: Vec<f64>,
    /// Residual norm of the full coupled system at the final iterate.
    pub coupled_residual: f64,
    pub norms: FinalNorms,
    pub boundedness: Option<crate::moser::BoundednessReport>,
    pub coercivity: Option<Vec<CoercivityRow>>,
}

#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct CoercivityRow {
    pub t: f64,
    /// `⟨T(tv), tv⟩ / ‖tv‖_{W^{1,p}}`.
    pub ratio: f64,
}

/// Weak-form residual tested against every nodal hat function.
///
/// Component `i` is
/// `Σ_T A(x_T, ū_T, ∇u|_T)·∇φ_i|_T |T| + a m_i |u_i|^{p-2} u_i
///  - m_i B(x_i, w_i, g_i) - b_i C(x_i, u_i)`
/// with lumped interior weights `m_i` and boundary weights `b_i`.
pub fn residual(u: &DiscreteField, data: &FrozenNonlocalData, set: &CoefficientSet) -> Result<Vec<f64>> {
    let grid = u.grid();
    if data.w.grid().as_ref() != grid.as_ref() || data.g.len() != grid.node_count() {
        return Err(Error::GridMismatch("frozen data does not match the solution grid".into()));
    }
    let n = grid.node_count();
    let mut r = vec![0.0; n];
    let vals = u.values();

    for tri in grid.triangles() {
        let [v0, v1, v2] = tri.vertices;
        let mut g = [0.0, 0.0];
        for (v, gr) in tri.vertices.iter().zip(tri.grads.iter()) {
            g[0] += vals[*v] * gr[0];
            g[1] += vals[*v] * gr[1];
        }
        let centroid = {
            let a = grid.node_coords(v0);
            let b = grid.node_coords(v1);
            let c = grid.node_coords(v2);
            [(a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0]
        };
        let u_bar = (vals[v0] + vals[v1] + vals[v2]) / 3.0;
        let flux = (set.a_fn)(centroid, u_bar, g);
        if !flux[0].is_finite() || !flux[1].is_finite() {
            return Err(Error::Evaluation { node: v0 });
        }
        for (v, gr) in tri.vertices.iter().zip(tri.grads.iter()) {
            r[*v] += tri.area * (flux[0] * gr[0] + flux[1] * gr[1]);
        }
    }

    let m = grid.lumped_weights();
    let bw = grid.boundary_quadrature().weights().to_vec();
    let p = set.p;
    for i in 0..n {
        let x = grid.node_coords(i);
        let ui = vals[i];
        let zeroth = set.a * ui.abs().powf(p - 1.0) * ui.signum();
        let reaction = (set.b_fn)(x, data.w.values()[i], data.g[i]);
        let mut acc = m[i] * (zeroth - reaction);
        if bw[i] > 0.0 {
            acc -= bw[i] * (set.c_fn)(x, ui);
        }
        if !acc.is_finite() {
            return Err(Error::Evaluation { node: i });
        }
        r[i] += acc;
    }
    Ok(r)
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

// ---------------------------------------------------------------------------
// sparse linear algebra

/// Compressed sparse rows over the 7-point node stencil of the mesh.
struct Csr {
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    vals: Vec<f64>,
}

impl Csr {
    fn from_grid(grid: &GridSpec) -> Csr {
        let (nx, ny) = (grid.n_x() as i64, grid.n_y() as i64);
        let mut row_ptr = Vec::with_capacity((nx * ny + 1) as usize);
        let mut col_idx = Vec::new();
        row_ptr.push(0);
        // stencil of the lower-left/upper-right diagonal triangulation
        let stencil: [(i64, i64); 7] = [(-1, -1), (0, -1), (-1, 0), (0, 0), (1, 0), (0, 1), (1, 1)];
        for iy in 0..ny {
            for ix in 0..nx {
                for (dx, dy) in stencil {
                    let (jx, jy) = (ix + dx, iy + dy);
                    if jx >= 0 && jx < nx && jy >= 0 && jy < ny {
                        col_idx.push((jy * nx + jx) as usize);
                    }
                }
                row_ptr.push(col_idx.len());
            }
        }
        let vals = vec![0.0; col_idx.len()];
        Csr { row_ptr, col_idx, vals }
    }

    fn clear(&mut self) {
        self.vals.iter_mut().for_each(|v| *v = 0.0);
    }

    fn add(&mut self, i: usize, j: usize, v: f64) {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        let k = self.col_idx[lo..hi].binary_search(&j).expect("entry inside stencil") + lo;
        self.vals[k] += v;
    }

    fn diag(&self, i: usize) -> f64 {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        match self.col_idx[lo..hi].binary_search(&i) {
            Ok(k) => self.vals[lo + k],
            Err(_) => 0.0,
        }
    }

    fn matvec(&self, x: &[f64], out: &mut [f64]) {
        for i in 0..x.len() {
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.vals[k] * x[self.col_idx[k]];
            }
            out[i] = acc;
        }
    }

    fn shift_diagonal(&mut self, lambda: f64) {
        for i in 0..self.row_ptr.len() - 1 {
            let lo = self.row_ptr[i];
            let hi = self.row_ptr[i + 1];
            if let Ok(k) = self.col_idx[lo..hi].binary_search(&i) {
                self.vals[lo + k] += lambda;
            }
        }
    }
}

/// Jacobi-preconditioned conjugate gradients. The preset Jacobians are
/// symmetric positive definite away from degeneracy; degeneracy is handled
/// by the caller's diagonal-shift retry.
fn pcg(mat: &Csr, b: &[f64], tol: f64, max_iter: usize) -> Result<Vec<f64>> {
    let n = b.len();
    let precond: Vec<f64> = (0..n)
        .map(|i| {
            let d = mat.diag(i);
            if d.abs() > 1e-300 {
                1.0 / d
            } else {
                1.0
            }
        })
        .collect();
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&precond).map(|(r, p)| r * p).collect();
    let mut d = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let b_norm = l2(b);
    if b_norm == 0.0 {
        return Ok(x);
    }
    let target = tol * b_norm;
    let mut ad = vec![0.0; n];
    for _ in 0..max_iter {
        if l2(&r) <= target {
            return Ok(x);
        }
        mat.matvec(&d, &mut ad);
        let dad: f64 = d.iter().zip(&ad).map(|(a, b)| a * b).sum();
        if !(dad > 0.0) {
            return Err(Error::LinearSolve("search direction with nonpositive curvature".into()));
        }
        let alpha = rz / dad;
        for i in 0..n {
            x[i] += alpha * d[i];
            r[i] -= alpha * ad[i];
        }
        for i in 0..n {
            z[i] = r[i] * precond[i];
        }
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            d[i] = z[i] + beta * d[i];
        }
    }
    if l2(&r) <= target * 10.0 {
        return Ok(x);
    }
    Err(Error::LinearSolve(format!("conjugate gradients stalled at relative residual {:.3e}", l2(&r) / b_norm)))
}

/// Partial-pivot Gaussian elimination for the dense finite-difference path.
fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        if a[pivot][col].abs() < 1e-300 {
            return Err(Error::LinearSolve("singular dense Jacobian".into()));
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Ok(x)
}

fn assemble_analytic_jacobian(mat: &mut Csr, u: &DiscreteField, set: &CoefficientSet) -> Result<()> {
    let grid = u.grid();
    let jac = set
        .a_jac
        .as_ref()
        .ok_or_else(|| Error::InvalidParameter("coefficient set has no analytic flux Jacobian; use the finite-difference mode".into()))?;
    mat.clear();
    let vals = u.values();
    for tri in grid.triangles() {
        let [v0, v1, v2] = tri.vertices;
        let mut g = [0.0, 0.0];
        for (v, gr) in tri.vertices.iter().zip(tri.grads.iter()) {
            g[0] += vals[*v] * gr[0];
            g[1] += vals[*v] * gr[1];
        }
        let centroid = {
            let a = grid.node_coords(v0);
            let b = grid.node_coords(v1);
            let c = grid.node_coords(v2);
            [(a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0]
        };
        let u_bar = (vals[v0] + vals[v1] + vals[v2]) / 3.0;
        let d = jac(centroid, u_bar, g);
        for (vi, gi) in tri.vertices.iter().zip(tri.grads.iter()) {
            for (vj, gj) in tri.vertices.iter().zip(tri.grads.iter()) {
                let dgj = [d[0][0] * gj[0] + d[0][1] * gj[1], d[1][0] * gj[0] + d[1][1] * gj[1]];
                mat.add(*vi, *vj, tri.area * (gi[0] * dgj[0] + gi[1] * dgj[1]));
            }
        }
    }
    let m = grid.lumped_weights();
    let bw = grid.boundary_quadrature().weights().to_vec();
    let p = set.p;
    for i in 0..grid.node_count() {
        let ui = vals[i];
        let reg = (ui * ui + JAC_REGULARIZATION * JAC_REGULARIZATION).sqrt();
        mat.add(i, i, set.a * (p - 1.0) * reg.powf(p - 2.0) * m[i]);
        if bw[i] > 0.0 {
            let x = grid.node_coords(i);
            let dc = match &set.c_deriv {
                Some(d) => d(x, ui),
                None => {
                    let h = 1e-7 * (1.0 + ui.abs());
                    ((set.c_fn)(x, ui + h) - (set.c_fn)(x, ui - h)) / (2.0 * h)
                }
            };
            mat.add(i, i, -bw[i] * dc);
        }
    }
    Ok(())
}

fn fd_jacobian(u: &DiscreteField, data: &FrozenNonlocalData, set: &CoefficientSet, step: f64) -> Result<Vec<Vec<f64>>> {
    let base = residual(u, data, set)?;
    let n = base.len();
    let mut cols = vec![vec![0.0; n]; n];
    let mut pert = u.clone();
    for j in 0..n {
        let old = pert.values()[j];
        let h = step * (1.0 + old.abs());
        pert.values_mut()[j] = old + h;
        let r = residual(&pert, data, set)?;
        pert.values_mut()[j] = old;
        for i in 0..n {
            cols[i][j] = (r[i] - base[i]) / h;
        }
    }
    Ok(cols)
}

fn newton_step(
    u: &DiscreteField,
    rhs_neg_residual: &[f64],
    data: &FrozenNonlocalData,
    set: &CoefficientSet,
    cfg: &SolveConfig,
    mat: &mut Csr,
    damping: f64,
) -> Result<Vec<f64>> {
    match cfg.jacobian {
        JacobianMode::Analytic => {
            assemble_analytic_jacobian(mat, u, set)?;
            if damping > 0.0 {
                mat.shift_diagonal(damping);
            }
            let n = rhs_neg_residual.len();
            let max_iter = 40 * n + 200;
            match pcg(mat, rhs_neg_residual, 1e-12, max_iter) {
                Ok(d) => Ok(d),
                Err(_) => {
                    // regularized retry: shift the diagonal until the solve
                    // goes through, escalating a few times before giving up
                    let scale = (0..n).map(|i| mat.diag(i).abs()).fold(0.0_f64, f64::max).max(1e-12);
                    let mut lambda = 1e-8 * scale;
                    for _ in 0..8 {
                        mat.shift_diagonal(lambda);
                        if let Ok(d) = pcg(mat, rhs_neg_residual, 1e-12, max_iter) {
                            return Ok(d);
                        }
                        lambda *= 10.0;
                    }
                    Err(Error::LinearSolve("Jacobian solve failed even with diagonal regularization".into()))
                }
            }
        }
        JacobianMode::FiniteDifference => {
            let mut jac = fd_jacobian(u, data, set, cfg.fd_step)?;
            if damping > 0.0 {
                for (i, row) in jac.iter_mut().enumerate() {
                    row[i] += damping;
                }
            }
            dense_solve(jac, rhs_neg_residual.to_vec())
        }
    }
}

const MAX_HALVINGS: usize = 30;

/// Damped Newton solve of the frozen-data problem, starting from `u0`.
/// The step length is halved until the residual norm decreases.
pub fn local_solve(
    data: &FrozenNonlocalData,
    set: &CoefficientSet,
    u0: &DiscreteField,
    cfg: &SolveConfig,
) -> Result<(DiscreteField, InnerReport)> {
    cfg.validate()?;
    set.validate_basic()?;
    let mut u = u0.clone();
    let mut mat = Csr::from_grid(u.grid());
    let mut history = Vec::new();
    let mut r = residual(&u, data, set)?;
    let mut norm = l2(&r);
    history.push(norm);
    for iter in 0..cfg.max_inner {
        if norm <= cfg.inner_tol {
            return Ok((u, InnerReport { converged: true, iterations: iter, residual_history: history }));
        }
        let rhs: Vec<f64> = r.iter().map(|x| -x).collect();
        // the Jacobian degenerates at flat iterates for p > 2; when the
        // undamped step cannot be line-searched, retry with an escalating
        // diagonal damping (Levenberg-Marquardt style)
        let mut damping = 0.0;
        let mut accepted = None;
        'attempts: for _ in 0..8 {
            let direction = newton_step(&u, &rhs, data, set, cfg, &mut mat, damping)?;
            let mut step = 1.0;
            for _ in 0..=MAX_HALVINGS {
                let mut trial = u.clone();
                for (t, d) in trial.values_mut().iter_mut().zip(&direction) {
                    *t += step * d;
                }
                match residual(&trial, data, set) {
                    Ok(tr) => {
                        let tn = l2(&tr);
                        if tn < norm {
                            accepted = Some((trial, tr, tn));
                            break 'attempts;
                        }
                    }
                    Err(Error::Evaluation { .. }) => {} // step left the coefficient domain, damp further
                    Err(e) => return Err(e),
                }
                step *= 0.5;
            }
            damping = if damping == 0.0 { norm.max(1e-8) } else { damping * 100.0 };
        }
        match accepted {
            Some((trial, tr, tn)) => {
                u = trial;
                r = tr;
                norm = tn;
                history.push(norm);
            }
            None => {
                return Ok((u, InnerReport { converged: false, iterations: iter + 1, residual_history: history }));
            }
        }
    }
    let converged = norm <= cfg.inner_tol;
    Ok((u, InnerReport { converged, iterations: cfg.max_inner, residual_history: history }))
}

/// Relaxed fixed-point iteration on the frozen nonlocal data:
/// `u_{k+1} = (1-θ) u_k + θ · local_solve(freeze(u_k))`.
///
/// Converged when the coupled residual (re-frozen at the new iterate) meets
/// `inner_tol` or the relative `W^{1,p}` update meets `outer_tol`.
pub fn fixed_point_solve(
    set: &CoefficientSet,
    rho: &Kernel,
    op: &ExtensionOperator,
    cfg: &SolveConfig,
    u0: Option<DiscreteField>,
) -> Result<(DiscreteField, SolveReport)> {
    cfg.validate()?;
    set.validate_basic()?;
    let grid = op.source().clone();
    let mut u = match u0 {
        Some(f) => {
            if f.grid().as_ref() != grid.as_ref() {
                return Err(Error::GridMismatch("initial iterate does not live on the source grid".into()));
            }
            f
        }
        None => DiscreteField::zeros(grid.clone()),
    };
    let p = set.p;
    let mut inner_iters = Vec::new();
    let mut residual_history = Vec::new();
    let mut update_history = Vec::new();
    let mut converged = false;
    let mut outer_iters = 0;
    let mut coupled = f64::INFINITY;
    for _ in 0..cfg.max_outer {
        outer_iters += 1;
        let data = freeze(&u, rho, op)?;
        let (v, inner) = local_solve(&data, set, &u, cfg)?;
        inner_iters.push(inner.iterations);
        let inner_ok = inner.converged;
        residual_history.push(inner.residual_history);
        let u_next = u.scale(1.0 - cfg.theta).add(&v.scale(cfg.theta))?;
        let diff = u_next.sub(&u)?;
        let denom = u_next.w1p_norm(p)?.max(1e-300);
        let update = diff.w1p_norm(p)? / denom;
        update_history.push(update);
        u = u_next;
        if !inner_ok {
            break;
        }
        let fresh = freeze(&u, rho, op)?;
        coupled = l2(&residual(&u, &fresh, set)?);
        if coupled <= cfg.inner_tol || update <= cfg.outer_tol {
            converged = true;
            break;
        }
    }
    if coupled.is_infinite() {
        let fresh = freeze(&u, rho, op)?;
        coupled = l2(&residual(&u, &fresh, set)?);
    }
    let report = SolveReport {
        converged,
        outer_iters,
        inner_iters,
        residual_history,
        update_history,
        coupled_residual: coupled,
        norms: FinalNorms::of(&u, p)?,
        boundedness: None,
        coercivity: None,
    };
    Ok((u, report))
}

/// Discrete duality pairing `⟨Tu, u⟩`: the residual vector paired with the
/// nodal coefficients of `u` under the same quadrature.
pub fn duality_pairing(u: &DiscreteField, data: &FrozenNonlocalData, set: &CoefficientSet) -> Result<f64> {
    let r = residual(u, data, set)?;
    Ok(r.iter().zip(u.values()).map(|(a, b)| a * b).sum())
}

/// Evaluate `⟨T(tv), tv⟩ / ‖tv‖_{W^{1,p}}` over a list of scales.
pub fn coercivity_probe(
    set: &CoefficientSet,
    v: &DiscreteField,
    scales: &[f64],
    rho: &Kernel,
    op: &ExtensionOperator,
) -> Result<Vec<CoercivityRow>> {
    if v.max_abs() == 0.0 {
        return Err(Error::Domain("coercivity probe requires a nonzero direction".into()));
    }
    let mut rows = Vec::with_capacity(scales.len());
    for &t in scales {
        if !(t > 0.0) {
            return Err(Error::InvalidParameter(format!("probe scales must be positive, got {t}")));
        }
        let tv = v.scale(t);
        let data = freeze(&tv, rho, op)?;
        let pairing = duality_pairing(&tv, &data, set)?;
        rows.push(CoercivityRow { t, ratio: pairing / tv.w1p_norm(set.p)? });
    }
    Ok(rows)
}

/// One row of a manufactured-solution convergence table.
#[derive(Debug, Clone, serde::Serialize)]
pub struct MmsRow {
    pub n: usize,
    pub h: f64,
    pub l2_error: f64,
    pub w1p_error: f64,
    pub l2_order: Option<f64>,
    pub w1p_order: Option<f64>,
}

/// Manufactured-solution study: for each mesh, solve with the nodally
/// sampled strong-form forcing and record errors against the interpolated
/// exact solution. Returns the table and whether the exact solution is
/// compatible with the homogeneous Neumann boundary (normal derivative
/// zero on the boundary of the unit square).
pub fn mms_study(
    u_star: &dyn Fn(f64, f64) -> f64,
    grad_star: &dyn Fn(f64, f64) -> [f64; 2],
    f_strong: &dyn Fn(f64, f64) -> f64,
    p: f64,
    a: f64,
    mesh_sizes: &[usize],
    cfg: &SolveConfig,
) -> Result<(Vec<MmsRow>, bool)> {
    let mut rows: Vec<MmsRow> = Vec::new();
    let mut boundary_compatible = true;
    for &n in mesh_sizes {
        let grid = Arc::new(GridSpec::unit_square(n)?);
        // boundary-compatibility check from the analytic gradient
        let bq = grid.boundary_quadrature();
        for (i, &w) in bq.weights().iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let [x, y] = grid.node_coords(i);
            let g = grad_star(x, y);
            let flux = if x == 0.0 || x == 1.0 { g[0] } else { 0.0 };
            let flux_y = if y == 0.0 || y == 1.0 { g[1] } else { 0.0 };
            if flux.abs() > 1e-8 || flux_y.abs() > 1e-8 {
                boundary_compatible = false;
            }
        }
        let f = DiscreteField::from_fn(grid.clone(), f_strong)?;
        let set = crate::structure::mms_forcing(p, a, f)?;
        let data = FrozenNonlocalData::zero(grid.clone());
        let u0 = DiscreteField::zeros(grid.clone());
        let (u, inner) = local_solve(&data, &set, &u0, cfg)?;
        if !inner.converged {
            return Err(Error::LinearSolve(format!("manufactured-solution solve failed to converge at n = {n}")));
        }
        let exact = DiscreteField::from_fn(grid.clone(), u_star)?;
        let e = u.sub(&exact)?;
        let l2_error = e.lp_norm(2.0, Region::Interior)?;
        let w1p_error = e.w1p_norm(p)?;
        let (l2_order, w1p_order) = match rows.last() {
            Some(prev) => {
                let ratio = (prev.h / grid.h_max()).ln();
                (
                    Some((prev.l2_error / l2_error).ln() / ratio),
                    Some((prev.w1p_error / w1p_error).ln() / ratio),
                )
            }
            None => (None, None),
        };
        rows.push(MmsRow { n, h: grid.h_max(), l2_error, w1p_error, l2_order, w1p_order });
    }
    Ok((rows, boundary_compatible))
}
