//! Discrete convolution of an integrable kernel with extended fields and
//! their gradients.
//!
//! The quadrature is a plain Riemann sum with weight `h_x h_y`, which makes
//! the discrete Young inequality an exact theorem of the discretization.
//! Summation order is fixed (row-major over the kernel window) so results
//! are bit-for-bit reproducible.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::extension::ExtendedField;
use crate::grid::{read_csv_parts, DiscreteField, GridSpec};

/// Grid-sampled integrable kernel on a compact window, with an origin node
/// so offsets are exact multiples of the spacing.
#[derive(Debug, Clone)]
pub struct Kernel {
    h_x: f64,
    h_y: f64,
    n_x: usize,
    n_y: usize,
    /// Index of the node sitting at the origin.
    origin: (usize, usize),
    /// Row-major samples of the kernel density.
    values: Vec<f64>,
}

/// Built-in kernel shapes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelPreset {
    /// Single node of value `1/(h_x h_y)`; convolution is the identity.
    Delta,
    /// Indicator of the square of the given half-width.
    Box { radius: f64 },
    /// Gaussian of the given standard deviation, truncated at four sigma.
    Gaussian { sigma: f64 },
    /// Smooth compactly supported bump of the given half-width.
    Bump { radius: f64 },
}

impl Kernel {
    pub fn new(h_x: f64, h_y: f64, n_x: usize, n_y: usize, origin: (usize, usize), values: Vec<f64>) -> Result<Self> {
        if !(h_x > 0.0 && h_y > 0.0) {
            return Err(Error::InvalidParameter("kernel spacing must be positive".into()));
        }
        if n_x == 0 || n_y == 0 || values.len() != n_x * n_y {
            return Err(Error::InvalidParameter(format!(
                "kernel window {n_x} x {n_y} does not match {} samples",
                values.len()
            )));
        }
        if origin.0 >= n_x || origin.1 >= n_y {
            return Err(Error::InvalidParameter("kernel origin outside window".into()));
        }
        let k = Kernel { h_x, h_y, n_x, n_y, origin, values };
        let m = k.mass();
        if !(m.is_finite() && m > 0.0) {
            return Err(Error::InvalidParameter(format!("kernel mass must be finite and positive, got {m}")));
        }
        Ok(k)
    }

    /// Sample a preset on a window matching the given field spacing.
    pub fn preset(kind: KernelPreset, h_x: f64, h_y: f64, normalize: bool) -> Result<Self> {
        let sample = |radius: f64, f: &dyn Fn(f64, f64) -> f64| -> Result<Kernel> {
            if !(radius > 0.0) {
                return Err(Error::InvalidParameter(format!("kernel radius must be positive, got {radius}")));
            }
            let rx = (radius / h_x).round() as usize;
            let ry = (radius / h_y).round() as usize;
            if rx == 0 || ry == 0 {
                return Err(Error::InvalidParameter(format!(
                    "kernel radius {radius} is below the grid spacing"
                )));
            }
            let (n_x, n_y) = (2 * rx + 1, 2 * ry + 1);
            let mut values = Vec::with_capacity(n_x * n_y);
            for iy in 0..n_y {
                for ix in 0..n_x {
                    let x = (ix as f64 - rx as f64) * h_x;
                    let y = (iy as f64 - ry as f64) * h_y;
                    values.push(f(x, y));
                }
            }
            Kernel::new(h_x, h_y, n_x, n_y, (rx, ry), values)
        };
        let mut k = match kind {
            KernelPreset::Delta => Kernel::new(h_x, h_y, 1, 1, (0, 0), vec![1.0 / (h_x * h_y)])?,
            KernelPreset::Box { radius } => sample(radius, &|x, y| {
                if x.abs() <= radius && y.abs() <= radius {
                    1.0
                } else {
                    0.0
                }
            })?,
            KernelPreset::Gaussian { sigma } => {
                let norm = 1.0 / (2.0 * std::f64::consts::PI * sigma * sigma);
                sample(4.0 * sigma, &|x, y| norm * (-(x * x + y * y) / (2.0 * sigma * sigma)).exp())?
            }
            KernelPreset::Bump { radius } => sample(radius, &|x, y| {
                let r2 = (x * x + y * y) / (radius * radius);
                if r2 < 1.0 {
                    (-1.0 / (1.0 - r2)).exp()
                } else {
                    0.0
                }
            })?,
        };
        if normalize {
            let m = k.mass();
            for v in &mut k.values {
                *v /= m;
            }
        }
        Ok(k)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn window(&self) -> (usize, usize) {
        (self.n_x, self.n_y)
    }

    pub fn origin(&self) -> (usize, usize) {
        self.origin
    }

    /// Quadrature `L¹` norm `h_x h_y Σ |ρ_k|`.
    pub fn mass(&self) -> f64 {
        self.h_x * self.h_y * self.values.iter().map(|v| v.abs()).sum::<f64>()
    }

    pub fn scale(&self, c: f64) -> Kernel {
        let mut k = self.clone();
        for v in &mut k.values {
            *v *= c;
        }
        k
    }

    fn check_spacing(&self, grid: &GridSpec) -> Result<()> {
        let ok = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0);
        if !(ok(self.h_x, grid.h_x()) && ok(self.h_y, grid.h_y())) {
            return Err(Error::GridMismatch(format!(
                "kernel spacing ({}, {}) does not match field spacing ({}, {})",
                self.h_x,
                self.h_y,
                grid.h_x(),
                grid.h_y()
            )));
        }
        Ok(())
    }

    /// Offsets (dx, dy) in node units together with the kernel sample, in
    /// fixed row-major order.
    fn offsets(&self) -> impl Iterator<Item = (i64, i64, f64)> + '_ {
        let (ox, oy) = (self.origin.0 as i64, self.origin.1 as i64);
        (0..self.n_y as i64).flat_map(move |ky| {
            (0..self.n_x as i64).map(move |kx| (kx - ox, ky - oy, self.values[(ky * self.n_x as i64 + kx) as usize]))
        })
    }

    /// Write the kernel CSV: the field format plus an origin header. The
    /// window spacing is recovered from the rect on read, so single-node
    /// windows (the delta preset) are not serializable.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        if self.n_x < 2 || self.n_y < 2 {
            return Err(Error::InvalidParameter(
                "single-node kernel windows cannot be serialized; use the delta preset".into(),
            ));
        }
        let x_min = -(self.origin.0 as f64) * self.h_x;
        let y_min = -(self.origin.1 as f64) * self.h_y;
        let x_max = x_min + (self.n_x - 1) as f64 * self.h_x;
        let y_max = y_min + (self.n_y - 1) as f64 * self.h_y;
        writeln!(w, "# rect {} {} {} {}", x_min, y_min, x_max, y_max)?;
        writeln!(w, "# n {} {}", self.n_x, self.n_y)?;
        writeln!(w, "# origin {} {}", self.origin.0, self.origin.1)?;
        for v in &self.values {
            writeln!(w, "{v:.17e}")?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<Kernel> {
        let parts = read_csv_parts(r)?;
        let origin = parts.origin.ok_or_else(|| Error::Parse("kernel file missing origin header".into()))?;
        if parts.n_x < 2 || parts.n_y < 2 {
            return Err(Error::Parse("kernel window needs at least 2 nodes per axis".into()));
        }
        let h_x = parts.rect.width() / (parts.n_x - 1) as f64;
        let h_y = parts.rect.height() / (parts.n_y - 1) as f64;
        Kernel::new(h_x, h_y, parts.n_x, parts.n_y, origin, parts.values)
    }
}

/// Riemann-sum convolution `(ρ∗v)(x_i) = h_x h_y Σ_k ρ_k v(x_i - d_k)`,
/// with `v` taken as zero outside its grid.
pub fn convolve(rho: &Kernel, v: &ExtendedField) -> Result<DiscreteField> {
    let field = v.field();
    let conv = convolve_values(rho, field.grid(), field.values())?;
    DiscreteField::new(field.grid().clone(), conv)
}

fn convolve_values(rho: &Kernel, grid: &GridSpec, values: &[f64]) -> Result<Vec<f64>> {
    rho.check_spacing(grid)?;
    let (nx, ny) = (grid.n_x() as i64, grid.n_y() as i64);
    let weight = rho.h_x * rho.h_y;
    let mut out = Vec::with_capacity(values.len());
    for iy in 0..ny {
        for ix in 0..nx {
            let mut acc = 0.0;
            for (dx, dy, r) in rho.offsets() {
                let (sx, sy) = (ix - dx, iy - dy);
                if sx >= 0 && sx < nx && sy >= 0 && sy < ny {
                    acc += r * values[(sy * nx + sx) as usize];
                }
            }
            out.push(weight * acc);
        }
    }
    Ok(out)
}

/// `ρ ∗ ∇v` componentwise, where `∇v` is the node-averaged gradient of the
/// piecewise-linear field; the discrete stand-in for the derivative of the
/// convolution.
pub fn convolve_gradient(rho: &Kernel, v: &ExtendedField) -> Result<Vec<[f64; 2]>> {
    let field = v.field();
    let g = field.node_gradient();
    let gx: Vec<f64> = g.iter().map(|g| g[0]).collect();
    let gy: Vec<f64> = g.iter().map(|g| g[1]).collect();
    let cx = convolve_values(rho, field.grid(), &gx)?;
    let cy = convolve_values(rho, field.grid(), &gy)?;
    Ok(cx.into_iter().zip(cy).map(|(x, y)| [x, y]).collect())
}

/// Outcome of a checked inequality: both sides and the verdict.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct InequalityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

const YOUNG_SLACK: f64 = 1e-9;

/// Discrete Young inequality `‖ρ∗v‖_{L^r} ≤ ‖ρ‖_{L¹} ‖v‖_{L^r}`.
pub fn young_check(rho: &Kernel, v: &ExtendedField, r: f64) -> Result<InequalityCheck> {
    let conv = convolve(rho, v)?;
    let lhs = conv.lp_norm(r, crate::grid::Region::Interior)?;
    let rhs = rho.mass() * v.field().lp_norm(r, crate::grid::Region::Interior)?;
    Ok(InequalityCheck { lhs, rhs, pass: lhs <= rhs * (1.0 + YOUNG_SLACK) + f64::MIN_POSITIVE })
}

/// Gradient bound `‖∇(ρ∗v)‖_{L^p} ≤ N ‖ρ‖_{L¹} ‖∇v‖_{L^p}` with `N = 2`.
pub fn gradient_bound_check(rho: &Kernel, v: &ExtendedField, p: f64) -> Result<InequalityCheck> {
    let conv = convolve(rho, v)?;
    let lhs = conv.gradient_seminorm(p)?;
    let rhs = 2.0 * rho.mass() * v.field().gradient_seminorm(p)?;
    Ok(InequalityCheck { lhs, rhs, pass: lhs <= rhs * (1.0 + YOUNG_SLACK) + f64::MIN_POSITIVE })
}
