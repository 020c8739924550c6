//! Discrete function spaces on uniform triangulations of axis-aligned
//! rectangles: quadrature, Lebesgue/Sobolev norms, traces and nodal field
//! algebra.
//!
//! Every rectangle is triangulated by splitting each grid cell along the
//! lower-left to upper-right diagonal, so a grid with `n_x * n_y` nodes
//! carries `2 (n_x-1)(n_y-1)` triangles. Fields are piecewise linear on that
//! triangulation and identified with their nodal values in row-major order
//! (`index = iy * n_x + ix`).

use std::io::{BufRead, Write};
use std::sync::Arc;

use crate::error::{Error, Result};

/// Axis-aligned rectangle.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Rect {
    pub x_min: f64,
    pub y_min: f64,
    pub x_max: f64,
    pub y_max: f64,
}

impl Rect {
    pub fn new(x_min: f64, y_min: f64, x_max: f64, y_max: f64) -> Result<Self> {
        if !(x_min < x_max && y_min < y_max)
            || !x_min.is_finite()
            || !y_min.is_finite()
            || !x_max.is_finite()
            || !y_max.is_finite()
        {
            return Err(Error::InvalidParameter(format!(
                "degenerate rectangle ({x_min}, {y_min}) x ({x_max}, {y_max})"
            )));
        }
        Ok(Rect { x_min, y_min, x_max, y_max })
    }

    pub fn unit() -> Self {
        Rect { x_min: 0.0, y_min: 0.0, x_max: 1.0, y_max: 1.0 }
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn perimeter(&self) -> f64 {
        2.0 * (self.width() + self.height())
    }
}

/// Uniform grid of `n_x * n_y` nodes on a rectangle, triangulated cell by
/// cell along the lower-left to upper-right diagonal.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GridSpec {
    rect: Rect,
    n_x: usize,
    n_y: usize,
}

/// Which half of a cell a triangle is.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TriHalf {
    /// Vertices (ll, lr, ur).
    Lower,
    /// Vertices (ll, ur, ul).
    Upper,
}

/// One triangle of the mesh: global vertex indices, per-vertex basis
/// gradients and the (uniform) area.
#[derive(Debug, Clone, Copy)]
pub struct Triangle {
    pub vertices: [usize; 3],
    pub grads: [[f64; 2]; 3],
    pub area: f64,
    pub half: TriHalf,
}

impl GridSpec {
    pub fn new(rect: Rect, n_x: usize, n_y: usize) -> Result<Self> {
        if n_x < 2 || n_y < 2 {
            return Err(Error::InvalidParameter(format!(
                "need at least 2 nodes per axis, got {n_x} x {n_y}"
            )));
        }
        Ok(GridSpec { rect, n_x, n_y })
    }

    /// Square grid with `n` nodes per axis on the unit square.
    pub fn unit_square(n: usize) -> Result<Self> {
        GridSpec::new(Rect::unit(), n, n)
    }

    pub fn rect(&self) -> Rect {
        self.rect
    }

    pub fn n_x(&self) -> usize {
        self.n_x
    }

    pub fn n_y(&self) -> usize {
        self.n_y
    }

    pub fn h_x(&self) -> f64 {
        self.rect.width() / (self.n_x - 1) as f64
    }

    pub fn h_y(&self) -> f64 {
        self.rect.height() / (self.n_y - 1) as f64
    }

    /// Largest spacing, the mesh parameter of convergence statements.
    pub fn h_max(&self) -> f64 {
        self.h_x().max(self.h_y())
    }

    pub fn node_count(&self) -> usize {
        self.n_x * self.n_y
    }

    pub fn triangle_count(&self) -> usize {
        2 * (self.n_x - 1) * (self.n_y - 1)
    }

    pub fn index(&self, ix: usize, iy: usize) -> usize {
        debug_assert!(ix < self.n_x && iy < self.n_y);
        iy * self.n_x + ix
    }

    pub fn coords(&self, ix: usize, iy: usize) -> [f64; 2] {
        [
            self.rect.x_min + ix as f64 * self.h_x(),
            self.rect.y_min + iy as f64 * self.h_y(),
        ]
    }

    pub fn node_coords(&self, idx: usize) -> [f64; 2] {
        self.coords(idx % self.n_x, idx / self.n_x)
    }

    pub fn same_spacing(&self, other: &GridSpec) -> bool {
        relative_eq(self.h_x(), other.h_x()) && relative_eq(self.h_y(), other.h_y())
    }

    /// Iterator over all mesh triangles in row-major cell order, lower half
    /// first within each cell.
    pub fn triangles(&self) -> impl Iterator<Item = Triangle> + '_ {
        let (hx, hy) = (self.h_x(), self.h_y());
        let area = 0.5 * hx * hy;
        let lower_grads = [[-1.0 / hx, 0.0], [1.0 / hx, -1.0 / hy], [0.0, 1.0 / hy]];
        let upper_grads = [[0.0, -1.0 / hy], [1.0 / hx, 0.0], [-1.0 / hx, 1.0 / hy]];
        (0..self.n_y - 1).flat_map(move |cy| {
            (0..self.n_x - 1).flat_map(move |cx| {
                let ll = self.index(cx, cy);
                let lr = self.index(cx + 1, cy);
                let ul = self.index(cx, cy + 1);
                let ur = self.index(cx + 1, cy + 1);
                [
                    Triangle {
                        vertices: [ll, lr, ur],
                        grads: lower_grads,
                        area,
                        half: TriHalf::Lower,
                    },
                    Triangle {
                        vertices: [ll, ur, ul],
                        grads: upper_grads,
                        area,
                        half: TriHalf::Upper,
                    },
                ]
            })
        })
    }

    /// Lumped interior quadrature weights: `m_i = sum of adjacent triangle
    /// areas / 3`. Summing `m_i f(x_i)` is the per-triangle vertex-averaged
    /// rule for nodal integrands.
    pub fn lumped_weights(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.node_count()];
        for tri in self.triangles() {
            for &v in &tri.vertices {
                m[v] += tri.area / 3.0;
            }
        }
        m
    }

    pub fn is_boundary_node(&self, idx: usize) -> bool {
        let ix = idx % self.n_x;
        let iy = idx / self.n_x;
        ix == 0 || iy == 0 || ix == self.n_x - 1 || iy == self.n_y - 1
    }

    pub fn boundary_quadrature(&self) -> BoundaryQuadrature {
        BoundaryQuadrature::new(self)
    }
}

fn relative_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

/// One boundary edge with its two node indices and length.
#[derive(Debug, Clone, Copy)]
pub struct BoundaryEdge {
    pub nodes: [usize; 2],
    pub length: f64,
}

/// Trapezoidal quadrature on the boundary polygon: each edge contributes
/// half its length to each endpoint. Weights sum to the exact perimeter.
#[derive(Debug, Clone)]
pub struct BoundaryQuadrature {
    edges: Vec<BoundaryEdge>,
    /// Per-node weight, zero for interior nodes.
    weights: Vec<f64>,
}

impl BoundaryQuadrature {
    fn new(grid: &GridSpec) -> Self {
        let (nx, ny) = (grid.n_x, grid.n_y);
        let (hx, hy) = (grid.h_x(), grid.h_y());
        let mut edges = Vec::with_capacity(2 * (nx + ny) - 4);
        // Counterclockwise walk: bottom, right, top, left.
        for ix in 0..nx - 1 {
            edges.push(BoundaryEdge { nodes: [grid.index(ix, 0), grid.index(ix + 1, 0)], length: hx });
        }
        for iy in 0..ny - 1 {
            edges.push(BoundaryEdge {
                nodes: [grid.index(nx - 1, iy), grid.index(nx - 1, iy + 1)],
                length: hy,
            });
        }
        for ix in (0..nx - 1).rev() {
            edges.push(BoundaryEdge {
                nodes: [grid.index(ix + 1, ny - 1), grid.index(ix, ny - 1)],
                length: hx,
            });
        }
        for iy in (0..ny - 1).rev() {
            edges.push(BoundaryEdge { nodes: [grid.index(0, iy + 1), grid.index(0, iy)], length: hy });
        }
        let mut weights = vec![0.0; grid.node_count()];
        for e in &edges {
            for &n in &e.nodes {
                weights[n] += 0.5 * e.length;
            }
        }
        BoundaryQuadrature { edges, weights }
    }

    pub fn edges(&self) -> &[BoundaryEdge] {
        &self.edges
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn perimeter(&self) -> f64 {
        self.edges.iter().map(|e| e.length).sum()
    }
}

/// Integration region selector for norms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Interior,
    Boundary,
}

/// Piecewise-linear field given by its nodal values on a [`GridSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteField {
    grid: Arc<GridSpec>,
    values: Vec<f64>,
}

impl DiscreteField {
    pub fn new(grid: Arc<GridSpec>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.node_count() {
            return Err(Error::GridMismatch(format!(
                "field has {} values for a grid with {} nodes",
                values.len(),
                grid.node_count()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Evaluation { node: i });
        }
        Ok(DiscreteField { grid, values })
    }

    pub fn zeros(grid: Arc<GridSpec>) -> Self {
        let values = vec![0.0; grid.node_count()];
        DiscreteField { grid, values }
    }

    pub fn constant(grid: Arc<GridSpec>, c: f64) -> Result<Self> {
        let values = vec![c; grid.node_count()];
        DiscreteField::new(grid, values)
    }

    /// Sample a closure at the grid nodes.
    pub fn from_fn(grid: Arc<GridSpec>, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let values = (0..grid.node_count())
            .map(|i| {
                let [x, y] = grid.node_coords(i);
                f(x, y)
            })
            .collect();
        DiscreteField::new(grid, values)
    }

    pub fn grid(&self) -> &Arc<GridSpec> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn max(&self) -> f64 {
        self.values.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v))
    }

    /// `L^p` norm over the interior (per-triangle vertex-averaged rule) or
    /// the boundary (trapezoidal trace rule).
    pub fn lp_norm(&self, p: f64, region: Region) -> Result<f64> {
        if !(p >= 1.0) {
            return Err(Error::InvalidExponent(p));
        }
        let weights_owned;
        let weights: &[f64] = match region {
            Region::Interior => {
                weights_owned = self.grid.lumped_weights();
                &weights_owned
            }
            Region::Boundary => {
                weights_owned = self.grid.boundary_quadrature().weights().to_vec();
                &weights_owned
            }
        };
        Ok(weighted_lp(&self.values, weights, p))
    }

    /// Gradient seminorm `(∫ |∇u|^p dx)^{1/p}` with the exact per-triangle
    /// constant gradient.
    pub fn gradient_seminorm(&self, p: f64) -> Result<f64> {
        if !(p >= 1.0) {
            return Err(Error::InvalidExponent(p));
        }
        let grads = self.gradient();
        let mags: Vec<f64> = grads.iter().map(|g| (g[0] * g[0] + g[1] * g[1]).sqrt()).collect();
        let areas: Vec<f64> = self.grid.triangles().map(|t| t.area).collect();
        Ok(weighted_lp(&mags, &areas, p))
    }

    /// `W^{1,p}` norm: gradient seminorm plus `L^p` norm (sum, not a p-th
    /// root of sums).
    pub fn w1p_norm(&self, p: f64) -> Result<f64> {
        Ok(self.gradient_seminorm(p)? + self.lp_norm(p, Region::Interior)?)
    }

    /// Constant gradient per triangle, in the triangle order of
    /// [`GridSpec::triangles`].
    pub fn gradient(&self) -> Vec<[f64; 2]> {
        self.grid
            .triangles()
            .map(|t| {
                let mut g = [0.0, 0.0];
                for (v, gr) in t.vertices.iter().zip(t.grads.iter()) {
                    g[0] += self.values[*v] * gr[0];
                    g[1] += self.values[*v] * gr[1];
                }
                g
            })
            .collect()
    }

    /// Area-weighted average of adjacent triangle gradients at each node,
    /// the nodal representative used to evaluate coefficients pointwise.
    pub fn node_gradient(&self) -> Vec<[f64; 2]> {
        let mut acc = vec![[0.0; 2]; self.grid.node_count()];
        let weights = self.grid.lumped_weights();
        for (tri, g) in self.grid.triangles().zip(self.gradient()) {
            for &v in &tri.vertices {
                acc[v][0] += g[0] * tri.area / 3.0;
                acc[v][1] += g[1] * tri.area / 3.0;
            }
        }
        for (a, w) in acc.iter_mut().zip(weights) {
            a[0] /= w;
            a[1] /= w;
        }
        acc
    }

    /// Nodal truncation `min(u, h)`.
    pub fn truncate(&self, h: f64) -> Result<DiscreteField> {
        if !(h > 0.0) {
            return Err(Error::InvalidParameter(format!("truncation level must be positive, got {h}")));
        }
        let values = self.values.iter().map(|&v| v.min(h)).collect();
        Ok(DiscreteField { grid: self.grid.clone(), values })
    }

    /// Nodal positive and negative parts `(u⁺, u⁻)` with `u = u⁺ - u⁻`.
    pub fn pos_neg_parts(&self) -> (DiscreteField, DiscreteField) {
        let pos = self.values.iter().map(|&v| v.max(0.0)).collect();
        let neg = self.values.iter().map(|&v| (-v).max(0.0)).collect();
        (
            DiscreteField { grid: self.grid.clone(), values: pos },
            DiscreteField { grid: self.grid.clone(), values: neg },
        )
    }

    fn check_same_grid(&self, other: &DiscreteField) -> Result<()> {
        if self.grid.as_ref() != other.grid.as_ref() {
            return Err(Error::GridMismatch("fields live on different grids".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &DiscreteField) -> Result<DiscreteField> {
        self.check_same_grid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(DiscreteField { grid: self.grid.clone(), values })
    }

    pub fn sub(&self, other: &DiscreteField) -> Result<DiscreteField> {
        self.check_same_grid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Ok(DiscreteField { grid: self.grid.clone(), values })
    }

    pub fn scale(&self, c: f64) -> DiscreteField {
        let values = self.values.iter().map(|v| c * v).collect();
        DiscreteField { grid: self.grid.clone(), values }
    }

    pub fn mul(&self, other: &DiscreteField) -> Result<DiscreteField> {
        self.check_same_grid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect();
        Ok(DiscreteField { grid: self.grid.clone(), values })
    }

    /// Nodal power `u^q`. Non-integer exponents require a nonnegative field.
    pub fn powf(&self, q: f64) -> Result<DiscreteField> {
        let fractional = q.fract() != 0.0;
        let mut values = Vec::with_capacity(self.values.len());
        for (i, &v) in self.values.iter().enumerate() {
            if fractional && v < 0.0 {
                return Err(Error::Domain(format!(
                    "negative base {v} at node {i} with fractional exponent {q}"
                )));
            }
            let r = if fractional { v.powf(q) } else { v.powi(q as i32) };
            if !r.is_finite() {
                return Err(Error::Evaluation { node: i });
            }
            values.push(r);
        }
        Ok(DiscreteField { grid: self.grid.clone(), values })
    }

    /// Write the grid CSV format: rect and node-count header lines followed
    /// by one value per line in row-major node order.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let r = self.grid.rect();
        writeln!(w, "# rect {} {} {} {}", r.x_min, r.y_min, r.x_max, r.y_max)?;
        writeln!(w, "# n {} {}", self.grid.n_x(), self.grid.n_y())?;
        for v in &self.values {
            writeln!(w, "{v:.17e}")?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<DiscreteField> {
        let parts = read_csv_parts(r)?;
        let grid = GridSpec::new(parts.rect, parts.n_x, parts.n_y)?;
        if parts.values.len() != grid.node_count() {
            return Err(Error::Parse(format!(
                "expected {} values, found {}",
                grid.node_count(),
                parts.values.len()
            )));
        }
        DiscreteField::new(Arc::new(grid), parts.values)
    }
}

/// Raw header and value data of the shared CSV layout.
pub(crate) struct CsvParts {
    pub rect: Rect,
    pub n_x: usize,
    pub n_y: usize,
    pub values: Vec<f64>,
    pub origin: Option<(usize, usize)>,
}

/// Parse the shared CSV layout without validating grid invariants; kernel
/// files reuse it with an extra `# origin ix iy` header.
pub(crate) fn read_csv_parts<R: BufRead>(r: R) -> Result<CsvParts> {
    let mut rect = None;
    let mut dims = None;
    let mut origin = None;
    let mut values = Vec::new();
    for line in r.lines() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let mut parts = rest.split_whitespace();
            match parts.next() {
                Some("rect") => {
                    let nums: Vec<f64> = parts.map(|s| s.parse().map_err(|_| Error::Parse(format!("bad rect header: {line}")))).collect::<Result<_>>()?;
                    if nums.len() != 4 {
                        return Err(Error::Parse(format!("rect header needs 4 numbers: {line}")));
                    }
                    rect = Some(Rect::new(nums[0], nums[1], nums[2], nums[3])?);
                }
                Some("n") => {
                    let nums: Vec<usize> = parts.map(|s| s.parse().map_err(|_| Error::Parse(format!("bad n header: {line}")))).collect::<Result<_>>()?;
                    if nums.len() != 2 {
                        return Err(Error::Parse(format!("n header needs 2 numbers: {line}")));
                    }
                    dims = Some((nums[0], nums[1]));
                }
                Some("origin") => {
                    let nums: Vec<usize> = parts.map(|s| s.parse().map_err(|_| Error::Parse(format!("bad origin header: {line}")))).collect::<Result<_>>()?;
                    if nums.len() != 2 {
                        return Err(Error::Parse(format!("origin header needs 2 numbers: {line}")));
                    }
                    origin = Some((nums[0], nums[1]));
                }
                _ => return Err(Error::Parse(format!("unknown header line: {line}"))),
            }
        } else {
            values.push(line.parse::<f64>().map_err(|_| Error::Parse(format!("bad value line: {line}")))?);
        }
    }
    let rect = rect.ok_or_else(|| Error::Parse("missing rect header".into()))?;
    let (n_x, n_y) = dims.ok_or_else(|| Error::Parse("missing n header".into()))?;
    Ok(CsvParts { rect, n_x, n_y, values, origin })
}

/// Scale-stable weighted `(Σ w_i |v_i|^p)^{1/p}`; robust for the very large
/// exponents of the Moser ladder.
pub(crate) fn weighted_lp(values: &[f64], weights: &[f64], p: f64) -> f64 {
    let m = values.iter().zip(weights).filter(|(_, &w)| w > 0.0).fold(0.0_f64, |acc, (v, _)| acc.max(v.abs()));
    if m == 0.0 {
        return 0.0;
    }
    let sum: f64 = values
        .iter()
        .zip(weights)
        .filter(|(_, &w)| w > 0.0)
        .map(|(v, w)| w * (v.abs() / m).powf(p))
        .sum();
    m * sum.powf(1.0 / p)
}
