//! Extension operator from the unit square to the enlarged square
//! `(-1,3) x (-1,3)` by four successive reflections, a C¹ cutoff and zero
//! extension.
//!
//! The reflections map grid nodes to grid nodes (source spacing divides 1),
//! so the operator is nodally exact: the only numerical error anywhere
//! downstream comes from quadrature and the solver.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{DiscreteField, GridSpec, Rect, Region};

/// One-dimensional C¹ cutoff profile: 1 on `[0,1]`, 0 outside
/// `(-1+delta, 3-delta)`, cubic smoothstep on the transition intervals.
#[derive(Debug, Clone, Copy)]
pub struct CutoffSpec {
    delta: f64,
}

impl CutoffSpec {
    pub fn new(delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidParameter(format!("cutoff margin must be in (0,1), got {delta}")));
        }
        Ok(CutoffSpec { delta })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    fn smoothstep(s: f64) -> f64 {
        s * s * (3.0 - 2.0 * s)
    }

    fn smoothstep_deriv(s: f64) -> f64 {
        6.0 * s * (1.0 - s)
    }

    /// Transition profile `eta(t)`.
    pub fn eta(&self, t: f64) -> f64 {
        let d = self.delta;
        if t <= -1.0 + d || t >= 3.0 - d {
            0.0
        } else if t < 0.0 {
            Self::smoothstep((t + 1.0 - d) / (1.0 - d))
        } else if t <= 1.0 {
            1.0
        } else {
            Self::smoothstep((3.0 - d - t) / (2.0 - d))
        }
    }

    pub fn eta_deriv(&self, t: f64) -> f64 {
        let d = self.delta;
        if t <= -1.0 + d || t >= 3.0 - d {
            0.0
        } else if t < 0.0 {
            Self::smoothstep_deriv((t + 1.0 - d) / (1.0 - d)) / (1.0 - d)
        } else if t <= 1.0 {
            0.0
        } else {
            -Self::smoothstep_deriv((3.0 - d - t) / (2.0 - d)) / (2.0 - d)
        }
    }

    /// Tensor cutoff `psi(x) = eta(x1) eta(x2)`.
    pub fn psi(&self, x: f64, y: f64) -> f64 {
        self.eta(x) * self.eta(y)
    }

    pub fn grad_psi(&self, x: f64, y: f64) -> [f64; 2] {
        [self.eta_deriv(x) * self.eta(y), self.eta(x) * self.eta_deriv(y)]
    }
}

/// Field on the enlarged grid obtained from a source field by the
/// reflection chain and cutoff; zero outside the cutoff support by
/// construction and understood as zero outside the enlarged rectangle.
#[derive(Debug, Clone)]
pub struct ExtendedField {
    field: DiscreteField,
    source_grid: Arc<GridSpec>,
}

impl ExtendedField {
    pub fn field(&self) -> &DiscreteField {
        &self.field
    }

    pub fn into_field(self) -> DiscreteField {
        self.field
    }

    pub fn source_grid(&self) -> &Arc<GridSpec> {
        &self.source_grid
    }
}

/// The reflection-and-cutoff extension operator for the unit square.
#[derive(Debug, Clone)]
pub struct ExtensionOperator {
    source: Arc<GridSpec>,
    target: Arc<GridSpec>,
    cutoff: CutoffSpec,
}

const UNIT_TOL: f64 = 1e-12;

impl ExtensionOperator {
    /// Build the operator for a source grid on the unit square. The target
    /// grid covers `(-1,3)^2` with the same spacing, so source nodes are a
    /// subset of target nodes.
    pub fn new(source: Arc<GridSpec>, cutoff: CutoffSpec) -> Result<Self> {
        let r = source.rect();
        if (r.x_min.abs()).max(r.y_min.abs()) > UNIT_TOL
            || (r.x_max - 1.0).abs().max((r.y_max - 1.0).abs()) > UNIT_TOL
        {
            return Err(Error::GridMismatch(
                "reflection extension is defined on the unit square (0,1)x(0,1)".into(),
            ));
        }
        let mx = source.n_x() - 1;
        let my = source.n_y() - 1;
        let target = GridSpec::new(Rect::new(-1.0, -1.0, 3.0, 3.0)?, 4 * mx + 1, 4 * my + 1)?;
        Ok(ExtensionOperator { source, target: Arc::new(target), cutoff })
    }

    pub fn source(&self) -> &Arc<GridSpec> {
        &self.source
    }

    pub fn target(&self) -> &Arc<GridSpec> {
        &self.target
    }

    pub fn cutoff(&self) -> &CutoffSpec {
        &self.cutoff
    }

    /// Source node index of the reflected pre-image of a target axis index.
    /// In coordinates: fold `x > 1` to `2 - x`, then `x < 0` to `-x`,
    /// which composes the four reflections.
    fn fold(idx: usize, m: usize) -> usize {
        let mut j = idx as i64 - m as i64; // coordinate = j * h
        if j > m as i64 {
            j = 2 * m as i64 - j;
        }
        j.unsigned_abs() as usize
    }

    fn check_source(&self, u: &DiscreteField) -> Result<()> {
        if u.grid().as_ref() != self.source.as_ref() {
            return Err(Error::GridMismatch("field does not live on the operator's source grid".into()));
        }
        Ok(())
    }

    /// Apply the composed reflections nodally; the value at a target node
    /// is the source value at its uniquely determined pre-image.
    pub fn reflect_chain(&self, u: &DiscreteField) -> Result<DiscreteField> {
        self.check_source(u)?;
        let (mx, my) = (self.source.n_x() - 1, self.source.n_y() - 1);
        let mut values = Vec::with_capacity(self.target.node_count());
        for ty in 0..self.target.n_y() {
            for tx in 0..self.target.n_x() {
                let sx = Self::fold(tx, mx);
                let sy = Self::fold(ty, my);
                values.push(u.values()[self.source.index(sx, sy)]);
            }
        }
        DiscreteField::new(self.target.clone(), values)
    }

    /// `E(u) = psi * (R4∘R3∘R2∘R1 u)`, zero outside the enlarged square.
    pub fn extend(&self, u: &DiscreteField) -> Result<ExtendedField> {
        let mut reflected = self.reflect_chain(u)?;
        for i in 0..reflected.values().len() {
            let [x, y] = self.target.node_coords(i);
            reflected.values_mut()[i] *= self.cutoff.psi(x, y);
        }
        Ok(ExtendedField { field: reflected, source_grid: self.source.clone() })
    }

    /// Restrict a target field to the source nodes.
    pub fn restrict(&self, v: &DiscreteField) -> Result<DiscreteField> {
        if v.grid().as_ref() != self.target.as_ref() {
            return Err(Error::GridMismatch("field does not live on the operator's target grid".into()));
        }
        let (mx, my) = (self.source.n_x() - 1, self.source.n_y() - 1);
        let mut values = Vec::with_capacity(self.source.node_count());
        for sy in 0..self.source.n_y() {
            for sx in 0..self.source.n_x() {
                values.push(v.values()[self.target.index(sx + mx, sy + my)]);
            }
        }
        DiscreteField::new(self.source.clone(), values)
    }

    /// Restrict per-node vector data to the source nodes.
    pub fn restrict_vectors(&self, v: &[[f64; 2]]) -> Result<Vec<[f64; 2]>> {
        if v.len() != self.target.node_count() {
            return Err(Error::GridMismatch("vector data does not match the target grid".into()));
        }
        let (mx, my) = (self.source.n_x() - 1, self.source.n_y() - 1);
        let mut out = Vec::with_capacity(self.source.node_count());
        for sy in 0..self.source.n_y() {
            for sx in 0..self.source.n_x() {
                out.push(v[self.target.index(sx + mx, sy + my)]);
            }
        }
        Ok(out)
    }

    /// `‖E(u)‖_{L^p(target)} / ‖u‖_{L^p(source)}`.
    pub fn extension_norm_ratio(&self, u: &DiscreteField, p: f64) -> Result<f64> {
        let denom = u.lp_norm(p, Region::Interior)?;
        if denom == 0.0 {
            return Err(Error::Domain("extension norm ratio is undefined for the zero field".into()));
        }
        let eu = self.extend(u)?;
        Ok(eu.field.lp_norm(p, Region::Interior)? / denom)
    }

    /// `‖E(u)‖_{W^{1,p}(target)} / ‖u‖_{W^{1,p}(source)}`.
    pub fn w1p_extension_ratio(&self, u: &DiscreteField, p: f64) -> Result<f64> {
        let denom = u.w1p_norm(p)?;
        if denom == 0.0 {
            return Err(Error::Domain("extension norm ratio is undefined for the zero field".into()));
        }
        let eu = self.extend(u)?;
        Ok(eu.field.w1p_norm(p)? / denom)
    }
}
