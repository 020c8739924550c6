//! Run configuration: flat sectioned key-value file (TOML, one level of
//! sections), covering the problem preset, grid, kernel, solver settings,
//! and the manufactured-solution study.

use std::sync::Arc;

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

use qnl_core::convolution::{Kernel, KernelPreset};
use qnl_core::extension::{CutoffSpec, ExtensionOperator};
use qnl_core::grid::GridSpec;
use qnl_core::solver::SolveConfig;
use qnl_core::structure::{
    mms_forcing, p_laplacian_neumann, pq_laplacian, robin_p_laplacian, validate_exponent_conditions,
    CoefficientSet, Mode,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProblemSection {
    /// One of `constant`, `p-laplacian`, `pq-laplacian`, `robin`.
    pub preset: String,
    pub p: f64,
    pub a: f64,
    /// Reaction level for the `constant` preset.
    pub reaction: f64,
    /// Secondary exponent and weight for the `pq-laplacian` preset.
    pub q: f64,
    pub mu: f64,
    /// Boundary coefficient for the `robin` preset.
    pub lambda: f64,
    /// Optional growth-exponent overrides, validated before solving.
    pub alpha1: Option<f64>,
    pub alpha2: Option<f64>,
    pub alpha3: Option<f64>,
}

impl Default for ProblemSection {
    fn default() -> Self {
        ProblemSection {
            preset: "constant".into(),
            p: 2.0,
            a: 1.0,
            reaction: 2.0,
            q: 1.5,
            mu: 0.5,
            lambda: 0.5,
            alpha1: None,
            alpha2: None,
            alpha3: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub n: usize,
    pub cutoff_delta: f64,
}

impl Default for GridSection {
    fn default() -> Self {
        GridSection { n: 33, cutoff_delta: 0.1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KernelSection {
    /// One of `delta`, `box`, `gaussian`, `bump`.
    pub kind: String,
    /// Radius for `box`/`bump`, standard deviation for `gaussian`.
    pub radius: f64,
    pub normalize: bool,
}

impl Default for KernelSection {
    fn default() -> Self {
        KernelSection { kind: "delta".into(), radius: 0.15, normalize: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MmsSection {
    pub mesh_sizes: Vec<usize>,
}

impl Default for MmsSection {
    fn default() -> Self {
        MmsSection { mesh_sizes: vec![9, 17, 33, 65] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub problem: ProblemSection,
    pub grid: GridSection,
    pub kernel: KernelSection,
    pub solve: SolveConfig,
    pub mms: MmsSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            problem: ProblemSection::default(),
            grid: GridSection::default(),
            kernel: KernelSection::default(),
            solve: SolveConfig::default(),
            mms: MmsSection::default(),
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> anyhow::Result<RunConfig> {
        let cfg: RunConfig = toml::from_str(text).context("invalid configuration")?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> anyhow::Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn build_grid(&self) -> anyhow::Result<Arc<GridSpec>> {
        if self.grid.n < 3 {
            bail!("grid.n must be at least 3, got {}", self.grid.n);
        }
        Ok(Arc::new(GridSpec::unit_square(self.grid.n)?))
    }

    pub fn build_set(&self, grid: Arc<GridSpec>) -> anyhow::Result<CoefficientSet> {
        let p = &self.problem;
        let mut set = match p.preset.as_str() {
            "constant" => {
                let f = qnl_core::grid::DiscreteField::constant(grid, p.reaction)?;
                mms_forcing(p.p, p.a, f)?
            }
            "p-laplacian" => p_laplacian_neumann(grid, p.p, p.a)?,
            "pq-laplacian" => pq_laplacian(grid, p.p, p.q, p.mu, p.a)?,
            "robin" => robin_p_laplacian(grid, p.p, p.a, p.lambda)?,
            other => bail!("unknown preset '{other}' (expected constant, p-laplacian, pq-laplacian, robin)"),
        };
        if let Some(a1) = p.alpha1 {
            set.alphas[0] = a1;
        }
        if let Some(a2) = p.alpha2 {
            set.alphas[1] = a2;
        }
        if let Some(a3) = p.alpha3 {
            set.alphas[2] = a3;
        }
        set.validate_basic()?;
        let verdict = validate_exponent_conditions(&set, Mode::A);
        if !verdict.no_violation_found() {
            bail!("exponent conditions violated: {}", verdict.violations.join("; "));
        }
        Ok(set)
    }

    pub fn build_kernel(&self, grid: &GridSpec) -> anyhow::Result<Kernel> {
        let k = &self.kernel;
        let kind = match k.kind.as_str() {
            "delta" => KernelPreset::Delta,
            "box" => KernelPreset::Box { radius: k.radius },
            "gaussian" => KernelPreset::Gaussian { sigma: k.radius },
            "bump" => KernelPreset::Bump { radius: k.radius },
            other => bail!("unknown kernel kind '{other}' (expected delta, box, gaussian, bump)"),
        };
        Ok(Kernel::preset(kind, grid.h_x(), grid.h_y(), k.normalize)?)
    }

    pub fn build_operator(&self, grid: Arc<GridSpec>) -> anyhow::Result<ExtensionOperator> {
        Ok(ExtensionOperator::new(grid, CutoffSpec::new(self.grid.cutoff_delta)?)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_identity() {
        let cfg = RunConfig::default();
        let text = cfg.to_toml().unwrap();
        let back = RunConfig::parse(&text).unwrap();
        assert_eq!(cfg, back);
        // and a second cycle reproduces the same text
        assert_eq!(text, back.to_toml().unwrap());
    }

    #[test]
    fn round_trip_with_overrides() {
        let text = r#"
[problem]
preset = "robin"
p = 2.5
lambda = 0.7

[grid]
n = 17

[kernel]
kind = "gaussian"
radius = 0.2

[solve]
theta = 0.5
"#;
        let cfg = RunConfig::parse(text).unwrap();
        assert_eq!(cfg.problem.preset, "robin");
        assert_eq!(cfg.solve.theta, 0.5);
        let back = RunConfig::parse(&cfg.to_toml().unwrap()).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(RunConfig::parse("[problem]\nbogus = 1\n").is_err());
    }

    #[test]
    fn exponent_override_rejected_at_build() {
        let mut cfg = RunConfig::default();
        cfg.problem.alpha1 = Some(cfg.problem.p - 1.0); // endpoint excluded
        let grid = cfg.build_grid().unwrap();
        let err = cfg.build_set(grid).unwrap_err();
        assert!(err.to_string().contains("exponent conditions violated"), "{err}");
    }
}
