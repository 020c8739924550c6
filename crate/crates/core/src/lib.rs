//! Finite element solver and property-verification harness for a nonlocal
//! quasilinear elliptic boundary value problem
//!
//! ```text
//!   -div A(x, u, ∇u) + a |u|^{p-2} u = B(x, ρ∗E(u), ∇(ρ∗E(u)))   in Ω,
//!                   A(x, u, ∇u) · ν = C(x, u)                    on ∂Ω,
//! ```
//!
//! on the unit square, where `E` extends fields to `(-1,3)²` by reflections
//! and a cutoff and `ρ` is an integrable convolution kernel. The crate
//! provides the discrete function spaces, the extension and convolution
//! operators with their norm inequalities as checkable surfaces, structure
//! condition validators, a damped-Newton / relaxed fixed-point solver, and
//! an a-posteriori boundedness verification ladder.

pub mod convolution;
pub mod error;
pub mod extension;
pub mod grid;
pub mod moser;
pub mod solver;
pub mod structure;

pub use error::{Error, Result};
pub use grid::{DiscreteField, GridSpec, Rect, Region};
