//! Normalized solutions of the mass-constrained Kirchhoff equation with a
//! Sobolev-critical nonlinearity,
//!
//! ```text
//! -(a + b∫|∇u|²)Δu + λu = μ|u|^{q-2}u + |u|^{2*-2}u  in ℝᴺ,   ∫|u|² = c.
//! ```
//!
//! The crate is layered: [`scalar`] holds thresholds and one-dimensional
//! landscapes, [`radial`] discretizes radial fields, [`functionals`] evaluates
//! energies and fiber maps on norm tuples, [`solver`] runs constrained flows and
//! explicit mountain-pass paths, and [`regime`] ties them into per-regime checks.

pub mod error;
pub mod functionals;
pub mod params;
pub mod quad;
pub mod radial;
pub mod regime;
pub mod scalar;
pub mod solver;

pub use error::{Error, Result};
pub use params::ProblemParams;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
