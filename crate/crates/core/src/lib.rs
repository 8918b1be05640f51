//! Explicit geometry of toric multi-Taub-NUT spaces.
//!
//! The family is built from the Gibbons-Hawking ansatz over `n` collinear
//! centers on the z-axis with potential `V_eps = eps/2 + 1/2 sum_j 1/r_j`:
//! `eps > 0` gives the multi-Taub-NUT metrics, `eps = 0` the Gibbons-Hawking
//! (ALE) metrics, and `eps < 0` splits the space into regions where `g` and
//! `-g` are Riemannian, separated by the locus `V_eps = 0`.
//!
//! The crate provides:
//! - the fields `V`, `alpha` and the phase-boundary profile `p_a(z)`
//!   ([`fields`]);
//! - the metric, complex structure and symplectic form in the real chart,
//!   plus finite-difference curvature and integrability checks
//!   ([`real_chart`]);
//! - the moment map of the 2-torus action and its image in both parameter
//!   regimes ([`moment`]);
//! - the Hessian package in symplectic coordinates: `G_ij`, its inverse,
//!   the complex and Kahler potentials, and the chart inversion
//!   ([`hessian`]);
//! - holomorphic coordinates, the `(alpha_i, beta_i)` atlas, and the
//!   closed-form one-center metric family ([`holomorphic`]);
//! - named verification suites behind a registry, selectable at runtime
//!   ([`verify`]).

pub mod error;
pub mod fields;
pub mod hessian;
pub mod holomorphic;
pub mod model;
pub mod moment;
pub mod numerics;
pub mod real_chart;
pub mod sample;
pub mod verify;

pub use error::{GeomError, Result};
pub use model::{GeometryConfig, Phase, RealChartPoint, SymplecticPoint, DOMAIN_GUARD};
