//! Error taxonomy shared by every module.
//!
//! Operations return structured errors instead of non-finite numbers; the
//! domain guards around the singular set (centers, axis cut, phase boundary)
//! all surface here.

use thiserror::Error;

/// Errors raised by geometry and numerics operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("center list is empty")]
    EmptyCenters,

    #[error("centers must be strictly increasing: c[{index}] = {value} is not above its predecessor")]
    DuplicateCenter { index: usize, value: f64 },

    #[error("point within {dist:.3e} of center {index} (guard {guard:.1e})")]
    TooCloseToCenter { index: usize, dist: f64, guard: f64 },

    #[error("point within {gap:.3e} of the axis cut (guard {guard:.1e})")]
    TooCloseToAxisCut { gap: f64, guard: f64 },

    #[error("point lies on the excluded half-line above the lowest center")]
    OutsideDomain,

    #[error("metric degenerate near the phase boundary: |V| = {v_abs:.3e}")]
    DegenerateAtBoundary { v_abs: f64 },

    #[error("no sign change on [{lo}, {hi}] after bracket expansion")]
    NoBracket { lo: f64, hi: f64 },

    #[error("root solve did not converge within {max_iter} iterations")]
    NoConvergence { max_iter: usize },

    #[error("finite-difference stencil left the domain: {source}")]
    StencilOutOfDomain {
        #[source]
        source: Box<GeomError>,
    },

    #[error("V_(-a)(0; z) <= 0: the axis ray at this height carries no positive root")]
    NoPositiveRoot,

    #[error("(mu1, mu2) lies outside the moment image")]
    OutsideImage,

    #[error("discriminant 4*eps*mu2 + (1 - eps*z)^2 = {value:.3e} is negative")]
    NegativeDiscriminant { value: f64 },

    #[error("logarithm argument {value:.3e} at or below guard")]
    LogDomain { value: f64 },

    #[error("chart map undefined: coordinate on the divisor of the chart")]
    ChartSingular,

    #[error("moment polytope is defined for epsilon >= 0 only")]
    NegativeEpsilon,

    #[error("epsilon < 0 requires an explicit phase branch")]
    PhaseRequired,

    #[error("1 + eps*r = {value:.3e}: metric pole at the phase boundary")]
    PoleAtPhaseBoundary { value: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, GeomError>;

impl GeomError {
    /// Wraps an error produced while evaluating a finite-difference stencil.
    pub fn into_stencil(self) -> GeomError {
        match self {
            e @ GeomError::StencilOutOfDomain { .. } => e,
            other => GeomError::StencilOutOfDomain {
                source: Box::new(other),
            },
        }
    }
}
