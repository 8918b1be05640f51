//! Problem configuration, coordinate records and domain checks.
//!
//! Everything downstream works over a [`GeometryConfig`]: the parameter
//! `epsilon` together with `n` collinear center heights `c_1 < ... < c_n` on
//! the z-axis. The working chart is the circle bundle over
//! `U = R^3 - {(0,0,z) | z >= c_1}`, with fiber coordinate `phi`.

use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};

/// Distance guard around the singular set (centers and the axis cut).
/// Operations that evaluate singular expressions reject points closer than
/// this, returning structured errors instead of non-finite numbers.
pub const DOMAIN_GUARD: f64 = 1e-8;

pub const TAU: f64 = std::f64::consts::TAU;

/// Normalizes an angle to `[0, 2*pi)`.
pub fn wrap_angle(t: f64) -> f64 {
    let w = t.rem_euclid(TAU);
    if w == TAU {
        0.0
    } else {
        w
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct RawGeometryConfig {
    epsilon: f64,
    centers: Vec<f64>,
}

/// The parameter `epsilon` and the ordered center heights; the single source
/// of problem parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGeometryConfig", into = "RawGeometryConfig")]
pub struct GeometryConfig {
    epsilon: f64,
    centers: Vec<f64>,
}

impl GeometryConfig {
    /// Validates and builds a configuration; centers must be strictly
    /// increasing and non-empty, and everything must be finite.
    pub fn new(centers: Vec<f64>, epsilon: f64) -> Result<Self> {
        if centers.is_empty() {
            return Err(GeomError::EmptyCenters);
        }
        if !epsilon.is_finite() {
            return Err(GeomError::InvalidParameter(format!(
                "epsilon must be finite, got {epsilon}"
            )));
        }
        for (i, &c) in centers.iter().enumerate() {
            if !c.is_finite() {
                return Err(GeomError::InvalidParameter(format!(
                    "center {i} must be finite, got {c}"
                )));
            }
            if i > 0 && c <= centers[i - 1] {
                return Err(GeomError::DuplicateCenter { index: i, value: c });
            }
        }
        Ok(Self { epsilon, centers })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    pub fn n(&self) -> usize {
        self.centers.len()
    }

    /// `a = -epsilon` for `epsilon < 0`; `None` otherwise.
    pub fn a(&self) -> Option<f64> {
        (self.epsilon < 0.0).then_some(-self.epsilon)
    }

    /// True when this is the single-center configuration with `c_1 = 0`
    /// required by the closed-form one-center operations.
    pub fn is_single_center_at_origin(&self) -> bool {
        self.n() == 1 && self.centers[0] == 0.0
    }
}

impl TryFrom<RawGeometryConfig> for GeometryConfig {
    type Error = GeomError;

    fn try_from(raw: RawGeometryConfig) -> Result<Self> {
        GeometryConfig::new(raw.centers, raw.epsilon)
    }
}

impl From<GeometryConfig> for RawGeometryConfig {
    fn from(cfg: GeometryConfig) -> Self {
        RawGeometryConfig {
            epsilon: cfg.epsilon,
            centers: cfg.centers,
        }
    }
}

/// A point `(phi, x, y, z)` on the circle bundle over `U`; `phi` is stored
/// normalized to `[0, 2*pi)`. `rho` and `theta` are derived polar data in the
/// `(x, y)` plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealChartPoint {
    pub phi: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl RealChartPoint {
    pub fn new(phi: f64, x: f64, y: f64, z: f64) -> Self {
        Self {
            phi: wrap_angle(phi),
            x,
            y,
            z,
        }
    }

    pub fn rho_sq(&self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn rho(&self) -> f64 {
        self.rho_sq().sqrt()
    }

    pub fn theta(&self) -> f64 {
        wrap_angle(self.y.atan2(self.x))
    }

    pub fn spatial(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn coords(&self) -> [f64; 4] {
        [self.phi, self.x, self.y, self.z]
    }

    pub fn from_coords(c: [f64; 4]) -> Self {
        Self::new(c[0], c[1], c[2], c[3])
    }
}

/// Action-angle record `(mu1, mu2, theta1, theta2)`; angles normalized to
/// `[0, 2*pi)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymplecticPoint {
    pub mu1: f64,
    pub mu2: f64,
    pub theta1: f64,
    pub theta2: f64,
}

impl SymplecticPoint {
    pub fn new(mu1: f64, mu2: f64, theta1: f64, theta2: f64) -> Self {
        Self {
            mu1,
            mu2,
            theta1: wrap_angle(theta1),
            theta2: wrap_angle(theta2),
        }
    }
}

/// Sign classification of `V_eps` against a tolerance band `delta`:
/// `Plus` when `V > delta`, `Minus` when `V < -delta`, `Boundary` otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Plus,
    Minus,
    Boundary,
}

impl std::fmt::Display for Phase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Phase::Plus => write!(f, "plus"),
            Phase::Minus => write!(f, "minus"),
            Phase::Boundary => write!(f, "boundary"),
        }
    }
}

/// True iff the spatial part of `point` lies in
/// `U = R^3 - {(0,0,z) | z >= c_1}`.
pub fn in_domain_u(config: &GeometryConfig, point: &RealChartPoint) -> bool {
    point.x != 0.0 || point.y != 0.0 || point.z < config.centers()[0]
}

/// Euclidean distance from `(x, y, z)` to the singular set: the centers
/// together with the closed half-line `{(0,0,t) | t >= c_1}`.
pub fn singular_set_distance(config: &GeometryConfig, x: f64, y: f64, z: f64) -> f64 {
    let rho = (x * x + y * y).sqrt();
    let c1 = config.centers()[0];
    let to_cut = if z >= c1 {
        rho
    } else {
        (rho * rho + (z - c1) * (z - c1)).sqrt()
    };
    let to_centers = config
        .centers()
        .iter()
        .map(|&c| (rho * rho + (z - c) * (z - c)).sqrt())
        .fold(f64::INFINITY, f64::min);
    to_cut.min(to_centers)
}
