//! Hessian geometry in symplectic coordinates: the inverse of the moment
//! chart, the matrices `G_ij` and `G^ij`, the complex potential `psi` and
//! the Kahler potential `psi_dual`, plus the one-center closed forms.
//!
//! `psi` is the function of `(mu1, mu2)` whose Hessian reproduces `G_ij` and
//! whose gradient components are `2 log|z_i|` up to constants:
//!
//! ```text
//! psi = 1/2 sum_j [ (r_j + (z-c_j)) log(r_j + (z-c_j))
//!                 + (r_j - (z-c_j)) log(r_j - (z-c_j)) ]
//!       + (eps/4) (rho^2 log rho^2 + rho^2) + (eps/2) z^2
//!       + C1 mu1 + C2 mu2
//! ```
//!
//! The `(eps/4)(rho^2 log rho^2 + rho^2)` term is forced by the defining
//! differentials `dz_i/z_i = 1/2 sum_j G_ij dmu_j + i dtheta_i`: without it
//! `d(psi)/d(mu2) - 2 log|z_2|` fails to be constant for `eps != 0`.

use crate::error::{GeomError, Result};
use crate::fields::{solve_pa, PointGeom};
use crate::model::{GeometryConfig, RealChartPoint, DOMAIN_GUARD};
use crate::moment::{moment_image_neg, moment_map, ImageBounds};
use crate::numerics::{fd_hessian, solve_monotone_root, FdSettings, RootSolveSettings};

/// Symmetric 2x2 coefficient container.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymForm2 {
    pub g11: f64,
    pub g12: f64,
    pub g22: f64,
}

impl SymForm2 {
    pub fn mul(&self, other: &SymForm2) -> [[f64; 2]; 2] {
        [
            [
                self.g11 * other.g11 + self.g12 * other.g12,
                self.g11 * other.g12 + self.g12 * other.g22,
            ],
            [
                self.g12 * other.g11 + self.g22 * other.g12,
                self.g12 * other.g12 + self.g22 * other.g22,
            ],
        ]
    }

    pub fn det(&self) -> f64 {
        self.g11 * self.g22 - self.g12 * self.g12
    }

    pub fn is_positive_definite(&self) -> bool {
        self.g11 > 0.0 && self.det() > 0.0
    }
}

fn guard_chart(geom: &PointGeom, v: f64) -> Result<()> {
    if v.abs() <= DOMAIN_GUARD {
        return Err(GeomError::DegenerateAtBoundary { v_abs: v.abs() });
    }
    // G22 ~ 1/rho^2 is a chart singularity on the axis, not a metric one.
    if geom.rho_sq < DOMAIN_GUARD * DOMAIN_GUARD {
        return Err(GeomError::TooCloseToAxisCut {
            gap: geom.rho_sq.sqrt(),
            guard: DOMAIN_GUARD,
        });
    }
    Ok(())
}

/// The matrix `G_ij` of the metric in symplectic coordinates, with
/// `S1 = sum_j 1/(r_j (r_j - (z - c_j)))`:
/// `G11 = 2V + rho^2 S1^2 / (2V)`, `G12 = S1/V`, `G22 = 2/(V rho^2)`.
pub fn g_matrix(config: &GeometryConfig, point: &RealChartPoint) -> Result<SymForm2> {
    let geom = PointGeom::new(config, point)?;
    let v = geom.potential(config.epsilon());
    guard_chart(&geom, v)?;
    let s1 = geom.sum_inv_rw();
    Ok(SymForm2 {
        g11: 2.0 * v + geom.rho_sq * s1 * s1 / (2.0 * v),
        g12: s1 / v,
        g22: 2.0 / (v * geom.rho_sq),
    })
}

/// The inverse matrix `G^ij`:
/// `G^11 = 1/(2V)`, `G^12 = -rho^2 S1 / (4V)`,
/// `G^22 = V rho^2/2 + (rho^2 S1)^2 / (8V)`.
pub fn g_inverse(config: &GeometryConfig, point: &RealChartPoint) -> Result<SymForm2> {
    let geom = PointGeom::new(config, point)?;
    let v = geom.potential(config.epsilon());
    guard_chart(&geom, v)?;
    let s = geom.sum_ratio(); // rho^2 * S1
    Ok(SymForm2 {
        g11: 1.0 / (2.0 * v),
        g12: -s / (4.0 * v),
        g22: v * geom.rho_sq / 2.0 + s * s / (8.0 * v),
    })
}

fn checked_xlogx(x: f64) -> Result<f64> {
    if x <= DOMAIN_GUARD {
        return Err(GeomError::LogDomain { value: x });
    }
    Ok(x * x.ln())
}

/// The complex potential `psi` at `point` (see the module docs for the
/// formula). `C1`, `C2` are the free linear constants.
pub fn complex_potential(
    config: &GeometryConfig,
    point: &RealChartPoint,
    c1: f64,
    c2: f64,
) -> Result<f64> {
    let geom = PointGeom::new(config, point)?;
    let eps = config.epsilon();
    let mut acc = 0.0;
    for (j, &c) in config.centers().iter().enumerate() {
        let plus = geom.r_plus_d(j, point.z, c);
        let minus = geom.w[j];
        acc += 0.5 * (checked_xlogx(plus)? + checked_xlogx(minus)?);
    }
    if eps != 0.0 {
        let p = geom.rho_sq;
        if p <= DOMAIN_GUARD * DOMAIN_GUARD {
            return Err(GeomError::LogDomain { value: p });
        }
        acc += eps / 4.0 * (p * p.ln() + p);
    }
    acc += eps / 2.0 * point.z * point.z;
    let m = moment_map(config, point)?;
    Ok(acc + c1 * m.mu1 + c2 * m.mu2)
}

/// The Kahler potential
/// `psi_dual = -sum_j c_j log(r_j - (z - c_j)) + (eps/2) z^2 + C1 mu1 + C2 mu2`.
pub fn kahler_potential(
    config: &GeometryConfig,
    point: &RealChartPoint,
    c1: f64,
    c2: f64,
) -> Result<f64> {
    let geom = PointGeom::new(config, point)?;
    let mut acc = 0.0;
    for (j, &c) in config.centers().iter().enumerate() {
        let w = geom.w[j];
        if w <= DOMAIN_GUARD {
            return Err(GeomError::LogDomain { value: w });
        }
        acc -= c * w.ln();
    }
    acc += config.epsilon() / 2.0 * point.z * point.z;
    let m = moment_map(config, point)?;
    Ok(acc + c1 * m.mu1 + c2 * m.mu2)
}

/// Inverts the moment chart on the plus region: given `(mu1, mu2)` strictly
/// inside the image, returns `(rho, z)` with `z = -mu1` and `rho^2 = p` the
/// unique root of `(eps/4) p + 1/2 sum_j (sqrt(p + (z-c_j)^2) + z - c_j) =
/// mu2` on the branch where `V > 0` (the target is strictly increasing in
/// `p` there, with derivative `V/2`).
pub fn symplectic_to_cylindrical(
    config: &GeometryConfig,
    mu1: f64,
    mu2: f64,
) -> Result<(f64, f64)> {
    let z = -mu1;
    let eps = config.epsilon();
    let target = |p: f64| -> f64 {
        let mut acc = eps / 4.0 * p;
        for &c in config.centers() {
            let d = z - c;
            let r = (p + d * d).sqrt();
            // Stable form of r + d for d < 0.
            acc += 0.5 * if d >= 0.0 { r + d } else { p / (r - d) };
        }
        acc - mu2
    };
    let at_zero = target(0.0);
    if at_zero > 1e-12 * mu2.abs().max(1.0) {
        return Err(GeomError::OutsideImage);
    }
    if at_zero >= 0.0 {
        return Ok((0.0, z));
    }
    let hi = if eps < 0.0 {
        // Only the V > 0 branch inverts; p_a caps it.
        let pa = solve_pa(config, z).map_err(|e| match e {
            GeomError::NoPositiveRoot => GeomError::OutsideImage,
            other => other,
        })?;
        if target(pa) < 0.0 {
            return Err(GeomError::OutsideImage);
        }
        pa
    } else {
        let mut hi = config
            .centers()
            .iter()
            .map(|&c| (z - c) * (z - c))
            .fold(1.0_f64, f64::max);
        while target(hi) < 0.0 {
            hi *= 2.0;
            if !hi.is_finite() {
                return Err(GeomError::OutsideImage);
            }
        }
        hi
    };
    let p = solve_monotone_root(target, 0.0, hi, &RootSolveSettings::tight())?;
    Ok((p.max(0.0).sqrt(), z))
}

/// Residual `Hess_mu(psi) - G` at `(mu1, mu2)`, with the Hessian taken by
/// central differences of `psi` composed with the chart inversion.
pub fn hessian_residual(
    config: &GeometryConfig,
    mu1: f64,
    mu2: f64,
    settings: &FdSettings,
) -> Result<[[f64; 2]; 2]> {
    let psi = |m: &[f64; 2]| -> Result<f64> {
        let (rho, z) = symplectic_to_cylindrical(config, m[0], m[1])?;
        complex_potential(config, &RealChartPoint::new(0.0, rho, 0.0, z), 0.0, 0.0)
    };
    let hess = fd_hessian(&psi, &[mu1, mu2], settings)?;
    let (rho, z) = symplectic_to_cylindrical(config, mu1, mu2)?;
    let g = g_matrix(config, &RealChartPoint::new(0.0, rho, 0.0, z))?;
    Ok([
        [hess[0][0] - g.g11, hess[0][1] - g.g12],
        [hess[1][0] - g.g12, hess[1][1] - g.g22],
    ])
}

/// One-center closed forms (`n = 1`, `c_1 = 0`, `eps != 0`): solves the
/// moment relation `(eps/4) rho^2 + (sqrt(rho^2 + z^2) + z)/2 = mu2` for
/// `rho^2` and `r_1` with `D = sqrt(4 eps mu2 + (1 - eps z)^2)`:
///
/// ```text
/// r_1   = (D - 1)/eps
/// rho^2 = -2 (-2 eps mu2 - (1 - eps z) + D) / eps^2
/// ```
pub fn n1_closed_forms(epsilon: f64, mu2: f64, z: f64) -> Result<(f64, f64)> {
    if epsilon == 0.0 {
        return Err(GeomError::InvalidParameter(
            "closed forms require epsilon != 0 (the eps = 0 inverse is r = 2 mu2 - z)".into(),
        ));
    }
    let disc = 4.0 * epsilon * mu2 + (1.0 - epsilon * z) * (1.0 - epsilon * z);
    if disc < 0.0 {
        return Err(GeomError::NegativeDiscriminant { value: disc });
    }
    let d = disc.sqrt();
    let r1 = (d - 1.0) / epsilon;
    let rho_sq = -2.0 * (-2.0 * epsilon * mu2 - (1.0 - epsilon * z) + d) / (epsilon * epsilon);
    Ok((rho_sq, r1))
}

/// Closed-form complex potential for `n = 1`, `c_1 = 0`, `eps != 0`,
/// expressed directly in `(mu1, mu2)` through [`n1_closed_forms`]; an
/// independent route to the same `psi` as
/// [`complex_potential`] `o` [`symplectic_to_cylindrical`].
pub fn n1_complex_potential(
    epsilon: f64,
    mu1: f64,
    mu2: f64,
    c1: f64,
    c2: f64,
) -> Result<f64> {
    let z = -mu1;
    let disc = 4.0 * epsilon * mu2 + (1.0 - epsilon * z) * (1.0 - epsilon * z);
    if disc < 0.0 {
        return Err(GeomError::NegativeDiscriminant { value: disc });
    }
    let d = disc.sqrt();
    // r + z and r - z in the cancellation-free closed forms.
    let plus = (epsilon * z - 1.0 + d) / epsilon;
    let minus = (-epsilon * z - 1.0 + d) / epsilon;
    let mut acc = 0.5 * (checked_xlogx(plus)? + checked_xlogx(minus)?);
    let p = plus * minus;
    if p <= DOMAIN_GUARD * DOMAIN_GUARD {
        return Err(GeomError::LogDomain { value: p });
    }
    acc += epsilon / 4.0 * (p * p.ln() + p);
    acc += epsilon / 2.0 * mu1 * mu1;
    Ok(acc + c1 * mu1 + c2 * mu2)
}
