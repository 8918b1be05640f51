//! Scalar and one-form building blocks: the distances `r_j`, the potential
//! `V_eps = eps/2 + 1/2 sum_j 1/r_j`, the connection form `alpha` in the
//! gauge regular away from the upward half-line, the phase-boundary profile
//! `p_a(z)`, and phase classification by the sign of `V_eps`.

use crate::error::{GeomError, Result};
use crate::model::{GeometryConfig, Phase, RealChartPoint, DOMAIN_GUARD};
use crate::numerics::{solve_monotone_root, RootSolveSettings};

/// The potential value together with the per-center distances it was built
/// from.
#[derive(Clone, Debug, PartialEq)]
pub struct PotentialValue {
    pub v: f64,
    pub per_center_r: Vec<f64>,
}

/// Components of `alpha = a_x dx + a_y dy` (no `dz` component in this gauge).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConnectionForm {
    pub a_x: f64,
    pub a_y: f64,
}

/// Per-point geometric data shared by the field and metric evaluators:
/// `r[j]` is the distance to center `j` and `w[j] = r_j - (z - c_j)` the
/// denominator that vanishes on the axis cut above center `j`.
#[derive(Clone, Debug)]
pub(crate) struct PointGeom {
    pub rho_sq: f64,
    pub r: Vec<f64>,
    pub w: Vec<f64>,
}

impl PointGeom {
    /// Builds the cached data, rejecting points within the guard distance of
    /// any center. `w` is computed in the cancellation-free form
    /// `rho^2 / (r_j + (z - c_j))` where `z - c_j > 0`.
    pub fn new(config: &GeometryConfig, point: &RealChartPoint) -> Result<Self> {
        let rho_sq = point.rho_sq();
        let mut r = Vec::with_capacity(config.n());
        let mut w = Vec::with_capacity(config.n());
        for (j, &c) in config.centers().iter().enumerate() {
            let d = point.z - c;
            let rj = (rho_sq + d * d).sqrt();
            if rj < DOMAIN_GUARD {
                return Err(GeomError::TooCloseToCenter {
                    index: j,
                    dist: rj,
                    guard: DOMAIN_GUARD,
                });
            }
            let wj = if d > 0.0 { rho_sq / (rj + d) } else { rj - d };
            r.push(rj);
            w.push(wj);
        }
        Ok(Self { rho_sq, r, w })
    }

    /// Rejects points within the guard of the axis cut (any `w_j` small).
    pub fn require_axis_clearance(&self) -> Result<()> {
        let min_w = self.w.iter().cloned().fold(f64::INFINITY, f64::min);
        if min_w < DOMAIN_GUARD {
            return Err(GeomError::TooCloseToAxisCut {
                gap: min_w,
                guard: DOMAIN_GUARD,
            });
        }
        Ok(())
    }

    /// `r_j + (z - c_j)`, stable near the lower axis where the direct sum
    /// cancels.
    pub fn r_plus_d(&self, j: usize, z: f64, c: f64) -> f64 {
        let d = z - c;
        if d >= 0.0 {
            self.r[j] + d
        } else {
            self.rho_sq / self.w[j]
        }
    }

    pub fn potential(&self, epsilon: f64) -> f64 {
        epsilon / 2.0 + 0.5 * self.r.iter().map(|r| 1.0 / r).sum::<f64>()
    }

    /// `S1 = sum_j 1/(r_j (r_j - (z - c_j)))`.
    pub fn sum_inv_rw(&self) -> f64 {
        self.r.iter().zip(&self.w).map(|(r, w)| 1.0 / (r * w)).sum()
    }

    /// `S = sum_j (r_j + z - c_j)/r_j`, computed as `rho^2 * S1`.
    pub fn sum_ratio(&self) -> f64 {
        self.rho_sq * self.sum_inv_rw()
    }
}

/// Distances `r_j = sqrt(x^2 + y^2 + (z - c_j)^2)` to every center.
pub fn eval_r(config: &GeometryConfig, point: &RealChartPoint) -> Result<Vec<f64>> {
    Ok(PointGeom::new(config, point)?.r)
}

/// `V_eps = eps/2 + 1/2 sum_j 1/r_j`.
pub fn eval_potential(config: &GeometryConfig, point: &RealChartPoint) -> Result<PotentialValue> {
    let geom = PointGeom::new(config, point)?;
    Ok(PotentialValue {
        v: geom.potential(config.epsilon()),
        per_center_r: geom.r,
    })
}

/// Analytic gradient of `V_eps` in `(x, y, z)`:
/// `grad V = -1/2 sum_j (x, y, z - c_j)/r_j^3`.
pub fn eval_potential_gradient(
    config: &GeometryConfig,
    point: &RealChartPoint,
) -> Result<[f64; 3]> {
    let geom = PointGeom::new(config, point)?;
    let mut g = [0.0; 3];
    for (j, &c) in config.centers().iter().enumerate() {
        let r3 = geom.r[j] * geom.r[j] * geom.r[j];
        g[0] -= 0.5 * point.x / r3;
        g[1] -= 0.5 * point.y / r3;
        g[2] -= 0.5 * (point.z - c) / r3;
    }
    Ok(g)
}

/// The connection form of the monopole equation `*dV_eps = -d(alpha)`:
/// `alpha = -1/2 sum_j (x dy - y dx) / (r_j (r_j - z + c_j))`.
pub fn eval_alpha(config: &GeometryConfig, point: &RealChartPoint) -> Result<ConnectionForm> {
    let geom = PointGeom::new(config, point)?;
    geom.require_axis_clearance()?;
    let s1 = geom.sum_inv_rw();
    Ok(ConnectionForm {
        a_x: 0.5 * point.y * s1,
        a_y: -0.5 * point.x * s1,
    })
}

/// `V_{-a}` along the ray at height `z`, as a function of `p = rho^2`.
fn v_of_p(config: &GeometryConfig, a: f64, z: f64, p: f64) -> f64 {
    -a / 2.0
        + 0.5
            * config
                .centers()
                .iter()
                .map(|&c| 1.0 / (p + (z - c) * (z - c)).sqrt())
                .sum::<f64>()
}

/// Phase-boundary profile for `epsilon = -a < 0`: the unique `p >= 0` with
/// `V_{-a}(p; z) = 0`.
///
/// `V_{-a}` is strictly decreasing in `p` with limit `-a/2`, so a positive
/// root exists exactly when `V_{-a}(0; z) > 0`; otherwise the whole ray lies
/// in the minus region and [`GeomError::NoPositiveRoot`] is returned.
pub fn solve_pa(config: &GeometryConfig, z: f64) -> Result<f64> {
    let a = config.a().ok_or_else(|| {
        GeomError::InvalidParameter("p_a(z) is defined for epsilon < 0 only".into())
    })?;
    let v0 = v_of_p(config, a, z, 0.0);
    if v0 <= 0.0 {
        return Err(GeomError::NoPositiveRoot);
    }
    // V stays positive until p is past max_j (z - c_j)^2 + small; the solver
    // expands the bracket from there until the sign flips.
    let hi0 = config
        .centers()
        .iter()
        .map(|&c| (z - c) * (z - c))
        .fold(0.0_f64, f64::max)
        + 1.0;
    let settings = RootSolveSettings {
        abs_tol: 1e-13,
        ..RootSolveSettings::default()
    };
    solve_monotone_root(|p| v_of_p(config, a, z, p), 0.0, hi0, &settings)
}

/// Classifies a point by the sign of `V_eps` against the band `delta`.
pub fn classify_phase(
    config: &GeometryConfig,
    point: &RealChartPoint,
    delta: f64,
) -> Result<Phase> {
    let v = eval_potential(config, point)?.v;
    Ok(if v > delta {
        Phase::Plus
    } else if v < -delta {
        Phase::Minus
    } else {
        Phase::Boundary
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::GeometryConfig;

    fn cfg(centers: &[f64], eps: f64) -> GeometryConfig {
        GeometryConfig::new(centers.to_vec(), eps).unwrap()
    }

    fn pt(x: f64, y: f64, z: f64) -> RealChartPoint {
        RealChartPoint::new(0.0, x, y, z)
    }

    #[test]
    fn distances() {
        assert_eq!(eval_r(&cfg(&[0.0], 1.0), &pt(0.0, 0.0, -1.0)).unwrap(), vec![1.0]);
        assert_eq!(
            eval_r(&cfg(&[0.0, 1.0], 1.0), &pt(0.0, 0.0, -1.0)).unwrap(),
            vec![1.0, 2.0]
        );
        assert_eq!(eval_r(&cfg(&[0.0], 1.0), &pt(3.0, 4.0, 0.0)).unwrap(), vec![5.0]);
    }

    #[test]
    fn potential_values() {
        assert_eq!(
            eval_potential(&cfg(&[0.0], 1.0), &pt(0.0, 0.0, -1.0)).unwrap().v,
            1.0
        );
        assert!(
            (eval_potential(&cfg(&[0.0], 0.0), &pt(3.0, 4.0, 0.0)).unwrap().v - 0.1).abs() < 1e-15
        );
        // V_{-1} = 0 at r = 1
        assert!(
            eval_potential(&cfg(&[0.0], -1.0), &pt(1.0, 0.0, 0.0)).unwrap().v.abs() < 1e-15
        );
    }

    #[test]
    fn too_close_to_center_rejected() {
        let r = eval_potential(&cfg(&[0.0], 1.0), &pt(0.0, 0.0, 1e-12));
        assert!(matches!(r, Err(GeomError::TooCloseToCenter { .. })));
    }

    #[test]
    fn alpha_hand_values() {
        // Direct evaluation at (1,0,0), n=1: r = 1, w = 1 => a_y = -1/2.
        let a = eval_alpha(&cfg(&[0.0], 0.0), &pt(1.0, 0.0, 0.0)).unwrap();
        assert!((a.a_x - 0.0).abs() < 1e-15 && (a.a_y + 0.5).abs() < 1e-15);
        // Same oracle with x and y swapped.
        let a = eval_alpha(&cfg(&[0.0], 0.0), &pt(0.0, 1.0, 0.0)).unwrap();
        assert!((a.a_x - 0.5).abs() < 1e-15 && (a.a_y - 0.0).abs() < 1e-15);
        // Numerators vanish on the lower axis.
        let a = eval_alpha(&cfg(&[0.0], 0.0), &pt(0.0, 0.0, -2.0)).unwrap();
        assert_eq!((a.a_x, a.a_y), (0.0, 0.0));
    }

    #[test]
    fn alpha_rejected_on_axis_cut() {
        let r = eval_alpha(&cfg(&[0.0], 0.0), &pt(1e-9, 0.0, 2.0));
        assert!(matches!(r, Err(GeomError::TooCloseToAxisCut { .. })));
    }

    #[test]
    fn pa_closed_forms() {
        // n=1: p_a(z) = 1/a^2 - z^2.
        let p = solve_pa(&cfg(&[0.0], -1.0), 0.0).unwrap();
        assert!((p - 1.0).abs() < 1e-10);
        let p = solve_pa(&cfg(&[0.0], -0.5), 1.0).unwrap();
        assert!((p - 3.0).abs() < 1e-10);
        // Symmetric two-center case solvable by hand: (p + 0.25)^(-1/2) = 1/2.
        let p = solve_pa(&cfg(&[0.0, 1.0], -1.0), 0.5).unwrap();
        assert!((p - 3.75).abs() < 1e-10);
    }

    #[test]
    fn pa_empty_ray() {
        // |z| >= 1/a: V(0) <= 0.
        assert!(matches!(
            solve_pa(&cfg(&[0.0], -1.0), 2.0),
            Err(GeomError::NoPositiveRoot)
        ));
        assert!(solve_pa(&cfg(&[0.0], 1.0), 0.0).is_err());
    }

    #[test]
    fn phase_classification() {
        let c = cfg(&[0.0], -1.0);
        assert_eq!(classify_phase(&c, &pt(0.5, 0.0, 0.0), 1e-9).unwrap(), Phase::Plus);
        assert_eq!(classify_phase(&c, &pt(2.0, 0.0, 0.0), 1e-9).unwrap(), Phase::Minus);
        assert_eq!(classify_phase(&c, &pt(1.0, 0.0, 0.0), 1e-9).unwrap(), Phase::Boundary);
        let c = cfg(&[0.0], 1.0);
        assert_eq!(classify_phase(&c, &pt(9.0, 0.0, 4.0), 1e-9).unwrap(), Phase::Plus);
    }

    #[test]
    fn phase_matches_pa_profile() {
        let c = cfg(&[0.0, 0.7], -0.8);
        for &z in &[-0.4, 0.1, 0.9] {
            let pa = solve_pa(&c, z).unwrap();
            let rho_in = (pa * 0.8).sqrt();
            let rho_out = (pa * 1.2).sqrt();
            assert_eq!(
                classify_phase(&c, &pt(rho_in, 0.0, z), 1e-9).unwrap(),
                Phase::Plus
            );
            assert_eq!(
                classify_phase(&c, &pt(rho_out, 0.0, z), 1e-9).unwrap(),
                Phase::Minus
            );
        }
    }
}
