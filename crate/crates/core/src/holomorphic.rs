//! Holomorphic coordinates and complex-chart metrics.
//!
//! The distinguished coordinates are
//!
//! ```text
//! z1 = prod_j (r_j - (z - c_j))^(1/2) * exp(-(eps/2) z + i theta1)
//! z2 = x + i y
//! ```
//!
//! with the chart atlas `(alpha_i, beta_i)` obtained from
//! `alpha_1 = z2/z1`, `beta_1 = z1` and the transitions
//! `alpha_{i+1} = alpha_i^2 beta_i`, `beta_{i+1} = alpha_i^{-1}` covering
//! the resolved space. For a single center the coordinate map inverts by a
//! monotone scalar solve, with a closed-form metric in `(alpha, beta)`.

use nalgebra::Matrix4;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::fields::PointGeom;
use crate::model::{GeometryConfig, Phase, RealChartPoint, DOMAIN_GUARD};
use crate::numerics::{solve_monotone_root, RootSolveSettings};
use crate::real_chart::TwoForm4;

/// Region selector for the one-center coordinate solve when `eps < 0`:
/// the equation is monotone only per sign of `V`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PhaseBranch {
    Plus,
    Minus,
}

/// A point in one of the holomorphic charts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "chart", rename_all = "lowercase")]
pub enum HolomorphicPoint {
    /// The distinguished `(z1, z2)` chart.
    Z { z1: Complex64, z2: Complex64 },
    /// Chart `i` of the atlas with coordinates `(alpha_i, beta_i)`.
    Ab {
        index: usize,
        alpha: Complex64,
        beta: Complex64,
    },
}

/// Coefficients of a Hermitian metric
/// `g = h11 du dubar + h12 du dvbar + conj(h12) dv dubar + h22 dv dvbar`
/// in a named frame pair `(du, dv)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HermitianForm2 {
    pub h11: f64,
    pub h12: Complex64,
    pub h22: f64,
}

impl HermitianForm2 {
    pub fn det(&self) -> f64 {
        self.h11 * self.h22 - self.h12.norm_sqr()
    }

    pub fn is_positive_definite(&self) -> bool {
        self.h11 > 0.0 && self.det() > 0.0
    }

    pub fn is_negative_definite(&self) -> bool {
        self.h11 < 0.0 && self.det() > 0.0
    }

    pub fn max_abs_diff(&self, other: &HermitianForm2) -> f64 {
        (self.h11 - other.h11)
            .abs()
            .max((self.h12 - other.h12).norm())
            .max((self.h22 - other.h22).abs())
    }
}

/// `(z1, z2)` of a real-chart point. The square root takes the positive real
/// branch of the product; `theta1 = phi` carries all the phase.
pub fn to_z_coords(
    config: &GeometryConfig,
    point: &RealChartPoint,
) -> Result<(Complex64, Complex64)> {
    let geom = PointGeom::new(config, point)?;
    geom.require_axis_clearance()?;
    let modulus: f64 = geom.w.iter().product::<f64>().sqrt()
        * (-config.epsilon() / 2.0 * point.z).exp();
    let z1 = Complex64::from_polar(modulus, point.phi);
    let z2 = Complex64::new(point.x, point.y);
    Ok((z1, z2))
}

/// First chart of the atlas: `alpha_1 = z2/z1`, `beta_1 = z1`.
pub fn z_to_ab(z1: Complex64, z2: Complex64) -> Result<(Complex64, Complex64)> {
    if z1.norm() == 0.0 {
        return Err(GeomError::ChartSingular);
    }
    Ok((z2 / z1, z1))
}

/// Atlas transition `alpha_{i+1} = alpha_i^2 beta_i`, `beta_{i+1} = 1/alpha_i`.
pub fn chart_transition(alpha: Complex64, beta: Complex64) -> Result<(Complex64, Complex64)> {
    if alpha.norm() == 0.0 {
        return Err(GeomError::ChartSingular);
    }
    Ok((alpha * alpha * beta, alpha.inv()))
}

/// Exact exponent bookkeeping for the atlas: a coordinate expressed as the
/// monomial `z1^e1 * z2^e2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChartMonomial {
    pub e1: i64,
    pub e2: i64,
}

/// Exponents of `(alpha_i, beta_i)` as monomials in `(z1, z2)`, `i >= 1`.
pub fn chart_monomials(i: usize) -> (ChartMonomial, ChartMonomial) {
    let mut alpha = ChartMonomial { e1: -1, e2: 1 };
    let mut beta = ChartMonomial { e1: 1, e2: 0 };
    for _ in 1..i {
        let next_alpha = ChartMonomial {
            e1: 2 * alpha.e1 + beta.e1,
            e2: 2 * alpha.e2 + beta.e2,
        };
        let next_beta = ChartMonomial {
            e1: -alpha.e1,
            e2: -alpha.e2,
        };
        alpha = next_alpha;
        beta = next_beta;
    }
    (alpha, beta)
}

/// `f(z) = (sqrt(rho^2 + z^2) - z) e^{-eps z}` with the cancellation-free
/// form of `r - z` for `z > 0`.
fn f_of_z(rho_sq: f64, epsilon: f64, z: f64) -> f64 {
    let r = (rho_sq + z * z).sqrt();
    let rmz = if z > 0.0 { rho_sq / (r + z) } else { r - z };
    rmz * (-epsilon * z).exp()
}

fn expand_up<F: Fn(f64) -> f64>(f: F, start: f64, target_at_least: f64) -> Result<f64> {
    let mut hi = start.max(1.0);
    for _ in 0..2000 {
        if f(hi) >= target_at_least {
            return Ok(hi);
        }
        hi *= 2.0;
    }
    Err(GeomError::NoBracket { lo: start, hi })
}

fn expand_down<F: Fn(f64) -> f64>(f: F, start: f64, target_at_most: f64) -> Result<f64> {
    let mut lo = start.min(-1.0);
    for _ in 0..2000 {
        if f(lo) <= target_at_most {
            return Ok(lo);
        }
        lo *= 2.0;
    }
    Err(GeomError::NoBracket { lo, hi: start })
}

/// Solves the one-center coordinate relation
/// `(sqrt(|alpha|^2 |beta|^2 + z^2) - z) e^{-eps z} = |beta|^2`
/// for `z`, returning `(z, r)`.
///
/// For `eps >= 0` the left side is strictly decreasing and the root unique;
/// `branch` is ignored. For `eps < 0` the equation is monotone only per
/// phase region and `branch` must be given; when `|alpha beta| < 1/a` the
/// minus region has two monotone pieces and the root with `z >= z*` is
/// preferred (see [`scan_z_roots`] to enumerate every root).
///
/// The divisor cases solve their exact axis relations: `alpha = 0` puts the
/// point on the lower axis (`|beta|^2 = -2z e^{-eps z}`, `z < 0`) and
/// `beta = 0` on the upper axis closure (`|alpha|^2 = 2z e^{eps z}`,
/// `z >= 0`).
pub fn solve_z_from_ab(
    epsilon: f64,
    alpha: Complex64,
    beta: Complex64,
    branch: Option<PhaseBranch>,
    settings: &RootSolveSettings,
) -> Result<(f64, f64)> {
    let a_sq = alpha.norm_sqr();
    let b_sq = beta.norm_sqr();
    if epsilon < 0.0 && branch.is_none() {
        return Err(GeomError::PhaseRequired);
    }
    let solve = |f: &dyn Fn(f64) -> f64, lo: f64, hi: f64| -> Result<f64> {
        solve_monotone_root(|z| f(z) - 0.0, lo, hi, settings)
    };

    if a_sq == 0.0 && b_sq == 0.0 {
        return Ok((0.0, 0.0));
    }

    if a_sq == 0.0 {
        // Lower axis: g(z) = -2z e^{-eps z} = |beta|^2 on z <= 0, r = -z.
        let g = |z: f64| -2.0 * z * (-epsilon * z).exp() - b_sq;
        let z = if epsilon == 0.0 {
            -b_sq / 2.0
        } else if epsilon > 0.0 {
            let lo = expand_down(|z| -(g(z)), -1.0 - b_sq, -0.0)?;
            // g increasing toward -inf; bracket [lo, 0] has g(lo) >= 0 >= g(0).
            solve(&g, lo, 0.0)?
        } else {
            let a = -epsilon;
            let zc = -1.0 / a;
            match branch.unwrap() {
                PhaseBranch::Plus => solve(&g, zc, 0.0)?,
                PhaseBranch::Minus => {
                    let lo = expand_down(|z| g(z) + b_sq, zc, b_sq * 0.5)?;
                    solve(&g, lo, zc)?
                }
            }
        };
        return Ok((z, -z));
    }

    if b_sq == 0.0 {
        // Upper axis closure: h(z) = 2z e^{eps z} = |alpha|^2 on z >= 0, r = z.
        let h = |z: f64| 2.0 * z * (epsilon * z).exp() - a_sq;
        let z = if epsilon == 0.0 {
            a_sq / 2.0
        } else if epsilon > 0.0 {
            let hi = expand_up(|z| h(z) + a_sq, 1.0 + a_sq, a_sq)?;
            solve(&h, 0.0, hi)?
        } else {
            let a = -epsilon;
            let zc = 1.0 / a;
            match branch.unwrap() {
                PhaseBranch::Plus => solve(&h, 0.0, zc)?,
                PhaseBranch::Minus => {
                    let hi = expand_up(|z| -h(z) - a_sq + 2.0 * a_sq, zc, a_sq)?;
                    // h decreasing past zc toward 0: bracket [zc, hi] once
                    // h(hi) < a_sq.
                    let mut hi = hi.max(zc * 2.0);
                    for _ in 0..2000 {
                        if h(hi) <= 0.0 {
                            break;
                        }
                        hi *= 2.0;
                    }
                    solve(&h, zc, hi)?
                }
            }
        };
        return Ok((z, z));
    }

    let rho_sq = a_sq * b_sq;
    let f = move |z: f64| f_of_z(rho_sq, epsilon, z) - b_sq;

    let z = if epsilon == 0.0 {
        (a_sq - b_sq) / 2.0
    } else if epsilon > 0.0 {
        // f decreasing from +inf to 0.
        let z0 = (a_sq - b_sq) / 2.0;
        let lo = expand_down(|z| -f(z), z0 - 1.0 - rho_sq.sqrt(), 0.0)?;
        let mut hi = (z0 + 1.0).max(1.0);
        for _ in 0..2000 {
            if f(hi) <= 0.0 {
                break;
            }
            hi *= 2.0;
        }
        solve(&f, lo, hi)?
    } else {
        let a = -epsilon;
        let rho = rho_sq.sqrt();
        if rho >= 1.0 / a {
            match branch.unwrap() {
                PhaseBranch::Plus => {
                    return Err(GeomError::NoBracket { lo: 0.0, hi: 0.0 });
                }
                PhaseBranch::Minus => {
                    // f increasing from 0 to +inf.
                    let lo = expand_down(|z| f(z) + b_sq, -1.0 - rho, b_sq * 0.5)?;
                    let hi = expand_up(|z| f(z) + b_sq, 1.0 + rho, 2.0 * b_sq)?;
                    solve(&f, lo, hi)?
                }
            }
        } else {
            let z_star = (1.0 / (a * a) - rho_sq).sqrt();
            match branch.unwrap() {
                PhaseBranch::Plus => {
                    // f decreasing on [-z*, z*].
                    if f(-z_star) < 0.0 || f(z_star) > 0.0 {
                        return Err(GeomError::NoBracket {
                            lo: -z_star,
                            hi: z_star,
                        });
                    }
                    solve(&f, -z_star, z_star)?
                }
                PhaseBranch::Minus => {
                    if f(z_star) <= 0.0 {
                        // Root on the upper piece, f increasing to +inf.
                        let hi = expand_up(|z| f(z) + b_sq, z_star + 1.0, 2.0 * b_sq)?;
                        solve(&f, z_star, hi)?
                    } else {
                        // Root on the lower piece, f increasing from 0.
                        let lo = expand_down(|z| f(z) + b_sq, -z_star - 1.0, b_sq * 0.5)?;
                        solve(&f, lo, -z_star)?
                    }
                }
            }
        }
    };
    Ok((z, (rho_sq + z * z).sqrt()))
}

/// Grid scan for every root of the coordinate relation in `window`; the
/// exploration companion to [`solve_z_from_ab`] for `eps < 0`.
pub fn scan_z_roots(
    epsilon: f64,
    alpha: Complex64,
    beta: Complex64,
    window: (f64, f64),
    grid: usize,
) -> Vec<f64> {
    let rho_sq = alpha.norm_sqr() * beta.norm_sqr();
    let b_sq = beta.norm_sqr();
    let f = |z: f64| f_of_z(rho_sq, epsilon, z) - b_sq;
    let n = grid.max(2);
    let (lo, hi) = window;
    let settings = RootSolveSettings::default();
    let mut roots = Vec::new();
    let mut prev_z = lo;
    let mut prev_f = f(lo);
    for i in 1..n {
        let z = lo + (hi - lo) * (i as f64) / ((n - 1) as f64);
        let fz = f(z);
        if prev_f == 0.0 {
            roots.push(prev_z);
        } else if prev_f.signum() != fz.signum() {
            if let Ok(root) = solve_monotone_root(f, prev_z, z, &settings) {
                roots.push(root);
            }
        }
        prev_z = z;
        prev_f = fz;
    }
    roots
}

/// Series solution of the coordinate relation around `eps = 0`, to the
/// requested order (at most 2):
///
/// ```text
/// z = (A - B) (1/2 - (A + B)/4 eps + (3A^2 + 2AB + 3B^2)/16 eps^2)
/// r = (A + B)/2 + (A - B)^2 (-eps/4 + 3(A + B)/16 eps^2)
/// ```
///
/// with `A = |alpha|^2`, `B = |beta|^2`.
pub fn series_z_r(
    alpha: Complex64,
    beta: Complex64,
    epsilon: f64,
    order: u8,
) -> Result<(f64, f64)> {
    if order > 2 {
        return Err(GeomError::InvalidParameter(
            "series coefficients are available to order 2 only".into(),
        ));
    }
    let a = alpha.norm_sqr();
    let b = beta.norm_sqr();
    let mut zc = 0.5;
    let mut rc = 0.0;
    if order >= 1 {
        zc += -(a + b) / 4.0 * epsilon;
        rc += -epsilon / 4.0;
    }
    if order >= 2 {
        zc += (3.0 * a * a + 2.0 * a * b + 3.0 * b * b) / 16.0 * epsilon * epsilon;
        rc += 3.0 * (a + b) / 16.0 * epsilon * epsilon;
    }
    let z = (a - b) * zc;
    let r = (a + b) / 2.0 + (a - b) * (a - b) * rc;
    Ok((z, r))
}

struct ChartData {
    v: f64,
    rho_sq: f64,
    /// `S = sum_j (r_j + z - c_j)/r_j`.
    s: f64,
}

fn chart_data(config: &GeometryConfig, point: &RealChartPoint) -> Result<ChartData> {
    let geom = PointGeom::new(config, point)?;
    let v = geom.potential(config.epsilon());
    if v.abs() <= DOMAIN_GUARD {
        return Err(GeomError::DegenerateAtBoundary { v_abs: v.abs() });
    }
    Ok(ChartData {
        v,
        rho_sq: geom.rho_sq,
        s: geom.sum_ratio(),
    })
}

/// Metric coefficients in the logarithmic frames `(dz1/z1, dz2/z2)`:
/// `h11 = 1/V`, `h12 = -S/(2V)`, `h22 = V rho^2 + S^2/(4V)` with
/// `S = sum_j (r_j + z - c_j)/r_j`.
pub fn metric_z_chart(config: &GeometryConfig, point: &RealChartPoint) -> Result<HermitianForm2> {
    let d = chart_data(config, point)?;
    Ok(HermitianForm2 {
        h11: 1.0 / d.v,
        h12: Complex64::new(-d.s / (2.0 * d.v), 0.0),
        h22: d.v * d.rho_sq + d.s * d.s / (4.0 * d.v),
    })
}

/// [`metric_z_chart`] converted to the plain frames `(dz1, dz2)` by dividing
/// by `z_i conj(z_j)`.
pub fn metric_z_chart_plain(
    config: &GeometryConfig,
    point: &RealChartPoint,
) -> Result<HermitianForm2> {
    let log_form = metric_z_chart(config, point)?;
    let (z1, z2) = to_z_coords(config, point)?;
    if z1.norm() < DOMAIN_GUARD || z2.norm() < DOMAIN_GUARD {
        return Err(GeomError::ChartSingular);
    }
    Ok(HermitianForm2 {
        h11: log_form.h11 / z1.norm_sqr(),
        h12: log_form.h12 / (z1 * z2.conj()),
        h22: log_form.h22 / z2.norm_sqr(),
    })
}

/// Metric coefficients in the logarithmic frames
/// `(dalpha_1/alpha_1, dbeta_1/beta_1)`, with the same `S`:
/// `h_aa = V rho^2 + S^2/(4V)`,
/// `h_ab = V rho^2 - S/(2V) + S^2/(4V)`,
/// `h_bb = 1/V + V rho^2 - S/V + S^2/(4V)`.
pub fn metric_ab_chart(config: &GeometryConfig, point: &RealChartPoint) -> Result<HermitianForm2> {
    let d = chart_data(config, point)?;
    let quad = d.s * d.s / (4.0 * d.v);
    let vr = d.v * d.rho_sq;
    Ok(HermitianForm2 {
        h11: vr + quad,
        h12: Complex64::new(vr - d.s / (2.0 * d.v) + quad, 0.0),
        h22: 1.0 / d.v + vr - d.s / d.v + quad,
    })
}

/// [`metric_ab_chart`] in the plain frames `(dalpha_1, dbeta_1)`.
pub fn metric_ab_chart_plain(
    config: &GeometryConfig,
    point: &RealChartPoint,
) -> Result<HermitianForm2> {
    let log_form = metric_ab_chart(config, point)?;
    let (z1, z2) = to_z_coords(config, point)?;
    let (alpha, beta) = z_to_ab(z1, z2)?;
    if alpha.norm() < DOMAIN_GUARD || beta.norm() < DOMAIN_GUARD {
        return Err(GeomError::ChartSingular);
    }
    Ok(HermitianForm2 {
        h11: log_form.h11 / alpha.norm_sqr(),
        h12: log_form.h12 / (alpha * beta.conj()),
        h22: log_form.h22 / beta.norm_sqr(),
    })
}

/// The closed-form one-center family in plain frames `(dalpha, dbeta)`:
///
/// ```text
/// g = A e^{-eps z} da dabar + B (abar b da dbbar + bbar a db dabar)
///   + C e^{eps z} db dbbar
/// A = (eps^2 r^2 + 2 eps r - eps^2 r z + 2 - 2 eps z) / (2 (1 + eps r))
/// B = eps (2 + eps r) / (2 (1 + eps r))
/// C = (eps^2 r^2 + 2 eps r + eps^2 r z + 2 + 2 eps z) / (2 (1 + eps r))
/// ```
///
/// `(z, r)` are recovered by [`solve_z_from_ab`]; `phase_hint` selects the
/// region for `eps < 0`. The pole `1 + eps r = 0` coincides with the phase
/// boundary `V = 0` and is reported as an error.
pub fn metric_n1(
    epsilon: f64,
    alpha: Complex64,
    beta: Complex64,
    phase_hint: Option<PhaseBranch>,
    settings: &RootSolveSettings,
) -> Result<HermitianForm2> {
    let (z, r) = solve_z_from_ab(epsilon, alpha, beta, phase_hint, settings)?;
    let denom = 1.0 + epsilon * r;
    if denom.abs() < DOMAIN_GUARD {
        return Err(GeomError::PoleAtPhaseBoundary { value: denom });
    }
    let er = epsilon * r;
    let ez = epsilon * z;
    let coeff_a = (er * er + 2.0 * er - er * ez + 2.0 - 2.0 * ez) / (2.0 * denom) * (-ez).exp();
    let coeff_b = epsilon * (2.0 + er) / (2.0 * denom);
    let coeff_c = (er * er + 2.0 * er + er * ez + 2.0 + 2.0 * ez) / (2.0 * denom) * ez.exp();
    Ok(HermitianForm2 {
        h11: coeff_a,
        h12: coeff_b * alpha.conj() * beta,
        h22: coeff_c,
    })
}

/// Outcome of the phase classification in the `(alpha, beta)` chart.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct AbPhaseRegion {
    pub label: Phase,
    pub z: f64,
    pub r: f64,
    /// `|alpha| |beta|`, reported for comparison with the two candidate
    /// thresholds.
    pub rho: f64,
    /// `1/a`: the radius where `V` changes sign, hence the threshold
    /// realized by the classification.
    pub threshold_r: f64,
    /// `a` itself, the other inequality the source text states for
    /// `|alpha||beta|`.
    pub threshold_a: f64,
}

/// Classifies `(alpha, beta)` for `eps = -a < 0` by the sign of `V` at the
/// solved point: `Plus` iff `r < 1/a - delta`, `Minus` iff `r > 1/a + delta`.
/// The plus-region solve is preferred where both regions admit roots.
pub fn phase_region_ab(
    epsilon: f64,
    alpha: Complex64,
    beta: Complex64,
    delta: f64,
    settings: &RootSolveSettings,
) -> Result<AbPhaseRegion> {
    let a = if epsilon < 0.0 {
        -epsilon
    } else {
        return Err(GeomError::InvalidParameter(
            "phase classification in (alpha, beta) applies to epsilon < 0".into(),
        ));
    };
    let solved = solve_z_from_ab(epsilon, alpha, beta, Some(PhaseBranch::Plus), settings)
        .or_else(|_| solve_z_from_ab(epsilon, alpha, beta, Some(PhaseBranch::Minus), settings))?;
    let (z, r) = solved;
    let threshold = 1.0 / a;
    let label = if (r - threshold).abs() <= delta {
        Phase::Boundary
    } else if r < threshold {
        Phase::Plus
    } else {
        Phase::Minus
    };
    Ok(AbPhaseRegion {
        label,
        z,
        r,
        rho: (alpha.norm_sqr() * beta.norm_sqr()).sqrt(),
        threshold_r: threshold,
        threshold_a: a,
    })
}

/// The four real coframes behind the pullback of the complex-chart tensors,
/// as component vectors in the basis `(dphi, dx, dy, dz)`:
/// `u = Re(dz1/z1)`, `t1 = dtheta1`, `v = Re(dz2/z2)`, `t2 = dtheta2`.
fn pullback_frames(
    config: &GeometryConfig,
    point: &RealChartPoint,
) -> Result<([f64; 4], [f64; 4], [f64; 4], [f64; 4])> {
    let geom = PointGeom::new(config, point)?;
    geom.require_axis_clearance()?;
    if geom.rho_sq < DOMAIN_GUARD * DOMAIN_GUARD {
        return Err(GeomError::ChartSingular);
    }
    let v_pot = geom.potential(config.epsilon());
    let s1 = geom.sum_inv_rw();
    let (x, y) = (point.x, point.y);
    let u = [0.0, 0.5 * s1 * x, 0.5 * s1 * y, -v_pot];
    let t1 = [1.0, 0.0, 0.0, 0.0];
    let v = [0.0, x / geom.rho_sq, y / geom.rho_sq, 0.0];
    let t2 = [0.0, -y / geom.rho_sq, x / geom.rho_sq, 0.0];
    Ok((u, t1, v, t2))
}

fn sym_outer(a: &[f64; 4], b: &[f64; 4]) -> Matrix4<f64> {
    let mut m = Matrix4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            m[(i, j)] = 0.5 * (a[i] * b[j] + b[i] * a[j]);
        }
    }
    m
}

fn wedge(a: &[f64; 4], b: &[f64; 4]) -> Matrix4<f64> {
    let mut m = Matrix4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            m[(i, j)] = a[i] * b[j] - a[j] * b[i];
        }
    }
    m
}

/// Pushes [`metric_z_chart`] through the differentials of `(z1, z2)` into
/// real-chart components; agrees with
/// [`crate::real_chart::metric_real`] wherever both are defined.
pub fn pull_back_z_metric(
    config: &GeometryConfig,
    point: &RealChartPoint,
) -> Result<Matrix4<f64>> {
    let form = metric_z_chart(config, point)?;
    let (u, t1, v, t2) = pullback_frames(config, point)?;
    let h12 = form.h12.re;
    let mut g = sym_outer(&u, &u) + sym_outer(&t1, &t1);
    g *= form.h11;
    g += (sym_outer(&u, &v) + sym_outer(&t1, &t2)) * (2.0 * h12);
    g += (sym_outer(&v, &v) + sym_outer(&t2, &t2)) * form.h22;
    Ok(g)
}

/// Pullback of the Kahler form written in the `(z1, z2)` frames; agrees
/// with [`crate::real_chart::symplectic_form`].
pub fn pull_back_z_kahler(config: &GeometryConfig, point: &RealChartPoint) -> Result<TwoForm4> {
    let form = metric_z_chart(config, point)?;
    let (u, t1, v, t2) = pullback_frames(config, point)?;
    let h12 = form.h12.re;
    let mut w = wedge(&u, &t1) * form.h11;
    w += (wedge(&v, &t1) + wedge(&u, &t2)) * h12;
    w += wedge(&v, &t2) * form.h22;
    Ok(TwoForm4(w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::GeometryConfig;
    use crate::real_chart::{metric_real, symplectic_form};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cfg(centers: &[f64], eps: f64) -> GeometryConfig {
        GeometryConfig::new(centers.to_vec(), eps).unwrap()
    }

    fn random_point(rng: &mut ChaCha8Rng) -> RealChartPoint {
        loop {
            let x = rng.random_range(-2.0..2.0);
            let y = rng.random_range(-2.0..2.0);
            let z = rng.random_range(-2.0..2.0);
            if (x * x + y * y).sqrt() > 0.3 && (x * x + y * y + z * z).sqrt() > 0.4 {
                return RealChartPoint::new(rng.random_range(0.0..std::f64::consts::TAU), x, y, z);
            }
        }
    }

    #[test]
    fn z_coords_hand_value() {
        let (z1, z2) = to_z_coords(&cfg(&[0.0], 0.0), &RealChartPoint::new(0.0, 1.0, 0.0, 0.0))
            .unwrap();
        assert!((z1 - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        assert!((z2 - Complex64::new(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn z_coords_modulus_relation() {
        // n=1, eps=0: |z2|^2 = |z1|^2 (r + z).
        let c = cfg(&[0.0], 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let p = random_point(&mut rng);
            let (z1, z2) = to_z_coords(&c, &p).unwrap();
            let r = p.rho_sq() + p.z * p.z;
            let r = r.sqrt();
            assert!((z2.norm_sqr() - z1.norm_sqr() * (r + p.z)).abs() < 1e-10);
        }
    }

    #[test]
    fn z_coords_axis_case() {
        let c = cfg(&[0.0, 1.0], 0.5);
        let p = RealChartPoint::new(0.7, 0.0, 0.0, -2.0);
        let (z1, z2) = to_z_coords(&c, &p).unwrap();
        assert_eq!(z2, Complex64::new(0.0, 0.0));
        let expect = (2.0 * 3.0_f64) * (-0.5 * -2.0_f64).exp();
        assert!((z1.norm_sqr() - expect).abs() < 1e-12);
        assert!((z1.arg() - 0.7).abs() < 1e-12);
    }

    #[test]
    fn ab_chart_and_transitions() {
        let (a1, b1) = z_to_ab(Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)).unwrap();
        assert_eq!(a1, Complex64::new(1.0, 0.0));
        assert_eq!(b1, Complex64::new(1.0, 0.0));
        // alpha_{i+1} beta_{i+1} = alpha_i beta_i, and alpha_2 beta_2^2 = beta_1.
        let a = Complex64::new(0.3, -0.8);
        let b = Complex64::new(-1.1, 0.2);
        let (a2, b2) = chart_transition(a, b).unwrap();
        assert!((a2 * b2 - a * b).norm() < 1e-14);
        assert!((a2 * b2 * b2 - b).norm() < 1e-13);
        assert!(chart_transition(Complex64::new(0.0, 0.0), b).is_err());
    }

    #[test]
    fn monomial_bookkeeping_exact() {
        for i in 1..=6 {
            let (alpha, beta) = chart_monomials(i);
            // alpha_i beta_i = z2 exactly.
            assert_eq!(alpha.e1 + beta.e1, 0);
            assert_eq!(alpha.e2 + beta.e2, 1);
            // z1 = alpha_i^{i-1} beta_i^i exactly.
            let i_ = i as i64;
            assert_eq!((i_ - 1) * alpha.e1 + i_ * beta.e1, 1);
            assert_eq!((i_ - 1) * alpha.e2 + i_ * beta.e2, 0);
        }
    }

    #[test]
    fn solve_closed_form_eps_zero() {
        let s = RootSolveSettings::default();
        let alpha = Complex64::new(2.0, 0.0);
        let beta = Complex64::new(0.0, 1.0);
        let (z, r) = solve_z_from_ab(0.0, alpha, beta, None, &s).unwrap();
        assert!((z - 1.5).abs() < 1e-14);
        assert!((r - 2.5).abs() < 1e-14);
    }

    #[test]
    fn solve_symmetric_case_is_zero() {
        let s = RootSolveSettings::tight();
        let alpha = Complex64::new(1.0, 0.0);
        let beta = Complex64::new(0.0, 1.0);
        for eps in [1e-3, -1e-3] {
            let (z, _) = solve_z_from_ab(eps, alpha, beta, Some(PhaseBranch::Plus), &s).unwrap();
            assert!(z.abs() < 1e-12, "eps={eps}: z={z}");
        }
    }

    #[test]
    fn solve_round_trip_through_charts() {
        let s = RootSolveSettings::tight();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for eps in [0.0, 0.5, 1.0] {
            let c = cfg(&[0.0], eps);
            for _ in 0..60 {
                let p = random_point(&mut rng);
                let (z1, z2) = to_z_coords(&c, &p).unwrap();
                let (alpha, beta) = z_to_ab(z1, z2).unwrap();
                let (z, r) = solve_z_from_ab(eps, alpha, beta, None, &s).unwrap();
                let r_true = (p.rho_sq() + p.z * p.z).sqrt();
                assert!((z - p.z).abs() < 1e-9, "eps={eps}: z {z} vs {}", p.z);
                assert!((r - r_true).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn solve_minus_branch_exists_for_large_rho() {
        let s = RootSolveSettings::default();
        // a = 1, |alpha||beta| = 2 > 1/a: the minus region solves, r >= 1.
        let alpha = Complex64::new(2.0, 0.0);
        let beta = Complex64::new(1.0, 0.0);
        let (_, r) = solve_z_from_ab(-1.0, alpha, beta, Some(PhaseBranch::Minus), &s).unwrap();
        assert!(r >= 1.0);
        assert!(matches!(
            solve_z_from_ab(-1.0, alpha, beta, Some(PhaseBranch::Plus), &s),
            Err(GeomError::NoBracket { .. })
        ));
        assert!(matches!(
            solve_z_from_ab(-1.0, alpha, beta, None, &s),
            Err(GeomError::PhaseRequired)
        ));
    }

    #[test]
    fn solve_branch_monotonicity_signs() {
        // f' = -2 V e^{-eps z} (r - z): negative on the plus branch,
        // positive on the minus branch, at the solved root.
        let s = RootSolveSettings::tight();
        let eps = -1.0;
        let alpha = Complex64::new(0.4, 0.1);
        let beta = Complex64::new(0.3, -0.5);
        let rho_sq = alpha.norm_sqr() * beta.norm_sqr();
        let fprime = |z: f64| {
            let r = (rho_sq + z * z).sqrt();
            let v = eps / 2.0 + 1.0 / (2.0 * r);
            -2.0 * v * (-eps * z).exp() * (r - z)
        };
        let (zp, rp) = solve_z_from_ab(eps, alpha, beta, Some(PhaseBranch::Plus), &s).unwrap();
        assert!(fprime(zp) < 0.0 && rp < 1.0);
        let (zm, rm) = solve_z_from_ab(eps, alpha, beta, Some(PhaseBranch::Minus), &s).unwrap();
        assert!(fprime(zm) > 0.0 && rm > 1.0);
    }

    #[test]
    fn scan_finds_multiple_roots() {
        let eps = -1.0;
        let alpha = Complex64::new(0.4, 0.1);
        let beta = Complex64::new(0.3, -0.5);
        let roots = scan_z_roots(eps, alpha, beta, (-20.0, 20.0), 4000);
        assert!(roots.len() >= 2, "roots: {roots:?}");
    }

    #[test]
    fn axis_divisor_solves() {
        let s = RootSolveSettings::tight();
        // alpha = 0: lower axis, eps = 0 closed form z = -B/2.
        let beta = Complex64::new(0.0, 1.2);
        let (z, r) = solve_z_from_ab(0.0, Complex64::new(0.0, 0.0), beta, None, &s).unwrap();
        assert!((z + 0.72).abs() < 1e-13 && (r - 0.72).abs() < 1e-13);
        // eps = 0.5: solve -2z e^{-eps z} = B.
        let (z, _) = solve_z_from_ab(0.5, Complex64::new(0.0, 0.0), beta, None, &s).unwrap();
        assert!((-2.0 * z * (-0.5 * z).exp() - beta.norm_sqr()).abs() < 1e-10);
        // beta = 0: upper axis, 2z e^{eps z} = A.
        let alpha = Complex64::new(0.9, 0.4);
        let (z, r) = solve_z_from_ab(0.5, alpha, Complex64::new(0.0, 0.0), None, &s).unwrap();
        assert!(z > 0.0 && (r - z).abs() < 1e-14);
        assert!((2.0 * z * (0.5 * z).exp() - alpha.norm_sqr()).abs() < 1e-10);
        // Both branches on the lower axis for eps < 0.
        let (zp, _) =
            solve_z_from_ab(-1.0, Complex64::new(0.0, 0.0), beta, Some(PhaseBranch::Plus), &s)
                .unwrap();
        let (zm, _) =
            solve_z_from_ab(-1.0, Complex64::new(0.0, 0.0), beta, Some(PhaseBranch::Minus), &s)
                .unwrap();
        assert!(zp > -1.0 && zm < -1.0);
    }

    #[test]
    fn series_matches_solver() {
        let s = RootSolveSettings::tight();
        let alpha = Complex64::new(1.0, 0.0);
        let beta = Complex64::new(0.5, 0.0);
        let eps = 0.01;
        let (z_series, r_series) = series_z_r(alpha, beta, eps, 2).unwrap();
        let (z_solve, r_solve) = solve_z_from_ab(eps, alpha, beta, None, &s).unwrap();
        let bound = 10.0 * eps.abs().powi(3);
        assert!((z_series - z_solve).abs() < bound, "{}", (z_series - z_solve).abs());
        assert!((r_series - r_solve).abs() < bound);
        // eps = 0 is the closed form exactly.
        let (z0, r0) = series_z_r(alpha, beta, 0.0, 0).unwrap();
        assert_eq!(z0, (alpha.norm_sqr() - beta.norm_sqr()) / 2.0);
        assert_eq!(r0, (alpha.norm_sqr() + beta.norm_sqr()) / 2.0);
        // |alpha| = |beta| forces z = 0 at every order.
        let (z_sym, _) = series_z_r(Complex64::new(0.7, 0.1), Complex64::new(0.1, 0.7), 0.3, 2)
            .unwrap();
        assert!(z_sym.abs() < 1e-15);
        assert!(series_z_r(alpha, beta, 0.1, 3).is_err());
    }

    #[test]
    fn metric_n1_flat_limit() {
        let s = RootSolveSettings::default();
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..100 {
            let alpha = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let beta = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let h = metric_n1(0.0, alpha, beta, None, &s).unwrap();
            assert!((h.h11 - 1.0).abs() < 1e-12);
            assert!(h.h12.norm() < 1e-12);
            assert!((h.h22 - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn metric_n1_positive_definite_for_positive_eps() {
        let s = RootSolveSettings::tight();
        let mut rng = ChaCha8Rng::seed_from_u64(78);
        for _ in 0..200 {
            let alpha = Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let beta = Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let h = metric_n1(0.7, alpha, beta, None, &s).unwrap();
            assert!(h.is_positive_definite(), "{h:?}");
        }
    }

    #[test]
    fn metric_n1_matches_ab_chart() {
        let s = RootSolveSettings::tight();
        let mut rng = ChaCha8Rng::seed_from_u64(79);
        for eps in [0.0, 0.5, 1.0] {
            let c = cfg(&[0.0], eps);
            for _ in 0..60 {
                let p = random_point(&mut rng);
                let via_chart = match metric_ab_chart_plain(&c, &p) {
                    Ok(h) => h,
                    Err(_) => continue,
                };
                let (z1, z2) = to_z_coords(&c, &p).unwrap();
                let (alpha, beta) = z_to_ab(z1, z2).unwrap();
                let direct = metric_n1(eps, alpha, beta, None, &s).unwrap();
                assert!(
                    direct.max_abs_diff(&via_chart) < 1e-8,
                    "eps={eps}: {direct:?} vs {via_chart:?}"
                );
            }
        }
    }

    #[test]
    fn pullback_matches_real_metric_and_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(80);
        for (centers, eps) in [(vec![0.0], 0.0), (vec![0.0], 1.0), (vec![0.0, 1.0], 0.5)] {
            let c = GeometryConfig::new(centers, eps).unwrap();
            for _ in 0..60 {
                let p = random_point(&mut rng);
                let g_pull = pull_back_z_metric(&c, &p).unwrap();
                let g_real = metric_real(&c, &p).unwrap().0;
                let dg = (g_pull - g_real).iter().fold(0.0_f64, |m, v| m.max(v.abs()));
                assert!(dg < 1e-8, "metric pullback residual {dg}");
                let w_pull = pull_back_z_kahler(&c, &p).unwrap().0;
                let w_real = symplectic_form(&c, &p).unwrap().0;
                let dw = (w_pull - w_real).iter().fold(0.0_f64, |m, v| m.max(v.abs()));
                assert!(dw < 1e-8, "form pullback residual {dw}");
            }
        }
    }

    #[test]
    fn ab_chart_flat_limit_plain_frames() {
        // n=1, eps=0 is flat: plain-frame coefficients (1, 0, 1).
        let c = cfg(&[0.0], 0.0);
        let p = RealChartPoint::new(1.1, 0.8, -0.4, 0.6);
        let h = metric_ab_chart_plain(&c, &p).unwrap();
        assert!((h.h11 - 1.0).abs() < 1e-10);
        assert!(h.h12.norm() < 1e-10);
        assert!((h.h22 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn z_chart_consistent_with_ab_chart() {
        // dz1/z1 = dbeta/beta, dz2/z2 = dalpha/alpha + dbeta/beta.
        let c = cfg(&[0.0, 1.0], 0.5);
        let p = RealChartPoint::new(0.3, 1.4, 0.2, -0.7);
        let z = metric_z_chart(&c, &p).unwrap();
        let ab = metric_ab_chart(&c, &p).unwrap();
        assert!((ab.h11 - z.h22).abs() < 1e-12);
        assert!((ab.h12.re - (z.h12.re + z.h22)).abs() < 1e-12);
        assert!((ab.h22 - (z.h11 + 2.0 * z.h12.re + z.h22)).abs() < 1e-12);
    }

    #[test]
    fn phase_region_classification() {
        let s = RootSolveSettings::tight();
        // a=1, small |alpha||beta| with plus solve -> plus.
        let r = phase_region_ab(
            -1.0,
            Complex64::new(0.5, 0.0),
            Complex64::new(1.0, 0.0),
            1e-5,
            &s,
        )
        .unwrap();
        assert_eq!(r.label, Phase::Plus);
        // |alpha||beta| = 2 forces r >= 2 > 1/a.
        let r = phase_region_ab(
            -1.0,
            Complex64::new(2.0, 0.0),
            Complex64::new(1.0, 0.0),
            1e-5,
            &s,
        )
        .unwrap();
        assert_eq!(r.label, Phase::Minus);
        assert!(r.r >= 2.0 - 1e-9);
    }

    #[test]
    fn phase_region_boundary_band() {
        let s = RootSolveSettings::tight();
        let c = cfg(&[0.0], -1.0);
        // Build probes from real points with r = 1 +/- offset.
        for (offset, expect) in [
            (1e-6, Phase::Boundary),
            (-1e-6, Phase::Boundary),
            (1e-3, Phase::Minus),
            (-1e-3, Phase::Plus),
        ] {
            let r = 1.0 + offset;
            let p = RealChartPoint::new(0.2, r * 0.6, 0.0, r * 0.8);
            let (z1, z2) = to_z_coords(&c, &p).unwrap();
            let (alpha, beta) = z_to_ab(z1, z2).unwrap();
            let out = phase_region_ab(-1.0, alpha, beta, 1e-5, &s).unwrap();
            assert_eq!(out.label, expect, "offset {offset}: r solved {}", out.r);
            assert!((out.r - r).abs() < 1e-9);
        }
    }
}
