//! The individual verification suites.

use nalgebra::Matrix4;
use rayon::prelude::*;

use super::{Check, CheckRecord, VerifyOptions};
use crate::error::Result;
use crate::fields::{
    classify_phase, eval_alpha, eval_potential, eval_potential_gradient,
};
use crate::hessian::{g_inverse, g_matrix, hessian_residual, symplectic_to_cylindrical};
use crate::holomorphic::{solve_z_from_ab, to_z_coords, z_to_ab, PhaseBranch};
use crate::model::{GeometryConfig, Phase, RealChartPoint};
use crate::moment::{membership, moment_map, moment_mu2_gradient, moment_polytope, Membership};
use crate::numerics::{
    fd_d_one_form_r3, fd_d_two_form_r4, fd_gradient, fd_laplacian, hodge_star_r3, FdSettings,
    RootSolveSettings,
};
use crate::real_chart::{
    complex_structure, metric_real, nijenhuis_max_fd, ricci_tensor_fd, symplectic_form,
};
use crate::sample::{random_point, suite_rng, SampleRegion};

fn sample_region(config: &GeometryConfig) -> SampleRegion {
    // Keep a margin from both the singular set and, for eps < 0, the locus
    // V = 0 where the metric degenerates.
    if config.epsilon() < 0.0 {
        SampleRegion {
            min_singular_dist: 0.3,
            v_above: Some(0.05),
            ..SampleRegion::default()
        }
    } else {
        SampleRegion::away_from_singular(0.3)
    }
}

fn worst<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    values.into_iter().fold(0.0_f64, f64::max)
}

fn run_sampled<F>(
    name: &'static str,
    config: &GeometryConfig,
    opts: &VerifyOptions,
    tolerance: f64,
    region: SampleRegion,
    per_point: F,
) -> CheckRecord
where
    F: Fn(&RealChartPoint) -> Result<f64> + Sync,
{
    let mut rng = suite_rng(opts.seed, name);
    let points: Vec<RealChartPoint> = (0..opts.samples)
        .map(|_| random_point(config, &mut rng, &region))
        .collect();
    let residuals: std::result::Result<Vec<f64>, _> =
        points.par_iter().map(|p| per_point(p)).collect();
    match residuals {
        Ok(rs) => CheckRecord::from_residual(name, opts.samples, worst(rs), tolerance),
        Err(e) => CheckRecord::error(name, tolerance, e),
    }
}

/// `V` is harmonic: the flat finite-difference Laplacian vanishes relative
/// to `max(1, |grad V|)`.
pub struct Harmonicity;

impl Check for Harmonicity {
    fn name(&self) -> &'static str {
        "harmonicity"
    }

    fn run(&self, config: &GeometryConfig, opts: &VerifyOptions) -> CheckRecord {
        let fd = FdSettings::richardson(1e-4);
        run_sampled(
            self.name(),
            config,
            opts,
            opts.tolerances.harmonicity,
            SampleRegion::away_from_singular(0.3),
            |p| {
                let field = |q: &[f64; 3]| {
                    eval_potential(config, &RealChartPoint::new(0.0, q[0], q[1], q[2]))
                        .map(|pv| pv.v)
                };
                let lap = fd_laplacian(&field, &p.spatial(), &fd)?;
                let grad = eval_potential_gradient(config, p)?;
                let scale = grad.iter().fold(1.0_f64, |m, g| m.max(g.abs()));
                Ok(lap.abs() / scale)
            },
        )
    }
}

/// The monopole equation `d(alpha) = -*dV`, with `d(alpha)` by central
/// differences and `*dV` from the analytic gradient.
pub struct Monopole;

impl Check for Monopole {
    fn name(&self) -> &'static str {
        "monopole"
    }

    fn run(&self, config: &GeometryConfig, opts: &VerifyOptions) -> CheckRecord {
        let fd = FdSettings {
            step: 1e-4,
            order: crate::numerics::FdOrder::Four,
            richardson: false,
        };
        let sign = if opts.corrupt_alpha_sign { -1.0 } else { 1.0 };
        run_sampled(
            self.name(),
            config,
            opts,
            opts.tolerances.monopole,
            SampleRegion::away_from_singular(0.3),
            |p| {
                let alpha_field = |q: &[f64; 3]| {
                    eval_alpha(config, &RealChartPoint::new(0.0, q[0], q[1], q[2]))
                        .map(|a| [sign * a.a_x, sign * a.a_y, 0.0])
                };
                let d_alpha = fd_d_one_form_r3(&alpha_field, &p.spatial(), &fd)?;
                let star_dv = hodge_star_r3(eval_potential_gradient(config, p)?);
                let scale = star_dv.iter().fold(1e-30_f64, |m, v| m.max(v.abs()));
                let worst_component = d_alpha
                    .iter()
                    .zip(&star_dv)
                    .map(|(da, sv)| (da + sv).abs())
                    .fold(0.0_f64, f64::max);
                Ok(worst_component / scale)
            },
        )
    }
}

/// `G . G^{-1} = I` for the closed-form matrix pair.
pub struct InversePair;

impl Check for InversePair {
    fn name(&self) -> &'static str {
        "inverse-pair"
    }

    fn run(&self, config: &GeometryConfig, opts: &VerifyOptions) -> CheckRecord {
        run_sampled(
            self.name(),
            config,
            opts,
            opts.tolerances.inverse_pair,
            sample_region(config),
            |p| {
                let g = g_matrix(config, p)?;
                let gi = g_inverse(config, p)?;
                let prod = g.mul(&gi);
                Ok(worst([
                    (prod[0][0] - 1.0).abs(),
                    prod[0][1].abs(),
                    prod[1][0].abs(),
                    (prod[1][1] - 1.0).abs(),
                ]))
            },
        )
    }
}

/// `Hess_mu(psi) = G` at moment points drawn from plus-region samples.
pub struct HessianIdentity;

impl Check for HessianIdentity {
    fn name(&self) -> &'static str {
        "hessian-identity"
    }

    fn run(&self, config: &GeometryConfig, opts: &VerifyOptions) -> CheckRecord {
        let fd = FdSettings::richardson(1e-4);
        run_sampled(
            self.name(),
            config,
            opts,
            opts.tolerances.hessian,
            sample_region(config),
            |p| {
                let m = moment_map(config, p)?;
                let res = hessian_residual(config, m.mu1, m.mu2, &fd)?;
                let g = g_matrix(config, p)?;
                let scale = worst([g.g11.abs(), g.g12.abs(), g.g22.abs()]).max(1.0);
                Ok(worst(res.into_iter().flatten().map(f64::abs)) / scale)
            },
        )
    }
}

/// Hyperkahler implies Ricci-flat: nested central differences of the metric
/// with Richardson extrapolation.
pub struct RicciFlatness;

impl Check for RicciFlatness {
    fn name(&self) -> &'static str {
        "ricci-flatness"
    }

    fn run(&self, config: &GeometryConfig, opts: &VerifyOptions) -> CheckRecord {
        let region = if config.epsilon() < 0.0 {
            SampleRegion {
                min_singular_dist: 0.3,
                v_above: Some(0.1),
                ..SampleRegion::default()
            }
        } else {
            SampleRegion::away_from_singular(0.3)
        };
        let h = opts.ricci_step;
        run_sampled(
            self.name(),
            config,
            opts,
            opts.tolerances.ricci,
            region,
            |p| {
                let ric = ricci_tensor_fd(config, p, h, true)?;
                Ok(ric.iter().fold(0.0_f64, |m, v| m.max(v.abs())))
            },
        )
    }
}

/// `d(omega) = 0` by antisymmetrized central differences of the 2-form
/// components.
pub struct SymplecticClosed;

impl Check for SymplecticClosed {
    fn name(&self) -> &'static str {
        "symplectic-closed"
    }

    fn run(&self, config: &GeometryConfig, opts: &VerifyOptions) -> CheckRecord {
        let fd = FdSettings {
            step: 1e-4,
            order: crate::numerics::FdOrder::Four,
            richardson: false,
        };
        run_sampled(
            self.name(),
            config,
            opts,
            opts.tolerances.closedness,
            SampleRegion::away_from_singular(0.3),
            |p| {
                let form = |q: &[f64; 4]| {
                    symplectic_form(config, &RealChartPoint::from_coords(*q))
                        .map(|w| w.components())
                };
                let d = fd_d_two_form_r4(&form, &p.coords(), &fd)?;
                Ok(worst(d.into_iter().map(f64::abs)))
            },
        )
    }
}

/// The compatibility package: `J^2 = -I`, `g(J., J.) = g`, `omega = g(J., .)`
/// (all algebraic) and the finite-difference Nijenhuis tensor of `J`.
pub struct KahlerCompatibility;

impl Check for KahlerCompatibility {
    fn name(&self) -> &'static str {
        "kahler-compatibility"
    }

    fn run(&self, config: &GeometryConfig, opts: &VerifyOptions) -> CheckRecord {
        let tol_alg = opts.tolerances.compatibility;
        let tol_nij = opts.tolerances.nijenhuis;
        let record = run_sampled(
            self.name(),
            config,
            opts,
            1.0, // residuals are normalized against their own tolerances below
            sample_region(config),
            |p| {
                let g = metric_real(config, p)?.0;
                let j = complex_structure(config, p)?.0;
                let w = symplectic_form(config, p)?.0;
                let max_abs =
                    |m: &Matrix4<f64>| m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
                let alg = worst([
                    max_abs(&(j * j + Matrix4::identity())),
                    max_abs(&(j.transpose() * g * j - g)),
                    max_abs(&(j.transpose() * g - w)),
                ]);
                let nij = nijenhuis_max_fd(config, p, 1e-4)?;
                // Normalize both families to a single pass/fail scale.
                Ok((alg / tol_alg).max(nij / tol_nij))
            },
        );
        CheckRecord {
            note: Some(format!(
                "residual normalized: algebraic/{tol_alg:e}, nijenhuis/{tol_nij:e}"
            )),
            tolerance: 1.0,
            ..record
        }
    }
}

/// Chart round trips: the moment chart inverts back to `(rho, z)` and, for
/// one centered center, the holomorphic chain recovers `(z, r)`.
pub struct RoundTrips;

impl Check for RoundTrips {
    fn name(&self) -> &'static str {
        "round-trips"
    }

    fn run(&self, config: &GeometryConfig, opts: &VerifyOptions) -> CheckRecord {
        let holo = config.is_single_center_at_origin();
        let solve = RootSolveSettings::tight();
        run_sampled(
            self.name(),
            config,
            opts,
            opts.tolerances.round_trip,
            sample_region(config),
            |p| {
                let m = moment_map(config, p)?;
                let (rho, z) = symplectic_to_cylindrical(config, m.mu1, m.mu2)?;
                let mut res = worst([(rho - p.rho()).abs(), (z - p.z).abs()]);
                if holo {
                    let (z1, z2) = to_z_coords(config, p)?;
                    let (alpha, beta) = z_to_ab(z1, z2)?;
                    let branch = if config.epsilon() < 0.0 {
                        Some(match classify_phase(config, p, 1e-9)? {
                            Phase::Minus => PhaseBranch::Minus,
                            _ => PhaseBranch::Plus,
                        })
                    } else {
                        None
                    };
                    let (z_rec, r_rec) =
                        solve_z_from_ab(config.epsilon(), alpha, beta, branch, &solve)?;
                    let r_true = (p.rho_sq() + p.z * p.z).sqrt();
                    res = res.max((z_rec - p.z).abs()).max((r_rec - r_true).abs());
                }
                Ok(res)
            },
        )
    }
}

/// Moment-image consistency. For `eps >= 0`: every sampled point lands
/// inside the half-plane description (worst violation of `l_k >= 0`), and
/// the finite-difference gradient of `mu2` matches its analytic
/// differential. For `eps < 0`: the phase of the point agrees with its
/// membership in the banded image description.
pub struct PhaseConsistency;

impl Check for PhaseConsistency {
    fn name(&self) -> &'static str {
        "phase-consistency"
    }

    fn run(&self, config: &GeometryConfig, opts: &VerifyOptions) -> CheckRecord {
        let tol = opts.tolerances.phase;
        if config.epsilon() >= 0.0 {
            let planes = match moment_polytope(config) {
                Ok(p) => p,
                Err(e) => return CheckRecord::error(self.name(), tol, e),
            };
            let fd = FdSettings::richardson(1e-5);
            run_sampled(
                self.name(),
                config,
                opts,
                tol,
                SampleRegion::away_from_singular(0.05),
                |p| {
                    let m = moment_map(config, p)?;
                    let violation = planes
                        .iter()
                        .map(|pl| (-pl.eval(m.mu1, m.mu2)).max(0.0))
                        .fold(0.0_f64, f64::max);
                    // dmu2 along (x, y, z) against the analytic components,
                    // scaled into the shared tolerance.
                    let field = |q: &[f64; 3]| {
                        moment_map(config, &RealChartPoint::new(0.0, q[0], q[1], q[2]))
                            .map(|s| s.mu2)
                    };
                    let grad_fd = fd_gradient(&field, &p.spatial(), &fd)?;
                    let grad = moment_mu2_gradient(config, p)?;
                    let gerr = grad_fd
                        .iter()
                        .zip(&grad)
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0_f64, f64::max);
                    Ok(violation.max(gerr * (tol / 1e-8)))
                },
            )
        } else {
            run_sampled(
                self.name(),
                config,
                opts,
                tol,
                SampleRegion::away_from_singular(0.05),
                |p| {
                    let phase = classify_phase(config, p, 1e-12)?;
                    let m = moment_map(config, p)?;
                    let member = membership(config, m.mu1, m.mu2, 1e-12)?;
                    let consistent = match phase {
                        Phase::Plus => member == Membership::Inside || member == Membership::Boundary,
                        // Minus-region points land anywhere strictly under
                        // the upper curve.
                        Phase::Minus => member != Membership::Outside,
                        Phase::Boundary => true,
                    };
                    Ok(if consistent { 0.0 } else { 1.0 })
                },
            )
        }
    }
}
