//! Geometry in the real chart `(phi, x, y, z)`: the metric
//! `g = V^{-1}(dphi + alpha)^2 + V (dx^2 + dy^2 + dz^2)`, the compatible
//! complex structure, the symplectic form
//! `omega = (dphi + alpha) ^ dz + V dx ^ dy`, the torus action, and
//! finite-difference curvature and integrability checks.
//!
//! Component bases are ordered `(dphi, dx, dy, dz)` / `(d/dphi, d/dx, d/dy,
//! d/dz)` throughout.

use nalgebra::Matrix4;

use crate::error::{GeomError, Result};
use crate::fields::PointGeom;
use crate::model::{wrap_angle, GeometryConfig, RealChartPoint, DOMAIN_GUARD};
use crate::numerics::TWO_FORM_PAIRS_R4;

/// Symmetric metric components in the basis `(dphi, dx, dy, dz)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricTensor4(pub Matrix4<f64>);

/// The complex structure as a matrix acting on tangent components,
/// `(J X)^i = J^i_j X^j`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexStructure4(pub Matrix4<f64>);

/// Antisymmetric 2-form components, `W[i][j] = omega(e_i, e_j)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoForm4(pub Matrix4<f64>);

impl MetricTensor4 {
    /// Eigenvalues of the symmetric component matrix, ascending.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let mut ev: Vec<f64> = self.0.symmetric_eigenvalues().iter().cloned().collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        [ev[0], ev[1], ev[2], ev[3]]
    }

    pub fn is_positive_definite(&self) -> bool {
        self.eigenvalues()[0] > 0.0
    }

    pub fn is_negative_definite(&self) -> bool {
        self.eigenvalues()[3] < 0.0
    }
}

impl TwoForm4 {
    /// The 6 independent components ordered as
    /// [`crate::numerics::TWO_FORM_PAIRS_R4`].
    pub fn components(&self) -> [f64; 6] {
        let mut out = [0.0; 6];
        for (k, &(i, j)) in TWO_FORM_PAIRS_R4.iter().enumerate() {
            out[k] = self.0[(i, j)];
        }
        out
    }
}

pub(crate) struct FieldData {
    pub v: f64,
    pub a_x: f64,
    pub a_y: f64,
}

pub(crate) fn field_data(config: &GeometryConfig, point: &RealChartPoint) -> Result<FieldData> {
    let geom = PointGeom::new(config, point)?;
    geom.require_axis_clearance()?;
    let s1 = geom.sum_inv_rw();
    Ok(FieldData {
        v: geom.potential(config.epsilon()),
        a_x: 0.5 * point.y * s1,
        a_y: -0.5 * point.x * s1,
    })
}

fn require_nondegenerate(v: f64) -> Result<()> {
    if v.abs() <= DOMAIN_GUARD {
        return Err(GeomError::DegenerateAtBoundary { v_abs: v.abs() });
    }
    Ok(())
}

/// Metric components of `V^{-1}(dphi + alpha)^2 + V(dx^2 + dy^2 + dz^2)`.
///
/// For `epsilon < 0` the same component matrix serves both regions: it is
/// positive definite where `V > 0` and negative definite where `V < 0`.
pub fn metric_real(config: &GeometryConfig, point: &RealChartPoint) -> Result<MetricTensor4> {
    let f = field_data(config, point)?;
    require_nondegenerate(f.v)?;
    Ok(MetricTensor4(metric_from_fields(f.v, f.a_x, f.a_y)))
}

pub(crate) fn metric_from_fields(v: f64, a_x: f64, a_y: f64) -> Matrix4<f64> {
    let vi = 1.0 / v;
    let mut g = Matrix4::zeros();
    g[(0, 0)] = vi;
    g[(0, 1)] = vi * a_x;
    g[(0, 2)] = vi * a_y;
    g[(1, 1)] = v + vi * a_x * a_x;
    g[(1, 2)] = vi * a_x * a_y;
    g[(2, 2)] = v + vi * a_y * a_y;
    g[(3, 3)] = v;
    g[(1, 0)] = g[(0, 1)];
    g[(2, 0)] = g[(0, 2)];
    g[(2, 1)] = g[(1, 2)];
    g
}

/// The complex structure determined by its dual action on 1-forms:
/// `J*(dphi + alpha) = -V dz`, `J*(dz) = V^{-1}(dphi + alpha)`,
/// `J*(dx) = -dy`, `J*(dy) = dx`.
///
/// In the minus region the identical matrix works for `-g`; the guard only
/// excludes the band `|V| <= guard` where both structures degenerate.
pub fn complex_structure(
    config: &GeometryConfig,
    point: &RealChartPoint,
) -> Result<ComplexStructure4> {
    let f = field_data(config, point)?;
    require_nondegenerate(f.v)?;
    Ok(ComplexStructure4(j_from_fields(f.v, f.a_x, f.a_y)))
}

pub(crate) fn j_from_fields(v: f64, a_x: f64, a_y: f64) -> Matrix4<f64> {
    // Row i holds the components of J*(dx^i); the same matrix acts on
    // tangent components as (J X)^i = J^i_j X^j.
    let mut j = Matrix4::zeros();
    j[(0, 1)] = -a_y;
    j[(0, 2)] = a_x;
    j[(0, 3)] = -v;
    j[(1, 2)] = -1.0;
    j[(2, 1)] = 1.0;
    j[(3, 0)] = 1.0 / v;
    j[(3, 1)] = a_x / v;
    j[(3, 2)] = a_y / v;
    j
}

/// Components of `omega = (dphi + alpha) ^ dz + V dx ^ dy`.
pub fn symplectic_form(config: &GeometryConfig, point: &RealChartPoint) -> Result<TwoForm4> {
    let f = field_data(config, point)?;
    let mut w = Matrix4::zeros();
    w[(0, 3)] = 1.0;
    w[(1, 3)] = f.a_x;
    w[(2, 3)] = f.a_y;
    w[(1, 2)] = f.v;
    w[(3, 0)] = -1.0;
    w[(3, 1)] = -f.a_x;
    w[(3, 2)] = -f.a_y;
    w[(2, 1)] = -f.v;
    Ok(TwoForm4(w))
}

/// The 2-torus action
/// `(phi, x, y, z) -> (phi + t1, x cos t2 - y sin t2, x sin t2 + y cos t2, z)`.
pub fn torus_act(theta1: f64, theta2: f64, point: &RealChartPoint) -> RealChartPoint {
    let (s, c) = theta2.sin_cos();
    RealChartPoint::new(
        wrap_angle(point.phi + theta1),
        point.x * c - point.y * s,
        point.x * s + point.y * c,
        point.z,
    )
}

/// The constant differential of [`torus_act`] in the ordered basis.
pub fn torus_act_differential(theta2: f64) -> Matrix4<f64> {
    let (s, c) = theta2.sin_cos();
    let mut m = Matrix4::identity();
    m[(1, 1)] = c;
    m[(1, 2)] = -s;
    m[(2, 1)] = s;
    m[(2, 2)] = c;
    m
}

/// Christoffel symbols `G[k][i][j]` of a metric field at `q`, with the
/// metric derivatives taken by central differences of step `h`.
fn christoffel<F>(metric: &F, q: [f64; 4], h: f64) -> Result<[[[f64; 4]; 4]; 4]>
where
    F: Fn([f64; 4]) -> Result<Matrix4<f64>>,
{
    let g = metric(q).map_err(GeomError::into_stencil)?;
    let ginv = g
        .try_inverse()
        .ok_or(GeomError::DegenerateAtBoundary { v_abs: 0.0 })?;
    let mut dg = [Matrix4::zeros(); 4];
    for (l, slot) in dg.iter_mut().enumerate() {
        let mut qp = q;
        qp[l] += h;
        let mut qm = q;
        qm[l] -= h;
        let gp = metric(qp).map_err(GeomError::into_stencil)?;
        let gm = metric(qm).map_err(GeomError::into_stencil)?;
        *slot = (gp - gm) / (2.0 * h);
    }
    let mut gamma = [[[0.0; 4]; 4]; 4];
    for k in 0..4 {
        for i in 0..4 {
            for j in i..4 {
                let mut acc = 0.0;
                for l in 0..4 {
                    acc += ginv[(k, l)] * (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)]);
                }
                gamma[k][i][j] = 0.5 * acc;
                gamma[k][j][i] = gamma[k][i][j];
            }
        }
    }
    Ok(gamma)
}

/// Ricci tensor of a metric field by nested central differences with a
/// single step `h` at both levels.
pub fn ricci_fd_once<F>(metric: &F, p: [f64; 4], h: f64) -> Result<Matrix4<f64>>
where
    F: Fn([f64; 4]) -> Result<Matrix4<f64>>,
{
    let gamma0 = christoffel(metric, p, h)?;
    let mut dgamma = vec![[[[0.0; 4]; 4]; 4]; 4];
    for m in 0..4 {
        let mut pp = p;
        pp[m] += h;
        let mut pm = p;
        pm[m] -= h;
        let gp = christoffel(metric, pp, h)?;
        let gm = christoffel(metric, pm, h)?;
        for k in 0..4 {
            for i in 0..4 {
                for j in 0..4 {
                    dgamma[m][k][i][j] = (gp[k][i][j] - gm[k][i][j]) / (2.0 * h);
                }
            }
        }
    }
    // Ric_ij = d_k G^k_ij - d_i G^k_kj + G^k_kl G^l_ij - G^k_il G^l_kj
    let mut ric = Matrix4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            let mut v = 0.0;
            for k in 0..4 {
                v += dgamma[k][k][i][j] - dgamma[i][k][k][j];
                for l in 0..4 {
                    v += gamma0[k][k][l] * gamma0[l][i][j] - gamma0[k][i][l] * gamma0[l][k][j];
                }
            }
            ric[(i, j)] = v;
        }
    }
    Ok(ric)
}

/// Richardson-extrapolated Ricci tensor: combines evaluations at `h` and
/// `h/2` (both difference levels halved together) to cancel the `h^2` term.
pub fn ricci_fd<F>(metric: &F, p: [f64; 4], h: f64, richardson: bool) -> Result<Matrix4<f64>>
where
    F: Fn([f64; 4]) -> Result<Matrix4<f64>>,
{
    if richardson {
        let r_h = ricci_fd_once(metric, p, h)?;
        let r_h2 = ricci_fd_once(metric, p, 0.5 * h)?;
        Ok((r_h2 * 4.0 - r_h) / 3.0)
    } else {
        ricci_fd_once(metric, p, h)
    }
}

/// Ricci tensor of the multi-Taub-NUT metric at `point`, by nested central
/// differences of [`metric_real`].
pub fn ricci_tensor_fd(
    config: &GeometryConfig,
    point: &RealChartPoint,
    h: f64,
    richardson: bool,
) -> Result<Matrix4<f64>> {
    let metric = |q: [f64; 4]| metric_real(config, &RealChartPoint::from_coords(q)).map(|m| m.0);
    ricci_fd(&metric, point.coords(), h, richardson)
}

/// Largest Nijenhuis-tensor component of the complex-structure field at
/// `point`, with `dJ` estimated by central differences.
///
/// `N^k_ij = J^l_i d_l J^k_j - J^l_j d_l J^k_i - J^k_l (d_i J^l_j - d_j J^l_i)`.
pub fn nijenhuis_max_fd(
    config: &GeometryConfig,
    point: &RealChartPoint,
    h: f64,
) -> Result<f64> {
    let field = |q: [f64; 4]| -> Result<Matrix4<f64>> {
        complex_structure(config, &RealChartPoint::from_coords(q)).map(|j| j.0)
    };
    let p = point.coords();
    let j0 = field(p)?;
    let mut dj = [Matrix4::zeros(); 4];
    for (m, slot) in dj.iter_mut().enumerate() {
        let mut qp = p;
        qp[m] += h;
        let mut qm = p;
        qm[m] -= h;
        *slot = (field(qp).map_err(GeomError::into_stencil)?
            - field(qm).map_err(GeomError::into_stencil)?)
            / (2.0 * h);
    }
    let mut max = 0.0_f64;
    for k in 0..4 {
        for i in 0..4 {
            for j in 0..4 {
                let mut n = 0.0;
                for l in 0..4 {
                    n += j0[(l, i)] * dj[l][(k, j)] - j0[(l, j)] * dj[l][(k, i)]
                        - j0[(k, l)] * (dj[i][(l, j)] - dj[j][(l, i)]);
                }
                max = max.max(n.abs());
            }
        }
    }
    Ok(max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::GeometryConfig;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cfg(centers: &[f64], eps: f64) -> GeometryConfig {
        GeometryConfig::new(centers.to_vec(), eps).unwrap()
    }

    fn max_abs(m: &Matrix4<f64>) -> f64 {
        m.iter().fold(0.0_f64, |a, v| a.max(v.abs()))
    }

    fn random_point(rng: &mut ChaCha8Rng) -> RealChartPoint {
        // Keeps a comfortable margin from the axis cut and the centers used
        // in these tests.
        loop {
            let x = rng.random_range(-2.0..2.0);
            let y = rng.random_range(-2.0..2.0);
            let z = rng.random_range(-2.0..2.0);
            let rho = (x * x + y * y).sqrt();
            if rho > 0.3 && (x * x + y * y + z * z) > 0.2 {
                return RealChartPoint::new(rng.random_range(0.0..std::f64::consts::TAU), x, y, z);
            }
        }
    }

    #[test]
    fn metric_hand_values() {
        // On the lower axis alpha vanishes; epsilon = 0 gives V = 1/2.
        let g = metric_real(&cfg(&[0.0], 0.0), &RealChartPoint::new(0.0, 0.0, 0.0, -1.0))
            .unwrap()
            .0;
        assert!((g[(0, 0)] - 2.0).abs() < 1e-15);
        for i in 1..4 {
            assert!((g[(i, i)] - 0.5).abs() < 1e-15);
        }
        // Same point, epsilon = 1: V = 1.
        let g = metric_real(&cfg(&[0.0], 1.0), &RealChartPoint::new(0.0, 0.0, 0.0, -1.0))
            .unwrap()
            .0;
        assert!(max_abs(&(g - Matrix4::identity())) < 1e-15);
    }

    #[test]
    fn metric_degenerate_on_phase_boundary() {
        let r = metric_real(&cfg(&[0.0], -1.0), &RealChartPoint::new(0.0, 1.0, 0.0, 0.0));
        assert!(matches!(r, Err(GeomError::DegenerateAtBoundary { .. })));
    }

    #[test]
    fn j_squares_to_minus_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let c = cfg(&[0.0, 1.0], 0.5);
        for _ in 0..100 {
            let p = random_point(&mut rng);
            let j = complex_structure(&c, &p).unwrap().0;
            assert!(max_abs(&(j * j + Matrix4::identity())) < 1e-12);
        }
    }

    #[test]
    fn j_hand_value_on_axis() {
        // epsilon = 0, n = 1 at (0,0,-1): alpha = 0, V = 1/2, so
        // J*(dz) = V^{-1} dphi = 2 dphi.
        let j = complex_structure(&cfg(&[0.0], 0.0), &RealChartPoint::new(0.0, 0.0, 0.0, -1.0))
            .unwrap()
            .0;
        assert!((j[(3, 0)] - 2.0).abs() < 1e-15);
        assert!((j[(0, 3)] + 0.5).abs() < 1e-15);
    }

    #[test]
    fn type_10_forms_have_eigenvalue_i() {
        // J*(dx + i dy) = i (dx + i dy) and
        // J*((dphi + alpha) + i V dz) = i ((dphi + alpha) + i V dz):
        // check real and imaginary parts componentwise.
        let c = cfg(&[0.0, 1.0], 0.5);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let p = random_point(&mut rng);
            let f = field_data(&c, &p).unwrap();
            let j = j_from_fields(f.v, f.a_x, f.a_y);
            // real part of dx + i dy is dx = e1; J* e1 = row-wise action on
            // covector components: (J* w)_j = sum_i w_i J^i_j.
            let jstar = |w: [f64; 4]| {
                let mut out = [0.0; 4];
                for jj in 0..4 {
                    for i in 0..4 {
                        out[jj] += w[i] * j[(i, jj)];
                    }
                }
                out
            };
            let dx = [0.0, 1.0, 0.0, 0.0];
            let dy = [0.0, 0.0, 1.0, 0.0];
            // J*(dx) = -dy, J*(dy) = dx <=> J*(dx + i dy) = i(dx + i dy)
            let jdx = jstar(dx);
            let jdy = jstar(dy);
            for k in 0..4 {
                assert!((jdx[k] + dy[k]).abs() < 1e-13);
                assert!((jdy[k] - dx[k]).abs() < 1e-13);
            }
            let conn = [1.0, f.a_x, f.a_y, 0.0];
            let vdz = [0.0, 0.0, 0.0, f.v];
            let jconn = jstar(conn);
            let jvdz = jstar(vdz);
            for k in 0..4 {
                assert!((jconn[k] + vdz[k]).abs() < 1e-12);
                assert!((jvdz[k] - conn[k]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn symplectic_hand_value() {
        let w = symplectic_form(&cfg(&[0.0], 0.0), &RealChartPoint::new(0.0, 0.0, 0.0, -1.0))
            .unwrap()
            .0;
        assert_eq!(w[(0, 3)], 1.0);
        assert_eq!(w[(1, 2)], 0.5);
        assert!(max_abs(&(w + w.transpose())) == 0.0);
    }

    #[test]
    fn compatibility_triple() {
        // g(JX, JY) = g(X, Y) and omega(X, Y) = g(JX, Y).
        let c = cfg(&[0.0, 1.0], 0.5);
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..100 {
            let p = random_point(&mut rng);
            let g = metric_real(&c, &p).unwrap().0;
            let j = complex_structure(&c, &p).unwrap().0;
            let w = symplectic_form(&c, &p).unwrap().0;
            assert!(max_abs(&(j.transpose() * g * j - g)) < 1e-12);
            assert!(max_abs(&(j.transpose() * g - w)) < 1e-12);
        }
    }

    #[test]
    fn torus_action_basics() {
        let p = RealChartPoint::new(0.0, 1.0, 0.0, 0.0);
        let q = torus_act(0.0, std::f64::consts::FRAC_PI_2, &p);
        assert!(q.x.abs() < 1e-15 && (q.y - 1.0).abs() < 1e-15);
        let r = torus_act(std::f64::consts::TAU, 0.0, &p);
        assert!((r.phi - p.phi).abs() < 1e-12 && r.x == p.x && r.y == p.y);
        let s = torus_act(
            std::f64::consts::PI,
            std::f64::consts::PI,
            &RealChartPoint::new(0.0, 1.0, 1.0, 5.0),
        );
        assert!((s.phi - std::f64::consts::PI).abs() < 1e-12);
        assert!((s.x + 1.0).abs() < 1e-12 && (s.y + 1.0).abs() < 1e-12 && s.z == 5.0);
    }

    #[test]
    fn torus_action_is_isometry_and_symplectomorphism() {
        let c = cfg(&[0.0, 1.0], 0.5);
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for _ in 0..50 {
            let p = random_point(&mut rng);
            let t1 = rng.random_range(0.0..std::f64::consts::TAU);
            let t2 = rng.random_range(0.0..std::f64::consts::TAU);
            let q = torus_act(t1, t2, &p);
            let d = torus_act_differential(t2);
            let g_p = metric_real(&c, &p).unwrap().0;
            let g_q = metric_real(&c, &q).unwrap().0;
            assert!(max_abs(&(d.transpose() * g_q * d - g_p)) < 1e-10);
            let w_p = symplectic_form(&c, &p).unwrap().0;
            let w_q = symplectic_form(&c, &q).unwrap().0;
            assert!(max_abs(&(d.transpose() * w_q * d - w_p)) < 1e-10);
        }
    }

    #[test]
    fn signature_by_phase_region() {
        let c = cfg(&[0.0], -1.0);
        // r < 1: plus region, positive definite.
        let g = metric_real(&c, &RealChartPoint::new(0.0, 0.5, 0.0, 0.0)).unwrap();
        assert!(g.is_positive_definite());
        // r > 1: minus region, negative definite.
        let g = metric_real(&c, &RealChartPoint::new(0.0, 2.0, 0.0, 0.5)).unwrap();
        assert!(g.is_negative_definite());
    }

    #[test]
    fn ricci_flat_for_injected_euclidean_metric() {
        let metric = |_: [f64; 4]| Ok(Matrix4::identity());
        let ric = ricci_fd(&metric, [0.2, 0.4, 0.5, 0.1], 1e-3, false).unwrap();
        assert!(max_abs(&ric) < 1e-10);
    }

    #[test]
    fn ricci_of_round_sphere_block() {
        // diag(1, 1, 1, sin^2 x2) in coordinates (a, b, theta, phi) is flat
        // R^2 x S^2(1); Ricci = diag(0, 0, 1, sin^2 theta).
        let metric = |q: [f64; 4]| {
            let mut g = Matrix4::identity();
            g[(3, 3)] = q[2].sin().powi(2);
            Ok(g)
        };
        let p = [0.0, 0.0, 1.1, 0.4];
        let ric = ricci_fd(&metric, p, 1e-3, true).unwrap();
        assert!(ric[(0, 0)].abs() < 1e-8 && ric[(1, 1)].abs() < 1e-8);
        assert!((ric[(2, 2)] - 1.0).abs() < 1e-7);
        assert!((ric[(3, 3)] - p[2].sin().powi(2)).abs() < 1e-7);
    }

    #[test]
    fn ricci_flat_at_sample_point() {
        // n=1, epsilon=0 is flat R^4; epsilon=1 is the one-center ALF metric.
        let p = RealChartPoint::new(0.3, 1.1, -0.4, 0.7);
        for eps in [0.0, 1.0] {
            let c = cfg(&[0.0], eps);
            let ric = ricci_tensor_fd(&c, &p, 1e-3, true).unwrap();
            assert!(max_abs(&ric) < 1e-4, "eps={eps}: {}", max_abs(&ric));
        }
    }

    #[test]
    fn nijenhuis_vanishes() {
        let c = cfg(&[0.0, 1.0], 0.5);
        let p = RealChartPoint::new(0.0, 1.2, -0.5, 0.4);
        let n = nijenhuis_max_fd(&c, &p, 1e-4).unwrap();
        assert!(n < 1e-5, "nijenhuis {n}");
    }
}
