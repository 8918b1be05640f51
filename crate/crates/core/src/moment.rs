//! Moment map of the 2-torus action and the descriptions of its image:
//! half-plane inequalities for `epsilon >= 0`, curved phase-boundary bounds
//! for `epsilon < 0`, membership tests, boundary sampling for figures, and
//! the numerical convexity experiment.

use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::fields::{solve_pa, PointGeom};
use crate::model::{GeometryConfig, RealChartPoint, SymplecticPoint};

/// Affine functional `l(mu1, mu2) = a*mu1 + b*mu2 + c`, with `l >= 0` inside.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HalfPlane {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl HalfPlane {
    pub fn eval(&self, mu1: f64, mu2: f64) -> f64 {
        self.a * mu1 + self.b * mu2 + self.c
    }
}

/// `(mu1, mu2, theta1, theta2)` of a point:
/// `mu1 = -z`, `mu2 = (eps/4) rho^2 + 1/2 sum_j (r_j + z - c_j)`,
/// `theta1 = phi`, `theta2 = atan2(y, x)`.
pub fn moment_map(config: &GeometryConfig, point: &RealChartPoint) -> Result<SymplecticPoint> {
    let geom = PointGeom::new(config, point)?;
    let mut mu2 = config.epsilon() / 4.0 * geom.rho_sq;
    for (j, &c) in config.centers().iter().enumerate() {
        mu2 += 0.5 * geom.r_plus_d(j, point.z, c);
    }
    Ok(SymplecticPoint::new(-point.z, mu2, point.phi, point.theta()))
}

/// Analytic differential of `mu2` in `(x, y, z)`, the oracle for the
/// finite-difference check:
/// `d mu2 = 1/2 (eps (x dx + y dy) + sum_j ((x dx + y dy + (z-c_j) dz)/r_j + dz))`.
pub fn moment_mu2_gradient(config: &GeometryConfig, point: &RealChartPoint) -> Result<[f64; 3]> {
    let geom = PointGeom::new(config, point)?;
    let eps = config.epsilon();
    let mut g = [
        0.5 * eps * point.x,
        0.5 * eps * point.y,
        0.0,
    ];
    for (j, &c) in config.centers().iter().enumerate() {
        let r = geom.r[j];
        g[0] += 0.5 * point.x / r;
        g[1] += 0.5 * point.y / r;
        g[2] += 0.5 * ((point.z - c) / r + 1.0);
    }
    Ok(g)
}

/// The half-planes cutting out the moment image for `epsilon >= 0`:
/// `l_k = mu2 + sum_{j<=k} (mu1 + c_j) >= 0` for `k = 0..n`. Independent of
/// `epsilon`.
pub fn moment_polytope(config: &GeometryConfig) -> Result<Vec<HalfPlane>> {
    if config.epsilon() < 0.0 {
        return Err(GeomError::NegativeEpsilon);
    }
    let mut planes = Vec::with_capacity(config.n() + 1);
    let mut c_sum = 0.0;
    planes.push(HalfPlane { a: 0.0, b: 1.0, c: 0.0 });
    for (k, &c) in config.centers().iter().enumerate() {
        c_sum += c;
        planes.push(HalfPlane {
            a: (k + 1) as f64,
            b: 1.0,
            c: c_sum,
        });
    }
    Ok(planes)
}

/// Lower/upper bounds in `mu2` of the plus-region moment image at fixed
/// `mu1`, for `epsilon = -a < 0`. The minus-region image is everything under
/// the same upper bound.
pub trait ImageBounds {
    /// `1/2 sum_j (|mu1 + c_j| - mu1 - c_j)`; also the boundary of the
    /// `epsilon >= 0` polytope.
    fn lower(&self, mu1: f64) -> f64;
    /// `f_z(p_a(z))` at `z = -mu1`; [`GeomError::NoPositiveRoot`] where the
    /// plus-region slice is empty.
    fn upper(&self, mu1: f64) -> Result<f64>;
}

/// General-`n` bounds evaluated through the `p_a` root solve.
#[derive(Clone, Debug)]
pub struct MomentImageNeg {
    config: GeometryConfig,
}

impl MomentImageNeg {
    pub fn a(&self) -> f64 {
        -self.config.epsilon()
    }
}

/// Bounds of the plus-region image for `epsilon = -a`.
pub fn moment_image_neg(config: &GeometryConfig) -> Result<MomentImageNeg> {
    if config.epsilon() >= 0.0 {
        return Err(GeomError::InvalidParameter(
            "moment_image_neg requires epsilon < 0".into(),
        ));
    }
    Ok(MomentImageNeg {
        config: config.clone(),
    })
}

impl ImageBounds for MomentImageNeg {
    fn lower(&self, mu1: f64) -> f64 {
        self.config
            .centers()
            .iter()
            .map(|&c| {
                let t = mu1 + c;
                0.5 * (t.abs() - t)
            })
            .sum()
    }

    fn upper(&self, mu1: f64) -> Result<f64> {
        let a = self.a();
        let z = -mu1;
        let p = solve_pa(&self.config, z)?;
        let mut out = -a / 4.0 * p;
        for &c in self.config.centers() {
            let d = z - c;
            out += 0.5 * ((p + d * d).sqrt() + d);
        }
        Ok(out)
    }
}

/// Closed-form specialization for `n = 1`, `c_1 = 0`:
/// lower `= (|mu1| - mu1)/2`, upper `= (1 - a mu1)^2 / (4a)` on
/// `|mu1| < 1/a`.
#[derive(Clone, Copy, Debug)]
pub struct MomentImageNegN1 {
    pub a: f64,
}

pub fn moment_image_neg_n1(a: f64) -> MomentImageNegN1 {
    MomentImageNegN1 { a }
}

impl ImageBounds for MomentImageNegN1 {
    fn lower(&self, mu1: f64) -> f64 {
        0.5 * (mu1.abs() - mu1)
    }

    fn upper(&self, mu1: f64) -> Result<f64> {
        if mu1.abs() >= 1.0 / self.a {
            return Err(GeomError::NoPositiveRoot);
        }
        let t = 1.0 - self.a * mu1;
        Ok(t * t / (4.0 * self.a))
    }
}

/// Where `(mu1, mu2)` sits relative to the moment image.
///
/// For `epsilon >= 0` only `Inside`/`Outside`/`Boundary` occur. For
/// `epsilon < 0`, `Inside` means the plus-region band (which also lies in
/// the minus-region image) and `MinusOnly` the part of the minus-region
/// image below the band.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Membership {
    Inside,
    MinusOnly,
    Outside,
    Boundary,
}

/// Evaluates the applicable inequality set with a tolerance band.
pub fn membership(config: &GeometryConfig, mu1: f64, mu2: f64, tol: f64) -> Result<Membership> {
    if config.epsilon() >= 0.0 {
        let mut boundary = false;
        for plane in moment_polytope(config)? {
            let l = plane.eval(mu1, mu2);
            if l < -tol {
                return Ok(Membership::Outside);
            }
            if l <= tol {
                boundary = true;
            }
        }
        return Ok(if boundary {
            Membership::Boundary
        } else {
            Membership::Inside
        });
    }
    let bounds = moment_image_neg(config)?;
    let lo = bounds.lower(mu1);
    match bounds.upper(mu1) {
        Ok(hi) => {
            if (mu2 - lo).abs() <= tol || (mu2 - hi).abs() <= tol {
                Ok(Membership::Boundary)
            } else if mu2 > hi {
                Ok(Membership::Outside)
            } else if mu2 < lo {
                Ok(Membership::MinusOnly)
            } else {
                Ok(Membership::Inside)
            }
        }
        // Empty plus slice: the minus image is everything under the lower
        // bound there.
        Err(GeomError::NoPositiveRoot) => {
            if (mu2 - lo).abs() <= tol {
                Ok(Membership::Boundary)
            } else if mu2 < lo {
                Ok(Membership::MinusOnly)
            } else {
                Ok(Membership::Outside)
            }
        }
        Err(e) => Err(e),
    }
}

/// Kind of boundary piece emitted by [`sample_boundary`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PieceKind {
    /// Segment or ray on one of the half-plane boundaries `l_k = 0`.
    HalfPlaneEdge,
    /// The curved upper bound of the plus-region image (`epsilon < 0`).
    UpperCurve,
}

/// One sampled boundary piece, ordered by `mu1`.
#[derive(Clone, Debug, Serialize)]
pub struct BoundaryPiece {
    pub id: String,
    pub kind: PieceKind,
    pub points: Vec<(f64, f64)>,
}

fn sample_segment(lo: f64, hi: f64, steps: usize, f: impl Fn(f64) -> f64) -> Vec<(f64, f64)> {
    let n = steps.max(2);
    (0..n)
        .map(|i| {
            let t = lo + (hi - lo) * (i as f64) / ((n - 1) as f64);
            (t, f(t))
        })
        .collect()
}

/// Samples the boundary pieces of the moment image over `mu1_range`.
///
/// For `epsilon >= 0` these are the active stretches of the half-plane
/// edges `l_k = 0` (`l_k` is active for `-c_{k+1} <= mu1 <= -c_k`). For
/// `epsilon < 0` the same polygonal chain bounds the plus-region image from
/// below where the image is nonempty, and the curved piece `f_z(p_a(z))`
/// bounds it from above; `mu1` samples where `p_a` has no root are skipped.
pub fn sample_boundary(
    config: &GeometryConfig,
    mu1_range: (f64, f64),
    steps: usize,
) -> Result<Vec<BoundaryPiece>> {
    if steps < 2 {
        return Err(GeomError::InvalidParameter(
            "boundary sampling needs steps >= 2".into(),
        ));
    }
    let (range_lo, range_hi) = mu1_range;
    if !(range_lo < range_hi) {
        return Err(GeomError::InvalidParameter(
            "mu1 range must satisfy lo < hi".into(),
        ));
    }
    let centers = config.centers();
    let n = config.n();
    let mut pieces = Vec::new();

    // Active interval of the edge l_k = 0: mu1 in [-c_{k+1}, -c_k], with the
    // outer edges extending to the range ends.
    let mut c_sum = 0.0;
    for k in 0..=n {
        let lo = if k == n { range_lo } else { (-centers[k]).max(range_lo) };
        let hi = if k == 0 {
            range_hi
        } else {
            (-centers[k - 1]).min(range_hi)
        };
        if k > 0 {
            c_sum += centers[k - 1];
        }
        if lo >= hi {
            continue;
        }
        let slope = k as f64;
        let offset = c_sum;
        pieces.push(BoundaryPiece {
            id: format!("l{k}"),
            kind: PieceKind::HalfPlaneEdge,
            points: sample_segment(lo, hi, steps, |mu1| -slope * mu1 - offset),
        });
    }

    if config.epsilon() < 0.0 {
        let bounds = moment_image_neg(config)?;
        let mut points = Vec::with_capacity(steps);
        for i in 0..steps {
            let mu1 = range_lo + (range_hi - range_lo) * (i as f64) / ((steps - 1) as f64);
            match bounds.upper(mu1) {
                Ok(mu2) => points.push((mu1, mu2)),
                Err(GeomError::NoPositiveRoot) => continue,
                Err(e) => return Err(e),
            }
        }
        if !points.is_empty() {
            pieces.push(BoundaryPiece {
                id: "upper".into(),
                kind: PieceKind::UpperCurve,
                points,
            });
        }
    }
    Ok(pieces)
}

/// Statistics from the convexity exploration of the curved upper boundary.
#[derive(Clone, Debug, Serialize)]
pub struct ConvexityReport {
    pub mu1_range: (f64, f64),
    pub grid_steps: usize,
    /// Number of grid nodes where the upper bound exists.
    pub curve_samples: usize,
    pub second_diff_positive: usize,
    pub second_diff_negative: usize,
    pub second_diff_zero: usize,
    pub second_diff_min: Option<f64>,
    pub second_diff_max: Option<f64>,
    /// Smallest gap `upper - lower` over the grid and where it occurs.
    pub tangency_gap: Option<(f64, f64)>,
    /// For n = 1 only: midpoint-convexity probe of the union of the plus
    /// image with the complement of the minus image (the region
    /// `mu2 >= lower(mu1)`).
    pub n1_union_midpoint_violations: Option<usize>,
    pub n1_union_pairs_checked: Option<usize>,
}

/// Estimates second differences of the upper-bound curve on a `mu1` grid and
/// reports sign statistics and the tangency gap to the `epsilon >= 0`
/// polytope boundary. Exploration only: nothing here is asserted as an
/// invariant.
pub fn convexity_experiment(
    config: &GeometryConfig,
    mu1_range: (f64, f64),
    grid_steps: usize,
) -> Result<ConvexityReport> {
    let bounds = moment_image_neg(config)?;
    let (lo, hi) = mu1_range;
    let mut samples: Vec<(f64, f64)> = Vec::new();
    if grid_steps >= 2 {
        for i in 0..grid_steps {
            let mu1 = lo + (hi - lo) * (i as f64) / ((grid_steps - 1) as f64);
            if let Ok(u) = bounds.upper(mu1) {
                samples.push((mu1, u));
            }
        }
    } else if grid_steps == 1 {
        if let Ok(u) = bounds.upper(lo) {
            samples.push((lo, u));
        }
    }

    let zero_band = 1e-12;
    let mut pos = 0;
    let mut neg = 0;
    let mut zero = 0;
    let mut d2_min: Option<f64> = None;
    let mut d2_max: Option<f64> = None;
    for w in samples.windows(3) {
        // Uniform grid except across skipped samples; only use consecutive
        // triples with matching spacing.
        let h1 = w[1].0 - w[0].0;
        let h2 = w[2].0 - w[1].0;
        if (h1 - h2).abs() > 1e-9 * h1.abs().max(h2.abs()) {
            continue;
        }
        let d2 = w[2].1 - 2.0 * w[1].1 + w[0].1;
        if d2 > zero_band {
            pos += 1;
        } else if d2 < -zero_band {
            neg += 1;
        } else {
            zero += 1;
        }
        d2_min = Some(d2_min.map_or(d2, |m: f64| m.min(d2)));
        d2_max = Some(d2_max.map_or(d2, |m: f64| m.max(d2)));
    }

    let tangency_gap = samples
        .iter()
        .map(|&(mu1, u)| (u - bounds.lower(mu1), mu1))
        .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

    let (mut violations, mut pairs) = (None, None);
    if config.n() == 1 {
        // Midpoint test of the epigraph of `lower` over the grid: convex iff
        // lower((s+t)/2) <= (lower(s) + lower(t))/2.
        let mut bad = 0;
        let mut count = 0;
        let m = grid_steps.max(2);
        for i in 0..m {
            for j in (i + 1)..m {
                let s = lo + (hi - lo) * (i as f64) / ((m - 1) as f64);
                let t = lo + (hi - lo) * (j as f64) / ((m - 1) as f64);
                let mid = 0.5 * (s + t);
                if bounds.lower(mid) > 0.5 * (bounds.lower(s) + bounds.lower(t)) + 1e-12 {
                    bad += 1;
                }
                count += 1;
            }
        }
        violations = Some(bad);
        pairs = Some(count);
    }

    Ok(ConvexityReport {
        mu1_range,
        grid_steps,
        curve_samples: samples.len(),
        second_diff_positive: pos,
        second_diff_negative: neg,
        second_diff_zero: zero,
        second_diff_min: d2_min,
        second_diff_max: d2_max,
        tangency_gap,
        n1_union_midpoint_violations: violations,
        n1_union_pairs_checked: pairs,
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
    fn moment_map_hand_values() {
        let m = moment_map(&cfg(&[0.0], 0.0), &pt(0.0, 0.0, -2.0)).unwrap();
        assert!((m.mu1 - 2.0).abs() < 1e-15 && m.mu2.abs() < 1e-15);
        // r = 5 at (3,4,0): mu2 = 5/2.
        let m = moment_map(&cfg(&[0.0], 0.0), &pt(3.0, 4.0, 0.0)).unwrap();
        assert!(m.mu1.abs() < 1e-15 && (m.mu2 - 2.5).abs() < 1e-15);
        // eps = 2 adds (2/4)*25.
        let m = moment_map(&cfg(&[0.0], 2.0), &pt(3.0, 4.0, 0.0)).unwrap();
        assert!((m.mu2 - 15.0).abs() < 1e-12);
    }

    #[test]
    fn polytope_inequalities() {
        let p = moment_polytope(&cfg(&[0.0], 1.0)).unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!((p[0].a, p[0].b, p[0].c), (0.0, 1.0, 0.0));
        assert_eq!((p[1].a, p[1].b, p[1].c), (1.0, 1.0, 0.0));
        let p = moment_polytope(&cfg(&[0.0, 1.0], 0.0)).unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!((p[2].a, p[2].b, p[2].c), (2.0, 1.0, 1.0));
        let p = moment_polytope(&cfg(&[5.0], 0.5)).unwrap();
        assert_eq!((p[1].a, p[1].b, p[1].c), (1.0, 1.0, 5.0));
        assert!(matches!(
            moment_polytope(&cfg(&[0.0], -1.0)),
            Err(GeomError::NegativeEpsilon)
        ));
    }

    #[test]
    fn closed_form_bounds_n1() {
        let b = moment_image_neg_n1(1.0);
        assert_eq!(b.lower(0.0), 0.0);
        assert!((b.upper(0.0).unwrap() - 0.25).abs() < 1e-15);
        // Empty interior at mu1 = 1/a.
        assert!(b.upper(1.0).is_err());
        let b = moment_image_neg_n1(2.0);
        assert!((b.lower(-1.0) - 1.0).abs() < 1e-15);
        assert!((b.upper(-1.0).unwrap() - 1.125).abs() < 1e-15);
    }

    #[test]
    fn general_bounds_match_closed_form() {
        let cfg1 = cfg(&[0.0], -1.0);
        let gen = moment_image_neg(&cfg1).unwrap();
        let closed = moment_image_neg_n1(1.0);
        let mut mu1 = -0.9;
        while mu1 <= 0.9 {
            assert!((gen.lower(mu1) - closed.lower(mu1)).abs() < 1e-12);
            let (g, c) = (gen.upper(mu1).unwrap(), closed.upper(mu1).unwrap());
            assert!((g - c).abs() < 1e-10, "mu1={mu1}: {g} vs {c}");
            mu1 += 0.05;
        }
    }

    #[test]
    fn lower_bound_asymptotics() {
        let g = moment_image_neg(&cfg(&[0.0, 1.0], -0.5)).unwrap();
        // All mu1 + c_j > 0: lower = 0.
        assert_eq!(g.lower(10.0), 0.0);
        // mu1 << 0: slope -n.
        let l1 = g.lower(-100.0);
        let l2 = g.lower(-101.0);
        assert!((l2 - l1 - 2.0).abs() < 1e-12);
    }

    #[test]
    fn membership_examples() {
        let c0 = cfg(&[0.0], 0.0);
        assert_eq!(membership(&c0, 1.0, 1.0, 1e-9).unwrap(), Membership::Inside);
        assert_eq!(membership(&c0, -1.0, 0.5, 1e-9).unwrap(), Membership::Outside);
        assert_eq!(membership(&c0, 0.0, 0.0, 1e-9).unwrap(), Membership::Boundary);
        let cn = cfg(&[0.0], -1.0);
        assert_eq!(membership(&cn, 0.0, 0.1, 1e-9).unwrap(), Membership::Inside);
        assert_eq!(membership(&cn, 0.0, 0.3, 1e-9).unwrap(), Membership::Outside);
        assert_eq!(membership(&cn, -1.0, 0.2, 1e-9).unwrap(), Membership::MinusOnly);
        // Empty plus slice at mu1 = 2 (a = 1): below the chain is minus-only.
        assert_eq!(membership(&cn, -2.0, 1.0, 1e-9).unwrap(), Membership::MinusOnly);
    }

    #[test]
    fn boundary_pieces_nonneg_eps() {
        let pieces = sample_boundary(&cfg(&[0.0], 1.0), (-2.0, 2.0), 5).unwrap();
        assert_eq!(pieces.len(), 2);
        // l0: mu2 = 0 for mu1 >= 0; l1: mu2 = -mu1 for mu1 <= 0.
        let l0 = &pieces[0];
        assert_eq!(l0.id, "l0");
        assert!(l0.points.iter().all(|&(m1, m2)| m1 >= -1e-15 && m2.abs() < 1e-15));
        let l1 = &pieces[1];
        assert_eq!(l1.id, "l1");
        assert!(l1.points.iter().all(|&(m1, m2)| (m2 + m1).abs() < 1e-15));
    }

    #[test]
    fn boundary_curved_piece_matches_parabola() {
        let pieces = sample_boundary(&cfg(&[0.0], -1.0), (-0.95, 0.95), 41).unwrap();
        let upper = pieces.iter().find(|p| p.kind == PieceKind::UpperCurve).unwrap();
        for &(mu1, mu2) in &upper.points {
            let expect = (1.0 - mu1) * (1.0 - mu1) / 4.0;
            assert!((mu2 - expect).abs() < 1e-10, "mu1={mu1}");
        }
    }

    #[test]
    fn boundary_steps_two_gives_endpoints() {
        let pieces = sample_boundary(&cfg(&[0.0], 0.0), (-1.0, 1.0), 2).unwrap();
        for p in &pieces {
            assert_eq!(p.points.len(), 2);
        }
        assert!(sample_boundary(&cfg(&[0.0], 0.0), (-1.0, 1.0), 1).is_err());
    }

    #[test]
    fn convexity_parabola_stats() {
        let r = convexity_experiment(&cfg(&[0.0], -1.0), (-0.9, 0.9), 41).unwrap();
        assert_eq!(r.second_diff_negative, 0);
        assert!(r.second_diff_positive > 0);
        assert_eq!(r.n1_union_midpoint_violations, Some(0));
        // Parabola second difference is h^2/2 per step.
        let h = 1.8 / 40.0;
        assert!((r.second_diff_max.unwrap() - h * h / 2.0).abs() < 1e-9);
    }

    #[test]
    fn convexity_two_center_report_emits() {
        let r = convexity_experiment(&cfg(&[0.0, 1.0], -1.0), (-0.9, 0.4), 31).unwrap();
        assert!(r.curve_samples > 0);
        assert!(r.n1_union_midpoint_violations.is_none());
    }

    #[test]
    fn convexity_degenerate_grid() {
        let r = convexity_experiment(&cfg(&[0.0], -1.0), (0.0, 0.0), 1).unwrap();
        assert_eq!(r.second_diff_positive + r.second_diff_negative + r.second_diff_zero, 0);
        assert_eq!(r.curve_samples, 1);
    }
}
