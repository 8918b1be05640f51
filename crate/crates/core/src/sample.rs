//! Seeded point samplers shared by the verification suites and tests.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::fields::eval_potential;
use crate::model::{singular_set_distance, GeometryConfig, RealChartPoint, TAU};

/// Sampling constraints for random chart points.
#[derive(Clone, Copy, Debug)]
pub struct SampleRegion {
    /// Minimum distance from the singular set (centers plus axis cut).
    pub min_singular_dist: f64,
    /// Half-width of the sampling box around the center span.
    pub extent: f64,
    /// Restrict to `V > margin` (plus region) when set.
    pub v_above: Option<f64>,
    /// Restrict to `V < -margin` (minus region) when set.
    pub v_below: Option<f64>,
}

impl Default for SampleRegion {
    fn default() -> Self {
        Self {
            min_singular_dist: 0.1,
            extent: 2.0,
            v_above: None,
            v_below: None,
        }
    }
}

impl SampleRegion {
    pub fn away_from_singular(dist: f64) -> Self {
        Self {
            min_singular_dist: dist,
            ..Self::default()
        }
    }

    pub fn plus_region(dist: f64, margin: f64) -> Self {
        Self {
            min_singular_dist: dist,
            v_above: Some(margin),
            ..Self::default()
        }
    }

    pub fn minus_region(dist: f64, margin: f64) -> Self {
        Self {
            min_singular_dist: dist,
            v_below: Some(margin),
            ..Self::default()
        }
    }
}

/// Draws a chart point satisfying `region`, by rejection over a box spanning
/// the centers.
pub fn random_point(
    config: &GeometryConfig,
    rng: &mut ChaCha8Rng,
    region: &SampleRegion,
) -> RealChartPoint {
    let centers = config.centers();
    let z_lo = centers[0] - region.extent;
    let z_hi = centers[centers.len() - 1] + region.extent;
    loop {
        let x = rng.random_range(-region.extent..region.extent);
        let y = rng.random_range(-region.extent..region.extent);
        let z = rng.random_range(z_lo..z_hi);
        if singular_set_distance(config, x, y, z) < region.min_singular_dist {
            continue;
        }
        let p = RealChartPoint::new(rng.random_range(0.0..TAU), x, y, z);
        if region.v_above.is_some() || region.v_below.is_some() {
            let v = match eval_potential(config, &p) {
                Ok(pv) => pv.v,
                Err(_) => continue,
            };
            if let Some(m) = region.v_above {
                if v <= m {
                    continue;
                }
            }
            if let Some(m) = region.v_below {
                if v >= -m {
                    continue;
                }
            }
        }
        return p;
    }
}

/// A deterministic per-suite RNG: the base seed mixed with the suite name.
pub fn suite_rng(seed: u64, name: &str) -> ChaCha8Rng {
    use rand::SeedableRng;
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in name.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    ChaCha8Rng::seed_from_u64(seed ^ h)
}
