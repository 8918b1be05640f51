//! Named verification suites behind a common trait, registered by name and
//! selected at runtime.
//!
//! Each suite samples seeded random points and measures the worst residual
//! of one defining identity of the geometry (harmonicity, the monopole
//! equation, the inverse matrix pair, the Hessian identity, Ricci-flatness,
//! closedness, compatibility, chart round trips, phase consistency). The
//! runner aggregates the records into a [`VerificationReport`].

mod checks;

use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::model::GeometryConfig;

/// Residual tolerances per suite, recorded in every report.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Tolerances {
    pub harmonicity: f64,
    pub monopole: f64,
    pub inverse_pair: f64,
    pub hessian: f64,
    pub ricci: f64,
    pub closedness: f64,
    pub compatibility: f64,
    pub nijenhuis: f64,
    pub round_trip: f64,
    pub phase: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            harmonicity: 1e-5,
            monopole: 1e-6,
            inverse_pair: 1e-10,
            hessian: 1e-5,
            ricci: 1e-4,
            closedness: 1e-6,
            compatibility: 1e-12,
            nijenhuis: 1e-5,
            round_trip: 1e-10,
            phase: 1e-9,
        }
    }
}

/// Options shared by every suite run.
#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub samples: usize,
    pub seed: u64,
    pub tolerances: Tolerances,
    /// Curvature step for the Ricci suite.
    pub ricci_step: f64,
    /// Test hook: flips the sign of `alpha` inside the monopole suite so a
    /// corrupted connection is caught as a failing record.
    pub corrupt_alpha_sign: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            samples: 200,
            seed: 0,
            tolerances: Tolerances::default(),
            ricci_step: 1e-3,
            corrupt_alpha_sign: false,
        }
    }
}

/// Result of one suite.
#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub samples: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// Populated when the suite was skipped or hit evaluation errors.
    pub note: Option<String>,
}

impl CheckRecord {
    fn from_residual(name: &str, samples: usize, max_residual: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            samples,
            max_residual,
            tolerance,
            passed: max_residual <= tolerance,
            note: None,
        }
    }

    fn error(name: &str, tolerance: f64, err: GeomError) -> Self {
        Self {
            name: name.into(),
            samples: 0,
            max_residual: f64::INFINITY,
            tolerance,
            passed: false,
            note: Some(format!("evaluation error: {err}")),
        }
    }
}

/// One verification suite.
pub trait Check: Sync {
    fn name(&self) -> &'static str;
    fn run(&self, config: &GeometryConfig, opts: &VerifyOptions) -> CheckRecord;
}

/// All suites, in report order.
pub fn registry() -> Vec<Box<dyn Check>> {
    vec![
        Box::new(checks::Harmonicity),
        Box::new(checks::Monopole),
        Box::new(checks::InversePair),
        Box::new(checks::HessianIdentity),
        Box::new(checks::RicciFlatness),
        Box::new(checks::SymplecticClosed),
        Box::new(checks::KahlerCompatibility),
        Box::new(checks::RoundTrips),
        Box::new(checks::PhaseConsistency),
    ]
}

pub fn suite_names() -> Vec<&'static str> {
    registry().iter().map(|c| c.name()).collect()
}

/// Build-environment stamp embedded in reports.
#[derive(Clone, Debug, Serialize)]
pub struct EnvStamp {
    pub package: &'static str,
    pub version: &'static str,
    pub target_os: &'static str,
    pub target_arch: &'static str,
}

impl EnvStamp {
    pub fn current() -> Self {
        Self {
            package: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            target_os: std::env::consts::OS,
            target_arch: std::env::consts::ARCH,
        }
    }
}

/// Aggregated outcome of a suite selection.
#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub config: GeometryConfig,
    pub seed: u64,
    pub samples: usize,
    pub tolerances: Tolerances,
    pub overall_pass: bool,
    pub checks: Vec<CheckRecord>,
    pub environment: EnvStamp,
}

/// Runs the named suites (all of them when `selection` is empty); unknown
/// names are rejected with the list of known ones.
pub fn run_suites(
    config: &GeometryConfig,
    selection: &[String],
    opts: &VerifyOptions,
) -> Result<VerificationReport> {
    let all = registry();
    let chosen: Vec<&Box<dyn Check>> = if selection.is_empty() {
        all.iter().collect()
    } else {
        let mut picked = Vec::new();
        for name in selection {
            match all.iter().find(|c| c.name() == name) {
                Some(c) => picked.push(c),
                None => {
                    return Err(GeomError::InvalidParameter(format!(
                        "unknown suite '{name}'; known suites: {}",
                        suite_names().join(", ")
                    )))
                }
            }
        }
        picked
    };
    let checks: Vec<CheckRecord> = chosen
        .into_iter()
        .map(|c| c.run(config, opts))
        .collect();
    Ok(VerificationReport {
        config: config.clone(),
        seed: opts.seed,
        samples: opts.samples,
        tolerances: opts.tolerances,
        overall_pass: checks.iter().all(|r| r.passed),
        checks,
        environment: EnvStamp::current(),
    })
}
