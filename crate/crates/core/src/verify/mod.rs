//! Verification suites. Each suite runs a family of numeric checks with
//! fixed seeds and reports, per check, the observed value, its limit and
//! the slack between them. Results do not depend on the number of worker
//! threads.

mod configs;
mod suites;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

pub use configs::{
    generated_packings, protected_points, random_suite_packing, random_two_cylinder_config, randomized_packings,
    SuitePacking,
};
pub use suites::{
    angle_suite, certified_suite, dominance_suite, end_ball_suite, extremal_suite, identity_configs, identity_suite,
    qualified_suite, three_ball_suite,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    Extremal,
    ThreeBall,
    Qualified,
    Angle,
    Identity,
    Dominance,
    All,
}

impl Suite {
    pub const EACH: [Suite; 6] = [
        Suite::Extremal,
        Suite::ThreeBall,
        Suite::Qualified,
        Suite::Angle,
        Suite::Identity,
        Suite::Dominance,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Extremal => "extremal",
            Suite::ThreeBall => "three-ball",
            Suite::Qualified => "qualified",
            Suite::Angle => "angle",
            Suite::Identity => "identity",
            Suite::Dominance => "dominance",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::EACH
            .iter()
            .chain(std::iter::once(&Suite::All))
            .copied()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| format!("unknown suite `{s}`"))
    }
}

/// Suite sizes and seeds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Random packings in the qualified suite.
    pub packings: usize,
    /// Protected points per packing.
    pub points: usize,
    /// Two-cylinder configurations in the angle suite.
    pub angle_configs: usize,
    /// Monte Carlo samples per cell in the identity suite.
    pub mc_samples: u64,
    /// Random starts for the optimizers.
    pub starts: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            seed: 0,
            packings: 200,
            points: 10,
            angle_configs: 500,
            mc_samples: 10_000_000,
            starts: 32,
        }
    }
}

/// One numeric check. `margin` is the slack: nonnegative iff the check
/// passed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub limit: f64,
    pub margin: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<serde_json::Value>,
}

impl Check {
    /// Passes when `value <= limit`.
    pub fn at_most(name: impl Into<String>, value: f64, limit: f64) -> Check {
        Check::from_margin(name, value, limit, limit - value)
    }

    /// Passes when `value >= limit`.
    pub fn at_least(name: impl Into<String>, value: f64, limit: f64) -> Check {
        Check::from_margin(name, value, limit, value - limit)
    }

    /// Passes when `|value - target| <= tol`; `limit` records the target.
    pub fn near(name: impl Into<String>, value: f64, target: f64, tol: f64) -> Check {
        Check::from_margin(name, value, target, tol - (value - target).abs())
    }

    pub fn holds(name: impl Into<String>, ok: bool) -> Check {
        let v = if ok { 1.0 } else { 0.0 };
        Check::from_margin(name, v, 1.0, v - 1.0)
    }

    fn from_margin(name: impl Into<String>, value: f64, limit: f64, margin: f64) -> Check {
        Check {
            name: name.into(),
            // NaN margins fail
            passed: margin >= 0.0,
            value,
            limit,
            margin,
            witness: None,
        }
    }

    pub fn with_witness(mut self, w: serde_json::Value) -> Check {
        self.witness = Some(w);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn new(suite: impl Into<String>, checks: Vec<Check>) -> SuiteReport {
        SuiteReport {
            suite: suite.into(),
            passed: checks.iter().all(|c| c.passed),
            checks,
        }
    }
}

/// Runs one suite, or every suite for [`Suite::All`].
pub fn run(suite: Suite, opts: &VerifyOptions) -> Vec<SuiteReport> {
    match suite {
        Suite::All => Suite::EACH.iter().flat_map(|&s| run(s, opts)).collect(),
        Suite::Extremal => vec![extremal_suite(opts)],
        Suite::ThreeBall => vec![three_ball_suite(opts)],
        Suite::Qualified => vec![qualified_suite(opts)],
        Suite::Angle => vec![angle_suite(opts)],
        Suite::Identity => vec![identity_suite(opts)],
        Suite::Dominance => vec![dominance_suite(opts)],
    }
}
