//! Binomial estimates and delta-method propagation.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::transforms::{check_probability, Transform};

/// Click counts of one two-detector experiment: `clicks` in detector 1 out of `runs`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TrialRecord {
    clicks: u64,
    runs: u64,
}

impl TrialRecord {
    pub fn new(clicks: u64, runs: u64) -> Result<Self> {
        if runs == 0 {
            return Err(Error::ZeroRuns);
        }
        if clicks > runs {
            return Err(Error::ClicksExceedRuns { clicks, runs });
        }
        Ok(TrialRecord { clicks, runs })
    }

    pub fn clicks(&self) -> u64 {
        self.clicks
    }

    pub fn runs(&self) -> u64 {
        self.runs
    }

    /// Clicks in detector 2.
    pub fn complement(&self) -> u64 {
        self.runs - self.clicks
    }

    /// The record after one more run.
    pub fn extend(&self, next: Continuation) -> TrialRecord {
        let clicks = match next {
            Continuation::Detector1 => self.clicks + 1,
            Continuation::Detector2 => self.clicks,
        };
        TrialRecord {
            clicks,
            runs: self.runs + 1,
        }
    }
}

/// A probability estimate with its half-width `sqrt(p (1 - p) / runs)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbEstimate {
    pub p: f64,
    pub delta_p: f64,
    pub runs: u64,
}

impl ProbEstimate {
    /// Estimate for a known probability at a planned number of runs.
    pub fn from_probability(p: f64, runs: u64) -> Result<Self> {
        check_probability(p)?;
        if runs == 0 {
            return Err(Error::ZeroRuns);
        }
        Ok(ProbEstimate {
            p,
            delta_p: binomial_half_width(p, runs),
            runs,
        })
    }
}

fn binomial_half_width(p: f64, runs: u64) -> f64 {
    (p * (1.0 - p) / runs as f64).sqrt()
}

/// `p = clicks / runs`, `delta_p = sqrt(p (1 - p) / runs)`.
pub fn estimate(record: &TrialRecord) -> ProbEstimate {
    let p = record.clicks as f64 / record.runs as f64;
    ProbEstimate {
        p,
        delta_p: binomial_half_width(p, record.runs),
        runs: record.runs,
    }
}

/// Like [`estimate`] but with `p = (clicks + 1/2) / (runs + 1)`, which never
/// sits on 0 or 1 and so never reports a zero-width interval.
pub fn estimate_adjusted(record: &TrialRecord) -> ProbEstimate {
    let p = (record.clicks as f64 + 0.5) / (record.runs as f64 + 1.0);
    ProbEstimate {
        p,
        delta_p: binomial_half_width(p, record.runs),
        runs: record.runs,
    }
}

/// How `propagate_with` obtains `d chi / dp`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DerivativeMode {
    /// Closed form when the transform has one, finite differences otherwise.
    #[default]
    Auto,
    ClosedForm,
    FiniteDifference,
}

/// `|d chi/dp| * delta_p` at the estimate.
pub fn propagate(est: &ProbEstimate, transform: &Transform) -> Result<f64> {
    propagate_with(est, transform, DerivativeMode::Auto)
}

/// [`propagate`] with an explicit derivative route.
///
/// At `p = 0` or `p = 1` the arcsin and amplitude derivatives diverge while
/// `delta_p` vanishes; there the continuous limit (`|C| / sqrt(N)` for
/// arcsin, `1 / (2 sqrt(N))` for the amplitude) is returned in every mode.
pub fn propagate_with(
    est: &ProbEstimate,
    transform: &Transform,
    mode: DerivativeMode,
) -> Result<f64> {
    check_probability(est.p)?;
    if est.runs == 0 {
        return Err(Error::ZeroRuns);
    }
    if let Some(limit) = transform.endpoint_spread(est.p) {
        return Ok(limit / (est.runs as f64).sqrt());
    }
    let derivative = match mode {
        DerivativeMode::Auto => match transform.closed_form_derivative(est.p) {
            Some(d) => d?,
            None => transform.finite_difference_derivative(est.p)?,
        },
        DerivativeMode::ClosedForm => {
            transform.closed_form_derivative(est.p).ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "transform `{}` has no closed-form derivative",
                    transform.name()
                ))
            })??
        }
        DerivativeMode::FiniteDifference => transform.finite_difference_derivative(est.p)?,
    };
    let slope = derivative.norm();
    if !slope.is_finite() {
        return Err(Error::NonDifferentiable {
            transform: transform.name(),
            p: est.p,
        });
    }
    Ok(slope * est.delta_p)
}

/// Outcome of the run appended to a record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Continuation {
    Detector1,
    Detector2,
}

impl Continuation {
    pub const BOTH: [Continuation; 2] = [Continuation::Detector1, Continuation::Detector2];

    pub fn as_str(self) -> &'static str {
        match self {
            Continuation::Detector1 => "detector1",
            Continuation::Detector2 => "detector2",
        }
    }
}

impl fmt::Display for Continuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A record whose propagated uncertainty fails to shrink after one more run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub runs: u64,
    pub clicks: u64,
    pub continuation: Continuation,
    pub delta_before: f64,
    pub delta_after: f64,
}

/// Checks `Δχ(N + 1) < Δχ(N)` for every record with `1 <= N < max_runs` and
/// both possible next outcomes. Returns every failing case in order of
/// `(runs, clicks, continuation)`.
pub fn monotonicity_scan(transform: &Transform, max_runs: u64) -> Result<Vec<Violation>> {
    if max_runs < 2 {
        return Err(Error::InvalidParameter(format!(
            "max_runs must be at least 2, got {max_runs}"
        )));
    }
    let row = |runs: u64| -> Result<Vec<f64>> {
        (0..=runs)
            .map(|clicks| propagate(&estimate(&TrialRecord { clicks, runs }), transform))
            .collect()
    };

    let mut violations = Vec::new();
    let mut current = row(1)?;
    for runs in 1..max_runs {
        let next = row(runs + 1)?;
        for (clicks, &before) in current.iter().enumerate() {
            for continuation in Continuation::BOTH {
                let after = match continuation {
                    Continuation::Detector1 => next[clicks + 1],
                    Continuation::Detector2 => next[clicks],
                };
                if after >= before {
                    violations.push(Violation {
                        runs,
                        clicks: clicks as u64,
                        continuation,
                        delta_before: before,
                        delta_after: after,
                    });
                }
            }
        }
        current = next;
    }
    Ok(violations)
}
