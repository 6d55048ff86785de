//! Counting statistically distinguishable results with the `theta` coordinate.
//!
//! `theta(n1) = ∫_0^{n1/N} dp / Δp(p)` with `Δp(p) = sqrt(p (1 - p) / N)`,
//! which has the closed form `sqrt(N) (asin(2 n1/N - 1) + pi/2)`. One unit of
//! `theta` is one uncertainty width, so `theta / sqrt(N)` is the canonical
//! arcsin variable.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::{estimate, TrialRecord};
use crate::quadrature::integrate_reciprocal_law;
use crate::transforms::LAW_QUADRATURE_TOL;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaValue {
    pub theta: f64,
    pub runs: u64,
}

impl ThetaValue {
    /// Largest attainable value, `pi sqrt(runs)`.
    pub fn max_for(runs: u64) -> f64 {
        PI * (runs as f64).sqrt()
    }
}

/// Closed-form `theta` for a record.
pub fn theta_of(record: &TrialRecord) -> ThetaValue {
    let p = estimate(record).p;
    let root_n = (record.runs() as f64).sqrt();
    ThetaValue {
        theta: root_n * ((2.0 * p - 1.0).asin() + FRAC_PI_2),
        runs: record.runs(),
    }
}

/// `theta` by adaptive quadrature of `1 / Δp`, for cross-checking [`theta_of`].
pub fn theta_quadrature(record: &TrialRecord) -> Result<ThetaValue> {
    let p = estimate(record).p;
    let n = record.runs() as f64;
    let r = integrate_reciprocal_law(|q| (q * (1.0 - q) / n).sqrt(), p, LAW_QUADRATURE_TOL)?;
    Ok(ThetaValue {
        theta: r.value,
        runs: record.runs(),
    })
}

/// `theta / sqrt(N)`; equals `chi_forward(n1/N, 1, pi/2)`.
pub fn theta_chi_correspondence(record: &TrialRecord) -> f64 {
    theta_of(record).theta / (record.runs() as f64).sqrt()
}

/// `floor(pi sqrt(runs) / separation) + 1`: the number of cells of width
/// `separation` along `theta`, counting the boundary cell.
pub fn count_distinguishable(runs: u64, separation: f64) -> Result<u64> {
    if runs == 0 {
        return Err(Error::ZeroRuns);
    }
    if !(separation > 0.0 && separation.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "separation must be positive, got {separation}"
        )));
    }
    Ok((ThetaValue::max_for(runs) / separation).floor() as u64 + 1)
}
