//! Probability-to-variable transforms.
//!
//! The gallery is fixed: `identity` (p itself), `pow6` (p^6), `arcsin`
//! (`C asin(2p - 1) + D`), `beta` (`sin(chi / 2)` of the canonical arcsin
//! variable) and `amplitude` (`sin(chi / 2) e^{i chi / 2}`). Only `arcsin`
//! and `amplitude` have a propagated uncertainty that is independent of p.
//! Further transforms can be built from an uncertainty law by quadrature
//! ([`stabilizing_transform_from_law`]) or wrapped from a plain closure
//! ([`Transform::custom`]), in which case derivatives come from finite
//! differences.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::integrate_reciprocal_law;

/// Canonical scale `C`.
pub const CANONICAL_SCALE: f64 = 1.0;
/// Canonical offset `D`; with `C = 1` it maps `[0, 1]` onto `[0, pi]`.
pub const CANONICAL_OFFSET: f64 = FRAC_PI_2;
/// Absolute tolerance used when integrating an uncertainty law.
pub const LAW_QUADRATURE_TOL: f64 = 1e-9;

pub(crate) fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::ProbabilityOutOfRange(p))
    }
}

fn check_scale(scale: f64) -> Result<()> {
    if scale != 0.0 && scale.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "scale C must be finite and nonzero, got {scale}"
        )))
    }
}

/// `C asin(2p - 1) + D`.
pub fn chi_forward(p: f64, scale: f64, offset: f64) -> Result<f64> {
    check_probability(p)?;
    check_scale(scale)?;
    Ok(scale * (2.0 * p - 1.0).asin() + offset)
}

/// `(1 + sin((chi - D) / C)) / 2`, periodic in `chi` with period `2 pi C`.
pub fn chi_inverse(chi: f64, scale: f64, offset: f64) -> Result<f64> {
    check_scale(scale)?;
    Ok(0.5 * (1.0 + ((chi - offset) / scale).sin()))
}

/// The curve `sin(chi / 2) e^{i chi / 2}`: a circle of radius 1/2 about `i/2`.
pub fn amplitude_of_chi(chi: f64) -> Complex64 {
    let half = 0.5 * chi;
    Complex64::from_polar(half.sin(), half)
}

/// A complex amplitude together with its uncertainty radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Amplitude {
    pub re: f64,
    pub im: f64,
    pub delta: f64,
}

impl Amplitude {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    /// `|alpha|^2`, which equals the generating probability.
    pub fn probability(&self) -> f64 {
        self.value().norm_sqr()
    }
}

/// `sqrt(p) (sqrt(p) + i sqrt(1 - p))` with uncertainty `1 / (2 sqrt(runs))`.
///
/// This is `i * conj(amplitude_of_chi(chi))`: the same circle reflected onto
/// the one centred at `1/2`, with the same modulus and arc length. Only
/// moduli and relative phases enter the two-path prediction, so either
/// parametrization yields the same interference formula.
pub fn amplitude_from_p(p: f64, runs: u64) -> Result<Amplitude> {
    check_probability(p)?;
    if runs == 0 {
        return Err(Error::ZeroRuns);
    }
    let root = p.sqrt();
    Ok(Amplitude {
        re: root * root,
        im: root * (1.0 - p).sqrt(),
        delta: 0.5 / (runs as f64).sqrt(),
    })
}

/// Stable names of the built-in transforms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransformName {
    Identity,
    Pow6,
    Arcsin,
    Beta,
    Amplitude,
}

impl TransformName {
    pub const ALL: [TransformName; 5] = [
        TransformName::Identity,
        TransformName::Pow6,
        TransformName::Arcsin,
        TransformName::Beta,
        TransformName::Amplitude,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TransformName::Identity => "identity",
            TransformName::Pow6 => "pow6",
            TransformName::Arcsin => "arcsin",
            TransformName::Beta => "beta",
            TransformName::Amplitude => "amplitude",
        }
    }
}

impl fmt::Display for TransformName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TransformName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TransformName::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "unknown transform `{s}` (expected identity, pow6, arcsin, beta or amplitude)"
                ))
            })
    }
}

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Transform obtained by integrating `1 / law(p)` from 0.
#[derive(Clone)]
pub struct StabilizedTransform {
    name: String,
    law: RealFn,
}

#[derive(Clone)]
pub struct CustomTransform {
    name: String,
    forward: RealFn,
}

/// A map from a probability to a real or complex variable.
///
/// Real transforms return values on the real axis of [`Complex64`]; the
/// propagated uncertainty always uses the modulus of the derivative.
#[derive(Clone)]
pub enum Transform {
    Identity,
    SixthPower,
    Arcsin { scale: f64, offset: f64 },
    Beta,
    Amplitude,
    Stabilized(StabilizedTransform),
    Custom(CustomTransform),
}

impl fmt::Debug for Transform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Transform::Arcsin { scale, offset } => f
                .debug_struct("Arcsin")
                .field("scale", scale)
                .field("offset", offset)
                .finish(),
            other => write!(f, "Transform({})", other.name()),
        }
    }
}

impl From<TransformName> for Transform {
    fn from(name: TransformName) -> Self {
        match name {
            TransformName::Identity => Transform::Identity,
            TransformName::Pow6 => Transform::SixthPower,
            TransformName::Arcsin => Transform::canonical_arcsin(),
            TransformName::Beta => Transform::Beta,
            TransformName::Amplitude => Transform::Amplitude,
        }
    }
}

impl Transform {
    pub fn canonical_arcsin() -> Self {
        Transform::Arcsin {
            scale: CANONICAL_SCALE,
            offset: CANONICAL_OFFSET,
        }
    }

    pub fn arcsin(scale: f64, offset: f64) -> Result<Self> {
        check_scale(scale)?;
        if !offset.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "offset D must be finite, got {offset}"
            )));
        }
        Ok(Transform::Arcsin { scale, offset })
    }

    /// Wraps an arbitrary real map; its derivative is taken numerically.
    pub fn custom(
        name: impl Into<String>,
        forward: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Transform::Custom(CustomTransform {
            name: name.into(),
            forward: Arc::new(forward),
        })
    }

    pub fn name(&self) -> String {
        match self {
            Transform::Identity => "identity".into(),
            Transform::SixthPower => "pow6".into(),
            Transform::Arcsin { .. } => "arcsin".into(),
            Transform::Beta => "beta".into(),
            Transform::Amplitude => "amplitude".into(),
            Transform::Stabilized(s) => s.name.clone(),
            Transform::Custom(c) => c.name.clone(),
        }
    }

    pub fn is_complex(&self) -> bool {
        matches!(self, Transform::Amplitude)
    }

    pub fn eval(&self, p: f64) -> Result<Complex64> {
        check_probability(p)?;
        let canonical = || chi_forward(p, CANONICAL_SCALE, CANONICAL_OFFSET);
        let value = match self {
            Transform::Identity => p,
            Transform::SixthPower => p.powi(6),
            Transform::Arcsin { scale, offset } => chi_forward(p, *scale, *offset)?,
            Transform::Beta => (0.5 * canonical()?).sin(),
            Transform::Amplitude => return Ok(amplitude_of_chi(canonical()?)),
            Transform::Stabilized(s) => {
                integrate_reciprocal_law(&*s.law, p, LAW_QUADRATURE_TOL)?.value
            }
            Transform::Custom(c) => (c.forward)(p),
        };
        Ok(Complex64::new(value, 0.0))
    }

    /// Real-valued evaluation; fails for the complex amplitude.
    pub fn forward(&self, p: f64) -> Result<f64> {
        if self.is_complex() {
            return Err(Error::InvalidParameter(format!(
                "transform `{}` is complex-valued",
                self.name()
            )));
        }
        Ok(self.eval(p)?.re)
    }

    /// Inverse map, available for the arcsin transform only.
    pub fn inverse(&self, chi: f64) -> Option<Result<f64>> {
        match self {
            Transform::Arcsin { scale, offset } => Some(chi_inverse(chi, *scale, *offset)),
            _ => None,
        }
    }

    /// Closed-form `d/dp`, or `None` when the transform has none.
    ///
    /// Fails with [`Error::NonDifferentiable`] where the derivative diverges.
    pub fn closed_form_derivative(&self, p: f64) -> Option<Result<Complex64>> {
        if let Err(e) = check_probability(p) {
            return Some(Err(e));
        }
        let singular = || Error::NonDifferentiable {
            transform: self.name(),
            p,
        };
        let inv_spread = || {
            let var = p * (1.0 - p);
            if var > 0.0 {
                Ok(1.0 / var.sqrt())
            } else {
                Err(singular())
            }
        };
        let d = match self {
            Transform::Identity => Ok(Complex64::new(1.0, 0.0)),
            Transform::SixthPower => Ok(Complex64::new(6.0 * p.powi(5), 0.0)),
            Transform::Arcsin { scale, .. } => inv_spread().map(|g| Complex64::new(scale * g, 0.0)),
            Transform::Beta => {
                if p > 0.0 {
                    Ok(Complex64::new(0.5 / p.sqrt(), 0.0))
                } else {
                    Err(singular())
                }
            }
            Transform::Amplitude => {
                // sin(chi/2) e^{i chi/2} = sqrt(p (1 - p)) + i p
                inv_spread().map(|g| Complex64::new(0.5 * (1.0 - 2.0 * p) * g, 1.0))
            }
            Transform::Stabilized(s) => {
                let spread = (s.law)(p);
                if spread > 0.0 && spread.is_finite() {
                    Ok(Complex64::new(1.0 / spread, 0.0))
                } else {
                    Err(singular())
                }
            }
            Transform::Custom(_) => return None,
        };
        Some(d)
    }

    /// Central difference with step `max(1e-6, 1e-6 |p|)`, clipped to `[0, 1]`.
    pub fn finite_difference_derivative(&self, p: f64) -> Result<Complex64> {
        check_probability(p)?;
        let h = f64::max(1e-6, 1e-6 * p.abs());
        let lo = (p - h).max(0.0);
        let hi = (p + h).min(1.0);
        let d = (self.eval(hi)? - self.eval(lo)?) / (hi - lo);
        if d.re.is_finite() && d.im.is_finite() {
            Ok(d)
        } else {
            Err(Error::NonDifferentiable {
                transform: self.name(),
                p,
            })
        }
    }

    /// Limit of `|d chi/dp| sqrt(p (1 - p))` at an endpoint where the
    /// derivative itself diverges.
    pub(crate) fn endpoint_spread(&self, p: f64) -> Option<f64> {
        match self {
            Transform::Arcsin { scale, .. } if p == 0.0 || p == 1.0 => Some(scale.abs()),
            Transform::Amplitude if p == 0.0 || p == 1.0 => Some(0.5),
            Transform::Beta if p == 0.0 => Some(0.5),
            _ => None,
        }
    }
}

/// Builds `theta(p) = ∫_0^p dq / law(q)` with derivative `1 / law(p)`.
///
/// `law` is the single-run uncertainty `Δp(p)`; it must be positive on the
/// open unit interval. The full-range integral is evaluated up front so a
/// divergent law is rejected here rather than on first use.
pub fn stabilizing_transform_from_law(
    name: impl Into<String>,
    law: impl Fn(f64) -> f64 + Send + Sync + 'static,
) -> Result<Transform> {
    let law: RealFn = Arc::new(law);
    integrate_reciprocal_law(&*law, 1.0, LAW_QUADRATURE_TOL)?;
    Ok(Transform::Stabilized(StabilizedTransform {
        name: name.into(),
        law,
    }))
}
