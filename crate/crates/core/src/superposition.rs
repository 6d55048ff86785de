//! Two-path predictions built from separately measured arms.
//!
//! Each arm (left path open, right path open) is measured on its own. The
//! both-open probability is predicted either from the real associated
//! variables, `p_tot = sin^2((chi_L ± chi_R) / 2)`, or from the complex
//! amplitudes, `p_tot = p_L + p_R + 2 sqrt(p_L p_R) cos(phi)`. In both cases the
//! combination has unit partial derivatives, so the prediction uncertainty
//! `sqrt(1/L + 1/R)` is fixed by the run counts alone.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::{estimate, ProbEstimate, TrialRecord};
use crate::transforms::{
    amplitude_from_p, chi_forward, Amplitude, CANONICAL_OFFSET, CANONICAL_SCALE,
};

/// Raw complex predictions within this distance of `[0, 1]` are treated as
/// rounding noise rather than out-of-model.
pub const IN_MODEL_TOL: f64 = 1e-12;
/// Slack allowed on `|cos(phi)| <= 1` before data is declared inconsistent.
pub const PHASE_CONSISTENCY_TOL: f64 = 1e-9;

/// One measured path with its derived variables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArmMeasurement {
    /// `None` for a planned arm given by probability rather than counts.
    pub record: Option<TrialRecord>,
    pub est: ProbEstimate,
    pub chi: f64,
    pub amplitude: Amplitude,
}

impl ArmMeasurement {
    pub fn from_record(record: TrialRecord) -> Self {
        let est = estimate(&record);
        Self::build(Some(record), est).expect("estimate of a valid record is a probability")
    }

    pub fn from_counts(clicks: u64, runs: u64) -> Result<Self> {
        Ok(Self::from_record(TrialRecord::new(clicks, runs)?))
    }

    pub fn from_probability(p: f64, runs: u64) -> Result<Self> {
        Self::build(None, ProbEstimate::from_probability(p, runs)?)
    }

    fn build(record: Option<TrialRecord>, est: ProbEstimate) -> Result<Self> {
        Ok(ArmMeasurement {
            record,
            est,
            chi: chi_forward(est.p, CANONICAL_SCALE, CANONICAL_OFFSET)?,
            amplitude: amplitude_from_p(est.p, est.runs)?,
        })
    }

    pub fn p(&self) -> f64 {
        self.est.p
    }

    pub fn runs(&self) -> u64 {
        self.est.runs
    }
}

/// Sign choice between the two real combinations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Sign::Plus => "plus",
            Sign::Minus => "minus",
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Sign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plus" | "+" => Ok(Sign::Plus),
            "minus" | "-" => Ok(Sign::Minus),
            _ => Err(Error::InvalidParameter(format!(
                "sign must be plus or minus, got `{s}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum PredictionMode {
    Real {
        sign: Sign,
    },
    /// `phi` in `[0, 2 pi)`.
    Complex {
        phi: f64,
    },
}

/// Which space the prediction uncertainty is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UncertaintyMetric {
    /// `sqrt(1/L + 1/R)` on the chi scale.
    #[default]
    Chi,
    /// `sqrt(1/(4L) + 1/(4R))` on the amplitude scale.
    Amplitude,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    /// Reported probability; equals `raw_p_tot` unless `clamped`.
    pub p_tot: f64,
    pub raw_p_tot: f64,
    pub delta_chi_tot: f64,
    pub mode: PredictionMode,
    pub clamped: bool,
    left_runs: u64,
    right_runs: u64,
}

impl Prediction {
    pub fn delta_amplitude_tot(&self) -> f64 {
        0.5 * self.delta_chi_tot
    }

    pub fn uncertainty(&self, metric: UncertaintyMetric) -> f64 {
        match metric {
            UncertaintyMetric::Chi => self.delta_chi_tot,
            UncertaintyMetric::Amplitude => self.delta_amplitude_tot(),
        }
    }

    /// Delta-method pushforward of `delta_chi_tot` onto `p_tot`:
    /// `|dp/dchi| delta_chi_tot = sqrt(p_tot (1 - p_tot)) delta_chi_tot`.
    ///
    /// This is a derived convenience value, not part of the prediction rule.
    pub fn delta_p_tot(&self) -> f64 {
        (self.p_tot * (1.0 - self.p_tot)).max(0.0).sqrt() * self.delta_chi_tot
    }

    pub fn runs(&self) -> (u64, u64) {
        (self.left_runs, self.right_runs)
    }
}

/// `sqrt(1/L + 1/R)`; needs no measured data.
pub fn prediction_uncertainty(left_runs: u64, right_runs: u64) -> Result<f64> {
    if left_runs == 0 || right_runs == 0 {
        return Err(Error::ZeroRuns);
    }
    Ok((1.0 / left_runs as f64 + 1.0 / right_runs as f64).sqrt())
}

/// `p_tot = sin^2((chi_L + sign * chi_R) / 2)`.
pub fn predict_real(left: &ArmMeasurement, right: &ArmMeasurement, sign: Sign) -> Prediction {
    let half = 0.5 * (left.chi + sign.factor() * right.chi);
    let p_tot = half.sin().powi(2);
    Prediction {
        p_tot,
        raw_p_tot: p_tot,
        delta_chi_tot: prediction_uncertainty(left.runs(), right.runs())
            .expect("arm measurements have at least one run"),
        mode: PredictionMode::Real { sign },
        clamped: false,
        left_runs: left.runs(),
        right_runs: right.runs(),
    }
}

fn normalize_phase(phi: f64) -> f64 {
    let r = phi.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

fn complex_raw(left: &ArmMeasurement, right: &ArmMeasurement, phi: f64) -> f64 {
    let (pl, pr) = (left.p(), right.p());
    pl + pr + 2.0 * (pl * pr).sqrt() * phi.cos()
}

fn complex_prediction(
    left: &ArmMeasurement,
    right: &ArmMeasurement,
    phi: f64,
    clamp: bool,
) -> Result<Prediction> {
    if !phi.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "phase must be finite, got {phi}"
        )));
    }
    let raw = complex_raw(left, right, phi);
    let in_model = (-IN_MODEL_TOL..=1.0 + IN_MODEL_TOL).contains(&raw);
    if !in_model && !clamp {
        return Err(Error::OutOfModel { raw });
    }
    Ok(Prediction {
        p_tot: raw.clamp(0.0, 1.0),
        raw_p_tot: raw,
        delta_chi_tot: prediction_uncertainty(left.runs(), right.runs())?,
        mode: PredictionMode::Complex {
            phi: normalize_phase(phi),
        },
        clamped: !in_model,
        left_runs: left.runs(),
        right_runs: right.runs(),
    })
}

/// `p_tot = |alpha_L + e^{i phi} alpha_R|^2 = p_L + p_R + 2 sqrt(p_L p_R) cos(phi)`.
///
/// Fails with [`Error::OutOfModel`] when the raw value leaves `[0, 1]`, which
/// happens whenever `(sqrt(p_L) + sqrt(p_R))^2 > 1` and `phi` is near 0.
pub fn predict_complex(
    left: &ArmMeasurement,
    right: &ArmMeasurement,
    phi: f64,
) -> Result<Prediction> {
    complex_prediction(left, right, phi, false)
}

/// [`predict_complex`] that clamps out-of-range values into `[0, 1]` and
/// sets `clamped`, keeping the raw value in `raw_p_tot`.
pub fn predict_complex_clamped(
    left: &ArmMeasurement,
    right: &ArmMeasurement,
    phi: f64,
) -> Result<Prediction> {
    complex_prediction(left, right, phi, true)
}

/// Phase recovered from a measured both-open probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseEstimate {
    /// Principal branch in `[0, pi]`.
    pub phi: f64,
    /// The other branch, `2 pi - phi`, in `[pi, 2 pi)` (0 when `phi` is 0).
    pub phi_conjugate: f64,
}

/// Inverts the complex combination: `phi = acos((p_tot - p_L - p_R) / (2 sqrt(p_L p_R)))`.
///
/// `cos` is even, so `phi` and `2 pi - phi` explain the data equally well.
/// Cosines within the rounding error of the forward formula of `±1` are
/// snapped to `±1`; beyond that, up to [`PHASE_CONSISTENCY_TOL`] is tolerated
/// and anything further is [`Error::InconsistentData`].
pub fn infer_phase(
    left: &ArmMeasurement,
    right: &ArmMeasurement,
    p_tot_measured: f64,
) -> Result<PhaseEstimate> {
    let (pl, pr) = (left.p(), right.p());
    if !(pl > 0.0 && pr > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "phase needs both arm probabilities positive, got p_L = {pl}, p_R = {pr}"
        )));
    }
    if !(0.0..=1.0).contains(&p_tot_measured) {
        return Err(Error::ProbabilityOutOfRange(p_tot_measured));
    }
    let base = pl + pr;
    let scale = 2.0 * (pl * pr).sqrt();
    let mut cosine = (p_tot_measured - base) / scale;
    if cosine.abs() > 1.0 + PHASE_CONSISTENCY_TOL {
        return Err(Error::InconsistentData { argument: cosine });
    }
    let rounding = 4.0 * f64::EPSILON * (p_tot_measured + base + scale) / scale;
    if 1.0 - cosine.abs() <= rounding {
        cosine = cosine.signum();
    }
    let phi = cosine.clamp(-1.0, 1.0).acos();
    let phi_conjugate = if phi == 0.0 { 0.0 } else { TAU - phi };
    debug_assert!((0.0..=PI).contains(&phi));
    Ok(PhaseEstimate { phi, phi_conjugate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    fn arm(p: f64, runs: u64) -> ArmMeasurement {
        ArmMeasurement::from_probability(p, runs).unwrap()
    }

    #[test]
    fn arm_from_counts() {
        let a = ArmMeasurement::from_counts(25, 100).unwrap();
        assert_eq!(a.p(), 0.25);
        assert_abs_diff_eq!(
            a.chi,
            chi_forward(0.25, 1.0, FRAC_PI_2).unwrap(),
            epsilon = 0.0
        );
        assert_eq!(a.amplitude.delta, 0.05);
        assert!(ArmMeasurement::from_counts(5, 4).is_err());
    }

    #[test]
    fn real_examples() {
        let half = arm(0.5, 100);
        assert_abs_diff_eq!(
            predict_real(&half, &half, Sign::Plus).p_tot,
            1.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            predict_real(&half, &half, Sign::Minus).p_tot,
            0.0,
            epsilon = 1e-15
        );
        let blocked = arm(0.0, 100);
        let open = arm(0.3, 100);
        for sign in [Sign::Plus, Sign::Minus] {
            assert_abs_diff_eq!(
                predict_real(&blocked, &open, sign).p_tot,
                0.3,
                epsilon = 1e-15
            );
            assert_abs_diff_eq!(
                predict_real(&open, &blocked, sign).p_tot,
                0.3,
                epsilon = 1e-15
            );
        }
    }

    #[test]
    fn complex_examples() {
        let q = arm(0.25, 100);
        let p = predict_complex(&q, &q, FRAC_PI_2).unwrap();
        assert_abs_diff_eq!(p.p_tot, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(p.delta_chi_tot, 0.02f64.sqrt(), epsilon = 1e-15);
        assert!(!p.clamped);

        assert_abs_diff_eq!(
            predict_complex(&q, &q, PI).unwrap().p_tot,
            0.0,
            epsilon = 1e-15
        );

        let h = arm(0.5, 100);
        match predict_complex(&h, &h, 0.0) {
            Err(Error::OutOfModel { raw }) => assert_abs_diff_eq!(raw, 2.0, epsilon = 1e-15),
            other => panic!("expected out-of-model, got {other:?}"),
        }
        let c = predict_complex_clamped(&h, &h, 0.0).unwrap();
        assert!(c.clamped);
        assert_eq!(c.p_tot, 1.0);
        assert_abs_diff_eq!(c.raw_p_tot, 2.0, epsilon = 1e-15);
    }

    #[test]
    fn phase_is_normalized() {
        let q = arm(0.25, 10);
        let p = predict_complex(&q, &q, -FRAC_PI_2).unwrap();
        assert_eq!(p.mode, PredictionMode::Complex { phi: 1.5 * PI });
        let p = predict_complex(&q, &q, 5.0 * PI).unwrap();
        match p.mode {
            PredictionMode::Complex { phi } => assert_abs_diff_eq!(phi, PI, epsilon = 1e-12),
            _ => unreachable!(),
        }
        assert!(predict_complex(&q, &q, f64::NAN).is_err());
    }

    #[test]
    fn infer_phase_examples() {
        let q = arm(0.25, 100);
        let e = infer_phase(&q, &q, 0.5).unwrap();
        assert_abs_diff_eq!(e.phi, FRAC_PI_2, epsilon = 1e-15);
        assert_abs_diff_eq!(e.phi_conjugate, 1.5 * PI, epsilon = 1e-15);
        assert_eq!(infer_phase(&q, &q, 1.0).unwrap().phi, 0.0);

        let t = arm(0.1, 100);
        match infer_phase(&t, &t, 0.9) {
            Err(Error::InconsistentData { argument }) => {
                assert_abs_diff_eq!(argument, 3.5, epsilon = 1e-12)
            }
            other => panic!("expected inconsistent data, got {other:?}"),
        }
        assert!(infer_phase(&arm(0.0, 10), &q, 0.3).is_err());
        assert!(infer_phase(&q, &q, 1.2).is_err());
    }

    #[test]
    fn uncertainty_examples() {
        assert_abs_diff_eq!(
            prediction_uncertainty(100, 100).unwrap(),
            0.141_421_356_237_309_5,
            epsilon = 1e-15
        );
        assert_eq!(prediction_uncertainty(1, 1).unwrap(), 2f64.sqrt());
        assert_abs_diff_eq!(
            prediction_uncertainty(100_000_000, 100).unwrap(),
            0.1,
            epsilon = 1e-6
        );
        assert_eq!(prediction_uncertainty(0, 3), Err(Error::ZeroRuns));
    }

    #[test]
    fn uncertainty_metrics_and_pushforward() {
        let q = arm(0.25, 100);
        let p = predict_complex(&q, &q, FRAC_PI_2).unwrap();
        assert_abs_diff_eq!(
            p.uncertainty(UncertaintyMetric::Amplitude),
            (0.25f64 / 100.0 + 0.25 / 100.0).sqrt(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(p.delta_p_tot(), 0.5 * p.delta_chi_tot, epsilon = 1e-15);
        let full = predict_real(&arm(0.5, 9), &arm(0.5, 9), Sign::Plus);
        assert!(full.delta_p_tot() < 1e-7);
    }

    #[test]
    fn uncertainty_is_data_independent() {
        let a = predict_real(&arm(0.1, 40), &arm(0.7, 90), Sign::Plus);
        let b = predict_real(&arm(0.9, 40), &arm(0.2, 90), Sign::Minus);
        assert_eq!(a.delta_chi_tot, b.delta_chi_tot);
        assert_eq!(a.runs(), (40, 90));
    }

    #[test]
    fn uncertainty_decreases_in_both_arms() {
        for l in 1..60u64 {
            for r in 1..60u64 {
                let base = prediction_uncertainty(l, r).unwrap();
                assert!(prediction_uncertainty(l + 1, r).unwrap() < base);
                assert!(prediction_uncertainty(l, r + 1).unwrap() < base);
            }
        }
    }

    fn unit() -> impl Strategy<Value = f64> {
        (1u32..1000).prop_map(|k| k as f64 / 1000.0)
    }

    proptest! {
        #[test]
        fn sum_rule_coincides_on_the_line(p in 0.0f64..=1.0) {
            let p_tot = predict_real(&arm(p, 10), &arm(1.0 - p, 10), Sign::Plus).p_tot;
            prop_assert!((p_tot - 1.0).abs() < 1e-12);
        }

        #[test]
        fn blocked_path_reduces_to_open_arm(p in 0.0f64..=1.0, phi in 0.0f64..TAU) {
            let open = arm(p, 10);
            let blocked = arm(0.0, 10);
            prop_assert_eq!(predict_complex(&open, &blocked, phi).unwrap().p_tot, p);
            prop_assert_eq!(predict_complex(&blocked, &open, phi).unwrap().p_tot, p);
        }

        #[test]
        fn real_lies_within_complex_range(pl in unit(), pr in unit()) {
            let (l, r) = (arm(pl, 10), arm(pr, 10));
            let lo = (pl.sqrt() - pr.sqrt()).powi(2);
            let hi = (pl.sqrt() + pr.sqrt()).powi(2);
            for sign in [Sign::Plus, Sign::Minus] {
                let v = predict_real(&l, &r, sign).p_tot;
                prop_assert!(v >= lo - 1e-12 && v <= hi + 1e-12, "{} not in [{}, {}]", v, lo, hi);
            }
        }

        #[test]
        fn phase_round_trip(pl in unit(), pr in unit(), k in 0u32..=64) {
            let phi = PI * k as f64 / 64.0;
            let (l, r) = (arm(pl, 10), arm(pr, 10));
            if let Ok(pred) = predict_complex(&l, &r, phi) {
                let back = infer_phase(&l, &r, pred.p_tot).unwrap();
                prop_assert!((back.phi - phi).abs() < 1e-9, "phi {} -> {}", phi, back.phi);
            }
        }
    }
}
