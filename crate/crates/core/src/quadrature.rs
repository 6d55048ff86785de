//! Adaptive Gauss-Kronrod (7/15) quadrature.
//!
//! Intervals are kept in a max-heap keyed by their error estimate and the
//! worst one is bisected until the summed error estimate meets the tolerance.
//! The integrals of `1 / law(p)` needed for stabilizing transforms have
//! inverse-square-root singularities at both ends of `[0, 1]`;
//! [`integrate_reciprocal_law`] removes them with `p = sin^2(u / 2)` before
//! handing the integrand to the adaptive rule.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Kronrod abscissae on [-1, 1]; odd indices are shared with the Gauss rule.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Default cap on the number of subintervals.
pub const MAX_INTERVALS: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for (j, (&x, &w)) in XGK[..7].iter().zip(&WGK[..7]).enumerate() {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kronrod += w * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Integrates `f` over `[a, b]` to an absolute tolerance.
///
/// Fails with [`Error::DivergentIntegral`] when the integrand produces a
/// non-finite value or the tolerance is not met within `max_intervals`
/// subintervals.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    max_intervals: usize,
) -> Result<QuadratureResult> {
    let divergent = || Error::DivergentIntegral { upper: b };
    if a == b {
        return Ok(QuadratureResult {
            value: 0.0,
            error_estimate: 0.0,
            evaluations: 0,
            intervals: 0,
        });
    }

    let (value, error) = kronrod15(&f, a, b);
    if !value.is_finite() || !error.is_finite() {
        return Err(divergent());
    }
    let mut evaluations = 15;
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, error });
    let mut total_error = error;

    while total_error > abs_tol {
        if heap.len() >= max_intervals.max(1) {
            return Err(divergent());
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval can no longer be split in floating point
            return Err(divergent());
        }
        let (lv, le) = kronrod15(&f, worst.a, mid);
        let (rv, re) = kronrod15(&f, mid, worst.b);
        evaluations += 30;
        if !(lv.is_finite() && le.is_finite() && rv.is_finite() && re.is_finite()) {
            return Err(divergent());
        }
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: lv,
            error: le,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: rv,
            error: re,
        });
        // re-sum instead of updating incrementally to avoid drift
        total_error = heap.iter().map(|s| s.error).sum();
    }

    let mut segments = heap.into_vec();
    segments.sort_by(|x, y| x.a.total_cmp(&y.a));
    Ok(QuadratureResult {
        value: segments.iter().map(|s| s.value).sum(),
        error_estimate: total_error,
        evaluations,
        intervals: segments.len(),
    })
}

/// Computes `∫_0^p dq / law(q)` for `p` in `[0, 1]`.
///
/// Uses the substitution `q = sin^2(u / 2)`, `dq = sin(u) / 2 du`, which turns
/// integrands that blow up like `1 / sqrt(q (1 - q))` at the ends of the unit
/// interval into smooth ones. A law that is not strictly positive and finite
/// on the open interval is reported as divergent.
pub fn integrate_reciprocal_law<L: Fn(f64) -> f64>(
    law: L,
    p: f64,
    abs_tol: f64,
) -> Result<QuadratureResult> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::ProbabilityOutOfRange(p));
    }
    let upper = 2.0 * p.sqrt().asin();
    let integrand = |u: f64| {
        let half = 0.5 * u;
        let q = half.sin().powi(2);
        let spread = law(q);
        if spread > 0.0 && spread.is_finite() {
            0.5 * u.sin() / spread
        } else {
            f64::NAN
        }
    };
    integrate_adaptive(integrand, 0.0, upper, abs_tol, MAX_INTERVALS).map_err(|e| match e {
        Error::DivergentIntegral { .. } => Error::DivergentIntegral { upper: p },
        other => other,
    })
}
