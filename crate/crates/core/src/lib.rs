//! Probability estimates whose uncertainty depends only on the number of runs.
//!
//! Observed click frequencies are mapped to the associated variable
//! `chi = C * asin(2p - 1) + D`, whose propagated uncertainty is `|C| / sqrt(N)`
//! regardless of the outcome. On top of that the crate provides:
//!
//! * [`estimation`]: binomial estimates, delta-method propagation and the
//!   "more data never hurts" monotonicity scan;
//! * [`transforms`]: the transform gallery (identity, sixth power, arcsin,
//!   `sin(chi/2)`, complex amplitude) and quadrature construction of a
//!   stabilizing transform from an arbitrary uncertainty law;
//! * [`distinguishability`]: the `theta` coordinate counting statistically
//!   distinguishable results;
//! * [`superposition`]: two-path predictions in real and complex form;
//! * [`montecarlo`]: seeded, schedule-independent simulation of the above.

pub mod distinguishability;
pub mod error;
pub mod estimation;
pub mod montecarlo;
pub mod quadrature;
pub mod superposition;
pub mod transforms;

pub use distinguishability::{
    count_distinguishable, theta_chi_correspondence, theta_of, theta_quadrature, ThetaValue,
};
pub use error::{Error, Result};
pub use estimation::{
    estimate, estimate_adjusted, monotonicity_scan, propagate, propagate_with, Continuation,
    DerivativeMode, ProbEstimate, TrialRecord, Violation,
};
pub use montecarlo::{
    simulate_single_arm, simulate_two_arm, sweep, ArmSpec, SimConfig, SimMode, SimReport,
};
pub use superposition::{
    infer_phase, predict_complex, predict_complex_clamped, predict_real, prediction_uncertainty,
    ArmMeasurement, PhaseEstimate, Prediction, PredictionMode, Sign, UncertaintyMetric,
};
pub use transforms::{
    amplitude_from_p, amplitude_of_chi, chi_forward, chi_inverse, stabilizing_transform_from_law,
    Amplitude, Transform, TransformName,
};

pub use num_complex::Complex64;
