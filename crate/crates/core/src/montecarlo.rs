//! Seeded simulation of binomial counting experiments.
//!
//! Replication `i` of a config draws from its own ChaCha8 stream: the key is
//! derived from the config seed and the stream number is `i`. Results are
//! therefore identical whether replications run serially or on any number of
//! threads, and the spread is accumulated over values in replication order.

use num_complex::Complex64;
use rand::distr::{Bernoulli, Distribution};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Binomial;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::{propagate, ProbEstimate};
use crate::superposition::{prediction_uncertainty, Sign};
use crate::transforms::{chi_forward, Transform, TransformName, CANONICAL_OFFSET, CANONICAL_SCALE};

/// Counts up to this many runs are drawn as explicit Bernoulli trials.
pub const EXPLICIT_BERNOULLI_MAX_RUNS: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArmSpec {
    pub p: f64,
    pub runs: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum SimMode {
    /// Spread of `transform(n1 / N)` with `n1 ~ Bin(N, p)`.
    SingleArm {
        arm: ArmSpec,
        transform: TransformName,
    },
    /// Spread of `chi_L + sign * chi_R` for independent arms.
    TwoArm {
        left: ArmSpec,
        right: ArmSpec,
        sign: Sign,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub mode: SimMode,
    pub replications: u64,
    pub seed: u64,
    /// Keep every replication's transformed value in the report.
    #[serde(default)]
    pub keep_values: bool,
}

impl SimConfig {
    pub fn single_arm(
        p: f64,
        runs: u64,
        transform: TransformName,
        replications: u64,
        seed: u64,
    ) -> Self {
        SimConfig {
            mode: SimMode::SingleArm {
                arm: ArmSpec { p, runs },
                transform,
            },
            replications,
            seed,
            keep_values: false,
        }
    }

    pub fn two_arm(
        left: ArmSpec,
        right: ArmSpec,
        sign: Sign,
        replications: u64,
        seed: u64,
    ) -> Self {
        SimConfig {
            mode: SimMode::TwoArm { left, right, sign },
            replications,
            seed,
            keep_values: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let check_arm = |label: &str, arm: &ArmSpec| {
            if !(0.0..=1.0).contains(&arm.p) {
                return Err(Error::InvalidConfig(format!(
                    "{label} probability {} is outside [0, 1]",
                    arm.p
                )));
            }
            if arm.runs == 0 {
                return Err(Error::InvalidConfig(format!(
                    "{label} runs must be at least 1"
                )));
            }
            Ok(())
        };
        if self.replications < 2 {
            return Err(Error::InvalidConfig(format!(
                "replications must be at least 2, got {}",
                self.replications
            )));
        }
        match &self.mode {
            SimMode::SingleArm { arm, .. } => check_arm("arm", arm),
            SimMode::TwoArm { left, right, .. } => {
                check_arm("left", left)?;
                check_arm("right", right)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub config: SimConfig,
    pub empirical_mean: Complex64,
    /// Sample standard deviation (`n - 1` denominator); for the complex
    /// amplitude the spread is `sqrt(sum |z - mean|^2 / (n - 1))`.
    pub empirical_sd: f64,
    pub predicted_sd: f64,
    /// `|empirical - predicted| / predicted`, absent when `predicted_sd` is 0.
    pub relative_error: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_replication_values: Option<Vec<Complex64>>,
}

fn replication_rng(base: &ChaCha8Rng, index: u64) -> ChaCha8Rng {
    let mut rng = base.clone();
    rng.set_stream(index);
    rng
}

fn draw_binomial(rng: &mut ChaCha8Rng, arm: &ArmSpec) -> u64 {
    if arm.runs <= EXPLICIT_BERNOULLI_MAX_RUNS {
        let trial = Bernoulli::new(arm.p).expect("probability validated");
        (0..arm.runs).filter(|_| trial.sample(rng)).count() as u64
    } else {
        Binomial::new(arm.runs, arm.p)
            .expect("probability validated")
            .sample(rng)
    }
}

/// Click counts of replication `index`: `(n1, None)` for a single arm,
/// `(n_L, Some(n_R))` for two arms.
pub fn draw_counts(config: &SimConfig, index: u64) -> Result<(u64, Option<u64>)> {
    config.validate()?;
    let base = ChaCha8Rng::seed_from_u64(config.seed);
    Ok(draw_with(&base, &config.mode, index))
}

fn draw_with(base: &ChaCha8Rng, mode: &SimMode, index: u64) -> (u64, Option<u64>) {
    let mut rng = replication_rng(base, index);
    match mode {
        SimMode::SingleArm { arm, .. } => (draw_binomial(&mut rng, arm), None),
        SimMode::TwoArm { left, right, .. } => {
            let l = draw_binomial(&mut rng, left);
            (l, Some(draw_binomial(&mut rng, right)))
        }
    }
}

/// Neumaier-compensated sum.
fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut carry = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }
    sum + carry
}

fn spread(values: &[Complex64]) -> (Complex64, f64) {
    let n = values.len() as f64;
    let mean = Complex64::new(
        compensated_sum(values.iter().map(|z| z.re)) / n,
        compensated_sum(values.iter().map(|z| z.im)) / n,
    );
    let ss = compensated_sum(values.iter().map(|z| (z - mean).norm_sqr()));
    (mean, (ss / (n - 1.0)).sqrt())
}

fn run(
    config: &SimConfig,
    sample: impl Fn(u64, Option<u64>) -> Result<Complex64> + Sync,
    predicted_sd: f64,
) -> Result<SimReport> {
    let base = ChaCha8Rng::seed_from_u64(config.seed);
    let values = (0..config.replications)
        .into_par_iter()
        .map(|i| {
            let (a, b) = draw_with(&base, &config.mode, i);
            sample(a, b)
        })
        .collect::<Result<Vec<_>>>()?;
    let (empirical_mean, empirical_sd) = spread(&values);
    let relative_error =
        (predicted_sd > 0.0).then(|| (empirical_sd - predicted_sd).abs() / predicted_sd);
    Ok(SimReport {
        config: *config,
        empirical_mean,
        empirical_sd,
        predicted_sd,
        relative_error,
        per_replication_values: config.keep_values.then_some(values),
    })
}

/// Spread of the transformed single-arm estimate against the delta-method
/// prediction `|d chi/dp| sqrt(p (1 - p) / N)` at the true `p`.
pub fn simulate_single_arm(config: &SimConfig) -> Result<SimReport> {
    config.validate()?;
    let SimMode::SingleArm { arm, transform } = config.mode else {
        return Err(Error::InvalidConfig("expected a single-arm config".into()));
    };
    let transform = Transform::from(transform);
    let predicted = propagate(
        &ProbEstimate::from_probability(arm.p, arm.runs)?,
        &transform,
    )?;
    let n = arm.runs as f64;
    run(
        config,
        |clicks, _| transform.eval(clicks as f64 / n),
        predicted,
    )
}

/// Spread of `chi_L + sign * chi_R` against `sqrt(1/L + 1/R)`.
pub fn simulate_two_arm(config: &SimConfig) -> Result<SimReport> {
    config.validate()?;
    let SimMode::TwoArm { left, right, sign } = config.mode else {
        return Err(Error::InvalidConfig("expected a two-arm config".into()));
    };
    let predicted = prediction_uncertainty(left.runs, right.runs)?;
    let chi = |clicks: u64, runs: u64| {
        chi_forward(
            clicks as f64 / runs as f64,
            CANONICAL_SCALE,
            CANONICAL_OFFSET,
        )
    };
    run(
        config,
        |nl, nr| {
            let nr = nr.expect("two-arm draw yields both counts");
            Ok(Complex64::new(
                chi(nl, left.runs)? + sign.factor() * chi(nr, right.runs)?,
                0.0,
            ))
        },
        predicted,
    )
}

pub fn simulate(config: &SimConfig) -> Result<SimReport> {
    match config.mode {
        SimMode::SingleArm { .. } => simulate_single_arm(config),
        SimMode::TwoArm { .. } => simulate_two_arm(config),
    }
}

/// Runs every config; a failing config yields an `Err` entry in its slot and
/// does not stop the others. Reports come back in input order.
pub fn sweep(configs: &[SimConfig]) -> Result<Vec<Result<SimReport>>> {
    if configs.is_empty() {
        return Err(Error::EmptySweep);
    }
    Ok(configs.par_iter().map(simulate).collect())
}
