use std::fs;
use std::path::Path;

use mpp_core::distinguishability::{
    count_distinguishable, theta_chi_correspondence, theta_of, theta_quadrature,
};
use mpp_core::{
    estimate as estimate_plain, estimate_adjusted, infer_phase as infer, monotonicity_scan,
    predict_complex, predict_complex_clamped, predict_real, propagate, sweep, ArmMeasurement,
    ProbEstimate, Sign, SimMode, Transform, TransformName, TrialRecord,
};

use crate::config::SimulationFile;
use crate::table::{Cell, Table};
use crate::{CliError, DEFAULT_SEED};

pub fn estimate(clicks: u64, runs: u64, adjusted: bool) -> Result<Table, CliError> {
    let record = TrialRecord::new(clicks, runs)?;
    let est = if adjusted {
        estimate_adjusted(&record)
    } else {
        estimate_plain(&record)
    };
    let mut t = Table::new(vec!["clicks", "runs", "p", "delta_p"]);
    t.push(vec![
        clicks.into(),
        runs.into(),
        est.p.into(),
        est.delta_p.into(),
    ]);
    Ok(t)
}

pub fn transform(
    name: TransformName,
    p: Option<f64>,
    chi: Option<f64>,
    runs: u64,
    scale: f64,
    offset: f64,
) -> Result<Table, CliError> {
    let transform = match name {
        TransformName::Arcsin => Transform::arcsin(scale, offset)?,
        other => Transform::from(other),
    };
    if let Some(chi) = chi {
        let p = transform
            .inverse(chi)
            .ok_or_else(|| CliError::Validation(format!("transform `{name}` has no inverse")))??;
        let mut t = Table::new(vec!["transform", "chi", "p"]);
        t.push(vec![name.as_str().into(), chi.into(), p.into()]);
        return Ok(t);
    }
    let p = p.expect("clap requires --p or --chi");
    let value = transform.eval(p)?;
    let delta = propagate(&ProbEstimate::from_probability(p, runs)?, &transform)?;
    let mut t = Table::new(vec![
        "transform",
        "p",
        "runs",
        "value_re",
        "value_im",
        "delta",
    ]);
    t.push(vec![
        name.as_str().into(),
        p.into(),
        runs.into(),
        value.re.into(),
        value.im.into(),
        delta.into(),
    ]);
    Ok(t)
}

pub fn distinguish(runs: u64, clicks: Option<u64>, separation: f64) -> Result<Table, CliError> {
    let count = count_distinguishable(runs, separation)?;
    let counts: Vec<u64> = match clicks {
        Some(c) => vec![c],
        None => (0..=runs).collect(),
    };
    let mut t = Table::new(vec![
        "runs",
        "clicks",
        "theta",
        "theta_quadrature",
        "chi",
        "distinguishable",
    ]);
    for clicks in counts {
        let record = TrialRecord::new(clicks, runs)?;
        t.push(vec![
            runs.into(),
            clicks.into(),
            theta_of(&record).theta.into(),
            theta_quadrature(&record)?.theta.into(),
            theta_chi_correspondence(&record).into(),
            count.into(),
        ]);
    }
    Ok(t)
}

pub fn scan(name: TransformName, max_runs: u64) -> Result<Table, CliError> {
    let violations = monotonicity_scan(&Transform::from(name), max_runs)?;
    let mut t = Table::new(vec![
        "runs",
        "clicks",
        "continuation",
        "delta_before",
        "delta_after",
    ]);
    for v in violations {
        t.push(vec![
            v.runs.into(),
            v.clicks.into(),
            v.continuation.as_str().into(),
            v.delta_before.into(),
            v.delta_after.into(),
        ]);
    }
    Ok(t)
}

#[derive(Debug, Clone, Copy)]
pub enum Combination {
    Real(Sign),
    Complex(f64),
}

pub fn predict(
    left: (u64, u64),
    right: (u64, u64),
    combination: Combination,
    clamp: bool,
) -> Result<Table, CliError> {
    let l = ArmMeasurement::from_counts(left.0, left.1)?;
    let r = ArmMeasurement::from_counts(right.0, right.1)?;
    let (mode, sign, phi, pred) = match combination {
        Combination::Real(sign) => (
            "real",
            Some(sign.as_str()),
            None,
            predict_real(&l, &r, sign),
        ),
        Combination::Complex(phi) => {
            let pred = if clamp {
                predict_complex_clamped(&l, &r, phi)?
            } else {
                predict_complex(&l, &r, phi)?
            };
            let phi = match pred.mode {
                mpp_core::PredictionMode::Complex { phi } => phi,
                mpp_core::PredictionMode::Real { .. } => unreachable!("complex prediction"),
            };
            ("complex", None, Some(phi), pred)
        }
    };
    let mut t = Table::new(vec![
        "mode",
        "p_left",
        "p_right",
        "sign",
        "phi",
        "p_tot",
        "raw_p_tot",
        "clamped",
        "delta_chi_tot",
        "delta_amplitude_tot",
        "delta_p_tot",
    ]);
    t.push(vec![
        mode.into(),
        l.p().into(),
        r.p().into(),
        sign.into(),
        phi.into(),
        pred.p_tot.into(),
        pred.raw_p_tot.into(),
        pred.clamped.into(),
        pred.delta_chi_tot.into(),
        pred.delta_amplitude_tot().into(),
        pred.delta_p_tot().into(),
    ]);
    Ok(t)
}

pub fn infer_phase(left: (u64, u64), right: (u64, u64), p_tot: f64) -> Result<Table, CliError> {
    let l = ArmMeasurement::from_counts(left.0, left.1)?;
    let r = ArmMeasurement::from_counts(right.0, right.1)?;
    let e = infer(&l, &r, p_tot)?;
    let mut t = Table::new(vec!["p_left", "p_right", "p_tot", "phi", "phi_conjugate"]);
    t.push(vec![
        l.p().into(),
        r.p().into(),
        p_tot.into(),
        e.phi.into(),
        e.phi_conjugate.into(),
    ]);
    Ok(t)
}

fn seed_from_env() -> Result<Option<u64>, CliError> {
    match std::env::var("MPP_SEED") {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| {
            CliError::Validation(format!("MPP_SEED must be an unsigned integer, got `{v}`"))
        }),
        Err(_) => Ok(None),
    }
}

pub fn simulate(path: &Path, seed_flag: Option<u64>) -> Result<Table, CliError> {
    let source =
        fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let file = SimulationFile::parse(&source)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    let seed = match seed_flag.or(file.seed()) {
        Some(s) => s,
        None => seed_from_env()?.unwrap_or(DEFAULT_SEED),
    };
    let configs = file
        .expand(seed)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    let reports = sweep(&configs)?;

    let mut t = if file.is_two_arm() {
        Table::new(vec![
            "p_left",
            "p_right",
            "L",
            "R",
            "sign",
            "empirical_sd",
            "predicted_sd",
            "relative_error",
        ])
    } else {
        Table::new(vec![
            "transform",
            "p",
            "N",
            "empirical_sd",
            "predicted_sd",
            "relative_error",
        ])
    };
    for report in reports {
        let report = report?;
        let tail = [
            Cell::from(report.empirical_sd),
            report.predicted_sd.into(),
            report.relative_error.into(),
        ];
        let mut row: Vec<Cell> = match report.config.mode {
            SimMode::SingleArm { arm, transform } => {
                vec![transform.as_str().into(), arm.p.into(), arm.runs.into()]
            }
            SimMode::TwoArm { left, right, sign } => vec![
                left.p.into(),
                right.p.into(),
                left.runs.into(),
                right.runs.into(),
                sign.as_str().into(),
            ],
        };
        row.extend(tail);
        t.push(row);
    }
    Ok(t)
}
