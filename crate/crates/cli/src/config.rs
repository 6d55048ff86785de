//! Simulation config files (TOML).
//!
//! ```toml
//! mode = "single-arm"
//! replications = 200000
//! seed = 7                       # optional
//! runs = 400
//! transforms = ["arcsin"]        # identity, pow6, arcsin, beta, amplitude
//! p = [0.1, 0.5, 0.9]
//! ```
//!
//! ```toml
//! mode = "two-arm"
//! replications = 200000
//!
//! [[pairs]]
//! p_left = 0.3
//! p_right = 0.6
//! left_runs = 400
//! right_runs = 400
//! sign = "plus"                  # optional, defaults to plus
//! ```

use mpp_core::{ArmSpec, Sign, SimConfig, TransformName};
use serde::Deserialize;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SingleArmFile {
    #[allow(dead_code)]
    mode: String,
    pub replications: u64,
    pub seed: Option<u64>,
    pub runs: u64,
    pub transforms: Vec<TransformName>,
    pub p: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoArmFile {
    #[allow(dead_code)]
    mode: String,
    pub replications: u64,
    pub seed: Option<u64>,
    pub pairs: Vec<PairSpec>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SimulationFile {
    SingleArm(SingleArmFile),
    TwoArm(TwoArmFile),
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairSpec {
    pub p_left: f64,
    pub p_right: f64,
    pub left_runs: u64,
    pub right_runs: u64,
    #[serde(default = "default_sign")]
    pub sign: Sign,
}

fn default_sign() -> Sign {
    Sign::Plus
}

/// Single-line description of a TOML error with 1-based line and column.
fn describe(source: &str, err: &toml::de::Error) -> String {
    let message = err.message().trim().replace('\n', " ");
    match err.span() {
        Some(span) => {
            let before = &source[..span.start.min(source.len())];
            let line = before.matches('\n').count() + 1;
            let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
            format!("line {line}, column {column}: {message}")
        }
        None => message,
    }
}

impl SimulationFile {
    /// Parses a config; the `mode` key selects the schema.
    ///
    /// Each mode is deserialized straight from the source text so error
    /// positions survive.
    pub fn parse(source: &str) -> Result<Self, String> {
        let table: toml::Table = toml::from_str(source).map_err(|e| describe(source, &e))?;
        let err = |e: toml::de::Error| describe(source, &e);
        match table.get("mode").and_then(|m| m.as_str()) {
            Some("single-arm") => toml::from_str(source)
                .map(SimulationFile::SingleArm)
                .map_err(err),
            Some("two-arm") => toml::from_str(source)
                .map(SimulationFile::TwoArm)
                .map_err(err),
            Some(other) => Err(format!(
                "unknown mode `{other}` (expected single-arm or two-arm)"
            )),
            None => Err("missing string key `mode` (single-arm or two-arm)".into()),
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            SimulationFile::SingleArm(f) => f.seed,
            SimulationFile::TwoArm(f) => f.seed,
        }
    }

    pub fn is_two_arm(&self) -> bool {
        matches!(self, SimulationFile::TwoArm(_))
    }

    /// Expands the file into one config per grid point, transform-major for
    /// single-arm files. Every config is validated.
    pub fn expand(&self, seed: u64) -> Result<Vec<SimConfig>, String> {
        let configs: Vec<SimConfig> = match self {
            SimulationFile::SingleArm(SingleArmFile {
                replications,
                runs,
                transforms,
                p,
                ..
            }) => {
                if transforms.is_empty() || p.is_empty() {
                    return Err("`transforms` and `p` must both be non-empty".into());
                }
                transforms
                    .iter()
                    .flat_map(|&t| {
                        p.iter()
                            .map(move |&p| SimConfig::single_arm(p, *runs, t, *replications, seed))
                    })
                    .collect()
            }
            SimulationFile::TwoArm(TwoArmFile {
                replications,
                pairs,
                ..
            }) => {
                if pairs.is_empty() {
                    return Err("`pairs` must be non-empty".into());
                }
                pairs
                    .iter()
                    .map(|pair| {
                        SimConfig::two_arm(
                            ArmSpec {
                                p: pair.p_left,
                                runs: pair.left_runs,
                            },
                            ArmSpec {
                                p: pair.p_right,
                                runs: pair.right_runs,
                            },
                            pair.sign,
                            *replications,
                            seed,
                        )
                    })
                    .collect()
            }
        };
        for (i, c) in configs.iter().enumerate() {
            c.validate()
                .map_err(|e| format!("grid entry {}: {e}", i + 1))?;
        }
        Ok(configs)
    }
}
