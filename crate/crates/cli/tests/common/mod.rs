//! Helpers shared by the CLI test targets.

#![allow(dead_code)]

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

pub fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

pub fn fixture(name: &str) -> String {
    manifest_dir()
        .join("tests/fixtures")
        .join(name)
        .display()
        .to_string()
}

pub fn mpp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mpp"))
        .args(args)
        .env_remove("MPP_SEED")
        .output()
        .expect("failed to spawn mpp")
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

pub fn golden_cases() -> Vec<(&'static str, Vec<String>)> {
    let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    vec![
        (
            "estimate",
            s(&["estimate", "--clicks", "90", "--runs", "100"]),
        ),
        (
            "estimate_boundary",
            s(&["estimate", "--clicks", "0", "--runs", "10"]),
        ),
        (
            "estimate_adjusted",
            s(&["estimate", "--clicks", "0", "--runs", "10", "--adjusted"]),
        ),
        (
            "transform_arcsin",
            s(&[
                "transform",
                "--transform",
                "arcsin",
                "--p",
                "0.9",
                "--runs",
                "100",
            ]),
        ),
        (
            "transform_amplitude",
            s(&[
                "transform",
                "--transform",
                "amplitude",
                "--p",
                "0.25",
                "--runs",
                "25",
            ]),
        ),
        (
            "transform_inverse",
            s(&[
                "transform",
                "--transform",
                "arcsin",
                "--chi",
                "3.141592653589793",
            ]),
        ),
        ("distinguish", s(&["distinguish", "--runs", "10"])),
        (
            "scan_identity",
            s(&["scan", "--transform", "identity", "--max-runs", "12"]),
        ),
        (
            "scan_arcsin",
            s(&["scan", "--transform", "arcsin", "--max-runs", "1000"]),
        ),
        (
            "predict_complex",
            s(&[
                "predict",
                "--nl",
                "25",
                "--l",
                "100",
                "--nr",
                "25",
                "--r",
                "100",
                "--mode",
                "complex",
                "--phi",
                "1.5707963",
            ]),
        ),
        (
            "predict_real",
            s(&[
                "predict", "--nl", "50", "--l", "100", "--nr", "50", "--r", "100", "--mode",
                "real", "--sign", "minus",
            ]),
        ),
        (
            "predict_clamped",
            s(&[
                "predict", "--nl", "50", "--l", "100", "--nr", "50", "--r", "100", "--mode",
                "complex", "--phi", "0", "--clamp",
            ]),
        ),
        (
            "infer_phase",
            s(&[
                "infer-phase",
                "--nl",
                "25",
                "--l",
                "100",
                "--nr",
                "25",
                "--r",
                "100",
                "--p-tot",
                "0.5",
            ]),
        ),
        (
            "simulate_single_arm",
            vec![
                "simulate".into(),
                "--config".into(),
                fixture("single_arm.toml"),
            ],
        ),
        (
            "simulate_two_arm",
            vec![
                "simulate".into(),
                "--config".into(),
                fixture("two_arm.toml"),
            ],
        ),
        (
            "simulate_jsonl",
            vec![
                "simulate".into(),
                "--config".into(),
                fixture("two_arm.toml"),
                "--format".into(),
                "jsonl".into(),
            ],
        ),
    ]
}

pub fn golden_path(name: &str) -> PathBuf {
    let ext = if name.ends_with("jsonl") {
        "jsonl"
    } else {
        "csv"
    };
    manifest_dir()
        .join("tests/golden")
        .join(format!("{name}.{ext}"))
}

/// Runs one golden case; `Err` describes the first mismatch.
pub fn golden_matches(name: &str, args: &[String]) -> Result<(), String> {
    let args: Vec<&str> = args.iter().map(String::as_str).collect();
    let out = mpp(&args);
    if !out.status.success() {
        return Err(format!(
            "{name}: exit {:?}: {}",
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    let path = golden_path(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        fs::write(&path, &out.stdout).map_err(|e| e.to_string())?;
    }
    let expected =
        fs::read(&path).map_err(|_| format!("missing golden file {}", path.display()))?;
    if out.stdout == expected {
        Ok(())
    } else {
        Err(format!(
            "{name} differs from {}:\n--- got\n{}\n--- expected\n{}",
            path.display(),
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&expected)
        ))
    }
}

pub fn check_golden(name: &str, args: &[String]) {
    if let Err(e) = golden_matches(name, args) {
        panic!("{e}");
    }
}
