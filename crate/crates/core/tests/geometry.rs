use std::f64::consts::{FRAC_PI_2, PI};

use mpp_core::{
    amplitude_from_p, amplitude_of_chi, chi_inverse, propagate, Complex64, ProbEstimate, Transform,
};

fn chi_grid() -> impl Iterator<Item = f64> {
    (0..=200).map(|k| PI * k as f64 / 200.0)
}

#[test]
fn modulus_squared_is_probability() {
    for chi in chi_grid() {
        let p = chi_inverse(chi, 1.0, FRAC_PI_2).unwrap();
        assert!((amplitude_of_chi(chi).norm_sqr() - p).abs() < 1e-12);
    }
}

#[test]
fn curve_is_circle_about_half_i() {
    let centre = Complex64::new(0.0, 0.5);
    for chi in chi_grid() {
        assert!(((amplitude_of_chi(chi) - centre).norm() - 0.5).abs() < 1e-12);
    }
}

#[test]
fn equal_chi_steps_give_equal_arc_length() {
    let h = 1e-6;
    for chi in chi_grid().skip(1).take(199) {
        let speed = (amplitude_of_chi(chi + h) - amplitude_of_chi(chi - h)).norm() / (2.0 * h);
        assert!((speed - 0.5).abs() < 1e-9, "chi = {chi}: |dα/dχ| = {speed}");
    }
}

#[test]
fn amplitude_uncertainty_is_half_over_root_runs() {
    for runs in [1u64, 25, 100] {
        for k in 0..=10 {
            let p = k as f64 / 10.0;
            let a = amplitude_from_p(p, runs).unwrap();
            assert_eq!(a.delta, 1.0 / (2.0 * (runs as f64).sqrt()));
            // and the delta method on the curve agrees
            let est = ProbEstimate::from_probability(p, runs).unwrap();
            let d = propagate(&est, &Transform::Amplitude).unwrap();
            assert!(
                (d - a.delta).abs() < 1e-12,
                "p={p}, runs={runs}: {d} vs {}",
                a.delta
            );
        }
    }
}

#[test]
fn arcsin_spread_is_constant() {
    for scale in [1.0, -3.0, 0.25] {
        let t = Transform::arcsin(scale, 0.4).unwrap();
        for runs in [1u64, 10, 100, 10_000] {
            for k in 1..1000 {
                let est = ProbEstimate::from_probability(k as f64 / 1000.0, runs).unwrap();
                let d = propagate(&est, &t).unwrap() * (runs as f64).sqrt();
                assert!((d - scale.abs()).abs() < 1e-12 * scale.abs());
            }
        }
    }
}

#[test]
fn beta_map_spread_depends_on_p() {
    let runs = 400;
    let spreads: Vec<f64> = (1..=9)
        .map(|k| {
            let p = k as f64 / 10.0;
            let d = propagate(
                &ProbEstimate::from_probability(p, runs).unwrap(),
                &Transform::Beta,
            )
            .unwrap();
            // |cos(chi/2)| / (2 sqrt(N)) with chi the canonical variable
            let chi = 2.0 * p.sqrt().asin();
            assert!((d - (chi / 2.0).cos().abs() / (2.0 * 20.0)).abs() < 1e-12);
            d
        })
        .collect();
    let max = spreads.iter().cloned().fold(f64::MIN, f64::max);
    let min = spreads.iter().cloned().fold(f64::MAX, f64::min);
    assert!(max / min > 1.5, "ratio {}", max / min);
}
