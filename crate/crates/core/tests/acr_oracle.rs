//! The sampled-pulse ACR against the closed-form correlation of the
//! continuous Gaussian pulse
//! `R(tau) ∝ exp(-pi tau^2 / Tw^2) [cos(2 pi fc tau) + exp(-pi fc^2 Tw^2)]`.

use mle_threshold::signal::{build_pulse, noise_deriv_stats, AcrModel, PulseSpec};
use std::f64::consts::PI;

fn closed_form(tw: f64, fc: f64, tau: f64) -> f64 {
    let e = (-PI * fc * fc * tw * tw).exp();
    (-PI * tau * tau / (tw * tw)).exp() * ((2.0 * PI * fc * tau).cos() + e) / (1.0 + e)
}

/// Fourth-order central differences of the closed form.
fn closed_form_d(tw: f64, fc: f64, tau: f64, order: usize) -> f64 {
    let h = 1e-3 * tw.min(if fc > 0.0 { 1.0 / fc } else { tw });
    let f = |x: f64| closed_form(tw, fc, x);
    match order {
        1 => (-f(tau + 2.0 * h) + 8.0 * f(tau + h) - 8.0 * f(tau - h) + f(tau - 2.0 * h)) / (12.0 * h),
        2 => {
            (-f(tau + 2.0 * h) + 16.0 * f(tau + h) - 30.0 * f(tau) + 16.0 * f(tau - h) - f(tau - 2.0 * h))
                / (12.0 * h * h)
        }
        _ => unreachable!(),
    }
}

const PULSES: [(f64, f64); 5] = [(0.6e-9, 0.0), (0.6e-9, 4e9), (0.6e-9, 8e9), (2e-9, 0.0), (2e-9, 6.85e9)];

#[test]
fn acr_matches_closed_form() {
    for (tw, fc) in PULSES {
        let m = AcrModel::from_pulse(&build_pulse(&PulseSpec::new(tw, fc)).unwrap()).unwrap();
        let mut worst: f64 = 0.0;
        for k in -400..=400 {
            let tau = k as f64 * 2.5 * tw / 400.0 + 0.37e-12;
            worst = worst.max((m.r(tau) - closed_form(tw, fc, tau)).abs());
        }
        assert!(worst < 1e-6, "tw={tw:e} fc={fc:e}: max |R - R_exact| = {worst:e}");
    }
}

#[test]
fn acr_derivatives_match_differences_of_closed_form() {
    for (tw, fc) in PULSES {
        let m = AcrModel::from_pulse(&build_pulse(&PulseSpec::new(tw, fc)).unwrap()).unwrap();
        let s1 = m.beta_s2().sqrt();
        let s2 = m.beta_s2();
        for k in -60..=60 {
            let tau = k as f64 * 2.0 * tw / 60.0 + 1.3e-12;
            let d1 = (m.r1(tau) - closed_form_d(tw, fc, tau, 1)).abs() / s1;
            let d2 = (m.r2(tau) - closed_form_d(tw, fc, tau, 2)).abs() / s2;
            assert!(d1 < 1e-6, "R' at {tau:e}: rel err {d1:e}");
            assert!(d2 < 1e-5, "R'' at {tau:e}: rel err {d2:e}");
        }
    }
}

#[test]
fn curvature_matches_closed_form_and_derivative_energies() {
    for (tw, fc) in PULSES {
        let p = build_pulse(&PulseSpec::new(tw, fc)).unwrap();
        let m = AcrModel::from_pulse(&p).unwrap();
        let e = (-PI * fc * fc * tw * tw).exp();
        let exact = 2.0 * PI / (tw * tw) + 4.0 * PI * PI * fc * fc / (1.0 + e);
        assert!((m.beta_s2() / exact - 1.0).abs() < 1e-8, "{} vs {}", m.beta_s2(), exact);
        assert!((noise_deriv_stats(&p).beta_s2() / exact - 1.0).abs() < 1e-8);
    }
}

#[test]
fn acr_vanishes_beyond_support() {
    let m = AcrModel::from_pulse(&build_pulse(&PulseSpec::new(0.6e-9, 8e9)).unwrap()).unwrap();
    let s = m.support();
    assert_eq!(m.r(1.01 * s), 0.0);
    assert_eq!(m.r(-1.01 * s), 0.0);
    assert_eq!(m.r1(2.0 * s), 0.0);
}
