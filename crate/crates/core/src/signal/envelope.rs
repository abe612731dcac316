use super::{fft_forward, fft_inverse, AcrModel};
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};
use rustfft::num_complex::Complex64;
use std::f64::consts::PI;

const MIN_POINTS: usize = 4096;

/// Mean frequency and complex envelope of the autocorrelation over a lag
/// window, and the derived envelope bandwidth.
#[derive(Debug, Clone)]
pub struct EnvelopeInfo {
    /// Spectral centroid of the positive-frequency part of `R`.
    pub fc_mean: f64,
    /// `beta_s^2 = -R''(0)`.
    pub beta_s2: f64,
    /// `beta_e^2 = -Re e''(0)` of the down-converted analytic signal.
    pub beta_e2: f64,
    step: f64,
    k_min: i64,
    envelope: Vec<Complex64>,
}

impl EnvelopeInfo {
    /// `|e(theta)| / E_s`, linearly interpolated on the analysis grid and zero
    /// outside the window.
    pub fn magnitude(&self, theta: f64) -> f64 {
        let pos = theta / self.step - self.k_min as f64;
        if pos < 0.0 || pos > (self.envelope.len() - 1) as f64 {
            return 0.0;
        }
        let i = (pos.floor() as usize).min(self.envelope.len() - 2);
        let t = pos - i as f64;
        (1.0 - t) * self.envelope[i].norm() + t * self.envelope[i + 1].norm()
    }

    /// Analysis grid `(lag, e(lag))`.
    pub fn samples(&self) -> impl Iterator<Item = (f64, Complex64)> + '_ {
        self.envelope
            .iter()
            .enumerate()
            .map(move |(i, e)| ((i as i64 + self.k_min) as f64 * self.step, *e))
    }

    /// Relative residual of `beta_s^2 = beta_e^2 + 4 pi^2 fc_mean^2`.
    pub fn identity_residual(&self) -> f64 {
        (self.beta_s2 - self.beta_e2 - 4.0 * PI * PI * self.fc_mean * self.fc_mean).abs() / self.beta_s2
    }
}

/// Analyses `R` over the lag window `[lag_lo, lag_hi]` (which must contain 0).
///
/// The window is sampled with at least 4096 points, zero-padded four-fold and
/// transformed; the analytic signal keeps the positive half of the spectrum
/// (doubled) and is down-converted by the spectral centroid. `beta_e^2` comes
/// from an even least-squares polynomial fitted to `Re e` over the lags where
/// `|e|` stays above 95% of its peak, which avoids the slowly decaying
/// spectral tail that the window edges introduce.
pub fn analyze_envelope(model: &AcrModel, lag_lo: f64, lag_hi: f64) -> Result<EnvelopeInfo> {
    if !(lag_lo <= 0.0 && lag_hi >= 0.0 && lag_hi > lag_lo) {
        return Err(Error::Config(format!(
            "lag window [{lag_lo:e}, {lag_hi:e}] must contain zero"
        )));
    }
    let h = ((lag_hi - lag_lo) / (MIN_POINTS - 1) as f64).min(model.native_step());
    let k_min = (lag_lo / h).ceil() as i64;
    let k_max = (lag_hi / h).floor() as i64;
    let m = (k_max - k_min + 1) as usize;
    let len = (4 * m).next_power_of_two();
    if len > 1 << 26 {
        return Err(Error::Resource(format!("envelope transform of length {len}")));
    }
    let mut buf = vec![Complex64::new(0.0, 0.0); len];
    for k in k_min..=k_max {
        let idx = k.rem_euclid(len as i64) as usize;
        buf[idx].re = model.r(k as f64 * h);
    }
    fft_forward(&mut buf);
    let df = 1.0 / (len as f64 * h);
    let half = len / 2;
    let mut num = 0.0;
    let mut den = 0.5 * buf[0].re * h;
    for (mi, c) in buf.iter().enumerate().take(half).skip(1) {
        let re = c.re * h;
        num += mi as f64 * df * re;
        den += re;
    }
    if !(den > 0.0) || !num.is_finite() {
        return Err(Error::DegenerateSignal("no positive-frequency power in window".into()));
    }
    let fc_mean = num / den;

    // One-sided spectrum -> analytic signal.
    for (mi, c) in buf.iter_mut().enumerate() {
        if mi == 0 || mi == half {
            continue;
        }
        *c *= if mi < half { 2.0 } else { 0.0 };
    }
    fft_inverse(&mut buf);
    let envelope: Vec<Complex64> = (k_min..=k_max)
        .map(|k| {
            let z = buf[k.rem_euclid(len as i64) as usize] / len as f64;
            let ph = -2.0 * PI * fc_mean * k as f64 * h;
            z * Complex64::new(ph.cos(), ph.sin())
        })
        .collect();

    let i0 = (-k_min) as usize;
    let peak = envelope[i0].norm();
    let mut reach = usize::MAX;
    for dir in [-1i64, 1] {
        let mut j = 1usize;
        loop {
            let idx = i0 as i64 + dir * j as i64;
            if idx < 0 || idx >= envelope.len() as i64 || envelope[idx as usize].norm() < 0.95 * peak {
                break;
            }
            j += 1;
        }
        reach = reach.min(j - 1);
    }
    let reach = reach.max(8).min(i0.min(envelope.len() - 1 - i0));
    if reach < 4 {
        return Err(Error::DegenerateSignal("lag window too narrow for the envelope".into()));
    }
    let w = reach as f64 * h;
    let mut a = DMatrix::zeros(2 * reach + 1, 4);
    let mut y = DVector::zeros(2 * reach + 1);
    for (row, j) in (-(reach as i64)..=reach as i64).enumerate() {
        let x = (j as f64 * h / w).powi(2);
        a[(row, 0)] = 1.0;
        a[(row, 1)] = x;
        a[(row, 2)] = x * x;
        a[(row, 3)] = x * x * x;
        y[row] = envelope[(i0 as i64 + j) as usize].re;
    }
    let coef = a
        .svd(true, true)
        .solve(&y, 1e-14)
        .map_err(|e| Error::Numerical(format!("envelope curvature fit: {e}")))?;
    let beta_e2 = -2.0 * coef[1] / (w * w) / coef[0];

    Ok(EnvelopeInfo { fc_mean, beta_s2: model.beta_s2(), beta_e2, step: h, k_min, envelope })
}
