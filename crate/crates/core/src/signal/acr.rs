use super::{bin_freq, fft_forward, fft_inverse, Pulse};
use crate::{Error, Result};
use rustfft::num_complex::Complex64;
use std::f64::consts::PI;

/// Fine-grid refinement relative to the native sampling interval.
const UPSAMPLE: usize = 8;

/// Normalised autocorrelation `R(theta) = R_s(theta) / E_s` with its first
/// four derivatives.
///
/// The derivatives are computed spectrally on a grid `UPSAMPLE` times finer
/// than the pulse sampling and evaluated between nodes by quintic Hermite
/// interpolation, so the value and derivative evaluators are consistent to
/// interpolation accuracy. `R` is zero beyond the correlation support.
#[derive(Debug, Clone)]
pub struct AcrModel {
    step: f64,
    native_step: f64,
    // tables[q][k] = R^(q)(k * step), k >= 0.
    tables: [Vec<f64>; 5],
    support: f64,
    energy: f64,
    carrier: f64,
    width_scale: f64,
}

impl AcrModel {
    /// Autocorrelation of a sampled pulse.
    pub fn from_pulse(pulse: &Pulse) -> Result<Self> {
        let n = pulse.samples.len();
        let len = (2 * n).next_power_of_two();
        let mut buf = vec![Complex64::new(0.0, 0.0); len];
        for (b, s) in buf.iter_mut().zip(&pulse.samples) {
            b.re = *s;
        }
        fft_forward(&mut buf);
        let power: Vec<f64> = buf.iter().map(|c| c.norm_sqr() * pulse.dt).collect();
        Self::from_power(
            pulse.dt,
            &power,
            (n - 1) as f64 * pulse.dt,
            pulse.spec.fc,
            pulse.spec.tw,
        )
    }

    /// Band-pass reference with a flat power spectrum of width `bandwidth`
    /// centred on `fc`: `R(theta) = sinc(B theta) cos(2 pi fc theta)`.
    ///
    /// The sinc tail is truncated at `200 / B` with a raised-cosine taper that
    /// is flat near the origin, which leaves the derivatives at zero lag
    /// unchanged.
    pub fn flat_spectrum(fc: f64, bandwidth: f64) -> Result<Self> {
        if !(bandwidth > 0.0 && fc >= 0.5 * bandwidth) {
            return Err(Error::Config("flat spectrum needs 0 < B <= 2 fc".into()));
        }
        let fmax = fc + 0.5 * bandwidth;
        let dt = 1.0 / (16.0 * fmax);
        let span = 200.0 / bandwidth;
        let n = (span / dt).ceil() as usize;
        let taper_start = 0.6 * span;
        let lags: Vec<f64> = (0..n)
            .map(|k| {
                let t = k as f64 * dt;
                let x = bandwidth * t;
                let sinc = if x == 0.0 { 1.0 } else { (PI * x).sin() / (PI * x) };
                let w = if t <= taper_start {
                    1.0
                } else {
                    0.5 * (1.0 + (PI * (t - taper_start) / (span - taper_start)).cos())
                };
                sinc * (2.0 * PI * fc * t).cos() * w
            })
            .collect();
        let len = (2 * n).next_power_of_two();
        let mut buf = vec![Complex64::new(0.0, 0.0); len];
        buf[0].re = lags[0];
        for k in 1..n {
            buf[k].re = lags[k];
            buf[len - k].re = lags[k];
        }
        fft_forward(&mut buf);
        // Scale so that the inverse transform in `from_power` reproduces the lags.
        let power: Vec<f64> = buf.iter().map(|c| c.re * dt).collect();
        Self::from_power(dt, &power, (n - 1) as f64 * dt, fc, 1.0 / bandwidth)
    }

    /// `power[m]` is the sampled power spectrum on an `L`-point grid such that
    /// `R_s(k dt) = (1 / (L dt)) * sum_m power[m] exp(j 2 pi m k / L)`.
    fn from_power(dt: f64, power: &[f64], support: f64, carrier: f64, width_scale: f64) -> Result<Self> {
        let len = power.len();
        let fine = len * UPSAMPLE;
        let step = dt / UPSAMPLE as f64;
        let kmax = ((support / step).round() as usize).min(fine / 2);
        let mut tables: [Vec<f64>; 5] = Default::default();
        for (q, table) in tables.iter_mut().enumerate() {
            let mut buf = vec![Complex64::new(0.0, 0.0); fine];
            for m in 0..len {
                let f = bin_freq(m, len, dt);
                let w = 2.0 * PI * f;
                // (j w)^q
                let jw = match q % 4 {
                    0 => Complex64::new(w.powi(q as i32), 0.0),
                    1 => Complex64::new(0.0, w.powi(q as i32)),
                    2 => Complex64::new(-w.powi(q as i32), 0.0),
                    _ => Complex64::new(0.0, -w.powi(q as i32)),
                };
                if m == len / 2 {
                    // Split the Nyquist bin symmetrically; odd derivatives cancel.
                    if q % 2 == 0 {
                        let v = jw * (0.5 * power[m]);
                        buf[m] += v;
                        buf[fine - m] += v;
                    }
                    continue;
                }
                let idx = if m < len / 2 { m } else { fine - (len - m) };
                buf[idx] = jw * power[m];
            }
            fft_inverse(&mut buf);
            let scale = 1.0 / (len as f64 * dt);
            *table = buf[..=kmax].iter().map(|c| c.re * scale).collect();
        }
        let energy = tables[0][0];
        if !(energy > 0.0 && energy.is_finite()) {
            return Err(Error::DegenerateSignal("zero-energy signal".into()));
        }
        for t in tables.iter_mut() {
            t.iter_mut().for_each(|v| *v /= energy);
        }
        Ok(Self {
            step,
            native_step: dt,
            tables,
            support: kmax as f64 * step,
            energy,
            carrier,
            width_scale,
        })
    }

    /// Signal energy `E_s = R_s(0)`.
    pub fn energy(&self) -> f64 {
        self.energy
    }

    /// RMS bandwidth squared `beta_s^2 = -R''(0)`.
    pub fn beta_s2(&self) -> f64 {
        -self.tables[2][0]
    }

    /// Nominal carrier frequency (zero for baseband).
    pub fn carrier(&self) -> f64 {
        self.carrier
    }

    pub fn is_oscillating(&self) -> bool {
        self.carrier > 0.0
    }

    /// Characteristic envelope width (`T_w` for Gaussian pulses).
    pub fn width_scale(&self) -> f64 {
        self.width_scale
    }

    /// Largest lag with non-zero correlation.
    pub fn support(&self) -> f64 {
        self.support
    }

    /// Sampling interval of the underlying pulse.
    pub fn native_step(&self) -> f64 {
        self.native_step
    }

    /// `R(theta)`.
    pub fn r(&self, theta: f64) -> f64 {
        self.eval(0, theta)
    }

    /// `dR/dtheta`.
    pub fn r1(&self, theta: f64) -> f64 {
        self.eval(1, theta)
    }

    /// `d^2R/dtheta^2`.
    pub fn r2(&self, theta: f64) -> f64 {
        self.eval(2, theta)
    }

    /// Derivative of order `q <= 2` at lag `theta`.
    pub fn eval(&self, q: usize, theta: f64) -> f64 {
        assert!(q <= 2, "derivative order {q} not tabulated");
        let (x, sign) = if theta < 0.0 {
            (-theta, if q % 2 == 1 { -1.0 } else { 1.0 })
        } else {
            (theta, 1.0)
        };
        if !(x <= self.support) {
            return 0.0;
        }
        let pos = x / self.step;
        let k = (pos.floor() as usize).min(self.tables[0].len() - 2);
        let t = pos - k as f64;
        let h = self.step;
        let (f, d1, d2) = (&self.tables[q], &self.tables[q + 1], &self.tables[q + 2]);
        let t2 = t * t;
        let t3 = t2 * t;
        let t4 = t3 * t;
        let t5 = t4 * t;
        let h0 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
        let h1 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
        let h2 = 0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5;
        let h3 = 0.5 * t3 - t4 + 0.5 * t5;
        let h4 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
        let h5 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
        let v = f[k] * h0
            + h * d1[k] * h1
            + h * h * d2[k] * h2
            + f[k + 1] * h5
            + h * d1[k + 1] * h4
            + h * h * d2[k + 1] * h3;
        sign * v
    }
}
