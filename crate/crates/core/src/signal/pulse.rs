use crate::{Error, Result};
use std::f64::consts::PI;

/// Gaussian-envelope pulse `exp(-2 pi t^2 / tw^2) cos(2 pi fc t)`, scaled to
/// energy `es` after sampling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSpec {
    /// Width parameter `T_w` (s).
    pub tw: f64,
    /// Carrier frequency (Hz); zero for a baseband pulse.
    pub fc: f64,
    /// Pulse energy.
    pub es: f64,
    /// Samples per `min(T_w, 1/fc)`; at least 16.
    pub oversample: usize,
    /// Refuse to synthesise pulses longer than this many samples.
    pub max_samples: usize,
}

/// Envelope level below which the pulse is truncated.
pub const SUPPORT_FLOOR: f64 = 1e-8;

impl PulseSpec {
    pub fn new(tw: f64, fc: f64) -> Self {
        Self { tw, fc, es: 1.0, oversample: 16, max_samples: 1 << 22 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tw.is_finite() && self.tw > 0.0) {
            return Err(Error::Config(format!("pulse width must be positive, got {:e}", self.tw)));
        }
        if !(self.fc.is_finite() && self.fc >= 0.0) {
            return Err(Error::Config(format!("carrier must be non-negative, got {:e}", self.fc)));
        }
        if !(self.es.is_finite() && self.es > 0.0) {
            return Err(Error::Config(format!("pulse energy must be positive, got {:e}", self.es)));
        }
        if self.oversample < 16 {
            return Err(Error::Config(format!(
                "oversampling factor must be at least 16, got {}",
                self.oversample
            )));
        }
        Ok(())
    }

    /// Sampling interval.
    pub fn dt(&self) -> f64 {
        let base = if self.fc > 0.0 { self.tw.min(1.0 / self.fc) } else { self.tw };
        base / self.oversample as f64
    }

    /// Half-width of the truncated support.
    pub fn half_support(&self) -> f64 {
        self.tw * ((1.0 / SUPPORT_FLOOR).ln() / (2.0 * PI)).sqrt()
    }

    pub fn is_baseband(&self) -> bool {
        self.fc == 0.0
    }
}

/// Sampled pulse on a symmetric grid `t_i = (i - half) * dt`.
#[derive(Debug, Clone)]
pub struct Pulse {
    pub spec: PulseSpec,
    pub dt: f64,
    pub samples: Vec<f64>,
}

impl Pulse {
    pub fn half_len(&self) -> usize {
        self.samples.len() / 2
    }

    pub fn time(&self, i: usize) -> f64 {
        (i as f64 - self.half_len() as f64) * self.dt
    }

    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|s| s * s).sum::<f64>() * self.dt
    }
}

pub fn build_pulse(spec: &PulseSpec) -> Result<Pulse> {
    spec.validate()?;
    let dt = spec.dt();
    let half = (spec.half_support() / dt).ceil();
    let n = 2.0 * half + 1.0;
    if n > spec.max_samples as f64 {
        return Err(Error::Resource(format!(
            "pulse needs {n} samples, limit is {}",
            spec.max_samples
        )));
    }
    let half = half as usize;
    let mut samples: Vec<f64> = (0..2 * half + 1)
        .map(|i| {
            let t = (i as f64 - half as f64) * dt;
            (-2.0 * PI * t * t / (spec.tw * spec.tw)).exp() * (2.0 * PI * spec.fc * t).cos()
        })
        .collect();
    let e: f64 = samples.iter().map(|s| s * s).sum::<f64>() * dt;
    let scale = (spec.es / e).sqrt();
    samples.iter_mut().for_each(|s| *s *= scale);
    Ok(Pulse { spec: *spec, dt, samples })
}
