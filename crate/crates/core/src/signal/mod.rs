//! Pulse synthesis, autocorrelation model, envelope and noise statistics.

mod acr;
mod envelope;
mod noise;
mod pulse;

pub use acr::AcrModel;
pub use envelope::{analyze_envelope, EnvelopeInfo};
pub use noise::{noise_deriv_stats, NoiseDerivStats};
pub use pulse::{build_pulse, Pulse, PulseSpec};

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

pub(crate) fn fft_forward(buf: &mut [Complex64]) {
    FftPlanner::new().plan_fft_forward(buf.len()).process(buf);
}

pub(crate) fn fft_inverse(buf: &mut [Complex64]) {
    FftPlanner::new().plan_fft_inverse(buf.len()).process(buf);
}

/// Frequency of DFT bin `m` for an `n`-point transform with sample step `dt`.
pub(crate) fn bin_freq(m: usize, n: usize, dt: f64) -> f64 {
    let k = if m <= n / 2 { m as f64 } else { m as f64 - n as f64 };
    k / (n as f64 * dt)
}
