use super::{bin_freq, fft_forward, fft_inverse, Pulse};
use rustfft::num_complex::Complex64;
use std::f64::consts::PI;

/// Energies of the pulse and its first two derivatives, which set the
/// variances of the derivative noise terms entering the linearised estimator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseDerivStats {
    pub e_s: f64,
    pub e_sdot: f64,
    pub e_sddot: f64,
    /// Correlation coefficient between the first- and second-derivative noise.
    pub nu0: f64,
}

impl NoiseDerivStats {
    /// `beta_s^2 = E_sdot / E_s`.
    pub fn beta_s2(&self) -> f64 {
        self.e_sdot / self.e_s
    }

    /// `delta^2 = sqrt(E_sddot / E_s)`.
    pub fn delta2(&self) -> f64 {
        (self.e_sddot / self.e_s).sqrt()
    }
}

/// Spectral derivatives of the sampled pulse and their energies.
pub fn noise_deriv_stats(pulse: &Pulse) -> NoiseDerivStats {
    let n = pulse.samples.len();
    let len = (2 * n).next_power_of_two();
    let dt = pulse.dt;
    let mut spec = vec![Complex64::new(0.0, 0.0); len];
    for (b, s) in spec.iter_mut().zip(&pulse.samples) {
        b.re = *s;
    }
    fft_forward(&mut spec);
    let deriv = |order: i32| -> Vec<f64> {
        let mut buf: Vec<Complex64> = spec
            .iter()
            .enumerate()
            .map(|(m, c)| {
                if order % 2 == 1 && m == len / 2 {
                    return Complex64::new(0.0, 0.0);
                }
                let jw = Complex64::new(0.0, 2.0 * PI * bin_freq(m, len, dt));
                c * jw.powi(order)
            })
            .collect();
        fft_inverse(&mut buf);
        buf.iter().map(|c| c.re / len as f64).collect()
    };
    let s1 = deriv(1);
    let s2 = deriv(2);
    let e = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() * dt;
    let e_s = e(&pulse.samples, &pulse.samples);
    let e_sdot = e(&s1, &s1);
    let e_sddot = e(&s2, &s2);
    let nu0 = e(&s1, &s2) / (e_sdot * e_sddot).sqrt();
    NoiseDerivStats { e_s, e_sdot, e_sddot, nu0 }
}
