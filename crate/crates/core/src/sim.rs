//! Monte Carlo simulation of the grid-search maximum-likelihood delay
//! estimator.
//!
//! The normalised correlator output `X(theta) = R(theta - theta0) + xi(theta) / sqrt(rho)`
//! is sampled on a uniform grid over the domain, where `xi` is a zero-mean
//! Gaussian process with covariance `R`. Each noise realisation is drawn once
//! by circulant embedding and reused for every SNR on the grid (common random
//! numbers), and the estimate is the grid argmax refined by a three-point
//! parabola.

use crate::mie::Partition;
use crate::par::{map_indexed, Execution};
use crate::signal::AcrModel;
use crate::{db_to_linear, Domain, Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::io::Write;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub rho_db: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    /// Grid size override; by default 100 points per carrier period or 400
    /// per envelope width, whichever is finer.
    pub grid_points: Option<usize>,
    /// Parabolic refinement of the argmax.
    pub refine: bool,
    pub max_grid_points: usize,
    pub exec: Execution,
}

impl SimConfig {
    pub fn new(rho_db: Vec<f64>, trials: usize, seed: u64) -> Self {
        Self { rho_db, trials, seed, grid_points: None, refine: true, max_grid_points: 1 << 15, exec: Execution::Parallel }
    }
}

/// Uniform search grid over the domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchGrid {
    pub start: f64,
    pub step: f64,
    pub len: usize,
}

impl SearchGrid {
    pub fn point(&self, k: usize) -> f64 {
        self.start + k as f64 * self.step
    }

    /// Picks the grid for `model` over `domain`, checking the resolution
    /// requirements (at least 20 points per carrier period, or 200 per
    /// envelope width for baseband signals).
    pub fn for_model(model: &AcrModel, domain: &Domain, points: Option<usize>, max_points: usize) -> Result<Self> {
        let w = domain.width();
        let len = match points {
            Some(n) => n,
            None => {
                let mut h = model.width_scale() / 400.0;
                if model.is_oscillating() {
                    h = h.min(1.0 / (100.0 * model.carrier()));
                }
                ((w / h).ceil() as usize + 1).min(max_points)
            }
        };
        if len < 3 {
            return Err(Error::Config("search grid needs at least 3 points".into()));
        }
        if len > max_points {
            return Err(Error::Resource(format!("search grid of {len} points exceeds {max_points}")));
        }
        let step = w / (len - 1) as f64;
        let needed = if model.is_oscillating() {
            1.0 / (20.0 * model.carrier())
        } else {
            model.width_scale() / 200.0
        };
        if step > needed * (1.0 + 1e-9) {
            return Err(Error::Config(format!(
                "search grid step {step:e} is coarser than the required {needed:e}"
            )));
        }
        Ok(Self { start: domain.theta1, step, len })
    }
}

/// Stationary Gaussian noise on a uniform grid with covariance `R`, drawn by
/// circulant embedding. Negative embedding eigenvalues are clipped to zero.
pub struct NoiseGenerator {
    len: usize,
    sqrt_eig: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
    pub clipped: usize,
    pub min_eigenvalue: f64,
}

impl NoiseGenerator {
    pub fn new(model: &AcrModel, step: f64, len: usize) -> Result<Self> {
        let m = (2 * (len - 1)).max(2).next_power_of_two();
        let mut row: Vec<Complex64> = (0..m)
            .map(|k| {
                let lag = k.min(m - k) as f64 * step;
                Complex64::new(model.r(lag), 0.0)
            })
            .collect();
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(m);
        fft.process(&mut row);
        let min_eigenvalue = row.iter().map(|c| c.re).fold(f64::INFINITY, f64::min);
        let clipped = row.iter().filter(|c| c.re < 0.0).count();
        let max = row.iter().map(|c| c.re).fold(0.0, f64::max);
        if !(max > 0.0) {
            return Err(Error::DegenerateSignal("noise covariance is identically zero".into()));
        }
        let sqrt_eig = row.iter().map(|c| (c.re.max(0.0) / m as f64).sqrt()).collect();
        Ok(Self { len, sqrt_eig, fft, clipped, min_eigenvalue })
    }

    /// Two independent realisations from substream `stream` of `seed`.
    pub fn fill_pair(&self, seed: u64, stream: u64, a: &mut [f64], b: &mut [f64]) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let mut buf: Vec<Complex64> = self
            .sqrt_eig
            .iter()
            .map(|s| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                Complex64::new(re * s, im * s)
            })
            .collect();
        self.fft.process(&mut buf);
        for k in 0..self.len {
            a[k] = buf[k].re;
            b[k] = buf[k].im;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub rho_db: Vec<f64>,
    pub theta0: f64,
    pub grid: SearchGrid,
    /// `estimates[i][t]`: estimate of trial `t` at SNR `rho_db[i]`.
    pub estimates: Vec<Vec<f64>>,
    pub clipped_eigenvalues: usize,
}

impl SimResult {
    pub fn mse(&self, i: usize) -> f64 {
        let e = &self.estimates[i];
        e.iter().map(|t| (t - self.theta0).powi(2)).sum::<f64>() / e.len() as f64
    }

    pub fn rmse(&self, i: usize) -> f64 {
        self.mse(i).sqrt()
    }

    pub fn mean(&self, i: usize) -> f64 {
        let e = &self.estimates[i];
        e.iter().sum::<f64>() / e.len() as f64
    }

    /// Number of estimates in each interval at SNR index `i`.
    pub fn interval_counts(&self, partition: &Partition, i: usize) -> Vec<usize> {
        let mut counts = vec![0; partition.len()];
        for &t in &self.estimates[i] {
            if let Some(k) = partition.interval_of(t) {
                counts[k] += 1;
            }
        }
        counts
    }

    /// Writes `rho_db,theta_hat_s,interval_index` rows.
    pub fn write_raw_csv<W: Write>(&self, mut w: W, partition: Option<&Partition>) -> std::io::Result<()> {
        writeln!(w, "rho_db,theta_hat_s,interval_index")?;
        for (i, db) in self.rho_db.iter().enumerate() {
            for &t in &self.estimates[i] {
                let idx = partition
                    .and_then(|p| p.interval_of(t).map(|k| p.signed_index(k).to_string()))
                    .unwrap_or_default();
                writeln!(w, "{db},{t:e},{idx}")?;
            }
        }
        Ok(())
    }
}

/// Fraction of estimates per interval, `[snr][interval]`.
pub fn empirical_interval_probs(result: &SimResult, partition: &Partition) -> Vec<Vec<f64>> {
    (0..result.rho_db.len())
        .map(|i| {
            let n = result.estimates[i].len() as f64;
            result.interval_counts(partition, i).iter().map(|&c| c as f64 / n).collect()
        })
        .collect()
}

/// Per-interval sample standard deviation of the estimates, `[snr][interval]`
/// (`None` for intervals with fewer than two hits).
pub fn empirical_interval_std(result: &SimResult, partition: &Partition) -> Vec<Vec<Option<f64>>> {
    (0..result.rho_db.len())
        .map(|i| {
            let mut groups = vec![Vec::new(); partition.len()];
            for &t in &result.estimates[i] {
                if let Some(k) = partition.interval_of(t) {
                    groups[k].push(t);
                }
            }
            groups
                .iter()
                .map(|g| {
                    (g.len() >= 2).then(|| {
                        let m = g.iter().sum::<f64>() / g.len() as f64;
                        (g.iter().map(|t| (t - m).powi(2)).sum::<f64>() / (g.len() - 1) as f64).sqrt()
                    })
                })
                .collect()
        })
        .collect()
}

fn argmax_refined(signal: &[f64], noise: &[f64], scale: f64, refine: bool) -> f64 {
    let mut best = 0;
    let mut best_v = f64::NEG_INFINITY;
    for (k, (s, n)) in signal.iter().zip(noise).enumerate() {
        let v = s + n * scale;
        if v > best_v {
            best_v = v;
            best = k;
        }
    }
    if !refine || best == 0 || best + 1 == signal.len() {
        return best as f64;
    }
    let y = |k: usize| signal[k] + noise[k] * scale;
    let (a, b, c) = (y(best - 1), best_v, y(best + 1));
    let den = a - 2.0 * b + c;
    let off = if den < 0.0 { (0.5 * (a - c) / den).clamp(-0.5, 0.5) } else { 0.0 };
    best as f64 + off
}

pub fn simulate(model: &AcrModel, domain: &Domain, cfg: &SimConfig) -> Result<SimResult> {
    if cfg.trials == 0 {
        return Err(Error::Config("number of trials must be positive".into()));
    }
    if cfg.rho_db.is_empty() {
        return Err(Error::Config("empty SNR grid".into()));
    }
    let grid = SearchGrid::for_model(model, domain, cfg.grid_points, cfg.max_grid_points)?;
    let gen = NoiseGenerator::new(model, grid.step, grid.len)?;
    let signal: Vec<f64> = (0..grid.len).map(|k| model.r(grid.point(k) - domain.theta0)).collect();
    let scales: Vec<f64> = cfg.rho_db.iter().map(|db| 1.0 / db_to_linear(*db).sqrt()).collect();
    let pairs = cfg.trials.div_ceil(2);
    let per_pair = map_indexed(cfg.exec, pairs, |p| {
        let mut a = vec![0.0; grid.len];
        let mut b = vec![0.0; grid.len];
        gen.fill_pair(cfg.seed, p as u64, &mut a, &mut b);
        let second = 2 * p + 1 < cfg.trials;
        let mut out = Vec::with_capacity(2 * scales.len());
        for &s in &scales {
            out.push(grid.start + argmax_refined(&signal, &a, s, cfg.refine) * grid.step);
            if second {
                out.push(grid.start + argmax_refined(&signal, &b, s, cfg.refine) * grid.step);
            }
        }
        out
    });
    let mut estimates = vec![Vec::with_capacity(cfg.trials); scales.len()];
    for (p, out) in per_pair.iter().enumerate() {
        let width = if 2 * p + 1 < cfg.trials { 2 } else { 1 };
        for (i, est) in estimates.iter_mut().enumerate() {
            est.extend_from_slice(&out[i * width..(i + 1) * width]);
        }
    }
    Ok(SimResult {
        rho_db: cfg.rho_db.clone(),
        theta0: domain.theta0,
        grid,
        estimates,
        clipped_eigenvalues: gen.clipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{build_pulse, PulseSpec};

    fn baseband() -> (AcrModel, Domain) {
        let m = AcrModel::from_pulse(&build_pulse(&PulseSpec::new(2e-9, 0.0)).unwrap()).unwrap();
        (m, Domain::new(-4e-9, 3e-9, 0.0).unwrap())
    }

    #[test]
    fn noise_marginal_variance_is_unity() {
        let (m, d) = baseband();
        let g = SearchGrid::for_model(&m, &d, None, 1 << 15).unwrap();
        let gen = NoiseGenerator::new(&m, g.step, g.len).unwrap();
        let (mut a, mut b) = (vec![0.0; g.len], vec![0.0; g.len]);
        let mut acc = vec![0.0; g.len];
        let mut lag = 0.0;
        let n = 2000;
        let k = (0.3e-9 / g.step).round() as usize;
        for p in 0..n {
            gen.fill_pair(3, p, &mut a, &mut b);
            for j in 0..g.len {
                acc[j] += a[j] * a[j] + b[j] * b[j];
            }
            lag += a[100] * a[100 + k] + b[100] * b[100 + k];
        }
        for v in [acc[0], acc[g.len / 2], acc[g.len - 1]] {
            assert!((v / (2 * n) as f64 - 1.0).abs() < 0.05);
        }
        assert!((lag / (2 * n) as f64 - m.r(k as f64 * g.step)).abs() < 0.05);
    }

    #[test]
    fn deterministic_and_schedule_independent() {
        let (m, d) = baseband();
        let mut cfg = SimConfig::new(vec![0.0, 10.0, 20.0], 101, 42);
        let a = simulate(&m, &d, &cfg).unwrap();
        cfg.exec = Execution::Sequential;
        let b = simulate(&m, &d, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.estimates[0].len(), 101);
    }

    #[test]
    fn estimates_stay_in_domain() {
        let (m, d) = baseband();
        let r = simulate(&m, &d, &SimConfig::new(vec![-10.0, 40.0], 200, 1)).unwrap();
        for e in &r.estimates {
            assert!(e.iter().all(|&t| t >= d.theta1 && t <= d.theta2));
        }
        // At very low SNR the estimate is spread over the domain.
        assert!(r.mse(0) > 0.3 * crate::bounds::max_mse(&d));
    }

    #[test]
    fn coarse_grid_is_rejected() {
        let (m, d) = baseband();
        let mut cfg = SimConfig::new(vec![10.0], 10, 1);
        cfg.grid_points = Some(100);
        assert!(matches!(simulate(&m, &d, &cfg), Err(Error::Config(_))));
    }
}
