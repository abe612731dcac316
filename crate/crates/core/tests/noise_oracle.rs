//! Circulant-embedding noise against the dense-Cholesky reference sampler.

use mle_threshold::mie::{partition, PartitionMode};
use mle_threshold::signal::{build_pulse, AcrModel, PulseSpec};
use mle_threshold::sim::{simulate, NoiseGenerator, SearchGrid, SimConfig};
use mle_threshold::{db_to_linear, Domain};
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn setup() -> (AcrModel, Domain, SearchGrid) {
    let m = AcrModel::from_pulse(&build_pulse(&PulseSpec::new(0.6e-9, 8e9)).unwrap()).unwrap();
    let d = Domain::new(-0.9e-9, 0.9e-9, 0.0).unwrap();
    let g = SearchGrid::for_model(&m, &d, Some(720), 1 << 15).unwrap();
    (m, d, g)
}

#[test]
fn empirical_covariance_matches_acr() {
    let (m, _, g) = setup();
    let gen = NoiseGenerator::new(&m, g.step, g.len).unwrap();
    let lags = [0usize, 1, 3, 7, 15, 40, 120];
    let mut acc = vec![0.0; lags.len()];
    let (mut a, mut b) = (vec![0.0; g.len], vec![0.0; g.len]);
    let pairs = 3000;
    let mut count = 0.0;
    for p in 0..pairs {
        gen.fill_pair(5, p, &mut a, &mut b);
        for v in [&a, &b] {
            for (j, &l) in lags.iter().enumerate() {
                for k in (0..g.len - l).step_by(37) {
                    acc[j] += v[k] * v[k + l];
                }
            }
        }
        count += 1.0;
    }
    for (j, &l) in lags.iter().enumerate() {
        let samples = 2.0 * count * ((g.len - l) as f64 / 37.0).ceil();
        let emp = acc[j] / samples;
        let exact = m.r(l as f64 * g.step);
        // Products of unit normals have variance <= 2; samples along a
        // realisation are correlated, so allow a generous multiple.
        let tol = 6.0 * (2.0 / (2.0 * count)).sqrt();
        assert!((emp - exact).abs() < tol, "lag {l}: {emp} vs {exact}");
    }
}

#[test]
fn simulated_estimates_match_dense_cholesky_sampling() {
    let (m, d, g) = setup();
    let part = partition(&m, &d, PartitionMode::Oscillating).unwrap();
    let db = 10.0;
    let trials = 4000;
    let mut cfg = SimConfig::new(vec![db], trials, 21);
    cfg.grid_points = Some(g.len);
    cfg.refine = false;
    let sim = simulate(&m, &d, &cfg).unwrap();

    let cov = DMatrix::from_fn(g.len, g.len, |i, j| m.r((i as f64 - j as f64) * g.step) + if i == j { 1e-10 } else { 0.0 });
    let l = cov.cholesky().expect("grid covariance is positive definite").l();
    let signal: Vec<f64> = (0..g.len).map(|k| m.r(g.point(k))).collect();
    let scale = 1.0 / db_to_linear(db).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let mut dense = Vec::with_capacity(trials);
    for _ in 0..trials {
        let z = DVector::from_fn(g.len, |_, _| StandardNormal.sample(&mut rng));
        let w = &l * z;
        let k = (0..g.len)
            .max_by(|&i, &j| (signal[i] + scale * w[i]).total_cmp(&(signal[j] + scale * w[j])))
            .unwrap();
        dense.push(g.point(k));
    }

    let frac = |est: &[f64], i: usize| est.iter().filter(|&&t| part.interval_of(t) == Some(i)).count() as f64 / trials as f64;
    for i in [part.center, part.center + 1, part.center - 1] {
        let (p, q) = (frac(&sim.estimates[0], i), frac(&dense, i));
        let sd = (p * (1.0 - p) / trials as f64 + q * (1.0 - q) / trials as f64).sqrt();
        assert!((p - q).abs() < 4.0 * sd, "interval {i}: circulant {p} vs dense {q}");
    }
    let mse = |e: &[f64]| e.iter().map(|t| t * t).sum::<f64>() / e.len() as f64;
    let se = |e: &[f64]| {
        let m2 = mse(e);
        ((e.iter().map(|t| t.powi(4)).sum::<f64>() / e.len() as f64 - m2 * m2) / e.len() as f64).sqrt()
    };
    let (a, b) = (mse(&sim.estimates[0]), mse(&dense));
    let s = (se(&sim.estimates[0]).powi(2) + se(&dense).powi(2)).sqrt();
    assert!((a - b).abs() < 4.0 * s, "mse circulant {a:e} vs dense {b:e} (se {s:e})");
}
