//! Subcommand implementations. Each returns the files it wants written; the
//! caller stages and publishes them.

use crate::config::ExperimentConfig;
use mle_threshold::curves::{compute_curves, Curve, CurveKind, Setup};
use mle_threshold::mie::{interval_moments, p1, p2, p3, MomentScheme, PartitionMode};
use mle_threshold::par::Execution;
use mle_threshold::sim::{empirical_interval_probs, empirical_interval_std, simulate, SimConfig, SimResult};
use mle_threshold::thresholds::extract_thresholds;
use mle_threshold::{db_to_linear, Error, Result};
use serde::Serialize;
use std::fmt::Write as _;

pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl Artifact {
    fn csv(name: &str, body: String) -> Self {
        Self { name: name.into(), bytes: body.into_bytes() }
    }

    fn json<T: Serialize>(name: &str, value: &T) -> Self {
        let mut bytes = serde_json::to_vec_pretty(value).expect("JSON serialisation");
        bytes.push(b'\n');
        Self { name: name.into(), bytes }
    }
}

const EXEC: Execution = Execution::Parallel;

fn ps(seconds: f64) -> f64 {
    seconds * 1e12
}

fn setup(cfg: &ExperimentConfig) -> Result<Setup> {
    Setup::new(&cfg.pulse_spec(), cfg.domain()?, cfg.partition_mode()?)
}

fn run_sim(cfg: &ExperimentConfig, s: &Setup, rho_db: &[f64]) -> Result<SimResult> {
    let mut sc = SimConfig::new(rho_db.to_vec(), cfg.sim.trials, cfg.sim.seed);
    sc.grid_points = cfg.sim.grid_points;
    sc.refine = cfg.sim.refine;
    sc.exec = EXEC;
    simulate(&s.model, &s.domain, &sc)
}

#[derive(Serialize)]
struct PartitionInfo {
    mode: &'static str,
    intervals: usize,
    center: usize,
    boundaries_ns: Vec<f64>,
    testpoints_ns: Vec<f64>,
}

#[derive(Serialize)]
struct SignalInfo {
    tw_ns: f64,
    fc_ghz: f64,
    fc_mean_ghz: f64,
    beta_s2_hz2: f64,
    beta_e2_hz2: f64,
    beta_s2_over_beta_e2: f64,
    identity_residual: f64,
    sqrt_crlb_ps_at_0db: f64,
    partition: PartitionInfo,
}

pub fn signal_info(cfg: &ExperimentConfig) -> Result<Vec<Artifact>> {
    let s = setup(cfg)?;
    let e = &s.envelope;
    let p = &s.partition;
    let info = SignalInfo {
        tw_ns: cfg.pulse.tw_ns,
        fc_ghz: cfg.pulse.fc_ghz,
        fc_mean_ghz: e.fc_mean * 1e-9,
        beta_s2_hz2: e.beta_s2,
        beta_e2_hz2: e.beta_e2,
        beta_s2_over_beta_e2: e.beta_s2 / e.beta_e2,
        identity_residual: e.identity_residual(),
        sqrt_crlb_ps_at_0db: ps(mle_threshold::bounds::crlb(&s.model, 1.0).sqrt()),
        partition: PartitionInfo {
            mode: if s.is_oscillating() { "extrema" } else { "uniform" },
            intervals: p.len(),
            center: p.center,
            boundaries_ns: p.boundaries.iter().map(|b| b * 1e9).collect(),
            testpoints_ns: p.testpoints.iter().map(|b| b * 1e9).collect(),
        },
    };
    Ok(vec![Artifact::json("signal_info.json", &info)])
}

/// One block of rows per configuration: `sqrt(c)`, simulated RMSE, their
/// ratio and the hit counts of the central and first right-hand interval.
pub fn table1(cfgs: &[ExperimentConfig]) -> Result<Vec<Artifact>> {
    let mut out = String::from("fc_ghz,rho_db,sqrt_c_ps,sqrt_es_ps,ratio,n0,n1\n");
    for cfg in cfgs {
        let s = setup(cfg)?;
        let grid = cfg.snr_grid()?;
        let sim = run_sim(cfg, &s, &grid)?;
        let p = &s.partition;
        for (i, &db) in grid.iter().enumerate() {
            let c = mle_threshold::bounds::crlb(&s.model, db_to_linear(db));
            let counts = sim.interval_counts(p, i);
            let n = |k: i64| p.storage_index(k).map_or(0, |j| counts[j]);
            let (sc, se) = (ps(c.sqrt()), ps(sim.rmse(i)));
            writeln!(out, "{},{},{},{},{},{},{}", cfg.pulse.fc_ghz, db, sc, se, se / sc, n(0), n(1)).unwrap();
        }
    }
    Ok(vec![Artifact::csv("table1.csv", out)])
}

/// Simulated and modelled probabilities of the central (`n = 0`) and first
/// right-hand (`n = 1`) intervals.
pub fn prob_curves(cfg: &ExperimentConfig) -> Result<Vec<Artifact>> {
    let s = setup(cfg)?;
    let grid = cfg.snr_grid()?;
    let sim = run_sim(cfg, &s, &grid)?;
    let ps_emp = empirical_interval_probs(&sim, &s.partition);
    let part = &s.partition;
    let t0 = s.domain.theta0;
    let mut out = String::from("rho_db,n,p_s,p_1,p_1_err,p_2,p_3\n");
    let mvn = cfg.mvn_options();
    for (i, &db) in grid.iter().enumerate() {
        let rho = db_to_linear(db);
        let o = mle_threshold::mvn::MvnOptions { seed: mvn.seed.wrapping_add(i as u64), ..mvn };
        let j = p1(&s.model, rho, part, t0, &o, EXEC)?;
        let q2 = p2(&s.model, rho, part, t0)?;
        let q3 = p3(&s.model, rho, part, t0)?;
        for n in [0i64, 1] {
            if let Some(k) = part.storage_index(n) {
                writeln!(out, "{db},{n},{},{},{},{},{}", ps_emp[i][k], j.p[k], j.err[k], q2[k], q3[k]).unwrap();
            }
        }
    }
    Ok(vec![Artifact::csv("prob_curves.csv", out)])
}

/// Per-interval standard deviation of the estimate: simulated, and under
/// each moment scheme applicable to the partition.
pub fn interval_std(cfg: &ExperimentConfig) -> Result<Vec<Artifact>> {
    let s = setup(cfg)?;
    let grid = cfg.snr_grid()?;
    let sim = run_sim(cfg, &s, &grid)?;
    let emp = empirical_interval_std(&sim, &s.partition);
    let counts: Vec<Vec<usize>> = (0..grid.len()).map(|i| sim.interval_counts(&s.partition, i)).collect();
    let schemes: &[MomentScheme] = match s.partition.mode {
        PartitionMode::Oscillating => &[MomentScheme::Uniform, MomentScheme::PeakCurvature, MomentScheme::PeakPoint],
        PartitionMode::NonOscillating { .. } => {
            &[MomentScheme::Uniform, MomentScheme::EndpointBernoulli, MomentScheme::EndpointPoint]
        }
    };
    let mut out = String::from("rho_db,n,hits,sigma_s_ps");
    for sc in schemes {
        write!(out, ",sigma_{}_ps", sc.label()).unwrap();
    }
    out.push('\n');
    for (i, &db) in grid.iter().enumerate() {
        let rho = db_to_linear(db);
        let moms = schemes
            .iter()
            .map(|&sc| interval_moments(&s.model, rho, &s.partition, s.domain.theta0, sc))
            .collect::<Result<Vec<_>>>()?;
        for k in 0..s.partition.len() {
            let sig = emp[i][k].map(|v| ps(v).to_string()).unwrap_or_default();
            write!(out, "{db},{},{},{sig}", s.partition.signed_index(k), counts[i][k]).unwrap();
            for m in &moms {
                write!(out, ",{}", ps(m.var[k].sqrt())).unwrap();
            }
            out.push('\n');
        }
    }
    Ok(vec![Artifact::csv("interval_std.csv", out)])
}

fn requested_curves(cfg: &ExperimentConfig, s: &Setup) -> Vec<CurveKind> {
    match &cfg.outputs.curves {
        Some(labels) => labels.iter().filter_map(|l| CurveKind::parse(l)).collect(),
        None => CurveKind::defaults(s.is_oscillating()),
    }
}

/// Computes the requested curves, plus the reference levels the thresholds
/// are measured against when `with_references` is set.
fn all_curves(cfg: &ExperimentConfig, with_references: bool) -> Result<(Setup, Vec<Curve>)> {
    let s = setup(cfg)?;
    let grid = cfg.snr_grid()?;
    let mut kinds = requested_curves(cfg, &s);
    if with_references {
        let mut refs = vec![CurveKind::MaxMse, CurveKind::Crlb];
        if s.is_oscillating() {
            refs.push(CurveKind::Ecrlb);
        }
        for k in refs {
            if !kinds.contains(&k) {
                kinds.push(k);
            }
        }
    }
    let sim = if kinds.contains(&CurveKind::Simulation) { Some(run_sim(cfg, &s, &grid)?) } else { None };
    let curves = compute_curves(&s, &grid, &kinds, &cfg.mvn_options(), sim.as_ref(), EXEC)?;
    Ok((s, curves))
}

pub fn curves(cfg: &ExperimentConfig) -> Result<Vec<Artifact>> {
    let (_, curves) = all_curves(cfg, false)?;
    let mut out = String::from("label,rho_db,sqrt_mse_ps\n");
    for c in &curves {
        let label = c.label();
        for (db, e) in c.rho_db.iter().zip(&c.mse) {
            writeln!(out, "{label},{db},{}", ps(e.sqrt())).unwrap();
        }
    }
    Ok(vec![Artifact::csv("curves.csv", out)])
}

#[derive(Serialize)]
struct ThresholdRecord {
    label: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    rho_pr_db: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rho_am1_db: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rho_am2_db: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rho_as_db: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<ErrorRecord>,
}

#[derive(Serialize)]
pub struct ErrorRecord {
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<&'static str>,
    pub message: String,
}

impl ErrorRecord {
    pub fn from_error(e: &Error) -> Self {
        let threshold = match e {
            Error::Range { name, .. } => Some(*name),
            _ => None,
        };
        Self { kind: e.kind(), threshold, message: e.to_string() }
    }
}

#[derive(Serialize)]
struct AlphaRecord {
    pr: f64,
    #[serde(rename = "as")]
    as_: f64,
    am1: f64,
    am2: f64,
}

#[derive(Serialize)]
struct ThresholdReport {
    alphas: AlphaRecord,
    median_filter: bool,
    curves: Vec<ThresholdRecord>,
}

/// Thresholds of every requested curve except the reference levels
/// themselves. A curve that does not bracket a threshold gets a `range`
/// error record in place of its values; other failures abort the run.
pub fn thresholds(cfg: &ExperimentConfig) -> Result<Vec<Artifact>> {
    let (s, curves) = all_curves(cfg, true)?;
    let find = |k: CurveKind| curves.iter().find(|c| c.kind == k).expect("reference curve computed");
    let c = &find(CurveKind::Crlb).mse;
    let c_e = s.is_oscillating().then(|| find(CurveKind::Ecrlb).mse.as_slice());
    let e_u = find(CurveKind::MaxMse).mse[0];
    let alphas = cfg.alphas();
    let mut records = Vec::new();
    for curve in &curves {
        if matches!(curve.kind, CurveKind::MaxMse | CurveKind::Crlb | CurveKind::Ecrlb) {
            continue;
        }
        let r = extract_thresholds(&curve.rho_db, &curve.mse, c, c_e, e_u, &alphas, cfg.thresholds.median_filter);
        let rec = match r {
            Ok(t) => ThresholdRecord {
                label: curve.label(),
                rho_pr_db: Some(t.rho_pr_db),
                rho_am1_db: t.rho_am1_db,
                rho_am2_db: t.rho_am2_db,
                rho_as_db: Some(t.rho_as_db),
                error: None,
            },
            Err(e @ Error::Range { .. }) => ThresholdRecord {
                label: curve.label(),
                rho_pr_db: None,
                rho_am1_db: None,
                rho_am2_db: None,
                rho_as_db: None,
                error: Some(ErrorRecord::from_error(&e)),
            },
            Err(e) => return Err(e),
        };
        records.push(rec);
    }
    let report = ThresholdReport {
        alphas: AlphaRecord { pr: alphas.pr, as_: alphas.as_, am1: alphas.am1, am2: alphas.am2 },
        median_filter: cfg.thresholds.median_filter,
        curves: records,
    };
    Ok(vec![Artifact::json("thresholds.json", &report)])
}
