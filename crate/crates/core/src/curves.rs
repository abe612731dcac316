//! MSE-versus-SNR curves for every approximation and bound, computed on a
//! common SNR grid from one [`Setup`].

use crate::alb::{taylor_alb, zz_alb};
use crate::aub::{e_m, e_mn, first_peak_offset};
use crate::bounds::{blb, crlb, ecrlb, max_mse};
use crate::mie::{self, interval_moments, msea, MomentScheme, Partition, PartitionMode, ProbMethod};
use crate::mvn::MvnOptions;
use crate::par::{try_map_indexed, Execution};
use crate::signal::{analyze_envelope, build_pulse, noise_deriv_stats, AcrModel, EnvelopeInfo, NoiseDerivStats, Pulse, PulseSpec};
use crate::sim::SimResult;
use crate::{db_to_linear, Domain, Error, Result};
use std::collections::HashMap;

/// Everything derived from the pulse and domain that the curves share.
#[derive(Debug, Clone)]
pub struct Setup {
    pub pulse: Pulse,
    pub model: AcrModel,
    pub stats: NoiseDerivStats,
    pub envelope: EnvelopeInfo,
    pub domain: Domain,
    pub partition: Partition,
}

impl Setup {
    pub fn new(spec: &PulseSpec, domain: Domain, mode: PartitionMode) -> Result<Self> {
        let pulse = build_pulse(spec)?;
        let model = AcrModel::from_pulse(&pulse)?;
        let stats = noise_deriv_stats(&pulse);
        let envelope = analyze_envelope(
            &model,
            domain.theta1 - domain.theta0,
            domain.theta2 - domain.theta0,
        )?;
        let partition = mie::partition(&model, &domain, mode)?;
        Ok(Self { pulse, model, stats, envelope, domain, partition })
    }

    pub fn is_oscillating(&self) -> bool {
        matches!(self.partition.mode, PartitionMode::Oscillating)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CurveKind {
    /// A priori MSE.
    MaxMse,
    Crlb,
    Ecrlb,
    Interval(ProbMethod, MomentScheme),
    PairwiseDensity,
    PairwiseMixture,
    Barankin,
    Taylor,
    ZivZakai,
    ZivZakaiFilled,
    Simulation,
}

impl CurveKind {
    pub fn label(&self) -> String {
        match self {
            CurveKind::MaxMse => "e_U".into(),
            CurveKind::Crlb => "c".into(),
            CurveKind::Ecrlb => "c_e".into(),
            CurveKind::Interval(p, s) => format!("e_{}_{}", p.index(), s.label()),
            CurveKind::PairwiseDensity => "e_M".into(),
            CurveKind::PairwiseMixture => "e_MN".into(),
            CurveKind::Barankin => "c_B".into(),
            CurveKind::Taylor => "e_C".into(),
            CurveKind::ZivZakai => "z_1".into(),
            CurveKind::ZivZakaiFilled => "b_1".into(),
            CurveKind::Simulation => "e_S".into(),
        }
    }

    pub fn parse(label: &str) -> Option<Self> {
        let fixed = [
            CurveKind::MaxMse,
            CurveKind::Crlb,
            CurveKind::Ecrlb,
            CurveKind::PairwiseDensity,
            CurveKind::PairwiseMixture,
            CurveKind::Barankin,
            CurveKind::Taylor,
            CurveKind::ZivZakai,
            CurveKind::ZivZakaiFilled,
            CurveKind::Simulation,
        ];
        if let Some(k) = fixed.iter().find(|k| k.label() == label) {
            return Some(*k);
        }
        let rest = label.strip_prefix("e_")?;
        let (p, s) = rest.split_once('_')?;
        let prob = match p {
            "1" => ProbMethod::Joint,
            "2" => ProbMethod::Pairwise,
            "3" => ProbMethod::PairwiseNormalised,
            _ => return None,
        };
        let scheme = [
            MomentScheme::Uniform,
            MomentScheme::EndpointBernoulli,
            MomentScheme::EndpointPoint,
            MomentScheme::PeakCurvature,
            MomentScheme::PeakPoint,
        ]
        .into_iter()
        .find(|m| m.label() == s)?;
        Some(CurveKind::Interval(prob, scheme))
    }

    /// Default curve set for a signal type.
    pub fn defaults(oscillating: bool) -> Vec<CurveKind> {
        use MomentScheme::*;
        use ProbMethod::*;
        let mut v = vec![CurveKind::MaxMse, CurveKind::Crlb];
        if oscillating {
            v.extend([
                CurveKind::Ecrlb,
                CurveKind::Interval(Joint, PeakCurvature),
                CurveKind::Interval(PairwiseNormalised, PeakCurvature),
            ]);
        } else {
            v.extend([
                CurveKind::Interval(Joint, Uniform),
                CurveKind::Interval(Joint, EndpointBernoulli),
                CurveKind::Interval(Joint, EndpointPoint),
                CurveKind::Interval(PairwiseNormalised, EndpointBernoulli),
            ]);
        }
        v.extend([
            CurveKind::Interval(Pairwise, Uniform),
            CurveKind::PairwiseDensity,
            CurveKind::PairwiseMixture,
            CurveKind::Barankin,
            CurveKind::Taylor,
            CurveKind::ZivZakai,
            CurveKind::ZivZakaiFilled,
            CurveKind::Simulation,
        ]);
        v
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub kind: CurveKind,
    pub rho_db: Vec<f64>,
    pub mse: Vec<f64>,
}

impl Curve {
    pub fn label(&self) -> String {
        self.kind.label()
    }
}

/// Computes the requested curves on `rho_db`. `Simulation` needs `sim`,
/// which must have been run on the same grid.
pub fn compute_curves(
    setup: &Setup,
    rho_db: &[f64],
    kinds: &[CurveKind],
    mvn: &MvnOptions,
    sim: Option<&SimResult>,
    exec: Execution,
) -> Result<Vec<Curve>> {
    if rho_db.is_empty() {
        return Err(Error::Config("empty SNR grid".into()));
    }
    let d = &setup.domain;
    let m = &setup.model;
    let part = &setup.partition;
    let rhos: Vec<f64> = rho_db.iter().map(|x| db_to_linear(*x)).collect();

    let mut probs: HashMap<ProbMethod, Vec<Vec<f64>>> = HashMap::new();
    for k in kinds {
        if let CurveKind::Interval(p, _) = k {
            if probs.contains_key(p) {
                continue;
            }
            let v = match p {
                ProbMethod::Joint => rhos
                    .iter()
                    .enumerate()
                    .map(|(i, &r)| {
                        let o = MvnOptions { seed: mvn.seed.wrapping_add(i as u64), ..*mvn };
                        mie::p1(m, r, part, d.theta0, &o, exec).map(|x| x.p)
                    })
                    .collect::<Result<Vec<_>>>()?,
                ProbMethod::Pairwise => rhos.iter().map(|&r| mie::p2(m, r, part, d.theta0)).collect::<Result<_>>()?,
                ProbMethod::PairwiseNormalised => {
                    rhos.iter().map(|&r| mie::p3(m, r, part, d.theta0)).collect::<Result<_>>()?
                }
            };
            probs.insert(*p, v);
        }
    }

    let peak = first_peak_offset(m, part, d.theta0);
    let mut out = Vec::with_capacity(kinds.len());
    for &kind in kinds {
        let mse: Vec<f64> = match kind {
            CurveKind::MaxMse => vec![max_mse(d); rhos.len()],
            CurveKind::Crlb => rhos.iter().map(|&r| crlb(m, r)).collect(),
            CurveKind::Ecrlb => rhos.iter().map(|&r| ecrlb(&setup.envelope, r)).collect(),
            CurveKind::Interval(p, s) => rhos
                .iter()
                .enumerate()
                .map(|(i, &r)| {
                    let mom = interval_moments(m, r, part, d.theta0, s)?;
                    Ok(msea(&probs[&p][i], &mom, part, d.theta0)?.mse)
                })
                .collect::<Result<_>>()?,
            CurveKind::PairwiseDensity => {
                try_map_indexed(exec, rhos.len(), |i| e_m(m, rhos[i], d).map(|x| x.mse))?
            }
            CurveKind::PairwiseMixture => {
                try_map_indexed(exec, rhos.len(), |i| e_mn(m, rhos[i], d, peak).map(|x| x.mse))?
            }
            CurveKind::Barankin => {
                try_map_indexed(exec, rhos.len(), |i| blb(m, rhos[i], d.theta0, &part.testpoints))?
            }
            CurveKind::Taylor => {
                try_map_indexed(exec, rhos.len(), |i| taylor_alb(&setup.stats, rhos[i], d).map(|x| x.mse))?
            }
            CurveKind::ZivZakai => try_map_indexed(exec, rhos.len(), |i| zz_alb(m, rhos[i], d).map(|x| x.z[0]))?,
            CurveKind::ZivZakaiFilled => {
                try_map_indexed(exec, rhos.len(), |i| zz_alb(m, rhos[i], d).map(|x| x.b[0]))?
            }
            CurveKind::Simulation => {
                let s = sim.ok_or_else(|| Error::Config("e_S requested without a simulation".into()))?;
                if s.rho_db != rho_db {
                    return Err(Error::Config("simulation SNR grid differs from the curve grid".into()));
                }
                (0..rho_db.len()).map(|i| s.mse(i)).collect()
            }
        };
        out.push(Curve { kind, rho_db: rho_db.to_vec(), mse });
    }
    Ok(out)
}
