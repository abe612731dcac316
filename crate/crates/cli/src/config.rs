//! Experiment configuration, stored as TOML in `.cfg` files.

use mle_threshold::mie::PartitionMode;
use mle_threshold::mvn::MvnOptions;
use mle_threshold::signal::PulseSpec;
use mle_threshold::thresholds::Alphas;
use mle_threshold::{Domain, Error, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub pulse: PulseSection,
    pub domain: DomainSection,
    pub snr: SnrSection,
    pub partition: PartitionSection,
    pub sim: SimSection,
    #[serde(default)]
    pub mvn: MvnSection,
    #[serde(default)]
    pub outputs: OutputsSection,
    #[serde(default)]
    pub thresholds: ThresholdSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseSection {
    pub tw_ns: f64,
    pub fc_ghz: f64,
    #[serde(default = "one")]
    pub es: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSection {
    pub theta1_ns: f64,
    pub theta2_ns: f64,
    pub theta0_ns: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SnrSection {
    pub min_db: f64,
    pub max_db: f64,
    pub step_db: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PartitionKind {
    /// Testpoints at the ACR maxima (carrier-modulated signals).
    Extrema,
    /// Equal-width intervals.
    Uniform,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionSection {
    pub mode: PartitionKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_intervals: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSection {
    pub trials: usize,
    pub seed: u64,
    #[serde(default = "yes")]
    pub refine: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_points: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MvnSection {
    pub n_points: usize,
    pub seed: u64,
}

impl Default for MvnSection {
    fn default() -> Self {
        let d = MvnOptions::default();
        Self { n_points: d.n_points, seed: d.seed }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputsSection {
    /// Curve labels for `curves` and `thresholds`; the signal type's default
    /// set when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curves: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdSection {
    pub alpha_pr: f64,
    pub alpha_as: f64,
    pub alpha_am1: f64,
    pub alpha_am2: f64,
    pub median_filter: bool,
}

impl Default for ThresholdSection {
    fn default() -> Self {
        let a = Alphas::default();
        Self { alpha_pr: a.pr, alpha_as: a.as_, alpha_am1: a.am1, alpha_am2: a.am2, median_filter: false }
    }
}

fn one() -> f64 {
    1.0
}

fn yes() -> bool {
    true
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))
    }

    pub fn load(path: &Path) -> Result<(Self, Vec<u8>)> {
        let bytes = std::fs::read(path)?;
        let text = std::str::from_utf8(&bytes)
            .map_err(|_| Error::Config(format!("{} is not UTF-8", path.display())))?;
        let cfg = Self::parse(text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })?;
        cfg.validate()?;
        Ok((cfg, bytes))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serialises")
    }

    pub fn validate(&self) -> Result<()> {
        self.pulse_spec().validate()?;
        self.domain()?;
        self.snr_grid()?;
        self.partition_mode()?;
        if self.sim.trials == 0 {
            return Err(Error::Config("sim.trials must be positive".into()));
        }
        if self.mvn.n_points < 24 {
            return Err(Error::Config("mvn.n_points must be at least 24".into()));
        }
        self.curve_labels_checked()?;
        Ok(())
    }

    pub fn pulse_spec(&self) -> PulseSpec {
        PulseSpec { es: self.pulse.es, ..PulseSpec::new(self.pulse.tw_ns * 1e-9, self.pulse.fc_ghz * 1e9) }
    }

    pub fn domain(&self) -> Result<Domain> {
        let d = &self.domain;
        Domain::new(d.theta1_ns * 1e-9, d.theta2_ns * 1e-9, d.theta0_ns * 1e-9)
    }

    /// `min_db, min_db + step_db, ..., <= max_db`, rounded to 1e-9 dB so
    /// that accumulated steps print cleanly.
    pub fn snr_grid(&self) -> Result<Vec<f64>> {
        let s = &self.snr;
        if !(s.min_db.is_finite() && s.max_db.is_finite() && s.step_db.is_finite())
            || s.step_db <= 0.0
            || s.max_db < s.min_db
        {
            return Err(Error::Config("empty SNR grid".into()));
        }
        let n = ((s.max_db - s.min_db) / s.step_db + 1e-9).floor() as usize + 1;
        if n > 100_000 {
            return Err(Error::Resource(format!("SNR grid has {n} points")));
        }
        Ok((0..n).map(|k| ((s.min_db + k as f64 * s.step_db) * 1e9).round() / 1e9).collect())
    }

    pub fn partition_mode(&self) -> Result<PartitionMode> {
        match (self.partition.mode, self.partition.n_intervals) {
            (PartitionKind::Extrema, None) => Ok(PartitionMode::Oscillating),
            (PartitionKind::Extrema, Some(_)) => {
                Err(Error::Config("partition.n_intervals only applies to mode = \"uniform\"".into()))
            }
            (PartitionKind::Uniform, Some(n)) if n > 0 => Ok(PartitionMode::NonOscillating { n_intervals: n }),
            (PartitionKind::Uniform, _) => {
                Err(Error::Config("mode = \"uniform\" needs a positive partition.n_intervals".into()))
            }
        }
    }

    pub fn mvn_options(&self) -> MvnOptions {
        MvnOptions { n_points: self.mvn.n_points, seed: self.mvn.seed, ..MvnOptions::default() }
    }

    pub fn alphas(&self) -> Alphas {
        let t = &self.thresholds;
        Alphas { pr: t.alpha_pr, as_: t.alpha_as, am1: t.alpha_am1, am2: t.alpha_am2 }
    }

    fn curve_labels_checked(&self) -> Result<()> {
        if let Some(labels) = &self.outputs.curves {
            if labels.is_empty() {
                return Err(Error::Config("outputs.curves is empty".into()));
            }
            for l in labels {
                if mle_threshold::curves::CurveKind::parse(l).is_none() {
                    return Err(Error::Config(format!("unknown curve label {l:?}")));
                }
            }
        }
        Ok(())
    }
}
