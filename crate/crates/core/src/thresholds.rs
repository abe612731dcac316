//! Threshold SNRs read off an MSE-versus-SNR curve.
//!
//! * `rho_pr`: the curve drops to `alpha_pr` times the a priori MSE;
//! * `rho_as`: the curve settles within `alpha_as` times the CRLB;
//! * `rho_am1`, `rho_am2` (oscillating signals only): the curve crosses
//!   `alpha_am1` and `alpha_am2` times the envelope CRLB.
//!
//! Crossings are located between grid points by interpolating
//! `ln(e / target)` linearly in dB. The first downward crossing is used for
//! `rho_pr` and `rho_am1`, the last for `rho_as` and `rho_am2`.

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Alphas {
    pub pr: f64,
    pub as_: f64,
    pub am1: f64,
    pub am2: f64,
}

impl Default for Alphas {
    fn default() -> Self {
        Self { pr: 0.5, as_: 1.1, am1: 2.0, am2: 0.5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub rho_pr_db: f64,
    pub rho_as_db: f64,
    pub rho_am1_db: Option<f64>,
    pub rho_am2_db: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Crossing {
    First,
    Last,
}

/// Location (dB) where `e` falls from above `target` to at or below it.
/// A curve already at or below the target at the first grid point crosses
/// there.
pub fn find_crossing(rho_db: &[f64], e: &[f64], target: &[f64], which: Crossing) -> Option<f64> {
    let n = rho_db.len();
    if n == 0 || e.len() != n || target.len() != n {
        return None;
    }
    let above = |k: usize| e[k] > target[k];
    let k = match which {
        Crossing::First => {
            if !above(0) {
                return Some(rho_db[0]);
            }
            (0..n - 1).find(|&k| above(k) && !above(k + 1))?
        }
        Crossing::Last => match (0..n).rev().find(|&k| above(k)) {
            None => return Some(rho_db[0]),
            Some(k) if k == n - 1 => return None,
            Some(k) => k,
        },
    };
    let f0 = (e[k] / target[k]).ln();
    let f1 = (e[k + 1] / target[k + 1]).ln();
    let t = if f0 - f1 > 0.0 { f0 / (f0 - f1) } else { 1.0 };
    Some(rho_db[k] + t.clamp(0.0, 1.0) * (rho_db[k + 1] - rho_db[k]))
}

fn median3(e: &[f64]) -> Vec<f64> {
    let mut out = e.to_vec();
    for k in 1..e.len().saturating_sub(1) {
        let mut w = [e[k - 1], e[k], e[k + 1]];
        w.sort_by(f64::total_cmp);
        out[k] = w[1];
    }
    out
}

/// Extracts all thresholds. `c` is the CRLB on the same grid, `c_e` the
/// envelope CRLB for oscillating signals (omit for baseband), `e_u` the a
/// priori MSE.
pub fn extract_thresholds(
    rho_db: &[f64],
    e: &[f64],
    c: &[f64],
    c_e: Option<&[f64]>,
    e_u: f64,
    alphas: &Alphas,
    median_filter: bool,
) -> Result<Thresholds> {
    let n = rho_db.len();
    if n < 2 || e.len() != n || c.len() != n || c_e.is_some_and(|v| v.len() != n) {
        return Err(Error::Config("threshold extraction needs matching curves of length >= 2".into()));
    }
    if rho_db.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config("SNR grid must be strictly increasing".into()));
    }
    let e = if median_filter { median3(e) } else { e.to_vec() };
    if !(e[0] > 0.9 * alphas.pr * e_u) {
        return Err(Error::Range {
            name: "rho_pr",
            reason: "curve starts below the a priori level at the lowest SNR".into(),
        });
    }
    if !(e[n - 1] < 1.5 * alphas.as_ * c[n - 1]) {
        return Err(Error::Range {
            name: "rho_as",
            reason: "curve has not reached the CRLB at the highest SNR".into(),
        });
    }
    let scaled = |v: &[f64], a: f64| v.iter().map(|x| a * x).collect::<Vec<_>>();
    let missing = |name: &'static str| Error::Range { name, reason: "no downward crossing".into() };
    let pr = find_crossing(rho_db, &e, &vec![alphas.pr * e_u; n], Crossing::First).ok_or(missing("rho_pr"))?;
    let as_ = find_crossing(rho_db, &e, &scaled(c, alphas.as_), Crossing::Last).ok_or(missing("rho_as"))?;
    let (am1, am2) = match c_e {
        Some(ce) => (
            Some(find_crossing(rho_db, &e, &scaled(ce, alphas.am1), Crossing::First).ok_or(missing("rho_am1"))?),
            Some(find_crossing(rho_db, &e, &scaled(ce, alphas.am2), Crossing::Last).ok_or(missing("rho_am2"))?),
        ),
        None => (None, None),
    };
    Ok(Thresholds { rho_pr_db: pr, rho_as_db: as_, rho_am1_db: am1, rho_am2_db: am2 })
}
