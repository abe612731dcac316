use crate::signal::AcrModel;
use crate::{Domain, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartitionMode {
    /// Testpoints at the local maxima of `R(theta - theta0)`, boundaries at
    /// the local minima.
    Oscillating,
    /// `n_intervals` equal-width intervals with midpoint testpoints.
    NonOscillating { n_intervals: usize },
}

/// Partition of the domain into intervals `[d_n, d_{n+1})`, each with one
/// testpoint. Interval indices are stored left to right; the signed index
/// `n` used in formulas is `i - center`.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    pub mode: PartitionMode,
    pub boundaries: Vec<f64>,
    pub testpoints: Vec<f64>,
    /// Storage index of the interval containing `theta0`.
    pub center: usize,
    /// Intervals whose outer boundary was clipped to the domain edge.
    pub edge: Vec<bool>,
    /// Requested interval count if it had to be changed (even counts are
    /// bumped to the next odd number).
    pub adjusted_from: Option<usize>,
}

impl Partition {
    pub fn len(&self) -> usize {
        self.testpoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.testpoints.is_empty()
    }

    pub fn width(&self, i: usize) -> f64 {
        self.boundaries[i + 1] - self.boundaries[i]
    }

    /// Signed interval index relative to the centre interval.
    pub fn signed_index(&self, i: usize) -> i64 {
        i as i64 - self.center as i64
    }

    /// Storage index for a signed index, if present.
    pub fn storage_index(&self, n: i64) -> Option<usize> {
        let i = n + self.center as i64;
        (i >= 0 && (i as usize) < self.len()).then_some(i as usize)
    }

    /// Interval containing `theta`; the last interval is closed on the right.
    pub fn interval_of(&self, theta: f64) -> Option<usize> {
        let n = self.len();
        if theta < self.boundaries[0] || theta > self.boundaries[n] {
            return None;
        }
        let i = self.boundaries.partition_point(|&d| d <= theta);
        Some(i.saturating_sub(1).min(n - 1))
    }

    /// Nearest testpoint to the right of the centre (or to the left if the
    /// centre interval is the last one).
    pub fn neighbour_of_center(&self) -> Option<usize> {
        if self.center + 1 < self.len() {
            Some(self.center + 1)
        } else if self.center > 0 {
            Some(self.center - 1)
        } else {
            None
        }
    }
}

pub fn partition(model: &AcrModel, domain: &Domain, mode: PartitionMode) -> Result<Partition> {
    match mode {
        PartitionMode::NonOscillating { n_intervals } => uniform(domain, n_intervals),
        PartitionMode::Oscillating => oscillating(model, domain),
    }
}

fn uniform(domain: &Domain, requested: usize) -> Result<Partition> {
    if requested == 0 {
        return Err(Error::Config("partition needs at least one interval".into()));
    }
    let n = if requested % 2 == 0 { requested + 1 } else { requested };
    let w = domain.width() / n as f64;
    let mut boundaries: Vec<f64> = (0..=n).map(|i| domain.theta1 + i as f64 * w).collect();
    boundaries[n] = domain.theta2;
    let mut testpoints: Vec<f64> = (0..n).map(|i| 0.5 * (boundaries[i] + boundaries[i + 1])).collect();
    let mut p = Partition {
        mode: PartitionMode::NonOscillating { n_intervals: n },
        boundaries,
        testpoints: Vec::new(),
        center: 0,
        edge: (0..n).map(|i| i == 0 || i == n - 1).collect(),
        adjusted_from: (n != requested).then_some(requested),
    };
    p.testpoints = std::mem::take(&mut testpoints);
    let c = p.interval_of(domain.theta0).expect("theta0 inside domain");
    p.testpoints[c] = domain.theta0;
    p.center = c;
    Ok(p)
}

fn oscillating(model: &AcrModel, domain: &Domain) -> Result<Partition> {
    if !model.is_oscillating() {
        return Err(Error::Partition("oscillating partition needs a carrier-modulated signal".into()));
    }
    let h = (1.0 / (50.0 * model.carrier())).min(model.width_scale() / 400.0);
    let n = (domain.width() / h).ceil() as usize + 1;
    if n > 1 << 24 {
        return Err(Error::Resource(format!("extremum scan needs {n} points")));
    }
    let h = domain.width() / (n - 1) as f64;
    let g: Vec<f64> = (0..n)
        .map(|k| model.r(domain.theta1 + k as f64 * h - domain.theta0))
        .collect();
    let vertex = |k: usize| {
        let (a, b, c) = (g[k - 1], g[k], g[k + 1]);
        let den = a - 2.0 * b + c;
        let off = if den != 0.0 { 0.5 * (a - c) / den } else { 0.0 };
        domain.theta1 + (k as f64 + off.clamp(-0.5, 0.5)) * h
    };
    let mut maxima = Vec::new();
    let mut minima = Vec::new();
    for k in 1..n - 1 {
        if g[k] > g[k - 1] && g[k] >= g[k + 1] {
            maxima.push(vertex(k));
        } else if g[k] < g[k - 1] && g[k] <= g[k + 1] {
            minima.push(vertex(k));
        }
    }
    // The global maximum sits exactly at theta0.
    if let Some((i, _)) = maxima
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - domain.theta0).abs().total_cmp(&(b.1 - domain.theta0).abs()))
    {
        if (maxima[i] - domain.theta0).abs() < 2.0 * h {
            maxima[i] = domain.theta0;
        } else {
            maxima.push(domain.theta0);
        }
    } else {
        maxima.push(domain.theta0);
    }
    maxima.sort_by(f64::total_cmp);
    if maxima.len() < 2 {
        return Err(Error::Partition("no local maxima besides the true delay".into()));
    }

    let mut boundaries = vec![domain.theta1];
    boundaries.extend(minima.iter().copied().filter(|&d| d > domain.theta1 && d < domain.theta2));
    boundaries.push(domain.theta2);
    // Drop boundaries that would leave an edge piece without a maximum.
    while boundaries.len() > 2 && !maxima.iter().any(|&m| m >= boundaries[0] && m < boundaries[1]) {
        boundaries.remove(1);
    }
    while boundaries.len() > 2 {
        let k = boundaries.len();
        if maxima.iter().any(|&m| m > boundaries[k - 2] && m <= boundaries[k - 1]) {
            break;
        }
        boundaries.remove(k - 2);
    }
    let n_int = boundaries.len() - 1;
    let mut testpoints = Vec::with_capacity(n_int);
    for i in 0..n_int {
        let inside: Vec<f64> = maxima
            .iter()
            .copied()
            .filter(|&m| m >= boundaries[i] && (m < boundaries[i + 1] || (i == n_int - 1 && m <= boundaries[i + 1])))
            .collect();
        match inside.as_slice() {
            [m] => testpoints.push(*m),
            [] => return Err(Error::Partition(format!("interval {i} contains no local maximum"))),
            _ => {
                return Err(Error::Partition(format!(
                    "interval {i} contains {} local maxima",
                    inside.len()
                )))
            }
        }
    }
    let center = testpoints
        .iter()
        .position(|&t| t == domain.theta0)
        .expect("theta0 is a testpoint");
    Ok(Partition {
        mode: PartitionMode::Oscillating,
        edge: (0..n_int).map(|i| i == 0 || i == n_int - 1).collect(),
        boundaries,
        testpoints,
        center,
        adjusted_from: None,
    })
}
