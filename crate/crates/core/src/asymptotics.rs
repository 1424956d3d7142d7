//! Curvature and torsion traces on a time grid and their `t → ∞` labels.
//!
//! A trace is classified from its tail window by an affine least-squares fit
//! of the log value against `t`. The slope separates exponential decay and
//! growth; the detrended spread separates a settled limit from a bounded
//! oscillation.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{curvature_profile, CurvatureSample, LogValue};
use crate::linalg::{RealMatrix, SchurFrame, Trajectory};

/// Fewest defined tail points a classification accepts.
pub const MIN_TAIL_POINTS: usize = 16;
/// Largest share of undefined (or of isolated zero) tail points tolerated.
const MAX_GAP_FRACTION: f64 = 0.1;
/// Logs below this are indistinguishable from zero in `f64`.
const LOG_ZERO_FLOOR: f64 = -700.0;
/// Smallest initial-condition magnitude per coordinate.
const R0_FLOOR: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Grid {
    Geometric,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceConfig {
    pub t_start: f64,
    pub t_end: f64,
    pub num_points: usize,
    pub grid: Grid,
    /// Share of the time span, counted back from `t_end`, used for the fit.
    pub fit_window_fraction: f64,
    /// Per unit time, in log units.
    pub slope_tol: f64,
    /// Detrended peak-to-peak spread, in log units.
    pub oscillation_tol: f64,
}

impl Default for TraceConfig {
    fn default() -> Self {
        Self {
            t_start: 1.0,
            t_end: 60.0,
            num_points: 256,
            grid: Grid::Geometric,
            fit_window_fraction: 0.5,
            slope_tol: 0.01,
            oscillation_tol: 0.05,
        }
    }
}

impl TraceConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Precondition(msg));
        if !(self.t_start.is_finite() && self.t_end.is_finite()) {
            return bad("grid bounds must be finite".into());
        }
        if self.t_start < 0.0 || (self.grid == Grid::Geometric && self.t_start <= 0.0) {
            return bad(format!("t_start must be positive, got {}", self.t_start));
        }
        if self.t_start >= self.t_end {
            return bad(format!("need t_start < t_end, got {} >= {}", self.t_start, self.t_end));
        }
        if self.num_points < MIN_TAIL_POINTS {
            return bad(format!("need at least {MIN_TAIL_POINTS} grid points, got {}", self.num_points));
        }
        if !(self.fit_window_fraction > 0.0 && self.fit_window_fraction <= 1.0) {
            return bad(format!("fit window fraction must lie in (0, 1], got {}", self.fit_window_fraction));
        }
        if !(self.slope_tol > 0.0 && self.oscillation_tol > 0.0) {
            return bad("tolerances must be positive".into());
        }
        Ok(())
    }

    /// Grid times, strictly increasing, ending exactly at `t_end`.
    pub fn times(&self) -> Vec<f64> {
        let last = self.num_points - 1;
        let mut t: Vec<f64> = (0..self.num_points)
            .map(|j| {
                let u = j as f64 / last as f64;
                match self.grid {
                    Grid::Linear => self.t_start + u * (self.t_end - self.t_start),
                    Grid::Geometric => self.t_start * (self.t_end / self.t_start).powf(u),
                }
            })
            .collect();
        t[0] = self.t_start;
        t[last] = self.t_end;
        t
    }
}

/// A scalar curvature quantity along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Quantity {
    /// `κ_i`, `i ≥ 1`.
    Kappa(usize),
    Tau,
}

impl Quantity {
    /// Derivative stack order that determines the quantity in dimension `n`.
    pub fn stack_order(&self, n: usize) -> usize {
        match *self {
            Quantity::Kappa(i) => i + 1,
            Quantity::Tau => 3.min(n + 1),
        }
    }

    pub fn extract(&self, sample: &CurvatureSample) -> LogValue {
        match *self {
            Quantity::Kappa(i) => sample.kappa(i),
            Quantity::Tau => sample.log_tau,
        }
    }

    pub fn check(&self, n: usize) -> Result<()> {
        match *self {
            Quantity::Kappa(i) if i == 0 || i + 1 > n => Err(Error::Precondition(format!(
                "kappa_{i} is defined for 1 <= i <= n - 1 = {}",
                n.saturating_sub(1)
            ))),
            _ => Ok(()),
        }
    }

    /// `τ` when `n ≥ 3` followed by `κ_1 … κ_{n−1}`.
    pub fn all_for(n: usize) -> Vec<Quantity> {
        let mut q = Vec::new();
        if n >= 3 {
            q.push(Quantity::Tau);
        }
        q.extend((1..n).map(Quantity::Kappa));
        q
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quantity::Kappa(i) => write!(f, "kappa_{i}"),
            Quantity::Tau => f.write_str("tau"),
        }
    }
}

impl FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        if s == "tau" {
            return Ok(Quantity::Tau);
        }
        s.strip_prefix("kappa_")
            .or_else(|| s.strip_prefix("kappa"))
            .and_then(|i| i.parse::<usize>().ok())
            .filter(|&i| i >= 1)
            .map(Quantity::Kappa)
            .ok_or_else(|| Error::Precondition(format!("unknown quantity `{s}`; use tau or kappa_<i>")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trace {
    pub times: Vec<f64>,
    pub values: Vec<LogValue>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LimitLabel {
    TendsToZero,
    TendsToInfinity,
    TendsToPositiveConst,
    NoLimitBounded,
    Inconclusive,
}

impl fmt::Display for LimitLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Evidence {
    /// Fitted slope of the log value per unit time.
    pub slope: f64,
    /// Peak-to-peak spread of the detrended log values.
    pub oscillation: f64,
    /// Mean log value over the window.
    pub tail_mean_log: f64,
    pub window_start: f64,
    pub tail_points: usize,
    pub undefined_fraction: f64,
    pub zero_fraction: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitClass {
    pub label: LimitLabel,
    /// Estimated limit for `TendsToPositiveConst`.
    pub value: Option<f64>,
    pub evidence: Evidence,
}

/// Profiles along the grid; the grid is cut at the first equilibrium or
/// range failure.
fn sample_profiles(traj: &Trajectory, order: usize, times: &[f64]) -> Result<Vec<CurvatureSample>> {
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        let profile = traj.stack(t, order).and_then(|s| curvature_profile(&s));
        match profile {
            Ok(p) => out.push(p),
            Err(Error::Equilibrium { .. } | Error::Overflow { .. }) => break,
            Err(e) => return Err(e),
        }
    }
    if out.len() < MIN_TAIL_POINTS {
        return Err(Error::InsufficientTrace {
            valid: out.len(),
            required: MIN_TAIL_POINTS,
        });
    }
    Ok(out)
}

/// Full profiles (stack order `n`) at every grid point of `cfg`; `None`
/// where the trajectory sits at equilibrium or leaves the `f64` range.
pub fn profile_grid(a: &RealMatrix, r0: &[f64], cfg: &TraceConfig) -> Result<Vec<(f64, Option<CurvatureSample>)>> {
    cfg.validate()?;
    let traj = Trajectory::new(a, r0)?;
    cfg.times()
        .into_iter()
        .map(|t| match traj.stack(t, a.dim()).and_then(|s| curvature_profile(&s)) {
            Ok(p) => Ok((t, Some(p))),
            Err(Error::Equilibrium { .. } | Error::Overflow { .. }) => Ok((t, None)),
            Err(e) => Err(e),
        })
        .collect()
}

fn trace_of(profiles: &[CurvatureSample], q: Quantity) -> Trace {
    Trace {
        times: profiles.iter().map(|p| p.t).collect(),
        values: profiles.iter().map(|p| q.extract(p)).collect(),
    }
}

/// `log κ_i(t)` or `log τ(t)` along the grid of `cfg`.
pub fn sample_trace(a: &RealMatrix, r0: &[f64], quantity: Quantity, cfg: &TraceConfig) -> Result<Trace> {
    cfg.validate()?;
    quantity.check(a.dim())?;
    let traj = Trajectory::new(a, r0)?;
    let profiles = sample_profiles(&traj, quantity.stack_order(a.dim()), &cfg.times())?;
    Ok(trace_of(&profiles, quantity))
}

fn fit_line(t: &[f64], y: &[f64]) -> (f64, f64) {
    let k = t.len() as f64;
    let tm = t.iter().sum::<f64>() / k;
    let ym = y.iter().sum::<f64>() / k;
    let sxy: f64 = t.iter().zip(y).map(|(t, y)| (t - tm) * (y - ym)).sum();
    let sxx: f64 = t.iter().map(|t| (t - tm).powi(2)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (slope, ym - slope * tm)
}

/// Label the `t → ∞` behaviour of a trace.
///
/// Within the window `[t_last − f·(t_last − t_first), t_last]`:
/// slope below `−slope_tol` or above `slope_tol` gives zero or infinity;
/// otherwise a spread above `oscillation_tol` gives a bounded non-limit, and a
/// trend whose total drift over the window stays within `oscillation_tol`
/// gives a positive constant. Drifts between the two bands are inconclusive.
pub fn classify_limit(trace: &Trace, cfg: &TraceConfig) -> Result<LimitClass> {
    let (Some(&first), Some(&last)) = (trace.times.first(), trace.times.last()) else {
        return Err(Error::InsufficientTrace {
            valid: 0,
            required: MIN_TAIL_POINTS,
        });
    };
    let window_start = last - cfg.fit_window_fraction * (last - first);
    let tail: Vec<(f64, LogValue)> = trace
        .times
        .iter()
        .zip(&trace.values)
        .filter(|(t, _)| **t >= window_start)
        .map(|(t, v)| (*t, *v))
        .collect();
    let total = tail.len();
    let undefined = tail.iter().filter(|(_, v)| !v.is_defined()).count();
    let zeros = tail.iter().filter(|(_, v)| *v == LogValue::Zero).count();
    if total - undefined < MIN_TAIL_POINTS {
        return Err(Error::InsufficientTrace {
            valid: total - undefined,
            required: MIN_TAIL_POINTS,
        });
    }
    let (ts, ys): (Vec<f64>, Vec<f64>) = tail
        .iter()
        .filter_map(|(t, v)| match v {
            LogValue::Log(y) => Some((*t, *y)),
            _ => None,
        })
        .unzip();

    let mut evidence = Evidence {
        slope: f64::NAN,
        oscillation: f64::NAN,
        tail_mean_log: f64::NAN,
        window_start,
        tail_points: total,
        undefined_fraction: undefined as f64 / total as f64,
        zero_fraction: zeros as f64 / total as f64,
    };
    let class = |label, value, evidence| Ok(LimitClass { label, value, evidence });

    if evidence.undefined_fraction > MAX_GAP_FRACTION {
        return class(LimitLabel::Inconclusive, None, evidence);
    }
    if ys.is_empty() {
        return class(LimitLabel::TendsToZero, None, evidence);
    }
    if evidence.zero_fraction > MAX_GAP_FRACTION || ys.len() < MIN_TAIL_POINTS {
        return class(LimitLabel::Inconclusive, None, evidence);
    }

    let (slope, intercept) = fit_line(&ts, &ys);
    let (lo, hi) = ts
        .iter()
        .zip(&ys)
        .map(|(t, y)| y - (intercept + slope * t))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r), hi.max(r)));
    let mean = ys.iter().sum::<f64>() / ys.len() as f64;
    evidence.slope = slope;
    evidence.oscillation = hi - lo;
    evidence.tail_mean_log = mean;
    let span = ts[ts.len() - 1] - ts[0];

    if slope < -cfg.slope_tol {
        class(LimitLabel::TendsToZero, None, evidence)
    } else if slope > cfg.slope_tol {
        class(LimitLabel::TendsToInfinity, None, evidence)
    } else if evidence.oscillation > cfg.oscillation_tol {
        class(LimitLabel::NoLimitBounded, None, evidence)
    } else if slope.abs() * span > cfg.oscillation_tol {
        class(LimitLabel::Inconclusive, None, evidence)
    } else if mean < LOG_ZERO_FLOOR {
        class(LimitLabel::TendsToZero, None, evidence)
    } else {
        class(LimitLabel::TendsToPositiveConst, Some(mean.exp()), evidence)
    }
}

/// Initial condition number `index` for `seed`: each coordinate has
/// magnitude uniform in `[1e-3, 1]` and a random sign. Independent of the
/// order in which indices are drawn.
pub fn sample_initial_condition(seed: u64, index: u64, n: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    (0..n)
        .map(|_| {
            let x = rng.random_range(R0_FLOOR..=1.0);
            if rng.random_bool(0.5) {
                x
            } else {
                -x
            }
        })
        .collect()
}

/// Labels for several quantities from one sampled initial condition.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleOutcome {
    pub r0: Vec<f64>,
    /// Aligned with the requested quantities.
    pub classes: Vec<std::result::Result<LimitClass, Error>>,
}

/// Classify every quantity for `num_samples` seeded initial conditions.
/// Samples run in parallel; results are in sample order.
pub fn classify_samples(
    a: &RealMatrix,
    quantities: &[Quantity],
    cfg: &TraceConfig,
    num_samples: usize,
    seed: u64,
) -> Result<Vec<SampleOutcome>> {
    cfg.validate()?;
    if num_samples == 0 {
        return Err(Error::Precondition("need at least one sample".into()));
    }
    let n = a.dim();
    for q in quantities {
        q.check(n)?;
    }
    let order = quantities.iter().map(|q| q.stack_order(n)).max().unwrap_or(1);
    let frame = Arc::new(SchurFrame::new(a)?);
    let times = cfg.times();
    let outcomes = (0..num_samples as u64)
        .into_par_iter()
        .map(|j| {
            let r0 = sample_initial_condition(seed, j, n);
            let profiles = Trajectory::with_frame(frame.clone(), &r0)
                .and_then(|traj| sample_profiles(&traj, order, &times));
            let classes = quantities
                .iter()
                .map(|&q| match &profiles {
                    Ok(p) => classify_limit(&trace_of(p, q), cfg),
                    Err(e) => Err(e.clone()),
                })
                .collect();
            SampleOutcome { r0, classes }
        })
        .collect();
    Ok(outcomes)
}

/// One label per sampled initial condition for a single quantity.
pub fn classify_over_samples(
    a: &RealMatrix,
    quantity: Quantity,
    cfg: &TraceConfig,
    num_samples: usize,
    seed: u64,
) -> Result<Vec<std::result::Result<LimitClass, Error>>> {
    Ok(classify_samples(a, &[quantity], cfg, num_samples, seed)?
        .into_iter()
        .map(|mut o| o.classes.remove(0))
        .collect())
}
