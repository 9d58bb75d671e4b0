use serde::{Deserialize, Serialize};

use crate::dynamics::{EquationKind, MapParams};
use crate::error::{Error, Result};
use crate::flow::sigma::FlowKernel;
use crate::scalar::Real;
use crate::state::{raw_trace_distance, StatePair};

/// Minimum number of grid points of a flow report.
pub const MIN_GRID_POINTS: usize = 100;

/// How intervals of growing distance are detected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SigmaMethod {
    /// Sign of the closed-form rate, with interval ends refined by bisection.
    AnalyticSigma,
    /// Increments of the sampled distance path.
    FiniteDifferenceSigma,
}

impl SigmaMethod {
    pub fn tag(self) -> &'static str {
        match self {
            SigmaMethod::AnalyticSigma => "analytic-sigma",
            SigmaMethod::FiniteDifferenceSigma => "finite-difference-sigma",
        }
    }
}

/// A maximal time interval on which the distance grows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowInterval<T> {
    pub start: T,
    pub end: T,
    /// `D(end) - D(start)`.
    pub gain: T,
}

/// Trace-distance trajectory of a pair and its information backflow.
///
/// Times in `grid` are dimensionless (`tau = gamma t`); rates in
/// `sigma_path` are in physical inverse time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowReport<T> {
    pub pair: StatePair<T>,
    pub grid: Vec<T>,
    pub distance_path: Vec<T>,
    pub sigma_path: Vec<T>,
    /// Central differences of `distance_path`, same units as `sigma_path`.
    pub sigma_discrete: Vec<T>,
    pub positive_intervals: Vec<FlowInterval<T>>,
    pub total_gain: T,
    /// Largest `|sigma_path - sigma_discrete|` over stencils on which the
    /// distance is smooth.
    pub sigma_discrepancy: T,
    pub method: SigmaMethod,
}

impl<T: Real> FlowReport<T> {
    pub fn is_monotone(&self) -> bool {
        self.distance_path.windows(2).all(|w| w[1] <= w[0])
    }
}

/// Flow report with the analytic rate.
pub fn flow_report<T: Real>(
    kind: EquationKind,
    p: &MapParams<T>,
    pair: &StatePair<T>,
    tau_end: T,
    grid_points: usize,
) -> Result<FlowReport<T>> {
    flow_report_with(kind, p, pair, tau_end, grid_points, SigmaMethod::AnalyticSigma)
}

pub fn flow_report_with<T: Real>(
    kind: EquationKind,
    p: &MapParams<T>,
    pair: &StatePair<T>,
    tau_end: T,
    grid_points: usize,
    method: SigmaMethod,
) -> Result<FlowReport<T>> {
    if grid_points < MIN_GRID_POINTS {
        return Err(Error::InvalidArgument(format!(
            "flow report needs at least {MIN_GRID_POINTS} grid points, got {grid_points}"
        )));
    }
    if !(tau_end.is_finite() && tau_end > T::zero()) {
        return Err(Error::InvalidTime(tau_end.as_f64()));
    }
    let kernel = FlowKernel::new(kind, p);
    let last = T::from_usize_lossy(grid_points - 1);
    let grid: Vec<T> = (0..grid_points)
        .map(|i| tau_end * T::from_usize_lossy(i) / last)
        .collect();

    // Distance through the full map action; the translation enters each
    // state and cancels only in the difference.
    let dist_at = |tau: T| {
        let snap = kernel.source.at(tau);
        raw_trace_distance(&snap.apply(&pair.first).state, &snap.apply(&pair.second).state)
    };
    let a0 = pair.a0();
    let pop = a0 * a0;
    let coh = pair.b0().norm_sqr();
    let sigma_at = |tau: T| kernel.sample(pop, coh, &kernel.profiles(tau)).sigma;

    let distance_path: Vec<T> = grid.iter().map(|&t| dist_at(t)).collect();
    let sigma_path: Vec<T> = if pair.is_degenerate() {
        vec![T::zero(); grid_points]
    } else {
        grid.iter().map(|&t| sigma_at(t)).collect()
    };
    let h = grid[1] - grid[0];
    let gamma = p.gamma();
    let sigma_discrete = discrete_rates(&distance_path, h, gamma);

    // stencils straddling a zero of either profile contain a kink of D
    let signs: Vec<(bool, bool)> = grid
        .iter()
        .map(|&t| {
            let pr = kernel.profiles(t);
            (pr[0] >= T::zero(), pr[2] >= T::zero())
        })
        .collect();
    let mut discrepancy = T::zero();
    for i in 1..grid_points - 1 {
        if signs[i - 1] == signs[i] && signs[i] == signs[i + 1] {
            discrepancy = discrepancy.max((sigma_path[i] - sigma_discrete[i]).abs());
        }
    }

    let positive_intervals = if pair.is_degenerate() {
        Vec::new()
    } else {
        match method {
            SigmaMethod::AnalyticSigma => analytic_intervals(&grid, &sigma_path, &sigma_at, &dist_at),
            SigmaMethod::FiniteDifferenceSigma => discrete_intervals(&grid, &distance_path),
        }
    };
    let total_gain = positive_intervals.iter().fold(T::zero(), |acc, iv| acc + iv.gain);

    Ok(FlowReport {
        pair: *pair,
        grid,
        distance_path,
        sigma_path,
        sigma_discrete,
        positive_intervals,
        total_gain,
        sigma_discrepancy: discrepancy,
        method,
    })
}

pub(crate) fn discrete_rates<T: Real>(d: &[T], h: T, gamma: T) -> Vec<T> {
    let n = d.len();
    let mut out = vec![T::zero(); n];
    if n < 3 {
        return out;
    }
    let two = T::lit(2.0);
    out[0] = gamma * (-T::lit(3.0) * d[0] + T::lit(4.0) * d[1] - d[2]) / (two * h);
    out[n - 1] = gamma * (T::lit(3.0) * d[n - 1] - T::lit(4.0) * d[n - 2] + d[n - 3]) / (two * h);
    for i in 1..n - 1 {
        out[i] = gamma * (d[i + 1] - d[i - 1]) / (two * h);
    }
    out
}

/// Maximal runs of `sigma > 0`, with the ends located by bisection on the
/// rate and the gain taken as the exact distance difference.
pub(crate) fn analytic_intervals<T, S, D>(grid: &[T], sigma: &[T], sigma_at: &S, dist_at: &D) -> Vec<FlowInterval<T>>
where
    T: Real,
    S: Fn(T) -> T,
    D: Fn(T) -> T,
{
    let n = grid.len();
    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        if sigma[i] > T::zero() {
            let first = i;
            while i + 1 < n && sigma[i + 1] > T::zero() {
                i += 1;
            }
            let last = i;
            let start = if first == 0 {
                grid[0]
            } else {
                bisect_sign_change(sigma_at, grid[first - 1], grid[first])
            };
            let end = if last == n - 1 {
                grid[n - 1]
            } else {
                bisect_sign_change(sigma_at, grid[last], grid[last + 1])
            };
            let gain = (dist_at(end) - dist_at(start)).max(T::zero());
            out.push(FlowInterval { start, end, gain });
        }
        i += 1;
    }
    out
}

/// Maximal runs of increasing samples; the gain telescopes exactly.
pub(crate) fn discrete_intervals<T: Real>(grid: &[T], d: &[T]) -> Vec<FlowInterval<T>> {
    let mut out = Vec::new();
    let mut i = 0;
    while i + 1 < d.len() {
        if d[i + 1] > d[i] {
            let first = i;
            while i + 1 < d.len() && d[i + 1] > d[i] {
                i += 1;
            }
            out.push(FlowInterval {
                start: grid[first],
                end: grid[i],
                gain: d[i] - d[first],
            });
        } else {
            i += 1;
        }
    }
    out
}

/// Point where `f` changes sign in `[lo, hi]`, to near machine resolution.
fn bisect_sign_change<T: Real, F: Fn(T) -> T>(f: &F, mut lo: T, mut hi: T) -> T {
    let lo_pos = f(lo) > T::zero();
    for _ in 0..200 {
        let mid = (lo + hi) / T::lit(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        if (f(mid) > T::zero()) == lo_pos {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // return the endpoint lying inside the positive run
    if lo_pos {
        lo
    } else {
        hi
    }
}
