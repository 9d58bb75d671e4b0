//! Time scans of complete positivity and positivity for one parameter point.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::choi::choi_of;
use crate::analysis::positivity::{PositivityProbe, PositivityVerdict};
use crate::dynamics::{EquationKind, MapParams, SnapshotSource};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Default slack on Choi eigenvalues.
pub const CP_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CpScan<T> {
    pub completely_positive: bool,
    pub min_eigenvalue: T,
    /// Time at which `min_eigenvalue` occurs.
    pub tau: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PositivityScan<T> {
    pub positive: bool,
    pub max_norm: T,
    pub tau: T,
    pub worst: PositivityVerdict<T>,
}

/// `points` equally spaced times on `[0, tau_end]`.
pub fn tau_grid<T: Real>(tau_end: T, points: usize) -> Result<Vec<T>> {
    if !(tau_end.is_finite() && tau_end > T::zero()) {
        return Err(Error::InvalidTime(tau_end.as_f64()));
    }
    if points < 2 {
        return Err(Error::InvalidArgument("time grid needs at least 2 points".into()));
    }
    let last = T::from_usize_lossy(points - 1);
    Ok((0..points)
        .map(|i| tau_end * T::from_usize_lossy(i) / last)
        .collect())
}

/// Smallest Choi eigenvalue of the snapshots at `taus`.
pub fn cp_scan<T: Real>(kind: EquationKind, p: &MapParams<T>, taus: &[T], tol: T) -> CpScan<T> {
    let src = SnapshotSource::new(kind, p);
    let mut worst = (T::infinity(), T::zero());
    for &tau in taus {
        let e = choi_of(&src.at(tau)).eigenvalues()[0];
        if e < worst.0 {
            worst = (e, tau);
        }
    }
    CpScan {
        completely_positive: worst.0 >= -tol,
        min_eigenvalue: worst.0,
        tau: worst.1,
    }
}

impl<T: Real> PositivityScan<T> {
    /// Excited population of the worst pure input.
    pub fn witness_population(&self) -> T {
        self.worst.witness.population_e()
    }
}

/// Largest output Bloch norm of the snapshots at `taus`.
pub fn positivity_scan<T: Real>(
    kind: EquationKind,
    p: &MapParams<T>,
    taus: &[T],
    samples: usize,
) -> Result<PositivityScan<T>> {
    if taus.is_empty() {
        return Err(Error::InvalidArgument("empty time grid".into()));
    }
    let probe = PositivityProbe::new(samples)?;
    let src = SnapshotSource::new(kind, p);
    let verdicts: Vec<PositivityVerdict<T>> = taus.par_iter().map(|&t| probe.check(&src.at(t))).collect();
    let (idx, worst) = verdicts
        .iter()
        .enumerate()
        .fold((0, verdicts[0]), |acc, (i, v)| if v.max_norm > acc.1.max_norm { (i, *v) } else { acc });
    Ok(PositivityScan {
        positive: verdicts.iter().all(|v| v.positive),
        max_norm: worst.max_norm,
        tau: taus[idx],
        worst,
    })
}

/// Smallest occupation `N` in `[0, n_max]` at which the snapshots on `taus`
/// are all CP, located by bisection to `n_tol`.
///
/// `Some(0)` when the map is CP already at zero temperature; `None` when it
/// is not CP even at `n_max`. Assumes CP is monotone in `N`, which the
/// scans support but which is not proven.
pub fn cp_temperature_threshold<T: Real>(
    kind: EquationKind,
    r: T,
    taus: &[T],
    n_max: T,
    n_tol: T,
    tol: T,
) -> Result<Option<T>> {
    let cp_at = |n: T| -> Result<bool> {
        let p = MapParams::from_ratio(r, n)?;
        Ok(cp_scan(kind, &p, taus, tol).completely_positive)
    };
    if cp_at(T::zero())? {
        return Ok(Some(T::zero()));
    }
    if !cp_at(n_max)? {
        return Ok(None);
    }
    let (mut lo, mut hi) = (T::zero(), n_max);
    while hi - lo > n_tol {
        let mid = (lo + hi) / T::lit(2.0);
        if cp_at(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}
