//! Two-time intermediate maps `Phi(t2, t1) = Phi(t2) Phi(t1)^-1` and the
//! search for a non-CP one.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::choi::choi_of;
use crate::dynamics::{EquationKind, MapParams, MapSnapshot, SnapshotSource};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Affine Bloch map propagating from `tau1` to `tau2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntermediateMap<T> {
    pub tau1: T,
    pub tau2: T,
    pub lambda1_int: T,
    pub lambda3_int: T,
    pub t3_int: T,
}

impl<T: Real> IntermediateMap<T> {
    /// Composes `later` after the inverse of `earlier`.
    pub fn between(earlier: &MapSnapshot<T>, later: &MapSnapshot<T>, tau1: T, tau2: T) -> Result<Self> {
        if earlier.lambda1 == T::zero() {
            return Err(Error::NonInvertible {
                component: "lambda1",
                tau: tau1.as_f64(),
            });
        }
        if earlier.lambda3 == T::zero() {
            return Err(Error::NonInvertible {
                component: "lambda3",
                tau: tau1.as_f64(),
            });
        }
        let l1 = later.lambda1 / earlier.lambda1;
        let l3 = later.lambda3 / earlier.lambda3;
        Ok(Self {
            tau1,
            tau2,
            lambda1_int: l1,
            lambda3_int: l3,
            t3_int: later.t3 - l3 * earlier.t3,
        })
    }

    pub fn as_snapshot(&self) -> MapSnapshot<T> {
        MapSnapshot::new(self.lambda1_int, self.lambda3_int, self.t3_int)
    }

    pub fn min_choi_eigenvalue(&self) -> T {
        choi_of(&self.as_snapshot()).eigenvalues()[0]
    }
}

/// The intermediate map of `kind` between dimensionless times
/// `0 <= tau1 <= tau2`.
pub fn intermediate_map<T: Real>(
    kind: EquationKind,
    p: &MapParams<T>,
    tau1: T,
    tau2: T,
) -> Result<IntermediateMap<T>> {
    if !(tau1.is_finite() && tau1 >= T::zero()) {
        return Err(Error::InvalidTime(tau1.as_f64()));
    }
    if !(tau2.is_finite() && tau2 >= tau1) {
        return Err(Error::InvalidArgument(format!(
            "intermediate map needs tau2 >= tau1, got tau1 = {tau1}, tau2 = {tau2}"
        )));
    }
    let src = SnapshotSource::new(kind, p);
    IntermediateMap::between(&src.at(tau1), &src.at(tau2), tau1, tau2)
}

/// Result of a divisibility scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DivisibilityReport<T> {
    /// Most negative Choi eigenvalue found over all intermediate maps.
    pub min_eigenvalue: T,
    pub tau1: T,
    pub tau2: T,
    /// True iff `min_eigenvalue >= -tol`.
    pub divisible: bool,
    pub evaluated: usize,
    /// Grid cells skipped because the earlier map was not invertible.
    pub skipped: usize,
}

/// Scans intermediate maps on a uniform `grid x grid` lattice over
/// `[0, tau_end]^2` (upper triangle), then refines around the most negative
/// Choi eigenvalue by pattern search.
pub fn divisibility_scan<T: Real>(
    kind: EquationKind,
    p: &MapParams<T>,
    tau_end: T,
    grid: usize,
    tol: T,
) -> Result<DivisibilityReport<T>> {
    if grid < 2 {
        return Err(Error::InvalidArgument("divisibility grid needs at least 2 points".into()));
    }
    if !(tau_end.is_finite() && tau_end > T::zero()) {
        return Err(Error::InvalidTime(tau_end.as_f64()));
    }
    let src = SnapshotSource::new(kind, p);
    let h = tau_end / T::from_usize_lossy(grid - 1);
    let taus: Vec<T> = (0..grid).map(|i| h * T::from_usize_lossy(i)).collect();
    let snaps: Vec<MapSnapshot<T>> = taus.iter().map(|&t| src.at(t)).collect();

    let rows: Vec<(T, usize, usize, usize, usize)> = (0..grid - 1)
        .into_par_iter()
        .map(|i| {
            let mut best = (T::infinity(), i, i + 1, 0usize, 0usize);
            for j in i + 1..grid {
                match IntermediateMap::between(&snaps[i], &snaps[j], taus[i], taus[j]) {
                    Ok(m) => {
                        let e = m.min_choi_eigenvalue();
                        best.3 += 1;
                        if e < best.0 {
                            best.0 = e;
                            best.1 = i;
                            best.2 = j;
                        }
                    }
                    Err(_) => best.4 += 1,
                }
            }
            best
        })
        .collect();

    let mut min = T::infinity();
    let (mut bi, mut bj) = (0, 1);
    let (mut evaluated, mut skipped) = (0, 0);
    for (e, i, j, n, s) in rows {
        evaluated += n;
        skipped += s;
        if e < min {
            min = e;
            bi = i;
            bj = j;
        }
    }
    let (mut t1, mut t2) = (taus[bi], taus[bj]);

    let eval = |a: T, b: T| -> Option<T> {
        if !(a >= T::zero() && b > a && b <= tau_end) {
            return None;
        }
        IntermediateMap::between(&src.at(a), &src.at(b), a, b)
            .ok()
            .map(|m| m.min_choi_eigenvalue())
    };
    let mut step = h / T::lit(2.0);
    while step > h * T::lit(1e-6) {
        let mut moved = false;
        for (da, db) in [(step, T::zero()), (-step, T::zero()), (T::zero(), step), (T::zero(), -step)] {
            if let Some(e) = eval(t1 + da, t2 + db) {
                evaluated += 1;
                if e < min {
                    min = e;
                    t1 += da;
                    t2 += db;
                    moved = true;
                }
            }
        }
        if !moved {
            step /= T::lit(2.0);
        }
    }

    Ok(DivisibilityReport {
        min_eigenvalue: min,
        tau1: t1,
        tau2: t2,
        divisible: min >= -tol,
        evaluated,
        skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(r: f64, n: f64) -> MapParams<f64> {
        MapParams::from_ratio(r, n).unwrap()
    }

    #[test]
    fn from_origin_is_the_snapshot() {
        for kind in EquationKind::ALL {
            let p = params(0.2, 1.0);
            let m = intermediate_map(kind, &p, 0.0, 3.0).unwrap();
            let s = crate::dynamics::snapshot(kind, &p, 3.0).unwrap();
            assert_eq!(m.as_snapshot(), s);
        }
    }

    #[test]
    fn coincident_times_give_identity() {
        let m = intermediate_map(EquationKind::MemoryKernel, &params(0.2, 1.0), 4.0, 4.0).unwrap();
        let id = MapSnapshot::<f64>::identity();
        assert!((m.lambda1_int - id.lambda1).abs() < 1e-12);
        assert!((m.lambda3_int - id.lambda3).abs() < 1e-12);
        assert!(m.t3_int.abs() < 1e-12);
    }

    #[test]
    fn composition_reproduces_later_map() {
        let p = params(0.15, 2.0);
        let kind = EquationKind::PostMarkovian;
        let m = intermediate_map(kind, &p, 1.5, 6.0).unwrap();
        let early = crate::dynamics::snapshot(kind, &p, 1.5).unwrap();
        let late = crate::dynamics::snapshot(kind, &p, 6.0).unwrap();
        let r = [0.3, -0.2, 0.5];
        let via = m.as_snapshot().apply_bloch(early.apply_bloch(r));
        let direct = late.apply_bloch(r);
        for k in 0..3 {
            assert!((via[k] - direct[k]).abs() < 1e-14);
        }
    }

    #[test]
    fn non_invertible_earlier_map() {
        let p = params(1.0, 0.0);
        let zero = crate::dynamics::DecayProfile::new(EquationKind::MemoryKernel, 1.0)
            .first_zero()
            .unwrap();
        let src = SnapshotSource::new(EquationKind::MemoryKernel, &p);
        let mut early = src.at(zero);
        early.lambda3 = 0.0;
        let err = IntermediateMap::between(&early, &src.at(zero + 1.0), zero, zero + 1.0).unwrap_err();
        assert!(matches!(err, Error::NonInvertible { component: "lambda3", .. }));
        assert!(intermediate_map(EquationKind::MemoryKernel, &p, 2.0, 1.0).is_err());
    }

    #[test]
    fn memory_kernel_is_not_divisible() {
        let r = divisibility_scan(EquationKind::MemoryKernel, &params(0.2, 1.0), 20.0, 60, 1e-9).unwrap();
        assert!(!r.divisible);
        assert!(r.min_eigenvalue <= -1e-6);
        assert!(r.tau2 > r.tau1);
    }
}
