use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::state::QubitState;

/// Strictly increasing output times starting at zero.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid<T> {
    times: Vec<T>,
}

impl<T: Real> TimeGrid<T> {
    /// `points` equally spaced times on `[0, end]`, both ends included.
    /// `end = 0` yields the single time zero.
    pub fn uniform(end: T, points: usize) -> Result<Self> {
        if !(end.is_finite() && end >= T::zero()) {
            return Err(Error::InvalidTime(end.as_f64()));
        }
        if end == T::zero() {
            return Ok(Self {
                times: vec![T::zero()],
            });
        }
        if points < 2 {
            return Err(Error::InvalidArgument(format!(
                "a time grid needs at least 2 points, got {points}"
            )));
        }
        let last = T::from_usize_lossy(points - 1);
        let mut times: Vec<T> = (0..points)
            .map(|i| end * T::from_usize_lossy(i) / last)
            .collect();
        times[points - 1] = end;
        Ok(Self { times })
    }

    pub fn from_times(times: Vec<T>) -> Result<Self> {
        if times.first() != Some(&T::zero()) {
            return Err(Error::InvalidArgument("time grid must start at 0".into()));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) || times.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidArgument(
                "time grid must be finite and strictly increasing".into(),
            ));
        }
        Ok(Self { times })
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn end(&self) -> T {
        *self.times.last().unwrap()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Integrator bookkeeping attached to a trajectory.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct IntegratorStats {
    pub steps: usize,
    pub rejected: usize,
    /// Adaptive solvers: largest accepted error estimate relative to `tol`.
    /// Quadrature: largest residual of the implicit step equations.
    pub max_residual: f64,
}

/// A solved trajectory of the density matrix together with the memory
/// integral carried as an explicit auxiliary vector.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedTrajectory<T> {
    pub times: Vec<T>,
    pub states: Vec<QubitState<T>>,
    /// Memory integral in the `(pe, Re b, Im b, 1)` representation; zero at
    /// `t = 0`. Empty for the time-local solver, which carries no memory.
    pub aux: Vec<[T; 4]>,
    pub stats: IntegratorStats,
}

impl<T: Real> AugmentedTrajectory<T> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Largest deviation from `other` over the shared times, maximised over
    /// the independent density-matrix elements. Trajectories may sit on
    /// different grids as long as one grid refines the other uniformly.
    pub fn max_deviation(&self, other: &AugmentedTrajectory<T>) -> Result<T> {
        let (fine, coarse) = if self.len() >= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        if coarse.len() < 2 {
            return Ok(element_gap(&fine.states[0], &coarse.states[0]));
        }
        let ratio = (fine.len() - 1) / (coarse.len() - 1);
        if ratio * (coarse.len() - 1) != fine.len() - 1 {
            return Err(Error::InvalidArgument(format!(
                "grids of {} and {} points are not nested",
                fine.len(),
                coarse.len()
            )));
        }
        let mut worst = T::zero();
        for (i, s) in coarse.states.iter().enumerate() {
            let f = &fine.states[i * ratio];
            let tf = fine.times[i * ratio];
            let tc = coarse.times[i];
            if (tf - tc).abs() > T::tol(1e-12) * tc.abs().max(T::one()) {
                return Err(Error::InvalidArgument("grids are not aligned".into()));
            }
            worst = worst.max(element_gap(f, s));
        }
        Ok(worst)
    }
}

pub(crate) fn element_gap<T: Real>(a: &QubitState<T>, b: &QubitState<T>) -> T {
    let dp = (a.population_e() - b.population_e()).abs();
    let db = a.coherence() - b.coherence();
    dp.max(db.re.abs()).max(db.im.abs())
}

pub(crate) fn state_from_vec<T: Real>(x: &[T]) -> QubitState<T> {
    QubitState::raw(x[0], Complex::new(x[1], x[2]))
}

pub(crate) fn vec_from_state<T: Real>(s: &QubitState<T>) -> [T; 4] {
    [s.population_e(), s.coherence().re, s.coherence().im, T::one()]
}

pub(crate) fn check_tol<T: Real>(tol: T) -> Result<()> {
    if !(tol >= T::lit(1e-12) && tol <= T::lit(1e-4)) {
        return Err(Error::InvalidTolerance(tol.as_f64()));
    }
    Ok(())
}
