//! Exponential-kernel equations reduced to local ODE systems.
//!
//! For `k(t) = gamma exp(-gamma t)` the memory integrals obey first-order
//! equations of their own, so both integro-differential equations become
//! ordinary ones in `(rho, aux)` with `aux(0) = 0`:
//!
//! * memory kernel, `n = int_0^t k(t - s) L rho(s) ds`:
//!   `rho' = n`, `n' = gamma L rho - gamma n`;
//! * post-Markovian, `m = int_0^t k(t - s) exp(L (t - s)) rho(s) ds`:
//!   `rho' = L m`, `m' = gamma rho + (L - gamma) m`.

use crate::dynamics::MapParams;
use crate::error::{Error, Result};
use crate::oracle::generator::GeneratorMatrix;
use crate::oracle::rk;
use crate::oracle::trajectory::{
    check_tol, state_from_vec, vec_from_state, AugmentedTrajectory, IntegratorStats, TimeGrid,
};
use crate::scalar::Real;
use crate::state::QubitState;

fn check_grid<T: Real>(grid: &TimeGrid<T>) -> Result<()> {
    if !(grid.end() > T::zero()) {
        return Err(Error::InvalidTime(grid.end().as_f64()));
    }
    Ok(())
}

/// Solves the memory-kernel equation on `grid` (physical time).
pub fn integrate_memory_kernel<T: Real>(
    g: &GeneratorMatrix<T>,
    p: &MapParams<T>,
    s0: &QubitState<T>,
    grid: &TimeGrid<T>,
    tol: T,
) -> Result<AugmentedTrajectory<T>> {
    check_tol(tol)?;
    check_grid(grid)?;
    let gamma = p.gamma();
    let x0 = vec_from_state(s0);
    let y0 = [x0[0], x0[1], x0[2], T::zero(), T::zero(), T::zero()];
    let rhs = |_t: T, y: &[T; 6]| {
        let l = g.apply(&[y[0], y[1], y[2], T::one()]);
        [
            y[3],
            y[4],
            y[5],
            gamma * (l[0] - y[3]),
            gamma * (l[1] - y[4]),
            gamma * (l[2] - y[5]),
        ]
    };
    let (ys, stats) = rk::integrate(rhs, y0, grid.times(), tol)?;
    Ok(AugmentedTrajectory {
        times: grid.times().to_vec(),
        states: ys.iter().map(|y| state_from_vec(y)).collect(),
        aux: ys.iter().map(|y| [y[3], y[4], y[5], T::zero()]).collect(),
        stats: IntegratorStats {
            steps: stats.accepted,
            rejected: stats.rejected,
            max_residual: stats.max_error_ratio,
        },
    })
}

/// Solves the post-Markovian equation on `grid` (physical time).
pub fn integrate_post_markovian<T: Real>(
    g: &GeneratorMatrix<T>,
    p: &MapParams<T>,
    s0: &QubitState<T>,
    grid: &TimeGrid<T>,
    tol: T,
) -> Result<AugmentedTrajectory<T>> {
    check_tol(tol)?;
    check_grid(grid)?;
    let gamma = p.gamma();
    let x0 = vec_from_state(s0);
    let y0 = [x0[0], x0[1], x0[2], T::zero(), T::zero(), T::zero(), T::zero()];
    let rhs = |_t: T, y: &[T; 7]| {
        let lm = g.apply(&[y[3], y[4], y[5], y[6]]);
        [
            lm[0],
            lm[1],
            lm[2],
            gamma * (y[0] - y[3]) + lm[0],
            gamma * (y[1] - y[4]) + lm[1],
            gamma * (y[2] - y[5]) + lm[2],
            gamma * (T::one() - y[6]) + lm[3],
        ]
    };
    let (ys, stats) = rk::integrate(rhs, y0, grid.times(), tol)?;
    Ok(AugmentedTrajectory {
        times: grid.times().to_vec(),
        states: ys.iter().map(|y| state_from_vec(y)).collect(),
        aux: ys.iter().map(|y| [y[3], y[4], y[5], y[6]]).collect(),
        stats: IntegratorStats {
            steps: stats.accepted,
            rejected: stats.rejected,
            max_residual: stats.max_error_ratio,
        },
    })
}
