use crate::dynamics::{EquationKind, MapParams, SnapshotSource};
use crate::error::{Error, Result};
use crate::oracle::rk;
use crate::oracle::trajectory::{
    check_tol, state_from_vec, AugmentedTrajectory, IntegratorStats, TimeGrid,
};
use crate::scalar::Real;
use crate::state::QubitState;

/// Integrates the time-local equation with the closed-form rates of `kind`
/// on `grid` (physical time). Fails if either decay profile crosses zero
/// before the end of the grid, where the rates diverge.
pub fn integrate_tcl<T: Real>(
    kind: EquationKind,
    p: &MapParams<T>,
    s0: &QubitState<T>,
    grid: &TimeGrid<T>,
    tol: T,
) -> Result<AugmentedTrajectory<T>> {
    check_tol(tol)?;
    let source = SnapshotSource::new(kind, p);
    if let Some(z) = source.first_singularity() {
        if z <= p.tau_of(grid.end()) {
            return Err(Error::SingularRate { tau: z.as_f64() });
        }
    }
    let y0 = [s0.population_e(), s0.coherence().re, s0.coherence().im];
    let mut failure = None;
    let rhs = |t: T, y: &[T; 3]| {
        let tau = p.tau_of(t).max(T::zero());
        match source.rates(tau) {
            Ok(r) => {
                let (dpe, db) = r.generate(y[0], num_complex::Complex::new(y[1], y[2]));
                [dpe, db.re, db.im]
            }
            Err(e) => {
                failure.get_or_insert(e);
                [T::zero(); 3]
            }
        }
    };
    let (ys, stats) = rk::integrate(rhs, y0, grid.times(), tol)?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(AugmentedTrajectory {
        times: grid.times().to_vec(),
        states: ys.iter().map(|y| state_from_vec(y)).collect(),
        aux: Vec::new(),
        stats: IntegratorStats {
            steps: stats.accepted,
            rejected: stats.rejected,
            max_residual: stats.max_error_ratio,
        },
    })
}
