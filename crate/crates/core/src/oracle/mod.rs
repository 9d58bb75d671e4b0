//! Numerical integration of the integro-differential equations, used as an
//! independent check on every closed-form result.
//!
//! Three routes are provided: the exponential-kernel reduction to a local
//! ODE system (adaptive Dormand-Prince), direct trapezoidal Volterra
//! quadrature of the memory integral, and the time-local form driven by
//! the closed-form rates.

pub mod augmented;
pub mod generator;
pub mod quadrature;
pub mod rk;
pub mod tcl;
pub mod trajectory;

pub use augmented::{integrate_memory_kernel, integrate_post_markovian};
pub use generator::GeneratorMatrix;
pub use quadrature::integrate_quadrature;
pub use tcl::integrate_tcl;
pub use trajectory::{AugmentedTrajectory, IntegratorStats, TimeGrid};

use crate::dynamics::{EquationKind, MapParams, SnapshotSource};
use crate::error::Result;
use crate::scalar::Real;
use crate::state::QubitState;

/// Adaptive augmented-ODE solution of `kind`.
pub fn integrate_augmented<T: Real>(
    kind: EquationKind,
    p: &MapParams<T>,
    s0: &QubitState<T>,
    grid: &TimeGrid<T>,
    tol: T,
) -> Result<AugmentedTrajectory<T>> {
    let g = GeneratorMatrix::thermal(p);
    match kind {
        EquationKind::MemoryKernel => integrate_memory_kernel(&g, p, s0, grid, tol),
        EquationKind::PostMarkovian => integrate_post_markovian(&g, p, s0, grid, tol),
    }
}

/// Closed-form evolution of `s0` sampled on `grid` (physical time), in the
/// trajectory layout used by the solvers.
pub fn closed_form_trajectory<T: Real>(
    kind: EquationKind,
    p: &MapParams<T>,
    s0: &QubitState<T>,
    grid: &TimeGrid<T>,
) -> AugmentedTrajectory<T> {
    let source = SnapshotSource::new(kind, p);
    let states = grid
        .times()
        .iter()
        .map(|&t| source.at(p.tau_of(t)).apply(s0).state)
        .collect();
    AugmentedTrajectory {
        times: grid.times().to_vec(),
        states,
        aux: Vec::new(),
        stats: IntegratorStats::default(),
    }
}
