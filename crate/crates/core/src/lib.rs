//! Memory-kernel master equations for a two-level system coupled to a
//! thermal bath.
//!
//! Two phenomenological equations with an exponential memory kernel are
//! covered: the memory-kernel equation `rho' = int k(t') L rho(t - t') dt'`
//! and its post-Markovian variant with `k(t') exp(L t')` under the integral.
//! Both admit closed-form dynamical maps ([`dynamics`]), which are checked
//! against direct numerical integration ([`oracle`]), analysed for
//! positivity, complete positivity and divisibility ([`analysis`]), and fed
//! into the trace-distance backflow measure ([`flow`]).
//!
//! Time is measured in units of the inverse kernel rate, `tau = gamma t`;
//! everything depends on the ratio `R = gamma0 (2N + 1) / gamma` and the
//! bath occupation `N`.
//!
//! All numerics are generic over [`Real`] (`f32` or `f64`); the aliases at
//! the crate root fix the scalar to one of them.
//!
//! ```
//! use memflow::{flow, EquationKind, MapParamsF64};
//!
//! let p = MapParamsF64::from_ratio(0.2, 1.0).unwrap();
//! let m = flow::measure(EquationKind::MemoryKernel, &p, 20.0, 200).unwrap();
//! assert_eq!(m.value, 0.0);
//! ```

pub mod analysis;
pub mod dynamics;
pub mod error;
pub mod flow;
pub mod oracle;
pub mod scalar;
pub mod state;

pub use dynamics::{snapshot, tcl_rates, xi, xi_derivative, EquationKind, MapParams, MapSnapshot, TclRates};
pub use error::{Error, Result};
pub use scalar::Real;
pub use state::{bloch_of, trace_distance, validate_state, QubitState, StatePair};

pub type QubitStateF64 = QubitState<f64>;
pub type QubitStateF32 = QubitState<f32>;
pub type StatePairF64 = StatePair<f64>;
pub type StatePairF32 = StatePair<f32>;
pub type MapParamsF64 = MapParams<f64>;
pub type MapParamsF32 = MapParams<f32>;
pub type MapSnapshotF64 = MapSnapshot<f64>;
pub type MapSnapshotF32 = MapSnapshot<f32>;
pub type TclRatesF64 = TclRates<f64>;
pub type FlowReportF64 = flow::FlowReport<f64>;
pub type MeasureResultF64 = flow::MeasureResult<f64>;
pub type RegimeReportF64 = analysis::RegimeReport<f64>;
pub type TrajectoryF64 = oracle::AugmentedTrajectory<f64>;
