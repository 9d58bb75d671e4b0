//! Closed-form dynamical maps of the two memory-kernel equations.

pub mod map;
pub mod params;
pub mod profile;

pub use map::{apply, snapshot, tcl_rates, MapImage, MapSnapshot, SnapshotSource, TclRates};
pub use params::{EquationKind, MapParams};
pub use profile::{xi, xi_derivative, Branch, DecayProfile};
