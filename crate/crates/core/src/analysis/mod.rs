//! Structure of the dynamical maps: Choi matrices, positivity, complete
//! positivity, divisibility and regime classification.

pub mod choi;
pub mod classify;
pub mod divisibility;
pub mod eigen;
pub mod positivity;
pub mod scan;

pub use choi::{choi_of, is_completely_positive, ChoiMatrix, CpVerdict};
pub use classify::{classify, ClassifyOptions, RegimeReport, UnphysicalReason, Verdict};
pub use divisibility::{divisibility_scan, intermediate_map, DivisibilityReport, IntermediateMap};
pub use positivity::{is_positive, PositivityProbe, PositivityVerdict};
pub use scan::{cp_scan, cp_temperature_threshold, positivity_scan, tau_grid, CpScan, PositivityScan, CP_TOL};
