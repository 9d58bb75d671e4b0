//! Trace-distance flow between pairs of states and the resulting
//! non-Markovianity measure.

pub mod measure;
pub mod report;
pub mod sigma;

pub use measure::{measure, measure_with, tail_certificate, MeasureOptions, MeasureResult, TailCertificate};
pub use report::{flow_report, flow_report_with, FlowInterval, FlowReport, SigmaMethod};
pub use sigma::{sigma_analytic, FlowKernel, FlowSample};
