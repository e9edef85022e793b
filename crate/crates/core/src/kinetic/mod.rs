//! Kinetic indicators `chi(x, xi)` and the checks built on them.

pub mod averaging;
pub mod chi;
pub mod entropy;
pub mod ordering;
pub mod reduce;
pub mod residual;
pub mod trace;

pub use averaging::{averaging_reconstruct, Averaging, AveragingSummary};
pub use chi::{chi, ChiField};
pub use entropy::{entropy_residual_2d, EntropyReport};
pub use ordering::{ordering_check, OrderingParams, OrderingReport};
pub use reduce::{
    curl_symmetry_check, dimensional_reduce, stream_form_check, CurlSymmetryReport, Reduction,
    ReductionLabel, StreamFormReport,
};
pub use residual::{
    calibrate, kinetic_residual, kinetic_residual_2d, kinetic_residual_calibrated, tangent_set,
    weak_kinetic_residual, weak_kinetic_residual_calibrated, Calibration, ResidualEntry,
    ResidualReport,
};
pub use trace::{characteristic_trace, trace_on_segment, Characteristic, TraceField};
