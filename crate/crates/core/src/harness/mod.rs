//! Named experiments with deterministic configs and machine-readable reports.

mod config;
mod experiments;
mod report;
pub mod sampling;

pub use config::{Experiment, ExperimentConfig};
pub use experiments::{
    eigenvalue_band, fit_line, fit_quasi_geodesic, run_experiment, BandCheck, QuasiGeodesicFit,
    RayFit, BAND_SLACK, FIT_RESIDUAL,
};
pub use report::{
    emit_report, parse_report, summary_path, ExperimentReport, Relation, Series, Verdict,
};
