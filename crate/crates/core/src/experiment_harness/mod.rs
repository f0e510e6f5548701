//! Manifests, resumable sweeps, fits and reports.

pub mod fit;
pub mod lifespan;
pub mod manifest;
pub mod phase;
pub mod report;
pub mod selftest;
pub mod small_data;
pub mod store;
pub mod sweep;

pub use fit::{fit_power_law, PowerLawFit};
pub use lifespan::{
    lifespan_experiment, lifespan_point, summarize_lifespans, LifespanPoint, LifespanResult,
    LifespanSpec,
};
pub use manifest::{ExperimentKind, Resolution, SweepManifest, DEFAULT_EPS};
pub use phase::{classify_cell, phase_diagram, CellClass, PhaseCell, PhaseSettings};
pub use report::{emit_report, summary_json, write_atomic, write_csv, ReportFiles, SUMMARY_SCHEMA};
pub use store::{ExperimentRecord, RecordStore, Status};
pub use sweep::{enumerate_points, lab_plan, run_point, run_sweep, SweepPoint};
pub use selftest::{run_selftest, CheckOutcome};
pub use small_data::{small_data_experiment, small_data_field, SmallDataResult, SmallDataRun, SmallDataSpec};
