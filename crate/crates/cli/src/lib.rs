//! Harness around `vtsfd-core`: CSV ingestion, K sweeps over one dataset or
//! a manifest of datasets, verdict reports and SVG charts.

pub mod csv_io;
pub mod error;
pub mod experiment;
pub mod report;
pub mod svg;

pub use csv_io::{load_csv, write_dataset_csv};
pub use error::{exit, HarnessError, Result};
pub use experiment::{
    analyze, artificial_configs, k_range, run_experiment, run_table, Builtin, DataSource, Manifest, RunConfig,
    Settings,
};
pub use report::{ExperimentReport, METRIC_COLUMNS, REPORT_COLUMNS};
pub use svg::{elbow_svg, emit_elbow_svg, emit_visual_tsfd_svg, visual_tsfd_svg};
