//! The end-to-end workflow: classify, remove explicit identifiers,
//! k-anonymise, perturb the ε-quasi per class, merge and shuffle; plus
//! repeated runs, parameter grids and evaluation of published data.

mod config;
mod report;
mod run;

pub use config::{AlgorithmChoice, ColumnConfig, DeriveConfig, RunConfig, SynthConfig};
pub use report::{AnonymisationReport, PartitionSummary, RecordCounts, RunMeans, RunMetrics};
pub use run::{
    anonymise_partition, evaluate_pair, evaluate_run, grid_prepared, load_published, prepare,
    prepare_dataset, publish, read_linkage, run_grid, run_pipeline, run_prepared, write_grid_csv,
    write_linkage, write_outputs, EvaluationReport, GridRow, Prepared, GRID_HEADER, LINKAGE_FILE,
    PUBLISHED_FILE, REPORT_FILE,
};
