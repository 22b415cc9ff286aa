//! Seeded experiments over sampling strategies, written as CSV.
//!
//! Every CSV starts with `#` metadata lines (version, configuration echo,
//! solver tolerances, soft-check outcomes and a timestamp), followed by an
//! RFC 4180 table whose `record` column tells trial, aggregate and error rows
//! apart.

mod config;
mod experiments;
mod output;

pub use config::{parse_grid, parse_strategies, Experiment, ExperimentConfig};
pub use experiments::{run, run_error_vs_m, run_ode_study, run_recovery_rate};
pub use output::{
    strip_timestamp, write_bound_csv, write_quad_csv, Aggregate, ExperimentOutput, Row,
    TrialRecord, TIMESTAMP_PREFIX, VERSION,
};
