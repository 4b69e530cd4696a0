//! Parameter sweeps over the three transition families and their output.
//!
//! Grid points are evaluated in parallel and emitted in grid order, so the
//! output depends only on the configuration and seed.

mod config;
mod output;
mod run;

pub use config::{
    parse_config_text, read_config_file, Family, FixedParams, Grid, OutputFormat, SweepConfig,
    DEFAULT_TAU_SPAN,
};
pub use output::{format_sig, round_sig, write_csv, write_json, write_rows, SWEEP_HEADER};
pub use run::{grid_points, run_sweep, GridPoint, SweepRow, SweepRowJson};
