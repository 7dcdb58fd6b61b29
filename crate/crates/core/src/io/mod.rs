//! Sweep configuration and plot-ready tables.
//!
//! Every floating-point value written by this module goes through
//! [`format_number`], so tables are byte-stable across runs and machines.

mod config;
mod format;
mod records;

pub use config::{GammaGrid, NGrid, OutputFormat, RawSweepConfig, SweepConfig};
pub use format::{format_number, round_to_printed};
pub use records::{
    read_csv, read_json, write_csv, write_json, Provenance, ResultRecord, SweepDocument,
    TOOL_VERSION,
};
