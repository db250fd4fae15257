//! Configured experiments: loading, running sweeps and writing tables.

pub mod config;
pub mod run;
pub mod table;

pub use config::{
    load_config, parse_config, ExperimentSpec, Grid, LoadedConfig, Scenario, TableFormat, PRESET_TABLE_1,
};
pub use run::{provenance_path, provenance_record, run_and_write, run_experiment};
pub use table::{format_number, write_table, Cell, Table};
