//! Experiment configuration, named presets, and the deterministic runner.
//!
//! An experiment is described by a flat `key = value` text (one pair per
//! line, `#` comments allowed). [`parse_config`] handles one text;
//! [`parse_config_layers`] merges several in order — later layers override
//! earlier ones key by key — which is how the CLI stacks
//! `--preset`, `--config`, and `--set`. [`run`] executes a validated
//! [`SimConfig`] and returns [`MetricRecord`] rows that serialize to CSV
//! with a fixed header and fully deterministic bytes for a given seed.

mod catalog;
mod config;
mod runner;

pub use catalog::{experiment_catalog, preset_text};
pub use config::{parse_config, parse_config_layers, parse_scheme, Experiment, SimConfig};
pub use runner::{csv_string, run, write_csv, MetricRecord, CSV_HEADER};
