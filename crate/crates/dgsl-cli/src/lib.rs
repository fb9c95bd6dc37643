//! Command-line frontend for the `dgsl` library: dataset ingestion,
//! configuration merging, experiment orchestration (repeated seeded trials),
//! and emission of results and plot-ready traces.
//!
//! Everything here is deterministic: an experiment is reproducible
//! byte-for-byte from its inputs and base seed, regardless of `--jobs`.

pub mod args;
pub mod commands;
pub mod dataset;
pub mod error;
pub mod experiment;
pub mod output;
