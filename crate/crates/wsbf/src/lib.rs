//! File formats, configuration and subcommands for the `wsbf` binary.

pub mod commands;
pub mod config;
pub mod export;
pub mod ingest;
pub mod parallel;
