//! File formats, tables, configuration and the experiment runner for
//! hierarchical long-range percolation.

pub mod chart;
pub mod config;
pub mod error;
pub mod experiment;
pub mod graph_io;
pub mod tables;

pub use error::{Error, Result};
pub use hierperc_core as core;
