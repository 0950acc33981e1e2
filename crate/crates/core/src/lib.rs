//! Analysis of extremely-low-frequency magnetic-field surveys of laptop surfaces.
//!
//! The pipeline turns tri-axial probe readings into one RMS feature per grid point
//! ([`field`]), partitions each experiment cell with 1-D K-Medians ([`kmedians`]), maps the
//! clusters onto hazard classes against a safety limit ([`hazard`]) and summarises which
//! chassis zones are dangerous. [`sim`] produces synthetic surveys from Biot-Savart wire
//! models for end-to-end checks.
//!
//! [`pipeline`] runs the whole analysis over survey files and produces a versioned JSON
//! report, [`io`] reads and writes surveys, wire models and probe grids, and [`plot`] renders
//! per-laptop and per-cell SVG charts.

pub mod error;
pub mod field;
pub mod hazard;
pub mod io;
pub mod kmedians;
pub mod pipeline;
pub mod plot;
pub mod sim;

pub use error::{Error, Result};
