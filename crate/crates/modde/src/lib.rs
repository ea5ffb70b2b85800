//! Host-side companion to `modde-core`: parallel sweeps, result files,
//! statistical analysis and the `modde` command line.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod io;
pub mod sweep;

pub use error::{Error, Result};
pub use modde_core;
