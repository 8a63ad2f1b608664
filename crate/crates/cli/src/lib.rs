//! Filesystem, file formats, and command implementations around the
//! numeric core: PGM video datasets, binary checkpoints, CSV reports,
//! and the `ddsam2` command-line interface.

pub mod checkpoint;
pub mod commands;
pub mod dataset;
pub mod error;
pub mod pgm;
pub mod pool;
pub mod report;

pub use error::CliError;
