//! File formats, command line and thread-parallel drivers for
//! [`torus_trees_core`].

pub mod cli;
pub mod error;
pub mod graph_file;
pub mod lattice_spec;
pub mod parallel;
pub mod table;

pub use error::{AppError, Result};
