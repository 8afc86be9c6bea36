use std::path::PathBuf;

pub type Result<T, E = AppError> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("graph file: {0}")]
    Graph(String),
    #[error("lattice: {0}")]
    Lattice(String),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] torus_trees_core::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("output: {0}")]
    Output(#[from] std::io::Error),
}
