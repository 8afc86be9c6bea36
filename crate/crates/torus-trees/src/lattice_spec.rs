//! Sublattices from the command line.
//!
//! `"a,b;c,d"` lists the rows of a basis matrix whose columns generate `Λ`;
//! `--diag N` is `diag(N, …, N)`.

use torus_trees_core::Sublattice;

use crate::error::{AppError, Result};

pub fn parse_lattice(spec: &str, d: usize) -> Result<Sublattice> {
    let rows: Vec<Vec<i64>> = spec
        .split(';')
        .map(|row| {
            row.split(',')
                .map(|x| {
                    x.trim()
                        .parse::<i64>()
                        .map_err(|_| AppError::Lattice(format!("`{}` is not an integer", x.trim())))
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    if rows.len() != d || rows.iter().any(|r| r.len() != d) {
        return Err(AppError::Lattice(format!("expected {d} rows of {d} entries in `{spec}`")));
    }
    Sublattice::from_basis(rows).map_err(|e| AppError::Lattice(e.to_string()))
}

pub fn diag_lattice(d: usize, n: i64) -> Result<Sublattice> {
    if n <= 0 {
        return Err(AppError::Lattice(format!("--diag needs a positive integer, got {n}")));
    }
    Sublattice::diagonal(d, n).map_err(|e| AppError::Lattice(e.to_string()))
}
