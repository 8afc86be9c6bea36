//! Thread-parallel drivers over the core computations.
//!
//! Work is split into pieces whose results depend only on their position,
//! and results are reduced in a fixed order, so output does not depend on
//! the number of threads.

use rayon::prelude::*;
use rayon::ThreadPool;
use torus_trees_core::mahler::{
    growth_rate_row, mahler_jensen, mahler_monte_carlo_with, mahler_quadrature_with, BlockSource, BlockSum, GrowthRow,
};
use torus_trees_core::quotient::spanning_tree_count;
use torus_trees_core::{build_quotient, product_formula, Error, LaurentPoly, MahlerEstimate, PeriodicGraph, ProductFormula, Sublattice};

use crate::error::{AppError, Result};

pub fn thread_pool(threads: Option<usize>) -> Result<ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        if t == 0 {
            return Err(AppError::Invalid("--threads must be positive".into()));
        }
        b = b.num_threads(t);
    }
    b.build().map_err(|e| AppError::Invalid(e.to_string()))
}

/// Evaluates all blocks in parallel, returned in block order.
pub fn run_blocks(src: &dyn BlockSource) -> Vec<BlockSum> {
    (0..src.block_count()).into_par_iter().map(|b| src.block(b)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Jensen in one variable, the grid while it fits, Monte-Carlo beyond.
    Auto,
    Jensen,
    Grid,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MahlerParams {
    pub method: Method,
    pub grid: u64,
    pub samples: u64,
    pub seed: u64,
}

pub fn mahler(f: &LaurentPoly, p: &MahlerParams) -> Result<MahlerEstimate> {
    let est = match p.method {
        Method::Jensen => mahler_jensen(f),
        Method::Grid => mahler_quadrature_with(f, p.grid, &run_blocks),
        Method::MonteCarlo => mahler_monte_carlo_with(f, p.samples, p.seed, &run_blocks),
        Method::Auto => torus_trees_core::mahler::mahler_auto_with(f, p.grid, p.samples, p.seed, &run_blocks),
    };
    Ok(est?)
}

/// Growth-rate rows for each lattice, computed concurrently.
pub fn growth_rows(g: &PeriodicGraph, lattices: &[Sublattice], mhat: f64, max_index: u64) -> Result<Vec<GrowthRow>> {
    if torus_trees_core::laplacian_matrix(g).delta.is_zero() {
        return Err(Error::DeltaZero.into());
    }
    let rows: Vec<_> = lattices.par_iter().map(|l| growth_rate_row(g, l, mhat, max_index)).collect();
    Ok(rows.into_iter().collect::<Result<_, _>>()?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProductCheck {
    pub log_exact: f64,
    pub formula: ProductFormula,
}

impl ProductCheck {
    pub fn diff(&self) -> f64 {
        (self.log_exact - self.formula.log_value).abs()
    }
}

/// Exact `ln T(G_Λ)` against the product formula for one lattice.
pub fn product_check(g: &PeriodicGraph, l: &Sublattice, zero_tol: f64, max_index: u64) -> Result<ProductCheck> {
    let formula = product_formula(g, l, zero_tol, max_index)?;
    let log_exact = spanning_tree_count(&build_quotient(g, l, max_index)?).log_total();
    Ok(ProductCheck { log_exact, formula })
}

pub fn product_checks(g: &PeriodicGraph, lattices: &[Sublattice], zero_tol: f64, max_index: u64) -> Result<Vec<ProductCheck>> {
    let rows: Vec<_> = lattices.par_iter().map(|l| product_check(g, l, zero_tol, max_index)).collect();
    rows.into_iter().collect()
}
