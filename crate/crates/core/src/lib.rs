//! Spanning-tree growth of graphs with a cofinite free `Z^d` symmetry.
//!
//! A periodic graph is described by its finite quotient: `n` vertex orbits and
//! a list of edge orbits labelled by translation vectors. From that data this
//! crate computes the Laplacian polynomial `Δ` over `Z[x_1^±1, …, x_d^±1]`,
//! builds finite torus quotients `G_Λ` for finite-index sublattices `Λ`,
//! counts their spanning trees exactly, evaluates the roots-of-unity product
//! formula for those counts, and estimates the logarithmic Mahler measure
//! `m(Δ)`, which is the limiting growth rate of `log T(G_Λ) / |Z^d/Λ|`.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the command
//! line front end and thread-parallel drivers live in the `torus-trees` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod error;
pub mod exact_det;
pub mod laplacian;
pub mod laurent;
pub mod mahler;
pub mod math;
pub mod normal_form;
pub mod periodic_graph;
pub mod quotient;
pub mod spectral;
#[cfg(test)]
mod strategies;
pub mod sublattice;

pub use error::{Error, Result};
pub use num_bigint::BigUint;
pub use num_complex::Complex64;
pub use laplacian::{crsf_polynomial, delta_is_zero, laplacian_matrix, LaplacianData, ZeroCheck};
pub use laurent::{LaurentMatrix, LaurentPoly};
pub use mahler::{MahlerEstimate, MahlerMethod};
pub use periodic_graph::{ComponentOrbitDecomposition, EdgeOrbit, PeriodicGraph};
pub use quotient::{build_quotient, spanning_tree_count, ComplexityReport, FiniteMultigraph};
pub use spectral::{omega_points, product_formula, OmegaSet, ProductFormula};
pub use sublattice::Sublattice;
