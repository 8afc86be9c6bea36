//! The roots-of-unity product formula for `T(G_Λ)`.
//!
//! The Laplacian of `G_Λ` splits into `|Z^d/Λ|` blocks `L(c)`, one for each
//! character `c` of `Z^d/Λ`, and `det L(c) = Δ(c)`. Hence
//! `T(G_Λ) = (1/n_Λ) ∏_c pdet L(c)` where `pdet` is the product of nonzero
//! eigenvalues. At points with `Δ(c) ≠ 0` the block contributes `|Δ(c)|`.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::laplacian::laplacian_matrix;
use crate::laurent::{LaurentMatrix, PhaseEvaluator};
use crate::math::{abs, big_ln, ln, pairwise_sum, RootTable};
use crate::periodic_graph::PeriodicGraph;
use crate::quotient::build_quotient;
use crate::sublattice::Sublattice;

/// Default threshold below which `|Δ(c)|` counts as zero, relative to the
/// coefficient 1-norm of `Δ`.
pub const DEFAULT_ZERO_TOL: f64 = 1e-9;

/// `Ω(Λ)`: the characters `c` with `c^λ = 1` for all `λ ∈ Λ`.
///
/// Point `k` is `(exp(2πi a_1/R), …, exp(2πi a_d/R))` with
/// `a = numerators[k]` and `R = denominator`, the largest invariant factor.
#[derive(Debug, Clone)]
pub struct OmegaSet {
    pub denominator: i64,
    pub numerators: Vec<Vec<i64>>,
    pub points: Vec<Vec<Complex64>>,
}

impl OmegaSet {
    pub fn len(&self) -> usize {
        self.numerators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.numerators.is_empty()
    }
}

/// Enumerates `Ω(Λ)` through the Smith form `U·B·V = diag(r)`: with
/// `k_i ∈ [0, r_i)`, the angle (in turns) of coordinate `j` is
/// `Σ_i k_i U_ij / r_i`. The first point is `(1, …, 1)`.
pub fn omega_points(lattice: &Sublattice, max_index: u64) -> Result<OmegaSet> {
    if lattice.index() > max_index {
        return Err(Error::GuardExceeded {
            what: "lattice index",
            value: lattice.index() as u128,
            limit: max_index as u128,
        });
    }
    let d = lattice.dim();
    let factors = lattice.invariant_factors();
    let den = *factors.last().expect("dimension >= 1");
    // row i of U only matters modulo r_i
    let big_den = BigInt::from(den);
    let w: Vec<Vec<i64>> = lattice
        .smith()
        .u
        .iter()
        .zip(factors)
        .map(|(row, &r)| {
            row.iter()
                .map(|x| (x * (den / r)).mod_floor(&big_den).to_i64().expect("reduced below den"))
                .collect()
        })
        .collect();
    let mut numerators = Vec::with_capacity(lattice.index() as usize);
    let mut k = vec![0i64; d];
    for _ in 0..lattice.index() {
        let mut a = vec![0i64; d];
        for (j, slot) in a.iter_mut().enumerate() {
            let mut s: i128 = 0;
            for i in 0..d {
                s += k[i] as i128 * w[i][j] as i128;
            }
            *slot = s.rem_euclid(den as i128) as i64;
        }
        numerators.push(a);
        for (ki, &r) in k.iter_mut().zip(factors) {
            *ki += 1;
            if *ki < r {
                break;
            }
            *ki = 0;
        }
    }
    // exact check: each generator pairs to an integer with every point
    for a in &numerators {
        for col in 0..d {
            let s: i128 = (0..d).map(|j| a[j] as i128 * lattice.basis()[j][col] as i128).sum();
            if s.rem_euclid(den as i128) != 0 {
                return Err(Error::Numerical("character does not vanish on the lattice".into()));
            }
        }
    }
    let table = RootTable::new(den);
    let points: Vec<Vec<Complex64>> =
        numerators.iter().map(|a| a.iter().map(|&x| table.get(x)).collect()).collect();
    for p in &points {
        for col in 0..d {
            let mut z = Complex64::new(1.0, 0.0);
            for j in 0..d {
                let e = lattice.basis()[j][col];
                let base = if e < 0 { p[j].conj() } else { p[j] };
                z *= base.powu(e.unsigned_abs() as u32);
            }
            if abs(z - 1.0) > 1e-10 {
                return Err(Error::Numerical("character check failed in floating point".into()));
            }
        }
    }
    Ok(OmegaSet { denominator: den, numerators, points })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProductFormula {
    /// `ln T(G_Λ)` from the product over all blocks.
    pub log_value: f64,
    /// `ln` of `(1/n_Λ) ∏_{Δ(c)≠0} |Δ(c)|`, the product over nonvanishing
    /// points only. Equal to `log_value` when `n = 1`.
    pub log_value_nonzero_only: f64,
    /// `Σ ln pdet L(c)` over the points where `Δ(c)` vanished.
    pub zero_block_log: f64,
    /// Points with `|Δ(c)|` under the threshold.
    pub skipped: usize,
    pub points: usize,
    pub n_lambda: BigUint,
    pub max_abs: f64,
}

/// Evaluates the product formula for `T(G_Λ)` in log space.
///
/// `zero_tol` is relative to the sum of the absolute coefficients of `Δ`,
/// which bounds `|Δ|` on the torus. `n_Λ` comes from the
/// components of the exact quotient.
pub fn product_formula(g: &PeriodicGraph, lattice: &Sublattice, zero_tol: f64, max_index: u64) -> Result<ProductFormula> {
    let lap = laplacian_matrix(g);
    if lap.delta.is_zero() {
        return Err(Error::DeltaZero);
    }
    if g.rank() != lattice.dim() {
        return Err(Error::VariableMismatch(g.rank(), lattice.dim()));
    }
    let quotient = build_quotient(g, lattice, max_index)?;
    let n_lambda = quotient
        .components()
        .iter()
        .fold(BigUint::from(1u32), |acc, c| acc * c.len());
    let omega = omega_points(lattice, max_index)?;
    let table = RootTable::new(omega.denominator);
    let delta = lap.delta.phase_evaluator();
    let values: Vec<f64> = omega.numerators.iter().map(|a| abs(delta.eval(a, &table))).collect();
    let max_abs = values.iter().copied().fold(0.0, f64::max);
    let scale: f64 = delta.coeffs().iter().map(|c| c.abs()).sum();
    let threshold = zero_tol * scale;

    let mut logs = Vec::with_capacity(values.len());
    let mut zero_logs = Vec::new();
    let entries: Vec<PhaseEvaluator> = (0..g.orbit_count())
        .flat_map(|i| (0..g.orbit_count()).map(move |j| (i, j)))
        .map(|(i, j)| lap.matrix.get(i, j).phase_evaluator())
        .collect();
    for (a, &v) in omega.numerators.iter().zip(&values) {
        if v > threshold {
            logs.push(ln(v));
        } else {
            zero_logs.push(log_pseudo_determinant(&lap.matrix, &entries, a, &table)?);
        }
    }
    let log_n = big_ln(&n_lambda);
    let main = pairwise_sum(&logs);
    let zero_block_log = pairwise_sum(&zero_logs);
    Ok(ProductFormula {
        log_value: main + zero_block_log - log_n,
        log_value_nonzero_only: main - log_n,
        zero_block_log,
        skipped: zero_logs.len(),
        points: omega.len(),
        n_lambda,
        max_abs,
    })
}

/// `ln` of the product of the nonzero eigenvalues of the Hermitian block
/// `L(c)`, via its real symmetric embedding `[[A, −B], [B, A]]`, whose
/// spectrum is that of `A + iB` with every eigenvalue doubled.
fn log_pseudo_determinant(
    matrix: &LaurentMatrix,
    entries: &[PhaseEvaluator],
    numerators: &[i64],
    table: &RootTable,
) -> Result<f64> {
    let n = matrix.size();
    let vals: Vec<Complex64> = entries.iter().map(|e| e.eval(numerators, table)).collect();
    let mut real = nalgebra::DMatrix::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = vals[i * n + j];
            real[(i, j)] = z.re;
            real[(i + n, j + n)] = z.re;
            real[(i, j + n)] = -z.im;
            real[(i + n, j)] = z.im;
        }
    }
    let eig = nalgebra::SymmetricEigen::new(real);
    let mut ev: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    let scale = ev.last().copied().unwrap_or(0.0).max(1.0);
    let nonzero: Vec<f64> = ev.into_iter().filter(|&l| l > 1e-9 * scale).map(ln).collect();
    if nonzero.len() % 2 != 0 {
        return Err(Error::Numerical("unpaired eigenvalue in Hermitian embedding".into()));
    }
    Ok(0.5 * pairwise_sum(&nonzero))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::periodic_graph::{doubled_grid1, grid_graph, subdivided_grid1, EdgeOrbit};
    use crate::quotient::spanning_tree_count;
    use crate::sublattice::DEFAULT_MAX_INDEX;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn cube_roots() {
        let o = omega_points(&Sublattice::diagonal(1, 3).unwrap(), 100).unwrap();
        assert_eq!(o.len(), 3);
        let w = Complex64::from_polar(1.0, core::f64::consts::TAU / 3.0);
        assert!(close(o.points[0][0], Complex64::new(1.0, 0.0)));
        assert!(o.points.iter().any(|p| close(p[0], w)));
        assert!(o.points.iter().any(|p| close(p[0], w * w)));
    }

    #[test]
    fn signs_for_diag_two() {
        let o = omega_points(&Sublattice::diagonal(2, 2).unwrap(), 100).unwrap();
        let mut got: Vec<(i64, i64)> = o.points.iter().map(|p| (p[0].re.round() as i64, p[1].re.round() as i64)).collect();
        got.sort();
        assert_eq!(got, vec![(-1, -1), (-1, 1), (1, -1), (1, 1)]);
    }

    #[test]
    fn checkerboard_characters() {
        let l = Sublattice::from_columns(2, &[vec![1, 1], vec![-1, 1]]).unwrap();
        let o = omega_points(&l, 100).unwrap();
        let mut got: Vec<(i64, i64)> = o.points.iter().map(|p| (p[0].re.round() as i64, p[1].re.round() as i64)).collect();
        got.sort();
        assert_eq!(got, vec![(-1, -1), (1, 1)]);
        for p in &o.points {
            assert!(p[0].im.abs() < 1e-12 && p[1].im.abs() < 1e-12);
        }
    }

    #[test]
    fn grid1_cycles() {
        let g = grid_graph(1).unwrap();
        for n in 1..=20 {
            let pf = product_formula(&g, &Sublattice::diagonal(1, n).unwrap(), DEFAULT_ZERO_TOL, DEFAULT_MAX_INDEX).unwrap();
            assert!((pf.log_value - (n as f64).ln()).abs() < 1e-9, "n = {n}");
            assert_eq!(pf.log_value, pf.log_value_nonzero_only);
            assert_eq!(pf.skipped, 1);
        }
    }

    #[test]
    fn trivial_lattice_single_orbit() {
        for g in [grid_graph(1).unwrap(), doubled_grid1()] {
            let pf = product_formula(&g, &Sublattice::diagonal(1, 1).unwrap(), DEFAULT_ZERO_TOL, 10).unwrap();
            assert_eq!(pf.points, 1);
            assert_eq!(pf.skipped, 1);
            // empty product over nonvanishing points, n_Λ = 1
            assert_eq!(pf.log_value_nonzero_only, 0.0);
        }
    }

    #[test]
    fn two_orbit_graph_needs_zero_blocks() {
        // subdivided 𝔾_1 over (N) is C_{2N}: T = 2N, n_Λ = 2N
        let g = subdivided_grid1();
        for n in [1i64, 2, 5, 9] {
            let pf = product_formula(&g, &Sublattice::diagonal(1, n).unwrap(), DEFAULT_ZERO_TOL, 100).unwrap();
            let exact = (2.0 * n as f64).ln();
            assert!((pf.log_value - exact).abs() < 1e-9, "n = {n}: {} vs {exact}", pf.log_value);
            // L(1) = [[2, -2], [-2, 2]] has nonzero eigenvalue 4 = n·τ(quotient)
            assert!((pf.zero_block_log - 4f64.ln()).abs() < 1e-9);
            assert!((pf.log_value - pf.log_value_nonzero_only - 4f64.ln()).abs() < 1e-9);
        }
    }

    #[test]
    fn delta_vanishing_at_every_point() {
        // two components; Δ(±1, 1) = 0 at both characters of 2Z × Z
        let g = PeriodicGraph::new(
            2,
            2,
            vec![EdgeOrbit::new(0, 0, vec![0, 1]), EdgeOrbit::new(0, 0, vec![2, 0]), EdgeOrbit::new(1, 1, vec![1, 0])],
        )
        .unwrap();
        let l = Sublattice::from_columns(2, &[vec![-2, -4], vec![0, 1]]).unwrap();
        let pf = product_formula(&g, &l, DEFAULT_ZERO_TOL, 100).unwrap();
        assert_eq!(pf.skipped, 2);
        assert!((pf.log_value - 2f64.ln()).abs() < 1e-9, "{}", pf.log_value);
    }

    #[test]
    fn grid2_small_tori() {
        let g = grid_graph(2).unwrap();
        for n in 2..=6 {
            let l = Sublattice::diagonal(2, n).unwrap();
            let exact = spanning_tree_count(&build_quotient(&g, &l, 1000).unwrap()).log_total();
            let pf = product_formula(&g, &l, DEFAULT_ZERO_TOL, 1000).unwrap();
            assert!((pf.log_value - exact).abs() < 1e-9 * exact.max(1.0));
        }
    }

    #[test]
    fn zero_delta_rejected() {
        let g = PeriodicGraph::new(1, 1, vec![crate::EdgeOrbit::new(0, 0, vec![0])]).unwrap();
        assert_eq!(
            product_formula(&g, &Sublattice::diagonal(1, 3).unwrap(), DEFAULT_ZERO_TOL, 10),
            Err(Error::DeltaZero)
        );
    }

    #[test]
    fn basis_change_keeps_point_set() {
        let a = Sublattice::from_columns(2, &[vec![2, 1], vec![0, 3]]).unwrap();
        let b = Sublattice::from_columns(2, &[vec![2, 4], vec![2, 7]]).unwrap();
        assert_eq!(a.index(), b.index());
        let norm = |o: OmegaSet| {
            let mut v: Vec<Vec<i64>> = o
                .numerators
                .iter()
                .map(|x| x.iter().map(|&t| t * 600 / o.denominator).collect())
                .collect();
            v.sort();
            v
        };
        assert_eq!(norm(omega_points(&a, 100).unwrap()), norm(omega_points(&b, 100).unwrap()));
    }

    #[test]
    fn skipped_points_count_components() {
        let grids = [grid_graph(1).unwrap(), grid_graph(2).unwrap(), crate::periodic_graph::grid_without_axis(2, 1).unwrap()];
        let lattices = [
            Sublattice::diagonal(1, 7).unwrap(),
            Sublattice::from_columns(2, &[vec![3, 1], vec![-1, 4]]).unwrap(),
            Sublattice::diagonal(2, 6).unwrap(),
        ];
        for (g, l) in grids.iter().zip(&lattices) {
            let q = build_quotient(g, l, 1000).unwrap();
            let pf = product_formula(g, l, DEFAULT_ZERO_TOL, 1000).unwrap();
            assert_eq!(pf.skipped, q.components().len());
        }
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(96))]

        #[test]
        fn product_formula_matches_exact_count(
            g in proptest::strategy::Strategy::prop_filter(crate::strategies::periodic_graph(2, 3, 5),
                "Δ ≡ 0", |g| !laplacian_matrix(g).delta.is_zero()),
            l in crate::strategies::lattice(2, 60),
        ) {
            let exact = spanning_tree_count(&build_quotient(&g, &l, 1000).unwrap()).log_total();
            let pf = product_formula(&g, &l, DEFAULT_ZERO_TOL, 1000).unwrap();
            proptest::prop_assert!((pf.log_value - exact).abs() <= 1e-6, "{} vs {}", pf.log_value, exact);
        }

        #[test]
        fn omega_independent_of_basis(
            l in crate::strategies::lattice(2, 60),
            a in -3i64..=3,
            swap in proptest::bool::ANY,
        ) {
            // right-multiply the basis by a unimodular matrix
            let mut cols = [l.column(0), l.column(1)];
            cols[1] = vec![cols[1][0] + a * cols[0][0], cols[1][1] + a * cols[0][1]];
            if swap {
                cols.swap(0, 1);
            }
            let other = Sublattice::from_columns(2, &cols).unwrap();
            let p = omega_points(&l, 100).unwrap();
            let q = omega_points(&other, 100).unwrap();
            proptest::prop_assert_eq!(p.len(), q.len());
            let scaled = |o: &OmegaSet, by: i64| {
                let mut v: Vec<(Vec<i64>, Vec<Complex64>)> = o
                    .numerators
                    .iter()
                    .zip(&o.points)
                    .map(|(n, z)| (n.iter().map(|&t| t * by).collect(), z.clone()))
                    .collect();
                v.sort_by(|x, y| x.0.cmp(&y.0));
                v
            };
            let pn = scaled(&p, q.denominator);
            let qn = scaled(&q, p.denominator);
            for ((a, za), (b, zb)) in pn.iter().zip(&qn) {
                proptest::prop_assert_eq!(a, b);
                for (x, y) in za.iter().zip(zb) {
                    proptest::prop_assert!((x - y).norm() < 1e-10);
                }
            }
        }
    }
}
