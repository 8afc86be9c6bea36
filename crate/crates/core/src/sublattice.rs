//! Finite-index sublattices `Λ ≤ Z^d`.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::exact_det::bareiss;
use crate::normal_form::{self, IntMatrix, SmithForm};

/// Largest dimension for which the shortest vector is searched exhaustively.
pub const MAX_SEARCH_DIM: usize = 4;

/// Default ceiling on `|Z^d/Λ|` for coset enumeration.
pub const DEFAULT_MAX_INDEX: u64 = 1_000_000;

/// A finite-index subgroup of `Z^d`, given by a `d×d` basis whose columns
/// generate it, together with its normal forms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sublattice {
    dim: usize,
    basis: IntMatrix,
    /// Echelon rows generating the same lattice; `hermite[i][i] > 0`.
    hermite: IntMatrix,
    smith: SmithForm,
    index: u64,
    min_length_sq: Option<u64>,
}

impl Sublattice {
    /// `cols[k]` is the `k`-th generator.
    pub fn from_columns(dim: usize, cols: &[Vec<i64>]) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroRank);
        }
        if cols.len() != dim || cols.iter().any(|c| c.len() != dim) {
            return Err(Error::BasisShape(dim));
        }
        let basis = normal_form::transpose(&cols.to_vec());
        Self::from_basis(basis)
    }

    /// `basis` is a `d×d` matrix whose columns generate the lattice.
    pub fn from_basis(basis: IntMatrix) -> Result<Self> {
        let dim = basis.len();
        if dim == 0 {
            return Err(Error::ZeroRank);
        }
        if basis.iter().any(|r| r.len() != dim) {
            return Err(Error::BasisShape(dim));
        }
        let det = normal_form::determinant(&basis)?;
        if det == 0 {
            return Err(Error::SingularBasis);
        }
        let smith = normal_form::smith(&basis)?;
        let check = normal_form::big_matmul(&normal_form::big_matmul(&smith.u, &normal_form::to_big(&basis)), &smith.v);
        let unit = |m: &normal_form::BigMatrix| bareiss(m.clone()).magnitude().is_one();
        let unimodular = unit(&smith.u) && unit(&smith.v);
        let diagonal = (0..dim)
            .all(|i| (0..dim).all(|j| check[i][j] == BigInt::from(if i == j { smith.factors[i] } else { 0 })));
        if !unimodular || !diagonal {
            return Err(Error::Numerical("Smith normal form verification failed".into()));
        }
        let generators = normal_form::transpose(&basis);
        let hermite = normal_form::hermite_rows(&generators, dim)?;
        debug_assert_eq!(hermite.len(), dim);
        let index = det.unsigned_abs();
        let mut lattice = Sublattice {
            dim,
            basis,
            hermite,
            smith,
            index,
            min_length_sq: None,
        };
        if dim <= MAX_SEARCH_DIM {
            lattice.min_length_sq = Some(lattice.search_shortest()?.1);
        }
        Ok(lattice)
    }

    /// `diag(n, …, n)`.
    pub fn diagonal(dim: usize, n: i64) -> Result<Self> {
        Self::from_diagonal(&vec![n; dim])
    }

    pub fn from_diagonal(entries: &[i64]) -> Result<Self> {
        let d = entries.len();
        let basis = (0..d)
            .map(|i| (0..d).map(|j| if i == j { entries[i] } else { 0 }).collect())
            .collect();
        Self::from_basis(basis)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    /// The `k`-th generating column.
    pub fn column(&self, k: usize) -> Vec<i64> {
        self.basis.iter().map(|r| r[k]).collect()
    }

    pub fn hermite_rows(&self) -> &IntMatrix {
        &self.hermite
    }

    pub fn smith(&self) -> &SmithForm {
        &self.smith
    }

    pub fn invariant_factors(&self) -> &[i64] {
        &self.smith.factors
    }

    /// `|Z^d / Λ|`.
    pub fn index(&self) -> u64 {
        self.index
    }

    /// Squared length of a shortest nonzero vector, when `d ≤ 4`.
    pub fn min_length_sq(&self) -> Option<u64> {
        self.min_length_sq
    }

    /// `⟨Λ⟩`, the Euclidean length of a shortest nonzero vector.
    pub fn min_length(&self) -> Option<f64> {
        self.min_length_sq.map(|l| crate::math::sqrt(l as f64))
    }

    /// Exhaustive search over lattice points in the box `|v_i| ≤ R`, where `R`
    /// is the length of the shortest generator. Points are enumerated in
    /// Hermite coordinates so only lattice vectors are visited.
    pub fn shortest_vector(&self) -> Result<(Vec<i64>, u64)> {
        if self.dim > MAX_SEARCH_DIM {
            return Err(Error::GuardExceeded {
                what: "dimension for shortest-vector search",
                value: self.dim as u128,
                limit: MAX_SEARCH_DIM as u128,
            });
        }
        self.search_shortest()
    }

    fn search_shortest(&self) -> Result<(Vec<i64>, u64)> {
        let d = self.dim;
        let mut best_vec = Vec::new();
        let mut best = u64::MAX;
        for k in 0..d {
            let col = self.column(k);
            let n = col.iter().map(|&x| (x as i128 * x as i128) as u128).sum::<u128>();
            if (n as u64) < best {
                best = n as u64;
                best_vec = col;
            }
        }
        for row in &self.hermite {
            let n = row.iter().map(|&x| (x as i128 * x as i128) as u128).sum::<u128>();
            if (n as u64) < best {
                best = n as u64;
                best_vec = row.clone();
            }
        }
        let radius = crate::math::sqrt(best as f64) as i64 + 1;
        let mut current = vec![0i64; d];
        self.descend(0, &mut current, radius, &mut best, &mut best_vec)?;
        Ok((best_vec, best))
    }

    // v = Σ c_i h_i with h_i echelon; coordinate k of v only depends on
    // c_0..c_k, so c_k is bounded once the earlier coefficients are fixed.
    fn descend(&self, k: usize, partial: &mut Vec<i64>, radius: i64, best: &mut u64, best_vec: &mut Vec<i64>) -> Result<()> {
        let d = self.dim;
        if k == d {
            let norm: i128 = partial.iter().map(|&x| x as i128 * x as i128).sum();
            if norm > 0 && (norm as u64) < *best {
                *best = norm as u64;
                *best_vec = partial.clone();
            }
            return Ok(());
        }
        let pivot = self.hermite[k][k];
        let base = partial[k];
        // need |base + c * pivot| <= radius
        let lo = (-radius - base).div_euclid(pivot) - 1;
        let hi = (radius - base).div_euclid(pivot) + 1;
        for c in lo..=hi {
            let vk = base + c * pivot;
            if vk.abs() > radius {
                continue;
            }
            let saved = partial.clone();
            for (slot, &h) in partial.iter_mut().zip(&self.hermite[k]) {
                *slot = slot.checked_add(c.checked_mul(h).ok_or(Error::Overflow)?).ok_or(Error::Overflow)?;
            }
            if partial[..=k].iter().all(|v| v.abs() <= radius) {
                self.descend(k + 1, partial, radius, best, best_vec)?;
            }
            *partial = saved;
        }
        Ok(())
    }

    /// Reduces `v` to its coset representative in the Hermite box
    /// `0 ≤ v_i < h_ii`.
    pub fn reduce(&self, v: &[i64]) -> Vec<i64> {
        let mut r = v.to_vec();
        self.reduce_in_place(&mut r);
        r
    }

    pub fn reduce_in_place(&self, v: &mut [i64]) {
        for (i, h) in self.hermite.iter().enumerate() {
            let q = v[i].div_euclid(h[i]);
            if q != 0 {
                for (x, &hv) in v.iter_mut().zip(h) {
                    *x -= q * hv;
                }
            }
        }
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    /// Position of a reduced representative in [`Sublattice::cosets`] order.
    pub fn coset_index(&self, reduced: &[i64]) -> usize {
        let mut idx = 0usize;
        for i in (0..self.dim).rev() {
            idx = idx * self.hermite[i][i] as usize + reduced[i] as usize;
        }
        idx
    }

    /// All coset representatives of `Z^d/Λ`, reduced to the Hermite box, with
    /// the first coordinate varying fastest.
    pub fn cosets(&self, max_index: u64) -> Result<Vec<Vec<i64>>> {
        if self.index > max_index {
            return Err(Error::GuardExceeded {
                what: "lattice index",
                value: self.index as u128,
                limit: max_index as u128,
            });
        }
        let radices: Vec<i64> = (0..self.dim).map(|i| self.hermite[i][i]).collect();
        let mut out = Vec::with_capacity(self.index as usize);
        let mut cur = vec![0i64; self.dim];
        for _ in 0..self.index {
            out.push(cur.clone());
            for (c, &r) in cur.iter_mut().zip(&radices) {
                *c += 1;
                if *c < r {
                    break;
                }
                *c = 0;
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn diag_two_two() {
        let l = Sublattice::diagonal(2, 2).unwrap();
        assert_eq!(l.index(), 4);
        assert_eq!(l.invariant_factors(), &[2, 2]);
        assert_eq!(l.min_length_sq(), Some(4));
        assert_eq!(l.min_length(), Some(2.0));
        assert_eq!(
            l.cosets(DEFAULT_MAX_INDEX).unwrap(),
            vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]]
        );
    }

    #[test]
    fn one_dimensional() {
        for n in 1..20 {
            let l = Sublattice::diagonal(1, n).unwrap();
            assert_eq!(l.index(), n as u64);
            assert_eq!(l.invariant_factors(), &[n]);
            assert_eq!(l.min_length_sq(), Some((n * n) as u64));
        }
        let l = Sublattice::diagonal(1, 3).unwrap();
        assert_eq!(l.cosets(10).unwrap(), vec![vec![0], vec![1], vec![2]]);
        assert_eq!(Sublattice::diagonal(1, -3).unwrap().index(), 3);
    }

    #[test]
    fn checkerboard_lattice() {
        let l = Sublattice::from_columns(2, &[vec![1, 1], vec![-1, 1]]).unwrap();
        assert_eq!(l.index(), 2);
        assert_eq!(l.invariant_factors(), &[1, 2]);
        // exhaustive oracle over a box
        let mut best = u64::MAX;
        for a in -5i64..=5 {
            for b in -5i64..=5 {
                if (a, b) != (0, 0) && (a + b) % 2 == 0 {
                    best = best.min((a * a + b * b) as u64);
                }
            }
        }
        assert_eq!(l.min_length_sq(), Some(best));
        assert_eq!(best, 2);
        let reps = l.cosets(10).unwrap();
        assert_eq!(reps.len(), 2);
        assert!(!l.contains(&[reps[0][0] - reps[1][0], reps[0][1] - reps[1][1]]));
        for r in &reps {
            assert_eq!(&l.reduce(r), r);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(Sublattice::from_columns(2, &[vec![1, 2], vec![2, 4]]), Err(Error::SingularBasis));
        assert_eq!(Sublattice::from_columns(2, &[vec![1, 2]]), Err(Error::BasisShape(2)));
        assert_eq!(Sublattice::from_basis(Vec::new()), Err(Error::ZeroRank));
        let big = Sublattice::diagonal(2, 100).unwrap();
        assert!(matches!(big.cosets(9999), Err(Error::GuardExceeded { .. })));
    }

    fn nonsingular() -> impl Strategy<Value = IntMatrix> {
        (1usize..=4)
            .prop_flat_map(|d| proptest::collection::vec(proptest::collection::vec(-9i64..=9, d), d))
            .prop_filter("singular", |m| normal_form::determinant(m).unwrap() != 0)
    }

    proptest! {
        #[test]
        fn factors_multiply_to_index(m in nonsingular()) {
            let l = Sublattice::from_basis(m.clone()).unwrap();
            let prod: i64 = l.invariant_factors().iter().product();
            prop_assert_eq!(prod as u64, normal_form::determinant(&m).unwrap().unsigned_abs());
            prop_assert_eq!(l.index(), prod as u64);
        }

        #[test]
        fn reduction_is_constant_on_cosets(m in nonsingular(), v in proptest::collection::vec(-30i64..=30, 4), coeffs in proptest::collection::vec(-3i64..=3, 4)) {
            let l = Sublattice::from_basis(m).unwrap();
            let d = l.dim();
            let v = &v[..d];
            let mut shifted = v.to_vec();
            for k in 0..d {
                let col = l.column(k);
                for i in 0..d {
                    shifted[i] += coeffs[k] * col[i];
                }
            }
            prop_assert_eq!(l.reduce(v), l.reduce(&shifted));
            prop_assert!(l.contains(&l.column(0)));
            let r = l.reduce(v);
            for i in 0..d {
                prop_assert!(r[i] >= 0 && r[i] < l.hermite_rows()[i][i]);
            }
        }

        #[test]
        fn shortest_vector_is_in_lattice_and_minimal(m in nonsingular()) {
            let l = Sublattice::from_basis(m).unwrap();
            prop_assume!(l.dim() <= 2 && l.index() <= 400);
            let (v, n) = l.shortest_vector().unwrap();
            prop_assert!(l.contains(&v));
            prop_assert_eq!(v.iter().map(|x| (x * x) as u64).sum::<u64>(), n);
            // brute force over a box larger than the shortest generator
            let r = 25i64;
            let mut best = u64::MAX;
            if l.dim() == 1 {
                for a in -r * 20..=r * 20 { if a != 0 && l.contains(&[a]) { best = best.min((a * a) as u64); } }
            } else {
                for a in -r..=r { for b in -r..=r {
                    if (a, b) != (0, 0) && l.contains(&[a, b]) { best = best.min((a * a + b * b) as u64); }
                } }
            }
            prop_assert!(n <= best);
        }

        #[test]
        fn cosets_are_distinct(m in nonsingular()) {
            let l = Sublattice::from_basis(m).unwrap();
            prop_assume!(l.index() <= 200);
            let reps = l.cosets(DEFAULT_MAX_INDEX).unwrap();
            prop_assert_eq!(reps.len() as u64, l.index());
            for (i, r) in reps.iter().enumerate() {
                prop_assert_eq!(l.coset_index(r), i);
                prop_assert_eq!(&l.reduce(r), r);
            }
        }
    }
}
