//! Exact integer determinants.
//!
//! [`bareiss`] is fraction-free elimination over big integers. For the large
//! sparse symmetric matrices that reduced Laplacians of torus quotients are,
//! [`sparse_symmetric_det`] computes the determinant modulo word-sized primes
//! with symmetric sparse elimination and reconstructs it by Chinese
//! remaindering up to a Hadamard bound.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

/// Fraction-free Gaussian elimination. Pivots are the first nonzero entry at
/// or below the diagonal; every intermediate entry is a minor of the input.
pub fn bareiss(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut prev = BigInt::one();
    let mut negate = false;
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return BigInt::zero();
        };
        if p != k {
            a.swap(p, k);
            negate = !negate;
        }
        let (top, rest) = a.split_at_mut(k + 1);
        let pivot_row = &top[k];
        for row in rest.iter_mut() {
            let aik = row[k].clone();
            for j in k + 1..n {
                let v = &pivot_row[k] * &row[j] - &aik * &pivot_row[j];
                row[j] = v / &prev;
            }
            row[k] = BigInt::zero();
        }
        prev = pivot_row[k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    if negate {
        -det
    } else {
        det
    }
}

/// Symmetric integer matrix with the upper triangle stored row-wise as
/// sorted `(column, value)` lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseSymmetric {
    n: usize,
    upper: Vec<Vec<(usize, i64)>>,
}

impl SparseSymmetric {
    /// `entries` lists `(i, j, v)` with `i ≤ j`; duplicates are summed.
    pub fn from_upper(n: usize, entries: impl IntoIterator<Item = (usize, usize, i64)>) -> Self {
        let mut upper: Vec<Vec<(usize, i64)>> = vec![Vec::new(); n];
        for (i, j, v) in entries {
            let (i, j) = if i <= j { (i, j) } else { (j, i) };
            upper[i].push((j, v));
        }
        for row in &mut upper {
            row.sort_unstable_by_key(|e| e.0);
            let mut merged: Vec<(usize, i64)> = Vec::with_capacity(row.len());
            for &(j, v) in row.iter() {
                match merged.last_mut() {
                    Some(last) if last.0 == j => last.1 += v,
                    _ => merged.push((j, v)),
                }
            }
            merged.retain(|e| e.1 != 0);
            *row = merged;
        }
        SparseSymmetric { n, upper }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut m = vec![vec![0i64; self.n]; self.n];
        for (i, row) in self.upper.iter().enumerate() {
            for &(j, v) in row {
                m[i][j] = v;
                m[j][i] = v;
            }
        }
        m
    }

    /// `log2` of Hadamard's bound `∏ ‖row_i‖`.
    pub fn hadamard_log2(&self) -> f64 {
        let mut sq = vec![0f64; self.n];
        for (i, row) in self.upper.iter().enumerate() {
            for &(j, v) in row {
                let v2 = (v as f64) * (v as f64);
                sq[i] += v2;
                if j != i {
                    sq[j] += v2;
                }
            }
        }
        sq.iter().map(|&s| if s > 0.0 { 0.5 * libm::log2(s) } else { f64::NEG_INFINITY }).sum()
    }
}

/// Determinant of a symmetric matrix, bit-exact.
///
/// Elimination runs without pivoting modulo each prime; a prime for which a
/// pivot vanishes is skipped. Reconstruction stops once the product of the
/// primes exceeds twice the Hadamard bound, and one further prime confirms
/// the result.
pub fn sparse_symmetric_det(m: &SparseSymmetric) -> BigInt {
    if m.n == 0 {
        return BigInt::one();
    }
    let bound_bits = m.hadamard_log2();
    if bound_bits == f64::NEG_INFINITY {
        return BigInt::zero();
    }
    let needed_bits = bound_bits + 8.0;
    let mut residues: Vec<(u64, u64)> = Vec::new();
    let mut bits = 0.0;
    let mut primes = PrimeStream::new();
    let mut skipped = 0usize;
    while bits < needed_bits {
        let p = primes.next_prime();
        match det_mod_prime(m, p) {
            Some(r) => {
                residues.push((r, p));
                bits += libm::log2(p as f64);
            }
            None => {
                skipped += 1;
                // an integer zero pivot makes every prime fail; fall back to dense
                if skipped > 8 && residues.is_empty() {
                    let dense = m.to_dense().into_iter().map(|r| r.into_iter().map(BigInt::from).collect()).collect();
                    return bareiss(dense);
                }
            }
        }
    }
    let (value, modulus) = crt(&residues);
    let modulus_big = BigInt::from(modulus);
    let mut det = BigInt::from(value);
    if &det * 2 > modulus_big {
        det -= &modulus_big;
    }
    loop {
        let p = primes.next_prime();
        if let Some(r) = det_mod_prime(m, p) {
            let check = det.mod_floor(&BigInt::from(p)).to_u64().expect("residue fits");
            assert_eq!(check, r, "modular determinant failed confirmation");
            break;
        }
    }
    det
}

/// Incremental CRT; returns the residue in `[0, M)` and `M`.
fn crt(residues: &[(u64, u64)]) -> (BigUint, BigUint) {
    let mut x = BigUint::zero();
    let mut modulus = BigUint::one();
    for &(r, p) in residues {
        let x_mod = (&x % p).to_u64().expect("fits");
        let m_mod = (&modulus % p).to_u64().expect("fits");
        let diff = (r + p - x_mod) % p;
        let t = mul_mod(diff, pow_mod(m_mod, p - 2, p), p);
        x += &modulus * t;
        modulus *= p;
    }
    (x, modulus)
}

#[inline]
fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, p);
        }
        b = mul_mod(b, b, p);
        e >>= 1;
    }
    acc
}

/// Montgomery arithmetic modulo an odd prime below 2^63.
#[derive(Clone, Copy)]
struct Montgomery {
    p: u64,
    p_inv: u64,
    r2: u64,
}

impl Montgomery {
    fn new(p: u64) -> Self {
        // Newton iteration for p^{-1} mod 2^64
        let mut inv = p;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(p.wrapping_mul(inv)));
        }
        let r = ((1u128 << 64) % p as u128) as u64;
        let r2 = ((r as u128 * r as u128) % p as u128) as u64;
        Montgomery { p, p_inv: inv.wrapping_neg(), r2 }
    }

    #[inline]
    fn reduce(&self, t: u128) -> u64 {
        let m = (t as u64).wrapping_mul(self.p_inv);
        let u = ((t + m as u128 * self.p as u128) >> 64) as u64;
        if u >= self.p {
            u - self.p
        } else {
            u
        }
    }

    #[inline]
    fn mul(&self, a: u64, b: u64) -> u64 {
        self.reduce(a as u128 * b as u128)
    }

    fn to_mont(&self, a: u64) -> u64 {
        self.mul(a % self.p, self.r2)
    }

    fn from_mont(&self, a: u64) -> u64 {
        self.reduce(a as u128)
    }

    #[inline]
    fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    fn inv(&self, a: u64) -> u64 {
        // a is in Montgomery form; invert via Fermat in plain form
        let plain = self.from_mont(a);
        self.to_mont(pow_mod(plain, self.p - 2, self.p))
    }
}

fn det_mod_prime(m: &SparseSymmetric, p: u64) -> Option<u64> {
    let mont = Montgomery::new(p);
    let lift = |v: i64| -> u64 {
        let r = v.rem_euclid(p as i64) as u64;
        mont.to_mont(r)
    };
    let mut rows: Vec<Vec<(usize, u64)>> = m
        .upper
        .iter()
        .map(|r| r.iter().map(|&(j, v)| (j, lift(v))).filter(|e| e.1 != 0).collect())
        .collect();
    let mut det = mont.to_mont(1);
    let mut scratch: Vec<(usize, u64)> = Vec::new();
    for k in 0..m.n {
        let row_k = core::mem::take(&mut rows[k]);
        let (first_col, pivot) = *row_k.first()?;
        if first_col != k {
            return None;
        }
        det = mont.mul(det, pivot);
        let pivot_inv = mont.inv(pivot);
        for (pos, &(i, a_ki)) in row_k.iter().enumerate().skip(1) {
            // row_i[j] -= a_ki * a_kj / a_kk for j >= i
            let factor = mont.mul(a_ki, pivot_inv);
            let tail = &row_k[pos..];
            let target = core::mem::take(&mut rows[i]);
            scratch.clear();
            let (mut x, mut y) = (0usize, 0usize);
            while x < target.len() || y < tail.len() {
                let take_x = y >= tail.len() || (x < target.len() && target[x].0 < tail[y].0);
                let take_y = x >= target.len() || (y < tail.len() && tail[y].0 < target[x].0);
                if take_x {
                    scratch.push(target[x]);
                    x += 1;
                } else if take_y {
                    let v = mont.sub(0, mont.mul(factor, tail[y].1));
                    if v != 0 {
                        scratch.push((tail[y].0, v));
                    }
                    y += 1;
                } else {
                    let v = mont.sub(target[x].1, mont.mul(factor, tail[y].1));
                    if v != 0 {
                        scratch.push((target[x].0, v));
                    }
                    x += 1;
                    y += 1;
                }
            }
            rows[i] = core::mem::take(&mut scratch);
            scratch = target;
        }
    }
    Some(mont.from_mont(det))
}

/// Primes just below 2^62, descending.
struct PrimeStream {
    next: u64,
}

impl PrimeStream {
    fn new() -> Self {
        PrimeStream { next: (1u64 << 62) - 1 }
    }

    fn next_prime(&mut self) -> u64 {
        loop {
            let c = self.next;
            self.next -= 2;
            if is_prime(c) {
                return c;
            }
        }
    }
}

/// Deterministic Miller–Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &SMALL {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &SMALL {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Determinant of a dense integer matrix, choosing the method by size.
pub fn integer_det(m: &[Vec<i64>]) -> BigInt {
    let dense: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect();
    bareiss(dense)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(m: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
        m.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect()
    }

    #[test]
    fn bareiss_small() {
        assert_eq!(bareiss(vec![]), BigInt::one());
        assert_eq!(bareiss(big(&[vec![0, 1], vec![1, 0]])), BigInt::from(-1));
        assert_eq!(bareiss(big(&[vec![2, 0, 0], vec![0, 3, 0], vec![0, 0, 4]])), BigInt::from(24));
        assert_eq!(bareiss(big(&[vec![1, 2], vec![2, 4]])), BigInt::zero());
    }

    #[test]
    fn primes() {
        assert!(is_prime(2) && is_prime(97) && is_prime((1u64 << 61) - 1));
        assert!(!is_prime(1) && !is_prime(91) && !is_prime(3215031751));
        let mut s = PrimeStream::new();
        let p = s.next_prime();
        assert!(p < (1 << 62) && is_prime(p));
        assert!(s.next_prime() < p);
    }

    #[test]
    fn cycle_laplacian_cofactor() {
        // reduced Laplacian of C_n: tau = n
        for n in [3usize, 10, 257] {
            let k = n - 1;
            let mut entries = Vec::new();
            for i in 0..k {
                entries.push((i, i, 2));
                if i + 1 < k {
                    entries.push((i, i + 1, -1));
                }
            }
            let m = SparseSymmetric::from_upper(k, entries);
            assert_eq!(sparse_symmetric_det(&m), BigInt::from(n));
        }
    }

    #[test]
    fn singular_sparse_matrix() {
        let m = SparseSymmetric::from_upper(2, [(0, 0, 1), (0, 1, -1), (1, 1, 1)]);
        assert_eq!(sparse_symmetric_det(&m), BigInt::zero());
    }

    fn symmetric(n: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
        proptest::collection::vec(-6i64..=6, n * (n + 1) / 2).prop_map(move |vals| {
            let mut m = vec![vec![0i64; n]; n];
            let mut it = vals.into_iter();
            for i in 0..n {
                for j in i..n {
                    let v = it.next().unwrap();
                    m[i][j] = v;
                    m[j][i] = v;
                }
            }
            m
        })
    }

    proptest! {
        #[test]
        fn modular_agrees_with_bareiss(m in (1usize..=7).prop_flat_map(symmetric)) {
            let n = m.len();
            let entries = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).map(|(i, j)| (i, j, m[i][j]));
            let s = SparseSymmetric::from_upper(n, entries.collect::<Vec<_>>());
            prop_assert_eq!(sparse_symmetric_det(&s), bareiss(big(&m)));
        }
    }
}
