//! Hermite and Smith normal forms of small integer matrices.
//!
//! Matrices here are tiny (dimension ≤ 8 in practice) and stored as
//! `Vec<Vec<i64>>`; every operation is overflow-checked.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type IntMatrix = Vec<Vec<i64>>;

fn add(a: i64, b: i64) -> Result<i64> {
    a.checked_add(b).ok_or(Error::Overflow)
}

fn mul(a: i64, b: i64) -> Result<i64> {
    a.checked_mul(b).ok_or(Error::Overflow)
}

/// `dst -= q * src`, entrywise.
fn axpy(dst: &mut [i64], q: i64, src: &[i64]) -> Result<()> {
    for (d, &s) in dst.iter_mut().zip(src) {
        *d = add(*d, -mul(q, s)?)?;
    }
    Ok(())
}

pub fn transpose(m: &IntMatrix) -> IntMatrix {
    if m.is_empty() {
        return Vec::new();
    }
    (0..m[0].len())
        .map(|j| m.iter().map(|row| row[j]).collect())
        .collect()
}

/// Exact determinant of a square integer matrix (fraction-free elimination
/// in `i128`).
pub fn determinant(m: &IntMatrix) -> Result<i64> {
    let n = m.len();
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&v| v as i128).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| a[i][k] != 0) else {
            return Ok(0);
        };
        if p != k {
            a.swap(p, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = a[k][k]
                    .checked_mul(a[i][j])
                    .and_then(|x| a[i][k].checked_mul(a[k][j]).and_then(|y| x.checked_sub(y)))
                    .ok_or(Error::Overflow)?;
                a[i][j] = v / prev;
            }
        }
        prev = a[k][k];
    }
    let det = if n == 0 { 1 } else { sign * a[n - 1][n - 1] };
    i64::try_from(det).map_err(|_| Error::Overflow)
}

/// Row-style Hermite normal form of the lattice spanned by `gens`.
///
/// Returns the nonzero rows `h_1, …, h_r` in echelon form: each pivot is
/// positive and strictly to the right of the previous one, and entries above
/// a pivot lie in `[0, pivot)`. The result depends only on the lattice.
pub fn hermite_rows(gens: &[Vec<i64>], dim: usize) -> Result<Vec<Vec<i64>>> {
    let mut rows: Vec<Vec<i64>> = gens
        .iter()
        .filter(|g| g.iter().any(|&v| v != 0))
        .cloned()
        .collect();
    for r in &rows {
        assert_eq!(r.len(), dim, "generator length must equal the lattice dimension");
    }
    let mut out: Vec<Vec<i64>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    for col in 0..dim {
        // Euclid on column `col` among the remaining rows
        loop {
            let mut best: Option<usize> = None;
            for (i, r) in rows.iter().enumerate() {
                if r[col] != 0 && best.is_none_or(|b| r[col].abs() < rows[b][col].abs()) {
                    best = Some(i);
                }
            }
            let Some(b) = best else { break };
            let pivot_row = rows[b].clone();
            let mut reduced_any = false;
            for (i, r) in rows.iter_mut().enumerate() {
                if i != b && r[col] != 0 {
                    let q = r[col].div_euclid(pivot_row[col]);
                    axpy(r, q, &pivot_row)?;
                    reduced_any = true;
                }
            }
            if !reduced_any || rows.iter().enumerate().all(|(i, r)| i == b || r[col] == 0) {
                let mut p = rows.swap_remove(b);
                if p[col] < 0 {
                    for v in &mut p {
                        *v = -*v;
                    }
                }
                out.push(p);
                pivots.push(col);
                rows.retain(|r| r.iter().any(|&v| v != 0));
                break;
            }
        }
    }
    // reduce entries above each pivot
    for k in 0..out.len() {
        let (col, pv) = (pivots[k], out[k][pivots[k]]);
        let pivot_row = out[k].clone();
        for row in out.iter_mut().take(k) {
            let q = row[col].div_euclid(pv);
            if q != 0 {
                axpy(row, q, &pivot_row)?;
            }
        }
    }
    Ok(out)
}

pub type BigMatrix = Vec<Vec<BigInt>>;

/// Smith normal form `U · A · V = diag(r_1, …, r_n)` of a nonsingular square
/// matrix, with `r_1 | r_2 | … | r_n`, all `r_i > 0`, and `U`, `V` unimodular.
///
/// The transforms are big integers: their entries grow quickly with `n` even
/// when `A` is small.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithForm {
    pub u: BigMatrix,
    pub v: BigMatrix,
    /// `U⁻¹`. Its columns `b_k` give `Λ = ⟨r_k b_k⟩` for the column span `Λ`
    /// of `A`.
    pub u_inv: BigMatrix,
    pub factors: Vec<i64>,
}

fn big_identity(n: usize) -> BigMatrix {
    (0..n).map(|i| (0..n).map(|j| BigInt::from(i64::from(i == j))).collect()).collect()
}

/// `dst -= q * src`, entrywise.
fn big_axpy(dst: &mut [BigInt], q: &BigInt, src: &[BigInt]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d -= q * s;
    }
}

pub fn to_big(m: &IntMatrix) -> BigMatrix {
    m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

pub fn big_matmul(a: &BigMatrix, b: &BigMatrix) -> BigMatrix {
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| (0..cols).map(|j| row.iter().zip(b).map(|(x, r)| x * &r[j]).sum()).collect())
        .collect()
}

pub fn smith(a: &IntMatrix) -> Result<SmithForm> {
    let n = a.len();
    if a.iter().any(|r| r.len() != n) {
        return Err(Error::BasisShape(n));
    }
    let mut m = to_big(a);
    let mut u = big_identity(n);
    let mut v = big_identity(n);
    // column mirror of every row op on `u`
    let mut u_inv = big_identity(n);

    for t in 0..n {
        loop {
            // smallest nonzero entry of the trailing block becomes the pivot
            let mut best: Option<(usize, usize)> = None;
            for i in t..n {
                for j in t..n {
                    if !m[i][j].is_zero() && best.is_none_or(|(bi, bj)| m[i][j].magnitude() < m[bi][bj].magnitude()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return Err(Error::SingularBasis);
            };
            m.swap(t, pi);
            u.swap(t, pi);
            for row in u_inv.iter_mut() {
                row.swap(t, pi);
            }
            for row in m.iter_mut().chain(v.iter_mut()) {
                row.swap(t, pj);
            }

            let p = m[t][t].clone();
            let mut clean = true;
            for i in t + 1..n {
                let q = &m[i][t] / &p;
                if !q.is_zero() {
                    let (src_m, src_u) = (m[t].clone(), u[t].clone());
                    big_axpy(&mut m[i], &q, &src_m);
                    big_axpy(&mut u[i], &q, &src_u);
                    for row in u_inv.iter_mut() {
                        let x = &q * &row[i];
                        row[t] += x;
                    }
                }
                clean &= m[i][t].is_zero();
            }
            for j in t + 1..n {
                let q = &m[t][j] / &p;
                if !q.is_zero() {
                    for row in m.iter_mut().chain(v.iter_mut()) {
                        let x = &q * &row[t];
                        row[j] -= x;
                    }
                }
                clean &= m[t][j].is_zero();
            }
            if !clean {
                continue;
            }
            // divisibility: fold an offending row into row t and retry
            let offending = (t + 1..n).find(|&i| (t + 1..n).any(|j| !(&m[i][j] % &p).is_zero()));
            if let Some(i) = offending {
                let (src_m, src_u) = (m[i].clone(), u[i].clone());
                big_axpy(&mut m[t], &BigInt::from(-1), &src_m);
                big_axpy(&mut u[t], &BigInt::from(-1), &src_u);
                for row in u_inv.iter_mut() {
                    let x = row[t].clone();
                    row[i] -= x;
                }
                continue;
            }
            break;
        }
        if m[t][t].is_negative() {
            for x in m[t].iter_mut().chain(u[t].iter_mut()) {
                *x = -&*x;
            }
            for row in u_inv.iter_mut() {
                row[t] = -&row[t];
            }
        }
    }
    let factors = (0..n).map(|i| m[i][i].to_i64().ok_or(Error::Overflow)).collect::<Result<_>>()?;
    Ok(SmithForm { u, v, u_inv, factors })
}
