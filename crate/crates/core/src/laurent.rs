//! Exact Laurent polynomials in `d` variables with big-integer coefficients,
//! and square matrices over that ring.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::math::RootTable;

/// Exponent vector of a monomial `x^s`.
pub type Exponent = Vec<i64>;

/// Tolerance on `|c_k| - 1` accepted by [`LaurentPoly::evaluate`].
pub const UNIT_MODULUS_TOL: f64 = 1e-12;

/// A Laurent polynomial in `vars` variables. Zero coefficients are never
/// stored, so structural equality is polynomial equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    vars: usize,
    terms: BTreeMap<Exponent, BigInt>,
}

impl LaurentPoly {
    pub fn zero(vars: usize) -> Self {
        LaurentPoly { vars, terms: BTreeMap::new() }
    }

    pub fn one(vars: usize) -> Self {
        Self::constant(vars, 1)
    }

    pub fn constant(vars: usize, c: impl Into<BigInt>) -> Self {
        Self::monomial(vars, vec![0; vars], c)
    }

    /// `c · x^exp`. Panics if `exp.len() != vars`.
    pub fn monomial(vars: usize, exp: Exponent, c: impl Into<BigInt>) -> Self {
        assert_eq!(exp.len(), vars, "exponent length must equal the variable count");
        let c = c.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        LaurentPoly { vars, terms }
    }

    /// The variable `x_k` (0-based `k`).
    pub fn var(vars: usize, k: usize) -> Self {
        let mut e = vec![0; vars];
        e[k] = 1;
        Self::monomial(vars, e, 1)
    }

    /// Builds a polynomial from `(exponent, coefficient)` pairs, summing
    /// repeated exponents.
    pub fn from_terms<I, C>(vars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Exponent, C)>,
        C: Into<BigInt>,
    {
        let mut p = Self::zero(vars);
        for (e, c) in terms {
            assert_eq!(e.len(), vars, "exponent length must equal the variable count");
            p.add_term(e, c.into());
        }
        p
    }

    /// 2 − x^w − x^{−w}, the cycle factor of a monodromy `w`.
    pub fn cycle_factor(w: &[i64]) -> Self {
        let vars = w.len();
        let neg: Exponent = w.iter().map(|&a| -a).collect();
        Self::from_terms(vars, [(vec![0; vars], 2), (w.to_vec(), -1), (neg, -1)])
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &BigInt)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exp: &[i64]) -> BigInt {
        self.terms.get(exp).cloned().unwrap_or_default()
    }

    fn add_term(&mut self, e: Exponent, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            alloc::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            alloc::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check_vars(&self, other: &Self) -> Result<()> {
        if self.vars == other.vars {
            Ok(())
        } else {
            Err(Error::VariableMismatch(self.vars, other.vars))
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_vars(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_vars(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_vars(other)?;
        let mut out = Self::zero(self.vars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero(self.vars);
        }
        LaurentPoly {
            vars: self.vars,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    /// Multiplies by the monomial `x^shift`.
    pub fn shift(&self, shift: &[i64]) -> Self {
        assert_eq!(shift.len(), self.vars);
        LaurentPoly {
            vars: self.vars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.iter().zip(shift).map(|(a, b)| a + b).collect(), c.clone()))
                .collect(),
        }
    }

    /// Substitutes `x_k ↦ x_k^{-1}` for every variable.
    pub fn reciprocal(&self) -> Self {
        LaurentPoly {
            vars: self.vars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.iter().map(|a| -a).collect(), c.clone()))
                .collect(),
        }
    }

    /// True iff `self = ±x^s · other` for some monomial `x^s`.
    ///
    /// Both polynomials are aligned on their largest exponent in the term
    /// order; a unit multiple must map that term onto the other's.
    pub fn unit_equivalent(&self, other: &Self) -> bool {
        if self.vars != other.vars || self.terms.len() != other.terms.len() {
            return false;
        }
        let (Some((ea, ca)), Some((eb, cb))) =
            (self.terms.last_key_value(), other.terms.last_key_value())
        else {
            return true;
        };
        let sign = if ca == cb {
            BigInt::one()
        } else if *ca == -cb {
            -BigInt::one()
        } else {
            return false;
        };
        let s: Exponent = ea.iter().zip(eb).map(|(a, b)| a - b).collect();
        other.shift(&s).scale(&sign) == *self
    }

    /// Evaluates at a point of the unit torus.
    ///
    /// Integer powers use repeated squaring; negative powers use the
    /// conjugate, which is why unit modulus is required. Coefficients are
    /// converted with `BigInt::to_f64`, exact up to 2^53 in magnitude and
    /// rounded to nearest beyond that.
    pub fn evaluate(&self, point: &[Complex64]) -> Result<Complex64> {
        if point.len() != self.vars {
            return Err(Error::PointLength { found: point.len(), expected: self.vars });
        }
        for (k, c) in point.iter().enumerate() {
            if (crate::math::abs(*c) - 1.0).abs() > UNIT_MODULUS_TOL {
                return Err(Error::NotUnitModulus(k));
            }
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, coeff) in &self.terms {
            let mut term = Complex64::new(coeff.to_f64().unwrap_or(f64::NAN), 0.0);
            for (&a, &c) in e.iter().zip(point) {
                let base = if a < 0 { c.conj() } else { c };
                term *= pow_unsigned(base, a.unsigned_abs());
            }
            acc += term;
        }
        Ok(acc)
    }

    /// Float image used for fast repeated evaluation at rational points.
    pub fn phase_evaluator(&self) -> PhaseEvaluator {
        PhaseEvaluator {
            vars: self.vars,
            coeffs: self.terms.values().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect(),
            exps: self.terms.keys().cloned().collect(),
        }
    }

    /// Lowest and highest exponent of each variable, or `None` for zero.
    pub fn exponent_range(&self) -> Option<Vec<(i64, i64)>> {
        let mut it = self.terms.keys();
        let first = it.next()?;
        let mut r: Vec<(i64, i64)> = first.iter().map(|&a| (a, a)).collect();
        for e in it {
            for (slot, &a) in r.iter_mut().zip(e) {
                slot.0 = slot.0.min(a);
                slot.1 = slot.1.max(a);
            }
        }
        Some(r)
    }
}

fn pow_unsigned(mut base: Complex64, mut n: u64) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    while n > 0 {
        if n & 1 == 1 {
            acc *= base;
        }
        base *= base;
        n >>= 1;
    }
    acc
}

/// Evaluates a polynomial at points whose coordinates are roots of unity
/// `exp(2πi k_j / den)`, reducing each monomial's phase exactly in integer
/// arithmetic before the table lookup.
#[derive(Debug, Clone)]
pub struct PhaseEvaluator {
    vars: usize,
    coeffs: Vec<f64>,
    exps: Vec<Exponent>,
}

impl PhaseEvaluator {
    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn exponents(&self) -> &[Exponent] {
        &self.exps
    }

    /// Value at `(exp(2πi k_1/den), …)`; `table.denominator()` is `den`.
    pub fn eval(&self, numerators: &[i64], table: &RootTable) -> Complex64 {
        let den = table.denominator() as i128;
        let mut acc = Complex64::new(0.0, 0.0);
        for (c, e) in self.coeffs.iter().zip(&self.exps) {
            let mut phase: i128 = 0;
            for (&a, &k) in e.iter().zip(numerators) {
                phase = (phase + a as i128 * k as i128) % den;
            }
            acc += table.get(phase as i64) * *c;
        }
        acc
    }
}

/// Orders exponents by comparing the last variable first, each exponent in
/// the sequence 0, 1, −1, 2, −2, … . Constants come first and `x_k^{±1}`
/// precede `x_{k+1}^{±1}`.
pub fn display_order(a: &[i64], b: &[i64]) -> Ordering {
    fn zigzag(v: i64) -> u64 {
        if v > 0 {
            2 * v as u64 - 1
        } else {
            2 * v.unsigned_abs()
        }
    }
    for (x, y) in a.iter().rev().zip(b.iter().rev()) {
        match zigzag(*x).cmp(&zigzag(*y)) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

/// Renders as `4 - x1 - x1^-1 - x2 - x2^-1`: coefficient first, `*` between
/// factors, unit coefficients and unit exponents omitted.
impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut keys: Vec<&Exponent> = self.terms.keys().collect();
        keys.sort_by(|a, b| display_order(a, b));
        for (idx, e) in keys.into_iter().enumerate() {
            let c = &self.terms[e];
            let negative = c.is_negative();
            match (idx, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let mag = c.abs();
            let mut factors: Vec<alloc::string::String> = Vec::new();
            let constant = e.iter().all(|&a| a == 0);
            if constant || !mag.is_one() {
                factors.push(alloc::format!("{mag}"));
            }
            for (k, &a) in e.iter().enumerate() {
                match a {
                    0 => {}
                    1 => factors.push(alloc::format!("x{}", k + 1)),
                    _ => factors.push(alloc::format!("x{}^{}", k + 1, a)),
                }
            }
            f.write_str(&factors.join("*"))?;
        }
        Ok(())
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    /// Panics on a variable-count mismatch; use `checked_add` to handle it.
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.checked_add(rhs).expect("variable count mismatch")
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.checked_sub(rhs).expect("variable count mismatch")
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.checked_mul(rhs).expect("variable count mismatch")
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        self.scale(&-BigInt::one())
    }
}

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        -&self
    }
}

/// Square matrix over the Laurent ring, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentMatrix {
    size: usize,
    vars: usize,
    entries: Vec<LaurentPoly>,
}

impl LaurentMatrix {
    pub fn zeros(size: usize, vars: usize) -> Self {
        LaurentMatrix { size, vars, entries: vec![LaurentPoly::zero(vars); size * size] }
    }

    pub fn from_rows(vars: usize, rows: Vec<Vec<LaurentPoly>>) -> Result<Self> {
        let size = rows.len();
        let mut entries = Vec::with_capacity(size * size);
        for row in rows {
            if row.len() != size {
                return Err(Error::Numerical(alloc::format!(
                    "row of length {} in a {size}x{size} matrix",
                    row.len()
                )));
            }
            for p in row {
                if p.vars != vars {
                    return Err(Error::VariableMismatch(vars, p.vars));
                }
                entries.push(p);
            }
        }
        Ok(LaurentMatrix { size, vars, entries })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn get(&self, i: usize, j: usize) -> &LaurentPoly {
        &self.entries[i * self.size + j]
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut LaurentPoly {
        &mut self.entries[i * self.size + j]
    }

    pub fn transpose(&self) -> Self {
        let n = self.size;
        let mut out = self.clone();
        for i in 0..n {
            for j in 0..n {
                out.entries[j * n + i] = self.entries[i * n + j].clone();
            }
        }
        out
    }

    pub fn map(&self, f: impl Fn(&LaurentPoly) -> LaurentPoly) -> Self {
        LaurentMatrix {
            size: self.size,
            vars: self.vars,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let n = self.size;
        for j in 0..n {
            self.entries.swap(a * n + j, b * n + j);
        }
    }

    /// Principal submatrix on the given indices, in the given order.
    pub fn submatrix(&self, idx: &[usize]) -> Self {
        let mut entries = Vec::with_capacity(idx.len() * idx.len());
        for &i in idx {
            for &j in idx {
                entries.push(self.get(i, j).clone());
            }
        }
        LaurentMatrix { size: idx.len(), vars: self.vars, entries }
    }

    /// Entrywise evaluation at a unit-torus point, row-major.
    pub fn evaluate(&self, point: &[Complex64]) -> Result<Vec<Complex64>> {
        self.entries.iter().map(|p| p.evaluate(point)).collect()
    }

    /// Exact determinant by cofactor expansion along rows with every minor
    /// memoized by its column set: `O(2^n · n)` ring operations and no
    /// division. The empty matrix has determinant 1.
    pub fn determinant(&self) -> LaurentPoly {
        let n = self.size;
        assert!(n < usize::BITS as usize, "matrix too large for subset memoization");
        if n == 0 {
            return LaurentPoly::one(self.vars);
        }
        // minors[mask] = det of rows (n - |mask|)..n restricted to columns in mask
        let mut minors: Vec<Option<LaurentPoly>> = vec![None; 1usize << n];
        minors[0] = Some(LaurentPoly::one(self.vars));
        for mask in 1usize..(1 << n) {
            let row = n - mask.count_ones() as usize;
            let mut acc = LaurentPoly::zero(self.vars);
            let mut position = 0usize;
            for j in 0..n {
                if mask & (1 << j) == 0 {
                    continue;
                }
                let a = self.get(row, j);
                if !a.is_zero() {
                    if let Some(minor) = &minors[mask & !(1 << j)] {
                        if !minor.is_zero() {
                            let t = a * minor;
                            acc = if position % 2 == 0 { &acc + &t } else { &acc - &t };
                        }
                    }
                }
                position += 1;
            }
            minors[mask] = Some(acc);
        }
        minors.pop().flatten().unwrap_or_else(|| LaurentPoly::zero(self.vars))
    }
}
