//! Floating point helpers shared by the numeric modules.
//!
//! All transcendental functions go through `libm` so results do not depend on
//! whether the host links `std`.

use num_bigint::BigUint;
use num_complex::Complex64;

pub const TAU: f64 = core::f64::consts::TAU;

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn cis_turns(t: f64) -> Complex64 {
    let a = TAU * t;
    Complex64::new(libm::cos(a), libm::sin(a))
}

#[inline]
pub fn abs(z: Complex64) -> f64 {
    libm::hypot(z.re, z.im)
}

/// Pairwise (cascade) summation with a fixed split rule.
///
/// The split depends only on the slice length, so the result is reproducible
/// for a given input order regardless of how the inputs were produced.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const LEAF: usize = 16;
    if xs.len() <= LEAF {
        let mut s = 0.0;
        for &x in xs {
            s += x;
        }
        return s;
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Natural logarithm of an arbitrary-precision integer. `ln(0)` is `-inf`.
pub fn big_ln(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 64 {
        let v = x.iter_u64_digits().next().unwrap_or(0);
        return ln(v as f64);
    }
    let shift = bits - 64;
    let top: BigUint = x >> shift;
    let v = top.iter_u64_digits().next().unwrap_or(0);
    ln(v as f64) + shift as f64 * core::f64::consts::LN_2
}

/// Table of `exp(2πi k / den)` for `k = 0..den`.
#[derive(Debug, Clone)]
pub struct RootTable {
    den: i64,
    values: alloc::vec::Vec<Complex64>,
}

impl RootTable {
    pub fn new(den: i64) -> Self {
        assert!(den > 0, "root table needs a positive denominator");
        let values = (0..den)
            .map(|k| cis_turns(k as f64 / den as f64))
            .collect();
        RootTable { den, values }
    }

    pub fn denominator(&self) -> i64 {
        self.den
    }

    /// `exp(2πi k / den)` for any integer `k`.
    #[inline]
    pub fn get(&self, k: i64) -> Complex64 {
        self.values[k.rem_euclid(self.den) as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_naive_on_integers() {
        let xs: alloc::vec::Vec<f64> = (0..1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&xs), 499500.0);
        assert_eq!(pairwise_sum(&[]), 0.0);
    }

    #[test]
    fn big_ln_small_and_large() {
        assert_eq!(big_ln(&BigUint::from(1u32)), 0.0);
        assert!((big_ln(&BigUint::from(1000u32)) - ln(1000.0)).abs() < 1e-12);
        let big = BigUint::from(3u32).pow(500);
        assert!((big_ln(&big) - 500.0 * ln(3.0)).abs() < 1e-9);
    }

    #[test]
    fn root_table_wraps() {
        let t = RootTable::new(4);
        assert!((t.get(1) - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        assert_eq!(t.get(-3), t.get(1));
        assert_eq!(t.get(8), t.get(0));
    }
}
