//! Logarithmic Mahler measure `m(f)`: the mean of `ln |f|` over the unit
//! torus, and the growth-rate reports built on it.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;
use num_traits::ToPrimitive;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::laplacian::laplacian_matrix;
use crate::laurent::{LaurentPoly, PhaseEvaluator};
use crate::math::{abs, cis_turns, ln, pairwise_sum, sqrt, RootTable};
use crate::periodic_graph::{grid_graph, PeriodicGraph};
use crate::quotient::{build_quotient, spanning_tree_count};
use crate::sublattice::{Sublattice, DEFAULT_MAX_INDEX};

/// Largest number of torus nodes `M^d` accepted by the midpoint grid.
pub const MAX_GRID_NODES: u64 = 100_000_000;
/// Nodes per block of the Monte-Carlo sampler.
pub const MC_BLOCK: u64 = 1 << 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MahlerMethod {
    JensenRoots,
    MidpointGrid,
    MonteCarlo,
}

impl MahlerMethod {
    pub fn name(self) -> &'static str {
        match self {
            MahlerMethod::JensenRoots => "jensen_roots",
            MahlerMethod::MidpointGrid => "midpoint_grid",
            MahlerMethod::MonteCarlo => "monte_carlo",
        }
    }
}

impl fmt::Display for MahlerMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A numeric value of `m(f)` in nats.
///
/// `error_bound` is heuristic. For Jensen it sums the estimated distances of
/// the computed roots near or outside the unit circle from true roots; for the midpoint grid it is `|v(M) − v(M/2)|`; for Monte-Carlo
/// it is three standard errors. `samples` is the degree, the grid size `M`
/// or the number of samples. `dropped` counts nodes where `|f|` underflowed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MahlerEstimate {
    pub value: f64,
    pub method: MahlerMethod,
    pub error_bound: f64,
    pub samples: u64,
    pub dropped: u64,
}

fn horner(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64) {
    // coeffs from highest degree down; returns p(z), p'(z)
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Distance from `z` to a root of `p`, estimated as
/// `min_k (|p(z)| / |t_k|)^{1/k}` over the Taylor coefficients `t_k` of `p`
/// at `z`, `k ≤ 3`, so that double and triple roots get a sensible bound.
fn root_error(coeffs: &[f64], z: Complex64) -> f64 {
    let mut work: Vec<Complex64> = coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect();
    let mut taylor = [Complex64::new(0.0, 0.0); 4];
    for t in taylor.iter_mut() {
        if work.is_empty() {
            break;
        }
        // synthetic division by (x − z): remainder is the next coefficient
        let mut acc = Complex64::new(0.0, 0.0);
        let mut quotient = Vec::with_capacity(work.len().saturating_sub(1));
        for (i, &c) in work.iter().enumerate() {
            acc = acc * z + c;
            if i + 1 < work.len() {
                quotient.push(acc);
            }
        }
        *t = acc;
        work = quotient;
    }
    let p = abs(taylor[0]);
    (1..4)
        .filter(|&k| abs(taylor[k]) > 0.0)
        .map(|k| crate::math::exp(ln(p / abs(taylor[k])) / k as f64))
        .fold(f64::INFINITY, f64::min)
}

/// Simultaneous root iteration, used when the companion matrix QR
/// iteration stalls.
fn aberth(coeffs: &[f64]) -> Result<Vec<Complex64>> {
    let n = coeffs.len() - 1;
    let radius = crate::math::exp(ln((coeffs[n] / coeffs[0]).abs()) / n as f64);
    let mut z: Vec<Complex64> =
        (0..n).map(|k| cis_turns((k as f64 + 0.3) / n as f64) * radius).collect();
    for _ in 0..5000 {
        let mut moved = 0.0f64;
        for k in 0..n {
            let (p, dp) = horner(coeffs, z[k]);
            if abs(p) == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..n).filter(|&j| j != k).map(|j| (z[k] - z[j]).inv()).sum();
            let step = ratio / (1.0 - ratio * repulsion);
            z[k] -= step;
            moved = moved.max(abs(step) / abs(z[k]).max(1e-300));
        }
        if moved < 1e-15 {
            return Ok(z);
        }
    }
    // multiple roots converge linearly; accept what the residuals allow
    if z.iter().all(|&r| abs(horner(coeffs, r).0) <= 1e-8 * coeffs.iter().map(|c| c.abs()).sum::<f64>()) {
        Ok(z)
    } else {
        Err(Error::Numerical("polynomial roots did not converge".into()))
    }
}

/// Jensen's formula: with `f = x^k p(x)`, `m(f) = ln |lead(p)| + Σ ln max(1, |λ|)`
/// over the roots `λ` of `p`, found as companion matrix eigenvalues and
/// polished by Newton steps.
pub fn mahler_jensen(f: &LaurentPoly) -> Result<MahlerEstimate> {
    if f.vars() != 1 {
        return Err(Error::NotUnivariate(f.vars()));
    }
    let range = f.exponent_range().ok_or(Error::ZeroPolynomial)?;
    let (lo, hi) = range[0];
    let degree = (hi - lo) as usize;
    let mut coeffs = vec![0.0f64; degree + 1];
    for (e, c) in f.terms() {
        coeffs[(hi - e[0]) as usize] = c.to_f64().ok_or(Error::Overflow)?;
    }
    let lead = coeffs[0];
    let mut value = ln(lead.abs());
    let mut error_bound = 0.0;
    if degree > 0 {
        let mut companion = nalgebra::DMatrix::<f64>::zeros(degree, degree);
        for j in 0..degree {
            companion[(0, j)] = -coeffs[j + 1] / lead;
        }
        for i in 1..degree {
            companion[(i, i - 1)] = 1.0;
        }
        let roots: Vec<Complex64> = match nalgebra::linalg::Schur::try_new(companion, f64::EPSILON, 10_000) {
            Some(schur) => schur.complex_eigenvalues().iter().copied().collect(),
            None => aberth(&coeffs)?,
        };
        let mut logs = Vec::with_capacity(degree);
        for &root in &roots {
            let mut z: Complex64 = root;
            for _ in 0..3 {
                let (p, dp) = horner(&coeffs, z);
                if abs(dp) == 0.0 {
                    break;
                }
                let next = z - p / dp;
                if abs(horner(&coeffs, next).0) < abs(p) {
                    z = next;
                } else {
                    break;
                }
            }
            let step = root_error(&coeffs, z);
            let r = abs(z);
            if r + step >= 1.0 {
                error_bound += step / r.max(1.0 - step).max(f64::MIN_POSITIVE);
            }
            logs.push(ln(r.max(1.0)));
        }
        value += pairwise_sum(&logs);
    }
    Ok(MahlerEstimate { value, method: MahlerMethod::JensenRoots, error_bound, samples: degree as u64, dropped: 0 })
}

/// Partial sums of one block of quadrature or sampling nodes.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BlockSum {
    pub sum: f64,
    pub sum_sq: f64,
    pub count: u64,
    pub dropped: u64,
}

impl BlockSum {
    fn from_logs(logs: &[f64], dropped: u64) -> Self {
        let sq: Vec<f64> = logs.iter().map(|v| v * v).collect();
        BlockSum { sum: pairwise_sum(logs), sum_sq: pairwise_sum(&sq), count: logs.len() as u64, dropped }
    }
}

/// A computation split into independent blocks. Results depend only on the
/// block index, so the blocks may be evaluated in any order or in parallel.
pub trait BlockSource: Sync {
    fn block_count(&self) -> u64;
    fn block(&self, b: u64) -> BlockSum;
}

/// Evaluates every block in order on the current thread.
pub fn run_sequential(src: &dyn BlockSource) -> Vec<BlockSum> {
    (0..src.block_count()).map(|b| src.block(b)).collect()
}

/// Combines block results in a fixed tree shape: mean, variance of a node,
/// kept and dropped counts.
fn reduce(blocks: &[BlockSum]) -> (f64, f64, u64, u64) {
    let sums: Vec<f64> = blocks.iter().map(|b| b.sum).collect();
    let sqs: Vec<f64> = blocks.iter().map(|b| b.sum_sq).collect();
    let count: u64 = blocks.iter().map(|b| b.count).sum();
    let dropped: u64 = blocks.iter().map(|b| b.dropped).sum();
    if count == 0 {
        return (f64::NEG_INFINITY, 0.0, 0, dropped);
    }
    let n = count as f64;
    let mean = pairwise_sum(&sums) / n;
    let var = (pairwise_sum(&sqs) / n - mean * mean).max(0.0);
    (mean, var, count, dropped)
}

fn log_abs(z: Complex64) -> Option<f64> {
    let a = abs(z);
    if a > 0.0 && a.is_finite() {
        Some(ln(a))
    } else {
        None
    }
}

/// Midpoint grid with nodes `θ_i = (k + ½)/M`. Block `b` fixes coordinates
/// `2..d` and runs over the first.
pub struct MidpointGrid {
    eval: PhaseEvaluator,
    table: RootTable,
    m: u64,
}

impl MidpointGrid {
    pub fn new(f: &LaurentPoly, m: u64) -> Result<Self> {
        if f.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if m == 0 {
            return Err(Error::GuardExceeded { what: "grid size", value: 0, limit: 0 });
        }
        let nodes = (m as u128).checked_pow(f.vars() as u32).unwrap_or(u128::MAX);
        if nodes > MAX_GRID_NODES as u128 {
            return Err(Error::GuardExceeded { what: "grid nodes", value: nodes, limit: MAX_GRID_NODES as u128 });
        }
        let den = i64::try_from(2 * m).map_err(|_| Error::Overflow)?;
        Ok(MidpointGrid { eval: f.phase_evaluator(), table: RootTable::new(den), m })
    }
}

impl BlockSource for MidpointGrid {
    fn block_count(&self) -> u64 {
        let d = self.eval.vars();
        if d == 0 {
            1
        } else {
            self.m.pow(d as u32 - 1)
        }
    }

    fn block(&self, b: u64) -> BlockSum {
        let d = self.eval.vars();
        let den = 2 * self.m as i128;
        if d == 0 {
            let v = self.eval.coeffs().iter().sum::<f64>();
            let logs: Vec<f64> = log_abs(Complex64::new(v, 0.0)).into_iter().collect();
            return BlockSum::from_logs(&logs, 1 - logs.len() as u64);
        }
        // numerators 2k+1 of coordinates 2..d
        let mut rest = b;
        let mut outer = vec![0i64; d];
        for slot in outer.iter_mut().skip(1) {
            *slot = 2 * (rest % self.m) as i64 + 1;
            rest /= self.m;
        }
        let base: Vec<i128> = self
            .eval
            .exponents()
            .iter()
            .map(|e| e.iter().zip(&outer).skip(1).map(|(&a, &k)| a as i128 * k as i128).sum::<i128>())
            .collect();
        let mut logs = Vec::with_capacity(self.m as usize);
        let mut dropped = 0;
        for k in 0..self.m {
            let a0 = 2 * k as i128 + 1;
            let mut acc = Complex64::new(0.0, 0.0);
            for ((c, e), b) in self.eval.coeffs().iter().zip(self.eval.exponents()).zip(&base) {
                let phase = (b + e[0] as i128 * a0).rem_euclid(den);
                acc += self.table.get(phase as i64) * *c;
            }
            match log_abs(acc) {
                Some(v) => logs.push(v),
                None => dropped += 1,
            }
        }
        BlockSum::from_logs(&logs, dropped)
    }
}

/// Mean of `ln |f|` on the `M^d` midpoint grid, with blocks evaluated by
/// `run`. Also evaluates the `M/2` grid for the error bound.
pub fn mahler_quadrature_with(
    f: &LaurentPoly,
    m: u64,
    run: &dyn Fn(&dyn BlockSource) -> Vec<BlockSum>,
) -> Result<MahlerEstimate> {
    let grid = MidpointGrid::new(f, m)?;
    let (value, _, _, dropped) = reduce(&run(&grid));
    let error_bound = if f.len() == 1 {
        0.0
    } else if m >= 2 {
        let (half, _, _, _) = reduce(&run(&MidpointGrid::new(f, m / 2)?));
        (value - half).abs()
    } else {
        f64::INFINITY
    };
    Ok(MahlerEstimate { value, method: MahlerMethod::MidpointGrid, error_bound, samples: m, dropped })
}

pub fn mahler_quadrature(f: &LaurentPoly, m: u64) -> Result<MahlerEstimate> {
    mahler_quadrature_with(f, m, &run_sequential)
}

/// Uniform samples on the torus. Block `b` draws from a ChaCha8 stream
/// selected by `b`, so the samples do not depend on how blocks are scheduled.
pub struct MonteCarlo {
    coeffs: Vec<f64>,
    exps: Vec<Vec<f64>>,
    vars: usize,
    samples: u64,
    seed: u64,
}

impl MonteCarlo {
    pub fn new(f: &LaurentPoly, samples: u64, seed: u64) -> Result<Self> {
        if f.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let ev = f.phase_evaluator();
        Ok(MonteCarlo {
            coeffs: ev.coeffs().to_vec(),
            exps: ev.exponents().iter().map(|e| e.iter().map(|&a| a as f64).collect()).collect(),
            vars: f.vars(),
            samples,
            seed,
        })
    }
}

impl BlockSource for MonteCarlo {
    fn block_count(&self) -> u64 {
        self.samples.div_ceil(MC_BLOCK)
    }

    fn block(&self, b: u64) -> BlockSum {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(b);
        let count = MC_BLOCK.min(self.samples - b * MC_BLOCK);
        let mut theta = vec![0.0f64; self.vars];
        let mut logs = Vec::with_capacity(count as usize);
        let mut dropped = 0;
        for _ in 0..count {
            for t in theta.iter_mut() {
                *t = rng.gen::<f64>();
            }
            let mut acc = Complex64::new(0.0, 0.0);
            for (c, e) in self.coeffs.iter().zip(&self.exps) {
                let phase: f64 = e.iter().zip(&theta).map(|(a, t)| a * t).sum();
                acc += cis_turns(phase) * *c;
            }
            match log_abs(acc) {
                Some(v) => logs.push(v),
                None => dropped += 1,
            }
        }
        BlockSum::from_logs(&logs, dropped)
    }
}

pub fn mahler_monte_carlo_with(
    f: &LaurentPoly,
    samples: u64,
    seed: u64,
    run: &dyn Fn(&dyn BlockSource) -> Vec<BlockSum>,
) -> Result<MahlerEstimate> {
    let mc = MonteCarlo::new(f, samples, seed)?;
    let (value, var, count, dropped) = reduce(&run(&mc));
    let error_bound = if count > 1 { 3.0 * sqrt(var / count as f64) } else { f64::INFINITY };
    Ok(MahlerEstimate { value, method: MahlerMethod::MonteCarlo, error_bound, samples, dropped })
}

pub fn mahler_monte_carlo(f: &LaurentPoly, samples: u64, seed: u64) -> Result<MahlerEstimate> {
    mahler_monte_carlo_with(f, samples, seed, &run_sequential)
}

/// Jensen for one variable, the midpoint grid while `M^d` fits the node
/// guard, Monte-Carlo with `samples` draws otherwise.
pub fn mahler_auto_with(
    f: &LaurentPoly,
    m: u64,
    samples: u64,
    seed: u64,
    run: &dyn Fn(&dyn BlockSource) -> Vec<BlockSum>,
) -> Result<MahlerEstimate> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if f.vars() == 1 {
        return mahler_jensen(f);
    }
    match mahler_quadrature_with(f, m, run) {
        Err(Error::GuardExceeded { .. }) => mahler_monte_carlo_with(f, samples, seed, run),
        other => other,
    }
}

/// `4 − x^r − x^{−r} − x^s − x^{−s}`.
pub fn gap_polynomial(r: i64, s: i64) -> LaurentPoly {
    LaurentPoly::from_terms(
        1,
        [(vec![0], 4), (vec![r], -1), (vec![-r], -1), (vec![s], -1), (vec![-s], -1)],
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthRow {
    /// Length of a shortest nonzero vector of `Λ` (computed for `d ≤ 4`).
    pub min_length: Option<f64>,
    pub index: u64,
    pub log_t: f64,
    /// `ln T(G_Λ) / |Z^d/Λ|`.
    pub rate: f64,
    /// `|rate − m̂(Δ)|`.
    pub discrepancy: f64,
}

/// One row of [`growth_rate_table`]: the exact count on `G_Λ` compared with
/// the estimate `mahler` of `m(Δ)`.
pub fn growth_rate_row(g: &PeriodicGraph, lattice: &Sublattice, mahler: f64, max_index: u64) -> Result<GrowthRow> {
    let q = build_quotient(g, lattice, max_index)?;
    let log_t = spanning_tree_count(&q).log_total();
    let rate = log_t / lattice.index() as f64;
    Ok(GrowthRow {
        min_length: lattice.min_length(),
        index: lattice.index(),
        log_t,
        rate,
        discrepancy: (rate - mahler).abs(),
    })
}

/// Growth of `ln T(G_Λ)` per fundamental domain along `lattices`, against
/// an estimate of `m(Δ)`.
pub fn growth_rate_table(g: &PeriodicGraph, lattices: &[Sublattice], mahler: &MahlerEstimate) -> Result<Vec<GrowthRow>> {
    if laplacian_matrix(g).delta.is_zero() {
        return Err(Error::DeltaZero);
    }
    lattices.iter().map(|l| growth_rate_row(g, l, mahler.value, DEFAULT_MAX_INDEX)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridBoundRow {
    pub d: usize,
    pub estimate: MahlerEstimate,
    pub log_2d: f64,
    pub deficit: f64,
    /// `m̂(d) ≥ m̂(d − 1)` up to the two error bounds (true for `d = 1`).
    pub nondecreasing: bool,
}

/// `m̂(Δ(𝔾_d))` against `ln 2d` for `d = 1..=d_max`. One variable uses
/// Jensen; otherwise the midpoint grid with `M` reduced so that `M^d` stays
/// within the node guard.
pub fn grid_bound_report_with(
    d_max: usize,
    m: u64,
    run: &dyn Fn(&dyn BlockSource) -> Vec<BlockSum>,
) -> Result<Vec<GridBoundRow>> {
    let mut rows: Vec<GridBoundRow> = Vec::new();
    for d in 1..=d_max {
        let delta = laplacian_matrix(&grid_graph(d)?).delta;
        let estimate = if d == 1 {
            mahler_jensen(&delta)?
        } else {
            let mut md = m;
            while (md as u128).pow(d as u32) > MAX_GRID_NODES as u128 {
                md -= 1;
            }
            mahler_quadrature_with(&delta, md, run)?
        };
        let log_2d = ln(2.0 * d as f64);
        let nondecreasing = match rows.last() {
            None => true,
            Some(prev) => {
                estimate.value + estimate.error_bound + prev.estimate.error_bound >= prev.estimate.value
            }
        };
        rows.push(GridBoundRow { d, estimate, log_2d, deficit: log_2d - estimate.value, nondecreasing });
    }
    Ok(rows)
}

pub fn grid_bound_report(d_max: usize, m: u64) -> Result<Vec<GridBoundRow>> {
    grid_bound_report_with(d_max, m, &run_sequential)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapRow {
    pub s: i64,
    pub estimate: MahlerEstimate,
    /// `value ≥ ln 2 − 1e−9`.
    pub holds: bool,
}

/// Jensen values of `m(4 − x − x^{−1} − x^s − x^{−s})` for `s = 2..=s_max`.
pub fn gap_report(s_max: i64) -> Result<Vec<GapRow>> {
    (2..=s_max)
        .map(|s| {
            let estimate = mahler_jensen(&gap_polynomial(1, s))?;
            Ok(GapRow { s, estimate, holds: estimate.value >= ln(2.0) - 1e-9 })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegularBoundReport {
    pub d: usize,
    pub index: u64,
    pub log_tau: f64,
    /// `ln τ((𝔾_d)_Λ) / |Z^d/Λ|`.
    pub rate: f64,
    pub log_2d: f64,
    pub deficit: f64,
}

/// Compares the per-vertex tree growth on a connected quotient of the grid
/// `𝔾_d` with `ln 2d`, the bound for `2d`-regular graphs.
pub fn regular_lower_bound_check(d: usize, lattice: &Sublattice) -> Result<RegularBoundReport> {
    let g = grid_graph(d)?;
    let q = build_quotient(&g, lattice, DEFAULT_MAX_INDEX)?;
    if !q.is_connected() {
        return Err(Error::Disconnected);
    }
    let log_tau = spanning_tree_count(&q).log_total();
    let rate = log_tau / lattice.index() as f64;
    let log_2d = ln(2.0 * d as f64);
    Ok(RegularBoundReport { d, index: lattice.index(), log_tau, rate, log_2d, deficit: log_2d - rate })
}
