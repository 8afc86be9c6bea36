//! Laplacian matrix and Laplacian polynomial of a periodic graph, with the
//! cycle-rooted spanning forest expansion as an independent route to `Δ`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::laurent::{LaurentMatrix, LaurentPoly};
use crate::periodic_graph::PeriodicGraph;

/// Largest number of edge orbits accepted by [`crsf_polynomial`].
pub const MAX_CRSF_EDGES: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaplacianData {
    pub matrix: LaurentMatrix,
    pub delta: LaurentPoly,
}

/// `L = D − A` over the Laurent ring and `Δ = det L`.
///
/// An edge orbit `(i, j, s)` with `i ≠ j` adds `x^s` to `A_ij`, `x^{−s}` to
/// `A_ji` and one to both degrees. A self orbit `(i, i, s)` with `s ≠ 0` is
/// two edges at every vertex of orbit `i` (towards `+s` and `−s`): it adds
/// `x^s + x^{−s}` to `A_ii` and 2 to the degree. Loop orbits are ignored.
pub fn laplacian_matrix(g: &PeriodicGraph) -> LaplacianData {
    let matrix = laplacian_only(g);
    let delta = matrix.determinant();
    LaplacianData { matrix, delta }
}

pub fn laplacian_only(g: &PeriodicGraph) -> LaurentMatrix {
    let n = g.orbit_count();
    let d = g.rank();
    let mut m = LaurentMatrix::zeros(n, d);
    let zero = vec![0i64; d];
    let mut degree = vec![0i64; n];
    for e in g.edges() {
        if e.is_loop() {
            continue;
        }
        let neg: Vec<i64> = e.shift.iter().map(|&a| -a).collect();
        let forward = LaurentPoly::monomial(d, e.shift.clone(), 1);
        let backward = LaurentPoly::monomial(d, neg, 1);
        if e.from == e.to {
            let entry = m.get_mut(e.from, e.from);
            *entry = &(&*entry - &forward) - &backward;
            degree[e.from] += 2;
        } else {
            let a = m.get_mut(e.from, e.to);
            *a = &*a - &forward;
            let b = m.get_mut(e.to, e.from);
            *b = &*b - &backward;
            degree[e.from] += 1;
            degree[e.to] += 1;
        }
    }
    for (i, &deg) in degree.iter().enumerate() {
        let entry = m.get_mut(i, i);
        *entry = &*entry + &LaurentPoly::monomial(d, zero.clone(), deg);
    }
    m
}

/// `Δ` of each component of the quotient graph, in decomposition order.
/// Their product is `Δ(G)`.
pub fn factor_blocks(g: &PeriodicGraph) -> Vec<(Vec<usize>, LaurentPoly)> {
    g.decompose()
        .parts
        .into_iter()
        .map(|p| {
            let sub = g.restrict(&p.orbits).expect("parts are valid orbit sets");
            let delta = laplacian_only(&sub).determinant();
            (p.orbits, delta)
        })
        .collect()
}

/// Union-find carrying, for each orbit, its translation relative to the root.
struct OffsetForest {
    parent: Vec<usize>,
    offset: Vec<Vec<i64>>,
}

impl OffsetForest {
    fn new(n: usize, d: usize) -> Self {
        OffsetForest { parent: (0..n).collect(), offset: vec![vec![0; d]; n] }
    }

    /// Root of `v` and the position of `v` relative to it.
    fn find(&mut self, v: usize) -> (usize, Vec<i64>) {
        let p = self.parent[v];
        if p == v {
            return (v, self.offset[v].clone());
        }
        let (root, parent_off) = self.find(p);
        let off: Vec<i64> = self.offset[v].iter().zip(&parent_off).map(|(a, b)| a + b).collect();
        self.parent[v] = root;
        self.offset[v] = off.clone();
        (root, off)
    }
}

/// `Σ_F ∏_{cycles of F} (2 − x^w − x^{−w})` over all cycle-rooted spanning
/// forests `F` of the quotient multigraph, by exhaustive search over
/// `n`-subsets of edge orbits.
///
/// A subset with exactly `n` edges is a CRSF iff every component closes
/// exactly one cycle. Loop orbits are cycles of monodromy zero, so any
/// forest using one contributes nothing.
pub fn crsf_polynomial(g: &PeriodicGraph) -> Result<LaurentPoly> {
    let m = g.edge_orbit_count();
    if m > MAX_CRSF_EDGES {
        return Err(Error::GuardExceeded {
            what: "edge orbits for CRSF enumeration",
            value: m as u128,
            limit: MAX_CRSF_EDGES as u128,
        });
    }
    let n = g.orbit_count();
    let d = g.rank();
    let mut total = LaurentPoly::zero(d);
    if n > m {
        return Ok(total);
    }
    let mut chosen: Vec<usize> = (0..n).collect();
    loop {
        if let Some(term) = crsf_term(g, &chosen) {
            total = &total + &term;
        }
        // next n-combination of 0..m in lexicographic order
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(total);
            }
            i -= 1;
            if chosen[i] < m - n + i {
                break;
            }
        }
        chosen[i] += 1;
        for k in i + 1..n {
            chosen[k] = chosen[k - 1] + 1;
        }
    }
}

/// Weight of the forest on `edges`, or `None` if it is not a CRSF or has a
/// cycle of zero monodromy.
fn crsf_term(g: &PeriodicGraph, edges: &[usize]) -> Option<LaurentPoly> {
    let n = g.orbit_count();
    let d = g.rank();
    let mut forest = OffsetForest::new(n, d);
    let mut cycles: Vec<(usize, Vec<i64>)> = Vec::new();
    for &k in edges {
        let e = &g.edges()[k];
        let (ra, oa) = forest.find(e.from);
        let (rb, ob) = forest.find(e.to);
        if ra == rb {
            let w: Vec<i64> = (0..d).map(|t| oa[t] + e.shift[t] - ob[t]).collect();
            cycles.push((ra, w));
        } else {
            // place rb so that pos(to) = pos(from) + s
            forest.parent[rb] = ra;
            forest.offset[rb] = (0..d).map(|t| oa[t] + e.shift[t] - ob[t]).collect();
        }
    }
    // n edges on n vertices: components = number of cycle edges, so every
    // component has a cycle iff the cycle roots are pairwise distinct
    let mut roots: Vec<usize> = Vec::with_capacity(cycles.len());
    for (r, _) in &cycles {
        roots.push(forest.find(*r).0);
    }
    roots.sort_unstable();
    roots.dedup();
    if roots.len() != cycles.len() {
        return None;
    }
    let mut term = LaurentPoly::one(d);
    for (_, w) in &cycles {
        if w.iter().all(|&a| a == 0) {
            return None;
        }
        term = &term * &LaurentPoly::cycle_factor(w);
    }
    Some(term)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZeroCheck {
    pub zero: bool,
    /// A closed component (its vertex orbits) when `Δ ≡ 0`.
    pub witness: Option<Vec<usize>>,
}

/// Whether `Δ ≡ 0`, with a closed component orbit as witness.
pub fn delta_is_zero(g: &PeriodicGraph) -> ZeroCheck {
    let zero = laplacian_matrix(g).delta.is_zero();
    let witness = if zero {
        g.decompose().closed_part().map(|p| p.orbits.clone())
    } else {
        None
    };
    ZeroCheck { zero, witness }
}
