//! Finite torus quotients `G_Λ` and exact spanning tree counts.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact_det::{bareiss, sparse_symmetric_det, SparseSymmetric};
use crate::math::{big_ln, ln};
use crate::periodic_graph::PeriodicGraph;
use crate::sublattice::Sublattice;

/// Components up to this many vertices use dense Bareiss elimination; larger
/// ones use the multi-modular sparse route.
pub const DENSE_COMPONENT_LIMIT: usize = 40;

/// Edge limit of the deletion–contraction oracle.
pub const MAX_DC_EDGES: usize = 24;

/// Finite multigraph on vertices `0..vertex_count`. Loops are kept but every
/// Laplacian construction skips them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteMultigraph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
}

impl FiniteMultigraph {
    pub fn new(vertex_count: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        for &(u, v) in &edges {
            for x in [u, v] {
                if x >= vertex_count {
                    return Err(Error::VertexOutOfRange { vertex: x, count: vertex_count });
                }
            }
        }
        let edges = edges.into_iter().map(|(u, v)| (u.min(v), u.max(v))).collect();
        Ok(FiniteMultigraph { vertex_count, edges })
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        FiniteMultigraph { vertex_count: n, edges }
    }

    pub fn cycle(n: usize) -> Self {
        let edges = (0..n).map(|i| (i, (i + 1) % n)).map(|(u, v)| (u.min(v), u.max(v))).collect();
        FiniteMultigraph { vertex_count: n, edges }
    }

    pub fn disjoint_union(&self, other: &Self) -> Self {
        let off = self.vertex_count;
        let mut edges = self.edges.clone();
        edges.extend(other.edges.iter().map(|&(u, v)| (u + off, v + off)));
        FiniteMultigraph { vertex_count: off + other.vertex_count, edges }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// All edges including loops, each as `(min, max)`.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn loop_count(&self) -> usize {
        self.edges.iter().filter(|(u, v)| u == v).count()
    }

    /// Number of non-loop edges, counted with multiplicity.
    pub fn edge_count(&self) -> usize {
        self.edges.len() - self.loop_count()
    }

    /// Non-loop degrees.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.vertex_count];
        for &(u, v) in &self.edges {
            if u != v {
                deg[u] += 1;
                deg[v] += 1;
            }
        }
        deg
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    /// Number of parallel non-loop edges between `u` and `v`.
    pub fn multiplicity(&self, u: usize, v: usize) -> usize {
        if u == v {
            return 0;
        }
        let key = (u.min(v), u.max(v));
        self.edges.iter().filter(|&&e| e == key).count()
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut parent: Vec<usize> = (0..self.vertex_count).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for &(u, v) in &self.edges {
            let (a, b) = (find(&mut parent, u), find(&mut parent, v));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        let mut by_root: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for v in 0..self.vertex_count {
            let r = find(&mut parent, v);
            by_root.entry(r).or_default().push(v);
        }
        // roots are the smallest member, so BTreeMap order is the required order
        by_root.into_values().collect()
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Laplacian of the subgraph induced on `component` with its last vertex
    /// deleted; its determinant is the number of spanning trees.
    pub fn reduced_laplacian(&self, component: &[usize]) -> SparseSymmetric {
        let mut local = vec![usize::MAX; self.vertex_count];
        for (i, &v) in component.iter().enumerate() {
            local[v] = i;
        }
        let k = component.len().saturating_sub(1);
        let mut entries = Vec::new();
        for &(u, v) in &self.edges {
            if u == v {
                continue;
            }
            let (a, b) = (local[u], local[v]);
            if a == usize::MAX || b == usize::MAX {
                continue;
            }
            if a < k {
                entries.push((a, a, 1));
            }
            if b < k {
                entries.push((b, b, 1));
            }
            if a < k && b < k {
                entries.push((a.min(b), a.max(b), -1));
            }
        }
        SparseSymmetric::from_upper(k, entries)
    }

    /// Dense integer Laplacian (loops skipped).
    pub fn laplacian(&self) -> Vec<Vec<i64>> {
        let n = self.vertex_count;
        let mut m = vec![vec![0i64; n]; n];
        for &(u, v) in &self.edges {
            if u != v {
                m[u][u] += 1;
                m[v][v] += 1;
                m[u][v] -= 1;
                m[v][u] -= 1;
            }
        }
        m
    }
}

/// Spanning tree counts of a finite multigraph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexityReport {
    /// Vertex count of each component, in component order.
    pub component_sizes: Vec<usize>,
    /// `τ` of each component.
    pub tau_per_component: Vec<BigUint>,
    /// `T`, the product of the `τ`.
    pub total: BigUint,
    /// `n_Λ`, the product of the component sizes.
    pub n_lambda: BigUint,
}

impl ComplexityReport {
    pub fn from_parts(component_sizes: Vec<usize>, tau_per_component: Vec<BigUint>) -> Self {
        let total = tau_per_component.iter().fold(BigUint::one(), |acc, t| acc * t);
        let n_lambda = component_sizes.iter().fold(BigUint::one(), |acc, &s| acc * s);
        ComplexityReport { component_sizes, tau_per_component, total, n_lambda }
    }

    pub fn log_total(&self) -> f64 {
        big_ln(&self.total)
    }

    pub fn log_n_lambda(&self) -> f64 {
        big_ln(&self.n_lambda)
    }
}

/// `τ` of one component by the Matrix-Tree theorem.
pub fn component_tree_count(h: &FiniteMultigraph, component: &[usize]) -> BigUint {
    if component.len() <= 1 {
        return BigUint::one();
    }
    let reduced = h.reduced_laplacian(component);
    let det = if component.len() <= DENSE_COMPONENT_LIMIT {
        let dense = reduced
            .to_dense()
            .into_iter()
            .map(|r| r.into_iter().map(BigInt::from).collect())
            .collect();
        bareiss(dense)
    } else {
        sparse_symmetric_det(&reduced)
    };
    det.to_biguint().expect("reduced Laplacians are positive semidefinite")
}

/// `T(h)` and its per-component factors, computed exactly.
pub fn spanning_tree_count(h: &FiniteMultigraph) -> ComplexityReport {
    let comps = h.components();
    let taus = comps.iter().map(|c| component_tree_count(h, c)).collect();
    ComplexityReport::from_parts(comps.iter().map(Vec::len).collect(), taus)
}

/// Builds `G_Λ`. Vertex `(orbit i, coset c)` gets id `index(c) · n + i`,
/// with cosets in [`Sublattice::cosets`] order.
pub fn build_quotient(g: &PeriodicGraph, lattice: &Sublattice, max_index: u64) -> Result<FiniteMultigraph> {
    if g.rank() != lattice.dim() {
        return Err(Error::VariableMismatch(g.rank(), lattice.dim()));
    }
    let cosets = lattice.cosets(max_index)?;
    let n = g.orbit_count();
    let mut edges = Vec::with_capacity(cosets.len() * g.edge_orbit_count());
    let mut target = vec![0i64; g.rank()];
    for (ci, c) in cosets.iter().enumerate() {
        for e in g.edges() {
            for (t, (a, b)) in target.iter_mut().zip(c.iter().zip(&e.shift)) {
                *t = a + b;
            }
            lattice.reduce_in_place(&mut target);
            let cj = lattice.coset_index(&target);
            let (u, v) = (ci * n + e.from, cj * n + e.to);
            edges.push((u.min(v), u.max(v)));
        }
    }
    Ok(FiniteMultigraph { vertex_count: cosets.len() * n, edges })
}

/// Spanning tree count by deletion–contraction, for connected graphs with at
/// most [`MAX_DC_EDGES`] non-loop edges.
///
/// A class of `k` parallel edges between `u` and `v` is handled at once:
/// `τ(G) = τ(G − uv) + k · τ(G / uv)`. Loops created by contraction are
/// dropped. Subproblems are memoized on their multiplicity matrix.
pub fn tau_deletion_contraction(h: &FiniteMultigraph) -> Result<BigUint> {
    let m = h.edge_count();
    if m > MAX_DC_EDGES {
        return Err(Error::GuardExceeded {
            what: "edges for deletion-contraction",
            value: m as u128,
            limit: MAX_DC_EDGES as u128,
        });
    }
    if !h.is_connected() {
        return Err(Error::Disconnected);
    }
    let n = h.vertex_count;
    let mut mult = vec![vec![0u32; n]; n];
    for &(u, v) in &h.edges {
        if u != v {
            mult[u][v] += 1;
            mult[v][u] += 1;
        }
    }
    let mut memo = BTreeMap::new();
    Ok(dc(mult, &mut memo))
}

fn dc(m: Vec<Vec<u32>>, memo: &mut BTreeMap<Vec<u32>, BigUint>) -> BigUint {
    let k = m.len();
    if k <= 1 {
        return BigUint::one();
    }
    if !dense_connected(&m) {
        return BigUint::zero();
    }
    let mut key: Vec<u32> = Vec::with_capacity(1 + k * (k - 1) / 2);
    key.push(k as u32);
    for i in 0..k {
        key.extend_from_slice(&m[i][i + 1..]);
    }
    if let Some(v) = memo.get(&key) {
        return v.clone();
    }
    let degree = |v: usize| m[v].iter().map(|&x| x as u64).sum::<u64>();
    let u = (0..k).min_by_key(|&v| degree(v)).expect("k >= 2");
    let v = (0..k).find(|&w| w != u && m[u][w] > 0).expect("connected");
    let k_uv = m[u][v];

    let mut deleted = m.clone();
    deleted[u][v] = 0;
    deleted[v][u] = 0;
    let del = if k_uv == 0 { BigUint::zero() } else { dc(deleted, memo) };

    // merge v into u
    let mut contracted: Vec<Vec<u32>> = Vec::with_capacity(k - 1);
    for i in 0..k {
        if i == v {
            continue;
        }
        let mut row = Vec::with_capacity(k - 1);
        for j in 0..k {
            if j == v {
                continue;
            }
            let mut x = m[i][j];
            if i == u && j != u {
                x += m[v][j];
            } else if j == u && i != u {
                x += m[i][v];
            }
            if i == j {
                x = 0;
            }
            row.push(x);
        }
        contracted.push(row);
    }
    let con = dc(contracted, memo);
    let res = del + con * k_uv;
    memo.insert(key, res.clone());
    res
}

fn dense_connected(m: &[Vec<u32>]) -> bool {
    let k = m.len();
    let mut seen = vec![false; k];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut count = 1;
    while let Some(x) = stack.pop() {
        for y in 0..k {
            if m[x][y] > 0 && !seen[y] {
                seen[y] = true;
                count += 1;
                stack.push(y);
            }
        }
    }
    count == k
}

/// `ln` of `(1/n_Λ) · ∏ λ` over the nonzero Laplacian eigenvalues.
///
/// The zero eigenvalues are taken to be the `k` smallest, `k` being the
/// number of components, which is known exactly.
pub fn log_eigenvalue_product(h: &FiniteMultigraph) -> f64 {
    let n = h.vertex_count;
    let comps = h.components();
    let n_lambda: f64 = comps.iter().map(|c| ln(c.len() as f64)).sum();
    if n == 0 {
        return 0.0;
    }
    let lap = h.laplacian();
    let flat: Vec<f64> = lap.iter().flat_map(|r| r.iter().map(|&x| x as f64)).collect();
    let m = nalgebra::DMatrix::from_row_slice(n, n, &flat);
    let eig = nalgebra::SymmetricEigen::new(m);
    let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    values.sort_by(|a, b| a.total_cmp(b));
    let logs: Vec<f64> = values[comps.len()..].iter().map(|&l| ln(l)).collect();
    crate::math::pairwise_sum(&logs) - n_lambda
}

/// `(1/n_Λ) · ∏ λ` over the nonzero Laplacian eigenvalues; equals `T(h)`.
pub fn eigenvalue_product(h: &FiniteMultigraph) -> f64 {
    libm::exp(log_eigenvalue_product(h))
}

#[derive(Debug, Clone, PartialEq)]
pub struct UpperBoundCheck {
    pub tau: BigUint,
    /// `ln` of `((2|E| − δ)/(|V| − 1))^{|V|−1}`.
    pub log_bound: f64,
    pub holds: bool,
}

/// Checks `τ ≤ ((2|E| − δ)/(|V| − 1))^{|V|−1}` exactly, `δ` the maximum
/// degree, on a connected graph.
pub fn upper_bound_check(h: &FiniteMultigraph) -> Result<UpperBoundCheck> {
    if !h.is_connected() {
        return Err(Error::Disconnected);
    }
    let tau = spanning_tree_count(h).total;
    let b = h.vertex_count.saturating_sub(1);
    if b == 0 {
        return Ok(UpperBoundCheck { holds: tau <= BigUint::one(), tau, log_bound: 0.0 });
    }
    let a = 2 * h.edge_count() - h.max_degree();
    // τ · b^b ≤ a^b
    let lhs = &tau * BigUint::from(b).pow(b as u32);
    let rhs = BigUint::from(a).pow(b as u32);
    let log_bound = b as f64 * (ln(a as f64) - ln(b as f64));
    Ok(UpperBoundCheck { holds: lhs <= rhs, tau, log_bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::periodic_graph::{grid_graph, grid_without_axis};
    use crate::sublattice::DEFAULT_MAX_INDEX;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn complete_graphs() {
        assert_eq!(spanning_tree_count(&FiniteMultigraph::complete(5)).total, big(125));
        assert_eq!(tau_deletion_contraction(&FiniteMultigraph::complete(4)).unwrap(), big(16));
    }

    #[test]
    fn cycles_match_deletion_contraction() {
        for n in 3..=12 {
            let c = FiniteMultigraph::cycle(n);
            let dc = tau_deletion_contraction(&c).unwrap();
            assert_eq!(dc, big(n as u64));
            assert_eq!(spanning_tree_count(&c).total, dc);
        }
    }

    #[test]
    fn disjoint_triangles() {
        let t = FiniteMultigraph::cycle(3);
        let r = spanning_tree_count(&t.disjoint_union(&t));
        assert_eq!(r.total, big(9));
        assert_eq!(r.n_lambda, big(9));
        assert_eq!(r.tau_per_component, vec![big(3), big(3)]);
    }

    #[test]
    fn tiny_graphs() {
        let k2 = FiniteMultigraph::new(2, vec![(0, 1)]).unwrap();
        assert_eq!(tau_deletion_contraction(&k2).unwrap(), big(1));
        let doubled = FiniteMultigraph::new(2, vec![(0, 1), (1, 0)]).unwrap();
        assert_eq!(tau_deletion_contraction(&doubled).unwrap(), big(2));
        assert_eq!(spanning_tree_count(&doubled).total, big(2));
        let isolated = FiniteMultigraph::new(1, vec![(0, 0)]).unwrap();
        let r = spanning_tree_count(&isolated);
        assert_eq!((r.total, r.n_lambda), (big(1), big(1)));
        assert!(FiniteMultigraph::new(2, vec![(0, 2)]).is_err());
        let split = FiniteMultigraph::new(3, vec![(0, 1)]).unwrap();
        assert_eq!(tau_deletion_contraction(&split), Err(Error::Disconnected));
    }

    #[test]
    fn eigenvalue_products() {
        let k2 = FiniteMultigraph::complete(2);
        assert!((eigenvalue_product(&k2) - 1.0).abs() < 1e-12);
        assert!((eigenvalue_product(&FiniteMultigraph::cycle(4)) - 4.0).abs() < 1e-10);
        assert!((eigenvalue_product(&k2.disjoint_union(&k2)) - 1.0).abs() < 1e-12);
        assert!((eigenvalue_product(&FiniteMultigraph::complete(6)) - 1296.0).abs() < 1e-8);
    }

    #[test]
    fn upper_bounds() {
        let k5 = upper_bound_check(&FiniteMultigraph::complete(5)).unwrap();
        assert!(k5.holds);
        assert!((k5.log_bound - 256f64.ln()).abs() < 1e-12);
        let c4 = upper_bound_check(&FiniteMultigraph::cycle(4)).unwrap();
        assert!(c4.holds && (c4.log_bound - 3.0 * 2f64.ln()).abs() < 1e-12);
        let k2 = upper_bound_check(&FiniteMultigraph::complete(2)).unwrap();
        assert!(k2.holds && k2.log_bound == 0.0);
        assert!(upper_bound_check(&FiniteMultigraph::new(2, vec![]).unwrap()).is_err());
    }

    #[test]
    fn grid1_quotients() {
        let g = grid_graph(1).unwrap();
        for n in 3..10 {
            let q = build_quotient(&g, &Sublattice::diagonal(1, n).unwrap(), DEFAULT_MAX_INDEX).unwrap();
            assert_eq!(q, FiniteMultigraph::cycle(n as usize));
        }
        let q2 = build_quotient(&g, &Sublattice::diagonal(1, 2).unwrap(), DEFAULT_MAX_INDEX).unwrap();
        assert_eq!(q2.edges(), &[(0, 1), (0, 1)]);
        let q1 = build_quotient(&g, &Sublattice::diagonal(1, 1).unwrap(), DEFAULT_MAX_INDEX).unwrap();
        assert_eq!(q1.edges(), &[(0, 0)]);
        assert_eq!(spanning_tree_count(&q1).total, big(1));
    }

    #[test]
    fn grid2_quotients_are_four_regular() {
        let g = grid_graph(2).unwrap();
        let q = build_quotient(&g, &Sublattice::diagonal(2, 2).unwrap(), DEFAULT_MAX_INDEX).unwrap();
        assert_eq!(q.vertex_count(), 4);
        assert!(q.degrees().iter().all(|&d| d == 4));
        assert_eq!(q.multiplicity(0, 1), 2);
        assert_eq!(q.multiplicity(0, 2), 2);
        assert_eq!(q.multiplicity(0, 3), 0);
        for n in [3i64, 5, 8] {
            let q = build_quotient(&g, &Sublattice::diagonal(2, n).unwrap(), DEFAULT_MAX_INDEX).unwrap();
            assert_eq!(q.vertex_count() as i64, n * n);
            assert!(q.degrees().iter().all(|&d| d == 4));
        }
    }

    #[test]
    fn sparse_and_dense_routes_agree() {
        // 7x7 torus: 49 vertices, above the dense limit
        let g = grid_graph(2).unwrap();
        let q = build_quotient(&g, &Sublattice::diagonal(2, 7).unwrap(), DEFAULT_MAX_INDEX).unwrap();
        let comp: Vec<usize> = (0..q.vertex_count()).collect();
        let sparse = sparse_symmetric_det(&q.reduced_laplacian(&comp));
        let dense = bareiss(
            q.reduced_laplacian(&comp)
                .to_dense()
                .into_iter()
                .map(|r| r.into_iter().map(BigInt::from).collect())
                .collect(),
        );
        assert_eq!(sparse, dense);
        let t = spanning_tree_count(&q).total;
        assert_eq!(BigInt::from(t), dense);
    }

    #[test]
    fn no_vertical_edges_gives_disjoint_cycles() {
        let g = grid_without_axis(2, 1).unwrap();
        let q = build_quotient(&g, &Sublattice::diagonal(2, 5).unwrap(), DEFAULT_MAX_INDEX).unwrap();
        let r = spanning_tree_count(&q);
        assert_eq!(r.component_sizes, vec![5; 5]);
        assert_eq!(r.total, big(5u64.pow(5)));
        assert_eq!(r.n_lambda, big(5u64.pow(5)));
    }

    #[test]
    fn degenerate_growth_tends_to_zero() {
        // N disjoint N-cycles: (1/N²) ln T = ln N / N
        let g = grid_without_axis(2, 1).unwrap();
        let mut last = f64::INFINITY;
        for n in [8i64, 32, 128] {
            let q = build_quotient(&g, &Sublattice::diagonal(2, n).unwrap(), DEFAULT_MAX_INDEX).unwrap();
            let rate = spanning_tree_count(&q).log_total() / (n * n) as f64;
            assert!((rate - (n as f64).ln() / n as f64).abs() < 1e-12);
            assert!(rate < last);
            last = rate;
        }
        assert!(last < 0.05);
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(128))]

        #[test]
        fn three_counts_agree(h in crate::strategies::connected_multigraph(10, 24)) {
            let mt = spanning_tree_count(&h).total;
            proptest::prop_assert_eq!(&mt, &tau_deletion_contraction(&h).unwrap());
            let exact: f64 = num_traits::ToPrimitive::to_f64(&mt).unwrap();
            proptest::prop_assert!((eigenvalue_product(&h) - exact).abs() <= 1e-8 * exact);
            proptest::prop_assert!(upper_bound_check(&h).unwrap().holds);
        }

        #[test]
        fn connected_quotient_has_n_times_index_vertices(
            g in crate::strategies::periodic_graph(2, 3, 5),
            l in crate::strategies::lattice(2, 40),
        ) {
            let q = build_quotient(&g, &l, DEFAULT_MAX_INDEX).unwrap();
            let r = spanning_tree_count(&q);
            if q.is_connected() {
                proptest::prop_assert_eq!(r.n_lambda, BigUint::from(g.orbit_count() as u64 * l.index()));
            }
            let sizes: usize = r.component_sizes.iter().sum();
            proptest::prop_assert_eq!(sizes, q.vertex_count());
        }
    }
}
