//! Graphs with a cofinite free `Z^d` action, described by quotient data.
//!
//! Vertex orbits are numbered `0..n`. An edge orbit `(i, j, s)` stands for
//! the edge from `v_{i,0}` to `v_{j,s}` together with all its translates.
//! Orbit indices are 0-based in this API; the text file format is 1-based.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::normal_form;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeOrbit {
    pub from: usize,
    pub to: usize,
    pub shift: Vec<i64>,
}

impl EdgeOrbit {
    pub fn new(from: usize, to: usize, shift: Vec<i64>) -> Self {
        EdgeOrbit { from, to, shift }.canonical()
    }

    /// The same orbit read in the opposite direction: `(j, i, −s)`.
    pub fn reversed(&self) -> Self {
        EdgeOrbit {
            from: self.to,
            to: self.from,
            shift: self.shift.iter().map(|&a| -a).collect(),
        }
    }

    /// Orientation with `from < to`, or for `from == to` a shift whose first
    /// nonzero entry is positive.
    pub fn canonical(self) -> Self {
        let flip = match self.from.cmp(&self.to) {
            core::cmp::Ordering::Less => false,
            core::cmp::Ordering::Greater => true,
            core::cmp::Ordering::Equal => self.shift.iter().find(|&&a| a != 0).is_some_and(|&a| a < 0),
        };
        if flip {
            self.reversed()
        } else {
            self
        }
    }

    /// `i = j` and `s = 0`: every edge of the orbit is a loop.
    pub fn is_loop(&self) -> bool {
        self.from == self.to && self.shift.iter().all(|&a| a == 0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodicGraph {
    rank: usize,
    orbits: usize,
    edges: Vec<EdgeOrbit>,
}

impl PeriodicGraph {
    /// Validates and canonicalizes the edge orbits. Repeated orbits are kept:
    /// they are distinct parallel edges.
    pub fn new(rank: usize, orbits: usize, edges: Vec<EdgeOrbit>) -> Result<Self> {
        if rank == 0 {
            return Err(Error::ZeroRank);
        }
        if orbits == 0 {
            return Err(Error::NoVertexOrbits);
        }
        let mut out = Vec::with_capacity(edges.len());
        for (idx, e) in edges.into_iter().enumerate() {
            for o in [e.from, e.to] {
                if o >= orbits {
                    return Err(Error::OrbitOutOfRange { edge: idx, orbit: o, orbits });
                }
            }
            if e.shift.len() != rank {
                return Err(Error::TranslationLength { edge: idx, found: e.shift.len(), expected: rank });
            }
            out.push(e.canonical());
        }
        Ok(PeriodicGraph { rank, orbits, edges: out })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn orbit_count(&self) -> usize {
        self.orbits
    }

    pub fn edges(&self) -> &[EdgeOrbit] {
        &self.edges
    }

    /// Number of edge orbits `m`.
    pub fn edge_orbit_count(&self) -> usize {
        self.edges.len()
    }

    /// Same graph with every edge orbit repeated `k` times.
    pub fn with_multiplicity(&self, k: usize) -> Self {
        let mut edges = Vec::with_capacity(self.edges.len() * k);
        for e in &self.edges {
            for _ in 0..k {
                edges.push(e.clone());
            }
        }
        PeriodicGraph { edges, ..self.clone() }
    }

    /// Keeps only the edge orbits for which `keep` returns true.
    pub fn filter_edges(&self, keep: impl Fn(&EdgeOrbit) -> bool) -> Self {
        PeriodicGraph {
            edges: self.edges.iter().filter(|e| keep(e)).cloned().collect(),
            ..self.clone()
        }
    }

    /// Disjoint union; the orbits of `other` are numbered after ours.
    pub fn disjoint_union(&self, other: &Self) -> Result<Self> {
        if self.rank != other.rank {
            return Err(Error::VariableMismatch(self.rank, other.rank));
        }
        let offset = self.orbits;
        let mut edges = self.edges.clone();
        edges.extend(other.edges.iter().map(|e| EdgeOrbit {
            from: e.from + offset,
            to: e.to + offset,
            shift: e.shift.clone(),
        }));
        PeriodicGraph::new(self.rank, self.orbits + other.orbits, edges)
    }

    /// Relabels orbit `i` as `perm[i]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        let edges = self
            .edges
            .iter()
            .map(|e| EdgeOrbit { from: perm[e.from], to: perm[e.to], shift: e.shift.clone() })
            .collect();
        PeriodicGraph::new(self.rank, self.orbits, edges)
    }

    /// The periodic graph spanned by the given orbits (renumbered in order).
    pub fn restrict(&self, orbits: &[usize]) -> Result<Self> {
        let mut map = vec![usize::MAX; self.orbits];
        for (new, &old) in orbits.iter().enumerate() {
            map[old] = new;
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| map[e.from] != usize::MAX && map[e.to] != usize::MAX)
            .map(|e| EdgeOrbit { from: map[e.from], to: map[e.to], shift: e.shift.clone() })
            .collect();
        PeriodicGraph::new(self.rank, orbits.len(), edges)
    }

    /// Connected components of the quotient multigraph with the monodromy
    /// sublattice of each.
    ///
    /// Each component gets a BFS spanning tree; the tree fixes a potential
    /// `p(v) ∈ Z^d` per orbit and every non-tree edge `(i, j, s)` contributes
    /// the monodromy `p(i) + s − p(j)`. Hermite normal form makes the result
    /// independent of the tree.
    pub fn decompose(&self) -> ComponentOrbitDecomposition {
        let n = self.orbits;
        let d = self.rank;
        let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (k, e) in self.edges.iter().enumerate() {
            incident[e.from].push(k);
            if e.to != e.from {
                incident[e.to].push(k);
            }
        }
        let mut component = vec![usize::MAX; n];
        let mut potential = vec![vec![0i64; d]; n];
        let mut tree_edge = vec![false; self.edges.len()];
        let mut parts: Vec<Vec<usize>> = Vec::new();
        for root in 0..n {
            if component[root] != usize::MAX {
                continue;
            }
            let c = parts.len();
            component[root] = c;
            let mut members = vec![root];
            let mut queue = VecDeque::from([root]);
            while let Some(v) = queue.pop_front() {
                for &k in &incident[v] {
                    let e = &self.edges[k];
                    let (w, sign) = if e.from == v { (e.to, 1) } else { (e.from, -1) };
                    if component[w] == usize::MAX {
                        component[w] = c;
                        potential[w] = potential[v].iter().zip(&e.shift).map(|(p, s)| p + sign * s).collect();
                        tree_edge[k] = true;
                        members.push(w);
                        queue.push_back(w);
                    }
                }
            }
            members.sort_unstable();
            parts.push(members);
        }
        let mut generators: Vec<Vec<Vec<i64>>> = vec![Vec::new(); parts.len()];
        for (k, e) in self.edges.iter().enumerate() {
            if tree_edge[k] {
                continue;
            }
            let w: Vec<i64> = (0..d)
                .map(|t| potential[e.from][t] + e.shift[t] - potential[e.to][t])
                .collect();
            if w.iter().any(|&a| a != 0) {
                generators[component[e.from]].push(w);
            }
        }
        let parts = parts
            .into_iter()
            .zip(generators)
            .map(|(orbits, gens)| {
                let monodromy_basis =
                    normal_form::hermite_rows(&gens, d).expect("monodromy entries are bounded by edge shifts");
                let rank = monodromy_basis.len();
                ComponentPart { orbits, closed: rank == 0, full_rank: rank == d, monodromy_basis }
            })
            .collect();
        ComponentOrbitDecomposition { parts }
    }
}

/// One component of the quotient graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentPart {
    /// Vertex orbits of the component, sorted.
    pub orbits: Vec<usize>,
    /// Hermite basis of the monodromy sublattice (possibly empty).
    pub monodromy_basis: Vec<Vec<i64>>,
    /// Trivial monodromy: every component of the infinite graph in this
    /// orbit is finite.
    pub closed: bool,
    /// Monodromy of rank `d`.
    pub full_rank: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentOrbitDecomposition {
    /// Ordered by smallest member orbit.
    pub parts: Vec<ComponentPart>,
}

impl ComponentOrbitDecomposition {
    /// The infinite graph has finitely many components iff every part has
    /// full-rank monodromy.
    pub fn finitely_many_components(&self) -> bool {
        self.parts.iter().all(|p| p.full_rank)
    }

    pub fn closed_part(&self) -> Option<&ComponentPart> {
        self.parts.iter().find(|p| p.closed)
    }
}

/// The grid graph `𝔾_d`: one vertex orbit, an edge orbit per unit vector.
pub fn grid_graph(d: usize) -> Result<PeriodicGraph> {
    if d == 0 {
        return Err(Error::ZeroRank);
    }
    let edges = (0..d)
        .map(|k| {
            let mut s = vec![0i64; d];
            s[k] = 1;
            EdgeOrbit::new(0, 0, s)
        })
        .collect();
    PeriodicGraph::new(d, 1, edges)
}

/// `𝔾_1` with every edge doubled.
pub fn doubled_grid1() -> PeriodicGraph {
    grid_graph(1).expect("rank 1").with_multiplicity(2)
}

/// `𝔾_d` with all edges parallel to axis `axis` removed.
pub fn grid_without_axis(d: usize, axis: usize) -> Result<PeriodicGraph> {
    let g = grid_graph(d)?;
    Ok(g.filter_edges(|e| e.shift[axis] == 0))
}

/// One vertex orbit with edge orbits of length `r` and `s` in rank 1; its
/// Laplacian polynomial is `4 − x^r − x^{−r} − x^s − x^{−s}`.
pub fn two_step_cycle(r: i64, s: i64) -> PeriodicGraph {
    PeriodicGraph::new(1, 1, vec![EdgeOrbit::new(0, 0, vec![r]), EdgeOrbit::new(0, 0, vec![s])])
        .expect("valid rank-1 graph")
}

/// `𝔾_1` with every edge subdivided: two vertex orbits, Δ = 2 − x − x^{-1}.
pub fn subdivided_grid1() -> PeriodicGraph {
    PeriodicGraph::new(1, 2, vec![EdgeOrbit::new(0, 1, vec![0]), EdgeOrbit::new(1, 0, vec![1])])
        .expect("valid rank-1 graph")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn grid_graph_examples() {
        let g1 = grid_graph(1).unwrap();
        assert_eq!(g1.orbit_count(), 1);
        assert_eq!(g1.edges(), &[EdgeOrbit { from: 0, to: 0, shift: vec![1] }]);
        let g2 = grid_graph(2).unwrap();
        assert_eq!(
            g2.edges(),
            &[EdgeOrbit { from: 0, to: 0, shift: vec![1, 0] }, EdgeOrbit { from: 0, to: 0, shift: vec![0, 1] }]
        );
        assert_eq!(grid_graph(0), Err(Error::ZeroRank));
    }

    #[test]
    fn orientation_is_canonical() {
        let g = PeriodicGraph::new(1, 1, vec![EdgeOrbit { from: 0, to: 0, shift: vec![-1] }]).unwrap();
        assert_eq!(g, grid_graph(1).unwrap());
        let e = EdgeOrbit::new(1, 0, vec![2, -1]);
        assert_eq!(e, EdgeOrbit { from: 0, to: 1, shift: vec![-2, 1] });
    }

    #[test]
    fn validation() {
        assert_eq!(PeriodicGraph::new(1, 0, vec![]), Err(Error::NoVertexOrbits));
        assert!(matches!(
            PeriodicGraph::new(1, 1, vec![EdgeOrbit { from: 0, to: 1, shift: vec![0] }]),
            Err(Error::OrbitOutOfRange { .. })
        ));
        assert!(matches!(
            PeriodicGraph::new(2, 1, vec![EdgeOrbit { from: 0, to: 0, shift: vec![1] }]),
            Err(Error::TranslationLength { .. })
        ));
    }

    #[test]
    fn decompose_examples() {
        let dec = grid_graph(2).unwrap().decompose();
        assert_eq!(dec.parts.len(), 1);
        assert_eq!(dec.parts[0].orbits, vec![0]);
        assert_eq!(dec.parts[0].monodromy_basis, vec![vec![1, 0], vec![0, 1]]);
        assert!(dec.parts[0].full_rank && !dec.parts[0].closed);

        let no_vertical = grid_without_axis(2, 1).unwrap().decompose();
        assert_eq!(no_vertical.parts[0].monodromy_basis, vec![vec![1, 0]]);
        assert!(!no_vertical.parts[0].full_rank);
        assert!(!no_vertical.finitely_many_components());

        let lp = PeriodicGraph::new(1, 1, vec![EdgeOrbit::new(0, 0, vec![0])]).unwrap();
        let dec = lp.decompose();
        assert!(dec.parts[0].closed);
        assert!(dec.closed_part().is_some());
    }

    #[test]
    fn monodromy_through_two_orbits() {
        let dec = subdivided_grid1().decompose();
        assert_eq!(dec.parts.len(), 1);
        assert_eq!(dec.parts[0].monodromy_basis, vec![vec![1]]);
        let two = two_step_cycle(2, 4).decompose();
        assert_eq!(two.parts[0].monodromy_basis, vec![vec![2]]);
        assert!(two.parts[0].full_rank);
    }

    fn random_graph() -> impl Strategy<Value = PeriodicGraph> {
        (1usize..=2, 1usize..=4).prop_flat_map(|(d, n)| {
            proptest::collection::vec((0..n, 0..n, proptest::collection::vec(-2i64..=2, d)), 0..6).prop_map(
                move |es| {
                    let edges = es.into_iter().map(|(i, j, s)| EdgeOrbit::new(i, j, s)).collect();
                    PeriodicGraph::new(d, n, edges).unwrap()
                },
            )
        })
    }

    proptest! {
        #[test]
        fn decompose_invariant_under_reversal_and_relabel(g in random_graph(), seed in any::<u64>()) {
            let dec = g.decompose();
            // reversing stored orientation must not matter
            let flipped: Vec<EdgeOrbit> = g.edges().iter().map(EdgeOrbit::reversed).collect();
            let g2 = PeriodicGraph::new(g.rank(), g.orbit_count(), flipped).unwrap();
            prop_assert_eq!(&g2.decompose(), &dec);

            let n = g.orbit_count();
            let mut perm: Vec<usize> = (0..n).collect();
            let mut s = seed;
            for i in (1..n).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                perm.swap(i, (s >> 33) as usize % (i + 1));
            }
            let relabeled = g.relabel(&perm).unwrap().decompose();
            let mut mapped: Vec<(Vec<usize>, Vec<Vec<i64>>)> = dec
                .parts
                .iter()
                .map(|p| {
                    let mut o: Vec<usize> = p.orbits.iter().map(|&i| perm[i]).collect();
                    o.sort_unstable();
                    (o, p.monodromy_basis.clone())
                })
                .collect();
            mapped.sort();
            let mut got: Vec<(Vec<usize>, Vec<Vec<i64>>)> =
                relabeled.parts.iter().map(|p| (p.orbits.clone(), p.monodromy_basis.clone())).collect();
            got.sort();
            prop_assert_eq!(got, mapped);
        }

        #[test]
        fn parts_cover_orbits(g in random_graph()) {
            let dec = g.decompose();
            let mut all: Vec<usize> = dec.parts.iter().flat_map(|p| p.orbits.clone()).collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..g.orbit_count()).collect::<Vec<_>>());
            for p in &dec.parts {
                prop_assert_eq!(p.closed, p.monodromy_basis.is_empty());
            }
        }
    }
}
