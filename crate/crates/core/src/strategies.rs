//! Proptest strategies shared by the unit tests.

use alloc::vec::Vec;

use proptest::prelude::*;

use crate::periodic_graph::{EdgeOrbit, PeriodicGraph};
use crate::quotient::FiniteMultigraph;
use crate::sublattice::Sublattice;

/// Rank `d`, up to `max_orbits` orbits and `max_edges` edge orbits.
pub fn periodic_graph(d: usize, max_orbits: usize, max_edges: usize) -> impl Strategy<Value = PeriodicGraph> {
    (1usize..=max_orbits).prop_flat_map(move |n| {
        proptest::collection::vec((0..n, 0..n, proptest::collection::vec(-2i64..=2, d)), 0..=max_edges).prop_map(
            move |es| {
                let edges = es.into_iter().map(|(i, j, s)| EdgeOrbit::new(i, j, s)).collect();
                PeriodicGraph::new(d, n, edges).unwrap()
            },
        )
    })
}

/// Connected, at most `max_vertices` vertices and `max_edges` edges, loops allowed.
pub fn connected_multigraph(max_vertices: usize, max_edges: usize) -> impl Strategy<Value = FiniteMultigraph> {
    (1usize..=max_vertices).prop_flat_map(move |n| {
        let tree = proptest::collection::vec(any::<prop::sample::Index>(), n - 1);
        let extra = proptest::collection::vec((0..n, 0..n), 0..=max_edges - (n - 1));
        (tree, extra).prop_map(move |(tree, extra)| {
            let mut edges: Vec<(usize, usize)> = tree.iter().enumerate().map(|(k, ix)| (ix.index(k + 1), k + 1)).collect();
            edges.extend(extra);
            FiniteMultigraph::new(n, edges).unwrap()
        })
    })
}

/// Nonsingular lattice of rank `d` with index at most `max_index`.
pub fn lattice(d: usize, max_index: u64) -> impl Strategy<Value = Sublattice> {
    proptest::collection::vec(proptest::collection::vec(-4i64..=4, d), d)
        .prop_filter_map("singular or too large", move |cols| {
            Sublattice::from_columns(d, &cols).ok().filter(|l| l.index() <= max_index)
        })
}
