//! Plain-text periodic graph files.
//!
//! A graph file is a TOML document with three keys:
//!
//! ```text
//! d = 2                 # symmetry rank
//! n = 1                 # number of vertex orbits
//! edges = [             # [i, j, [s_1, ..., s_d]], orbits numbered from 1
//!   [1, 1, [1, 0]],
//!   [1, 1, [0, 1]],
//! ]
//! ```
//!
//! The edge `[i, j, s]` joins `v_{i,0}` to `v_{j,s}`; its whole orbit under
//! `Z^d` is implied. Repeated entries are parallel edge orbits.

use std::fmt::Write as _;
use std::path::Path;

use serde::Deserialize;
use torus_trees_core::{EdgeOrbit, PeriodicGraph};

use crate::error::{AppError, Result};

/// Largest rank accepted from files and the command line.
pub const MAX_RANK: usize = 8;
/// Largest number of vertex orbits accepted from files and the command line.
pub const MAX_ORBITS: usize = 64;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphDoc {
    d: usize,
    n: usize,
    #[serde(default)]
    edges: Vec<(usize, usize, Vec<i64>)>,
}

pub fn parse_graph(text: &str) -> Result<PeriodicGraph> {
    let doc: GraphDoc = toml::from_str(text).map_err(|e| AppError::Graph(e.message().to_string()))?;
    if doc.d == 0 || doc.d > MAX_RANK {
        return Err(AppError::Graph(format!("d = {} is outside 1..={MAX_RANK}", doc.d)));
    }
    if doc.n == 0 || doc.n > MAX_ORBITS {
        return Err(AppError::Graph(format!("n = {} is outside 1..={MAX_ORBITS}", doc.n)));
    }
    let mut edges = Vec::with_capacity(doc.edges.len());
    for (k, (i, j, s)) in doc.edges.into_iter().enumerate() {
        for v in [i, j] {
            if v == 0 || v > doc.n {
                return Err(AppError::Graph(format!("edge {}: orbit {v} is outside 1..={}", k + 1, doc.n)));
            }
        }
        if s.len() != doc.d {
            return Err(AppError::Graph(format!(
                "edge {}: translation has {} entries, expected d = {}",
                k + 1,
                s.len(),
                doc.d
            )));
        }
        edges.push(EdgeOrbit::new(i - 1, j - 1, s));
    }
    Ok(PeriodicGraph::new(doc.d, doc.n, edges)?)
}

pub fn read_graph(path: &Path) -> Result<PeriodicGraph> {
    let text = std::fs::read_to_string(path).map_err(|source| AppError::Io { path: path.to_path_buf(), source })?;
    parse_graph(&text).map_err(|e| match e {
        AppError::Graph(msg) => AppError::Graph(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// Writes `g` with every edge orbit in canonical orientation, in stored order.
pub fn format_graph(g: &PeriodicGraph) -> String {
    let mut out = String::new();
    writeln!(out, "d = {}", g.rank()).unwrap();
    writeln!(out, "n = {}", g.orbit_count()).unwrap();
    if g.edges().is_empty() {
        out.push_str("edges = []\n");
        return out;
    }
    out.push_str("edges = [\n");
    for e in g.edges() {
        let e = e.clone().canonical();
        let s: Vec<String> = e.shift.iter().map(i64::to_string).collect();
        writeln!(out, "  [{}, {}, [{}]],", e.from + 1, e.to + 1, s.join(", ")).unwrap();
    }
    out.push_str("]\n");
    out
}
