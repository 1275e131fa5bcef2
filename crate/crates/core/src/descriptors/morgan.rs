//! Morgan environment density: distinct refined atom environments per heavy
//! atom, at radii 1..=3.
//!
//! An atom's radius-r environment only counts as new information when its
//! r-ball contains more bonds than its (r-1)-ball, so terminal atoms in tiny
//! molecules do not inflate the density.

use crate::molgraph::MolecularGraph;

fn bfs_dist(graph: &MolecularGraph, root: usize, cutoff: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; graph.atoms.len()];
    dist[root] = Some(0);
    let mut frontier = vec![root];
    for d in 1..=cutoff {
        let mut next = Vec::new();
        for &a in &frontier {
            for &(nb, _) in graph.neighbors(a) {
                if dist[nb].is_none() {
                    dist[nb] = Some(d);
                    next.push(nb);
                }
            }
        }
        frontier = next;
    }
    dist
}

fn ball_edge_count(graph: &MolecularGraph, root: usize, radius: usize) -> usize {
    let dist = bfs_dist(graph, root, radius);
    graph
        .bonds
        .iter()
        .filter(|b| dist[b.a].is_some() && dist[b.b].is_some())
        .count()
}

/// `[FpDensityMorgan1, FpDensityMorgan2, FpDensityMorgan3]`
pub fn morgan_density(graph: &MolecularGraph) -> [f64; 3] {
    let rounds = graph.morgan_invariants(3);
    let heavy = graph.heavy_atom_count() as f64;
    let mut distinct: std::collections::BTreeSet<u64> = rounds[0].iter().copied().collect();
    let mut out = [0.0; 3];
    for radius in 1..=3 {
        for a in 0..graph.atoms.len() {
            if ball_edge_count(graph, a, radius) > ball_edge_count(graph, a, radius - 1) {
                distinct.insert(rounds[radius][a]);
            }
        }
        out[radius - 1] = distinct.len() as f64 / heavy;
    }
    out
}
