//! Smallest set of smallest rings via Horton candidate cycles and GF(2)
//! independence, with deterministic tie-breaking.

use std::collections::{HashSet, VecDeque};

use super::MolecularGraph;

/// Returns exactly circuit-rank many smallest rings, each an ordered
/// simple atom cycle. Shorter cycles are preferred; ties break on the
/// smallest lexicographic sorted atom-index tuple.
pub fn perceive_rings(graph: &MolecularGraph) -> Vec<Vec<usize>> {
    perceive_rings_raw(graph)
}

pub(crate) fn perceive_rings_raw(graph: &MolecularGraph) -> Vec<Vec<usize>> {
    let n = graph.atoms.len();
    let m = graph.bonds.len();
    if m + 1 <= n {
        return Vec::new();
    }
    let rank = m + 1 - n;

    let mut candidates: Vec<Candidate> = Vec::new();
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    for root in 0..n {
        let (dist, parent) = bfs(graph, root);
        for (bi, bond) in graph.bonds.iter().enumerate() {
            let _ = bi;
            let (x, y) = (bond.a, bond.b);
            // tree edges produce no cycle through this root
            if parent[x] == Some(y) || parent[y] == Some(x) {
                continue;
            }
            let px = path_to_root(&parent, x);
            let py = path_to_root(&parent, y);
            if !disjoint_except_root(&px, &py, root) {
                continue;
            }
            let _ = dist;
            // ordered cycle: root .. x, then y .. root (root dropped from tail)
            let mut cycle: Vec<usize> = px.iter().rev().copied().collect();
            cycle.extend(py[..py.len() - 1].iter().copied());
            if cycle.len() < 3 {
                continue;
            }
            let edges = edge_bitset(graph, &cycle, m);
            if seen.insert(edges.clone()) {
                let mut atoms_sorted = cycle.clone();
                atoms_sorted.sort_unstable();
                candidates.push(Candidate {
                    cycle,
                    atoms_sorted,
                    edges,
                });
            }
        }
    }

    candidates.sort_by(|a, b| {
        a.cycle
            .len()
            .cmp(&b.cycle.len())
            .then_with(|| a.atoms_sorted.cmp(&b.atoms_sorted))
    });

    // greedy GF(2) independence over the edge space
    let mut basis: Vec<Vec<u64>> = Vec::new();
    let mut chosen = Vec::new();
    for cand in candidates {
        if chosen.len() == rank {
            break;
        }
        let mut v = cand.edges.clone();
        for b in &basis {
            let pivot = leading_bit(b);
            if pivot.map_or(false, |p| bit(&v, p)) {
                xor_into(&mut v, b);
            }
        }
        if v.iter().any(|&w| w != 0) {
            // reduce new vector to echelon form against existing basis order
            basis.push(v);
            basis.sort_by_key(|b| std::cmp::Reverse(leading_bit(b)));
            chosen.push(cand.cycle);
        }
    }
    chosen
}

struct Candidate {
    cycle: Vec<usize>,
    atoms_sorted: Vec<usize>,
    edges: Vec<u64>,
}

fn bfs(graph: &MolecularGraph, root: usize) -> (Vec<usize>, Vec<Option<usize>>) {
    let n = graph.atoms.len();
    let mut dist = vec![usize::MAX; n];
    let mut parent = vec![None; n];
    dist[root] = 0;
    let mut q = VecDeque::from([root]);
    while let Some(u) = q.pop_front() {
        // deterministic neighbor order: bonds were added in token order
        for &(v, _) in graph.neighbors(u) {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                parent[v] = Some(u);
                q.push_back(v);
            }
        }
    }
    (dist, parent)
}

fn path_to_root(parent: &[Option<usize>], mut node: usize) -> Vec<usize> {
    let mut path = vec![node];
    while let Some(p) = parent[node] {
        path.push(p);
        node = p;
    }
    path
}

fn disjoint_except_root(px: &[usize], py: &[usize], root: usize) -> bool {
    let sx: HashSet<usize> = px.iter().copied().filter(|&a| a != root).collect();
    py.iter().filter(|&&a| a != root).all(|a| !sx.contains(a))
}

fn edge_bitset(graph: &MolecularGraph, cycle: &[usize], m: usize) -> Vec<u64> {
    let mut bits = vec![0u64; m.div_ceil(64)];
    for k in 0..cycle.len() {
        let a = cycle[k];
        let b = cycle[(k + 1) % cycle.len()];
        let bi = graph
            .bond_between(a, b)
            .expect("cycle edges exist in the graph");
        bits[bi / 64] |= 1 << (bi % 64);
    }
    bits
}

fn leading_bit(bits: &[u64]) -> Option<usize> {
    for (w, &word) in bits.iter().enumerate().rev() {
        if word != 0 {
            return Some(w * 64 + 63 - word.leading_zeros() as usize);
        }
    }
    None
}

fn bit(bits: &[u64], idx: usize) -> bool {
    bits[idx / 64] & (1 << (idx % 64)) != 0
}

fn xor_into(target: &mut [u64], other: &[u64]) {
    for (t, o) in target.iter_mut().zip(other) {
        *t ^= o;
    }
}
