//! Small backtracking subgraph matcher for functional-group templates.
//!
//! A pattern is a list of atom predicates plus bond constraints between
//! pattern positions. Matching is plain subgraph monomorphism; overlapping
//! matches are deduplicated by their matched-atom set.

use std::collections::BTreeSet;

use crate::molgraph::{BondOrder, MolecularGraph};

pub type AtomPred = fn(&MolecularGraph, usize) -> bool;
pub type BondPred = fn(BondOrder) -> bool;

pub struct Pattern {
    pub atoms: Vec<AtomPred>,
    /// (pattern index a, pattern index b, bond predicate)
    pub bonds: Vec<(usize, usize, BondPred)>,
}

impl Pattern {
    /// Distinct matched-atom sets.
    pub fn match_sets(&self, graph: &MolecularGraph) -> BTreeSet<BTreeSet<usize>> {
        let mut out = BTreeSet::new();
        let mut assignment = vec![usize::MAX; self.atoms.len()];
        self.extend(graph, 0, &mut assignment, &mut out);
        out
    }

    pub fn count(&self, graph: &MolecularGraph) -> usize {
        self.match_sets(graph).len()
    }

    fn extend(
        &self,
        graph: &MolecularGraph,
        pos: usize,
        assignment: &mut Vec<usize>,
        out: &mut BTreeSet<BTreeSet<usize>>,
    ) {
        if pos == self.atoms.len() {
            out.insert(assignment.iter().copied().collect());
            return;
        }
        'candidates: for cand in 0..graph.atoms.len() {
            if assignment[..pos].contains(&cand) || !(self.atoms[pos])(graph, cand) {
                continue;
            }
            for &(pa, pb, pred) in &self.bonds {
                let (known, other) = if pb == pos && pa < pos {
                    (assignment[pa], cand)
                } else if pa == pos && pb < pos {
                    (assignment[pb], cand)
                } else {
                    continue;
                };
                match graph.bond_between(known, other) {
                    Some(bi) if pred(graph.bonds[bi].order) => {}
                    _ => continue 'candidates,
                }
            }
            assignment[pos] = cand;
            self.extend(graph, pos + 1, assignment, out);
            assignment[pos] = usize::MAX;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molgraph::{parse_smiles, Element};

    fn is_c(g: &MolecularGraph, a: usize) -> bool {
        g.atoms[a].element == Element::C
    }
    fn is_n(g: &MolecularGraph, a: usize) -> bool {
        g.atoms[a].element == Element::N
    }
    fn triple(o: BondOrder) -> bool {
        o == BondOrder::Triple
    }

    #[test]
    fn finds_nitrile_once_per_group() {
        let pattern = Pattern {
            atoms: vec![is_c, is_n],
            bonds: vec![(0, 1, triple)],
        };
        assert_eq!(pattern.count(&parse_smiles("CC#N").unwrap()), 1);
        assert_eq!(pattern.count(&parse_smiles("N#CCC#N").unwrap()), 2);
        assert_eq!(pattern.count(&parse_smiles("CCCC").unwrap()), 0);
    }
}
