//! Topological polar surface area from Ertl-style N/O group contributions.

use crate::molgraph::{BondOrder, Element, MolecularGraph};

pub fn tpsa(graph: &MolecularGraph) -> f64 {
    let mut total = 0.0;
    for a in 0..graph.atoms.len() {
        let atom = &graph.atoms[a];
        let h = graph.h_count(a);
        let orders: Vec<BondOrder> = graph
            .neighbors(a)
            .iter()
            .map(|&(_, bi)| graph.bonds[bi].order)
            .collect();
        let has_double = orders.contains(&BondOrder::Double);
        let has_triple = orders.contains(&BondOrder::Triple);
        match atom.element {
            Element::N => {
                total += if atom.aromatic {
                    if h >= 1 {
                        15.79
                    } else {
                        12.89
                    }
                } else if atom.charge == 1 && has_double {
                    11.68
                } else if atom.charge != 0 {
                    0.0
                } else if has_triple {
                    23.79
                } else if has_double {
                    if h >= 1 {
                        23.85
                    } else {
                        12.36
                    }
                } else {
                    match h {
                        0 => 3.24,
                        1 => 12.03,
                        _ => 26.02,
                    }
                };
            }
            Element::O => {
                total += if atom.aromatic {
                    13.14
                } else if atom.charge == -1 {
                    23.06
                } else if atom.charge != 0 {
                    0.0
                } else if has_double {
                    17.07
                } else if h >= 1 {
                    20.23
                } else {
                    9.23
                };
            }
            _ => {}
        }
    }
    total
}
