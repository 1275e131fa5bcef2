//! Functional-group counts over explicit subgraph templates.

use crate::molgraph::{BondOrder, Element, MolecularGraph};

use super::pattern::Pattern;

pub const FRAGMENT_NAMES: [&str; 8] = [
    "fr_nitrile",
    "fr_nitrite",
    "fr_allylic_oxid",
    "fr_halogen",
    "fr_ether",
    "fr_ketone",
    "fr_alkyl_halide",
    "fr_epoxide",
];

fn is_c(g: &MolecularGraph, a: usize) -> bool {
    g.atoms[a].element == Element::C
}
fn is_aliphatic_c(g: &MolecularGraph, a: usize) -> bool {
    is_c(g, a) && !g.atoms[a].aromatic
}
fn is_n0(g: &MolecularGraph, a: usize) -> bool {
    g.atoms[a].element == Element::N && g.atoms[a].charge == 0
}
fn is_o(g: &MolecularGraph, a: usize) -> bool {
    g.atoms[a].element == Element::O
}
fn is_halogen(g: &MolecularGraph, a: usize) -> bool {
    matches!(
        g.atoms[a].element,
        Element::F | Element::Cl | Element::Br | Element::I
    )
}
pub(crate) fn is_sp3_c(g: &MolecularGraph, a: usize) -> bool {
    is_aliphatic_c(g, a)
        && g.neighbors(a)
            .iter()
            .all(|&(_, bi)| g.bonds[bi].order == BondOrder::Single)
}
fn is_sp3_ch(g: &MolecularGraph, a: usize) -> bool {
    is_sp3_c(g, a) && g.h_count(a) >= 1
}
fn is_ether_o(g: &MolecularGraph, a: usize) -> bool {
    is_o(g, a) && g.h_count(a) == 0 && g.degree(a) == 2
}
fn single(o: BondOrder) -> bool {
    o == BondOrder::Single
}
fn double(o: BondOrder) -> bool {
    o == BondOrder::Double
}
fn triple(o: BondOrder) -> bool {
    o == BondOrder::Triple
}
fn any_order(_: BondOrder) -> bool {
    true
}

/// Count every implemented fragment pattern, in `FRAGMENT_NAMES` order.
pub fn fragment_counts(graph: &MolecularGraph) -> Vec<f64> {
    let nitrile = Pattern {
        atoms: vec![is_c, is_n0],
        bonds: vec![(0, 1, triple)],
    };
    let nitrite = Pattern {
        atoms: vec![is_o, is_n0, is_o],
        bonds: vec![(0, 1, single), (1, 2, double)],
    };
    let allylic_oxid = Pattern {
        atoms: vec![is_sp3_ch, is_aliphatic_c, is_c],
        bonds: vec![(0, 1, single), (1, 2, double)],
    };
    let halogen = Pattern {
        atoms: vec![is_halogen, is_c],
        bonds: vec![(0, 1, any_order)],
    };
    let ether = Pattern {
        atoms: vec![is_c, is_ether_o, is_c],
        bonds: vec![(0, 1, single), (1, 2, single)],
    };
    let ketone = Pattern {
        atoms: vec![is_c, is_aliphatic_c, is_o, is_c],
        bonds: vec![(0, 1, single), (1, 2, double), (1, 3, single)],
    };
    let alkyl_halide = Pattern {
        atoms: vec![is_halogen, is_sp3_c],
        bonds: vec![(0, 1, any_order)],
    };

    let epoxide = graph
        .rings
        .iter()
        .filter(|r| {
            r.len() == 3 && {
                let mut els: Vec<Element> =
                    r.iter().map(|&a| graph.atoms[a].element).collect();
                els.sort_by_key(|e| e.atomic_number());
                els == [Element::C, Element::C, Element::O]
            }
        })
        .count();

    vec![
        nitrile.count(graph) as f64,
        nitrite.count(graph) as f64,
        allylic_oxid.count(graph) as f64,
        halogen.count(graph) as f64,
        ether.count(graph) as f64,
        ketone.count(graph) as f64,
        alkyl_halide.count(graph) as f64,
        epoxide as f64,
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molgraph::parse_smiles;

    fn counts(smi: &str) -> Vec<f64> {
        fragment_counts(&parse_smiles(smi).unwrap())
    }

    #[test]
    fn nitriles() {
        assert_eq!(counts("CC#N")[0], 1.0);
        assert_eq!(counts("N#CCC#N")[0], 2.0);
    }

    #[test]
    fn plain_alkane_has_no_heteroatom_fragments() {
        let c = counts("CCCC");
        assert!(c.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn nitrite_ester() {
        let c = counts("CON=O");
        assert_eq!(c[1], 1.0); // fr_nitrite
        assert_eq!(c[0], 0.0);
    }

    #[test]
    fn halide_counts() {
        let c = counts("FC(F)(F)Cl");
        assert_eq!(c[3], 4.0); // fr_halogen
        assert_eq!(c[6], 4.0); // fr_alkyl_halide
    }

    #[test]
    fn epoxide_and_ether() {
        assert_eq!(counts("C1CO1")[7], 1.0);
        assert_eq!(counts("COC")[4], 1.0);
    }

    #[test]
    fn ketone_and_allylic() {
        assert_eq!(counts("CC(C)=O")[5], 1.0);
        assert_eq!(counts("CC=C")[2], 1.0);
    }
}
