//! Molecular graphs parsed from SMILES.
//!
//! Covers the element subset H, B, C, N, O, F, Si, P, S, Cl, Br, I with
//! formal charges, explicit bracket hydrogens, branches, ring closures and
//! lowercase aromatic atoms (c, n, o, s). Stereo markers, isotopes and
//! wildcards are rejected rather than ignored.

mod parser;
mod rings;

pub use parser::parse_smiles;
pub use rings::perceive_rings;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Element {
    H,
    B,
    C,
    N,
    O,
    F,
    Si,
    P,
    S,
    Cl,
    Br,
    I,
}

impl Element {
    pub fn symbol(self) -> &'static str {
        match self {
            Element::H => "H",
            Element::B => "B",
            Element::C => "C",
            Element::N => "N",
            Element::O => "O",
            Element::F => "F",
            Element::Si => "Si",
            Element::P => "P",
            Element::S => "S",
            Element::Cl => "Cl",
            Element::Br => "Br",
            Element::I => "I",
        }
    }

    pub fn atomic_number(self) -> u8 {
        match self {
            Element::H => 1,
            Element::B => 5,
            Element::C => 6,
            Element::N => 7,
            Element::O => 8,
            Element::F => 9,
            Element::Si => 14,
            Element::P => 15,
            Element::S => 16,
            Element::Cl => 17,
            Element::Br => 35,
            Element::I => 53,
        }
    }

    /// Standard atomic weight, hardcoded to four decimals.
    pub fn atomic_mass(self) -> f64 {
        match self {
            Element::H => 1.0080,
            Element::B => 10.8110,
            Element::C => 12.0110,
            Element::N => 14.0070,
            Element::O => 15.9990,
            Element::F => 18.9984,
            Element::Si => 28.0855,
            Element::P => 30.9738,
            Element::S => 32.0650,
            Element::Cl => 35.4530,
            Element::Br => 79.9040,
            Element::I => 126.9045,
        }
    }

    /// Mass of the most abundant isotope.
    pub fn exact_mass(self) -> f64 {
        match self {
            Element::H => 1.007825,
            Element::B => 11.009305,
            Element::C => 12.0,
            Element::N => 14.003074,
            Element::O => 15.994915,
            Element::F => 18.998403,
            Element::Si => 27.976927,
            Element::P => 30.973762,
            Element::S => 31.972071,
            Element::Cl => 34.968853,
            Element::Br => 78.918337,
            Element::I => 126.904473,
        }
    }

    /// Number of valence electrons of the neutral atom.
    pub fn valence_electrons(self) -> u8 {
        match self {
            Element::H => 1,
            Element::B => 3,
            Element::C | Element::Si => 4,
            Element::N | Element::P => 5,
            Element::O | Element::S => 6,
            Element::F | Element::Cl | Element::Br | Element::I => 7,
        }
    }

    /// Standard valences allowed for the element at the given formal charge.
    /// Empty means the element/charge combination is not modeled.
    pub fn allowed_valences(self, charge: i8) -> &'static [u8] {
        match (self, charge) {
            (Element::H, 0) => &[1],
            (Element::B, 0) => &[3],
            (Element::B, -1) => &[4],
            (Element::C, 0) => &[4],
            (Element::C, 1) | (Element::C, -1) => &[3],
            (Element::N, 0) => &[3],
            (Element::N, 1) => &[4],
            (Element::N, -1) => &[2],
            (Element::O, 0) => &[2],
            (Element::O, 1) => &[3],
            (Element::O, -1) => &[1],
            (Element::F | Element::Cl | Element::Br | Element::I, 0) => &[1],
            (Element::F | Element::Cl | Element::Br | Element::I, -1) => &[0],
            (Element::Si, 0) => &[4],
            (Element::P, 0) => &[3, 5],
            (Element::P, 1) => &[4],
            (Element::S, 0) => &[2, 4, 6],
            (Element::S, 1) => &[3],
            (Element::S, -1) => &[1],
            _ => &[],
        }
    }

    pub fn from_symbol(sym: &str) -> Option<Element> {
        Some(match sym {
            "H" => Element::H,
            "B" => Element::B,
            "C" => Element::C,
            "N" => Element::N,
            "O" => Element::O,
            "F" => Element::F,
            "Si" => Element::Si,
            "P" => Element::P,
            "S" => Element::S,
            "Cl" => Element::Cl,
            "Br" => Element::Br,
            "I" => Element::I,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BondOrder {
    Single,
    Double,
    Triple,
    Aromatic,
}

impl BondOrder {
    pub fn as_f64(self) -> f64 {
        match self {
            BondOrder::Single => 1.0,
            BondOrder::Double => 2.0,
            BondOrder::Triple => 3.0,
            BondOrder::Aromatic => 1.5,
        }
    }

    fn valence_units(self) -> u8 {
        match self {
            BondOrder::Single => 2,
            BondOrder::Double => 4,
            BondOrder::Triple => 6,
            BondOrder::Aromatic => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub element: Element,
    pub charge: i8,
    pub implicit_h: u8,
    pub aromatic: bool,
    pub in_ring: bool,
}

impl Atom {
    pub fn atomic_mass(&self) -> f64 {
        self.element.atomic_mass()
    }

    pub fn atomic_number(&self) -> u8 {
        self.element.atomic_number()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bond {
    pub a: usize,
    pub b: usize,
    pub order: BondOrder,
    pub in_ring: bool,
}

impl Bond {
    pub fn other(&self, atom: usize) -> usize {
        if atom == self.a {
            self.b
        } else {
            self.a
        }
    }
}

/// Immutable parsed molecule. Atom order follows SMILES token order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MolecularGraph {
    pub atoms: Vec<Atom>,
    pub bonds: Vec<Bond>,
    /// Smallest set of smallest rings, each a simple atom cycle.
    pub rings: Vec<Vec<usize>>,
    pub source_smiles: String,
    #[serde(skip)]
    adjacency: Vec<Vec<(usize, usize)>>,
}

impl MolecularGraph {
    pub(crate) fn new(atoms: Vec<Atom>, bonds: Vec<Bond>, source_smiles: String) -> Self {
        let mut g = MolecularGraph {
            atoms,
            bonds,
            rings: Vec::new(),
            source_smiles,
            adjacency: Vec::new(),
        };
        g.rebuild_adjacency();
        g
    }

    fn rebuild_adjacency(&mut self) {
        self.adjacency = vec![Vec::new(); self.atoms.len()];
        for (bi, bond) in self.bonds.iter().enumerate() {
            self.adjacency[bond.a].push((bond.b, bi));
            self.adjacency[bond.b].push((bond.a, bi));
        }
    }

    /// Neighbors of `atom` as (neighbor index, bond index) pairs.
    pub fn neighbors(&self, atom: usize) -> &[(usize, usize)] {
        &self.adjacency[atom]
    }

    pub fn degree(&self, atom: usize) -> usize {
        self.adjacency[atom].len()
    }

    /// Integer explicit valence. Aromatic bonds count 1 each, plus one unit
    /// for aromatic C/N/B carrying the Kekulé double bond (benzene carbon:
    /// 3, ring-fusion carbon: 4); aromatic O/S get no bump.
    pub fn explicit_valence(&self, atom: usize) -> u8 {
        let mut units: u32 = 0;
        let mut aromatic_bonds = 0u32;
        for &(_, bi) in &self.adjacency[atom] {
            match self.bonds[bi].order {
                BondOrder::Aromatic => {
                    aromatic_bonds += 1;
                    units += 2;
                }
                o => units += o.valence_units() as u32,
            }
        }
        let mut v = units / 2;
        if aromatic_bonds > 0
            && matches!(self.atoms[atom].element, Element::C | Element::N | Element::B)
        {
            v += 1;
        }
        v as u8
    }

    /// Explicit valence plus implicit hydrogens.
    pub fn total_valence(&self, atom: usize) -> u8 {
        self.explicit_valence(atom) + self.atoms[atom].implicit_h
    }

    /// Total hydrogen count (implicit only; explicit H atoms are separate nodes).
    pub fn h_count(&self, atom: usize) -> u8 {
        let explicit_h = self.adjacency[atom]
            .iter()
            .filter(|&&(n, _)| self.atoms[n].element == Element::H)
            .count() as u8;
        self.atoms[atom].implicit_h + explicit_h
    }

    pub fn heavy_atom_count(&self) -> usize {
        self.atoms
            .iter()
            .filter(|a| a.element != Element::H)
            .count()
    }

    pub fn circuit_rank(&self) -> usize {
        self.bonds.len() + 1 - self.atoms.len()
    }

    pub fn bond_between(&self, a: usize, b: usize) -> Option<usize> {
        self.adjacency[a]
            .iter()
            .find(|&&(n, _)| n == b)
            .map(|&(_, bi)| bi)
    }

    /// Order-invariant 64-bit digest via Morgan-style neighborhood
    /// refinement (4 rounds, commutative combine).
    pub fn graph_hash(&self) -> u64 {
        let mut inv: Vec<u64> = (0..self.atoms.len())
            .map(|i| {
                let a = &self.atoms[i];
                let seed = (a.element.atomic_number() as u64)
                    | ((a.charge as i64 as u64 & 0xff) << 8)
                    | ((a.implicit_h as u64) << 16)
                    | ((a.aromatic as u64) << 24)
                    | ((a.in_ring as u64) << 25)
                    | ((self.degree(i) as u64) << 32);
                mix64(seed)
            })
            .collect();
        for round in 0..4 {
            let mut next = Vec::with_capacity(inv.len());
            for i in 0..self.atoms.len() {
                let mut env: Vec<u64> = self.adjacency[i]
                    .iter()
                    .map(|&(n, bi)| mix64(inv[n] ^ bond_code(self.bonds[bi].order)))
                    .collect();
                env.sort_unstable();
                let mut h = mix64(inv[i] ^ (round as u64 + 1));
                for e in env {
                    h = mix64(h.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(e));
                }
                next.push(h);
            }
            inv = next;
        }
        let mut digest = mix64(
            (self.atoms.len() as u64) ^ ((self.bonds.len() as u64) << 20),
        );
        // commutative combine so equivalent traversal orders agree
        let sum = inv.iter().fold(0u64, |acc, &h| acc.wrapping_add(mix64(h)));
        let xor = inv.iter().fold(0u64, |acc, &h| acc ^ h);
        digest = mix64(digest ^ sum);
        mix64(digest ^ xor)
    }

    /// Per-atom invariants after `rounds` of neighborhood refinement,
    /// shared by `graph_hash` and the Morgan density descriptors.
    pub fn morgan_invariants(&self, rounds: usize) -> Vec<Vec<u64>> {
        let mut inv: Vec<u64> = (0..self.atoms.len())
            .map(|i| {
                let a = &self.atoms[i];
                let seed = (a.element.atomic_number() as u64)
                    | ((a.charge as i64 as u64 & 0xff) << 8)
                    | ((self.h_count(i) as u64) << 16)
                    | ((a.aromatic as u64) << 24)
                    | ((a.in_ring as u64) << 25)
                    | ((self.degree(i) as u64) << 32);
                mix64(seed)
            })
            .collect();
        let mut per_round = vec![inv.clone()];
        for round in 0..rounds {
            let mut next = Vec::with_capacity(inv.len());
            for i in 0..self.atoms.len() {
                let mut env: Vec<u64> = self.adjacency[i]
                    .iter()
                    .map(|&(n, bi)| mix64(inv[n] ^ bond_code(self.bonds[bi].order)))
                    .collect();
                env.sort_unstable();
                let mut h = mix64(inv[i] ^ (round as u64 + 1));
                for e in env {
                    h = mix64(h.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(e));
                }
                next.push(h);
            }
            per_round.push(next.clone());
            inv = next;
        }
        per_round
    }
}

fn bond_code(order: BondOrder) -> u64 {
    match order {
        BondOrder::Single => 0x517c_c1b7_2722_0a95,
        BondOrder::Double => 0x2545_f491_4f6c_dd1d,
        BondOrder::Triple => 0x27d4_eb2f_1656_67c5,
        BondOrder::Aromatic => 0x9e37_79b9_7f4a_7c15,
    }
}

/// splitmix64 finalizer
pub(crate) fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("unbalanced parenthesis at byte {offset}")]
    UnbalancedParenthesis { offset: usize },
    #[error("unclosed ring bond at byte {offset}")]
    UnclosedRingBond { offset: usize },
    #[error("unknown element or token at byte {offset}: {token}")]
    UnknownElement { offset: usize, token: String },
    #[error("valence violation at byte {offset}: {detail}")]
    ValenceViolation { offset: usize, detail: String },
    #[error("multi-fragment input at byte {offset}")]
    MultiFragmentInput { offset: usize },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::UnbalancedParenthesis { offset }
            | ParseError::UnclosedRingBond { offset }
            | ParseError::UnknownElement { offset, .. }
            | ParseError::ValenceViolation { offset, .. }
            | ParseError::MultiFragmentInput { offset } => *offset,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn methane() {
        let g = parse_smiles("C").unwrap();
        assert_eq!(g.atoms.len(), 1);
        assert_eq!(g.atoms[0].implicit_h, 4);
        assert_eq!(g.bonds.len(), 0);
        assert_eq!(g.rings.len(), 0);
    }

    #[test]
    fn hfc_134a() {
        let g = parse_smiles("FCC(F)(F)F").unwrap();
        let c = g
            .atoms
            .iter()
            .filter(|a| a.element == Element::C)
            .count();
        let f = g
            .atoms
            .iter()
            .filter(|a| a.element == Element::F)
            .count();
        assert_eq!((c, f), (2, 4));
        let h: u32 = g.atoms.iter().map(|a| a.implicit_h as u32).sum();
        assert_eq!(h, 2);
        assert_eq!(g.bonds.len(), 5);
        assert!(g.rings.is_empty());
    }

    #[test]
    fn oxirane_ring() {
        let g = parse_smiles("C1CO1").unwrap();
        assert_eq!(g.atoms.len(), 3);
        assert_eq!(g.bonds.len(), 3);
        assert_eq!(g.rings.len(), 1);
        assert_eq!(g.rings[0].len(), 3);
        let o = g
            .atoms
            .iter()
            .position(|a| a.element == Element::O)
            .unwrap();
        assert!(g.rings[0].contains(&o));
        assert!(g.atoms.iter().all(|a| a.in_ring));
        assert!(g.bonds.iter().all(|b| b.in_ring));
    }

    #[test]
    fn unbalanced_paren_offset() {
        let err = parse_smiles("C(").unwrap_err();
        assert_eq!(
            err,
            ParseError::UnbalancedParenthesis { offset: 1 }
        );
    }

    #[test]
    fn naphthalene_two_rings() {
        let g = parse_smiles("c1ccc2ccccc2c1").unwrap();
        assert_eq!(g.atoms.len(), 10);
        assert_eq!(g.bonds.len(), 11);
        assert_eq!(g.rings.len(), 2);
        assert!(g.rings.iter().all(|r| r.len() == 6));
        assert!(g.atoms.iter().all(|a| a.aromatic));
    }

    #[test]
    fn hash_traversal_invariant() {
        assert_eq!(
            parse_smiles("CCO").unwrap().graph_hash(),
            parse_smiles("OCC").unwrap().graph_hash()
        );
        assert_ne!(
            parse_smiles("CCO").unwrap().graph_hash(),
            parse_smiles("CCF").unwrap().graph_hash()
        );
        assert_eq!(
            parse_smiles("C1CC1").unwrap().graph_hash(),
            parse_smiles("C1CC1").unwrap().graph_hash()
        );
    }

    #[test]
    fn charged_species() {
        let g = parse_smiles("[N-]=[N+]=O").unwrap();
        assert_eq!(g.atoms[0].charge, -1);
        assert_eq!(g.atoms[1].charge, 1);
        assert_eq!(g.atoms.iter().map(|a| a.implicit_h).sum::<u8>(), 0);
    }

    #[test]
    fn rejects_multi_fragment() {
        let err = parse_smiles("C.C").unwrap_err();
        assert_eq!(err, ParseError::MultiFragmentInput { offset: 1 });
    }

    #[test]
    fn rejects_stereo_and_isotopes() {
        assert!(matches!(
            parse_smiles("F/C=C/F").unwrap_err(),
            ParseError::UnknownElement { offset: 1, .. }
        ));
        assert!(matches!(
            parse_smiles("[13C]").unwrap_err(),
            ParseError::UnknownElement { .. }
        ));
        assert!(matches!(
            parse_smiles("[C@H](F)(Cl)Br").unwrap_err(),
            ParseError::UnknownElement { .. }
        ));
    }

    #[test]
    fn valence_violation() {
        let err = parse_smiles("C(F)(F)(F)(F)F").unwrap_err();
        assert!(matches!(err, ParseError::ValenceViolation { .. }));
    }

    #[test]
    fn sf6_hexavalent() {
        let g = parse_smiles("FS(F)(F)(F)(F)F").unwrap();
        assert_eq!(g.atoms.len(), 7);
        assert_eq!(g.atoms[1].implicit_h, 0);
    }
}
