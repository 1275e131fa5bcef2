//! SMILES tokenizer and graph builder.

use std::collections::HashMap;

use super::rings::perceive_rings_raw;
use super::{Atom, Bond, BondOrder, Element, MolecularGraph, ParseError};

struct PendingAtom {
    atom: Atom,
    offset: usize,
    h_fixed: bool, // bracket atom: hydrogen count is explicit
}

struct Builder {
    atoms: Vec<PendingAtom>,
    bonds: Vec<Bond>,
    prev: Option<usize>,
    branch_stack: Vec<(usize, usize)>, // (atom index, '(' offset)
    pending_bond: Option<(BondOrder, usize)>,
    ring_open: HashMap<u16, (usize, Option<BondOrder>, usize)>,
}

impl Builder {
    fn new() -> Self {
        Builder {
            atoms: Vec::new(),
            bonds: Vec::new(),
            prev: None,
            branch_stack: Vec::new(),
            pending_bond: None,
            ring_open: HashMap::new(),
        }
    }

    fn push_atom(&mut self, atom: Atom, offset: usize, h_fixed: bool) -> Result<(), ParseError> {
        let idx = self.atoms.len();
        let aromatic_new = atom.aromatic;
        self.atoms.push(PendingAtom {
            atom,
            offset,
            h_fixed,
        });
        if let Some(prev) = self.prev {
            let order = match self.pending_bond.take() {
                Some((o, _)) => o,
                None => {
                    if self.atoms[prev].atom.aromatic && aromatic_new {
                        BondOrder::Aromatic
                    } else {
                        BondOrder::Single
                    }
                }
            };
            self.bonds.push(Bond {
                a: prev,
                b: idx,
                order,
                in_ring: false,
            });
        } else if let Some((_, off)) = self.pending_bond.take() {
            return Err(ParseError::UnknownElement {
                offset: off,
                token: "bond before first atom".into(),
            });
        }
        self.prev = Some(idx);
        Ok(())
    }

    fn close_ring(&mut self, number: u16, offset: usize) -> Result<(), ParseError> {
        let here = self.prev.ok_or(ParseError::UnknownElement {
            offset,
            token: "ring closure before any atom".into(),
        })?;
        let pending = self.pending_bond.take().map(|(o, _)| o);
        match self.ring_open.remove(&number) {
            None => {
                self.ring_open.insert(number, (here, pending, offset));
            }
            Some((other, open_order, open_offset)) => {
                if other == here {
                    return Err(ParseError::ValenceViolation {
                        offset,
                        detail: "ring bond to the same atom".into(),
                    });
                }
                if self
                    .bonds
                    .iter()
                    .any(|b| (b.a == other && b.b == here) || (b.a == here && b.b == other))
                {
                    return Err(ParseError::ValenceViolation {
                        offset,
                        detail: "duplicate bond between atom pair".into(),
                    });
                }
                let order = match (open_order, pending) {
                    (Some(a), Some(b)) if a != b => {
                        return Err(ParseError::ValenceViolation {
                            offset,
                            detail: format!(
                                "ring bond order mismatch with opening at byte {open_offset}"
                            ),
                        })
                    }
                    (Some(o), _) | (_, Some(o)) => o,
                    (None, None) => {
                        if self.atoms[other].atom.aromatic && self.atoms[here].atom.aromatic {
                            BondOrder::Aromatic
                        } else {
                            BondOrder::Single
                        }
                    }
                };
                self.bonds.push(Bond {
                    a: other,
                    b: here,
                    order,
                    in_ring: false,
                });
            }
        }
        Ok(())
    }
}

/// Parse a SMILES string over the supported grammar subset into a
/// validated molecular graph.
pub fn parse_smiles(smiles: &str) -> Result<MolecularGraph, ParseError> {
    let bytes = smiles.as_bytes();
    if bytes.is_empty() {
        return Err(ParseError::UnknownElement {
            offset: 0,
            token: "empty input".into(),
        });
    }
    let mut b = Builder::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b'(' => {
                let here = b.prev.ok_or(ParseError::UnbalancedParenthesis { offset: i })?;
                b.branch_stack.push((here, i));
                i += 1;
            }
            b')' => {
                if b.pending_bond.is_some() {
                    return Err(ParseError::UnknownElement {
                        offset: i,
                        token: "dangling bond before ')'".into(),
                    });
                }
                let (atom, _) = b
                    .branch_stack
                    .pop()
                    .ok_or(ParseError::UnbalancedParenthesis { offset: i })?;
                b.prev = Some(atom);
                i += 1;
            }
            b'-' | b'=' | b'#' | b':' => {
                if b.pending_bond.is_some() {
                    return Err(ParseError::UnknownElement {
                        offset: i,
                        token: "consecutive bond symbols".into(),
                    });
                }
                let order = match c {
                    b'-' => BondOrder::Single,
                    b'=' => BondOrder::Double,
                    b'#' => BondOrder::Triple,
                    _ => BondOrder::Aromatic,
                };
                b.pending_bond = Some((order, i));
                i += 1;
            }
            b'0'..=b'9' => {
                b.close_ring((c - b'0') as u16, i)?;
                i += 1;
            }
            b'%' => {
                if bytes.get(i + 1).is_some_and(u8::is_ascii_digit)
                    && bytes.get(i + 2).is_some_and(u8::is_ascii_digit)
                {
                    let n = (bytes[i + 1] - b'0') as u16 * 10 + (bytes[i + 2] - b'0') as u16;
                    b.close_ring(n, i)?;
                    i += 3;
                } else {
                    return Err(ParseError::UnknownElement {
                        offset: i,
                        token: "% not followed by two digits".into(),
                    });
                }
            }
            b'[' => {
                let consumed = parse_bracket_atom(bytes, i, &mut b)?;
                i += consumed;
            }
            b'.' => return Err(ParseError::MultiFragmentInput { offset: i }),
            _ => {
                let consumed = parse_organic_atom(bytes, i, &mut b)?;
                i += consumed;
            }
        }
    }
    if let Some((order, off)) = b.pending_bond {
        let _ = order;
        return Err(ParseError::UnknownElement {
            offset: off,
            token: "dangling bond at end of input".into(),
        });
    }
    if let Some(&(_, off)) = b.branch_stack.first() {
        return Err(ParseError::UnbalancedParenthesis { offset: off });
    }
    if !b.ring_open.is_empty() {
        let off = b.ring_open.values().map(|&(_, _, o)| o).min().unwrap();
        return Err(ParseError::UnclosedRingBond { offset: off });
    }

    finalize(b, smiles)
}

fn parse_organic_atom(bytes: &[u8], i: usize, b: &mut Builder) -> Result<usize, ParseError> {
    let (element, aromatic, len) = match bytes[i] {
        b'C' if bytes.get(i + 1) == Some(&b'l') => (Element::Cl, false, 2),
        b'B' if bytes.get(i + 1) == Some(&b'r') => (Element::Br, false, 2),
        b'B' => (Element::B, false, 1),
        b'C' => (Element::C, false, 1),
        b'N' => (Element::N, false, 1),
        b'O' => (Element::O, false, 1),
        b'P' => (Element::P, false, 1),
        b'S' => (Element::S, false, 1),
        b'F' => (Element::F, false, 1),
        b'I' => (Element::I, false, 1),
        b'c' => (Element::C, true, 1),
        b'n' => (Element::N, true, 1),
        b'o' => (Element::O, true, 1),
        b's' => (Element::S, true, 1),
        other => {
            return Err(ParseError::UnknownElement {
                offset: i,
                token: (other as char).to_string(),
            })
        }
    };
    b.push_atom(
        Atom {
            element,
            charge: 0,
            implicit_h: 0,
            aromatic,
            in_ring: false,
        },
        i,
        false,
    )?;
    Ok(len)
}

fn parse_bracket_atom(bytes: &[u8], start: usize, b: &mut Builder) -> Result<usize, ParseError> {
    let mut i = start + 1;
    let unterminated = || ParseError::UnknownElement {
        offset: start,
        token: "unterminated bracket atom".into(),
    };

    // element symbol (isotopes, wildcards and stereo are rejected here)
    let (element, aromatic) = match bytes.get(i).copied().ok_or_else(unterminated)? {
        b'c' => (Element::C, true),
        b'n' => (Element::N, true),
        b'o' => (Element::O, true),
        b's' if !matches!(bytes.get(i + 1), Some(b'i' | b'e')) => (Element::S, true),
        c if c.is_ascii_uppercase() => {
            let two = bytes
                .get(i + 1)
                .filter(|n| n.is_ascii_lowercase())
                .map(|&n| format!("{}{}", c as char, n as char));
            if let Some(sym) = two.as_ref().and_then(|s| Element::from_symbol(s)) {
                i += 1;
                (sym, false)
            } else if let Some(sym) = Element::from_symbol(&(c as char).to_string()) {
                (sym, false)
            } else {
                return Err(ParseError::UnknownElement {
                    offset: i,
                    token: two.unwrap_or_else(|| (c as char).to_string()),
                });
            }
        }
        other => {
            return Err(ParseError::UnknownElement {
                offset: i,
                token: (other as char).to_string(),
            })
        }
    };
    i += 1;

    // explicit hydrogen count
    let mut h_count: u8 = 0;
    if bytes.get(i) == Some(&b'H') {
        i += 1;
        h_count = 1;
        let mut digits = 0u32;
        let mut seen = false;
        while let Some(d) = bytes.get(i).filter(|c| c.is_ascii_digit()) {
            digits = digits * 10 + (d - b'0') as u32;
            seen = true;
            i += 1;
            if digits > 9 {
                return Err(ParseError::ValenceViolation {
                    offset: i - 1,
                    detail: "hydrogen count too large".into(),
                });
            }
        }
        if seen {
            h_count = digits as u8;
        }
    }

    // formal charge
    let mut charge: i8 = 0;
    if let Some(&sign) = bytes.get(i).filter(|&&c| c == b'+' || c == b'-') {
        let unit: i8 = if sign == b'+' { 1 } else { -1 };
        i += 1;
        let mut magnitude: i8 = 1;
        if let Some(d) = bytes.get(i).filter(|c| c.is_ascii_digit()) {
            magnitude = (d - b'0') as i8;
            i += 1;
        } else {
            while bytes.get(i) == Some(&sign) {
                magnitude += 1;
                i += 1;
            }
        }
        charge = unit * magnitude;
    }

    match bytes.get(i) {
        Some(b']') => i += 1,
        Some(&other) => {
            return Err(ParseError::UnknownElement {
                offset: i,
                token: (other as char).to_string(),
            })
        }
        None => return Err(unterminated()),
    }

    b.push_atom(
        Atom {
            element,
            charge,
            implicit_h: h_count,
            aromatic,
            in_ring: false,
        },
        start,
        true,
    )?;
    Ok(i - start)
}

fn finalize(b: Builder, smiles: &str) -> Result<MolecularGraph, ParseError> {
    let offsets: Vec<usize> = b.atoms.iter().map(|a| a.offset).collect();
    let h_fixed: Vec<bool> = b.atoms.iter().map(|a| a.h_fixed).collect();
    let atoms: Vec<Atom> = b.atoms.into_iter().map(|a| a.atom).collect();
    let mut graph = MolecularGraph::new(atoms, b.bonds, smiles.to_string());

    // rings and in_ring flags
    let rings = perceive_rings_raw(&graph);
    for ring in &rings {
        for (k, &a) in ring.iter().enumerate() {
            graph.atoms[a].in_ring = true;
            let next = ring[(k + 1) % ring.len()];
            if let Some(bi) = graph.bond_between(a, next) {
                graph.bonds[bi].in_ring = true;
            }
        }
    }
    graph.rings = rings;

    // lowercase aromatic atoms must sit in a ring
    for (idx, atom) in graph.atoms.iter().enumerate() {
        if atom.aromatic && !atom.in_ring {
            return Err(ParseError::ValenceViolation {
                offset: offsets[idx],
                detail: "aromatic atom outside of a ring".into(),
            });
        }
    }

    huckel_lite(&mut graph);
    assign_implicit_h(&mut graph, &offsets, &h_fixed)?;
    Ok(graph)
}

/// Mark explicit Kekulé 6-rings of sp2 C/N as aromatic (flags only; the
/// written bond orders are kept).
fn huckel_lite(graph: &mut MolecularGraph) {
    let rings = graph.rings.clone();
    for ring in &rings {
        if ring.len() != 6 {
            continue;
        }
        if !ring.iter().all(|&a| {
            matches!(graph.atoms[a].element, Element::C | Element::N)
        }) {
            continue;
        }
        let orders: Option<Vec<BondOrder>> = (0..6)
            .map(|k| {
                graph
                    .bond_between(ring[k], ring[(k + 1) % 6])
                    .map(|bi| graph.bonds[bi].order)
            })
            .collect();
        let Some(orders) = orders else { continue };
        let alternating = |offset: usize| {
            orders.iter().enumerate().all(|(k, &o)| {
                if (k + offset) % 2 == 0 {
                    o == BondOrder::Double
                } else {
                    o == BondOrder::Single
                }
            })
        };
        if alternating(0) || alternating(1) {
            for &a in ring {
                graph.atoms[a].aromatic = true;
            }
        }
    }
}

fn assign_implicit_h(
    graph: &mut MolecularGraph,
    offsets: &[usize],
    h_fixed: &[bool],
) -> Result<(), ParseError> {
    for idx in 0..graph.atoms.len() {
        let explicit = explicit_valence_for_h(graph, idx);
        let atom = &graph.atoms[idx];
        let allowed = atom.element.allowed_valences(atom.charge);
        if allowed.is_empty() {
            return Err(ParseError::ValenceViolation {
                offset: offsets[idx],
                detail: format!(
                    "no modeled valence for {}{:+}",
                    atom.element.symbol(),
                    atom.charge
                ),
            });
        }
        if h_fixed[idx] {
            let total = explicit + graph.atoms[idx].implicit_h;
            if !allowed.contains(&total) {
                return Err(ParseError::ValenceViolation {
                    offset: offsets[idx],
                    detail: format!(
                        "valence {} not allowed for {}{:+}",
                        total,
                        graph.atoms[idx].element.symbol(),
                        graph.atoms[idx].charge
                    ),
                });
            }
        } else {
            match allowed.iter().find(|&&v| v >= explicit) {
                Some(&v) => graph.atoms[idx].implicit_h = v - explicit,
                None => {
                    return Err(ParseError::ValenceViolation {
                        offset: offsets[idx],
                        detail: format!(
                            "explicit valence {} exceeds every allowed valence of {}",
                            explicit,
                            graph.atoms[idx].element.symbol()
                        ),
                    })
                }
            }
        }
    }
    Ok(())
}

fn explicit_valence_for_h(graph: &MolecularGraph, idx: usize) -> u8 {
    graph.explicit_valence(idx)
}
