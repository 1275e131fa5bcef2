//! Wildman-Crippen atomic logP / molar refractivity contributions and the
//! Labute-style approximate accessible surface area.
//!
//! Atom typing is a documented first-match rule list over element,
//! aromaticity, hydrogen count and neighborhood; unmatched atoms fall to
//! their element's default class. Contribution values follow Wildman &
//! Crippen (1999); the per-atom surface area follows Labute (2000) with
//! ideal bond lengths from covalent radii and half-cap overlap removal.

use crate::molgraph::{BondOrder, Element, MolecularGraph};

use super::tables::{covalent_radius, vdw_radius};

/// Per-heavy-atom contribution triples, indexed by atom index.
/// Entries for explicit hydrogen atoms are zero; hydrogen contributions
/// are folded into `h_logp_total` / `h_mr_total` / `h_asa_total`.
#[derive(Debug, Clone)]
pub struct CrippenAssignment {
    pub logp: Vec<f64>,
    pub mr: Vec<f64>,
    pub asa: Vec<f64>,
    pub h_logp_total: f64,
    pub h_mr_total: f64,
    pub h_asa_total: f64,
}

impl CrippenAssignment {
    pub fn mol_logp(&self, graph: &MolecularGraph) -> f64 {
        heavy_atoms(graph).map(|a| self.logp[a]).sum::<f64>() + self.h_logp_total
    }

    pub fn mol_mr(&self, graph: &MolecularGraph) -> f64 {
        heavy_atoms(graph).map(|a| self.mr[a]).sum::<f64>() + self.h_mr_total
    }

    pub fn labute_asa(&self, graph: &MolecularGraph) -> f64 {
        heavy_atoms(graph).map(|a| self.asa[a]).sum::<f64>() + self.h_asa_total
    }
}

pub(crate) fn heavy_atoms(graph: &MolecularGraph) -> impl Iterator<Item = usize> + '_ {
    (0..graph.atoms.len()).filter(|&a| graph.atoms[a].element != Element::H)
}

/// Assign every heavy atom a (logP, MR, ASA) triple.
pub fn crippen_assign(graph: &MolecularGraph) -> CrippenAssignment {
    let n = graph.atoms.len();
    let mut logp = vec![0.0; n];
    let mut mr = vec![0.0; n];
    let mut h_logp_total = 0.0;
    let mut h_mr_total = 0.0;
    for a in heavy_atoms(graph) {
        let (l, m) = atom_class(graph, a);
        logp[a] = l;
        mr[a] = m;
        let (hl, hm) = hydrogen_class(graph, a);
        let hc = graph.h_count(a) as f64;
        h_logp_total += hc * hl;
        h_mr_total += hc * hm;
    }
    let (asa, h_asa_total) = labute_contribs(graph);
    CrippenAssignment {
        logp,
        mr,
        asa,
        h_logp_total,
        h_mr_total,
        h_asa_total,
    }
}

fn orders(graph: &MolecularGraph, a: usize) -> Vec<BondOrder> {
    graph
        .neighbors(a)
        .iter()
        .map(|&(_, bi)| graph.bonds[bi].order)
        .collect()
}

fn has_order(graph: &MolecularGraph, a: usize, o: BondOrder) -> bool {
    orders(graph, a).contains(&o)
}

fn double_to(graph: &MolecularGraph, a: usize, pred: impl Fn(Element) -> bool) -> bool {
    graph.neighbors(a).iter().any(|&(nb, bi)| {
        graph.bonds[bi].order == BondOrder::Double && pred(graph.atoms[nb].element)
    })
}

fn neighbor_elements(graph: &MolecularGraph, a: usize) -> Vec<Element> {
    graph
        .neighbors(a)
        .iter()
        .map(|&(nb, _)| graph.atoms[nb].element)
        .collect()
}

fn has_hetero_neighbor(graph: &MolecularGraph, a: usize) -> bool {
    neighbor_elements(graph, a)
        .iter()
        .any(|&e| !matches!(e, Element::C | Element::H))
}

fn has_aromatic_neighbor(graph: &MolecularGraph, a: usize) -> bool {
    graph
        .neighbors(a)
        .iter()
        .any(|&(nb, _)| graph.atoms[nb].aromatic)
}

fn atom_class(graph: &MolecularGraph, a: usize) -> (f64, f64) {
    let atom = &graph.atoms[a];
    let h = graph.h_count(a);
    match atom.element {
        Element::C => carbon_class(graph, a, h),
        Element::N => nitrogen_class(graph, a, h),
        Element::O => oxygen_class(graph, a, h),
        Element::F if atom.charge == 0 => (0.4202, 1.108),
        Element::Cl if atom.charge == 0 => (0.6895, 5.853),
        Element::Br if atom.charge == 0 => (0.8456, 8.927),
        Element::I if atom.charge == 0 => (0.8857, 14.02),
        Element::F | Element::Cl | Element::Br | Element::I => (-2.9960, 0.0),
        Element::P => (0.8612, 6.920),
        Element::S if atom.aromatic => (0.6237, 6.691),
        Element::S if atom.charge != 0 => (-0.0024, 7.365),
        Element::S => (0.6482, 7.591),
        Element::B | Element::Si => (-0.3808, 5.754),
        Element::H => (0.0, 0.0),
    }
}

fn carbon_class(graph: &MolecularGraph, a: usize, h: u8) -> (f64, f64) {
    let nb_els = neighbor_elements(graph, a);
    if graph.atoms[a].aromatic {
        if h >= 1 {
            return (0.1581, 3.350); // C18 aromatic CH
        }
        for (x, v) in [
            (Element::F, (0.0, 3.257)),
            (Element::Cl, (0.2450, 3.564)),
            (Element::Br, (0.1980, 3.180)),
            (Element::I, (0.0, 3.104)),
        ] {
            if nb_els.contains(&x) {
                return v; // C14-C17 aromatic C-halogen
            }
        }
        if double_to(graph, a, |_| true) {
            return (-0.8186, 3.135); // C25 exocyclic double bond
        }
        let subst: Vec<usize> = graph
            .neighbors(a)
            .iter()
            .filter(|&&(_, bi)| graph.bonds[bi].order != BondOrder::Aromatic)
            .map(|&(nb, _)| nb)
            .collect();
        let Some(&s) = subst.first() else {
            return (0.2955, 4.346); // C19 ring fusion
        };
        if graph.atoms[s].aromatic {
            return (0.2713, 3.904); // C20 biaryl
        }
        return match graph.atoms[s].element {
            Element::C => (0.1360, 3.509), // C21
            Element::N => (0.4619, 4.067), // C22
            Element::O => (0.5437, 3.853), // C23
            Element::S => (0.1893, 2.673), // C24
            _ => (-0.5443, 4.041),         // C13
        };
    }
    let os = orders(graph, a);
    if os.contains(&BondOrder::Double) || os.contains(&BondOrder::Triple) {
        if double_to(graph, a, |e| {
            matches!(e, Element::N | Element::O | Element::S)
        }) {
            return (-0.2783, 5.007); // C5 C=heteroatom
        }
        if has_hetero_neighbor(graph, a) || has_aromatic_neighbor(graph, a) {
            return (0.0017, 3.888); // C7
        }
        return (0.1551, 3.513); // C6
    }
    if has_hetero_neighbor(graph, a) {
        return if h >= 2 {
            (-0.2035, 2.753) // C3
        } else {
            (-0.2051, 2.731) // C4
        };
    }
    if has_aromatic_neighbor(graph, a) {
        return match h {
            3 => {
                let arom_nb = graph
                    .neighbors(a)
                    .iter()
                    .find(|&&(nb, _)| graph.atoms[nb].aromatic)
                    .map(|&(nb, _)| graph.atoms[nb].element);
                if arom_nb == Some(Element::C) {
                    (0.08452, 2.464) // C8
                } else {
                    (-0.1444, 2.412) // C9
                }
            }
            2 => (-0.0516, 2.488), // C10
            1 => (0.1193, 2.582),  // C11
            _ => (-0.0967, 2.576), // C12
        };
    }
    if h >= 2 {
        (0.1441, 2.503) // C1
    } else {
        (0.0, 2.433) // C2
    }
}

fn nitrogen_class(graph: &MolecularGraph, a: usize, h: u8) -> (f64, f64) {
    let atom = &graph.atoms[a];
    if atom.aromatic {
        return if atom.charge == 0 {
            (-0.3239, 2.202) // N11
        } else {
            (-1.1190, 0.0) // N12
        };
    }
    if atom.charge > 0 {
        if h >= 1 {
            return (-1.9500, 0.0); // N10
        }
        if has_order(graph, a, BondOrder::Double) || has_order(graph, a, BondOrder::Triple) {
            return (0.2887, 3.359); // N14
        }
        return (-0.3396, 0.2604); // N13
    }
    if atom.charge < 0 {
        return (-0.4806, 2.134); // NS
    }
    if has_order(graph, a, BondOrder::Triple) {
        return (0.01508, 1.725); // N9 nitrile
    }
    if has_order(graph, a, BondOrder::Double) {
        return if h == 0 && graph.degree(a) >= 2 {
            (0.1836, 2.428) // N6
        } else {
            (0.08387, 1.757) // N5
        };
    }
    let ar = has_aromatic_neighbor(graph, a);
    match h {
        2 => {
            if ar {
                (-1.0270, 2.827) // N3
            } else {
                (-1.0190, 2.262) // N1
            }
        }
        1 => {
            if ar {
                (-0.5188, 3.000) // N4
            } else {
                (-0.7096, 2.173) // N2
            }
        }
        _ => {
            if ar {
                (-0.4458, 2.819) // N8
            } else {
                (-0.3187, 1.839) // N7
            }
        }
    }
}

fn oxygen_class(graph: &MolecularGraph, a: usize, h: u8) -> (f64, f64) {
    let atom = &graph.atoms[a];
    if atom.aromatic {
        return (0.1552, 1.080); // O1
    }
    if atom.charge < 0 {
        let nb_els = neighbor_elements(graph, a);
        if nb_els.contains(&Element::N) {
            return (-0.3339, 0.7774); // O6
        }
        if nb_els.contains(&Element::S) {
            return (-1.1890, 0.0); // O7
        }
        let carboxylate = graph.neighbors(a).iter().any(|&(nb, _)| {
            graph.atoms[nb].element == Element::C
                && double_to(graph, nb, |e| e == Element::O)
        });
        if carboxylate {
            return (-1.3260, 0.0); // O12
        }
        return (-0.1188, 0.6865); // OS
    }
    if h >= 1 {
        return (-0.2893, 0.8238); // O2 hydroxyl
    }
    if let Some(&(p, _)) = graph
        .neighbors(a)
        .iter()
        .find(|&&(_, bi)| graph.bonds[bi].order == BondOrder::Double)
    {
        let pe = graph.atoms[p].element;
        if matches!(pe, Element::N | Element::O) {
            return (0.0335, 3.367); // O5
        }
        if graph.atoms[p].aromatic {
            return (1.1890, 3.135); // O8
        }
        if pe == Element::C {
            let second_dbl_o = graph.neighbors(p).iter().any(|&(c, bi)| {
                c != a
                    && graph.bonds[bi].order == BondOrder::Double
                    && graph.atoms[c].element == Element::O
            });
            if second_dbl_o {
                return (0.4833, 0.3890); // O11 CO2-like
            }
            let acyl_x = graph.neighbors(p).iter().any(|&(c, _)| {
                c != a
                    && matches!(
                        graph.atoms[c].element,
                        Element::N
                            | Element::O
                            | Element::F
                            | Element::Cl
                            | Element::Br
                            | Element::I
                    )
            });
            if acyl_x {
                return (0.1129, 0.2215); // O10
            }
            return (-0.1526, 0.0); // O9
        }
        return (-0.1188, 0.6865);
    }
    if graph.degree(a) == 2 {
        return if has_aromatic_neighbor(graph, a) {
            (0.4833, 1.182) // O4 aromatic ether
        } else {
            (-0.0684, 1.085) // O3 ether
        };
    }
    (-0.1188, 0.6865) // OS
}

fn hydrogen_class(graph: &MolecularGraph, parent: usize) -> (f64, f64) {
    match graph.atoms[parent].element {
        Element::O => {
            let acid = graph.neighbors(parent).iter().any(|&(nb, _)| {
                graph.atoms[nb].element == Element::C
                    && double_to(graph, nb, |e| e == Element::O)
            });
            if acid {
                (0.2980, 1.805) // H4
            } else {
                (-0.2677, 1.395) // H2
            }
        }
        Element::N => (0.2142, 0.9627), // H3
        Element::C | Element::Si | Element::B => (0.1230, 1.057), // H1
        _ => (0.1125, 1.112),           // HS
    }
}

/// Ideal bond length from covalent radii with a fixed contraction per
/// extra bond order (aromatic counts 1.5).
fn ideal_bond_length(a: Element, b: Element, order: BondOrder) -> f64 {
    covalent_radius(a) + covalent_radius(b) - 0.14 * (order.as_f64() - 1.0)
}

fn cap_area(r_self: f64, r_other: f64, mut d: f64) -> f64 {
    d = d.max((r_self - r_other).abs()).min(r_self + r_other);
    let cap_h = r_self - (d * d + r_self * r_self - r_other * r_other) / (2.0 * d);
    std::f64::consts::PI * r_self * cap_h
}

fn labute_contribs(graph: &MolecularGraph) -> (Vec<f64>, f64) {
    let mut asa = vec![0.0; graph.atoms.len()];
    let mut h_total = 0.0;
    let rh = vdw_radius(Element::H);
    for a in heavy_atoms(graph) {
        let ea = graph.atoms[a].element;
        let ra = vdw_radius(ea);
        let mut area = 4.0 * std::f64::consts::PI * ra * ra;
        for &(nb, bi) in graph.neighbors(a) {
            let eb = graph.atoms[nb].element;
            let d = ideal_bond_length(ea, eb, graph.bonds[bi].order);
            area -= cap_area(ra, vdw_radius(eb), d);
        }
        let dh = ideal_bond_length(ea, Element::H, BondOrder::Single);
        let ih = graph.atoms[a].implicit_h as f64;
        area -= ih * cap_area(ra, rh, dh);
        asa[a] = area;
        h_total +=
            ih * (4.0 * std::f64::consts::PI * rh * rh - cap_area(rh, ra, dh));
    }
    // explicit hydrogen atoms contribute like implicit ones
    for a in 0..graph.atoms.len() {
        if graph.atoms[a].element == Element::H {
            if let Some(&(p, bi)) = graph.neighbors(a).first() {
                let ep = graph.atoms[p].element;
                let d = ideal_bond_length(ep, Element::H, graph.bonds[bi].order);
                h_total += 4.0 * std::f64::consts::PI * rh * rh - cap_area(rh, vdw_radius(ep), d);
            }
        }
    }
    (asa, h_total)
}
