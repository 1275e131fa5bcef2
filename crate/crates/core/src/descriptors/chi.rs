//! Kier-Hall connectivity (chi) and shape (kappa) indices.

use crate::molgraph::{BondOrder, Element, MolecularGraph};

use super::tables::{hall_kier_alpha, Hybridization};
use super::DescriptorError;

/// Valence delta per heavy atom: δ = Zv − h for second-row atoms,
/// (Zv − h)/(Z − Zv − 1) beyond. The simple variant δn = Zv − h always.
fn deltas(graph: &MolecularGraph) -> Result<(Vec<f64>, Vec<f64>), DescriptorError> {
    let n = graph.atoms.len();
    let mut dn = vec![f64::NAN; n];
    let mut dv = vec![f64::NAN; n];
    for a in 0..n {
        let atom = &graph.atoms[a];
        if atom.element == Element::H {
            continue;
        }
        let z = atom.element.atomic_number() as i32;
        let zv = atom.element.valence_electrons() as i32;
        let h = graph.h_count(a) as i32;
        let simple = (zv - h) as f64;
        if simple < 0.0 {
            return Err(DescriptorError::DegenerateDelta { atom: a });
        }
        dn[a] = simple;
        dv[a] = if z <= 10 {
            simple
        } else {
            (zv - h) as f64 / (z - zv - 1) as f64
        };
    }
    Ok((dn, dv))
}

/// Enumerate simple paths with exactly `k` edges over heavy atoms, each
/// undirected path counted once.
pub(crate) fn simple_paths(graph: &MolecularGraph, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut path = Vec::with_capacity(k + 1);
    for start in 0..graph.atoms.len() {
        if graph.atoms[start].element == Element::H {
            continue;
        }
        path.push(start);
        extend(graph, k, &mut path, &mut out);
        path.pop();
    }
    out
}

fn extend(graph: &MolecularGraph, k: usize, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if path.len() == k + 1 {
        // keep one orientation per undirected path
        if path.first() <= path.last() {
            out.push(path.clone());
        }
        return;
    }
    let last = *path.last().unwrap();
    for &(nb, _) in graph.neighbors(last) {
        if graph.atoms[nb].element != Element::H && !path.contains(&nb) {
            path.push(nb);
            extend(graph, k, path, out);
            path.pop();
        }
    }
}

/// Chi0n..Chi4n followed by Chi0v..Chi4v.
pub fn chi_indices(graph: &MolecularGraph) -> Result<[f64; 10], DescriptorError> {
    let (dn, dv) = deltas(graph)?;
    let mut out = [0.0; 10];
    for (slot, d) in [(0, &dn), (5, &dv)] {
        out[slot] = d
            .iter()
            .filter(|v| v.is_finite() && **v > 0.0)
            .map(|v| v.powf(-0.5))
            .sum();
        for k in 1..5 {
            let mut s = 0.0;
            for path in simple_paths(graph, k) {
                let prod: f64 = path.iter().map(|&a| d[a]).product();
                if prod > 0.0 {
                    s += prod.powf(-0.5);
                }
            }
            out[slot + k] = s;
        }
    }
    Ok(out)
}

pub(crate) fn hybridization(graph: &MolecularGraph, a: usize) -> Hybridization {
    if graph.atoms[a].aromatic {
        return Hybridization::Aromatic;
    }
    let mut doubles = 0;
    for &(_, bi) in graph.neighbors(a) {
        match graph.bonds[bi].order {
            BondOrder::Triple => return Hybridization::Sp,
            BondOrder::Double => doubles += 1,
            _ => {}
        }
    }
    match doubles {
        0 => Hybridization::Sp3,
        1 => Hybridization::Sp2,
        _ => Hybridization::Sp,
    }
}

/// (Kappa1, Kappa2, Kappa3, HallKierAlpha)
pub fn kappa_indices(graph: &MolecularGraph) -> [f64; 4] {
    let heavy: Vec<usize> = (0..graph.atoms.len())
        .filter(|&a| graph.atoms[a].element != Element::H)
        .collect();
    let alpha: f64 = heavy
        .iter()
        .map(|&a| hall_kier_alpha(graph.atoms[a].element, hybridization(graph, a)))
        .sum();
    let a_count = heavy.len() as f64;
    let p1 = graph
        .bonds
        .iter()
        .filter(|b| {
            graph.atoms[b.a].element != Element::H && graph.atoms[b.b].element != Element::H
        })
        .count() as f64;
    let p2 = simple_paths(graph, 2).len() as f64;
    let p3 = simple_paths(graph, 3).len() as f64;

    let k1 = if p1 + alpha > 0.0 {
        (a_count + alpha) * (a_count + alpha - 1.0).powi(2) / (p1 + alpha).powi(2)
    } else {
        0.0
    };
    let k2 = if p2 + alpha > 0.0 && a_count >= 2.0 {
        (a_count + alpha - 1.0) * (a_count + alpha - 2.0).powi(2) / (p2 + alpha).powi(2)
    } else {
        0.0
    };
    let k3 = if p3 + alpha > 0.0 && a_count >= 3.0 {
        if (heavy.len()) % 2 == 1 {
            (a_count + alpha - 1.0) * (a_count + alpha - 3.0).powi(2) / (p3 + alpha).powi(2)
        } else {
            (a_count + alpha - 3.0) * (a_count + alpha - 2.0).powi(2) / (p3 + alpha).powi(2)
        }
    } else {
        0.0
    };
    [k1, k2, k3, alpha]
}
