//! BCUT2D: extreme eigenvalues of a Burden connectivity matrix.
//!
//! Heavy atoms only. Diagonal holds an atomic property (mass, formal charge,
//! or Crippen logP); bonded off-diagonal entries are 0.1 x bond order
//! (0.15 aromatic); non-bonded pairs get a small constant 0.001.

use nalgebra::DMatrix;

use crate::molgraph::{Element, MolecularGraph};

/// (highest, lowest) eigenvalue for the given per-atom diagonal property.
/// `diag` is indexed by atom id; entries for hydrogens are ignored.
pub fn bcut2d(graph: &MolecularGraph, diag: &[f64]) -> (f64, f64) {
    let heavy: Vec<usize> = (0..graph.atoms.len())
        .filter(|&a| graph.atoms[a].element != Element::H)
        .collect();
    let n = heavy.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mut idx = vec![usize::MAX; graph.atoms.len()];
    for (i, &a) in heavy.iter().enumerate() {
        idx[a] = i;
    }
    let mut b = DMatrix::from_element(n, n, 0.001);
    for bond in &graph.bonds {
        if idx[bond.a] == usize::MAX || idx[bond.b] == usize::MAX {
            continue;
        }
        let v = 0.1 * bond.order.as_f64();
        b[(idx[bond.a], idx[bond.b])] = v;
        b[(idx[bond.b], idx[bond.a])] = v;
    }
    for &a in &heavy {
        b[(idx[a], idx[a])] = diag[a];
    }
    let mut ev: Vec<f64> = b.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
    (ev[n - 1], ev[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molgraph::parse_smiles;

    #[test]
    fn single_atom_is_its_property() {
        let g = parse_smiles("C").unwrap();
        let (hi, lo) = bcut2d(&g, &[12.011]);
        assert!((hi - 12.011).abs() < 1e-12);
        assert!((lo - 12.011).abs() < 1e-12);
    }

    #[test]
    fn ethane_splits_symmetric() {
        // 2x2 matrix [[m, 0.1], [0.1, m]] has eigenvalues m +- 0.1
        let g = parse_smiles("CC").unwrap();
        let (hi, lo) = bcut2d(&g, &[12.011, 12.011]);
        assert!((hi - 12.111).abs() < 1e-9);
        assert!((lo - 11.911).abs() < 1e-9);
    }

    #[test]
    fn hi_never_below_low() {
        for smi in ["FC(F)(F)F", "c1ccccc1", "CCOC(C)=O"] {
            let g = parse_smiles(smi).unwrap();
            let diag: Vec<f64> = g.atoms.iter().map(|a| a.element.atomic_mass()).collect();
            let (hi, lo) = bcut2d(&g, &diag);
            assert!(hi >= lo);
        }
    }
}
