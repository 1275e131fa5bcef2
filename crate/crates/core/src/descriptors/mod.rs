//! 2D molecular descriptors.
//!
//! Every descriptor is a pure function of an immutable [`MolecularGraph`];
//! `featurize` assembles the full named vector in a fixed column order and
//! `featurize_batch` stacks molecules into a [`FeatureMatrix`] ready for
//! standardization and PCA.

mod bcut;
mod chi;
mod crippen;
mod fragments;
mod morgan;
mod pattern;
mod tables;
mod tpsa;
mod vsa;

pub use bcut::bcut2d;
pub use chi::{chi_indices, kappa_indices};
pub use crippen::{crippen_assign, CrippenAssignment};
pub use fragments::{fragment_counts, FRAGMENT_NAMES};
pub use morgan::morgan_density;
pub use tpsa::tpsa;
pub use vsa::vsa_bins;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::molgraph::{BondOrder, Element, MolecularGraph};
use crippen::heavy_atoms;
use tables::{SLOGP_EDGES, SMR_EDGES};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DescriptorError {
    #[error("degenerate valence delta at atom {atom}")]
    DegenerateDelta { atom: usize },
    #[error("property/area length mismatch: {props} vs {areas}")]
    LengthMismatch { props: usize, areas: usize },
    #[error("molecule {id}: {source}")]
    InMolecule {
        id: String,
        #[source]
        source: Box<DescriptorError>,
    },
}

/// Fixed descriptor column order shared by every vector and matrix.
pub fn descriptor_names() -> &'static [&'static str] {
    &NAME_ORDER
}

const NAME_ORDER: [&str; 74] = [
    "MolWt",
    "ExactMolWt",
    "HeavyAtomCount",
    "HeavyAtomMolWt",
    "NumValenceElectrons",
    "NumHeteroatoms",
    "NOCount",
    "NHOHCount",
    "NumHDonors",
    "NumHAcceptors",
    "FractionCSP3",
    "NumRotatableBonds",
    "RingCount",
    "NumAromaticRings",
    "NumAliphaticRings",
    "NumSaturatedRings",
    "NumAromaticHeterocycles",
    "NumAliphaticHeterocycles",
    "NumSaturatedHeterocycles",
    "MolLogP",
    "MolMR",
    "LabuteASA",
    "TPSA",
    "SlogP_VSA1",
    "SlogP_VSA2",
    "SlogP_VSA3",
    "SlogP_VSA4",
    "SlogP_VSA5",
    "SlogP_VSA6",
    "SlogP_VSA7",
    "SlogP_VSA8",
    "SlogP_VSA9",
    "SlogP_VSA10",
    "SMR_VSA1",
    "SMR_VSA2",
    "SMR_VSA3",
    "SMR_VSA4",
    "SMR_VSA5",
    "SMR_VSA6",
    "SMR_VSA7",
    "SMR_VSA8",
    "SMR_VSA9",
    "SMR_VSA10",
    "Chi0n",
    "Chi1n",
    "Chi2n",
    "Chi3n",
    "Chi4n",
    "Chi0v",
    "Chi1v",
    "Chi2v",
    "Chi3v",
    "Chi4v",
    "Kappa1",
    "Kappa2",
    "Kappa3",
    "HallKierAlpha",
    "BCUT2D_MWHI",
    "BCUT2D_MWLOW",
    "BCUT2D_CHGHI",
    "BCUT2D_CHGLOW",
    "BCUT2D_LOGPHI",
    "BCUT2D_LOGPLOW",
    "fr_nitrile",
    "fr_nitrite",
    "fr_allylic_oxid",
    "fr_halogen",
    "fr_ether",
    "fr_ketone",
    "fr_alkyl_halide",
    "fr_epoxide",
    "FpDensityMorgan1",
    "FpDensityMorgan2",
    "FpDensityMorgan3",
];

/// One molecule's descriptors, aligned with [`descriptor_names`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescriptorVector {
    pub values: Vec<f64>,
}

impl DescriptorVector {
    pub fn get(&self, name: &str) -> Option<f64> {
        NAME_ORDER
            .iter()
            .position(|&n| n == name)
            .map(|i| self.values[i])
    }
}

/// Rectangular descriptor table over a molecule batch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    pub column_names: Vec<String>,
    pub ids: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl FeatureMatrix {
    /// Indices of columns with zero variance across the batch; these are
    /// dropped before standardization.
    pub fn zero_variance_columns(&self) -> Vec<usize> {
        (0..self.column_names.len())
            .filter(|&c| {
                let first = self.rows[0][c];
                self.rows.iter().all(|r| r[c] == first)
            })
            .collect()
    }

    /// New matrix without the given column indices.
    pub fn drop_columns(&self, drop: &[usize]) -> FeatureMatrix {
        let keep: Vec<usize> = (0..self.column_names.len())
            .filter(|c| !drop.contains(c))
            .collect();
        FeatureMatrix {
            column_names: keep
                .iter()
                .map(|&c| self.column_names[c].clone())
                .collect(),
            ids: self.ids.clone(),
            rows: self
                .rows
                .iter()
                .map(|r| keep.iter().map(|&c| r[c]).collect())
                .collect(),
        }
    }

    pub fn to_csv<W: std::io::Write>(&self, w: W) -> csv::Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        let mut header = vec!["id".to_string()];
        header.extend(self.column_names.iter().cloned());
        wtr.write_record(&header)?;
        for (id, row) in self.ids.iter().zip(&self.rows) {
            let mut rec = vec![id.clone()];
            rec.extend(row.iter().map(|v| format!("{v}")));
            wtr.write_record(&rec)?;
        }
        wtr.flush()?;
        Ok(())
    }
}

fn sp3_carbon(graph: &MolecularGraph, a: usize) -> bool {
    graph.atoms[a].element == Element::C
        && !graph.atoms[a].aromatic
        && graph
            .neighbors(a)
            .iter()
            .all(|&(_, bi)| graph.bonds[bi].order == BondOrder::Single)
}

fn ring_counts(graph: &MolecularGraph) -> [f64; 7] {
    let all_arom = |r: &Vec<usize>| r.iter().all(|&a| graph.atoms[a].aromatic);
    let hetero = |r: &Vec<usize>| r.iter().any(|&a| graph.atoms[a].element != Element::C);
    let saturated = |r: &Vec<usize>| {
        let single_edges = r.iter().enumerate().all(|(k, &a)| {
            let next = r[(k + 1) % r.len()];
            graph
                .bond_between(a, next)
                .is_none_or(|bi| graph.bonds[bi].order == BondOrder::Single)
        });
        single_edges && !r.iter().any(|&a| graph.atoms[a].aromatic)
    };
    let count = |pred: &dyn Fn(&Vec<usize>) -> bool| {
        graph.rings.iter().filter(|r| pred(r)).count() as f64
    };
    [
        graph.rings.len() as f64,
        count(&all_arom),
        count(&|r| !all_arom(r)),
        count(&saturated),
        count(&|r| all_arom(r) && hetero(r)),
        count(&|r| !all_arom(r) && hetero(r)),
        count(&|r| saturated(r) && hetero(r)),
    ]
}

fn rotatable_bonds(graph: &MolecularGraph) -> f64 {
    let heavy_degree = |a: usize| {
        graph
            .neighbors(a)
            .iter()
            .filter(|&&(nb, _)| graph.atoms[nb].element != Element::H)
            .count()
    };
    graph
        .bonds
        .iter()
        .filter(|b| {
            b.order == BondOrder::Single
                && !b.in_ring
                && graph.atoms[b.a].element != Element::H
                && graph.atoms[b.b].element != Element::H
                && heavy_degree(b.a) >= 2
                && heavy_degree(b.b) >= 2
        })
        .count() as f64
}

/// Compute the full descriptor vector, ordered per [`descriptor_names`].
pub fn featurize(graph: &MolecularGraph) -> Result<DescriptorVector, DescriptorError> {
    let n = graph.atoms.len();
    let h_mass = Element::H.atomic_mass();
    let implicit_h: f64 = graph.atoms.iter().map(|a| a.implicit_h as f64).sum();
    let explicit_h = graph
        .atoms
        .iter()
        .filter(|a| a.element == Element::H)
        .count() as f64;

    let mol_wt: f64 =
        graph.atoms.iter().map(|a| a.element.atomic_mass()).sum::<f64>() + implicit_h * h_mass;
    let exact_wt: f64 = graph.atoms.iter().map(|a| a.element.exact_mass()).sum::<f64>()
        + implicit_h * Element::H.exact_mass();
    let heavy_wt = mol_wt - (implicit_h + explicit_h) * h_mass;
    let valence_e: f64 = graph
        .atoms
        .iter()
        .map(|a| a.element.valence_electrons() as f64 - a.charge as f64)
        .sum::<f64>()
        + implicit_h;

    let heavy: Vec<usize> = heavy_atoms(graph).collect();
    let is_no = |a: usize| matches!(graph.atoms[a].element, Element::N | Element::O);
    let heteroatoms = heavy
        .iter()
        .filter(|&&a| graph.atoms[a].element != Element::C)
        .count() as f64;
    let no_count = heavy.iter().filter(|&&a| is_no(a)).count() as f64;
    let nhoh: f64 = heavy
        .iter()
        .filter(|&&a| is_no(a))
        .map(|&a| graph.h_count(a) as f64)
        .sum();
    let donors = heavy
        .iter()
        .filter(|&&a| is_no(a) && graph.h_count(a) >= 1)
        .count() as f64;

    let carbons: Vec<usize> = heavy
        .iter()
        .copied()
        .filter(|&a| graph.atoms[a].element == Element::C)
        .collect();
    let frac_csp3 = if carbons.is_empty() {
        0.0
    } else {
        carbons.iter().filter(|&&a| sp3_carbon(graph, a)).count() as f64 / carbons.len() as f64
    };

    let rings = ring_counts(graph);
    let cr = crippen_assign(graph);
    let mol_logp = cr.mol_logp(graph);
    let mol_mr = cr.mol_mr(graph);
    let labute = cr.labute_asa(graph);

    let props_logp: Vec<f64> = heavy.iter().map(|&a| cr.logp[a]).collect();
    let props_mr: Vec<f64> = heavy.iter().map(|&a| cr.mr[a]).collect();
    let areas: Vec<f64> = heavy.iter().map(|&a| cr.asa[a]).collect();
    let slogp_vsa = vsa_bins(&props_logp, &areas, &SLOGP_EDGES)?;
    let smr_vsa = vsa_bins(&props_mr, &areas, &SMR_EDGES)?;

    let chi = chi_indices(graph)?;
    let kappa = kappa_indices(graph);

    let diag_mass: Vec<f64> = (0..n).map(|a| graph.atoms[a].element.atomic_mass()).collect();
    let diag_chg: Vec<f64> = (0..n).map(|a| graph.atoms[a].charge as f64).collect();
    let (mw_hi, mw_lo) = bcut2d(graph, &diag_mass);
    let (chg_hi, chg_lo) = bcut2d(graph, &diag_chg);
    let (logp_hi, logp_lo) = bcut2d(graph, &cr.logp);

    let frs = fragment_counts(graph);
    let fp = morgan_density(graph);

    let mut values = Vec::with_capacity(NAME_ORDER.len());
    values.extend([
        mol_wt, exact_wt, heavy.len() as f64, heavy_wt, valence_e, heteroatoms, no_count, nhoh,
        donors, no_count, frac_csp3,
        rotatable_bonds(graph),
    ]);
    values.extend(rings);
    values.extend([mol_logp, mol_mr, labute, tpsa(graph)]);
    values.extend(slogp_vsa);
    values.extend(smr_vsa);
    values.extend(chi);
    values.extend(kappa);
    values.extend([mw_hi, mw_lo, chg_hi, chg_lo, logp_hi, logp_lo]);
    values.extend(frs);
    values.extend(fp);
    debug_assert_eq!(values.len(), NAME_ORDER.len());
    Ok(DescriptorVector { values })
}

/// Featurize a batch, attaching the molecule id to any per-molecule failure.
pub fn featurize_batch(
    ids: &[String],
    graphs: &[MolecularGraph],
) -> Result<FeatureMatrix, DescriptorError> {
    let rows: Result<Vec<Vec<f64>>, DescriptorError> = ids
        .iter()
        .zip(graphs)
        .map(|(id, g)| {
            featurize(g)
                .map(|v| v.values)
                .map_err(|e| DescriptorError::InMolecule {
                    id: id.clone(),
                    source: Box::new(e),
                })
        })
        .collect();
    Ok(FeatureMatrix {
        column_names: NAME_ORDER.iter().map(|s| s.to_string()).collect(),
        ids: ids.to_vec(),
        rows: rows?,
    })
}
