//! Descriptor parity against the committed golden file.
//!
//! Every descriptor for the 25-molecule fixture set must match the reference
//! values within 1e-3 relative tolerance, bit-exact for integer counts.

use std::collections::HashSet;
use std::path::Path;

use gwp_screen::descriptors::{descriptor_names, featurize};
use gwp_screen::molgraph::parse_smiles;

const COUNT_DESCRIPTORS: [&str; 18] = [
    "HeavyAtomCount",
    "NumValenceElectrons",
    "NumHeteroatoms",
    "NOCount",
    "NHOHCount",
    "NumHDonors",
    "NumHAcceptors",
    "NumRotatableBonds",
    "RingCount",
    "NumAromaticRings",
    "NumAliphaticRings",
    "NumSaturatedRings",
    "NumAromaticHeterocycles",
    "NumAliphaticHeterocycles",
    "NumSaturatedHeterocycles",
    "fr_nitrile",
    "fr_nitrite",
    "fr_allylic_oxid",
];

fn golden_path() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/golden_descriptors.csv")
}

#[test]
fn descriptors_match_golden_file() {
    let counts: HashSet<&str> = COUNT_DESCRIPTORS
        .iter()
        .copied()
        .chain(["fr_halogen", "fr_ether", "fr_ketone", "fr_alkyl_halide", "fr_epoxide"])
        .collect();
    let mut rdr = csv::Reader::from_path(golden_path()).expect("golden file present");
    let header: Vec<String> = rdr
        .headers()
        .unwrap()
        .iter()
        .map(|s| s.to_string())
        .collect();
    assert_eq!(&header[..2], &["id".to_string(), "smiles".to_string()]);
    assert_eq!(&header[2..], descriptor_names());

    let mut molecules = 0;
    for rec in rdr.records() {
        let rec = rec.unwrap();
        let id = &rec[0];
        let graph = parse_smiles(&rec[1]).unwrap_or_else(|e| panic!("{id}: {e}"));
        let got = featurize(&graph).unwrap_or_else(|e| panic!("{id}: {e}"));
        for (k, name) in descriptor_names().iter().enumerate() {
            let want: f64 = rec[k + 2].parse().unwrap();
            let have = got.values[k];
            if counts.contains(name) {
                assert_eq!(
                    have, want,
                    "{id}: {name} expected exactly {want}, got {have}"
                );
            } else {
                let tol = 1e-3 * want.abs().max(1e-6);
                assert!(
                    (have - want).abs() <= tol,
                    "{id}: {name} expected {want}, got {have}"
                );
            }
        }
        molecules += 1;
    }
    assert_eq!(molecules, 25);
}
