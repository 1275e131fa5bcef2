//! Sanity checks over the bundled AR6 dataset: every entry parses, ids and
//! structures are distinct, and the descriptor matrix stays wide after the
//! zero-variance drop.

use std::collections::HashMap;
use std::path::Path;

use gwp_screen::cli::load_dataset;
use gwp_screen::descriptors::featurize_batch;
use gwp_screen::molgraph::parse_smiles;

fn dataset_path() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/ar6_gwp100.csv")
}

#[test]
fn ar6_dataset_loads_and_is_large_enough() {
    let records = load_dataset(&dataset_path()).unwrap();
    assert!(records.len() >= 150, "only {} compounds", records.len());
    assert!(records.iter().all(|r| r.class_label.is_some()));
}

#[test]
fn graph_hash_has_no_collisions_on_dataset() {
    let records = load_dataset(&dataset_path()).unwrap();
    let mut seen: HashMap<u64, String> = HashMap::new();
    for r in &records {
        let h = parse_smiles(&r.smiles).unwrap().graph_hash();
        if let Some(other) = seen.insert(h, r.id.clone()) {
            panic!("hash collision between {other} and {}", r.id);
        }
    }
}

#[test]
fn dataset_matrix_stays_wide_after_drop() {
    let records = load_dataset(&dataset_path()).unwrap();
    let ids: Vec<String> = records.iter().map(|r| r.id.clone()).collect();
    let graphs: Vec<_> = records
        .iter()
        .map(|r| parse_smiles(&r.smiles).unwrap())
        .collect();
    let matrix = featurize_batch(&ids, &graphs).unwrap();
    let kept = matrix.column_names.len() - matrix.zero_variance_columns().len();
    assert!(kept > 50, "only {kept} informative columns");
    assert!(matrix.rows.iter().flatten().all(|v| v.is_finite()));
}
