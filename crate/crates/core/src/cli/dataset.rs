//! Dataset CSV ingestion with validation at read time.

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::molgraph::parse_smiles;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetRecord {
    pub id: String,
    pub smiles: String,
    pub gwp100: f64,
    pub class_label: Option<String>,
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("row {row}: {detail}")]
    InvalidRow { row: usize, detail: String },
    #[error("dataset has {0} rows; at least 10 are required")]
    TooSmall(usize),
}

/// Load and validate `id,smiles,gwp100[,class]`. Every id must be unique,
/// every GWP positive, every SMILES parseable.
pub fn load_dataset(path: &Path) -> Result<Vec<DatasetRecord>, DatasetError> {
    let file = std::fs::File::open(path).map_err(|source| DatasetError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(file);
    let header = rdr.headers()?.clone();
    if header.len() < 3 || &header[0] != "id" || &header[1] != "smiles" || &header[2] != "gwp100" {
        return Err(DatasetError::InvalidRow {
            row: 1,
            detail: format!("expected header id,smiles,gwp100[,class], got {header:?}"),
        });
    }
    let mut seen = HashSet::new();
    let mut records = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let row = k + 2; // 1-based, after the header
        let rec = rec?;
        let invalid = |detail: String| DatasetError::InvalidRow { row, detail };
        if rec.len() < 3 {
            return Err(invalid(format!("expected at least 3 fields, got {}", rec.len())));
        }
        let id = rec[0].to_string();
        if !seen.insert(id.clone()) {
            return Err(invalid(format!("duplicate id {id:?}")));
        }
        let gwp100: f64 = rec[2]
            .parse()
            .map_err(|e| invalid(format!("gwp100 {:?}: {e}", &rec[2])))?;
        if !(gwp100 > 0.0) {
            return Err(invalid(format!("gwp100 must be positive, got {gwp100}")));
        }
        let smiles = rec[1].to_string();
        parse_smiles(&smiles).map_err(|e| invalid(format!("SMILES {smiles:?}: {e}")))?;
        records.push(DatasetRecord {
            id,
            smiles,
            gwp100,
            class_label: rec.get(3).filter(|s| !s.is_empty()).map(str::to_string),
        });
    }
    if records.len() < 10 {
        return Err(DatasetError::TooSmall(records.len()));
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_csv(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn loads_valid_dataset() {
        let rows: String = (0..12)
            .map(|i| format!("m{i},{},{}.0,HFC\n", "C".repeat(i % 3 + 1), i + 1))
            .collect();
        let f = write_csv(&format!("id,smiles,gwp100,class\n{rows}"));
        let d = load_dataset(f.path()).unwrap();
        assert_eq!(d.len(), 12);
        assert_eq!(d[0].class_label.as_deref(), Some("HFC"));
    }

    #[test]
    fn rejects_duplicates_and_bad_values() {
        let f = write_csv("id,smiles,gwp100\na,C,1.0\na,CC,2.0\n");
        assert!(matches!(
            load_dataset(f.path()),
            Err(DatasetError::InvalidRow { row: 3, .. })
        ));
        let f = write_csv("id,smiles,gwp100\na,C,-1.0\n");
        assert!(load_dataset(f.path()).is_err());
        let f = write_csv("id,smiles,gwp100\na,C(,1.0\n");
        assert!(load_dataset(f.path()).is_err());
    }

    #[test]
    fn missing_file_is_io_error() {
        assert!(matches!(
            load_dataset(Path::new("/nonexistent/nope.csv")),
            Err(DatasetError::Io { .. })
        ));
    }
}
