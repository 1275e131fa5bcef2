//! Versioned JSON artifacts. Every file carries a schema version and a kind
//! tag; loading a newer version or the wrong kind fails cleanly.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ArtifactError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("corrupted artifact {path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("artifact {path} has schema version {found}, this build reads up to {supported}")]
    VersionMismatch {
        path: String,
        found: u32,
        supported: u32,
    },
    #[error("artifact {path} is a {found:?}, expected {expected:?}")]
    KindMismatch {
        path: String,
        found: String,
        expected: String,
    },
}

#[derive(Debug, Serialize, Deserialize)]
struct Envelope<T> {
    schema_version: u32,
    kind: String,
    payload: T,
}

pub fn save_json<T: Serialize>(path: &Path, kind: &str, payload: &T) -> Result<(), ArtifactError> {
    let io_err = |source| ArtifactError::Io {
        path: path.display().to_string(),
        source,
    };
    let envelope = Envelope {
        schema_version: SCHEMA_VERSION,
        kind: kind.to_string(),
        payload,
    };
    let text = serde_json::to_string_pretty(&envelope).map_err(|source| ArtifactError::Json {
        path: path.display().to_string(),
        source,
    })?;
    std::fs::write(path, text + "\n").map_err(io_err)
}

pub fn load_json<T: DeserializeOwned>(path: &Path, kind: &str) -> Result<T, ArtifactError> {
    let text = std::fs::read_to_string(path).map_err(|source| ArtifactError::Io {
        path: path.display().to_string(),
        source,
    })?;
    // peek at the header before deserializing the payload
    #[derive(Deserialize)]
    struct Header {
        schema_version: u32,
        kind: String,
    }
    let json_err = |source| ArtifactError::Json {
        path: path.display().to_string(),
        source,
    };
    let header: Header = serde_json::from_str(&text).map_err(json_err)?;
    if header.schema_version > SCHEMA_VERSION {
        return Err(ArtifactError::VersionMismatch {
            path: path.display().to_string(),
            found: header.schema_version,
            supported: SCHEMA_VERSION,
        });
    }
    if header.kind != kind {
        return Err(ArtifactError::KindMismatch {
            path: path.display().to_string(),
            found: header.kind,
            expected: kind.to_string(),
        });
    }
    let envelope: Envelope<T> = serde_json::from_str(&text).map_err(json_err)?;
    Ok(envelope.payload)
}

/// FNV-1a over raw bytes, hex-encoded; used to fingerprint configs and
/// datasets in the run manifest.
pub fn fingerprint(bytes: &[u8]) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("{h:016x}")
}
