//! Experiment configuration (TOML).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tuner::{AverageScale, SearchSpace};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub dataset: PathBuf,
    pub output_dir: PathBuf,
    pub budget: usize,
    pub k: usize,
    pub seed: u64,
    pub pca_threshold: f64,
    pub workers: usize,
    pub ensemble_average_scale: AverageScale,
    pub search: SearchSpace,
}

impl Default for ExperimentConfig {
    fn default() -> ExperimentConfig {
        ExperimentConfig {
            dataset: PathBuf::from("data/dataset.csv"),
            output_dir: PathBuf::from("out"),
            budget: 10,
            k: 3,
            seed: 0,
            pca_threshold: 0.99,
            workers: 1,
            ensemble_average_scale: AverageScale::Qt,
            search: SearchSpace::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<ExperimentConfig, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let cfg: ExperimentConfig = toml::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.pca_threshold > 0.0 && self.pca_threshold <= 1.0) {
            return Err(ConfigError::Invalid(format!(
                "pca_threshold must be in (0, 1], got {}",
                self.pca_threshold
            )));
        }
        if self.budget < 1 || self.k < 1 {
            return Err(ConfigError::Invalid(
                "budget and k must both be >= 1".into(),
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn parses_partial_toml_with_defaults() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(
            f,
            "dataset = \"d.csv\"\nbudget = 5\nseed = 7\n[search]\nepochs = [100, 200]"
        )
        .unwrap();
        let cfg = ExperimentConfig::load(f.path()).unwrap();
        assert_eq!(cfg.budget, 5);
        assert_eq!(cfg.k, 3);
        assert_eq!(cfg.search.epochs, (100, 200));
        assert_eq!(cfg.search.layers, (1, 10));
    }

    #[test]
    fn rejects_bad_threshold() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "pca_threshold = 1.5").unwrap();
        assert!(ExperimentConfig::load(f.path()).is_err());
    }
}
