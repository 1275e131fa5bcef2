//! Everything behind the `gwp-screen` binary: dataset ingestion, experiment
//! configuration, versioned artifacts, and the subcommand bodies.

pub mod artifact;
pub mod commands;
pub mod config;
pub mod dataset;

pub use artifact::{fingerprint, load_json, save_json, ArtifactError, SCHEMA_VERSION};
pub use commands::{cmd_analyze, cmd_featurize, cmd_predict, cmd_train, CmdError, TrainedArtifact};
pub use config::{ConfigError, ExperimentConfig};
pub use dataset::{load_dataset, DatasetError, DatasetRecord};
