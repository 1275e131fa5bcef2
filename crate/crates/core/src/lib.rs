//! GWP100 prediction for single-component refrigerants.
//!
//! Pipeline: SMILES -> 2D descriptors -> standardization + PCA (99%
//! cumulative variance) -> quantile-transformed target -> auto-tuned MLP
//! ensemble -> permutation sensitivity and PC-loading reports.

pub mod descriptors;
pub mod analysis;
pub mod cli;
pub mod molgraph;
pub mod tuner;
pub mod nnet;
pub mod preprocess;
