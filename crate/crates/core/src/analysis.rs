//! Evaluation metrics, permutation sensitivity of principal components,
//! PC-loading reports, and distribution histograms.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::molgraph::mix64;
use crate::preprocess::PcaModel;
use crate::tuner::EnsembleModel;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("length mismatch: {predictions} predictions vs {truths} truths")]
    LengthMismatch { predictions: usize, truths: usize },
    #[error("component index {pc} out of range ({n_retained} retained)")]
    IndexOutOfRange { pc: usize, n_retained: usize },
    #[error("shape mismatch: expected {expected} columns, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Tuner(#[from] crate::tuner::TunerError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub rmse: f64,
    /// NaN when the truth vector is constant; see `constant_truth`.
    pub r2: f64,
    pub n: usize,
    pub constant_truth: bool,
}

/// RMSE and R² against the truth mean. A constant truth keeps RMSE valid
/// but flags R² as undefined.
pub fn metrics(predictions: &[f64], truths: &[f64]) -> Result<Metrics, AnalysisError> {
    if predictions.len() != truths.len() || predictions.is_empty() {
        return Err(AnalysisError::LengthMismatch {
            predictions: predictions.len(),
            truths: truths.len(),
        });
    }
    let n = truths.len();
    let ss_res: f64 = predictions
        .iter()
        .zip(truths)
        .map(|(p, t)| (p - t) * (p - t))
        .sum();
    let mean = truths.iter().sum::<f64>() / n as f64;
    let ss_tot: f64 = truths.iter().map(|t| (t - mean) * (t - mean)).sum();
    let constant_truth = ss_tot == 0.0;
    Ok(Metrics {
        rmse: (ss_res / n as f64).sqrt(),
        r2: if constant_truth {
            f64::NAN
        } else {
            1.0 - ss_res / ss_tot
        },
        n,
        constant_truth,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcSensitivity {
    pub pc: usize,
    /// Mean RMSE increase (original scale) when the PC column is permuted.
    pub importance: f64,
    /// Mean prediction at the PC's 90th percentile minus at its 10th,
    /// original scale; positive means the PC pushes GWP up.
    pub impact: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityReport {
    pub baseline_rmse: f64,
    /// One entry per retained PC, sorted by |impact| descending.
    pub ranking: Vec<PcSensitivity>,
    pub n_repeats: usize,
    pub seed: u64,
}

fn batch_gwp(ensemble: &EnsembleModel, scores: &[Vec<f64>]) -> Result<Vec<f64>, AnalysisError> {
    scores
        .iter()
        .map(|row| Ok(ensemble.predict_scores(row)?.gwp100))
        .collect()
}

fn percentile(sorted: &[f64], level: f64) -> f64 {
    let pos = level * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] * (1.0 - frac) + sorted[hi] * frac
}

/// Permutation importance plus a signed p10→p90 sweep per retained PC.
pub fn permutation_sensitivity(
    ensemble: &EnsembleModel,
    scores: &[Vec<f64>],
    truths_orig: &[f64],
    seed: u64,
    n_repeats: usize,
) -> Result<SensitivityReport, AnalysisError> {
    assert!(n_repeats >= 1);
    let n_pcs = ensemble.pca.n_retained;
    for row in scores {
        if row.len() != n_pcs {
            return Err(AnalysisError::ShapeMismatch {
                expected: n_pcs,
                got: row.len(),
            });
        }
    }
    let baseline_pred = batch_gwp(ensemble, scores)?;
    let baseline = metrics(&baseline_pred, truths_orig)?.rmse;

    let n = scores.len();
    let mut ranking = Vec::with_capacity(n_pcs);
    for pc in 0..n_pcs {
        let mut delta_sum = 0.0;
        for rep in 0..n_repeats {
            let rep_seed = mix64(seed ^ mix64(((pc as u64) << 32) | rep as u64));
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut ChaCha20Rng::seed_from_u64(rep_seed));
            let permuted: Vec<Vec<f64>> = scores
                .iter()
                .enumerate()
                .map(|(i, row)| {
                    let mut r = row.clone();
                    r[pc] = scores[order[i]][pc];
                    r
                })
                .collect();
            let pred = batch_gwp(ensemble, &permuted)?;
            delta_sum += metrics(&pred, truths_orig)?.rmse - baseline;
        }
        let importance = delta_sum / n_repeats as f64;

        let mut column: Vec<f64> = scores.iter().map(|r| r[pc]).collect();
        column.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let (p10, p90) = (percentile(&column, 0.1), percentile(&column, 0.9));
        let sweep = |value: f64| -> Result<f64, AnalysisError> {
            let swept: Vec<Vec<f64>> = scores
                .iter()
                .map(|row| {
                    let mut r = row.clone();
                    r[pc] = value;
                    r
                })
                .collect();
            let pred = batch_gwp(ensemble, &swept)?;
            Ok(pred.iter().sum::<f64>() / pred.len() as f64)
        };
        let impact = sweep(p90)? - sweep(p10)?;
        ranking.push(PcSensitivity {
            pc,
            importance,
            impact,
        });
    }
    ranking.sort_by(|a, b| {
        b.impact
            .abs()
            .partial_cmp(&a.impact.abs())
            .unwrap()
            .then(a.pc.cmp(&b.pc))
    });
    Ok(SensitivityReport {
        baseline_rmse: baseline,
        ranking,
        n_repeats,
        seed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoadingReport {
    pub pc: usize,
    /// (descriptor name, signed loading), sorted by |loading| descending.
    pub loadings: Vec<(String, f64)>,
}

/// Top-k descriptor loadings of one retained component, values taken
/// verbatim from the stored PCA model.
pub fn pc_loadings(
    pca: &PcaModel,
    column_names: &[String],
    pc: usize,
    top_k: usize,
) -> Result<LoadingReport, AnalysisError> {
    if pc >= pca.n_retained {
        return Err(AnalysisError::IndexOutOfRange {
            pc,
            n_retained: pca.n_retained,
        });
    }
    let component = &pca.components[pc];
    let mut order: Vec<usize> = (0..component.len()).collect();
    order.sort_by(|&a, &b| {
        component[b]
            .abs()
            .partial_cmp(&component[a].abs())
            .unwrap()
            .then(a.cmp(&b))
    });
    Ok(LoadingReport {
        pc,
        loadings: order
            .into_iter()
            .take(top_k)
            .map(|i| (column_names[i].clone(), component[i]))
            .collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

/// Equal-width histogram over [min, max]; the last bin is right-closed.
pub fn histogram(values: &[f64], n_bins: usize) -> Histogram {
    assert!(n_bins >= 1 && !values.is_empty());
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let edges: Vec<f64> = (0..=n_bins)
        .map(|i| lo + (hi - lo) * i as f64 / n_bins as f64)
        .collect();
    let mut counts = vec![0usize; n_bins];
    let width = (hi - lo) / n_bins as f64;
    for &v in values {
        let k = if width > 0.0 {
            (((v - lo) / width).floor() as usize).min(n_bins - 1)
        } else {
            0
        };
        counts[k] += 1;
    }
    Histogram { edges, counts }
}
