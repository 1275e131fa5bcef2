//! Dataset splitting, balanced validation sampling, up-sampling,
//! random-search hyperparameter tuning, and top-k ensembling.
//!
//! Trials are independent: trial `i` derives its own seed from the master
//! seed, so serial and parallel runs produce identical trial lists.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::metrics;
use crate::descriptors::{featurize, FeatureMatrix};
use crate::molgraph::{mix64, parse_smiles};
use crate::nnet::{forward, mlp_init, train, Activation, Hyperparameters, MlpModel};
use crate::preprocess::{pca_fit, pca_transform, PcaModel, QuantileTransformer, Standardizer};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TunerError {
    #[error("dataset too small: {0}")]
    DatasetTooSmall(String),
    #[error("only {got} trials succeeded, need {need} for the ensemble")]
    NotEnoughTrials { got: usize, need: usize },
    #[error(transparent)]
    Preprocess(#[from] crate::preprocess::PreprocessError),
    #[error(transparent)]
    Nnet(#[from] crate::nnet::NnetError),
}

/// 80-10-10 split; the test block is frozen for the whole experiment while
/// train/valid get re-randomized per trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSplit {
    pub train: Vec<usize>,
    pub valid: Vec<usize>,
    pub test: Vec<usize>,
    pub seed: u64,
}

pub fn split_dataset(n: usize, seed: u64) -> Result<DatasetSplit, TunerError> {
    if n < 10 {
        return Err(TunerError::DatasetTooSmall(format!(
            "need at least 10 rows for an 80-10-10 split, got {n}"
        )));
    }
    let hold = (0.1 * n as f64).round() as usize;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha20Rng::seed_from_u64(seed));
    let mut test: Vec<usize> = order[..hold].to_vec();
    let mut valid: Vec<usize> = order[hold..2 * hold].to_vec();
    let mut train: Vec<usize> = order[2 * hold..].to_vec();
    test.sort_unstable();
    valid.sort_unstable();
    train.sort_unstable();
    Ok(DatasetSplit {
        train,
        valid,
        test,
        seed,
    })
}

fn bin_of(value: f64) -> usize {
    // equal-width deciles of the QT scale, 1.0 folded into the last bin
    ((value * 10.0).floor() as usize).min(9)
}

/// Stratified validation draw: 10 equal-width QT bins, proportional
/// allocation with largest-remainder rounding, empty bins skipped.
pub fn balanced_valid_sample(
    pool: &[usize],
    targets_qt: &[f64],
    valid_size: usize,
    seed: u64,
) -> Result<Vec<usize>, TunerError> {
    if valid_size >= pool.len() {
        return Err(TunerError::DatasetTooSmall(format!(
            "validation size {valid_size} must be below pool size {}",
            pool.len()
        )));
    }
    let mut bins: Vec<Vec<usize>> = vec![Vec::new(); 10];
    for &i in pool {
        bins[bin_of(targets_qt[i])].push(i);
    }
    let total = pool.len() as f64;
    let quotas: Vec<f64> = bins
        .iter()
        .map(|b| valid_size as f64 * b.len() as f64 / total)
        .collect();
    let mut take: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    // cap at bin occupancy, then hand out the remainder by largest fraction
    for (t, b) in take.iter_mut().zip(&bins) {
        *t = (*t).min(b.len());
    }
    let mut remaining = valid_size.saturating_sub(take.iter().sum());
    let mut order: Vec<usize> = (0..10).collect();
    order.sort_by(|&a, &b| {
        let fa = quotas[a] - quotas[a].floor();
        let fb = quotas[b] - quotas[b].floor();
        fb.partial_cmp(&fa).unwrap().then(a.cmp(&b))
    });
    while remaining > 0 {
        let before = remaining;
        for &b in &order {
            if remaining == 0 {
                break;
            }
            if take[b] < bins[b].len() {
                take[b] += 1;
                remaining -= 1;
            }
        }
        if remaining == before {
            break; // every bin exhausted; cannot happen while valid_size < pool
        }
    }
    let mut rng = ChaCha20Rng::seed_from_u64(mix64(seed ^ 0x7661_6c69_645f_7372));
    let mut out = Vec::with_capacity(valid_size);
    for (b, bin) in bins.iter().enumerate() {
        let mut shuffled = bin.clone();
        shuffled.shuffle(&mut rng);
        out.extend_from_slice(&shuffled[..take[b]]);
    }
    out.sort_unstable();
    Ok(out)
}

/// Duplicate rows of under-populated target bins until each reaches the
/// median non-empty bin count; output is a shuffled index multiset.
pub fn upsample_imbalanced(train: &[usize], targets_qt: &[f64], seed: u64) -> Vec<usize> {
    let mut bins: Vec<Vec<usize>> = vec![Vec::new(); 10];
    for &i in train {
        bins[bin_of(targets_qt[i])].push(i);
    }
    let mut counts: Vec<usize> = bins.iter().map(|b| b.len()).filter(|&c| c > 0).collect();
    counts.sort_unstable();
    if counts.len() < 2 {
        return train.to_vec();
    }
    let median = if counts.len() % 2 == 1 {
        counts[counts.len() / 2] as f64
    } else {
        (counts[counts.len() / 2 - 1] + counts[counts.len() / 2]) as f64 / 2.0
    };
    let goal = median.ceil() as usize;
    let mut rng = ChaCha20Rng::seed_from_u64(mix64(seed ^ 0x7570_7361_6d70_6c65));
    let mut out: Vec<usize> = train.to_vec();
    for bin in bins.iter().filter(|b| !b.is_empty()) {
        for _ in bin.len()..goal {
            out.push(bin[rng.gen_range(0..bin.len())]);
        }
    }
    out.shuffle(&mut rng);
    out
}

/// Random-search ranges; defaults enclose every published architecture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchSpace {
    pub layers: (usize, usize),
    pub neurons: (usize, usize),
    pub batch: (usize, usize),
    pub epochs: (usize, usize),
    pub learning_rate: f64,
}

impl Default for SearchSpace {
    fn default() -> SearchSpace {
        SearchSpace {
            layers: (1, 10),
            neurons: (2, 128),
            batch: (16, 192),
            epochs: (1000, 10000),
            learning_rate: 0.001,
        }
    }
}

impl SearchSpace {
    fn sample(&self, rng: &mut ChaCha20Rng, seed: u64) -> Hyperparameters {
        Hyperparameters {
            n_layers: rng.gen_range(self.layers.0..=self.layers.1),
            n_neurons: rng.gen_range(self.neurons.0..=self.neurons.1),
            activation: if rng.gen_range(0..2) == 0 {
                Activation::Tanh
            } else {
                Activation::Sigmoid
            },
            batch_size: rng.gen_range(self.batch.0..=self.batch.1),
            epochs: rng.gen_range(self.epochs.0..=self.epochs.1),
            learning_rate: self.learning_rate,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub trial: usize,
    pub hyperparameters: Hyperparameters,
    pub model: MlpModel,
    pub rmse_qt: f64,
    pub r2_qt: f64,
    pub rmse_orig: f64,
    pub r2_orig: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailedTrial {
    pub trial: usize,
    pub hyperparameters: Hyperparameters,
    pub error: String,
}

/// Everything one autotune run produces: the frozen split, the shared
/// preprocessing stack, and every trial in rank order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AutotuneOutcome {
    pub split: DatasetSplit,
    pub standardizer: Standardizer,
    pub pca: PcaModel,
    pub quantile: QuantileTransformer,
    /// Successful trials sorted ascending by validation RMSE (QT).
    pub trials: Vec<TrialResult>,
    pub failures: Vec<FailedTrial>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TunerConfig {
    pub budget: usize,
    pub seed: u64,
    pub workers: usize,
    pub pca_threshold: f64,
    pub search: SearchSpace,
}

impl Default for TunerConfig {
    fn default() -> TunerConfig {
        TunerConfig {
            budget: 10,
            seed: 0,
            workers: 1,
            pca_threshold: 0.99,
            search: SearchSpace::default(),
        }
    }
}

fn matrix_rows(scores: &nalgebra::DMatrix<f64>, rows: &[usize]) -> Vec<Vec<f64>> {
    rows.iter()
        .map(|&r| scores.row(r).iter().copied().collect())
        .collect()
}

/// Run `budget` random-search trials over the non-test pool.
///
/// Preprocessing (standardizer, PCA, quantile transform) is fit once on the
/// pool so every ensemble member shares identical state; the test rows never
/// influence any fit.
pub fn autotune(
    matrix: &FeatureMatrix,
    targets: &[f64],
    cfg: &TunerConfig,
) -> Result<AutotuneOutcome, TunerError> {
    assert_eq!(matrix.rows.len(), targets.len(), "row/target count mismatch");
    if cfg.budget < 1 {
        return Err(TunerError::DatasetTooSmall("budget must be >= 1".into()));
    }
    let n = matrix.rows.len();
    let split = split_dataset(n, cfg.seed)?;
    let mut pool: Vec<usize> = split
        .train
        .iter()
        .chain(&split.valid)
        .copied()
        .collect();
    pool.sort_unstable();

    let pool_matrix = FeatureMatrix {
        column_names: matrix.column_names.clone(),
        ids: pool.iter().map(|&i| matrix.ids[i].clone()).collect(),
        rows: pool.iter().map(|&i| matrix.rows[i].clone()).collect(),
    };
    let standardizer = Standardizer::fit(&pool_matrix)?;
    let pca = pca_fit(&standardizer.apply(&pool_matrix)?, cfg.pca_threshold)?;
    let pool_targets: Vec<f64> = pool.iter().map(|&i| targets[i]).collect();
    let quantile = QuantileTransformer::fit(&pool_targets, pool_targets.len().min(1000))?;

    // PC scores for every dataset row, in dataset order
    let scores = pca_transform(&pca, &standardizer.apply(matrix)?)?;
    let targets_qt: Vec<f64> = targets.iter().map(|&t| quantile.transform(t)).collect();

    // Per-PC spread over the pool. Training runs on variance-normalized
    // scores (raw PC scores span orders of magnitude and saturate the
    // activations at init); the scale is folded back into the first layer
    // afterwards so stored models keep consuming raw scores.
    let score_scale: Vec<f64> = (0..pca.n_retained)
        .map(|j| {
            let col: Vec<f64> = pool.iter().map(|&i| scores[(i, j)]).collect();
            let mean = col.iter().sum::<f64>() / col.len() as f64;
            let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / col.len() as f64;
            let sd = var.sqrt();
            if sd > 1e-12 {
                sd
            } else {
                1.0
            }
        })
        .collect();

    let valid_size = split.valid.len();
    let run_trial = |trial: usize| -> Result<TrialResult, FailedTrial> {
        let trial_seed = mix64(cfg.seed ^ mix64(trial as u64));
        let fail = |hp: &Hyperparameters, e: String| FailedTrial {
            trial,
            hyperparameters: hp.clone(),
            error: e,
        };
        let mut rng = ChaCha20Rng::seed_from_u64(trial_seed);
        let hp = cfg.search.sample(&mut rng, trial_seed);
        let valid = balanced_valid_sample(&pool, &targets_qt, valid_size, trial_seed)
            .map_err(|e| fail(&hp, e.to_string()))?;
        let train_rows: Vec<usize> = pool.iter().copied().filter(|i| !valid.contains(i)).collect();
        let augmented = upsample_imbalanced(&train_rows, &targets_qt, trial_seed);

        let x: Vec<Vec<f64>> = matrix_rows(&scores, &augmented)
            .into_iter()
            .map(|row| row.iter().zip(&score_scale).map(|(v, s)| v / s).collect())
            .collect();
        let y: Vec<f64> = augmented.iter().map(|&i| targets_qt[i]).collect();
        let mut model = mlp_init(pca.n_retained, &hp)
            .and_then(|m| train(m, &x, &y))
            .map_err(|e| fail(&hp, e.to_string()))?;
        for row in &mut model.layers[0].weights {
            for (w, s) in row.iter_mut().zip(&score_scale) {
                *w /= s;
            }
        }

        let vx = matrix_rows(&scores, &valid);
        let pred_qt: Vec<f64> = vx.iter().map(|r| forward(&model, r).unwrap()).collect();
        let truth_qt: Vec<f64> = valid.iter().map(|&i| targets_qt[i]).collect();
        let m_qt = metrics(&pred_qt, &truth_qt).map_err(|e| fail(&hp, e.to_string()))?;
        let pred_orig: Vec<f64> = pred_qt.iter().map(|&u| quantile.inverse(u)).collect();
        let truth_orig: Vec<f64> = valid.iter().map(|&i| targets[i]).collect();
        let m_orig = metrics(&pred_orig, &truth_orig).map_err(|e| fail(&hp, e.to_string()))?;
        if !(m_qt.rmse.is_finite() && m_orig.rmse.is_finite()) {
            return Err(fail(&hp, "non-finite validation metrics".into()));
        }
        Ok(TrialResult {
            trial,
            hyperparameters: hp,
            model,
            rmse_qt: m_qt.rmse,
            r2_qt: m_qt.r2,
            rmse_orig: m_orig.rmse,
            r2_orig: m_orig.r2,
        })
    };

    let slots: Mutex<Vec<Option<Result<TrialResult, FailedTrial>>>> =
        Mutex::new((0..cfg.budget).map(|_| None).collect());
    let next = AtomicUsize::new(0);
    let workers = cfg.workers.max(1).min(cfg.budget);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let trial = next.fetch_add(1, Ordering::SeqCst);
                if trial >= cfg.budget {
                    break;
                }
                let outcome = run_trial(trial);
                slots.lock().unwrap()[trial] = Some(outcome);
            });
        }
    });

    let mut trials = Vec::new();
    let mut failures = Vec::new();
    for outcome in slots.into_inner().unwrap() {
        match outcome.expect("every trial slot filled") {
            Ok(t) => trials.push(t),
            Err(f) => failures.push(f),
        }
    }
    trials.sort_by(|a, b| {
        a.rmse_qt
            .partial_cmp(&b.rmse_qt)
            .unwrap()
            .then(a.trial.cmp(&b.trial))
    });
    Ok(AutotuneOutcome {
        split,
        standardizer,
        pca,
        quantile,
        trials,
        failures,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AverageScale {
    Qt,
    Original,
}

/// Preprocessing stack plus the k best models; predictions average member
/// outputs (QT scale by default) and invert once.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleModel {
    pub standardizer: Standardizer,
    pub pca: PcaModel,
    pub quantile: QuantileTransformer,
    pub members: Vec<TrialResult>,
    pub average_scale: AverageScale,
}

pub fn ensemble_top_k(outcome: &AutotuneOutcome, k: usize) -> Result<EnsembleModel, TunerError> {
    if outcome.trials.len() < k || k == 0 {
        return Err(TunerError::NotEnoughTrials {
            got: outcome.trials.len(),
            need: k,
        });
    }
    Ok(EnsembleModel {
        standardizer: outcome.standardizer.clone(),
        pca: outcome.pca.clone(),
        quantile: outcome.quantile.clone(),
        members: outcome.trials[..k].to_vec(),
        average_scale: AverageScale::Qt,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub gwp100: f64,
    pub qt_value: f64,
    pub clamped: bool,
}

impl EnsembleModel {
    /// Predict from PC scores already in the model's input space.
    pub fn predict_scores(&self, score_row: &[f64]) -> Result<Prediction, TunerError> {
        let member_qt: Vec<f64> = self
            .members
            .iter()
            .map(|m| forward(&m.model, score_row))
            .collect::<Result<_, _>>()?;
        match self.average_scale {
            AverageScale::Qt => {
                let mean = member_qt.iter().sum::<f64>() / member_qt.len() as f64;
                let clamped = !(0.0..=1.0).contains(&mean);
                let qt_value = mean.clamp(0.0, 1.0);
                Ok(Prediction {
                    gwp100: self.quantile.inverse(qt_value),
                    qt_value,
                    clamped,
                })
            }
            AverageScale::Original => {
                let clamped = member_qt.iter().any(|u| !(0.0..=1.0).contains(u));
                let qts: Vec<f64> = member_qt.iter().map(|u| u.clamp(0.0, 1.0)).collect();
                let gwp = qts.iter().map(|&u| self.quantile.inverse(u)).sum::<f64>()
                    / qts.len() as f64;
                Ok(Prediction {
                    gwp100: gwp,
                    qt_value: qts.iter().sum::<f64>() / qts.len() as f64,
                    clamped,
                })
            }
        }
    }

    /// Full-chain prediction for one descriptor row (raw feature space).
    pub fn predict_features(&self, features: &FeatureMatrix) -> Result<Vec<Prediction>, TunerError> {
        let standardized = self.standardizer.apply(features)?;
        let scores = pca_transform(&self.pca, &standardized)?;
        (0..scores.nrows())
            .map(|r| {
                let row: Vec<f64> = scores.row(r).iter().copied().collect();
                self.predict_scores(&row)
            })
            .collect()
    }
}

/// Predict GWP100 for raw SMILES; per-molecule failures are reported in
/// place without aborting the batch.
pub fn predict(
    ensemble: &EnsembleModel,
    smiles: &[String],
) -> Vec<Result<Prediction, String>> {
    let column_names: Vec<String> = crate::descriptors::descriptor_names()
        .iter()
        .map(|s| s.to_string())
        .collect();
    smiles
        .iter()
        .map(|s| {
            let graph = parse_smiles(s).map_err(|e| e.to_string())?;
            let vector = featurize(&graph).map_err(|e| e.to_string())?;
            let single = FeatureMatrix {
                column_names: column_names.clone(),
                ids: vec![s.clone()],
                rows: vec![vector.values],
            };
            ensemble
                .predict_features(&single)
                .map(|mut v| v.remove(0))
                .map_err(|e| e.to_string())
        })
        .collect()
}
