//! Subcommand implementations. Exit-code convention: 0 success, 1 domain
//! failure (bad rows, diverged training, not enough trials), 2 environment
//! failure (unreadable inputs, corrupted or incompatible artifacts).

use std::io::Write;
use std::path::Path;

use log::{info, warn};

use crate::analysis::{histogram, metrics, pc_loadings, permutation_sensitivity};
use crate::descriptors::{descriptor_names, featurize, FeatureMatrix};
use crate::molgraph::parse_smiles;
use crate::preprocess::pca_transform;
use crate::tuner::{autotune, ensemble_top_k, predict, DatasetSplit, EnsembleModel, TunerConfig};

use super::artifact::{fingerprint, load_json, save_json, ArtifactError};
use super::config::ExperimentConfig;
use super::dataset::{load_dataset, DatasetRecord};

/// Published AR6-ensemble benchmark the analyze report is compared against.
pub const REFERENCE_RMSE_ORIG: f64 = 481.9;
pub const REFERENCE_R2_ORIG: f64 = 0.918;

const ENSEMBLE_KIND: &str = "gwp-screen/ensemble";
const MANIFEST_KIND: &str = "gwp-screen/manifest";

#[derive(Debug)]
pub enum CmdError {
    /// Input was readable but the work failed (exit 1).
    Domain(String),
    /// Missing/unreadable/incompatible files or environment (exit 2).
    Environment(String),
}

impl CmdError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CmdError::Domain(_) => 1,
            CmdError::Environment(_) => 2,
        }
    }
}

impl std::fmt::Display for CmdError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CmdError::Domain(m) | CmdError::Environment(m) => write!(f, "{m}"),
        }
    }
}

fn env_err<E: std::fmt::Display>(e: E) -> CmdError {
    CmdError::Environment(e.to_string())
}

fn artifact_err(e: ArtifactError) -> CmdError {
    CmdError::Environment(e.to_string())
}

/// Serialized alongside the ensemble so analyze can reproduce the frozen
/// split and verify it is looking at the same dataset.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct TrainedArtifact {
    pub ensemble: EnsembleModel,
    pub split: DatasetSplit,
    pub seed: u64,
    pub dataset_fingerprint: String,
}

fn read_input_rows(path: &Path) -> Result<Vec<(String, String)>, CmdError> {
    let file = std::fs::File::open(path)
        .map_err(|e| CmdError::Environment(format!("cannot read {}: {e}", path.display())))?;
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(file);
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(env_err)?;
        if rec.len() < 2 {
            return Err(CmdError::Environment(format!(
                "{}: rows need at least id,smiles",
                path.display()
            )));
        }
        rows.push((rec[0].to_string(), rec[1].to_string()));
    }
    if rows.is_empty() {
        return Err(CmdError::Environment(format!(
            "{} contains no data rows",
            path.display()
        )));
    }
    Ok(rows)
}

/// `featurize`: descriptor matrix + drop-list from a dataset CSV. Rows that
/// fail are reported to stderr; the successful remainder still lands in a
/// `.partial` file.
pub fn cmd_featurize(input: &Path, output: &Path) -> Result<(), CmdError> {
    let rows = read_input_rows(input)?;
    let mut ids = Vec::new();
    let mut matrix_rows = Vec::new();
    let mut failures = 0usize;
    for (k, (id, smiles)) in rows.iter().enumerate() {
        let row = k + 2;
        let outcome = parse_smiles(smiles)
            .map_err(|e| e.to_string())
            .and_then(|g| featurize(&g).map_err(|e| e.to_string()));
        match outcome {
            Ok(v) => {
                ids.push(id.clone());
                matrix_rows.push(v.values);
            }
            Err(e) => {
                failures += 1;
                eprintln!("row {row} ({id}): {e}");
            }
        }
    }
    let matrix = FeatureMatrix {
        column_names: descriptor_names().iter().map(|s| s.to_string()).collect(),
        ids,
        rows: matrix_rows,
    };
    let target = if failures > 0 {
        output.with_extension("csv.partial")
    } else {
        output.to_path_buf()
    };
    if !matrix.rows.is_empty() {
        let file = std::fs::File::create(&target).map_err(env_err)?;
        matrix.to_csv(file).map_err(env_err)?;
        let drop: Vec<String> = if matrix.rows.len() >= 2 {
            matrix
                .zero_variance_columns()
                .into_iter()
                .map(|c| matrix.column_names[c].clone())
                .collect()
        } else {
            Vec::new()
        };
        save_json(&target.with_extension("droplist.json"), "gwp-screen/droplist", &drop)
            .map_err(artifact_err)?;
        info!("wrote {} ({} molecules)", target.display(), matrix.rows.len());
    }
    if failures > 0 {
        return Err(CmdError::Domain(format!(
            "{failures} of {} rows failed to featurize",
            rows.len()
        )));
    }
    Ok(())
}

fn featurize_dataset(records: &[DatasetRecord]) -> Result<FeatureMatrix, CmdError> {
    let mut rows = Vec::with_capacity(records.len());
    for r in records {
        let graph = parse_smiles(&r.smiles)
            .map_err(|e| CmdError::Domain(format!("{}: {e}", r.id)))?;
        let v = featurize(&graph).map_err(|e| CmdError::Domain(format!("{}: {e}", r.id)))?;
        rows.push(v.values);
    }
    Ok(FeatureMatrix {
        column_names: descriptor_names().iter().map(|s| s.to_string()).collect(),
        ids: records.iter().map(|r| r.id.clone()).collect(),
        rows,
    })
}

fn write_trials_csv(
    path: &Path,
    outcome: &crate::tuner::AutotuneOutcome,
) -> Result<(), CmdError> {
    let mut w = csv::Writer::from_path(path).map_err(env_err)?;
    w.write_record([
        "trial", "epochs", "layers", "neurons", "batch", "activation", "rmse_qt", "r2_qt",
        "rmse_orig", "r2_orig",
    ])
    .map_err(env_err)?;
    for t in &outcome.trials {
        let hp = &t.hyperparameters;
        w.write_record([
            t.trial.to_string(),
            hp.epochs.to_string(),
            hp.n_layers.to_string(),
            hp.n_neurons.to_string(),
            hp.batch_size.to_string(),
            hp.activation.to_string(),
            format!("{}", t.rmse_qt),
            format!("{}", t.r2_qt),
            format!("{}", t.rmse_orig),
            format!("{}", t.r2_orig),
        ])
        .map_err(env_err)?;
    }
    for f in &outcome.failures {
        let hp = &f.hyperparameters;
        w.write_record([
            f.trial.to_string(),
            hp.epochs.to_string(),
            hp.n_layers.to_string(),
            hp.n_neurons.to_string(),
            hp.batch_size.to_string(),
            hp.activation.to_string(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
        ])
        .map_err(env_err)?;
    }
    w.flush().map_err(env_err)?;
    Ok(())
}

/// `train`: split → autotune → top-k ensemble; writes the ensemble
/// artifact, the per-trial report, and a run manifest.
pub fn cmd_train(config: &ExperimentConfig, config_bytes: &[u8]) -> Result<(), CmdError> {
    let records = match load_dataset(&config.dataset) {
        Ok(r) => r,
        Err(e @ super::dataset::DatasetError::Io { .. }) => return Err(env_err(e)),
        Err(e) => return Err(CmdError::Domain(e.to_string())),
    };
    let dataset_bytes = std::fs::read(&config.dataset).map_err(env_err)?;
    let matrix = featurize_dataset(&records)?;
    let targets: Vec<f64> = records.iter().map(|r| r.gwp100).collect();

    let tuner_cfg = TunerConfig {
        budget: config.budget,
        seed: config.seed,
        workers: config.workers,
        pca_threshold: config.pca_threshold,
        search: config.search.clone(),
    };
    let outcome =
        autotune(&matrix, &targets, &tuner_cfg).map_err(|e| CmdError::Domain(e.to_string()))?;
    for f in &outcome.failures {
        warn!("trial {} failed: {}", f.trial, f.error);
    }
    let mut ensemble =
        ensemble_top_k(&outcome, config.k).map_err(|e| CmdError::Domain(e.to_string()))?;
    ensemble.average_scale = config.ensemble_average_scale;

    std::fs::create_dir_all(&config.output_dir).map_err(env_err)?;
    let artifact = TrainedArtifact {
        ensemble,
        split: outcome.split.clone(),
        seed: config.seed,
        dataset_fingerprint: fingerprint(&dataset_bytes),
    };
    save_json(
        &config.output_dir.join("ensemble.json"),
        ENSEMBLE_KIND,
        &artifact,
    )
    .map_err(artifact_err)?;
    write_trials_csv(&config.output_dir.join("trials.csv"), &outcome)?;

    #[derive(serde::Serialize)]
    struct Manifest<'a> {
        seed: u64,
        budget: usize,
        k: usize,
        workers: usize,
        config_fingerprint: String,
        dataset_fingerprint: &'a str,
        n_molecules: usize,
        n_features_retained: usize,
        n_pcs_retained: usize,
        dropped_columns: &'a [String],
        split_sizes: (usize, usize, usize),
    }
    save_json(
        &config.output_dir.join("manifest.json"),
        MANIFEST_KIND,
        &Manifest {
            seed: config.seed,
            budget: config.budget,
            k: config.k,
            workers: config.workers,
            config_fingerprint: fingerprint(config_bytes),
            dataset_fingerprint: &artifact.dataset_fingerprint,
            n_molecules: records.len(),
            n_features_retained: artifact.ensemble.standardizer.column_names.len(),
            n_pcs_retained: artifact.ensemble.pca.n_retained,
            dropped_columns: &artifact.ensemble.standardizer.dropped_columns,
            split_sizes: (
                outcome.split.train.len(),
                outcome.split.valid.len(),
                outcome.split.test.len(),
            ),
        },
    )
    .map_err(artifact_err)?;
    info!(
        "trained ensemble of {} models over {} PCs ({} trials ok, {} failed)",
        config.k,
        artifact.ensemble.pca.n_retained,
        outcome.trials.len(),
        outcome.failures.len()
    );
    Ok(())
}

/// `predict`: GWP100 for an `id,smiles` CSV using a stored ensemble.
pub fn cmd_predict(ensemble_path: &Path, input: &Path, output: &Path) -> Result<(), CmdError> {
    let artifact: TrainedArtifact =
        load_json(ensemble_path, ENSEMBLE_KIND).map_err(artifact_err)?;
    let rows = read_input_rows(input)?;
    let smiles: Vec<String> = rows.iter().map(|(_, s)| s.clone()).collect();
    let predictions = predict(&artifact.ensemble, &smiles);

    let mut w = csv::Writer::from_path(output).map_err(env_err)?;
    w.write_record(["id", "gwp100_pred", "qt_value", "clamped", "error"])
        .map_err(env_err)?;
    let mut ok = 0usize;
    for ((id, _), pred) in rows.iter().zip(&predictions) {
        match pred {
            Ok(p) => {
                ok += 1;
                w.write_record([
                    id.clone(),
                    format!("{}", p.gwp100),
                    format!("{}", p.qt_value),
                    p.clamped.to_string(),
                    String::new(),
                ])
                .map_err(env_err)?;
            }
            Err(e) => {
                w.write_record([id.clone(), String::new(), String::new(), String::new(), e.clone()])
                    .map_err(env_err)?;
            }
        }
    }
    w.flush().map_err(env_err)?;
    if ok == 0 {
        return Err(CmdError::Domain("every input row failed".into()));
    }
    Ok(())
}

/// `analyze`: test-set metrics on both scales, PC sensitivity over the
/// train+valid pool, loading reports for the top-3 PCs, and target
/// histograms before/after the quantile transform.
pub fn cmd_analyze(
    ensemble_path: &Path,
    dataset_path: &Path,
    output_dir: &Path,
) -> Result<(), CmdError> {
    let artifact: TrainedArtifact =
        load_json(ensemble_path, ENSEMBLE_KIND).map_err(artifact_err)?;
    let records = match load_dataset(dataset_path) {
        Ok(r) => r,
        Err(e @ super::dataset::DatasetError::Io { .. }) => return Err(env_err(e)),
        Err(e) => return Err(CmdError::Domain(e.to_string())),
    };
    let dataset_bytes = std::fs::read(dataset_path).map_err(env_err)?;
    if fingerprint(&dataset_bytes) != artifact.dataset_fingerprint {
        return Err(CmdError::Domain(format!(
            "dataset {} does not match the one the ensemble was trained on",
            dataset_path.display()
        )));
    }
    let ens = &artifact.ensemble;
    let matrix = featurize_dataset(&records)?;
    let targets: Vec<f64> = records.iter().map(|r| r.gwp100).collect();
    let standardized = ens
        .standardizer
        .apply(&matrix)
        .map_err(|e| CmdError::Domain(e.to_string()))?;
    let scores = pca_transform(&ens.pca, &standardized)
        .map_err(|e| CmdError::Domain(e.to_string()))?;
    let score_rows: Vec<Vec<f64>> = (0..scores.nrows())
        .map(|r| scores.row(r).iter().copied().collect())
        .collect();

    // test metrics on both scales
    let test = &artifact.split.test;
    let mut pred_qt = Vec::with_capacity(test.len());
    let mut pred_orig = Vec::with_capacity(test.len());
    for &i in test {
        let p = ens
            .predict_scores(&score_rows[i])
            .map_err(|e| CmdError::Domain(e.to_string()))?;
        pred_qt.push(p.qt_value);
        pred_orig.push(p.gwp100);
    }
    let truth_qt: Vec<f64> = test.iter().map(|&i| ens.quantile.transform(targets[i])).collect();
    let truth_orig: Vec<f64> = test.iter().map(|&i| targets[i]).collect();
    let m_qt = metrics(&pred_qt, &truth_qt).map_err(|e| CmdError::Domain(e.to_string()))?;
    let m_orig = metrics(&pred_orig, &truth_orig).map_err(|e| CmdError::Domain(e.to_string()))?;

    // sensitivity over the non-test pool only
    let pool: Vec<usize> = artifact
        .split
        .train
        .iter()
        .chain(&artifact.split.valid)
        .copied()
        .collect();
    let pool_scores: Vec<Vec<f64>> = pool.iter().map(|&i| score_rows[i].clone()).collect();
    let pool_truths: Vec<f64> = pool.iter().map(|&i| targets[i]).collect();
    let sensitivity = permutation_sensitivity(ens, &pool_scores, &pool_truths, artifact.seed, 30)
        .map_err(|e| CmdError::Domain(e.to_string()))?;

    let loadings: Vec<_> = sensitivity
        .ranking
        .iter()
        .take(3)
        .map(|e| pc_loadings(&ens.pca, &ens.standardizer.column_names, e.pc, 5))
        .collect::<Result<_, _>>()
        .map_err(|e| CmdError::Domain(e.to_string()))?;

    let qt_targets: Vec<f64> = targets.iter().map(|&t| ens.quantile.transform(t)).collect();
    let hist_orig = histogram(&targets, 10);
    let hist_qt = histogram(&qt_targets, 10);

    std::fs::create_dir_all(output_dir).map_err(env_err)?;
    #[derive(serde::Serialize)]
    struct ScalePair {
        rmse: f64,
        r2: f64,
    }
    #[derive(serde::Serialize)]
    struct MetricsReport {
        n_test: usize,
        qt: ScalePair,
        original: ScalePair,
        reference_original: ScalePair,
    }
    save_json(
        &output_dir.join("metrics.json"),
        "gwp-screen/metrics",
        &MetricsReport {
            n_test: test.len(),
            qt: ScalePair {
                rmse: m_qt.rmse,
                r2: m_qt.r2,
            },
            original: ScalePair {
                rmse: m_orig.rmse,
                r2: m_orig.r2,
            },
            reference_original: ScalePair {
                rmse: REFERENCE_RMSE_ORIG,
                r2: REFERENCE_R2_ORIG,
            },
        },
    )
    .map_err(artifact_err)?;
    save_json(
        &output_dir.join("sensitivity.json"),
        "gwp-screen/sensitivity",
        &sensitivity,
    )
    .map_err(artifact_err)?;
    save_json(
        &output_dir.join("loadings.json"),
        "gwp-screen/loadings",
        &loadings,
    )
    .map_err(artifact_err)?;
    save_json(
        &output_dir.join("histograms.json"),
        "gwp-screen/histograms",
        &(&hist_orig, &hist_qt),
    )
    .map_err(artifact_err)?;

    // plot-ready CSVs: signed PC impacts and test-set parity triples
    let mut w = csv::Writer::from_path(output_dir.join("sensitivity.csv")).map_err(env_err)?;
    w.write_record(["pc", "impact", "importance"]).map_err(env_err)?;
    for e in &sensitivity.ranking {
        w.write_record([
            format!("PC{}", e.pc + 1),
            format!("{}", e.impact),
            format!("{}", e.importance),
        ])
        .map_err(env_err)?;
    }
    w.flush().map_err(env_err)?;

    let mut w = csv::Writer::from_path(output_dir.join("loadings.csv")).map_err(env_err)?;
    w.write_record(["pc", "descriptor", "loading"]).map_err(env_err)?;
    for report in &loadings {
        for (name, value) in &report.loadings {
            w.write_record([format!("PC{}", report.pc + 1), name.clone(), format!("{value}")])
                .map_err(env_err)?;
        }
    }
    w.flush().map_err(env_err)?;

    let mut w = csv::Writer::from_path(output_dir.join("parity.csv")).map_err(env_err)?;
    w.write_record(["id", "truth", "prediction", "model"]).map_err(env_err)?;
    for (k, &i) in test.iter().enumerate() {
        w.write_record([
            records[i].id.clone(),
            format!("{}", truth_orig[k]),
            format!("{}", pred_orig[k]),
            "ensemble".to_string(),
        ])
        .map_err(env_err)?;
        for member in &ens.members {
            let qt = crate::nnet::forward(&member.model, &score_rows[i])
                .map_err(|e| CmdError::Domain(e.to_string()))?;
            let gwp = ens.quantile.inverse(qt.clamp(0.0, 1.0));
            w.write_record([
                records[i].id.clone(),
                format!("{}", truth_orig[k]),
                format!("{gwp}"),
                format!("trial{}", member.trial),
            ])
            .map_err(env_err)?;
        }
    }
    w.flush().map_err(env_err)?;

    let mut out = std::io::stdout().lock();
    writeln!(
        out,
        "test (n={}): RMSE(QT) {:.4}  R2(QT) {:.4}  RMSE(orig) {:.1}  R2(orig) {:.4}",
        test.len(),
        m_qt.rmse,
        m_qt.r2,
        m_orig.rmse,
        m_orig.r2
    )
    .map_err(env_err)?;
    writeln!(
        out,
        "reference benchmark (original scale): RMSE {REFERENCE_RMSE_ORIG}  R2 {REFERENCE_R2_ORIG}"
    )
    .map_err(env_err)?;
    Ok(())
}
