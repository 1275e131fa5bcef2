//! Acceptance gate. One test per criterion; each prints a single
//! `criterion N: PASS` line when its checks hold (run with
//! `cargo test --test acceptance -- --nocapture` to see them).

use std::collections::HashSet;
use std::path::{Path, PathBuf};
use std::time::Instant;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use gwp_screen::analysis::{metrics, pc_loadings, permutation_sensitivity};
use gwp_screen::cli::{cmd_analyze, cmd_train, load_dataset, ExperimentConfig};
use gwp_screen::descriptors::{descriptor_names, featurize, featurize_batch};
use gwp_screen::molgraph::{parse_smiles, ParseError};
use gwp_screen::nnet::{backprop, forward, mlp_init, Activation, AdamState, Hyperparameters, Layer, MlpModel};
use gwp_screen::preprocess::{pca_fit, pca_transform, QuantileTransformer, Standardizer};
use gwp_screen::tuner::{
    autotune, ensemble_top_k, AverageScale, EnsembleModel, SearchSpace, TrialResult, TunerConfig,
};

fn data(file: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(file)
}

/// Criterion 1: every descriptor matches the reference-toolkit golden file,
/// 1e-3 relative, bit-exact for counts, in under 5 s.
#[test]
fn criterion_1_descriptor_oracle_parity() {
    let started = Instant::now();
    let counts: HashSet<&str> = [
        "HeavyAtomCount", "NumValenceElectrons", "NumHeteroatoms", "NOCount", "NHOHCount",
        "NumHDonors", "NumHAcceptors", "NumRotatableBonds", "RingCount", "NumAromaticRings",
        "NumAliphaticRings", "NumSaturatedRings", "NumAromaticHeterocycles",
        "NumAliphaticHeterocycles", "NumSaturatedHeterocycles", "fr_nitrile", "fr_nitrite",
        "fr_allylic_oxid", "fr_halogen", "fr_ether", "fr_ketone", "fr_alkyl_halide", "fr_epoxide",
    ]
    .into_iter()
    .collect();
    let mut rdr = csv::Reader::from_path(data("golden_descriptors.csv")).unwrap();
    let header: Vec<String> = rdr.headers().unwrap().iter().map(str::to_string).collect();
    assert_eq!(&header[2..], descriptor_names());
    let mut molecules = 0;
    for rec in rdr.records() {
        let rec = rec.unwrap();
        let got = featurize(&parse_smiles(&rec[1]).unwrap()).unwrap();
        for (k, name) in descriptor_names().iter().enumerate() {
            let want: f64 = rec[k + 2].parse().unwrap();
            let have = got.values[k];
            if counts.contains(name) {
                assert_eq!(have, want, "{}: {name}", &rec[0]);
            } else {
                assert!(
                    (have - want).abs() <= 1e-3 * want.abs().max(1e-6),
                    "{}: {name} expected {want}, got {have}",
                    &rec[0]
                );
            }
        }
        molecules += 1;
    }
    assert_eq!(molecules, 25);
    assert!(started.elapsed().as_secs_f64() < 5.0);
    println!("criterion 1: PASS — 25 molecules x 74 descriptors match the golden file");
}

/// Criterion 2: fuzzing never crashes the parser; valid fixtures satisfy
/// ring-count = circuit-rank; invalid fixtures name the error and offset.
#[test]
fn criterion_2_parser_robustness() {
    let mut rng = ChaCha20Rng::seed_from_u64(0x5eed);
    let alphabet: Vec<char> =
        "CcNnOoSsFIPB()[]=#-+123456789%ClBrclbr@/\\.Hh ~*&0".chars().collect();
    for _ in 0..100_000 {
        let len = rng.gen_range(0..30);
        let s: String = (0..len)
            .map(|_| alphabet[rng.gen_range(0..alphabet.len())])
            .collect();
        let _ = parse_smiles(&s); // must return, never panic
    }

    let mut rdr = csv::Reader::from_path(data("golden_descriptors.csv")).unwrap();
    for rec in rdr.records() {
        let g = parse_smiles(&rec.unwrap()[1]).unwrap();
        assert_eq!(g.rings.len(), g.bonds.len() + 1 - g.atoms.len());
    }

    let invalid: &[(&str, fn(&ParseError) -> bool, usize)] = &[
        ("C(", |e| matches!(e, ParseError::UnbalancedParenthesis { .. }), 1),
        (")C", |e| matches!(e, ParseError::UnbalancedParenthesis { .. }), 0),
        ("C1CC", |e| matches!(e, ParseError::UnclosedRingBond { .. }), 1),
        ("C=1CC", |e| matches!(e, ParseError::UnclosedRingBond { .. }), 2),
        ("CQ", |e| matches!(e, ParseError::UnknownElement { .. }), 1),
        ("F/C=C/F", |e| matches!(e, ParseError::UnknownElement { .. }), 1),
        ("C(F)(F)(F)(F)F", |e| matches!(e, ParseError::ValenceViolation { .. }), 0),
        ("[CH5]", |e| matches!(e, ParseError::ValenceViolation { .. }), 0),
        ("C.C", |e| matches!(e, ParseError::MultiFragmentInput { .. }), 1),
    ];
    for (smiles, variant_ok, offset) in invalid {
        let err = parse_smiles(smiles).unwrap_err();
        assert!(variant_ok(&err), "{smiles}: unexpected {err:?}");
        assert_eq!(err.offset(), *offset, "{smiles}");
    }
    println!("criterion 2: PASS — 100000 fuzz strings, ring ranks, 9 named-error fixtures");
}

/// Criterion 3: PCA invariants on 100 random 50x20 matrices in under 10 s.
#[test]
fn criterion_3_pca_properties() {
    let started = Instant::now();
    let mut rng = ChaCha20Rng::seed_from_u64(0x9ca);
    for _ in 0..100 {
        let mut m = DMatrix::from_fn(50, 20, |_, _| rng.gen_range(-5.0..5.0));
        for j in 0..20 {
            let mean = m.column(j).sum() / 50.0;
            for i in 0..50 {
                m[(i, j)] -= mean;
            }
        }
        let full = pca_fit(&m, 1.0).unwrap();
        for a in 0..full.components.len() {
            for b in 0..full.components.len() {
                let dot: f64 = full.components[a]
                    .iter()
                    .zip(&full.components[b])
                    .map(|(x, y)| x * y)
                    .sum();
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((dot - want).abs() < 1e-8);
            }
        }
        for w in full.explained_variance_ratio.windows(2) {
            assert!(w[0] >= w[1] - 1e-12);
        }
        let scores = pca_transform(&full, &m).unwrap();
        for i in 0..50 {
            for j in 0..20 {
                let rec: f64 = (0..full.n_retained)
                    .map(|k| scores[(i, k)] * full.components[k][j])
                    .sum();
                assert!((rec - m[(i, j)]).abs() < 1e-6);
            }
        }
        // minimality at the default threshold
        let clipped = pca_fit(&m, 0.99).unwrap();
        let cum: Vec<f64> = full
            .explained_variance_ratio
            .iter()
            .scan(0.0, |acc, &v| {
                *acc += v;
                Some(*acc)
            })
            .collect();
        assert!(cum[clipped.n_retained - 1] >= 0.99);
        if clipped.n_retained > 1 {
            assert!(cum[clipped.n_retained - 2] < 0.99);
        }
    }
    assert!(started.elapsed().as_secs_f64() < 10.0);
    println!("criterion 3: PASS — orthonormality, reconstruction, ordering, minimal retention");
}

/// Criterion 4: quantile transform behavior on the assembled dataset.
#[test]
fn criterion_4_quantile_transform() {
    let records = load_dataset(&data("ar6_gwp100.csv")).unwrap();
    let targets: Vec<f64> = records.iter().map(|r| r.gwp100).collect();
    let qt = QuantileTransformer::fit(&targets, targets.len().min(1000)).unwrap();

    let mut transformed: Vec<f64> = targets.iter().map(|&t| qt.transform(t)).collect();
    for (&t, &u) in targets.iter().zip(&transformed) {
        assert!((0.0..=1.0).contains(&u));
        assert!((qt.inverse(u) - t).abs() <= 1e-9 * t.abs().max(1.0));
    }
    let mut pairs: Vec<(f64, f64)> = targets.iter().copied().zip(transformed.clone()).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    for w in pairs.windows(2) {
        assert!(w[0].1 <= w[1].1, "not monotone: {w:?}");
    }

    // Kolmogorov–Smirnov distance from uniform
    transformed.sort_by(f64::total_cmp);
    let n = transformed.len() as f64;
    let ks = transformed
        .iter()
        .enumerate()
        .map(|(i, &u)| {
            let lo = (u - i as f64 / n).abs();
            let hi = (u - (i + 1) as f64 / n).abs();
            lo.max(hi)
        })
        .fold(0.0, f64::max);
    assert!(ks < 0.05, "KS distance {ks}");
    println!("criterion 4: PASS — monotone, [0,1], 1e-9 round trip, KS = {ks:.4}");
}

/// Criterion 5: analytic gradients vs central differences on 100 random
/// networks; the hand-derived single Adam step.
#[test]
fn criterion_5_gradient_check() {
    let mut rng = ChaCha20Rng::seed_from_u64(77);
    for trial in 0..100 {
        let activation = if trial % 2 == 0 { Activation::Tanh } else { Activation::Sigmoid };
        let hp = Hyperparameters {
            n_layers: rng.gen_range(1..=3),
            n_neurons: rng.gen_range(2..=6),
            activation,
            batch_size: 1,
            epochs: 1,
            learning_rate: 0.001,
            seed: rng.gen(),
        };
        let input_dim = rng.gen_range(2..=5);
        let model = mlp_init(input_dim, &hp).unwrap();
        let x: Vec<f64> = (0..input_dim).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let y: f64 = rng.gen_range(-1.0..1.0);

        let mut grads: Vec<Layer> = model.layers.iter().map(Layer::zeros_like).collect();
        backprop(&model, &x, y, 1.0, &mut grads);

        let h = 1e-5;
        let loss = |m: &MlpModel| {
            let e = forward(m, &x).unwrap() - y;
            e * e
        };
        for k in 0..model.layers.len() {
            for j in 0..model.layers[k].bias.len() {
                for i in 0..model.layers[k].weights[j].len() {
                    let mut plus = model.clone();
                    plus.layers[k].weights[j][i] += h;
                    let mut minus = model.clone();
                    minus.layers[k].weights[j][i] -= h;
                    let numeric = (loss(&plus) - loss(&minus)) / (2.0 * h);
                    let analytic = grads[k].weights[j][i];
                    let denom = analytic.abs().max(numeric.abs()).max(1e-4);
                    assert!(
                        (analytic - numeric).abs() / denom < 1e-4,
                        "trial {trial} layer {k} w[{j}][{i}]: {analytic} vs {numeric}"
                    );
                }
                let mut plus = model.clone();
                plus.layers[k].bias[j] += h;
                let mut minus = model.clone();
                minus.layers[k].bias[j] -= h;
                let numeric = (loss(&plus) - loss(&minus)) / (2.0 * h);
                let analytic = grads[k].bias[j];
                let denom = analytic.abs().max(numeric.abs()).max(1e-4);
                assert!((analytic - numeric).abs() / denom < 1e-4);
            }
        }
    }

    // single linear unit, w=1, b=0, sample (x=1, y=0): grad = 2, and the
    // bias-corrected first Adam step moves w by lr*g/(|g|+eps)
    let hp = Hyperparameters {
        n_layers: 1,
        n_neurons: 1,
        activation: Activation::Tanh,
        batch_size: 1,
        epochs: 1,
        learning_rate: 0.001,
        seed: 0,
    };
    let mut model = MlpModel {
        input_dim: 1,
        layers: vec![Layer { weights: vec![vec![1.0]], bias: vec![0.0] }],
        hyperparameters: hp,
        loss_history: vec![],
    };
    let mut grads: Vec<Layer> = model.layers.iter().map(Layer::zeros_like).collect();
    backprop(&model, &[1.0], 0.0, 1.0, &mut grads);
    assert!((grads[0].weights[0][0] - 2.0).abs() < 1e-12);
    let mut adam = AdamState::new(&model);
    adam.step(&mut model, &grads, 0.001);
    let expected = 1.0 - 0.001 * 2.0 / (2.0 + 1e-8);
    assert!((model.layers[0].weights[0][0] - expected).abs() < 1e-6);
    assert!((model.layers[0].weights[0][0] - 0.9990).abs() < 1e-6);
    println!("criterion 5: PASS — 100 gradient checks, Adam step w1 = 0.9990");
}

/// Deterministic branched-halocarbon SMILES generator for criteria 6.
fn synthetic_molecules(n: usize, seed: u64) -> (Vec<String>, Vec<String>) {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut seen = HashSet::new();
    let mut ids = Vec::new();
    let mut smiles_set = Vec::new();
    while ids.len() < n {
        let carbons = rng.gen_range(1..=7);
        let mut s = String::new();
        for c in 0..carbons {
            s.push('C');
            let free = if carbons == 1 {
                4
            } else if c == 0 || c + 1 == carbons {
                3
            } else {
                2
            };
            let subs = rng.gen_range(0..=free);
            for _ in 0..subs {
                let hal = match rng.gen_range(0..4) {
                    0 => "(F)",
                    1 => "(Cl)",
                    2 => "(Br)",
                    _ => "(F)",
                };
                s.push_str(hal);
            }
        }
        let graph = match parse_smiles(&s) {
            Ok(g) => g,
            Err(_) => continue,
        };
        if seen.insert(graph.graph_hash()) {
            ids.push(format!("syn{}", ids.len()));
            smiles_set.push(s);
        }
    }
    (ids, smiles_set)
}

/// Criterion 6: the full desk-scale pipeline on a 300-molecule synthetic
/// set hits test R^2 >= 0.9 in < 5 min, best validation RMSE (QT) < 0.1.
#[test]
fn criterion_6_desk_scale_pipeline() {
    let started = Instant::now();
    let (ids, smiles) = synthetic_molecules(300, 2718);
    let graphs: Vec<_> = smiles.iter().map(|s| parse_smiles(s).unwrap()).collect();
    let matrix = featurize_batch(&ids, &graphs).unwrap();

    let mut rng = ChaCha20Rng::seed_from_u64(31415);
    let targets: Vec<f64> = matrix
        .rows
        .iter()
        .map(|row| {
            let d = |name: &str| {
                let k = descriptor_names().iter().position(|n| *n == name).unwrap();
                row[k]
            };
            let base = 0.02 * d("MolWt").powf(1.8) + 8.0 * d("Chi1v").powi(2)
                + 15.0 * d("fr_halogen")
                + 5.0;
            base * (1.0 + 0.05 * rng.gen_range(-1.0..1.0))
        })
        .collect();

    let cfg = TunerConfig {
        budget: 10,
        seed: 99,
        workers: 1,
        pca_threshold: 0.99,
        search: SearchSpace {
            layers: (1, 2),
            neurons: (16, 64),
            batch: (16, 48),
            epochs: (800, 2000),
            learning_rate: 0.001,
        },
    };
    let outcome = autotune(&matrix, &targets, &cfg).unwrap();
    assert!(outcome.failures.is_empty(), "{:?}", outcome.failures);
    let best_rmse_qt = outcome.trials[0].rmse_qt;
    assert!(best_rmse_qt < 0.1, "best validation RMSE(QT) {best_rmse_qt}");

    let ensemble = ensemble_top_k(&outcome, 3).unwrap();
    let scores = pca_transform(&ensemble.pca, &ensemble.standardizer.apply(&matrix).unwrap()).unwrap();
    let mut pred = Vec::new();
    let mut truth = Vec::new();
    for &i in &outcome.split.test {
        let row: Vec<f64> = scores.row(i).iter().copied().collect();
        pred.push(ensemble.predict_scores(&row).unwrap().gwp100);
        truth.push(targets[i]);
    }
    let m = metrics(&pred, &truth).unwrap();
    assert!(m.r2 >= 0.9, "test R2 {}", m.r2);
    let secs = started.elapsed().as_secs_f64();
    assert!(secs < 300.0, "took {secs:.0}s");
    println!(
        "criterion 6: PASS — test R2 {:.3}, best validation RMSE(QT) {:.4}, {:.0}s",
        m.r2, best_rmse_qt, secs
    );
}

/// Criterion 7: distribution-level comparison on the assembled AR6 table.
/// The exact published numbers (RMSE 481.9 / R^2 0.918) are not reproducible
/// at desk scale; the CI soft gate is original-scale test R^2 >= 0.75 with a
/// fixed seed.
#[test]
fn criterion_7_reference_benchmark_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig {
        dataset: data("ar6_gwp100.csv"),
        output_dir: dir.path().join("out"),
        budget: 10,
        k: 3,
        seed: 14,
        pca_threshold: 0.99,
        workers: 1,
        ensemble_average_scale: AverageScale::Original,
        search: SearchSpace {
            layers: (1, 1),
            neurons: (24, 72),
            batch: (16, 48),
            epochs: (1500, 3000),
            learning_rate: 0.001,
        },
    };
    cmd_train(&cfg, b"acceptance").unwrap();
    cmd_analyze(
        &cfg.output_dir.join("ensemble.json"),
        &cfg.dataset,
        &dir.path().join("report"),
    )
    .unwrap();

    let text = std::fs::read_to_string(dir.path().join("report/metrics.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let r2 = v["payload"]["original"]["r2"].as_f64().unwrap();
    let rmse = v["payload"]["original"]["rmse"].as_f64().unwrap();
    let ref_r2 = v["payload"]["reference_original"]["r2"].as_f64().unwrap();
    let ref_rmse = v["payload"]["reference_original"]["rmse"].as_f64().unwrap();
    assert_eq!((ref_rmse, ref_r2), (481.9, 0.918));
    assert!(r2 >= 0.75, "original-scale test R2 {r2} below soft gate");
    println!(
        "criterion 7: PASS — test RMSE {rmse:.1} / R2 {r2:.3} vs published reference 481.9 / 0.918"
    );
}

/// Criterion 8: permutation sensitivity ignores dead PCs, ranks the driving
/// PC first, and the loading report has the 3 x 5 shape.
#[test]
fn criterion_8_sensitivity_sanity() {
    let hp = Hyperparameters {
        n_layers: 1,
        n_neurons: 1,
        activation: Activation::Tanh,
        batch_size: 1,
        epochs: 1,
        learning_rate: 0.001,
        seed: 0,
    };
    // single linear layer reading PC1 only
    let model = MlpModel {
        input_dim: 3,
        layers: vec![Layer { weights: vec![vec![1.0, 0.0, 0.0]], bias: vec![0.0] }],
        hyperparameters: hp.clone(),
        loss_history: vec![],
    };
    let names: Vec<String> = (0..6).map(|i| format!("d{i}")).collect();
    let mut components = vec![vec![0.0; 6]; 3];
    for (k, c) in components.iter_mut().enumerate() {
        c[k] = 0.8;
        c[k + 3] = 0.6;
    }
    let ensemble = EnsembleModel {
        standardizer: Standardizer {
            column_names: names.clone(),
            mean: vec![0.0; 6],
            std: vec![1.0; 6],
            dropped_columns: vec![],
        },
        pca: gwp_screen::preprocess::PcaModel {
            components,
            explained_variance_ratio: vec![0.5, 0.3, 0.2],
            n_retained: 3,
            cumulative_variance: 1.0,
            n_features: 6,
        },
        quantile: QuantileTransformer {
            references: vec![0.0, 100.0],
            grid: vec![0.0, 1.0],
        },
        members: vec![TrialResult {
            trial: 0,
            hyperparameters: hp,
            model,
            rmse_qt: 0.0,
            r2_qt: 1.0,
            rmse_orig: 0.0,
            r2_orig: 1.0,
        }],
        average_scale: AverageScale::Qt,
    };

    let n = 40;
    let scores: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let t = i as f64 / (n - 1) as f64;
            vec![t, (i as f64).sin(), (i as f64).cos()]
        })
        .collect();
    let truths: Vec<f64> = scores.iter().map(|r| 100.0 * r[0]).collect();
    let report = permutation_sensitivity(&ensemble, &scores, &truths, 11, 30).unwrap();
    assert_eq!(report.ranking.len(), 3);
    assert_eq!(report.ranking[0].pc, 0, "driving PC must rank first");
    for entry in &report.ranking[1..] {
        assert!(entry.importance.abs() < 1e-9, "{entry:?}");
        assert!(entry.impact.abs() < 1e-9, "{entry:?}");
    }

    let loadings: Vec<_> = (0..3)
        .map(|pc| pc_loadings(&ensemble.pca, &ensemble.standardizer.column_names, pc, 5).unwrap())
        .collect();
    assert_eq!(loadings.len(), 3);
    for l in &loadings {
        assert_eq!(l.loadings.len(), 5);
    }
    println!("criterion 8: PASS — dead PCs at 0, driving PC first, 3x5 loading report");
}

/// Criterion 9: serial reruns are byte-identical; a 4-worker run yields the
/// identical sorted trial list.
#[test]
fn criterion_9_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let mk = |out: &str, workers: usize| ExperimentConfig {
        dataset: data("ar6_gwp100.csv"),
        output_dir: dir.path().join(out),
        budget: 4,
        k: 2,
        seed: 5,
        pca_threshold: 0.99,
        workers,
        ensemble_average_scale: AverageScale::Qt,
        search: SearchSpace {
            layers: (1, 1),
            neurons: (8, 16),
            batch: (16, 32),
            epochs: (150, 300),
            learning_rate: 0.001,
        },
    };
    cmd_train(&mk("a", 1), b"same").unwrap();
    cmd_train(&mk("b", 1), b"same").unwrap();
    cmd_train(&mk("c", 4), b"same").unwrap();
    for file in ["ensemble.json", "trials.csv", "manifest.json"] {
        let a = std::fs::read(dir.path().join("a").join(file)).unwrap();
        let b = std::fs::read(dir.path().join("b").join(file)).unwrap();
        assert_eq!(a, b, "{file} differs between serial reruns");
    }
    for file in ["ensemble.json", "trials.csv"] {
        let a = std::fs::read(dir.path().join("a").join(file)).unwrap();
        let c = std::fs::read(dir.path().join("c").join(file)).unwrap();
        assert_eq!(a, c, "{file} differs between serial and 4-worker runs");
    }
    println!("criterion 9: PASS — byte-identical artifacts, worker count has no effect");
}
