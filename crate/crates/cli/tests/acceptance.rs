//! Acceptance suite: one test per release criterion, each printing a
//! PASS line with the measured quantity. Run with
//! `cargo test -p authorfuse-cli --test acceptance -- --nocapture`.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use authorfuse::augment::{smote_balance, transpose_balance};
use authorfuse::classifiers::{self, ModelSpec};
use authorfuse::corpus::Corpus;
use authorfuse::eval::evaluate_run;
use authorfuse::features::{fit_tfidf, transform, transform_matrix, SparseVec, TfIdfConfig};
use authorfuse::fusion::{
    assemble, fitness, fuse, load_score_file, optimize_weights, FusionMethod, ScoreMatrix,
    WeightVector,
};
use authorfuse::optim::{
    minimize_nelder_mead, minimize_powell, minimize_pso, Bounds, NelderMeadParams, PowellParams,
    PsoParams,
};
use authorfuse::textprep::tokenize;
use authorfuse::{Document, FeatureMatrix, Label};

fn rosenbrock(x: &[f64]) -> f64 {
    (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2)
}

#[test]
fn criterion_01_optimizer_correctness() {
    let start = Instant::now();
    let nm = minimize_nelder_mead(rosenbrock, &[-1.2, 1.0], &NelderMeadParams::default()).unwrap();
    let nm_elapsed = start.elapsed();
    assert!((nm.best_x[0] - 1.0).abs() <= 1e-4, "nelder-mead x = {:?}", nm.best_x);
    assert!((nm.best_x[1] - 1.0).abs() <= 1e-4, "nelder-mead x = {:?}", nm.best_x);
    assert!(nm_elapsed.as_secs_f64() < 1.0);

    let start = Instant::now();
    let powell = minimize_powell(rosenbrock, &[-1.2, 1.0], &PowellParams::default()).unwrap();
    let powell_elapsed = start.elapsed();
    assert!(
        (powell.best_x[0] - 1.0).abs() <= 1e-4 && (powell.best_x[1] - 1.0).abs() <= 1e-4,
        "powell x = {:?}",
        powell.best_x
    );
    assert!(powell_elapsed.as_secs_f64() < 1.0);

    let start = Instant::now();
    let pso = minimize_pso(
        |x| x.iter().map(|v| v * v).sum(),
        &Bounds::new(vec![-5.0, -5.0], vec![5.0, 5.0]).unwrap(),
        &PsoParams {
            seed: 42,
            max_iters: 200,
            ..PsoParams::default()
        },
    )
    .unwrap();
    let pso_elapsed = start.elapsed();
    assert!(pso.best_f <= 1e-4, "pso best_f = {}", pso.best_f);
    assert!(pso.iterations <= 200);
    assert!(pso_elapsed.as_secs_f64() < 1.0);

    println!(
        "[acceptance] optimizer correctness: PASS (nm {:.1?}, powell {:.1?}, pso best_f {:.2e} in {:.1?})",
        nm_elapsed, powell_elapsed, pso.best_f, pso_elapsed
    );
}

fn random_matrix(seed: u64, n_docs: usize) -> (ScoreMatrix, Vec<Label>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_models = rng.gen_range(3..=6);
    let scores: Vec<Vec<f64>> = (0..n_docs)
        .map(|_| (0..n_models).map(|_| rng.gen_range(0.0..=1.0)).collect())
        .collect();
    let labels = (0..n_docs)
        .map(|_| {
            if rng.gen_bool(0.5) {
                Label::MultiAuthor
            } else {
                Label::SingleAuthor
            }
        })
        .collect();
    (
        ScoreMatrix {
            doc_ids: (0..n_docs).map(|i| format!("d{i:03}")).collect(),
            model_names: (0..n_models).map(|m| format!("m{m}")).collect(),
            scores,
        },
        labels,
    )
}

#[test]
fn criterion_02_fusion_dominance() {
    let merit = [FusionMethod::Pso, FusionMethod::NelderMead, FusionMethod::Powell];
    for seed in 0..100u64 {
        let (matrix, labels) = random_matrix(seed, 200);
        let uniform = WeightVector::uniform(matrix.n_models());
        let averaging = fitness(&uniform, &matrix, &labels, 0.5).unwrap();
        for method in merit {
            let outcome = optimize_weights(method, &matrix, &labels, 0.5, seed).unwrap();
            assert!(
                outcome.validation_fitness <= averaging,
                "seed {seed}, {method}: {} > {averaging}",
                outcome.validation_fitness
            );
        }
    }
    println!("[acceptance] fusion dominance: PASS (100 seeds, 3 merit methods, exact)");
}

/// Planted instance: model 0 scores 0.9/0.1 on the correct side, model 1 is
/// a coin flip.
fn planted_instance(seed: u64, n_docs: usize) -> (ScoreMatrix, Vec<Label>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut scores = Vec::with_capacity(n_docs);
    let mut labels = Vec::with_capacity(n_docs);
    for i in 0..n_docs {
        let is_multi = i % 2 == 0;
        let perfect = if is_multi { 0.9 } else { 0.1 };
        scores.push(vec![perfect, rng.gen_range(0.0..=1.0)]);
        labels.push(if is_multi {
            Label::MultiAuthor
        } else {
            Label::SingleAuthor
        });
    }
    (
        ScoreMatrix {
            doc_ids: (0..n_docs).map(|i| format!("d{i:03}")).collect(),
            model_names: vec!["perfect".to_string(), "coin".to_string()],
            scores,
        },
        labels,
    )
}

#[test]
fn criterion_03_fusion_optimality_on_planted_instance() {
    let (matrix, labels) = planted_instance(17, 200);

    // Brute-force oracle: every weight pair on a 0.01 grid, predictions
    // computed from first principles.
    let mut oracle_best = f64::INFINITY;
    for i in 0..=100u32 {
        for j in 0..=100u32 {
            let (w1, w2) = (i as f64 / 100.0, j as f64 / 100.0);
            if w1 + w2 == 0.0 {
                continue;
            }
            let wrong = matrix
                .scores
                .iter()
                .zip(&labels)
                .filter(|(row, &label)| {
                    let s = (w1 * row[0] + w2 * row[1]) / (w1 + w2);
                    let predicted_multi = s >= 0.5;
                    predicted_multi != (label == Label::MultiAuthor)
                })
                .count();
            oracle_best = oracle_best.min(wrong as f64 / labels.len() as f64);
        }
    }
    assert_eq!(oracle_best, 0.0, "grid oracle should attain zero error");

    for method in [FusionMethod::Pso, FusionMethod::NelderMead, FusionMethod::Powell] {
        let outcome = optimize_weights(method, &matrix, &labels, 0.5, 42).unwrap();
        assert_eq!(
            outcome.validation_fitness, oracle_best,
            "{method} did not match the grid oracle"
        );
    }
    println!("[acceptance] fusion optimality (planted): PASS (all three methods reach e = 0)");
}

#[test]
fn criterion_04_weighted_fusion_arithmetic() {
    let matrix = ScoreMatrix {
        doc_ids: vec!["d1".to_string()],
        model_names: vec!["a".to_string(), "b".to_string()],
        scores: vec![vec![0.8, 0.6]],
    };
    let fused = fuse(
        &matrix,
        &WeightVector {
            weights: vec![0.5, 0.5],
        },
    )
    .unwrap();
    assert!((fused[0] - 0.7).abs() <= 1e-12, "fused = {}", fused[0]);

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let wide = ScoreMatrix {
        doc_ids: (0..50).map(|i| format!("d{i}")).collect(),
        model_names: (0..4).map(|m| format!("m{m}")).collect(),
        scores: (0..50)
            .map(|_| (0..4).map(|_| rng.gen_range(0.0..=1.0)).collect())
            .collect(),
    };
    for target in 0..4 {
        let mut weights = vec![0.0; 4];
        weights[target] = 1.0;
        let fused = fuse(&wide, &WeightVector { weights }).unwrap();
        for (row, &s) in wide.scores.iter().zip(&fused) {
            assert_eq!(row[target].to_bits(), s.to_bits(), "one-hot fusion not bit-exact");
        }
    }
    println!("[acceptance] weighted fusion arithmetic: PASS (0.7 within 1e-12, one-hot bit-exact)");
}

#[test]
fn criterion_05_tfidf_oracle() {
    let sequences = vec![tokenize("a b"), tokenize("a c"), tokenize("a")];
    let model = fit_tfidf(
        &sequences,
        &TfIdfConfig {
            min_df: 1,
            max_features: None,
            l2_normalize: true,
        },
    )
    .unwrap();

    // Hand oracle, straight from the smoothed-idf formula with N = 3.
    let idf = |df: f64| ((1.0 + 3.0) / (1.0 + df)).ln() + 1.0;
    let expected = [("a", idf(3.0)), ("b", idf(1.0)), ("c", idf(1.0))];
    for (term, expected_idf) in expected {
        let index = model.vocabulary.index_of(term).unwrap();
        assert!(
            (model.idf[index] - expected_idf).abs() <= 1e-9,
            "idf({term}) = {}, oracle {expected_idf}",
            model.idf[index]
        );
    }

    let vec = transform(&model, &tokenize("a b"));
    let (ia, ib) = (
        model.vocabulary.index_of("a").unwrap(),
        model.vocabulary.index_of("b").unwrap(),
    );
    let norm = (idf(3.0).powi(2) + idf(1.0).powi(2)).sqrt();
    assert!((vec.get(ia) - idf(3.0) / norm).abs() <= 1e-9);
    assert!((vec.get(ib) - idf(1.0) / norm).abs() <= 1e-9);
    println!("[acceptance] tf-idf oracle: PASS (idf and transform match to 1e-9)");
}

#[test]
fn criterion_06_metrics_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let n = rng.gen_range(1..=40);
        let preds: Vec<Label> = (0..n)
            .map(|_| {
                if rng.gen_bool(0.5) {
                    Label::MultiAuthor
                } else {
                    Label::SingleAuthor
                }
            })
            .collect();
        let labels: Vec<Label> = (0..n)
            .map(|_| {
                if rng.gen_bool(0.5) {
                    Label::MultiAuthor
                } else {
                    Label::SingleAuthor
                }
            })
            .collect();

        // Brute-force enumeration, independent of the eval module.
        let (mut tp, mut fp, mut fneg, mut tn) = (0usize, 0usize, 0usize, 0usize);
        for (&p, &l) in preds.iter().zip(&labels) {
            match (p == Label::MultiAuthor, l == Label::MultiAuthor) {
                (true, true) => tp += 1,
                (true, false) => fp += 1,
                (false, true) => fneg += 1,
                (false, false) => tn += 1,
            }
        }
        let safe = |a: f64, b: f64| if b == 0.0 { 0.0 } else { a / b };
        let precision = safe(tp as f64, (tp + fp) as f64);
        let recall = safe(tp as f64, (tp + fneg) as f64);
        let f1_pos = safe(2.0 * precision * recall, precision + recall);
        let precision_neg = safe(tn as f64, (tn + fneg) as f64);
        let recall_neg = safe(tn as f64, (tn + fp) as f64);
        let f1_neg = safe(2.0 * precision_neg * recall_neg, precision_neg + recall_neg);

        let cm = authorfuse::eval::confusion(&preds, &labels).unwrap();
        let report = authorfuse::eval::metrics(&cm);
        assert!((report.f1_binary - f1_pos).abs() <= 1e-12);
        assert!((report.f1_macro - 0.5 * (f1_pos + f1_neg)).abs() <= 1e-12);
    }
    println!("[acceptance] metrics oracle: PASS (1000 random pairs, exact to 1e-12)");
}

fn dense(values: &SparseVec, n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for &(i, v) in &values.entries {
        out[i] = v;
    }
    out
}

fn segment_distance(p: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let dot = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(u, v)| u * v).sum::<f64>();
    let ab: Vec<f64> = b.iter().zip(a).map(|(x, y)| x - y).collect();
    let ap: Vec<f64> = p.iter().zip(a).map(|(x, y)| x - y).collect();
    let ab_sq = dot(&ab, &ab);
    let t = if ab_sq == 0.0 {
        0.0
    } else {
        (dot(&ap, &ab) / ab_sq).clamp(0.0, 1.0)
    };
    p.iter()
        .zip(a.iter().zip(&ab))
        .map(|(pi, (ai, abi))| (pi - (ai + t * abi)).powi(2))
        .sum::<f64>()
        .sqrt()
}

#[test]
fn criterion_07_smote_geometry() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let dims = 5;
    let minority = 10;
    let majority = 34;
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for _ in 0..minority {
        rows.push((0..dims).map(|_| rng.gen_range(0.0..1.0)).collect::<Vec<f64>>());
        labels.push(Label::SingleAuthor);
    }
    for _ in 0..majority {
        rows.push((0..dims).map(|_| rng.gen_range(5.0..6.0)).collect::<Vec<f64>>());
        labels.push(Label::MultiAuthor);
    }
    let matrix = FeatureMatrix {
        doc_ids: (0..rows.len()).map(|i| format!("d{i:02}")).collect(),
        rows: rows
            .iter()
            .map(|dense_row| SparseVec {
                entries: dense_row
                    .iter()
                    .enumerate()
                    .filter(|&(_, &v)| v != 0.0)
                    .map(|(i, &v)| (i, v))
                    .collect(),
            })
            .collect(),
        n_cols: dims,
        unit_normalized: false,
    };

    let k = 3;
    let (balanced, out_labels) = smote_balance(&matrix, &labels, k, 99).unwrap();
    let singles = out_labels.iter().filter(|&&l| l == Label::SingleAuthor).count();
    let multis = out_labels.iter().filter(|&&l| l == Label::MultiAuthor).count();
    assert_eq!(singles, multis, "class counts must be exactly equal");

    // Independent k-NN sets per minority row.
    let neighbor_sets: Vec<Vec<usize>> = (0..minority)
        .map(|i| {
            let mut dists: Vec<(f64, usize)> = (0..minority)
                .filter(|&j| j != i)
                .map(|j| {
                    let d = rows[i]
                        .iter()
                        .zip(&rows[j])
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>();
                    (d, j)
                })
                .collect();
            dists.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
            dists.into_iter().take(k).map(|(_, j)| j).collect()
        })
        .collect();

    let mut checked = 0;
    for row in &balanced.rows[rows.len()..] {
        let p = dense(row, dims);
        let mut best = f64::INFINITY;
        for (i, neighbors) in neighbor_sets.iter().enumerate() {
            for &j in neighbors {
                best = best.min(segment_distance(&p, &rows[i], &rows[j]));
            }
        }
        assert!(best < 1e-9, "synthetic row {best:e} off every candidate segment");
        checked += 1;
    }
    assert_eq!(checked, majority - minority);
    println!("[acceptance] smote geometry: PASS ({checked} synthetic rows on segments, < 1e-9)");
}

#[test]
fn criterion_08_transpose_integrity() {
    let mut documents = vec![
        Document {
            id: "s1".to_string(),
            text: "The quick brown fox jumps over the lazy dog near the river bank.".to_string(),
            label: Label::SingleAuthor,
        },
        Document {
            id: "s2".to_string(),
            text: "Pack my box with five dozen liquor jugs before midnight strikes twice.".to_string(),
            label: Label::SingleAuthor,
        },
    ];
    for i in 0..9 {
        documents.push(Document {
            id: format!("m{i}"),
            text: format!("Majority document number {i} with unchanging content."),
            label: Label::MultiAuthor,
        });
    }
    let corpus = Corpus::new(documents).unwrap();
    let sources: std::collections::HashMap<String, String> = corpus
        .documents()
        .iter()
        .map(|d| (d.id.clone(), d.text.clone()))
        .collect();

    let balanced = transpose_balance(&corpus, 1.5, 7).unwrap();
    assert_eq!(
        balanced.count(Label::SingleAuthor),
        balanced.count(Label::MultiAuthor)
    );
    let mut synthetic = 0;
    for doc in balanced.documents() {
        if let Some(stem) = doc.id.split("#aug").next() {
            if doc.id.contains("#aug") {
                let source = &sources[stem];
                assert_eq!(doc.text.chars().count(), source.chars().count());
                let sort = |s: &str| {
                    let mut v: Vec<char> = s.chars().collect();
                    v.sort_unstable();
                    v
                };
                assert_eq!(sort(&doc.text), sort(source), "character multiset changed");
                synthetic += 1;
            }
        }
    }
    assert_eq!(synthetic, 7);

    let again = transpose_balance(&corpus, 1.5, 7).unwrap();
    assert_eq!(balanced, again, "fixed seed must reproduce byte-identical corpora");
    println!("[acceptance] transpose integrity: PASS (7 synthetics, multiset + length preserved, seed-stable)");
}

#[test]
fn criterion_09_classical_model_sanity() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let shared = ["the", "of", "and", "into", "about"];
    let multi_vocab = ["evidence", "seam", "shift", "contrast", "blend", "mixture"];
    let single_vocab = ["uniform", "steady", "voice", "constant", "single", "plain"];

    let mut docs = Vec::with_capacity(200);
    let mut labels = Vec::with_capacity(200);
    for i in 0..200 {
        let is_multi = i % 2 == 0;
        let vocab: &[&str] = if is_multi { &multi_vocab } else { &single_vocab };
        let mut words = Vec::new();
        for _ in 0..30 {
            if rng.gen_bool(0.3) {
                words.push(shared[rng.gen_range(0..shared.len())]);
            } else {
                words.push(vocab[rng.gen_range(0..vocab.len())]);
            }
        }
        docs.push((format!("doc{i:03}"), tokenize(&words.join(" "))));
        labels.push(if is_multi {
            Label::MultiAuthor
        } else {
            Label::SingleAuthor
        });
    }

    let tfidf = fit_tfidf(
        &docs.iter().map(|(_, t)| t.clone()).collect::<Vec<_>>(),
        &TfIdfConfig::default(),
    )
    .unwrap();
    let features = transform_matrix(&tfidf, &docs);

    let specs = [
        ModelSpec::naive_bayes(),
        ModelSpec::logistic_regression(42),
        ModelSpec::knn(),
        ModelSpec::decision_tree(42),
        ModelSpec::random_forest(42),
    ];
    for spec in &specs {
        let clf = classifiers::fit(spec, &features, &labels).unwrap();
        let scores = clf.predict_proba(&features).unwrap();
        let report = evaluate_run(&scores, &labels, 0.5).unwrap();
        assert!(
            report.f1_binary >= 0.95,
            "{}: f1 = {:.4}",
            spec.name(),
            report.f1_binary
        );
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "took {elapsed:?}");
    println!(
        "[acceptance] classical-model sanity: PASS (5 models, f1 >= 0.95, {:.2?} total)",
        elapsed
    );
}

#[test]
fn criterion_10_end_to_end_smoke() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("grid");
    let fixture = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/mini_corpus.jsonl");

    let start = Instant::now();
    let output = std::process::Command::new(env!("CARGO_BIN_EXE_authorfuse"))
        .args([
            "pipeline",
            "--grid",
            "--dataset",
            fixture.to_str().unwrap(),
            "--min-df",
            "1",
            "--out-dir",
            out.to_str().unwrap(),
        ])
        .output()
        .expect("pipeline runs");
    let elapsed = start.elapsed();
    assert!(
        output.status.success(),
        "pipeline failed:\n{}",
        String::from_utf8_lossy(&output.stderr)
    );
    assert!(elapsed.as_secs_f64() < 60.0, "took {elapsed:?}");

    let arms = [
        "unclean-imbalanced",
        "unclean-smote",
        "unclean-transpose",
        "clean-imbalanced",
        "clean-smote",
        "clean-transpose",
    ];
    let fitness_of = |arm: &str, method: &str| -> f64 {
        let path = out.join(arm).join("fusion").join(format!("{method}_weights.json"));
        let artifact: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        artifact["validation_fitness"].as_f64().unwrap()
    };
    for arm in arms {
        let averaging = fitness_of(arm, "average");
        for method in ["pso", "nelder-mead", "powell"] {
            let merit = fitness_of(arm, method);
            assert!(
                merit <= averaging,
                "{arm}/{method}: {merit} > averaging {averaging}"
            );
        }
    }
    assert!(out.join("reports/summary_table.txt").exists());
    println!(
        "[acceptance] end-to-end smoke: PASS (6 arms, 4 methods, {:.2?}, dominance holds)",
        elapsed
    );
}

/// Runs only when the PAN21 corpus and externally produced transformer
/// score files are supplied:
///   AUTHORFUSE_PAN21_DIR    — directory of problem-*.txt / truth-problem-*.json
///   AUTHORFUSE_SCORES_DIR   — directory of <model>_val.csv and <model>_test.csv
/// Checks the ordering property on un-clean imbalanced data: every
/// merit-based fusion test F1 is at least the simple-averaging test F1.
#[test]
fn criterion_11_conditional_reproduction() {
    let (Ok(pan_dir), Ok(scores_dir)) = (
        std::env::var("AUTHORFUSE_PAN21_DIR"),
        std::env::var("AUTHORFUSE_SCORES_DIR"),
    ) else {
        println!(
            "[acceptance] conditional reproduction: SKIPPED \
             (set AUTHORFUSE_PAN21_DIR and AUTHORFUSE_SCORES_DIR to run)"
        );
        return;
    };

    let corpus = authorfuse::corpus::load_pan_directory(Path::new(&pan_dir)).unwrap();
    let truth: std::collections::HashMap<String, Label> = corpus
        .documents()
        .iter()
        .map(|d| (d.id.clone(), d.label))
        .collect();

    let mut val_paths: Vec<PathBuf> = std::fs::read_dir(&scores_dir)
        .unwrap()
        .filter_map(|e| {
            let path = e.unwrap().path();
            path.file_name()?.to_str()?.ends_with("_val.csv").then_some(path)
        })
        .collect();
    val_paths.sort();
    assert!(
        !val_paths.is_empty(),
        "no *_val.csv score files in {scores_dir}"
    );
    let columns: Vec<_> = val_paths.iter().map(|p| load_score_file(p).unwrap()).collect();
    let (val_matrix, _) = assemble(&columns).unwrap();
    let val_labels: Vec<Label> = val_matrix.doc_ids.iter().map(|id| truth[id]).collect();

    let test_columns: Vec<_> = val_paths
        .iter()
        .map(|p| {
            let test_path = PathBuf::from(p.to_string_lossy().replace("_val.csv", "_test.csv"));
            load_score_file(&test_path).unwrap()
        })
        .collect();
    let (test_matrix, _) = assemble(&test_columns).unwrap();
    let test_labels: Vec<Label> = test_matrix.doc_ids.iter().map(|id| truth[id]).collect();

    let test_f1 = |method: FusionMethod| -> f64 {
        let outcome = optimize_weights(method, &val_matrix, &val_labels, 0.5, 42).unwrap();
        let fused = fuse(&test_matrix, &outcome.weights).unwrap();
        evaluate_run(&fused, &test_labels, 0.5).unwrap().f1_binary
    };
    let averaging = test_f1(FusionMethod::Average);
    for method in [FusionMethod::Pso, FusionMethod::NelderMead, FusionMethod::Powell] {
        let merit = test_f1(method);
        assert!(
            merit >= averaging,
            "{method} test F1 {merit:.4} < averaging {averaging:.4}"
        );
    }
    println!(
        "[acceptance] conditional reproduction: PASS (merit F1 >= averaging F1 = {averaging:.4})"
    );
}
