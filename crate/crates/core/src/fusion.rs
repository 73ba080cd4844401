//! Weighted late fusion of per-model probability scores.
//!
//! The combined score of a document is `S = w1*s1 + ... + wn*sn` over
//! normalized nonnegative weights, and the fitness of a weight vector is
//! the complement of validation accuracy, `e = 1 - A_acc`, computed from
//! thresholded fused predictions. Weight selection runs uniform averaging
//! or one of the merit-based optimizers (PSO, Nelder-Mead, Powell) over the
//! box `[0,1]^n`; the uniform-weight candidate is always evaluated as a
//! fallback, so a merit-based outcome is never worse on validation than
//! simple averaging.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::Label;
use crate::error::{Error, Result};
use crate::optim::{
    minimize_nelder_mead, minimize_powell, minimize_pso, Bounds, NelderMeadParams, OptimResult,
    PowellParams, PsoParams,
};

/// One model's probability-of-multi-author column, keyed by document id.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreColumn {
    pub model_name: String,
    pub scores: BTreeMap<String, f64>,
}

/// Per-document, per-model probabilities of the multi-author class.
/// Rows are aligned across models by document id.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMatrix {
    pub doc_ids: Vec<String>,
    pub model_names: Vec<String>,
    /// Row-major: `scores[doc][model]`.
    pub scores: Vec<Vec<f64>>,
}

impl ScoreMatrix {
    pub fn n_docs(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn n_models(&self) -> usize {
        self.model_names.len()
    }

    /// Builds a single-column matrix from one score column.
    pub fn from_column(column: &ScoreColumn) -> Self {
        Self {
            doc_ids: column.scores.keys().cloned().collect(),
            model_names: vec![column.model_name.clone()],
            scores: column.scores.values().map(|&s| vec![s]).collect(),
        }
    }
}

/// Nonnegative fusion weights; normalization to unit sum happens inside
/// [`fuse`], so any positive rescaling leaves decisions unchanged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightVector {
    pub weights: Vec<f64>,
}

impl WeightVector {
    pub fn uniform(n: usize) -> Self {
        Self {
            weights: vec![1.0 / n as f64; n],
        }
    }

    pub fn normalized(&self) -> Result<Vec<f64>> {
        let sum: f64 = self.weights.iter().sum();
        if sum <= 0.0 {
            return Err(Error::AllZeroWeights);
        }
        Ok(self.weights.iter().map(|w| w / sum).collect())
    }
}

/// Weight-selection strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FusionMethod {
    Average,
    Pso,
    NelderMead,
    Powell,
}

impl FusionMethod {
    pub const ALL: [FusionMethod; 4] = [
        FusionMethod::Average,
        FusionMethod::Pso,
        FusionMethod::NelderMead,
        FusionMethod::Powell,
    ];

    pub fn parse(name: &str) -> Option<Self> {
        match name.to_lowercase().as_str() {
            "average" | "avg" => Some(FusionMethod::Average),
            "pso" => Some(FusionMethod::Pso),
            "nelder-mead" | "nelder_mead" | "neldermead" | "nm" => Some(FusionMethod::NelderMead),
            "powell" => Some(FusionMethod::Powell),
            _ => None,
        }
    }
}

impl fmt::Display for FusionMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            FusionMethod::Average => "average",
            FusionMethod::Pso => "pso",
            FusionMethod::NelderMead => "nelder-mead",
            FusionMethod::Powell => "powell",
        };
        f.write_str(name)
    }
}

/// Outcome of a fusion run on the validation set.
#[derive(Debug, Clone, PartialEq)]
pub struct FusionOutcome {
    pub method: FusionMethod,
    pub weights: WeightVector,
    pub fused_scores: Vec<f64>,
    pub predictions: Vec<Label>,
    /// `e = 1 - A_acc` on validation.
    pub validation_fitness: f64,
    pub optimizer: Option<OptimResult>,
}

/// Loads one score file: CSV with header `doc_id,p_single,p_multi`. Every
/// pair must be two probabilities summing to 1 within 1e-6, and document
/// ids must be unique. The model name defaults to the file stem.
pub fn load_score_file(path: &Path) -> Result<ScoreColumn> {
    let file = std::fs::File::open(path).map_err(|e| Error::BadScoreFile {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    let bad = |reason: String| Error::BadScoreFile {
        path: path.to_path_buf(),
        reason,
    };
    let mut reader = csv::Reader::from_reader(file);
    let headers = reader.headers().map_err(|e| bad(e.to_string()))?.clone();
    if headers.len() < 3
        || &headers[0] != "doc_id"
        || &headers[1] != "p_single"
        || &headers[2] != "p_multi"
    {
        return Err(bad("expected header 'doc_id,p_single,p_multi'".to_string()));
    }
    let mut scores = BTreeMap::new();
    for (row_idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| bad(e.to_string()))?;
        let line = row_idx + 2;
        let doc_id = record[0].to_string();
        let p_single: f64 = record[1]
            .parse()
            .map_err(|_| bad(format!("line {line}: p_single is not a number")))?;
        let p_multi: f64 = record[2]
            .parse()
            .map_err(|_| bad(format!("line {line}: p_multi is not a number")))?;
        if !(0.0..=1.0).contains(&p_single) || !(0.0..=1.0).contains(&p_multi) {
            return Err(bad(format!(
                "line {line}: probabilities ({p_single}, {p_multi}) outside [0, 1]"
            )));
        }
        if (p_single + p_multi - 1.0).abs() > 1e-6 {
            return Err(bad(format!(
                "line {line}: p_single + p_multi = {} is not 1",
                p_single + p_multi
            )));
        }
        if scores.insert(doc_id.clone(), p_multi).is_some() {
            return Err(bad(format!("line {line}: duplicate doc_id '{doc_id}'")));
        }
    }
    let model_name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "model".to_string());
    Ok(ScoreColumn { model_name, scores })
}

/// Writes a probability column in the score-file format.
pub fn write_score_file(path: &Path, doc_ids: &[String], p_multi: &[f64]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    writer
        .write_record(["doc_id", "p_single", "p_multi"])
        .map_err(|e| Error::BadScoreFile {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })?;
    for (id, &p) in doc_ids.iter().zip(p_multi) {
        writer
            .write_record([id.as_str(), &(1.0 - p).to_string(), &p.to_string()])
            .map_err(|e| Error::BadScoreFile {
                path: path.to_path_buf(),
                reason: e.to_string(),
            })?;
    }
    writer.flush()?;
    Ok(())
}

/// Inner-joins score columns on document id into a matrix, dropping
/// documents missing from any model. Returns the matrix and the number of
/// dropped documents.
pub fn assemble(columns: &[ScoreColumn]) -> Result<(ScoreMatrix, usize)> {
    if columns.is_empty() {
        return Err(Error::EmptyScoreJoin);
    }
    let mut union: BTreeMap<&str, usize> = BTreeMap::new();
    for column in columns {
        for id in column.scores.keys() {
            *union.entry(id).or_insert(0) += 1;
        }
    }
    let shared: Vec<String> = union
        .iter()
        .filter(|&(_, &count)| count == columns.len())
        .map(|(&id, _)| id.to_string())
        .collect();
    if shared.is_empty() {
        return Err(Error::EmptyScoreJoin);
    }
    let dropped = union.len() - shared.len();
    let scores = shared
        .iter()
        .map(|id| columns.iter().map(|c| c.scores[id]).collect())
        .collect();
    Ok((
        ScoreMatrix {
            doc_ids: shared,
            model_names: columns.iter().map(|c| c.model_name.clone()).collect(),
            scores,
        },
        dropped,
    ))
}

/// The weighted combination: normalizes the weights to unit sum and
/// returns `S = sum_i w_i * s_i` per document, so `S` stays in [0, 1].
pub fn fuse(matrix: &ScoreMatrix, weights: &WeightVector) -> Result<Vec<f64>> {
    if weights.weights.len() != matrix.n_models() {
        return Err(Error::WeightArityMismatch {
            weights: weights.weights.len(),
            models: matrix.n_models(),
        });
    }
    let normalized = weights.normalized()?;
    Ok(matrix
        .scores
        .iter()
        .map(|row| row.iter().zip(&normalized).map(|(s, w)| w * s).sum())
        .collect())
}

/// Thresholds fused scores into labels: `S >= threshold` predicts
/// multi-author (ties resolve to the positive class).
pub fn threshold_predictions(fused: &[f64], threshold: f64) -> Vec<Label> {
    fused
        .iter()
        .map(|&s| {
            if s >= threshold {
                Label::MultiAuthor
            } else {
                Label::SingleAuthor
            }
        })
        .collect()
}

/// Validation fitness `e = 1 - A_acc` of a weight vector: the fraction of
/// thresholded fused predictions that disagree with the labels.
pub fn fitness(
    weights: &WeightVector,
    val_matrix: &ScoreMatrix,
    val_labels: &[Label],
    threshold: f64,
) -> Result<f64> {
    if val_matrix.n_docs() == 0 {
        return Err(Error::EmptyValidationSet);
    }
    if val_labels.len() != val_matrix.n_docs() {
        return Err(Error::EvalMismatch {
            predictions: val_matrix.n_docs(),
            labels: val_labels.len(),
        });
    }
    let fused = fuse(val_matrix, weights)?;
    let predictions = threshold_predictions(&fused, threshold);
    let correct = predictions
        .iter()
        .zip(val_labels)
        .filter(|(p, l)| p == l)
        .count();
    Ok(1.0 - correct as f64 / val_labels.len() as f64)
}

/// The literal weighted probability sum averaged over the validation set,
/// exposed as a diagnostic alongside the accuracy-based fitness.
pub fn soft_score(weights: &WeightVector, matrix: &ScoreMatrix) -> Result<f64> {
    let fused = fuse(matrix, weights)?;
    Ok(fused.iter().sum::<f64>() / fused.len().max(1) as f64)
}

/// Objective-side handling of optimizer iterates: clamp into the unit box,
/// and map an all-zero vector to uniform so the objective is total.
fn effective_weights(x: &[f64]) -> WeightVector {
    let clamped: Vec<f64> = x.iter().map(|w| w.clamp(0.0, 1.0)).collect();
    if clamped.iter().sum::<f64>() <= 0.0 {
        WeightVector::uniform(clamped.len())
    } else {
        WeightVector { weights: clamped }
    }
}

/// Selects fusion weights on the validation set. Merit-based methods
/// minimize [`fitness`] over `[0,1]^n` (Nelder-Mead and Powell start from
/// the uniform vector; bounds are enforced by objective-side clamping).
/// The uniform candidate is always evaluated and returned instead if it
/// beats the optimizer, so the outcome is never worse than averaging.
pub fn optimize_weights(
    method: FusionMethod,
    val_matrix: &ScoreMatrix,
    val_labels: &[Label],
    threshold: f64,
    seed: u64,
) -> Result<FusionOutcome> {
    let n = val_matrix.n_models();
    if n == 0 {
        return Err(Error::EmptyScoreJoin);
    }
    let uniform = WeightVector::uniform(n);
    let uniform_fitness = fitness(&uniform, val_matrix, val_labels, threshold)?;

    let objective = |x: &[f64]| {
        let w = effective_weights(x);
        // Inputs are validated above; the closure cannot fail.
        fitness(&w, val_matrix, val_labels, threshold).unwrap_or(1.0)
    };

    let optimizer = match method {
        FusionMethod::Average => None,
        FusionMethod::Pso => {
            let bounds = Bounds::unit(n)?;
            let params = PsoParams {
                seed,
                ..PsoParams::default()
            };
            Some(minimize_pso(objective, &bounds, &params)?)
        }
        FusionMethod::NelderMead => Some(minimize_nelder_mead(
            objective,
            &uniform.weights,
            &NelderMeadParams::default(),
        )?),
        FusionMethod::Powell => Some(minimize_powell(
            objective,
            &uniform.weights,
            &PowellParams::default(),
        )?),
    };

    let (weights, validation_fitness) = match &optimizer {
        Some(result) if result.best_f < uniform_fitness => {
            (effective_weights(&result.best_x), result.best_f)
        }
        _ => (uniform, uniform_fitness),
    };

    let fused_scores = fuse(val_matrix, &weights)?;
    let predictions = threshold_predictions(&fused_scores, threshold);
    Ok(FusionOutcome {
        method,
        weights,
        fused_scores,
        predictions,
        validation_fitness,
        optimizer,
    })
}

/// The persisted weights artifact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightsArtifact {
    pub method: String,
    pub model_names: Vec<String>,
    pub raw_weights: Vec<f64>,
    pub normalized_weights: Vec<f64>,
    pub validation_fitness: f64,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config_hash: Option<String>,
}

impl WeightsArtifact {
    pub fn new(outcome: &FusionOutcome, matrix: &ScoreMatrix, seed: u64) -> Result<Self> {
        Ok(Self {
            method: outcome.method.to_string(),
            model_names: matrix.model_names.clone(),
            raw_weights: outcome.weights.weights.clone(),
            normalized_weights: outcome.weights.normalized()?,
            validation_fitness: outcome.validation_fitness,
            seed,
            config_hash: None,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::io::Write;

    fn column(name: &str, pairs: &[(&str, f64)]) -> ScoreColumn {
        ScoreColumn {
            model_name: name.to_string(),
            scores: pairs
                .iter()
                .map(|&(id, s)| (id.to_string(), s))
                .collect(),
        }
    }

    fn matrix(models: usize, rows: Vec<Vec<f64>>) -> ScoreMatrix {
        ScoreMatrix {
            doc_ids: (0..rows.len()).map(|i| format!("d{i:03}")).collect(),
            model_names: (0..models).map(|m| format!("m{m}")).collect(),
            scores: rows,
        }
    }

    #[test]
    fn score_file_roundtrip_and_validation() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.csv");
        let mut f = std::fs::File::create(&path).unwrap();
        writeln!(f, "doc_id,p_single,p_multi").unwrap();
        writeln!(f, "d1,0.3,0.7").unwrap();
        writeln!(f, "d2,1.0,0.0").unwrap();
        drop(f);
        let col = load_score_file(&path).unwrap();
        assert_eq!(col.model_name, "model");
        assert_eq!(col.scores["d1"], 0.7);

        let bad = dir.path().join("bad.csv");
        std::fs::write(&bad, "doc_id,p_single,p_multi\nd1,0.5,0.6\n").unwrap();
        assert!(matches!(
            load_score_file(&bad),
            Err(Error::BadScoreFile { .. })
        ));

        let dup = dir.path().join("dup.csv");
        std::fs::write(&dup, "doc_id,p_single,p_multi\nd1,0.5,0.5\nd1,0.4,0.6\n").unwrap();
        let err = load_score_file(&dup).unwrap_err();
        assert!(err.to_string().contains("duplicate"), "{err}");

        let out_of_range = dir.path().join("range.csv");
        std::fs::write(&out_of_range, "doc_id,p_single,p_multi\nd1,-0.2,1.2\n").unwrap();
        assert!(load_score_file(&out_of_range).is_err());
    }

    #[test]
    fn assemble_inner_joins_and_reports_drops() {
        let a = column("a", &[("x", 0.1), ("y", 0.2)]);
        let b = column("b", &[("y", 0.9), ("z", 0.8)]);
        let (matrix, dropped) = assemble(&[a, b]).unwrap();
        assert_eq!(matrix.doc_ids, vec!["y"]);
        assert_eq!(matrix.scores, vec![vec![0.2, 0.9]]);
        assert_eq!(dropped, 2);
    }

    #[test]
    fn assemble_single_column_is_identity() {
        let a = column("a", &[("x", 0.1), ("y", 0.2)]);
        let (matrix, dropped) = assemble(std::slice::from_ref(&a)).unwrap();
        assert_eq!(dropped, 0);
        assert_eq!(matrix, ScoreMatrix::from_column(&a));
    }

    #[test]
    fn assemble_rejects_empty_intersection() {
        let a = column("a", &[("x", 0.1)]);
        let b = column("b", &[("y", 0.9)]);
        assert!(matches!(assemble(&[a, b]), Err(Error::EmptyScoreJoin)));
    }

    #[test]
    fn fuse_matches_hand_arithmetic() {
        let m = matrix(2, vec![vec![0.8, 0.6]]);
        let fused = fuse(
            &m,
            &WeightVector {
                weights: vec![0.5, 0.5],
            },
        )
        .unwrap();
        assert!((fused[0] - 0.7).abs() < 1e-12);
    }

    #[test]
    fn one_hot_weights_reproduce_model_bit_exactly() {
        let m = matrix(3, vec![vec![0.11, 0.57, 0.93], vec![0.4, 0.5, 0.6]]);
        for target in 0..3 {
            let mut weights = vec![0.0; 3];
            weights[target] = 1.0;
            let fused = fuse(&m, &WeightVector { weights }).unwrap();
            for (row, &s) in m.scores.iter().zip(&fused) {
                assert_eq!(row[target].to_bits(), s.to_bits());
            }
        }
    }

    #[test]
    fn all_zero_weights_rejected_by_fuse() {
        let m = matrix(2, vec![vec![0.8, 0.6]]);
        assert!(matches!(
            fuse(
                &m,
                &WeightVector {
                    weights: vec![0.0, 0.0]
                }
            ),
            Err(Error::AllZeroWeights)
        ));
    }

    #[test]
    fn fitness_enumerated_example() {
        // Fused scores (0.9, 0.4, 0.6, 0.2) vs labels (m, s, s, s) at 0.5:
        // predictions (m, s, m, s), 3 correct, e = 0.25.
        let m = matrix(1, vec![vec![0.9], vec![0.4], vec![0.6], vec![0.2]]);
        let labels = vec![
            Label::MultiAuthor,
            Label::SingleAuthor,
            Label::SingleAuthor,
            Label::SingleAuthor,
        ];
        let e = fitness(
            &WeightVector {
                weights: vec![1.0],
            },
            &m,
            &labels,
            0.5,
        )
        .unwrap();
        assert!((e - 0.25).abs() < 1e-12);
    }

    #[test]
    fn fitness_extremes() {
        let m = matrix(1, vec![vec![0.9], vec![0.1]]);
        let right = vec![Label::MultiAuthor, Label::SingleAuthor];
        let wrong = vec![Label::SingleAuthor, Label::MultiAuthor];
        let w = WeightVector {
            weights: vec![1.0],
        };
        assert_eq!(fitness(&w, &m, &right, 0.5).unwrap(), 0.0);
        assert_eq!(fitness(&w, &m, &wrong, 0.5).unwrap(), 1.0);
    }

    #[test]
    fn single_model_optimization_normalizes_to_one() {
        let m = matrix(1, vec![vec![0.9], vec![0.1], vec![0.7]]);
        let labels = vec![
            Label::MultiAuthor,
            Label::SingleAuthor,
            Label::SingleAuthor,
        ];
        for method in FusionMethod::ALL {
            let outcome = optimize_weights(method, &m, &labels, 0.5, 1).unwrap();
            assert_eq!(outcome.weights.normalized().unwrap(), vec![1.0]);
        }
    }

    fn planted_matrix(seed: u64, n_docs: usize) -> (ScoreMatrix, Vec<Label>) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut rows = Vec::with_capacity(n_docs);
        let mut labels = Vec::with_capacity(n_docs);
        for i in 0..n_docs {
            let is_multi = i % 2 == 0;
            let perfect = if is_multi { 0.9 } else { 0.1 };
            let coin: f64 = rng.gen_range(0.0..=1.0);
            rows.push(vec![perfect, coin]);
            labels.push(if is_multi {
                Label::MultiAuthor
            } else {
                Label::SingleAuthor
            });
        }
        (matrix(2, rows), labels)
    }

    #[test]
    fn perfect_model_dominates_coin_flip() {
        let (m, labels) = planted_matrix(17, 200);
        for method in [FusionMethod::Pso, FusionMethod::NelderMead, FusionMethod::Powell] {
            let outcome = optimize_weights(method, &m, &labels, 0.5, 42).unwrap();
            assert_eq!(outcome.validation_fitness, 0.0, "{method} missed e = 0");
            let normalized = outcome.weights.normalized().unwrap();
            assert!(
                normalized[0] >= 0.5,
                "{method}: perfect model weight {normalized:?}"
            );
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn fused_score_is_convex_combination(
            rows in proptest::collection::vec(
                proptest::collection::vec(0.0f64..=1.0, 3), 1..20),
            raw in proptest::collection::vec(0.001f64..=1.0, 3),
        ) {
            let m = matrix(3, rows.clone());
            let fused = fuse(&m, &WeightVector { weights: raw.clone() }).unwrap();
            for (row, &s) in rows.iter().zip(&fused) {
                let lo = row.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                prop_assert!(s >= lo - 1e-12 && s <= hi + 1e-12);
            }
        }

        #[test]
        fn decisions_are_scale_invariant(
            rows in proptest::collection::vec(
                proptest::collection::vec(0.0f64..=1.0, 2), 1..20),
            raw in proptest::collection::vec(0.001f64..=1.0, 2),
            scale in 0.01f64..100.0,
        ) {
            let m = matrix(2, rows.clone());
            let labels: Vec<Label> = (0..rows.len())
                .map(|i| if i % 3 == 0 { Label::MultiAuthor } else { Label::SingleAuthor })
                .collect();
            let w1 = WeightVector { weights: raw.clone() };
            let w2 = WeightVector { weights: raw.iter().map(|w| w * scale).collect() };
            let f1 = fuse(&m, &w1).unwrap();
            let f2 = fuse(&m, &w2).unwrap();
            for (a, b) in f1.iter().zip(&f2) {
                prop_assert!((a - b).abs() < 1e-12);
            }
            let e1 = fitness(&w1, &m, &labels, 0.5).unwrap();
            let e2 = fitness(&w2, &m, &labels, 0.5).unwrap();
            prop_assert_eq!(e1, e2);
        }

        #[test]
        fn merit_methods_never_lose_to_averaging(seed in 0u64..500) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let n_models = rng.gen_range(3..=6);
            let n_docs = 60;
            let rows: Vec<Vec<f64>> = (0..n_docs)
                .map(|_| (0..n_models).map(|_| rng.gen_range(0.0..=1.0)).collect())
                .collect();
            let labels: Vec<Label> = (0..n_docs)
                .map(|_| if rng.gen_bool(0.5) { Label::MultiAuthor } else { Label::SingleAuthor })
                .collect();
            let m = matrix(n_models, rows);
            let uniform = fitness(&WeightVector::uniform(n_models), &m, &labels, 0.5).unwrap();
            for method in [FusionMethod::Pso, FusionMethod::NelderMead, FusionMethod::Powell] {
                let outcome = optimize_weights(method, &m, &labels, 0.5, seed).unwrap();
                prop_assert!(outcome.validation_fitness <= uniform);
            }
        }
    }
}
