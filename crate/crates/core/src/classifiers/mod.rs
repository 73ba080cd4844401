//! Natively implemented probabilistic classifiers over TF-IDF features:
//! multinomial Naive Bayes, logistic regression, k-nearest neighbors, a
//! Gini decision tree, and a random forest. Every model emits a
//! per-document probability of the positive (multi-author) class.

mod forest;
mod knn;
mod logistic;
mod naive_bayes;
mod tree;

use serde::{Deserialize, Serialize};

use crate::corpus::Label;
use crate::error::{Error, Result};
use crate::features::FeatureMatrix;

/// Class order for every two-entry probability pair.
pub const CLASS_ORDER: [Label; 2] = [Label::SingleAuthor, Label::MultiAuthor];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Cosine,
    Euclidean,
}

/// Model selection plus hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ModelSpec {
    NaiveBayes {
        alpha: f64,
    },
    LogisticRegression {
        learning_rate: f64,
        epochs: usize,
        l2_lambda: f64,
        seed: u64,
    },
    Knn {
        k: usize,
        metric: Metric,
    },
    DecisionTree {
        max_depth: usize,
        min_samples_leaf: usize,
        /// Carried for interface parity; tree construction is fully
        /// deterministic and does not consume randomness.
        seed: u64,
    },
    RandomForest {
        n_trees: usize,
        max_depth: usize,
        /// Fraction of features each tree may split on; `None` means
        /// `sqrt(V)/V`, resolved at fit time.
        feature_fraction: Option<f64>,
        seed: u64,
    },
}

impl ModelSpec {
    pub fn naive_bayes() -> Self {
        ModelSpec::NaiveBayes { alpha: 1.0 }
    }

    pub fn logistic_regression(seed: u64) -> Self {
        ModelSpec::LogisticRegression {
            learning_rate: 0.1,
            epochs: 500,
            l2_lambda: 1e-4,
            seed,
        }
    }

    pub fn knn() -> Self {
        ModelSpec::Knn {
            k: 5,
            metric: Metric::Cosine,
        }
    }

    pub fn decision_tree(seed: u64) -> Self {
        ModelSpec::DecisionTree {
            max_depth: 20,
            min_samples_leaf: 2,
            seed,
        }
    }

    pub fn random_forest(seed: u64) -> Self {
        ModelSpec::RandomForest {
            n_trees: 100,
            max_depth: 20,
            feature_fraction: None,
            seed,
        }
    }

    /// Short name used for files and report rows.
    pub fn name(&self) -> &'static str {
        match self {
            ModelSpec::NaiveBayes { .. } => "naive_bayes",
            ModelSpec::LogisticRegression { .. } => "logistic_regression",
            ModelSpec::Knn { .. } => "knn",
            ModelSpec::DecisionTree { .. } => "decision_tree",
            ModelSpec::RandomForest { .. } => "random_forest",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |reason: String| Error::BadHyperparameter {
            model: self.name(),
            reason,
        };
        match *self {
            ModelSpec::NaiveBayes { alpha } => {
                if alpha <= 0.0 {
                    return Err(bad(format!("alpha must be positive, got {alpha}")));
                }
            }
            ModelSpec::LogisticRegression {
                learning_rate,
                epochs,
                l2_lambda,
                ..
            } => {
                if learning_rate <= 0.0 || l2_lambda <= 0.0 || epochs == 0 {
                    return Err(bad(format!(
                        "learning_rate {learning_rate}, epochs {epochs}, l2_lambda {l2_lambda} must all be positive"
                    )));
                }
            }
            ModelSpec::Knn { k, .. } => {
                if k == 0 {
                    return Err(bad("k must be at least 1".to_string()));
                }
            }
            ModelSpec::DecisionTree {
                max_depth,
                min_samples_leaf,
                ..
            } => {
                if max_depth == 0 || min_samples_leaf == 0 {
                    return Err(bad(format!(
                        "max_depth {max_depth} and min_samples_leaf {min_samples_leaf} must be positive"
                    )));
                }
            }
            ModelSpec::RandomForest {
                n_trees,
                max_depth,
                feature_fraction,
                ..
            } => {
                if n_trees == 0 || max_depth == 0 {
                    return Err(bad(format!(
                        "n_trees {n_trees} and max_depth {max_depth} must be positive"
                    )));
                }
                if let Some(fraction) = feature_fraction {
                    if !(fraction > 0.0 && fraction <= 1.0) {
                        return Err(bad(format!(
                            "feature_fraction must lie in (0, 1], got {fraction}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum FittedParams {
    NaiveBayes(naive_bayes::NaiveBayesParams),
    Logistic(logistic::LogisticParams),
    Knn(knn::KnnParams),
    Tree(tree::TreeParams),
    Forest(forest::ForestParams),
}

/// A trained model: the spec it came from plus learned parameters.
/// Probability pairs follow [`CLASS_ORDER`] and sum to 1 within 1e-9.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedClassifier {
    pub spec: ModelSpec,
    parameters: FittedParams,
}

pub fn fit(spec: &ModelSpec, features: &FeatureMatrix, labels: &[Label]) -> Result<FittedClassifier> {
    spec.validate()?;
    if features.n_rows() != labels.len() {
        return Err(Error::LabelMismatch {
            model: spec.name(),
            rows: features.n_rows(),
            labels: labels.len(),
        });
    }
    if features.n_rows() == 0 {
        return Err(Error::LabelMismatch {
            model: spec.name(),
            rows: 0,
            labels: labels.len(),
        });
    }
    let single_class = labels.iter().all(|&l| l == labels[0]);
    let parameters = match spec {
        ModelSpec::NaiveBayes { alpha } => {
            require_two_classes(spec, single_class)?;
            FittedParams::NaiveBayes(naive_bayes::fit(features, labels, *alpha))
        }
        ModelSpec::LogisticRegression {
            learning_rate,
            epochs,
            l2_lambda,
            seed,
        } => {
            require_two_classes(spec, single_class)?;
            FittedParams::Logistic(logistic::fit(
                features,
                labels,
                *learning_rate,
                *epochs,
                *l2_lambda,
                *seed,
            ))
        }
        // kNN tolerates a single class: every neighborhood votes alike.
        ModelSpec::Knn { k, metric } => FittedParams::Knn(knn::fit(features, labels, *k, *metric)),
        ModelSpec::DecisionTree {
            max_depth,
            min_samples_leaf,
            ..
        } => {
            require_two_classes(spec, single_class)?;
            FittedParams::Tree(tree::fit(features, labels, *max_depth, *min_samples_leaf))
        }
        ModelSpec::RandomForest {
            n_trees,
            max_depth,
            feature_fraction,
            seed,
        } => {
            require_two_classes(spec, single_class)?;
            FittedParams::Forest(forest::fit(
                features,
                labels,
                *n_trees,
                *max_depth,
                *feature_fraction,
                *seed,
            ))
        }
    };
    Ok(FittedClassifier {
        spec: spec.clone(),
        parameters,
    })
}

fn require_two_classes(spec: &ModelSpec, single_class: bool) -> Result<()> {
    if single_class {
        Err(Error::SingleClassTraining { model: spec.name() })
    } else {
        Ok(())
    }
}

impl FittedClassifier {
    fn n_features(&self) -> usize {
        match &self.parameters {
            FittedParams::NaiveBayes(p) => p.n_features,
            FittedParams::Logistic(p) => p.n_features,
            FittedParams::Knn(p) => p.n_features,
            FittedParams::Tree(p) => p.n_features,
            FittedParams::Forest(p) => p.n_features,
        }
    }

    /// Probability of the multi-author class per row.
    pub fn predict_proba(&self, features: &FeatureMatrix) -> Result<Vec<f64>> {
        if features.n_cols != self.n_features() {
            return Err(Error::DimensionMismatch {
                expected: self.n_features(),
                got: features.n_cols,
            });
        }
        Ok(match &self.parameters {
            FittedParams::NaiveBayes(p) => naive_bayes::predict(p, features),
            FittedParams::Logistic(p) => logistic::predict(p, features),
            FittedParams::Knn(p) => knn::predict(p, features),
            FittedParams::Tree(p) => tree::predict(p, features),
            FittedParams::Forest(p) => forest::predict(p, features),
        })
    }

    /// `[p_single, p_multi]` pairs in [`CLASS_ORDER`].
    pub fn predict_proba_pairs(&self, features: &FeatureMatrix) -> Result<Vec<[f64; 2]>> {
        Ok(self
            .predict_proba(features)?
            .into_iter()
            .map(|p_multi| [1.0 - p_multi, p_multi])
            .collect())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(json: &str) -> Result<Self> {
        Ok(serde_json::from_str(json)?)
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let raw = std::fs::read_to_string(path)?;
        Self::from_json(&raw).map_err(|e| Error::BadModelFile {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })
    }
}

/// Dispatch wrapper mirroring the operation-style API.
pub fn predict_proba(classifier: &FittedClassifier, features: &FeatureMatrix) -> Result<Vec<f64>> {
    classifier.predict_proba(features)
}

#[cfg(test)]
pub(crate) mod test_support {
    use super::*;
    use crate::features::SparseVec;

    pub fn dense_matrix(rows: Vec<Vec<f64>>, unit_normalized: bool) -> FeatureMatrix {
        let n_cols = rows.first().map_or(0, Vec::len);
        FeatureMatrix {
            doc_ids: (0..rows.len()).map(|i| format!("d{i}")).collect(),
            rows: rows
                .into_iter()
                .map(|dense| SparseVec {
                    entries: dense
                        .into_iter()
                        .enumerate()
                        .filter(|&(_, v)| v != 0.0)
                        .collect(),
                })
                .collect(),
            n_cols,
            unit_normalized,
        }
    }

    /// 2-feature set separable by the sign of feature 1 minus feature 2.
    pub fn separable_set(n_per_class: usize) -> (FeatureMatrix, Vec<Label>) {
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for i in 0..n_per_class {
            let jitter = (i % 7) as f64 * 0.01;
            rows.push(vec![1.0 + jitter, 0.1 + jitter / 2.0]);
            labels.push(Label::MultiAuthor);
            rows.push(vec![0.1 + jitter / 2.0, 1.0 + jitter]);
            labels.push(Label::SingleAuthor);
        }
        (dense_matrix(rows, false), labels)
    }
}
