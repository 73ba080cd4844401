//! Run configuration: a TOML file with one flat section per pipeline
//! stage, every option mirrored by a CLI flag (the flag wins), and a
//! stable hash embedded in all output artifacts.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use authorfuse::augment::BalanceMethod;
use authorfuse::classifiers::{Metric, ModelSpec};
use authorfuse::eval::F1Variant;
use authorfuse::fusion::FusionMethod;
use authorfuse::textprep::{CleaningConfig, Resource};
use authorfuse::SplitSpec;

use crate::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub corpus: CorpusSection,
    pub cleaning: CleaningSection,
    pub balance: BalanceSection,
    pub features: FeaturesSection,
    pub models: ModelsSection,
    pub fusion: FusionSection,
    pub output: OutputSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            corpus: CorpusSection::default(),
            cleaning: CleaningSection::default(),
            balance: BalanceSection::default(),
            features: FeaturesSection::default(),
            models: ModelsSection::default(),
            fusion: FusionSection::default(),
            output: OutputSection::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorpusSection {
    pub dataset: String,
    /// "pan" or "jsonl".
    pub format: String,
    pub train_ratio: f64,
    pub val_ratio: f64,
    pub test_ratio: f64,
    pub stratified: bool,
    pub seed: u64,
}

impl Default for CorpusSection {
    fn default() -> Self {
        Self {
            dataset: String::new(),
            format: "jsonl".to_string(),
            train_ratio: 0.70,
            val_ratio: 0.15,
            test_ratio: 0.15,
            stratified: true,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CleaningSection {
    pub remove_urls: bool,
    pub remove_usernames: bool,
    pub remove_emojis: bool,
    pub remove_stopwords: bool,
    pub expand_contractions: bool,
    /// Empty string means the builtin resource.
    pub stopword_file: String,
    pub contraction_file: String,
}

impl CleaningSection {
    pub fn set_all(&mut self, enabled: bool) {
        self.remove_urls = enabled;
        self.remove_usernames = enabled;
        self.remove_emojis = enabled;
        self.remove_stopwords = enabled;
        self.expand_contractions = enabled;
    }

    pub fn any_enabled(&self) -> bool {
        self.remove_urls
            || self.remove_usernames
            || self.remove_emojis
            || self.remove_stopwords
            || self.expand_contractions
    }

    pub fn to_cleaning_config(&self) -> CleaningConfig {
        let resource = |path: &str| {
            if path.is_empty() {
                Resource::Builtin
            } else {
                Resource::File(PathBuf::from(path))
            }
        };
        CleaningConfig {
            remove_urls: self.remove_urls,
            remove_usernames: self.remove_usernames,
            remove_emojis: self.remove_emojis,
            remove_stopwords: self.remove_stopwords,
            expand_contractions: self.expand_contractions,
            stopword_resource: resource(&self.stopword_file),
            contraction_resource: resource(&self.contraction_file),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BalanceSection {
    /// "none", "smote", or "transpose".
    pub method: String,
    pub k_neighbors: usize,
    pub swaps_per_100_chars: f64,
    pub seed: u64,
}

impl Default for BalanceSection {
    fn default() -> Self {
        Self {
            method: "none".to_string(),
            k_neighbors: 5,
            swaps_per_100_chars: 1.0,
            seed: 42,
        }
    }
}

impl BalanceSection {
    pub fn to_method(&self) -> Result<BalanceMethod, CliError> {
        match self.method.as_str() {
            "none" => Ok(BalanceMethod::NoBalance),
            "smote" => Ok(BalanceMethod::Smote {
                k_neighbors: self.k_neighbors,
                seed: self.seed,
            }),
            "transpose" => Ok(BalanceMethod::Transpose {
                swaps_per_100_chars: self.swaps_per_100_chars,
                seed: self.seed,
            }),
            other => Err(CliError::config(format!(
                "unknown balance method '{other}' (expected none, smote, or transpose)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeaturesSection {
    pub min_df: usize,
    /// 0 means unbounded.
    pub max_features: usize,
    pub l2_normalize: bool,
}

impl Default for FeaturesSection {
    fn default() -> Self {
        Self {
            min_df: 2,
            max_features: 50_000,
            l2_normalize: true,
        }
    }
}

impl FeaturesSection {
    pub fn to_tfidf_config(&self) -> authorfuse::TfIdfConfig {
        authorfuse::TfIdfConfig {
            min_df: self.min_df,
            max_features: (self.max_features > 0).then_some(self.max_features),
            l2_normalize: self.l2_normalize,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelsSection {
    pub enabled: Vec<String>,
    pub nb_alpha: f64,
    pub lr_learning_rate: f64,
    pub lr_epochs: usize,
    pub lr_l2_lambda: f64,
    pub knn_k: usize,
    pub knn_metric: String,
    pub dt_max_depth: usize,
    pub dt_min_samples_leaf: usize,
    pub rf_n_trees: usize,
    pub rf_max_depth: usize,
    /// 0.0 means automatic (sqrt(V)/V).
    pub rf_feature_fraction: f64,
    pub seed: u64,
}

impl Default for ModelsSection {
    fn default() -> Self {
        Self {
            enabled: vec![
                "naive_bayes".to_string(),
                "logistic_regression".to_string(),
                "knn".to_string(),
                "decision_tree".to_string(),
                "random_forest".to_string(),
            ],
            nb_alpha: 1.0,
            lr_learning_rate: 0.1,
            lr_epochs: 500,
            lr_l2_lambda: 1e-4,
            knn_k: 5,
            knn_metric: "cosine".to_string(),
            dt_max_depth: 20,
            dt_min_samples_leaf: 2,
            rf_n_trees: 100,
            rf_max_depth: 20,
            rf_feature_fraction: 0.0,
            seed: 42,
        }
    }
}

impl ModelsSection {
    pub fn specs(&self) -> Result<Vec<ModelSpec>, CliError> {
        let metric = match self.knn_metric.as_str() {
            "cosine" => Metric::Cosine,
            "euclidean" => Metric::Euclidean,
            other => {
                return Err(CliError::config(format!(
                    "unknown knn metric '{other}' (expected cosine or euclidean)"
                )))
            }
        };
        self.enabled
            .iter()
            .map(|name| match name.as_str() {
                "naive_bayes" | "nb" => Ok(ModelSpec::NaiveBayes {
                    alpha: self.nb_alpha,
                }),
                "logistic_regression" | "lr" => Ok(ModelSpec::LogisticRegression {
                    learning_rate: self.lr_learning_rate,
                    epochs: self.lr_epochs,
                    l2_lambda: self.lr_l2_lambda,
                    seed: self.seed,
                }),
                "knn" => Ok(ModelSpec::Knn {
                    k: self.knn_k,
                    metric,
                }),
                "decision_tree" | "dt" => Ok(ModelSpec::DecisionTree {
                    max_depth: self.dt_max_depth,
                    min_samples_leaf: self.dt_min_samples_leaf,
                    seed: self.seed,
                }),
                "random_forest" | "rf" => Ok(ModelSpec::RandomForest {
                    n_trees: self.rf_n_trees,
                    max_depth: self.rf_max_depth,
                    feature_fraction: (self.rf_feature_fraction > 0.0)
                        .then_some(self.rf_feature_fraction),
                    seed: self.seed,
                }),
                other => Err(CliError::config(format!("unknown model '{other}'"))),
            })
            .collect()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FusionSection {
    /// "average", "pso", "nelder-mead", or "powell".
    pub method: String,
    pub threshold: f64,
    /// External validation score files (e.g. transformer outputs); when
    /// empty, fusion pools the trained models' validation scores.
    pub val_score_files: Vec<String>,
    pub test_score_files: Vec<String>,
    pub seed: u64,
}

impl Default for FusionSection {
    fn default() -> Self {
        Self {
            method: "powell".to_string(),
            threshold: 0.5,
            val_score_files: Vec::new(),
            test_score_files: Vec::new(),
            seed: 42,
        }
    }
}

impl FusionSection {
    pub fn to_method(&self) -> Result<FusionMethod, CliError> {
        FusionMethod::parse(&self.method).ok_or_else(|| {
            CliError::config(format!(
                "unknown fusion method '{}' (expected average, pso, nelder-mead, or powell)",
                self.method
            ))
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: String,
    /// Which F1 the comparison tables show: "binary" or "macro".
    pub f1: String,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: "runs/out".to_string(),
            f1: "binary".to_string(),
        }
    }
}

impl OutputSection {
    pub fn f1_variant(&self) -> Result<F1Variant, CliError> {
        match self.f1.as_str() {
            "binary" => Ok(F1Variant::Binary),
            "macro" => Ok(F1Variant::Macro),
            other => Err(CliError::config(format!(
                "unknown f1 variant '{other}' (expected binary or macro)"
            ))),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let raw = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&raw)
            .map_err(|e| CliError::config(format!("bad config {}: {e}", path.display())))
    }

    pub fn split_spec(&self) -> Result<SplitSpec, CliError> {
        SplitSpec::new(
            self.corpus.train_ratio,
            self.corpus.val_ratio,
            self.corpus.test_ratio,
            self.corpus.seed,
            self.corpus.stratified,
        )
        .map_err(CliError::from_config_error)
    }

    /// Checks everything that can fail before any work starts.
    pub fn validate(&self, needs_dataset: bool) -> Result<(), CliError> {
        if needs_dataset {
            if self.corpus.dataset.is_empty() {
                return Err(CliError::config("no dataset configured".to_string()));
            }
            if !Path::new(&self.corpus.dataset).exists() {
                return Err(CliError::config(format!(
                    "dataset path '{}' does not exist",
                    self.corpus.dataset
                )));
            }
            match self.corpus.format.as_str() {
                "pan" | "jsonl" => {}
                other => {
                    return Err(CliError::config(format!(
                        "unknown corpus format '{other}' (expected pan or jsonl)"
                    )))
                }
            }
        }
        self.split_spec()?;
        self.balance.to_method()?;
        self.models.specs()?;
        self.fusion.to_method()?;
        self.output.f1_variant()?;
        if !(0.0..=1.0).contains(&self.fusion.threshold) {
            return Err(CliError::config(format!(
                "threshold {} outside [0, 1]",
                self.fusion.threshold
            )));
        }
        for file in self
            .fusion
            .val_score_files
            .iter()
            .chain(&self.fusion.test_score_files)
        {
            if !Path::new(file).exists() {
                return Err(CliError::config(format!(
                    "score file '{file}' does not exist"
                )));
            }
        }
        for resource in [&self.cleaning.stopword_file, &self.cleaning.contraction_file] {
            if !resource.is_empty() && !Path::new(resource).exists() {
                return Err(CliError::config(format!(
                    "resource file '{resource}' does not exist"
                )));
            }
        }
        Ok(())
    }

    /// SHA-256 over the canonical TOML rendering of the resolved config.
    /// The output directory is excluded: the hash identifies the
    /// experiment, not where its artifacts land.
    pub fn hash(&self) -> String {
        let mut canonical_config = self.clone();
        canonical_config.output.dir = String::new();
        let canonical = toml::to_string(&canonical_config).unwrap_or_default();
        let digest = Sha256::digest(canonical.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// One cell of the experimental grid: a cleaning arm times a balance arm.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Arm {
    pub clean: bool,
    pub balance: BalanceKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BalanceKind {
    Imbalanced,
    Smote,
    Transpose,
}

impl Arm {
    pub const GRID: [Arm; 6] = [
        Arm {
            clean: false,
            balance: BalanceKind::Imbalanced,
        },
        Arm {
            clean: false,
            balance: BalanceKind::Smote,
        },
        Arm {
            clean: false,
            balance: BalanceKind::Transpose,
        },
        Arm {
            clean: true,
            balance: BalanceKind::Imbalanced,
        },
        Arm {
            clean: true,
            balance: BalanceKind::Smote,
        },
        Arm {
            clean: true,
            balance: BalanceKind::Transpose,
        },
    ];

    pub fn name(&self) -> String {
        let cleaning = if self.clean { "clean" } else { "unclean" };
        let balance = match self.balance {
            BalanceKind::Imbalanced => "imbalanced",
            BalanceKind::Smote => "smote",
            BalanceKind::Transpose => "transpose",
        };
        format!("{cleaning}-{balance}")
    }

    /// Projects this arm onto a base config.
    pub fn apply(&self, base: &RunConfig) -> RunConfig {
        let mut config = base.clone();
        config.cleaning.set_all(self.clean);
        config.balance.method = match self.balance {
            BalanceKind::Imbalanced => "none",
            BalanceKind::Smote => "smote",
            BalanceKind::Transpose => "transpose",
        }
        .to_string();
        config
    }

    /// The arm a config already describes.
    pub fn of(config: &RunConfig) -> Self {
        Arm {
            clean: config.cleaning.any_enabled(),
            balance: match config.balance.method.as_str() {
                "smote" => BalanceKind::Smote,
                "transpose" => BalanceKind::Transpose,
                _ => BalanceKind::Imbalanced,
            },
        }
    }
}
