//! Batch pipeline for single- vs multi-author classification experiments:
//! prepare -> train -> fuse -> evaluate, plus a one-shot `pipeline` command
//! that can expand the full clean/un-clean x balance grid.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::RunConfig;

/// A failure with the exit code the stage contract assigns to it:
/// 2 invalid configuration, 3 I/O, 4 training, 5 score validation.
#[derive(Debug)]
pub struct CliError {
    pub exit_code: u8,
    pub message: String,
}

impl CliError {
    pub fn config(message: String) -> Self {
        Self {
            exit_code: 2,
            message,
        }
    }

    pub fn io(message: String) -> Self {
        Self {
            exit_code: 3,
            message,
        }
    }

    pub fn train(message: String) -> Self {
        Self {
            exit_code: 4,
            message,
        }
    }

    pub fn scores(message: String) -> Self {
        Self {
            exit_code: 5,
            message,
        }
    }

    pub fn from_config_error(e: authorfuse::Error) -> Self {
        Self::config(e.to_string())
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "authorfuse",
    version,
    about = "Single- vs multi-author document classification with merit-based late fusion"
)]
struct Cli {
    #[command(flatten)]
    overrides: Overrides,

    #[command(subcommand)]
    command: Command,
}

/// Every config option is mirrored here; a flag set on the command line
/// wins over the config file.
#[derive(Args, Debug, Default)]
struct Overrides {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed: overrides the split, balance, model, and fusion seeds.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory for all artifacts.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Decision threshold on the fused multi-author probability.
    #[arg(long, global = true)]
    threshold: Option<f64>,
    /// Which F1 the comparison tables show.
    #[arg(long, global = true, value_parser = ["binary", "macro"])]
    f1: Option<String>,
    /// Print the planned stages and write nothing.
    #[arg(long, global = true)]
    dry_run: bool,
    /// Also write per-iteration optimizer traces next to the weights.
    #[arg(long, global = true)]
    trace: bool,

    /// Dataset path (PAN directory or JSONL file).
    #[arg(long, global = true)]
    dataset: Option<PathBuf>,
    /// Dataset layout.
    #[arg(long, global = true, value_parser = ["pan", "jsonl"])]
    format: Option<String>,
    #[arg(long, global = true)]
    train_ratio: Option<f64>,
    #[arg(long, global = true)]
    val_ratio: Option<f64>,
    #[arg(long, global = true)]
    test_ratio: Option<f64>,
    #[arg(long, global = true)]
    stratified: Option<bool>,
    /// Seed for the train/val/test split only.
    #[arg(long, global = true)]
    split_seed: Option<u64>,

    /// Enable or disable all five cleaning steps at once.
    #[arg(long, global = true)]
    clean: Option<bool>,
    #[arg(long, global = true)]
    remove_urls: Option<bool>,
    #[arg(long, global = true)]
    remove_usernames: Option<bool>,
    #[arg(long, global = true)]
    remove_emojis: Option<bool>,
    #[arg(long, global = true)]
    remove_stopwords: Option<bool>,
    #[arg(long, global = true)]
    expand_contractions: Option<bool>,
    #[arg(long, global = true)]
    stopword_file: Option<PathBuf>,
    #[arg(long, global = true)]
    contraction_file: Option<PathBuf>,

    /// Training-split balancing method.
    #[arg(long, global = true, value_parser = ["none", "smote", "transpose"])]
    balance: Option<String>,
    #[arg(long, global = true)]
    k_neighbors: Option<usize>,
    #[arg(long, global = true)]
    swaps_per_100_chars: Option<f64>,
    #[arg(long, global = true)]
    balance_seed: Option<u64>,

    #[arg(long, global = true)]
    min_df: Option<usize>,
    /// 0 means unbounded.
    #[arg(long, global = true)]
    max_features: Option<usize>,
    #[arg(long, global = true)]
    l2_normalize: Option<bool>,

    /// Comma-separated model list.
    #[arg(long, global = true, value_delimiter = ',')]
    models: Option<Vec<String>>,
    #[arg(long, global = true)]
    nb_alpha: Option<f64>,
    #[arg(long, global = true)]
    lr_learning_rate: Option<f64>,
    #[arg(long, global = true)]
    lr_epochs: Option<usize>,
    #[arg(long, global = true)]
    lr_l2_lambda: Option<f64>,
    #[arg(long, global = true)]
    knn_k: Option<usize>,
    #[arg(long, global = true, value_parser = ["cosine", "euclidean"])]
    knn_metric: Option<String>,
    #[arg(long, global = true)]
    dt_max_depth: Option<usize>,
    #[arg(long, global = true)]
    dt_min_samples_leaf: Option<usize>,
    #[arg(long, global = true)]
    rf_n_trees: Option<usize>,
    #[arg(long, global = true)]
    rf_max_depth: Option<usize>,
    /// 0 means automatic (sqrt of the vocabulary size over its size).
    #[arg(long, global = true)]
    rf_feature_fraction: Option<f64>,
    #[arg(long, global = true)]
    model_seed: Option<u64>,

    #[arg(long, global = true, value_parser = ["average", "pso", "nelder-mead", "powell"])]
    fusion_method: Option<String>,
    /// External validation score files joining the fusion pool.
    #[arg(long, global = true, value_delimiter = ',')]
    val_scores: Option<Vec<String>>,
    /// External test score files, aligned with --val-scores by position.
    #[arg(long, global = true, value_delimiter = ',')]
    test_scores: Option<Vec<String>>,
    #[arg(long, global = true)]
    fusion_seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write cleaned/balanced corpus splits and a count manifest.
    Prepare {
        /// Prepare all six clean/un-clean x balance arms.
        #[arg(long)]
        grid: bool,
    },
    /// Fit TF-IDF and the configured classifiers; write models and
    /// per-split score files.
    Train,
    /// Select fusion weights on validation scores and write the weights
    /// artifact plus fused test scores.
    Fuse {
        /// Validation score files (defaults to the trained models' files).
        #[arg(value_name = "VAL_SCORE_FILE")]
        score_files: Vec<PathBuf>,
        /// JSONL corpus carrying the validation labels.
        #[arg(long)]
        labels: Option<PathBuf>,
    },
    /// Score one probability file against labels and write reports.
    Evaluate {
        #[arg(long)]
        scores: PathBuf,
        /// JSONL corpus carrying the reference labels.
        #[arg(long)]
        labels: PathBuf,
    },
    /// Run prepare -> train -> fuse -> evaluate in sequence.
    Pipeline {
        /// Expand the six-arm grid and write comparison tables.
        #[arg(long)]
        grid: bool,
    },
}

fn resolve_config(overrides: &Overrides) -> Result<RunConfig, CliError> {
    let mut config = match &overrides.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };

    macro_rules! set {
        ($field:expr, $value:expr) => {
            if let Some(v) = &$value {
                $field = v.clone();
            }
        };
    }

    if let Some(dataset) = &overrides.dataset {
        config.corpus.dataset = dataset.to_string_lossy().into_owned();
    }
    set!(config.corpus.format, overrides.format);
    set!(config.corpus.train_ratio, overrides.train_ratio);
    set!(config.corpus.val_ratio, overrides.val_ratio);
    set!(config.corpus.test_ratio, overrides.test_ratio);
    set!(config.corpus.stratified, overrides.stratified);
    set!(config.corpus.seed, overrides.split_seed);

    if let Some(all) = overrides.clean {
        config.cleaning.set_all(all);
    }
    set!(config.cleaning.remove_urls, overrides.remove_urls);
    set!(config.cleaning.remove_usernames, overrides.remove_usernames);
    set!(config.cleaning.remove_emojis, overrides.remove_emojis);
    set!(config.cleaning.remove_stopwords, overrides.remove_stopwords);
    set!(
        config.cleaning.expand_contractions,
        overrides.expand_contractions
    );
    if let Some(path) = &overrides.stopword_file {
        config.cleaning.stopword_file = path.to_string_lossy().into_owned();
    }
    if let Some(path) = &overrides.contraction_file {
        config.cleaning.contraction_file = path.to_string_lossy().into_owned();
    }

    set!(config.balance.method, overrides.balance);
    set!(config.balance.k_neighbors, overrides.k_neighbors);
    set!(
        config.balance.swaps_per_100_chars,
        overrides.swaps_per_100_chars
    );
    set!(config.balance.seed, overrides.balance_seed);

    set!(config.features.min_df, overrides.min_df);
    set!(config.features.max_features, overrides.max_features);
    set!(config.features.l2_normalize, overrides.l2_normalize);

    set!(config.models.enabled, overrides.models);
    set!(config.models.nb_alpha, overrides.nb_alpha);
    set!(config.models.lr_learning_rate, overrides.lr_learning_rate);
    set!(config.models.lr_epochs, overrides.lr_epochs);
    set!(config.models.lr_l2_lambda, overrides.lr_l2_lambda);
    set!(config.models.knn_k, overrides.knn_k);
    set!(config.models.knn_metric, overrides.knn_metric);
    set!(config.models.dt_max_depth, overrides.dt_max_depth);
    set!(
        config.models.dt_min_samples_leaf,
        overrides.dt_min_samples_leaf
    );
    set!(config.models.rf_n_trees, overrides.rf_n_trees);
    set!(config.models.rf_max_depth, overrides.rf_max_depth);
    set!(
        config.models.rf_feature_fraction,
        overrides.rf_feature_fraction
    );
    set!(config.models.seed, overrides.model_seed);

    set!(config.fusion.method, overrides.fusion_method);
    set!(config.fusion.threshold, overrides.threshold);
    set!(config.fusion.val_score_files, overrides.val_scores);
    set!(config.fusion.test_score_files, overrides.test_scores);
    set!(config.fusion.seed, overrides.fusion_seed);

    if let Some(dir) = &overrides.out_dir {
        config.output.dir = dir.to_string_lossy().into_owned();
    }
    set!(config.output.f1, overrides.f1);

    // The master seed wins over everything, including the per-stage flags.
    if let Some(master) = overrides.seed {
        config.corpus.seed = master;
        config.balance.seed = master;
        config.models.seed = master;
        config.fusion.seed = master;
    }

    Ok(config)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let config = resolve_config(&cli.overrides)?;
    let ctx = commands::Ctx {
        config,
        dry_run: cli.overrides.dry_run,
        trace: cli.overrides.trace,
    };
    match cli.command {
        Command::Prepare { grid } => commands::prepare::run(&ctx, grid),
        Command::Train => commands::train::run(&ctx),
        Command::Fuse {
            score_files,
            labels,
        } => commands::fuse::run(&ctx, &score_files, labels.as_deref()),
        Command::Evaluate { scores, labels } => commands::evaluate::run(&ctx, &scores, &labels),
        Command::Pipeline { grid } => commands::pipeline::run(&ctx, grid),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.exit_code)
        }
    }
}
