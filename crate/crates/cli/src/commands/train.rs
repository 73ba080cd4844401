//! `train`: fit TF-IDF on the prepared training split, balance features
//! when SMOTE is configured, fit every enabled classifier, and write model
//! files plus one score CSV per (model, split).

use std::path::Path;

use serde::Serialize;

use authorfuse::augment::{smote_balance, BalanceMethod};
use authorfuse::classifiers;
use authorfuse::corpus::load_jsonl;
use authorfuse::features::{fit_tfidf, save_model, transform_matrix};
use authorfuse::fusion::write_score_file;
use authorfuse::textprep::{tokenize, TokenSequence};
use authorfuse::Corpus;

use super::{ensure_dir, write_json, Ctx, SeedRecord};
use crate::config::RunConfig;
use crate::CliError;

#[derive(Serialize)]
struct TrainManifest {
    config_hash: String,
    seeds: SeedRecord,
    vocabulary_size: usize,
    models: Vec<String>,
    train_rows: usize,
    smote_applied: bool,
}

pub fn run(ctx: &Ctx) -> Result<(), CliError> {
    ctx.config.validate(false)?;
    run_arm(ctx, &ctx.config, &ctx.out_dir())
}

fn load_split(dir: &Path, name: &str) -> Result<Corpus, CliError> {
    let path = dir.join(format!("{name}.jsonl"));
    load_jsonl(&path).map_err(|e| CliError::io(format!("cannot load prepared split: {e}")))
}

fn tokenized(corpus: &Corpus) -> Vec<(String, TokenSequence)> {
    corpus
        .documents()
        .iter()
        .map(|d| (d.id.clone(), tokenize(&d.text)))
        .collect()
}

pub(super) fn run_arm(ctx: &Ctx, config: &RunConfig, out_dir: &Path) -> Result<(), CliError> {
    if ctx.dry_run {
        println!(
            "[train] would fit {} model(s) into {}",
            config.models.enabled.len(),
            out_dir.join("models").display()
        );
        return Ok(());
    }

    let prepared = out_dir.join("prepared");
    let train_corpus = load_split(&prepared, "train")?;
    let val_corpus = load_split(&prepared, "val")?;
    let test_corpus = load_split(&prepared, "test")?;

    let train_docs = tokenized(&train_corpus);
    let tfidf = fit_tfidf(
        &train_docs.iter().map(|(_, t)| t.clone()).collect::<Vec<_>>(),
        &config.features.to_tfidf_config(),
    )
    .map_err(|e| CliError::train(format!("tfidf: {e}")))?;

    let models_dir = out_dir.join("models");
    let scores_dir = out_dir.join("scores");
    ensure_dir(&models_dir)?;
    ensure_dir(&scores_dir)?;
    save_model(&tfidf, &models_dir.join("tfidf.json"))
        .map_err(|e| CliError::io(e.to_string()))?;

    let mut train_features = transform_matrix(&tfidf, &train_docs);
    let mut train_labels = train_corpus.labels();
    let val_features = transform_matrix(&tfidf, &tokenized(&val_corpus));
    let test_features = transform_matrix(&tfidf, &tokenized(&test_corpus));

    let mut smote_applied = false;
    if let BalanceMethod::Smote { k_neighbors, seed } = config.balance.to_method()? {
        let (balanced, labels) = smote_balance(&train_features, &train_labels, k_neighbors, seed)
            .map_err(|e| CliError::train(format!("smote: {e}")))?;
        train_features = balanced;
        train_labels = labels;
        smote_applied = true;
    }

    let specs = config.models.specs()?;
    for spec in &specs {
        let name = spec.name();
        let clf = classifiers::fit(spec, &train_features, &train_labels)
            .map_err(|e| CliError::train(format!("{name}: {e}")))?;
        clf.save(&models_dir.join(format!("{name}.json")))
            .map_err(|e| CliError::io(e.to_string()))?;
        for (split, features) in [
            ("train", &train_features),
            ("val", &val_features),
            ("test", &test_features),
        ] {
            let p_multi = clf
                .predict_proba(features)
                .map_err(|e| CliError::train(format!("{name}: {e}")))?;
            write_score_file(
                &scores_dir.join(format!("{name}_{split}.csv")),
                &features.doc_ids,
                &p_multi,
            )
            .map_err(|e| CliError::io(e.to_string()))?;
        }
        println!("[train] fitted {name}");
    }

    let manifest = TrainManifest {
        config_hash: config.hash(),
        seeds: SeedRecord::of(config),
        vocabulary_size: tfidf.vocabulary.len(),
        models: specs.iter().map(|s| s.name().to_string()).collect(),
        train_rows: train_features.n_rows(),
        smote_applied,
    };
    write_json(&models_dir.join("manifest.json"), &manifest)?;
    Ok(())
}
