//! `prepare`: split the dataset, apply the configured cleaning/balancing
//! arm to the text, and write JSONL splits plus a count manifest.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use authorfuse::augment::{transpose_balance, BalanceMethod};
use authorfuse::corpus::{split_corpus, write_jsonl};
use authorfuse::textprep::Cleaner;
use authorfuse::{Corpus, Document, Label};

use super::{ensure_dir, load_dataset, write_json, Ctx, SeedRecord};
use crate::config::{Arm, RunConfig};
use crate::CliError;

#[derive(Serialize)]
struct SplitCounts {
    total: usize,
    single: usize,
    multi: usize,
}

#[derive(Serialize)]
struct PrepareManifest {
    arm: String,
    config_hash: String,
    seeds: SeedRecord,
    cleaning_enabled: bool,
    balance_method: String,
    /// SMOTE balances TF-IDF vectors at train time, not the text here.
    balance_deferred_to_train: bool,
    counts: BTreeMap<String, SplitCounts>,
}

pub fn run(ctx: &Ctx, grid: bool) -> Result<(), CliError> {
    ctx.config.validate(true)?;
    if grid {
        for arm in Arm::GRID {
            let config = arm.apply(&ctx.config);
            let dir = ctx.out_dir().join(arm.name());
            run_arm(ctx, &config, &arm.name(), &dir)?;
        }
    } else {
        let name = Arm::of(&ctx.config).name();
        run_arm(ctx, &ctx.config, &name, &ctx.out_dir())?;
    }
    Ok(())
}

fn counts(corpus: &Corpus) -> SplitCounts {
    SplitCounts {
        total: corpus.len(),
        single: corpus.count(Label::SingleAuthor),
        multi: corpus.count(Label::MultiAuthor),
    }
}

pub(super) fn run_arm(
    ctx: &Ctx,
    config: &RunConfig,
    arm_name: &str,
    out_dir: &Path,
) -> Result<(), CliError> {
    if ctx.dry_run {
        println!(
            "[prepare] would write splits for arm {arm_name} to {}",
            out_dir.join("prepared").display()
        );
        return Ok(());
    }

    let corpus = load_dataset(config)?;
    let spec = config.split_spec()?;
    let (mut train, val, test) =
        split_corpus(&corpus, &spec).map_err(CliError::from_config_error)?;

    // Balancing applies to the training split only; transpose runs on raw
    // text before cleaning so cleaned variants derive from the synthetics.
    let balance = config.balance.to_method()?;
    if let BalanceMethod::Transpose {
        swaps_per_100_chars,
        seed,
    } = balance
    {
        train = transpose_balance(&train, swaps_per_100_chars, seed)
            .map_err(CliError::from_config_error)?;
    }

    let (train, val, test) = if config.cleaning.any_enabled() {
        let cleaner = Cleaner::new(config.cleaning.to_cleaning_config())
            .map_err(CliError::from_config_error)?;
        (
            clean_corpus(&cleaner, &train)?,
            clean_corpus(&cleaner, &val)?,
            clean_corpus(&cleaner, &test)?,
        )
    } else {
        (train, val, test)
    };

    let prepared = out_dir.join("prepared");
    ensure_dir(&prepared)?;
    for (name, split) in [("train", &train), ("val", &val), ("test", &test)] {
        write_jsonl(split, &prepared.join(format!("{name}.jsonl")))
            .map_err(|e| CliError::io(e.to_string()))?;
    }

    let manifest = PrepareManifest {
        arm: arm_name.to_string(),
        config_hash: config.hash(),
        seeds: SeedRecord::of(config),
        cleaning_enabled: config.cleaning.any_enabled(),
        balance_method: config.balance.method.clone(),
        balance_deferred_to_train: matches!(balance, BalanceMethod::Smote { .. }),
        counts: BTreeMap::from([
            ("train".to_string(), counts(&train)),
            ("val".to_string(), counts(&val)),
            ("test".to_string(), counts(&test)),
        ]),
    };
    write_json(&prepared.join("counts.json"), &manifest)?;

    println!(
        "[prepare] {arm_name}: train {} (single {} / multi {}), val {}, test {}",
        train.len(),
        train.count(Label::SingleAuthor),
        train.count(Label::MultiAuthor),
        val.len(),
        test.len()
    );
    Ok(())
}

fn clean_corpus(cleaner: &Cleaner, corpus: &Corpus) -> Result<Corpus, CliError> {
    let documents: Vec<Document> = corpus
        .documents()
        .iter()
        .map(|d| Document {
            id: d.id.clone(),
            text: cleaner.clean(&d.text),
            label: d.label,
        })
        .collect();
    Corpus::new(documents).map_err(|e| CliError::io(format!("cleaning produced an invalid corpus: {e}")))
}
