//! `evaluate`: score one probability file against reference labels and
//! write a JSON report plus an aligned text rendering.

use std::path::Path;

use serde::Serialize;

use authorfuse::eval::{evaluate_run, MetricsReport};
use authorfuse::fusion::load_score_file;
use authorfuse::Label;

use super::{ensure_dir, load_labels_jsonl, write_json, write_text, Ctx};
use crate::config::RunConfig;
use crate::CliError;

#[derive(Serialize)]
struct EvalArtifact {
    source: String,
    threshold: f64,
    config_hash: String,
    seed: u64,
    #[serde(flatten)]
    report: MetricsReport,
}

pub fn run(ctx: &Ctx, scores: &Path, labels: &Path) -> Result<(), CliError> {
    ctx.config.validate(false)?;
    if ctx.dry_run {
        println!(
            "[evaluate] would score {} against {}",
            scores.display(),
            labels.display()
        );
        return Ok(());
    }
    let reports_dir = ctx.out_dir().join("reports");
    ensure_dir(&reports_dir)?;
    let report = evaluate_file(&ctx.config, scores, labels)?;
    let stem = scores
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "scores".to_string());
    write_report(&ctx.config, &reports_dir, &stem, scores, &report)?;
    println!(
        "[evaluate] {stem}: accuracy {:.4}, f1_binary {:.4}, f1_macro {:.4}",
        report.accuracy, report.f1_binary, report.f1_macro
    );
    Ok(())
}

/// Loads a score column, aligns it with labels, and computes the metrics.
pub(super) fn evaluate_file(
    config: &RunConfig,
    scores: &Path,
    labels: &Path,
) -> Result<MetricsReport, CliError> {
    let column = load_score_file(scores).map_err(|e| CliError::scores(e.to_string()))?;
    let label_map = load_labels_jsonl(labels)?;
    let mut aligned_scores = Vec::with_capacity(column.scores.len());
    let mut aligned_labels: Vec<Label> = Vec::with_capacity(column.scores.len());
    for (id, &score) in &column.scores {
        let label = label_map.get(id).copied().ok_or_else(|| {
            CliError::scores(format!(
                "document '{id}' has a score but no label in {}",
                labels.display()
            ))
        })?;
        aligned_scores.push(score);
        aligned_labels.push(label);
    }
    evaluate_run(&aligned_scores, &aligned_labels, config.fusion.threshold)
        .map_err(|e| CliError::scores(e.to_string()))
}

pub(super) fn write_report(
    config: &RunConfig,
    reports_dir: &Path,
    stem: &str,
    source: &Path,
    report: &MetricsReport,
) -> Result<(), CliError> {
    let artifact = EvalArtifact {
        source: source.display().to_string(),
        threshold: config.fusion.threshold,
        config_hash: config.hash(),
        seed: config.fusion.seed,
        report: report.clone(),
    };
    write_json(&reports_dir.join(format!("{stem}_report.json")), &artifact)?;
    write_text(
        &reports_dir.join(format!("{stem}_report.txt")),
        &render_report(stem, config.fusion.threshold, report),
    )
}

fn render_report(stem: &str, threshold: f64, report: &MetricsReport) -> String {
    let cm = &report.confusion;
    format!(
        "report: {stem}\n\
         threshold      {threshold}\n\
         accuracy       {:.4}\n\
         precision      {:.4}\n\
         recall         {:.4}\n\
         f1_binary      {:.4}\n\
         f1_macro       {:.4}\n\
         support        single {} / multi {}\n\
         confusion      tp {} fp {} fn {} tn {}\n",
        report.accuracy,
        report.precision,
        report.recall,
        report.f1_binary,
        report.f1_macro,
        report.support_single,
        report.support_multi,
        cm.true_pos,
        cm.false_pos,
        cm.false_neg,
        cm.true_neg
    )
}
