//! `fuse`: assemble validation score columns, select weights with the
//! configured method, and write the weights artifact plus fused test
//! scores.

use std::path::{Path, PathBuf};

use authorfuse::fusion::{
    assemble, fuse as fuse_scores, load_score_file, optimize_weights, write_score_file,
    FusionMethod, FusionOutcome, ScoreColumn, ScoreMatrix, WeightsArtifact,
};
use authorfuse::Label;

use super::{ensure_dir, load_labels_jsonl, write_text, Ctx};
use crate::config::RunConfig;
use crate::CliError;

pub fn run(ctx: &Ctx, score_files: &[PathBuf], labels: Option<&Path>) -> Result<(), CliError> {
    ctx.config.validate(false)?;
    let config = &ctx.config;
    let out_dir = ctx.out_dir();
    let method = config.fusion.to_method()?;

    if ctx.dry_run {
        println!(
            "[fuse] would select weights with {method} and write {}",
            out_dir.join("fusion").display()
        );
        return Ok(());
    }

    // Validation columns: positional files win, then config, then the
    // trained models' validation scores.
    let val_paths: Vec<PathBuf> = if !score_files.is_empty() {
        score_files.to_vec()
    } else if !config.fusion.val_score_files.is_empty() {
        config.fusion.val_score_files.iter().map(PathBuf::from).collect()
    } else {
        trained_score_paths(config, &out_dir, "val")
    };
    let test_paths: Vec<PathBuf> = if !config.fusion.test_score_files.is_empty() {
        config.fusion.test_score_files.iter().map(PathBuf::from).collect()
    } else if score_files.is_empty() && config.fusion.val_score_files.is_empty() {
        trained_score_paths(config, &out_dir, "test")
    } else {
        Vec::new()
    };

    let labels_path = labels
        .map(Path::to_path_buf)
        .unwrap_or_else(|| out_dir.join("prepared").join("val.jsonl"));

    let (outcome, matrix) = fuse_on_validation(config, method, &val_paths, &labels_path)?;
    let fusion_dir = out_dir.join("fusion");
    ensure_dir(&fusion_dir)?;
    write_outcome(ctx, config, &fusion_dir, &outcome, &matrix, &test_paths)?;
    println!(
        "[fuse] {method}: validation fitness {:.4}",
        outcome.validation_fitness
    );
    Ok(())
}

pub(super) fn trained_score_paths(config: &RunConfig, out_dir: &Path, split: &str) -> Vec<PathBuf> {
    let scores_dir = out_dir.join("scores");
    config
        .models
        .enabled
        .iter()
        .map(|name| scores_dir.join(format!("{name}_{split}.csv")))
        .collect()
}

pub(super) fn load_columns(paths: &[PathBuf]) -> Result<Vec<ScoreColumn>, CliError> {
    paths
        .iter()
        .map(|p| load_score_file(p).map_err(|e| CliError::scores(e.to_string())))
        .collect()
}

/// Loads validation columns and labels, joins them, and runs the method.
pub(super) fn fuse_on_validation(
    config: &RunConfig,
    method: FusionMethod,
    val_paths: &[PathBuf],
    labels_path: &Path,
) -> Result<(FusionOutcome, ScoreMatrix), CliError> {
    if val_paths.is_empty() {
        return Err(CliError::scores(
            "no validation score files configured or trained".to_string(),
        ));
    }
    let columns = load_columns(val_paths)?;
    let (matrix, dropped) = assemble(&columns).map_err(|e| CliError::scores(e.to_string()))?;
    if dropped > 0 {
        eprintln!("[fuse] dropped {dropped} document(s) missing from some model");
    }
    let label_map = load_labels_jsonl(labels_path)?;
    let labels: Vec<Label> = matrix
        .doc_ids
        .iter()
        .map(|id| {
            label_map.get(id).copied().ok_or_else(|| {
                CliError::scores(format!(
                    "document '{id}' has scores but no label in {}",
                    labels_path.display()
                ))
            })
        })
        .collect::<Result<_, _>>()?;
    let outcome = optimize_weights(
        method,
        &matrix,
        &labels,
        config.fusion.threshold,
        config.fusion.seed,
    )
    .map_err(|e| CliError::scores(e.to_string()))?;
    Ok((outcome, matrix))
}

/// Writes the weights artifact, fused validation scores, fused test scores
/// (when test columns are available), and the optional optimizer trace.
pub(super) fn write_outcome(
    ctx: &Ctx,
    config: &RunConfig,
    fusion_dir: &Path,
    outcome: &FusionOutcome,
    val_matrix: &ScoreMatrix,
    test_paths: &[PathBuf],
) -> Result<(), CliError> {
    let method = outcome.method;
    let mut artifact = WeightsArtifact::new(outcome, val_matrix, config.fusion.seed)
        .map_err(|e| CliError::scores(e.to_string()))?;
    artifact.config_hash = Some(config.hash());
    super::write_json(&fusion_dir.join(format!("{method}_weights.json")), &artifact)?;

    write_score_file(
        &fusion_dir.join(format!("{method}_fused_val.csv")),
        &val_matrix.doc_ids,
        &outcome.fused_scores,
    )
    .map_err(|e| CliError::io(e.to_string()))?;

    if !test_paths.is_empty() {
        let columns = load_columns(test_paths)?;
        let (test_matrix, _) = assemble(&columns).map_err(|e| CliError::scores(e.to_string()))?;
        if test_matrix.n_models() != val_matrix.n_models() {
            return Err(CliError::scores(format!(
                "test columns ({}) do not match validation columns ({})",
                test_matrix.n_models(),
                val_matrix.n_models()
            )));
        }
        let fused = fuse_scores(&test_matrix, &outcome.weights)
            .map_err(|e| CliError::scores(e.to_string()))?;
        write_score_file(
            &fusion_dir.join(format!("{method}_fused_test.csv")),
            &test_matrix.doc_ids,
            &fused,
        )
        .map_err(|e| CliError::io(e.to_string()))?;
    }

    if ctx.trace {
        if let Some(optimizer) = &outcome.optimizer {
            write_text(
                &fusion_dir.join(format!("{method}_trace.csv")),
                &optimizer.trace_csv(),
            )?;
        }
    }
    Ok(())
}
