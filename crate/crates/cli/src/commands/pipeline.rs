//! `pipeline`: prepare -> train -> fuse -> evaluate in sequence, stopping
//! at the first failing stage. With `--grid` the six experimental arms
//! (clean/un-clean x imbalanced/SMOTE/transpose) run back to back and the
//! run ends with comparison tables over all arms.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;

use authorfuse::eval::render_table;
use authorfuse::fusion::FusionMethod;

use super::{ensure_dir, evaluate, fuse, prepare, train, write_json, write_text, Ctx};
use crate::config::{Arm, RunConfig};
use crate::CliError;

#[derive(Serialize)]
struct ArmOutcome {
    arm: String,
    /// Per-model binary/macro F1 on the test split.
    model_test_f1: BTreeMap<String, f64>,
    /// Per-fusion-method F1 on the test split.
    fusion_test_f1: BTreeMap<String, f64>,
    /// Per-fusion-method fitness (1 - accuracy) on validation.
    fusion_val_fitness: BTreeMap<String, f64>,
}

#[derive(Serialize)]
struct Summary {
    config_hash: String,
    f1_variant: String,
    threshold: f64,
    arms: Vec<ArmOutcome>,
}

pub fn run(ctx: &Ctx, grid: bool) -> Result<(), CliError> {
    ctx.config.validate(true)?;

    let plan: Vec<(String, RunConfig, PathBuf)> = if grid {
        Arm::GRID
            .iter()
            .map(|arm| {
                (
                    arm.name(),
                    arm.apply(&ctx.config),
                    ctx.out_dir().join(arm.name()),
                )
            })
            .collect()
    } else {
        vec![(
            Arm::of(&ctx.config).name(),
            ctx.config.clone(),
            ctx.out_dir(),
        )]
    };

    if ctx.dry_run {
        println!("pipeline plan:");
        for (name, _, dir) in &plan {
            println!("  arm {name}: prepare -> train -> fuse -> evaluate in {}", dir.display());
        }
        println!("dry run: nothing written");
        return Ok(());
    }

    let mut outcomes = Vec::new();
    for (name, config, dir) in &plan {
        println!("=== arm {name} ===");
        prepare::run_arm(ctx, config, name, dir)?;
        train::run_arm(ctx, config, dir)?;
        outcomes.push(fuse_and_evaluate(ctx, config, name, dir, grid)?);
    }

    if grid {
        write_summary(ctx, &outcomes)?;
    }
    Ok(())
}

/// Fuses (every method in grid mode, the configured one otherwise) and
/// evaluates each model's and each fused test score file.
fn fuse_and_evaluate(
    ctx: &Ctx,
    config: &RunConfig,
    arm_name: &str,
    dir: &Path,
    grid: bool,
) -> Result<ArmOutcome, CliError> {
    let fusion_dir = dir.join("fusion");
    let reports_dir = dir.join("reports");
    ensure_dir(&fusion_dir)?;
    ensure_dir(&reports_dir)?;

    let val_paths = fuse::trained_score_paths(config, dir, "val");
    let test_paths = fuse::trained_score_paths(config, dir, "test");
    let val_labels = dir.join("prepared").join("val.jsonl");
    let test_labels = dir.join("prepared").join("test.jsonl");
    let f1_variant = config.output.f1_variant()?;

    let methods: Vec<FusionMethod> = if grid {
        FusionMethod::ALL.to_vec()
    } else {
        vec![config.fusion.to_method()?]
    };

    let mut fusion_test_f1 = BTreeMap::new();
    let mut fusion_val_fitness = BTreeMap::new();
    for &method in &methods {
        let (outcome, matrix) = fuse::fuse_on_validation(config, method, &val_paths, &val_labels)?;
        fuse::write_outcome(ctx, config, &fusion_dir, &outcome, &matrix, &test_paths)?;
        fusion_val_fitness.insert(method.to_string(), outcome.validation_fitness);

        let fused_test = fusion_dir.join(format!("{method}_fused_test.csv"));
        let report = evaluate::evaluate_file(config, &fused_test, &test_labels)?;
        evaluate::write_report(
            config,
            &reports_dir,
            &format!("fusion_{method}"),
            &fused_test,
            &report,
        )?;
        fusion_test_f1.insert(method.to_string(), report.f1(f1_variant));
        println!(
            "[{arm_name}] fusion {method}: val fitness {:.4}, test f1 {:.4}",
            outcome.validation_fitness,
            report.f1(f1_variant)
        );
    }

    let mut model_test_f1 = BTreeMap::new();
    for model in &config.models.enabled {
        let scores = dir.join("scores").join(format!("{model}_test.csv"));
        let report = evaluate::evaluate_file(config, &scores, &test_labels)?;
        evaluate::write_report(config, &reports_dir, &format!("model_{model}"), &scores, &report)?;
        model_test_f1.insert(model.clone(), report.f1(f1_variant));
    }

    Ok(ArmOutcome {
        arm: arm_name.to_string(),
        model_test_f1,
        fusion_test_f1,
        fusion_val_fitness,
    })
}

/// Comparison tables over all arms: one for individual models, one for
/// fusion methods. Rows are models/methods, columns are arms.
fn write_summary(ctx: &Ctx, outcomes: &[ArmOutcome]) -> Result<(), CliError> {
    let reports_dir = ctx.out_dir().join("reports");
    ensure_dir(&reports_dir)?;
    let columns: Vec<String> = outcomes.iter().map(|o| o.arm.clone()).collect();

    let model_rows: Vec<(String, Vec<f64>)> = ctx
        .config
        .models
        .enabled
        .iter()
        .map(|model| {
            (
                model.clone(),
                outcomes
                    .iter()
                    .map(|o| o.model_test_f1.get(model).copied().unwrap_or(f64::NAN))
                    .collect(),
            )
        })
        .collect();
    let fusion_rows: Vec<(String, Vec<f64>)> = FusionMethod::ALL
        .iter()
        .map(|method| {
            (
                method.to_string(),
                outcomes
                    .iter()
                    .map(|o| {
                        o.fusion_test_f1
                            .get(&method.to_string())
                            .copied()
                            .unwrap_or(f64::NAN)
                    })
                    .collect(),
            )
        })
        .collect();

    let f1_name = &ctx.config.output.f1;
    let mut tables = render_table(
        &format!("Individual models (test f1_{f1_name})"),
        &columns,
        &model_rows,
    );
    tables.push('\n');
    tables.push_str(&render_table(
        &format!("Fusion methods (test f1_{f1_name})"),
        &columns,
        &fusion_rows,
    ));
    write_text(&reports_dir.join("summary_table.txt"), &tables)?;

    let summary = Summary {
        config_hash: ctx.config.hash(),
        f1_variant: f1_name.clone(),
        threshold: ctx.config.fusion.threshold,
        arms: outcomes
            .iter()
            .map(|o| ArmOutcome {
                arm: o.arm.clone(),
                model_test_f1: o.model_test_f1.clone(),
                fusion_test_f1: o.fusion_test_f1.clone(),
                fusion_val_fitness: o.fusion_val_fitness.clone(),
            })
            .collect(),
    };
    write_json(&reports_dir.join("summary.json"), &summary)?;
    println!("{tables}");
    Ok(())
}
