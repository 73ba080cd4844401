//! Classification metrics with the multi-author class as positive:
//! accuracy, precision, recall, and both binary and macro F1. Degenerate
//! 0/0 ratios are defined as 0.

use serde::{Deserialize, Serialize};

use crate::corpus::Label;
use crate::error::{Error, Result};
use crate::fusion::threshold_predictions;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub true_pos: usize,
    pub false_pos: usize,
    pub false_neg: usize,
    pub true_neg: usize,
}

impl ConfusionMatrix {
    pub fn total(&self) -> usize {
        self.true_pos + self.false_pos + self.false_neg + self.true_neg
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1_binary: f64,
    pub f1_macro: f64,
    /// Actual documents per class: (single, multi).
    pub support_single: usize,
    pub support_multi: usize,
    pub confusion: ConfusionMatrix,
}

/// Which F1 variant a report table shows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum F1Variant {
    Binary,
    Macro,
}

impl MetricsReport {
    pub fn f1(&self, variant: F1Variant) -> f64 {
        match variant {
            F1Variant::Binary => self.f1_binary,
            F1Variant::Macro => self.f1_macro,
        }
    }
}

/// Exact confusion counts; rejects misaligned inputs and Unknown labels.
pub fn confusion(predictions: &[Label], labels: &[Label]) -> Result<ConfusionMatrix> {
    if predictions.len() != labels.len() {
        return Err(Error::EvalMismatch {
            predictions: predictions.len(),
            labels: labels.len(),
        });
    }
    if predictions.is_empty() {
        return Err(Error::EmptyEvaluation);
    }
    let mut cm = ConfusionMatrix {
        true_pos: 0,
        false_pos: 0,
        false_neg: 0,
        true_neg: 0,
    };
    for (idx, (&pred, &label)) in predictions.iter().zip(labels).enumerate() {
        if !pred.is_known() || !label.is_known() {
            return Err(Error::UnknownLabelInEval(idx));
        }
        match (pred, label) {
            (Label::MultiAuthor, Label::MultiAuthor) => cm.true_pos += 1,
            (Label::MultiAuthor, Label::SingleAuthor) => cm.false_pos += 1,
            (Label::SingleAuthor, Label::MultiAuthor) => cm.false_neg += 1,
            (Label::SingleAuthor, Label::SingleAuthor) => cm.true_neg += 1,
            _ => unreachable!("unknown labels rejected above"),
        }
    }
    Ok(cm)
}

fn ratio(numerator: usize, denominator: usize) -> f64 {
    if denominator == 0 {
        0.0
    } else {
        numerator as f64 / denominator as f64
    }
}

fn f1_from(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

/// Derives the metric report from confusion counts.
pub fn metrics(cm: &ConfusionMatrix) -> MetricsReport {
    let precision = ratio(cm.true_pos, cm.true_pos + cm.false_pos);
    let recall = ratio(cm.true_pos, cm.true_pos + cm.false_neg);
    let f1_binary = f1_from(precision, recall);

    // Negative-class F1 mirrors the positive computation.
    let precision_neg = ratio(cm.true_neg, cm.true_neg + cm.false_neg);
    let recall_neg = ratio(cm.true_neg, cm.true_neg + cm.false_pos);
    let f1_neg = f1_from(precision_neg, recall_neg);

    MetricsReport {
        accuracy: ratio(cm.true_pos + cm.true_neg, cm.total()),
        precision,
        recall,
        f1_binary,
        f1_macro: 0.5 * (f1_binary + f1_neg),
        support_single: cm.true_neg + cm.false_pos,
        support_multi: cm.true_pos + cm.false_neg,
        confusion: *cm,
    }
}

/// Thresholds scores, counts the confusion matrix, and derives metrics.
pub fn evaluate_run(scores: &[f64], labels: &[Label], threshold: f64) -> Result<MetricsReport> {
    let predictions = threshold_predictions(scores, threshold);
    Ok(metrics(&confusion(&predictions, labels)?))
}

/// Renders an aligned plain-text table: rows are models or fusion methods,
/// columns are data variants, cells are metric values at 4 decimals.
pub fn render_table(title: &str, columns: &[String], rows: &[(String, Vec<f64>)]) -> String {
    let name_width = rows
        .iter()
        .map(|(name, _)| name.len())
        .chain(std::iter::once("Model".len()))
        .max()
        .unwrap_or(5);
    let col_width = columns
        .iter()
        .map(|c| c.len())
        .chain(std::iter::once(6))
        .max()
        .unwrap_or(6);

    let mut out = String::new();
    out.push_str(title);
    out.push('\n');
    out.push_str(&format!("{:<name_width$}", "Model"));
    for column in columns {
        out.push_str(&format!("  {column:>col_width$}"));
    }
    out.push('\n');
    out.push_str(&"-".repeat(name_width + columns.len() * (col_width + 2)));
    out.push('\n');
    for (name, values) in rows {
        out.push_str(&format!("{name:<name_width$}"));
        for value in values {
            out.push_str(&format!("  {:>col_width$}", format!("{value:.4}")));
        }
        out.push('\n');
    }
    out
}
