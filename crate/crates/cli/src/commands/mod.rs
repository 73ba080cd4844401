//! Command implementations and the helpers they share.

pub mod evaluate;
pub mod fuse;
pub mod pipeline;
pub mod prepare;
pub mod train;

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use serde::Serialize;

use authorfuse::corpus::{load_jsonl, load_pan_directory};
use authorfuse::{Corpus, Label};

use crate::config::RunConfig;
use crate::CliError;

pub struct Ctx {
    pub config: RunConfig,
    pub dry_run: bool,
    pub trace: bool,
}

impl Ctx {
    pub fn out_dir(&self) -> PathBuf {
        PathBuf::from(&self.config.output.dir)
    }
}

/// Seeds recorded next to the config hash in every manifest.
#[derive(Debug, Clone, Serialize)]
pub struct SeedRecord {
    pub split: u64,
    pub balance: u64,
    pub models: u64,
    pub fusion: u64,
}

impl SeedRecord {
    pub fn of(config: &RunConfig) -> Self {
        Self {
            split: config.corpus.seed,
            balance: config.balance.seed,
            models: config.models.seed,
            fusion: config.fusion.seed,
        }
    }
}

pub fn load_dataset(config: &RunConfig) -> Result<Corpus, CliError> {
    let path = Path::new(&config.corpus.dataset);
    let loaded = match config.corpus.format.as_str() {
        "pan" => load_pan_directory(path),
        _ => load_jsonl(path),
    };
    loaded.map_err(|e| match e {
        authorfuse::Error::Io(io) => CliError::io(format!(
            "cannot read dataset {}: {io}",
            path.display()
        )),
        other => CliError::io(other.to_string()),
    })
}

pub fn load_labels_jsonl(path: &Path) -> Result<HashMap<String, Label>, CliError> {
    let corpus = load_jsonl(path).map_err(|e| CliError::scores(e.to_string()))?;
    Ok(corpus
        .documents()
        .iter()
        .map(|d| (d.id.clone(), d.label))
        .collect())
}

pub fn ensure_dir(path: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(path)
        .map_err(|e| CliError::io(format!("cannot create {}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut rendered = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::io(format!("cannot serialize {}: {e}", path.display())))?;
    rendered.push('\n');
    std::fs::write(path, rendered)
        .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text)
        .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))
}
