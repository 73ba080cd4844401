//! Configurable text cleaning and tokenization.
//!
//! Cleaning supports both experimental arms: the "clean" arm strips
//! usernames, URLs, emojis, and stop words and expands contractions; the
//! "un-clean" arm leaves text untouched so those characters stay available
//! as style signals. With every flag disabled, [`Cleaner::clean`] is the
//! identity function.

use std::collections::{HashMap, HashSet};
use std::path::{Path, PathBuf};
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const BUILTIN_STOPWORDS: &str = include_str!("../resources/stopwords_en.txt");
const BUILTIN_CONTRACTIONS: &str = include_str!("../resources/contractions_en.csv");

static URL_RE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)(?:https?://|www\.)\S+").unwrap());
static USERNAME_RE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"@\w+").unwrap());

/// A resource table location: the list bundled with the crate, or a file.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Resource {
    #[default]
    Builtin,
    File(PathBuf),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CleaningConfig {
    pub remove_urls: bool,
    pub remove_usernames: bool,
    pub remove_emojis: bool,
    pub remove_stopwords: bool,
    pub expand_contractions: bool,
    #[serde(default)]
    pub stopword_resource: Resource,
    #[serde(default)]
    pub contraction_resource: Resource,
}

impl CleaningConfig {
    /// All cleaning steps enabled, builtin resources.
    pub fn full() -> Self {
        Self {
            remove_urls: true,
            remove_usernames: true,
            remove_emojis: true,
            remove_stopwords: true,
            expand_contractions: true,
            ..Self::default()
        }
    }

    /// No cleaning at all (the un-clean arm).
    pub fn none() -> Self {
        Self::default()
    }

    fn any_enabled(&self) -> bool {
        self.remove_urls
            || self.remove_usernames
            || self.remove_emojis
            || self.remove_stopwords
            || self.expand_contractions
    }
}

/// Applies [`CleaningConfig`] with resource tables loaded once.
#[derive(Debug, Clone)]
pub struct Cleaner {
    config: CleaningConfig,
    stopwords: HashSet<String>,
    contractions: HashMap<String, String>,
}

impl Cleaner {
    /// Loads whichever resource tables the enabled flags require.
    pub fn new(config: CleaningConfig) -> Result<Self> {
        let stopwords = if config.remove_stopwords {
            load_stopwords(&config.stopword_resource)?
        } else {
            HashSet::new()
        };
        let contractions = if config.expand_contractions {
            load_contractions(&config.contraction_resource)?
        } else {
            HashMap::new()
        };
        Ok(Self {
            config,
            stopwords,
            contractions,
        })
    }

    pub fn config(&self) -> &CleaningConfig {
        &self.config
    }

    /// Cleans one document. Steps run in a fixed order: contraction
    /// expansion, URL removal, username removal, emoji removal, stopword
    /// removal, whitespace collapse. Expansion runs before stopword removal
    /// so expanded auxiliaries ("do", "not") get dropped when both flags are
    /// on. Removed spans are replaced by a single space.
    pub fn clean(&self, text: &str) -> String {
        if !self.config.any_enabled() {
            return text.to_string();
        }
        let mut s = text.to_string();
        if self.config.expand_contractions {
            s = self.expand_contractions(&s);
        }
        if self.config.remove_urls {
            s = URL_RE.replace_all(&s, " ").into_owned();
        }
        if self.config.remove_usernames {
            s = USERNAME_RE.replace_all(&s, " ").into_owned();
        }
        if self.config.remove_emojis {
            s = strip_emoji(&s);
        }
        if self.config.remove_stopwords {
            s = self.drop_stopwords(&s);
        }
        collapse_whitespace(&s)
    }

    fn expand_contractions(&self, text: &str) -> String {
        let mapped: Vec<&str> = text
            .split_whitespace()
            .map(|tok| {
                let key = normalize_apostrophes(&tok.to_lowercase());
                self.contractions
                    .get(&key)
                    .map(String::as_str)
                    .unwrap_or(tok)
            })
            .collect();
        mapped.join(" ")
    }

    fn drop_stopwords(&self, text: &str) -> String {
        let kept: Vec<&str> = text
            .split_whitespace()
            .filter(|tok| !self.stopwords.contains(&tok.to_lowercase()))
            .collect();
        kept.join(" ")
    }
}

/// One-shot convenience wrapper; builds a [`Cleaner`] per call.
pub fn clean_text(text: &str, config: &CleaningConfig) -> Result<String> {
    Ok(Cleaner::new(config.clone())?.clean(text))
}

/// Lowercased tokens with no whitespace and no empty entries.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TokenSequence {
    pub tokens: Vec<String>,
}

impl TokenSequence {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

/// Lowercases and splits on every character that is not a letter or digit,
/// dropping empty fragments.
pub fn tokenize(text: &str) -> TokenSequence {
    let tokens = text
        .to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect();
    TokenSequence { tokens }
}

fn normalize_apostrophes(token: &str) -> String {
    token.replace('\u{2019}', "'")
}

fn collapse_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Emoji blocks covered by `remove_emojis`: emoticons, miscellaneous
/// symbols and pictographs, transport and map symbols, supplemental
/// symbols and pictographs, and regional-indicator flags.
fn is_emoji(c: char) -> bool {
    matches!(c,
        '\u{1F600}'..='\u{1F64F}'
        | '\u{1F300}'..='\u{1F5FF}'
        | '\u{1F680}'..='\u{1F6FF}'
        | '\u{1F900}'..='\u{1F9FF}'
        | '\u{1F1E6}'..='\u{1F1FF}')
}

fn strip_emoji(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut in_emoji_run = false;
    for c in text.chars() {
        if is_emoji(c) {
            if !in_emoji_run {
                out.push(' ');
                in_emoji_run = true;
            }
        } else {
            in_emoji_run = false;
            out.push(c);
        }
    }
    out
}

fn load_stopwords(resource: &Resource) -> Result<HashSet<String>> {
    let raw = read_resource(resource, BUILTIN_STOPWORDS)?;
    Ok(raw
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.to_lowercase())
        .collect())
}

fn load_contractions(resource: &Resource) -> Result<HashMap<String, String>> {
    let raw = read_resource(resource, BUILTIN_CONTRACTIONS)?;
    let path = match resource {
        Resource::Builtin => PathBuf::from("<builtin contractions>"),
        Resource::File(p) => p.clone(),
    };
    let mut reader = csv::Reader::from_reader(raw.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| Error::BadResource {
            path: path.clone(),
            reason: e.to_string(),
        })?
        .clone();
    if headers.len() < 2 || &headers[0] != "contraction" || &headers[1] != "expansion" {
        return Err(Error::BadResource {
            path,
            reason: "expected header 'contraction,expansion'".to_string(),
        });
    }
    let mut map = HashMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::BadResource {
            path: path.clone(),
            reason: e.to_string(),
        })?;
        let key = normalize_apostrophes(&record[0].to_lowercase());
        map.insert(key, record[1].to_lowercase());
    }
    Ok(map)
}

fn read_resource(resource: &Resource, builtin: &str) -> Result<String> {
    match resource {
        Resource::Builtin => Ok(builtin.to_string()),
        Resource::File(path) => load_file(path),
    }
}

fn load_file(path: &Path) -> Result<String> {
    if !path.exists() {
        return Err(Error::MissingResource(path.to_path_buf()));
    }
    Ok(std::fs::read_to_string(path)?)
}
