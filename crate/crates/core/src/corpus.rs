//! Labeled document collections: PAN-layout and JSONL loading, validation,
//! and deterministic train/validation/test splitting.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Authorship label of a document.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    #[serde(rename = "single")]
    SingleAuthor,
    #[serde(rename = "multi")]
    MultiAuthor,
    #[serde(rename = "unknown")]
    Unknown,
}

impl Label {
    pub fn is_known(self) -> bool {
        self != Label::Unknown
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub text: String,
    pub label: Label,
}

/// An immutable, validated collection of documents.
///
/// Documents are ordered lexicographically by id after load so that
/// downstream matrices are reproducible. Class counts always equal the
/// tally recomputed from the documents.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    documents: Vec<Document>,
    class_counts: BTreeMap<Label, usize>,
}

impl Corpus {
    /// Validates ids and labels, sorts by id, and tallies class counts.
    pub fn new(mut documents: Vec<Document>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(documents.len());
        for doc in &documents {
            if doc.id.is_empty() {
                return Err(Error::EmptyDocId);
            }
            if !seen.insert(doc.id.clone()) {
                return Err(Error::DuplicateDocId(doc.id.clone()));
            }
            if doc.label.is_known() && doc.text.is_empty() {
                return Err(Error::EmptyLabeledText(doc.id.clone()));
            }
        }
        documents.sort_by(|a, b| a.id.cmp(&b.id));
        let mut class_counts = BTreeMap::new();
        for doc in &documents {
            *class_counts.entry(doc.label).or_insert(0) += 1;
        }
        Ok(Self {
            documents,
            class_counts,
        })
    }

    /// Appends documents (synthetic augmentation output) without re-sorting,
    /// so originals keep their positions and synthetics follow them.
    pub(crate) fn with_appended(&self, extra: Vec<Document>) -> Result<Self> {
        let mut documents = self.documents.clone();
        documents.extend(extra);
        let mut seen = HashSet::with_capacity(documents.len());
        let mut class_counts = BTreeMap::new();
        for doc in &documents {
            if !seen.insert(doc.id.clone()) {
                return Err(Error::DuplicateDocId(doc.id.clone()));
            }
            *class_counts.entry(doc.label).or_insert(0) += 1;
        }
        Ok(Self {
            documents,
            class_counts,
        })
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn class_counts(&self) -> &BTreeMap<Label, usize> {
        &self.class_counts
    }

    pub fn count(&self, label: Label) -> usize {
        self.class_counts.get(&label).copied().unwrap_or(0)
    }

    pub fn labels(&self) -> Vec<Label> {
        self.documents.iter().map(|d| d.label).collect()
    }

    pub fn ids(&self) -> Vec<String> {
        self.documents.iter().map(|d| d.id.clone()).collect()
    }
}

/// Ratios and seed for a three-way split.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_ratio: f64,
    pub val_ratio: f64,
    pub test_ratio: f64,
    pub seed: u64,
    pub stratified: bool,
}

impl SplitSpec {
    pub fn new(train: f64, val: f64, test: f64, seed: u64, stratified: bool) -> Result<Self> {
        let spec = Self {
            train_ratio: train,
            val_ratio: val,
            test_ratio: test,
            seed,
            stratified,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let ratios = [self.train_ratio, self.val_ratio, self.test_ratio];
        let sum: f64 = ratios.iter().sum();
        if ratios.iter().any(|r| !(0.0..=1.0).contains(r)) || (sum - 1.0).abs() > 1e-9 {
            return Err(Error::BadSplitRatios(ratios));
        }
        Ok(())
    }
}

#[derive(Deserialize)]
struct TruthFile {
    authors: i64,
}

/// Loads a PAN-layout directory: `problem-<k>.txt` paired with
/// `truth-problem-<k>.json`, labeled single-author iff `authors == 1`.
pub fn load_pan_directory(dir: &Path) -> Result<Corpus> {
    let mut text_ids = HashSet::new();
    let mut truth_ids = HashSet::new();
    for entry in fs::read_dir(dir)? {
        let entry = entry?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if let Some(stem) = name.strip_suffix(".txt") {
            if stem.starts_with("problem-") {
                text_ids.insert(stem.to_string());
            }
        } else if let Some(stem) = name.strip_suffix(".json") {
            if let Some(id) = stem.strip_prefix("truth-") {
                if id.starts_with("problem-") {
                    truth_ids.insert(id.to_string());
                }
            }
        }
    }
    if let Some(orphan) = text_ids.difference(&truth_ids).min() {
        return Err(Error::MissingTruth(orphan.clone()));
    }
    if let Some(orphan) = truth_ids.difference(&text_ids).min() {
        return Err(Error::MissingText(orphan.clone()));
    }

    let mut ids: Vec<String> = text_ids.into_iter().collect();
    ids.sort();
    let documents = ids
        .par_iter()
        .map(|id| {
            let text = fs::read_to_string(dir.join(format!("{id}.txt")))?;
            let truth_path = dir.join(format!("truth-{id}.json"));
            let raw = fs::read_to_string(&truth_path)?;
            let truth: TruthFile =
                serde_json::from_str(&raw).map_err(|e| Error::BadTruthFile {
                    path: truth_path.clone(),
                    reason: e.to_string(),
                })?;
            if truth.authors < 1 {
                return Err(Error::InvalidAuthorCount {
                    id: id.clone(),
                    authors: truth.authors,
                });
            }
            let label = if truth.authors == 1 {
                Label::SingleAuthor
            } else {
                Label::MultiAuthor
            };
            Ok(Document {
                id: id.clone(),
                text,
                label,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Corpus::new(documents)
}

#[derive(Deserialize)]
struct JsonlRecord {
    id: String,
    text: String,
    #[serde(default)]
    label: Option<Label>,
}

#[derive(Serialize)]
struct JsonlRecordOut<'a> {
    id: &'a str,
    text: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    label: Option<Label>,
}

/// Loads a JSONL corpus: one object per line with `id`, `text`, and an
/// optional `label` of `"single"` or `"multi"`.
pub fn load_jsonl(path: &Path) -> Result<Corpus> {
    let file = fs::File::open(path)?;
    let reader = BufReader::new(file);
    let mut documents = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: JsonlRecord =
            serde_json::from_str(&line).map_err(|e| Error::BadJsonlLine {
                path: path.to_path_buf(),
                line: idx + 1,
                reason: e.to_string(),
            })?;
        documents.push(Document {
            id: record.id,
            text: record.text,
            label: record.label.unwrap_or(Label::Unknown),
        });
    }
    Corpus::new(documents)
}

/// Writes a corpus in the JSONL layout accepted by [`load_jsonl`].
pub fn write_jsonl(corpus: &Corpus, path: &Path) -> Result<()> {
    let mut out = std::io::BufWriter::new(fs::File::create(path)?);
    for doc in corpus.documents() {
        let record = JsonlRecordOut {
            id: &doc.id,
            text: &doc.text,
            label: doc.label.is_known().then_some(doc.label),
        };
        serde_json::to_writer(&mut out, &record)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

/// Splits into (train, validation, test) by largest-remainder assignment of
/// the ratios. Stratified splits shuffle and apportion each class
/// independently, keeping per-class proportions within one document of the
/// corpus proportions. Deterministic for a fixed seed.
pub fn split_corpus(corpus: &Corpus, spec: &SplitSpec) -> Result<(Corpus, Corpus, Corpus)> {
    spec.validate()?;
    let ratios = [spec.train_ratio, spec.val_ratio, spec.test_ratio];
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut parts: [Vec<Document>; 3] = [Vec::new(), Vec::new(), Vec::new()];

    if spec.stratified {
        if let Some(doc) = corpus.documents().iter().find(|d| !d.label.is_known()) {
            return Err(Error::UnlabeledInStratifiedSplit(doc.id.clone()));
        }
        let classes: Vec<Label> = corpus.class_counts().keys().copied().collect();
        for class in classes {
            let mut docs: Vec<Document> = corpus
                .documents()
                .iter()
                .filter(|d| d.label == class)
                .cloned()
                .collect();
            docs.shuffle(&mut rng);
            apportion(&mut parts, docs, &ratios);
        }
    } else {
        let mut docs = corpus.documents().to_vec();
        docs.shuffle(&mut rng);
        apportion(&mut parts, docs, &ratios);
    }

    let [train, val, test] = parts;
    Ok((Corpus::new(train)?, Corpus::new(val)?, Corpus::new(test)?))
}

/// Largest-remainder apportionment of `docs` across the three parts.
/// Remainder ties go to the earlier part (train before val before test).
fn apportion(parts: &mut [Vec<Document>; 3], docs: Vec<Document>, ratios: &[f64; 3]) {
    let n = docs.len();
    let quotas: Vec<f64> = ratios.iter().map(|r| r * n as f64).collect();
    let mut counts: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..3).collect();
    order.sort_by(|&a, &b| {
        let fa = quotas[a] - quotas[a].floor();
        let fb = quotas[b] - quotas[b].floor();
        fb.partial_cmp(&fa).unwrap().then(a.cmp(&b))
    });
    for i in 0..(n - assigned) {
        counts[order[i % 3]] += 1;
    }
    let mut it = docs.into_iter();
    for (part, &count) in parts.iter_mut().zip(&counts) {
        part.extend(it.by_ref().take(count));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn doc(id: &str, text: &str, label: Label) -> Document {
        Document {
            id: id.into(),
            text: text.into(),
            label,
        }
    }

    fn labeled_corpus(n_single: usize, n_multi: usize) -> Corpus {
        let mut docs = Vec::new();
        for i in 0..n_single {
            docs.push(doc(&format!("s{i:04}"), "text", Label::SingleAuthor));
        }
        for i in 0..n_multi {
            docs.push(doc(&format!("m{i:04}"), "text", Label::MultiAuthor));
        }
        Corpus::new(docs).unwrap()
    }

    #[test]
    fn counts_match_tally() {
        let c = labeled_corpus(3, 5);
        assert_eq!(c.count(Label::SingleAuthor), 3);
        assert_eq!(c.count(Label::MultiAuthor), 5);
        assert_eq!(c.len(), c.class_counts().values().sum::<usize>());
    }

    #[test]
    fn duplicate_id_rejected() {
        let docs = vec![
            doc("d1", "a", Label::SingleAuthor),
            doc("d1", "b", Label::MultiAuthor),
        ];
        assert!(matches!(
            Corpus::new(docs),
            Err(Error::DuplicateDocId(id)) if id == "d1"
        ));
    }

    #[test]
    fn pan_truth_label_mapping() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("problem-1.txt"), "one author here").unwrap();
        fs::write(dir.path().join("truth-problem-1.json"), r#"{"authors": 1}"#).unwrap();
        fs::write(dir.path().join("problem-2.txt"), "three authors here").unwrap();
        fs::write(
            dir.path().join("truth-problem-2.json"),
            r#"{"authors": 3, "structure": ["A1","A2"], "site": "x"}"#,
        )
        .unwrap();
        let corpus = load_pan_directory(dir.path()).unwrap();
        assert_eq!(corpus.documents()[0].label, Label::SingleAuthor);
        assert_eq!(corpus.documents()[1].label, Label::MultiAuthor);
    }

    #[test]
    fn pan_orphan_text_named() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("problem-7.txt"), "text").unwrap();
        assert!(matches!(
            load_pan_directory(dir.path()),
            Err(Error::MissingTruth(id)) if id == "problem-7"
        ));
    }

    #[test]
    fn pan_orphan_truth_named() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("truth-problem-7.json"), r#"{"authors": 2}"#).unwrap();
        assert!(matches!(
            load_pan_directory(dir.path()),
            Err(Error::MissingText(id)) if id == "problem-7"
        ));
    }

    #[test]
    fn pan_bad_truth_json_names_path() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("problem-1.txt"), "text").unwrap();
        fs::write(dir.path().join("truth-problem-1.json"), "not json").unwrap();
        match load_pan_directory(dir.path()) {
            Err(Error::BadTruthFile { path, .. }) => {
                assert!(path.to_string_lossy().contains("truth-problem-1.json"));
            }
            other => panic!("expected BadTruthFile, got {other:?}"),
        }
    }

    #[test]
    fn pan_author_count_below_one_rejected() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("problem-1.txt"), "text").unwrap();
        fs::write(dir.path().join("truth-problem-1.json"), r#"{"authors": 0}"#).unwrap();
        assert!(matches!(
            load_pan_directory(dir.path()),
            Err(Error::InvalidAuthorCount { authors: 0, .. })
        ));
    }

    #[test]
    fn jsonl_roundtrip_and_labels() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.jsonl");
        fs::write(
            &path,
            concat!(
                r#"{"id":"d1","text":"abc","label":"single"}"#,
                "\n",
                r#"{"id":"d2","text":"def"}"#,
                "\n"
            ),
        )
        .unwrap();
        let corpus = load_jsonl(&path).unwrap();
        assert_eq!(corpus.documents()[0].label, Label::SingleAuthor);
        assert_eq!(corpus.documents()[1].label, Label::Unknown);

        let out = dir.path().join("out.jsonl");
        write_jsonl(&corpus, &out).unwrap();
        let reloaded = load_jsonl(&out).unwrap();
        assert_eq!(corpus, reloaded);
    }

    #[test]
    fn jsonl_bad_line_carries_line_number() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.jsonl");
        fs::write(
            &path,
            concat!(
                r#"{"id":"d1","text":"a"}"#,
                "\n",
                r#"{"id":"d2","text":"b"}"#,
                "\n",
                "not json\n"
            ),
        )
        .unwrap();
        assert!(matches!(
            load_jsonl(&path),
            Err(Error::BadJsonlLine { line: 3, .. })
        ));
    }

    #[test]
    fn jsonl_duplicate_id_named() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.jsonl");
        fs::write(
            &path,
            concat!(
                r#"{"id":"d1","text":"a"}"#,
                "\n",
                r#"{"id":"d1","text":"b"}"#,
                "\n"
            ),
        )
        .unwrap();
        assert!(matches!(
            load_jsonl(&path),
            Err(Error::DuplicateDocId(id)) if id == "d1"
        ));
    }

    #[test]
    fn split_sizes_follow_largest_remainder() {
        let c = labeled_corpus(4000, 12000);
        let spec = SplitSpec::new(0.70, 0.15, 0.15, 42, true).unwrap();
        let (train, val, test) = split_corpus(&c, &spec).unwrap();
        assert_eq!(train.len(), 11_200);
        assert_eq!(val.len(), 2_400);
        assert_eq!(test.len(), 2_400);
    }

    #[test]
    fn degenerate_ratio_puts_everything_in_train() {
        let c = labeled_corpus(5, 5);
        let spec = SplitSpec::new(1.0, 0.0, 0.0, 1, false).unwrap();
        let (train, val, test) = split_corpus(&c, &spec).unwrap();
        assert_eq!(train.len(), 10);
        assert!(val.is_empty());
        assert!(test.is_empty());
    }

    #[test]
    fn split_is_deterministic_per_seed() {
        let c = labeled_corpus(30, 70);
        let spec = SplitSpec::new(0.6, 0.2, 0.2, 9, true).unwrap();
        let a = split_corpus(&c, &spec).unwrap();
        let b = split_corpus(&c, &spec).unwrap();
        assert_eq!(a.0.ids(), b.0.ids());
        assert_eq!(a.1.ids(), b.1.ids());
        assert_eq!(a.2.ids(), b.2.ids());
    }

    #[test]
    fn stratified_split_rejects_unknown_labels() {
        let docs = vec![doc("d1", "a", Label::Unknown)];
        let c = Corpus::new(docs).unwrap();
        let spec = SplitSpec::new(0.5, 0.25, 0.25, 0, true).unwrap();
        assert!(matches!(
            split_corpus(&c, &spec),
            Err(Error::UnlabeledInStratifiedSplit(_))
        ));
    }

    #[test]
    fn ratios_must_sum_to_one() {
        assert!(SplitSpec::new(0.5, 0.2, 0.2, 0, false).is_err());
    }
}
