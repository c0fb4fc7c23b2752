//! Comment data model, CSV ingestion, deduplication, stratified splitting,
//! and persistence of labeled datasets.
//!
//! Input CSV schema (UTF-8, quoted fields, header required):
//! `comment_id,video_id,author,published_at,like_count,lang_hint,text`.
//! The labeled CSV appends `clean_text,compound,label`.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("csv error in {path}: {source}")]
    Csv { path: String, source: csv::Error },
    #[error("missing required column `{0}`")]
    MissingColumn(String),
    #[error("no valid rows in {path} ({skipped} skipped)")]
    NoValidRows { path: String, skipped: usize },
    #[error("split ratios must be positive and sum to 1 (got {0:?})")]
    BadRatios([f64; 3]),
    #[error("class `{label}` has only {count} members; need at least 3 to stratify")]
    ClassTooSmall { label: Sentiment, count: usize },
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
}

/// Sentiment class in the fixed report order: Negative, Neutral, Positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sentiment {
    Negative,
    Neutral,
    Positive,
}

impl Sentiment {
    pub const ALL: [Sentiment; 3] = [Sentiment::Negative, Sentiment::Neutral, Sentiment::Positive];

    pub fn index(self) -> usize {
        match self {
            Sentiment::Negative => 0,
            Sentiment::Neutral => 1,
            Sentiment::Positive => 2,
        }
    }

    pub fn from_index(i: usize) -> Option<Sentiment> {
        Sentiment::ALL.get(i).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Sentiment::Negative => "negative",
            Sentiment::Neutral => "neutral",
            Sentiment::Positive => "positive",
        }
    }
}

impl fmt::Display for Sentiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Sentiment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "negative" => Ok(Sentiment::Negative),
            "neutral" => Ok(Sentiment::Neutral),
            "positive" => Ok(Sentiment::Positive),
            other => Err(format!("unknown sentiment label `{other}`")),
        }
    }
}

/// A scraped comment as exported from the collection step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawComment {
    pub id: String,
    pub video_id: String,
    pub author: String,
    pub published_at: String,
    pub like_count: u64,
    pub lang_hint: Option<String>,
    pub text: String,
}

/// A comment after preprocessing. `tokens` is exactly the whitespace
/// tokenization of `clean_text`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CleanComment {
    pub id: String,
    pub clean_text: String,
    pub tokens: Vec<String>,
}

impl CleanComment {
    /// Builds from tokens, deriving `clean_text` so the tokenization
    /// invariant holds by construction.
    pub fn from_tokens(id: impl Into<String>, tokens: Vec<String>) -> CleanComment {
        debug_assert!(tokens.iter().all(|t| !t.chars().any(char::is_whitespace)));
        CleanComment {
            id: id.into(),
            clean_text: tokens.join(" "),
            tokens,
        }
    }
}

/// A preprocessed comment plus its lexicon-derived label and score.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledComment {
    pub clean: CleanComment,
    pub label: Sentiment,
    pub compound: f64,
}

/// One row of the labeled CSV: the raw comment side by side with the model
/// text and the scorer output.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledRecord {
    pub raw: RawComment,
    pub clean_text: String,
    pub compound: f64,
    pub label: Sentiment,
}

impl LabeledRecord {
    pub fn to_labeled_comment(&self) -> LabeledComment {
        LabeledComment {
            clean: CleanComment {
                id: self.raw.id.clone(),
                clean_text: self.clean_text.clone(),
                tokens: self
                    .clean_text
                    .split_whitespace()
                    .map(str::to_string)
                    .collect(),
            },
            label: self.label,
            compound: self.compound,
        }
    }
}

/// Result of loading a comments CSV; malformed rows are skipped, not fatal.
#[derive(Debug)]
pub struct CsvLoad {
    pub comments: Vec<RawComment>,
    pub skipped: usize,
}

/// Train/val/test partition of a labeled dataset.
#[derive(Debug, Clone)]
pub struct DatasetSplit {
    pub train: Vec<LabeledComment>,
    pub val: Vec<LabeledComment>,
    pub test: Vec<LabeledComment>,
    pub seed: u64,
    pub ratios: [f64; 3],
}

const RAW_COLUMNS: [&str; 7] = [
    "comment_id",
    "video_id",
    "author",
    "published_at",
    "like_count",
    "lang_hint",
    "text",
];

/// Loads raw comments from a CSV export. Rows with missing fields, an empty
/// id or text, an unparseable like count, or a duplicate id are skipped and
/// counted.
pub fn load_comments_csv(path: impl AsRef<Path>) -> Result<CsvLoad, CorpusError> {
    let path = path.as_ref();
    let path_str = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => CorpusError::Io {
                path: path_str.clone(),
                source: std::io::Error::new(std::io::ErrorKind::NotFound, e.to_string()),
            },
            _ => CorpusError::Csv {
                path: path_str.clone(),
                source: e,
            },
        })?;

    let headers = reader
        .headers()
        .map_err(|e| CorpusError::Csv {
            path: path_str.clone(),
            source: e,
        })?
        .clone();
    let mut col = [0usize; 7];
    for (slot, name) in col.iter_mut().zip(RAW_COLUMNS) {
        *slot = headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CorpusError::MissingColumn(name.to_string()))?;
    }

    let mut comments = Vec::new();
    let mut skipped = 0usize;
    let mut seen_ids: HashSet<String> = HashSet::new();
    for record in reader.records() {
        let record = match record {
            Ok(r) => r,
            Err(_) => {
                skipped += 1;
                continue;
            }
        };
        match parse_raw_row(&record, &col) {
            Some(c) if seen_ids.insert(c.id.clone()) => comments.push(c),
            _ => skipped += 1,
        }
    }

    if comments.is_empty() {
        return Err(CorpusError::NoValidRows {
            path: path_str,
            skipped,
        });
    }
    Ok(CsvLoad { comments, skipped })
}

fn parse_raw_row(record: &csv::StringRecord, col: &[usize; 7]) -> Option<RawComment> {
    let field = |i: usize| record.get(col[i]);
    let id = field(0)?.trim();
    let text = field(6)?;
    if id.is_empty() || text.trim().is_empty() {
        return None;
    }
    let like_count: u64 = field(4)?.trim().parse().ok()?;
    let lang = field(5)?.trim();
    Some(RawComment {
        id: id.to_string(),
        video_id: field(1)?.to_string(),
        author: field(2)?.to_string(),
        published_at: field(3)?.to_string(),
        like_count,
        lang_hint: if lang.is_empty() {
            None
        } else {
            Some(lang.to_string())
        },
        text: text.to_string(),
    })
}

fn dedup_key(text: &str) -> String {
    text.split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .to_lowercase()
}

/// Keeps the first occurrence per exact text match after whitespace collapse
/// and case folding; order is otherwise preserved.
pub fn deduplicate(comments: &[RawComment]) -> Vec<RawComment> {
    let mut seen = HashSet::new();
    comments
        .iter()
        .filter(|c| seen.insert(dedup_key(&c.text)))
        .cloned()
        .collect()
}

/// Deterministic stratified split. Per class: `floor(n * r_test)` to test,
/// `floor(n * r_val)` to val, remainder to train. Partition members keep
/// their original dataset order.
pub fn stratified_split(
    data: Vec<LabeledComment>,
    ratios: [f64; 3],
    seed: u64,
) -> Result<DatasetSplit, CorpusError> {
    let sum: f64 = ratios.iter().sum();
    if ratios.iter().any(|r| *r <= 0.0) || (sum - 1.0).abs() > 1e-9 {
        return Err(CorpusError::BadRatios(ratios));
    }
    let [_, r_val, r_test] = ratios;

    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); Sentiment::ALL.len()];
    for (i, item) in data.iter().enumerate() {
        by_class[item.label.index()].push(i);
    }

    // 0 = train, 1 = val, 2 = test
    let mut assignment = vec![0u8; data.len()];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (class_idx, indices) in by_class.iter().enumerate() {
        if indices.is_empty() {
            continue;
        }
        if indices.len() < 3 {
            return Err(CorpusError::ClassTooSmall {
                label: Sentiment::from_index(class_idx).unwrap(),
                count: indices.len(),
            });
        }
        let n = indices.len();
        let n_test = (n as f64 * r_test).floor() as usize;
        let n_val = (n as f64 * r_val).floor() as usize;
        let mut shuffled = indices.clone();
        shuffled.shuffle(&mut rng);
        for &i in shuffled.iter().take(n_test) {
            assignment[i] = 2;
        }
        for &i in shuffled.iter().skip(n_test).take(n_val) {
            assignment[i] = 1;
        }
    }

    let mut split = DatasetSplit {
        train: Vec::new(),
        val: Vec::new(),
        test: Vec::new(),
        seed,
        ratios,
    };
    for (item, &part) in data.into_iter().zip(&assignment) {
        match part {
            1 => split.val.push(item),
            2 => split.test.push(item),
            _ => split.train.push(item),
        }
    }
    Ok(split)
}

/// Writes the 10-column labeled CSV. Floats use the shortest representation
/// that round-trips, so `load(save(x))` reproduces `x` field for field.
pub fn save_labeled_csv(
    records: &[LabeledRecord],
    path: impl AsRef<Path>,
) -> Result<(), CorpusError> {
    let path = path.as_ref();
    let mut writer = csv::Writer::from_path(path).map_err(|e| CorpusError::Write {
        path: path.display().to_string(),
        source: std::io::Error::other(e.to_string()),
    })?;
    let as_write_err = |e: csv::Error| CorpusError::Write {
        path: path.display().to_string(),
        source: std::io::Error::other(e.to_string()),
    };
    let mut header: Vec<&str> = RAW_COLUMNS.to_vec();
    header.extend(["clean_text", "compound", "label"]);
    writer.write_record(&header).map_err(as_write_err)?;
    let mut buf = ryu_buffer();
    for r in records {
        writer
            .write_record([
                r.raw.id.as_str(),
                r.raw.video_id.as_str(),
                r.raw.author.as_str(),
                r.raw.published_at.as_str(),
                &r.raw.like_count.to_string(),
                r.raw.lang_hint.as_deref().unwrap_or(""),
                r.raw.text.as_str(),
                r.clean_text.as_str(),
                format_f64(&mut buf, r.compound),
                r.label.as_str(),
            ])
            .map_err(as_write_err)?;
    }
    writer.flush().map_err(|e| CorpusError::Write {
        path: path.display().to_string(),
        source: e,
    })?;
    Ok(())
}

// serde_json prints f64 with the shortest round-trip representation; reuse
// it for CSV floats so both artifact formats agree.
fn ryu_buffer() -> String {
    String::new()
}

fn format_f64(buf: &mut String, v: f64) -> &str {
    buf.clear();
    buf.push_str(&serde_json::to_string(&v).expect("finite float"));
    buf
}

/// Reads a labeled CSV written by [`save_labeled_csv`].
pub fn load_labeled_csv(path: impl AsRef<Path>) -> Result<Vec<LabeledRecord>, CorpusError> {
    let path = path.as_ref();
    let path_str = path.display().to_string();
    let mut reader = csv::Reader::from_path(path).map_err(|e| CorpusError::Io {
        path: path_str.clone(),
        source: std::io::Error::new(std::io::ErrorKind::NotFound, e.to_string()),
    })?;
    let headers = reader
        .headers()
        .map_err(|e| CorpusError::Csv {
            path: path_str.clone(),
            source: e,
        })?
        .clone();
    let mut wanted: Vec<usize> = Vec::new();
    let mut all_cols: Vec<&str> = RAW_COLUMNS.to_vec();
    all_cols.extend(["clean_text", "compound", "label"]);
    for name in &all_cols {
        wanted.push(
            headers
                .iter()
                .position(|h| h == *name)
                .ok_or_else(|| CorpusError::MissingColumn(name.to_string()))?,
        );
    }
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CorpusError::Csv {
            path: path_str.clone(),
            source: e,
        })?;
        let get = |i: usize| record.get(wanted[i]).unwrap_or("");
        let lang = get(5);
        out.push(LabeledRecord {
            raw: RawComment {
                id: get(0).to_string(),
                video_id: get(1).to_string(),
                author: get(2).to_string(),
                published_at: get(3).to_string(),
                like_count: get(4).trim().parse().unwrap_or(0),
                lang_hint: if lang.is_empty() {
                    None
                } else {
                    Some(lang.to_string())
                },
                text: get(6).to_string(),
            },
            clean_text: get(7).to_string(),
            compound: get(8).trim().parse().unwrap_or(0.0),
            label: get(9).parse().unwrap_or(Sentiment::Neutral),
        });
    }
    Ok(out)
}
