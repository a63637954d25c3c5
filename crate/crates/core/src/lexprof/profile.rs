use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_rational::Ratio;
use rayon::prelude::*;
use serde_json::json;
use thiserror::Error;
use unicode_segmentation::UnicodeSegmentation;

use crate::lexprof::{Category, LexiconIndex};
use crate::model::entities::{AnnotationRecord, AnnotationValue, AnnotatorId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProfileError {
    #[error("no documents to profile")]
    EmptyDataset,
    #[error("no document has {scheme} = {value} by {annotator}")]
    EmptyClass {
        scheme: String,
        value: String,
        annotator: String,
    },
}

fn is_url(chunk: &str) -> bool {
    let lower = chunk.to_lowercase();
    let lower = lower.trim_start_matches(|c: char| !c.is_alphanumeric());
    lower.starts_with("http://") || lower.starts_with("https://") || lower.starts_with("www.")
}

/// Lowercased Unicode words. URLs are dropped, `@`/`#` markers fall away
/// with the rest of the punctuation, and words are also split at
/// apostrophes so elided articles (`l'immigrato`) separate from the noun.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for chunk in text.split_whitespace() {
        if is_url(chunk) {
            continue;
        }
        for word in chunk.unicode_words() {
            for part in word.split(['\'', '\u{2019}']) {
                if part.chars().any(char::is_alphanumeric) {
                    out.push(part.to_lowercase());
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CountMode {
    /// Every matched occurrence counts.
    #[default]
    Occurrences,
    /// A category counts at most once per document.
    Presence,
}

/// Category counts for one token sequence: greedy longest match from left to
/// right; a match adds one to each distinct category of its entries and the
/// matched tokens are not reconsidered.
pub fn category_counts(tokens: &[String], index: &LexiconIndex) -> BTreeMap<Category, u64> {
    let mut counts: BTreeMap<Category, u64> = Category::ALL.into_iter().map(|c| (c, 0)).collect();
    let mut i = 0;
    while i < tokens.len() {
        match index.longest_match(&tokens[i..]) {
            Some((len, entries)) => {
                let cats: BTreeSet<Category> = entries.iter().map(|(_, c)| *c).collect();
                for c in cats {
                    *counts.get_mut(&c).expect("all categories present") += 1;
                }
                i += len;
            }
            None => i += 1,
        }
    }
    counts
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub id: String,
    pub tokens: Vec<String>,
}

impl Document {
    pub fn new(id: impl Into<String>, text: &str) -> Self {
        Document {
            id: id.into(),
            tokens: tokenize(text),
        }
    }
}

/// Per-category means over a set of documents, kept exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CategoryProfile {
    pub documents: u64,
    /// Sum of per-document counts for each category.
    pub totals: BTreeMap<Category, u64>,
}

impl CategoryProfile {
    pub fn mean(&self, category: Category) -> Ratio<u64> {
        Ratio::new(self.totals.get(&category).copied().unwrap_or(0), self.documents)
    }

    pub fn mean_f64(&self, category: Category) -> f64 {
        let m = self.mean(category);
        *m.numer() as f64 / *m.denom() as f64
    }

    /// Mean rounded to four decimals.
    pub fn mean_4dp(&self, category: Category) -> String {
        format_4dp(self.mean(category))
    }
}

/// Decimal rendering rounded half up at the fourth digit, computed on the
/// exact ratio.
fn format_4dp(r: Ratio<u64>) -> String {
    let scaled = (u128::from(*r.numer()) * 20_000 / u128::from(*r.denom()) + 1) / 2;
    format!("{}.{:04}", scaled / 10_000, scaled % 10_000)
}

fn profile_of<'a>(docs: impl IntoParallelIterator<Item = &'a [String]>, index: &LexiconIndex, mode: CountMode) -> (u64, BTreeMap<Category, u64>) {
    docs.into_par_iter()
        .map(|tokens| {
            let mut counts = category_counts(tokens, index);
            if mode == CountMode::Presence {
                counts.values_mut().for_each(|v| *v = (*v).min(1));
            }
            (1u64, counts)
        })
        .reduce(
            || (0, Category::ALL.into_iter().map(|c| (c, 0)).collect()),
            |(n1, mut a), (n2, b)| {
                for (c, v) in b {
                    *a.entry(c).or_insert(0) += v;
                }
                (n1 + n2, a)
            },
        )
}

/// Per-category mean of per-document counts.
pub fn dataset_profile(documents: &[Document], index: &LexiconIndex, mode: CountMode) -> Result<CategoryProfile, ProfileError> {
    if documents.is_empty() {
        return Err(ProfileError::EmptyDataset);
    }
    let (n, totals) = profile_of(documents.par_iter().map(|d| d.tokens.as_slice()), index, mode);
    Ok(CategoryProfile { documents: n, totals })
}

/// Profile of the documents whose `annotator` label for `scheme` equals
/// `value`.
pub fn class_conditional_profile(
    documents: &[Document],
    records: &[AnnotationRecord],
    scheme: &str,
    value: &AnnotationValue,
    annotator: &AnnotatorId,
    index: &LexiconIndex,
    mode: CountMode,
) -> Result<CategoryProfile, ProfileError> {
    let selected: BTreeSet<&str> = records
        .iter()
        .filter(|r| r.scheme.name == scheme && &r.annotator == annotator && &r.value == value)
        .map(|r| r.message_ref.as_str())
        .collect();
    let docs: Vec<&[String]> = documents
        .iter()
        .filter(|d| selected.contains(d.id.as_str()))
        .map(|d| d.tokens.as_slice())
        .collect();
    if docs.is_empty() {
        return Err(ProfileError::EmptyClass {
            scheme: scheme.to_string(),
            value: value.to_string(),
            annotator: annotator.to_string(),
        });
    }
    let (n, totals) = profile_of(docs, index, mode);
    Ok(CategoryProfile { documents: n, totals })
}

/// Tab-separated table, one row per named profile, one column per category
/// (all 17 when `columns` is empty), four decimals.
pub fn profile_table(rows: &[(String, CategoryProfile)], columns: &[Category]) -> String {
    let columns: &[Category] = if columns.is_empty() { &Category::ALL } else { columns };
    let mut out = String::from("dataset\tdocuments");
    for c in columns {
        write!(out, "\t{c}").expect("string write");
    }
    out.push('\n');
    for (name, p) in rows {
        write!(out, "{name}\t{}", p.documents).expect("string write");
        for &c in columns {
            write!(out, "\t{}", p.mean_4dp(c)).expect("string write");
        }
        out.push('\n');
    }
    out
}

/// One JSON object per row: dataset, documents, and every category mean as a
/// 4-decimal string.
pub fn profile_jsonl(rows: &[(String, CategoryProfile)]) -> String {
    let mut out = String::new();
    for (name, p) in rows {
        let means: serde_json::Map<String, serde_json::Value> = Category::ALL
            .into_iter()
            .map(|c| (c.code().to_string(), json!(p.mean_4dp(c))))
            .collect();
        let line = json!({ "dataset": name, "documents": p.documents, "means": means });
        out.push_str(&line.to_string());
        out.push('\n');
    }
    out
}
