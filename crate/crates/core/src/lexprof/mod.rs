//! Lexicon-based offensiveness profiling: HurtLex-format lexicon loading,
//! OntoLex-style encoding, tokenization, category counts and averages.

mod profile;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use profile::{
    category_counts, class_conditional_profile, dataset_profile, profile_jsonl, profile_table, tokenize,
    CategoryProfile, CountMode, Document, ProfileError,
};

use crate::model::entities::camel_case;
use crate::model::term::{Graph, Literal, Triple};
use crate::model::vocab::Vocabulary;

/// The 17 HurtLex offense categories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Category {
    Ps,
    Rci,
    Pa,
    Ddp,
    Ddf,
    Dmc,
    Is,
    Or,
    An,
    Asm,
    Asf,
    Pr,
    Om,
    Qas,
    Cds,
    Re,
    Svp,
}

impl Category {
    pub const ALL: [Category; 17] = [
        Category::Ps,
        Category::Rci,
        Category::Pa,
        Category::Ddp,
        Category::Ddf,
        Category::Dmc,
        Category::Is,
        Category::Or,
        Category::An,
        Category::Asm,
        Category::Asf,
        Category::Pr,
        Category::Om,
        Category::Qas,
        Category::Cds,
        Category::Re,
        Category::Svp,
    ];

    pub fn code(self) -> &'static str {
        match self {
            Category::Ps => "PS",
            Category::Rci => "RCI",
            Category::Pa => "PA",
            Category::Ddp => "DDP",
            Category::Ddf => "DDF",
            Category::Dmc => "DMC",
            Category::Is => "IS",
            Category::Or => "OR",
            Category::An => "AN",
            Category::Asm => "ASM",
            Category::Asf => "ASF",
            Category::Pr => "PR",
            Category::Om => "OM",
            Category::Qas => "QAS",
            Category::Cds => "CDS",
            Category::Re => "RE",
            Category::Svp => "SVP",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Category::Ps => "Ethnic Slurs",
            Category::Rci => "Location and Demonyms",
            Category::Pa => "Profession and Occupation",
            Category::Ddp => "Physical Disabilities and Diversity",
            Category::Ddf => "Cognitive Disabilities and Diversity",
            Category::Dmc => "Moral Behavior and Defect",
            Category::Is => "Words Related to Social and Economic advantages",
            Category::Or => "Words Related to Plants",
            Category::An => "Words Related to Animals",
            Category::Asm => "Words Related to Male Genitalia",
            Category::Asf => "Words Related to Female Genitalia",
            Category::Pr => "Words Related to Prostitution",
            Category::Om => "Words Related to Homosexuality",
            Category::Qas => "Descriptive Words with Potential Negative Connotations",
            Category::Cds => "Derogatory Words",
            Category::Re => "Felonies and Words Related to Crime and Immoral Behavior",
            Category::Svp => "Words Related to the Seven Deadly Sins of the Christian Tradition",
        }
    }

    /// Short label written on the category node.
    pub fn label(self) -> &'static str {
        match self {
            Category::Ps => "ethnic slurs",
            Category::Rci => "locations and demonyms",
            Category::Pa => "professions and occupations",
            Category::Ddp => "physical disabilities and diversity",
            Category::Ddf => "cognitive disabilities and diversity",
            Category::Dmc => "moral defects",
            Category::Is => "social and economic disadvantage",
            Category::Or => "plants",
            Category::An => "animals",
            Category::Asm => "male genitalia",
            Category::Asf => "female genitalia",
            Category::Pr => "prostitution",
            Category::Om => "homosexuality",
            Category::Qas => "potential negative connotations",
            Category::Cds => "derogatory words",
            Category::Re => "crime and immoral behavior",
            Category::Svp => "seven deadly sins",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Category {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let code = s.trim().to_ascii_uppercase();
        Category::ALL
            .into_iter()
            .find(|c| c.code() == code)
            .ok_or_else(|| format!("unknown category `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Level {
    Conservative,
    Inclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LevelFilter {
    #[default]
    ConservativeOnly,
    All,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexiconEntry {
    pub id: String,
    /// Lowercased lemma; may span several words.
    pub lemma: String,
    pub pos: String,
    pub category: Category,
    pub level: Level,
}

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("row {row}: unknown category `{code}`")]
    UnknownCategory { row: usize, code: String },
    #[error("row {row}: empty lemma")]
    EmptyLemma { row: usize },
    #[error("row {row}: unknown level `{level}`")]
    UnknownLevel { row: usize, level: String },
    #[error("lexicon header lacks column `{0}`")]
    MissingColumn(&'static str),
    #[error("lexicon table: {0}")]
    Table(#[from] csv::Error),
}

/// Loads a delimiter-separated lexicon with a header naming at least the
/// columns `id`, `pos`, `category`, `level` and `lemma` (tab or comma,
/// sniffed from the header). Rows are numbered from 1 after the header.
pub fn load_lexicon(text: &str, filter: LevelFilter) -> Result<Vec<LexiconEntry>, LexiconError> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let delimiter = if text.lines().next().unwrap_or("").contains('\t') { b'\t' } else { b',' };
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .flexible(true)
        .from_reader(text.as_bytes());
    let header = reader.headers()?.clone();
    let col = |name: &'static str| {
        header
            .iter()
            .position(|h| h.trim().eq_ignore_ascii_case(name))
            .ok_or(LexiconError::MissingColumn(name))
    };
    let (id_c, pos_c, cat_c, level_c, lemma_c) = (col("id")?, col("pos")?, col("category")?, col("level")?, col("lemma")?);

    let mut entries = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let row = i + 1;
        let cell = |c: usize| record.get(c).unwrap_or("").trim();
        let code = cell(cat_c);
        let category = code.parse::<Category>().map_err(|_| LexiconError::UnknownCategory {
            row,
            code: code.to_string(),
        })?;
        let lemma = cell(lemma_c).to_lowercase();
        if tokenize(&lemma).is_empty() {
            return Err(LexiconError::EmptyLemma { row });
        }
        let level = match cell(level_c).to_ascii_lowercase().as_str() {
            "conservative" => Level::Conservative,
            "inclusive" => Level::Inclusive,
            other => {
                return Err(LexiconError::UnknownLevel {
                    row,
                    level: other.to_string(),
                })
            }
        };
        if filter == LevelFilter::ConservativeOnly && level != Level::Conservative {
            continue;
        }
        entries.push(LexiconEntry {
            id: cell(id_c).to_string(),
            lemma,
            pos: cell(pos_c).to_string(),
            category,
            level,
        });
    }
    Ok(entries)
}

/// Token-sequence index over lemmas. Every lemma is keyed by its first
/// token; single-token lemmas also sit in the unigram map.
#[derive(Debug, Clone, Default)]
pub struct LexiconIndex {
    unigrams: HashMap<String, BTreeSet<(String, Category)>>,
    /// First token -> (remaining tokens -> entries), for lemmas of two or
    /// more tokens.
    ngrams: HashMap<String, BTreeMap<Vec<String>, BTreeSet<(String, Category)>>>,
    max_len: usize,
}

impl LexiconIndex {
    pub fn build(entries: &[LexiconEntry]) -> Self {
        let mut index = LexiconIndex::default();
        for e in entries {
            let tokens = tokenize(&e.lemma);
            let Some((first, rest)) = tokens.split_first() else {
                continue;
            };
            index.max_len = index.max_len.max(tokens.len());
            let key = (e.id.clone(), e.category);
            if rest.is_empty() {
                index.unigrams.entry(first.clone()).or_default().insert(key);
            } else {
                index
                    .ngrams
                    .entry(first.clone())
                    .or_default()
                    .entry(rest.to_vec())
                    .or_default()
                    .insert(key);
            }
        }
        index
    }

    /// Longest lemma in tokens.
    pub fn max_len(&self) -> usize {
        self.max_len
    }

    /// Entries whose lemma tokenizes to exactly `tokens`.
    pub fn lookup(&self, tokens: &[String]) -> Option<&BTreeSet<(String, Category)>> {
        match tokens {
            [] => None,
            [one] => self.unigrams.get(one),
            [first, rest @ ..] => self.ngrams.get(first)?.get(rest),
        }
    }

    /// Longest match starting at `tokens[0]`: (length, entries).
    pub fn longest_match(&self, tokens: &[String]) -> Option<(usize, &BTreeSet<(String, Category)>)> {
        let first = tokens.first()?;
        if let Some(tails) = self.ngrams.get(first) {
            let limit = tokens.len().min(self.max_len);
            for len in (2..=limit).rev() {
                if let Some(hit) = tails.get(&tokens[1..len]) {
                    return Some((len, hit));
                }
            }
        }
        self.unigrams.get(first).map(|hit| (1, hit))
    }
}

fn pos_local_name(pos: &str) -> String {
    match pos.trim().to_ascii_lowercase().as_str() {
        "n" | "noun" => "Noun".into(),
        "a" | "adj" | "adjective" => "Adjective".into(),
        "v" | "verb" => "Verb".into(),
        "av" | "adv" | "adverb" => "Adverb".into(),
        other => camel_case(other),
    }
}

/// Entry typing, label, part of speech, and the description link to its
/// category node.
pub fn encode_lexicon_entry(vocab: &Vocabulary, entry: &LexiconEntry) -> Graph {
    let node = vocab.odang(&entry.id);
    let category = vocab.odang(&entry.category.code().to_ascii_lowercase());
    let mut g = Graph::new();
    g.insert(Triple::new(&node, &vocab.rdf_type, &vocab.lexical_entry));
    g.insert(Triple::new(&node, &vocab.rdfs_label, Literal::string(entry.lemma.clone())));
    if !entry.pos.is_empty() {
        g.insert(Triple::new(&node, &vocab.lexinfo_part_of_speech, vocab.odang(&pos_local_name(&entry.pos))));
    }
    g.insert(Triple::new(&node, &vocab.is_described, &category));
    g.insert(Triple::new(&category, &vocab.rdf_type, &vocab.offensive));
    g.insert(Triple::new(&category, &vocab.rdfs_label, Literal::string(entry.category.label())));
    g
}
