//! Mapping documents: TOML files declaring how a corpus table maps onto
//! messages and annotation records.
//!
//! ```toml
//! corpus_id = "haspeede"
//! genre = "tweet"
//! id_column = "id"
//! text_column = "text"
//!
//! [[binding]]
//! scheme = "hate speech"
//! domain = "binary"
//! annotators = [
//!     { column = "hs_ann1", annotator = 1 },
//!     { column = "hs_ann2", annotator = "annotator_2" },
//! ]
//!
//! [[binding]]
//! scheme = "intensity"
//! domain = { scale = { min = 0, max = 4 } }
//! column = "intensity"
//! ```

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::Deserialize;
use thiserror::Error;

use crate::model::entities::{AnnotationScheme, AnnotatorId, Genre, ValueDomain};
use crate::model::validate::Validate;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MappingError {
    #[error("mapping syntax error at {line}:{column}: {reason}")]
    SyntaxError { line: usize, column: usize, reason: String },
    #[error("unknown value domain for scheme `{scheme}`: {found}")]
    UnknownValueDomain { scheme: String, found: String },
    #[error("column `{0}` is bound more than once")]
    DuplicateColumn(String),
    #[error("invalid mapping: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BindingMode {
    /// One column holding the aggregated (gold standard) label.
    AggregatedColumn(String),
    /// One column per individual annotator.
    PerAnnotatorColumns(Vec<(String, AnnotatorId)>),
}

impl BindingMode {
    /// (column, annotator) pairs the binding reads.
    pub fn columns(&self) -> Vec<(&str, AnnotatorId)> {
        match self {
            BindingMode::AggregatedColumn(c) => vec![(c.as_str(), AnnotatorId::GoldStandard)],
            BindingMode::PerAnnotatorColumns(cols) => cols.iter().map(|(c, a)| (c.as_str(), a.clone())).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemeBinding {
    pub scheme: Arc<AnnotationScheme>,
    pub mode: BindingMode,
}

/// Optional situation extraction: messages whose gold label for
/// `hate_scheme` is 1 become the hate speech message of a situation with the
/// author as addresser and the target column as target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SituationSpec {
    pub hate_scheme: String,
    pub author_column: Option<String>,
    pub target_column: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Delimiter {
    Comma,
    Tab,
}

impl Delimiter {
    pub fn byte(self) -> u8 {
        match self {
            Delimiter::Comma => b',',
            Delimiter::Tab => b'\t',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MappingSpec {
    pub corpus_id: String,
    pub genre: Genre,
    pub id_column: String,
    pub text_column: String,
    /// `None` sniffs the header line.
    pub delimiter: Option<Delimiter>,
    pub unannotated: bool,
    pub bindings: Vec<SchemeBinding>,
    pub situation: Option<SituationSpec>,
}

impl MappingSpec {
    /// Every column the mapping reads.
    pub fn columns(&self) -> Vec<&str> {
        let mut cols = vec![self.id_column.as_str(), self.text_column.as_str()];
        for b in &self.bindings {
            cols.extend(b.mode.columns().into_iter().map(|(c, _)| c));
        }
        if let Some(s) = &self.situation {
            cols.extend(s.author_column.as_deref());
            cols.extend(s.target_column.as_deref());
        }
        cols
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMapping {
    corpus_id: String,
    genre: String,
    id_column: String,
    text_column: String,
    delimiter: Option<String>,
    #[serde(default)]
    unannotated: bool,
    #[serde(default, rename = "binding")]
    bindings: Vec<RawBinding>,
    situation: Option<RawSituation>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBinding {
    scheme: String,
    domain: toml::Value,
    column: Option<String>,
    annotators: Option<Vec<RawAnnotator>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAnnotator {
    column: String,
    annotator: RawAnnotatorId,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawAnnotatorId {
    Number(u32),
    Name(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSituation {
    hate_scheme: String,
    author_column: Option<String>,
    target_column: Option<String>,
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let start = before.rfind('\n').map_or(0, |i| i + 1);
    (line, before[start..].chars().count() + 1)
}

fn parse_domain(scheme: &str, value: &toml::Value) -> Result<ValueDomain, MappingError> {
    let unknown = || MappingError::UnknownValueDomain {
        scheme: scheme.to_string(),
        found: value.to_string(),
    };
    match value {
        toml::Value::String(s) if s == "binary" => Ok(ValueDomain::Binary),
        toml::Value::Table(t) if t.len() == 1 => {
            if let Some(labels) = t.get("categorical") {
                let labels = labels.as_array().ok_or_else(unknown)?;
                let labels: Vec<String> = labels
                    .iter()
                    .map(|l| l.as_str().map(str::to_string).ok_or_else(unknown))
                    .collect::<Result<_, _>>()?;
                let distinct: BTreeSet<&String> = labels.iter().collect();
                if labels.is_empty() || distinct.len() != labels.len() || labels.iter().any(|l| l.is_empty()) {
                    return Err(MappingError::Invalid(format!(
                        "categorical domain of `{scheme}` needs distinct non-empty labels"
                    )));
                }
                Ok(ValueDomain::Categorical(labels))
            } else if let Some(scale) = t.get("scale") {
                let get = |k: &str| scale.get(k).and_then(toml::Value::as_integer).ok_or_else(unknown);
                let (min, max) = (get("min")?, get("max")?);
                if min > max {
                    return Err(MappingError::Invalid(format!("scale of `{scheme}` has min > max")));
                }
                Ok(ValueDomain::IntegerScale { min, max })
            } else {
                Err(unknown())
            }
        }
        _ => Err(unknown()),
    }
}

fn parse_annotator(raw: RawAnnotatorId) -> Result<AnnotatorId, MappingError> {
    let id = match raw {
        RawAnnotatorId::Number(n) => AnnotatorId::individual(n),
        RawAnnotatorId::Name(s) => s.parse().expect("infallible"),
    };
    let report = id.validate();
    if !report.is_ok() {
        return Err(MappingError::Invalid(format!("annotator id `{id}`: {report}")));
    }
    Ok(id)
}

fn non_empty(field: &str, value: &str) -> Result<(), MappingError> {
    if value.trim().is_empty() {
        Err(MappingError::Invalid(format!("`{field}` is empty")))
    } else {
        Ok(())
    }
}

/// Parses and validates a mapping document.
pub fn parse_mapping(document: &str) -> Result<MappingSpec, MappingError> {
    let raw: RawMapping = toml::from_str(document).map_err(|e| {
        let (line, column) = e.span().map_or((1, 1), |s| line_col(document, s.start));
        MappingError::SyntaxError {
            line,
            column,
            reason: e.message().to_string(),
        }
    })?;
    non_empty("corpus_id", &raw.corpus_id)?;
    non_empty("id_column", &raw.id_column)?;
    non_empty("text_column", &raw.text_column)?;
    let genre: Genre = raw.genre.parse().map_err(MappingError::Invalid)?;
    let delimiter = match raw.delimiter.as_deref() {
        None => None,
        Some("comma" | ",") => Some(Delimiter::Comma),
        Some("tab" | "\t") => Some(Delimiter::Tab),
        Some(other) => return Err(MappingError::Invalid(format!("unknown delimiter `{other}`"))),
    };

    let mut bindings = Vec::new();
    let mut seen_pairs = BTreeSet::new();
    for b in raw.bindings {
        non_empty("binding.scheme", &b.scheme)?;
        let domain = parse_domain(&b.scheme, &b.domain)?;
        let mode = match (b.column, b.annotators) {
            (Some(col), None) => BindingMode::AggregatedColumn(col),
            (None, Some(anns)) if !anns.is_empty() => BindingMode::PerAnnotatorColumns(
                anns.into_iter()
                    .map(|a| Ok((a.column, parse_annotator(a.annotator)?)))
                    .collect::<Result<_, MappingError>>()?,
            ),
            _ => {
                return Err(MappingError::Invalid(format!(
                    "binding `{}` needs exactly one of `column` or a non-empty `annotators` list",
                    b.scheme
                )))
            }
        };
        for (_, annotator) in mode.columns() {
            if !seen_pairs.insert((b.scheme.clone(), annotator.clone())) {
                return Err(MappingError::Invalid(format!(
                    "scheme `{}` is bound twice for {annotator}",
                    b.scheme
                )));
            }
        }
        bindings.push(SchemeBinding {
            scheme: Arc::new(AnnotationScheme::new(b.scheme, domain)),
            mode,
        });
    }
    if bindings.is_empty() && !raw.unannotated {
        return Err(MappingError::Invalid(
            "no scheme bindings; set `unannotated = true` for a text-only corpus".into(),
        ));
    }

    let situation = match raw.situation {
        None => None,
        Some(s) => {
            let gold_binary = bindings.iter().any(|b| {
                b.scheme.name == s.hate_scheme
                    && b.scheme.domain == ValueDomain::Binary
                    && matches!(b.mode, BindingMode::AggregatedColumn(_))
            });
            if !gold_binary {
                return Err(MappingError::Invalid(format!(
                    "situation.hate_scheme `{}` must name a binary scheme with an aggregated column",
                    s.hate_scheme
                )));
            }
            Some(SituationSpec {
                hate_scheme: s.hate_scheme,
                author_column: s.author_column,
                target_column: s.target_column,
            })
        }
    };

    let spec = MappingSpec {
        corpus_id: raw.corpus_id,
        genre,
        id_column: raw.id_column,
        text_column: raw.text_column,
        delimiter,
        unannotated: raw.unannotated,
        bindings,
        situation,
    };
    let mut seen = BTreeSet::new();
    for col in spec.columns() {
        non_empty("column", col)?;
        if !seen.insert(col) {
            return Err(MappingError::DuplicateColumn(col.to_string()));
        }
    }
    Ok(spec)
}
