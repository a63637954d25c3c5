//! Corpus ingestion: CSV/TSV tables plus a mapping document become messages,
//! annotation records and (optionally) situations.

mod mapping;

use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

pub use mapping::{
    parse_mapping, BindingMode, Delimiter, MappingError, MappingSpec, SchemeBinding, SituationSpec,
};

use crate::model::encode::{encode_message, encode_situation, EncodeError};
use crate::model::entities::{
    AnnotationRecord, AnnotationValue, AnnotatorId, Message, Participant, ParticipantEntity, Person, Role,
    Situation,
};
use crate::model::term::{Graph, Term};
use crate::model::validate::Validate;
use crate::model::vocab::Vocabulary;
use crate::store::{query, Conjunct, Pattern, PatternTerm, TripleStore};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("column `{0}` named in the mapping is missing from the header")]
    ColumnMissing(String),
    #[error("corpus table: {0}")]
    Table(#[from] csv::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RowViolation {
    /// 1-based data row number (the header is not counted).
    pub row: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct IngestReport {
    pub rows_read: usize,
    pub messages_emitted: usize,
    pub records_emitted: usize,
    pub situations_emitted: usize,
    pub violations: Vec<RowViolation>,
}

#[derive(Debug, Clone, Default)]
pub struct IngestOutput {
    pub messages: Vec<Message>,
    pub records: Vec<AnnotationRecord>,
    pub situations: Vec<Situation>,
    pub report: IngestReport,
}

impl IngestOutput {
    /// Encodes every message with its records plus the situations.
    pub fn to_graph(&self, vocab: &Vocabulary) -> Result<Graph, EncodeError> {
        let mut by_message: BTreeMap<&str, Vec<AnnotationRecord>> = BTreeMap::new();
        for r in &self.records {
            by_message.entry(&r.message_ref).or_default().push(r.clone());
        }
        let mut g = Graph::new();
        for m in &self.messages {
            let records = by_message.remove(m.id.as_str()).unwrap_or_default();
            g.extend(encode_message(vocab, m, &records)?);
        }
        if let Some((&message, _)) = by_message.iter().next() {
            return Err(EncodeError::DanglingRecord {
                message: String::new(),
                record_message: message.to_string(),
            });
        }
        for s in &self.situations {
            g.extend(encode_situation(vocab, s)?);
        }
        Ok(g)
    }
}

struct Columns {
    id: usize,
    text: usize,
    /// Per binding, (column index, annotator).
    bindings: Vec<Vec<(usize, AnnotatorId)>>,
    author: Option<usize>,
    target: Option<usize>,
}

struct RowOutput {
    message: Message,
    records: Vec<AnnotationRecord>,
    situation: Option<Situation>,
}

fn sniff(text: &str) -> Delimiter {
    let header = text.lines().next().unwrap_or("");
    if header.contains('\t') {
        Delimiter::Tab
    } else {
        Delimiter::Comma
    }
}

fn resolve_columns(header: &csv::StringRecord, spec: &MappingSpec) -> Result<Columns, IngestError> {
    let index: BTreeMap<&str, usize> = header.iter().enumerate().map(|(i, h)| (h.trim(), i)).collect();
    let find = |name: &str| index.get(name).copied().ok_or_else(|| IngestError::ColumnMissing(name.to_string()));
    let bindings = spec
        .bindings
        .iter()
        .map(|b| {
            b.mode
                .columns()
                .into_iter()
                .map(|(c, a)| Ok((find(c)?, a)))
                .collect::<Result<Vec<_>, IngestError>>()
        })
        .collect::<Result<_, _>>()?;
    let situation = spec.situation.as_ref();
    Ok(Columns {
        id: find(&spec.id_column)?,
        text: find(&spec.text_column)?,
        bindings,
        author: situation.and_then(|s| s.author_column.as_deref()).map(find).transpose()?,
        target: situation.and_then(|s| s.target_column.as_deref()).map(find).transpose()?,
    })
}

fn agent(value: &str) -> Person {
    let mut p = Person::new(value);
    if value.starts_with('@') {
        p.handle = Some(value.to_string());
    }
    p
}

fn process_row(
    spec: &MappingSpec,
    cols: &Columns,
    vocab: &Vocabulary,
    row: &csv::StringRecord,
) -> Result<RowOutput, String> {
    let cell = |i: usize| row.get(i).unwrap_or("").trim();
    let raw_id = cell(cols.id);
    if raw_id.is_empty() {
        return Err(format!("empty id in column `{}`", spec.id_column));
    }
    let text = row.get(cols.text).unwrap_or("");
    if text.trim().is_empty() {
        return Err(format!("empty text in column `{}`", spec.text_column));
    }
    let message = Message::new(format!("{}_{raw_id}", spec.corpus_id), text, spec.genre, spec.corpus_id.clone());
    let report = message.validate();
    if !report.is_ok() {
        return Err(report.to_string());
    }

    let mut records = Vec::new();
    for (binding, columns) in spec.bindings.iter().zip(&cols.bindings) {
        for (col, annotator) in columns {
            let raw = cell(*col);
            if raw.is_empty() {
                continue;
            }
            let value = binding.scheme.parse_value(raw).ok_or_else(|| {
                format!("value `{raw}` outside the domain of scheme `{}`", binding.scheme.name)
            })?;
            records.push(AnnotationRecord {
                message_ref: message.id.clone(),
                scheme: binding.scheme.clone(),
                value,
                annotator: annotator.clone(),
            });
        }
    }

    let situation = match &spec.situation {
        Some(s) => {
            let hateful = records.iter().any(|r| {
                r.scheme.name == s.hate_scheme
                    && r.annotator == AnnotatorId::GoldStandard
                    && r.value == AnnotationValue::Int(1)
            });
            if hateful {
                Some(build_situation(vocab, &message, cols.author.map(cell), cols.target.map(cell))?)
            } else {
                None
            }
        }
        None => None,
    };
    Ok(RowOutput {
        message,
        records,
        situation,
    })
}

fn build_situation(
    vocab: &Vocabulary,
    message: &Message,
    author: Option<&str>,
    target: Option<&str>,
) -> Result<Situation, String> {
    let mut participants = Vec::new();
    let target = target.filter(|t| !t.is_empty()).map(|t| {
        if t.starts_with('@') {
            ParticipantEntity::Person(agent(t))
        } else {
            ParticipantEntity::Group(vocab.odang(t))
        }
    });
    participants.push(Participant {
        entity: ParticipantEntity::Message(message.clone()),
        role: Role::HateSpeechMessage,
        target: target.as_ref().map(|t| t.key().to_string()),
    });
    if let Some(a) = author.filter(|a| !a.is_empty()) {
        participants.push(Participant {
            entity: ParticipantEntity::Person(agent(a)),
            role: Role::Addresser,
            target: None,
        });
    }
    if let Some(t) = target {
        participants.push(Participant {
            entity: t,
            role: Role::Target,
            target: None,
        });
    }
    let situation = Situation {
        id: format!("situation_{}", message.id),
        participants,
    };
    let report = situation.validate();
    if report.is_ok() {
        Ok(situation)
    } else {
        Err(report.to_string())
    }
}

/// Reads a corpus table and applies the mapping. A row with any violation is
/// skipped entirely and reported; a missing mapped column aborts before
/// anything is emitted.
pub fn ingest_corpus<R: Read>(mut input: R, spec: &MappingSpec, vocab: &Vocabulary) -> Result<IngestOutput, IngestError> {
    let mut text = String::new();
    input
        .read_to_string(&mut text)
        .map_err(|e| IngestError::Table(csv::Error::from(e)))?;
    let text = text.strip_prefix('\u{feff}').unwrap_or(&text);
    let delimiter = spec.delimiter.unwrap_or_else(|| sniff(text));
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter.byte())
        .flexible(true)
        .from_reader(text.as_bytes());
    let header = reader.headers()?.clone();
    let cols = resolve_columns(&header, spec)?;
    let rows: Vec<csv::StringRecord> = reader.records().collect::<Result<_, _>>()?;

    let results: Vec<Result<RowOutput, String>> =
        rows.par_iter().map(|row| process_row(spec, &cols, vocab, row)).collect();

    let mut out = IngestOutput::default();
    out.report.rows_read = rows.len();
    let mut seen = BTreeSet::new();
    for (i, result) in results.into_iter().enumerate() {
        let row = i + 1;
        match result {
            Ok(r) if !seen.insert(r.message.id.clone()) => out.report.violations.push(RowViolation {
                row,
                reason: format!("duplicate id `{}`", r.message.id),
            }),
            Ok(r) => {
                out.report.messages_emitted += 1;
                out.report.records_emitted += r.records.len();
                out.messages.push(r.message);
                out.records.extend(r.records);
                if let Some(s) = r.situation {
                    out.report.situations_emitted += 1;
                    out.situations.push(s);
                }
            }
            Err(reason) => out.report.violations.push(RowViolation { row, reason }),
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct KgStats {
    pub triples: usize,
    pub messages: usize,
    pub users: usize,
    pub records: usize,
}

fn count_typed(store: &TripleStore, vocab: &Vocabulary, class: &crate::model::term::Iri) -> usize {
    let pattern = Pattern::new(vec![Conjunct::new(
        PatternTerm::var("x"),
        vocab.rdf_type.clone(),
        Term::Iri(class.clone()),
    )]);
    query(store, &pattern).expect("fixed pattern is valid").len()
}

/// Triple count plus the number of nodes typed as Expression, Person and
/// Annotation.
pub fn kg_stats(store: &TripleStore, vocab: &Vocabulary) -> KgStats {
    KgStats {
        triples: store.len(),
        messages: count_typed(store, vocab, &vocab.frbr_expression),
        users: count_typed(store, vocab, &vocab.person),
        records: count_typed(store, vocab, &vocab.annotation),
    }
}
