use std::collections::BTreeMap;

use thiserror::Error;

use crate::model::entities::{AnnotatorId, Message};
use crate::model::term::{Graph, Iri};
use crate::model::validate::Validate;
use crate::model::vocab::Vocabulary;
use crate::stereotype::{
    encode_stereotype, Chunk, ClusterRound, MinimumPhrase, StereotypeConcept, StereotypeError,
};

#[derive(Debug, Error)]
pub enum TableError {
    #[error("stereotype table header lacks column `{0}`")]
    MissingColumn(&'static str),
    #[error("row {row}: {reason}")]
    Row { row: usize, reason: String },
    #[error("row {row}: {source}")]
    Stereotype { row: usize, source: StereotypeError },
    #[error("stereotype table: {0}")]
    Table(#[from] csv::Error),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StereotypeSet {
    pub chunks: Vec<Chunk>,
    pub phrases: Vec<MinimumPhrase>,
    pub concepts: Vec<StereotypeConcept>,
}

const COLUMNS: [&str; 9] = [
    "message_id",
    "start",
    "end",
    "chunk",
    "frame",
    "cluster10",
    "cluster5",
    "annotator",
    "target",
];

fn target_iri(vocab: &Vocabulary, target: &str) -> Iri {
    let local: String = target.split_whitespace().collect::<Vec<_>>().join("_");
    vocab.ster(&local)
}

/// Reads a stereotype annotation table (tab or comma separated, header
/// naming the columns `message_id, start, end, chunk, frame, cluster10,
/// cluster5, annotator, target`). Every row is one chunk paraphrased by one
/// minimum phrase; empty cluster cells leave the phrase unclustered for
/// that round. Chunk text must equal the message text at the span.
pub fn load_stereotype_table(
    text: &str,
    messages: &BTreeMap<String, Message>,
    vocab: &Vocabulary,
) -> Result<StereotypeSet, TableError> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let delimiter = if text.lines().next().unwrap_or("").contains('\t') { b'\t' } else { b',' };
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .flexible(true)
        .from_reader(text.as_bytes());
    let header = reader.headers()?.clone();
    let mut cols = [0usize; 9];
    for (slot, name) in cols.iter_mut().zip(COLUMNS) {
        *slot = header
            .iter()
            .position(|h| h.trim() == name)
            .ok_or(TableError::MissingColumn(name))?;
    }

    let mut set = StereotypeSet::default();
    let mut chunk_ids: BTreeMap<(String, usize, usize, AnnotatorId), String> = BTreeMap::new();
    let mut concepts: BTreeMap<(AnnotatorId, ClusterRound, String), StereotypeConcept> = BTreeMap::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let row = i + 1;
        let err = |reason: String| TableError::Row { row, reason };
        let cell = |k: usize| record.get(cols[k]).unwrap_or("");
        let message_id = cell(0).trim();
        let message = messages
            .get(message_id)
            .ok_or_else(|| err(format!("unknown message `{message_id}`")))?;
        let offset = |k: usize| {
            cell(k)
                .trim()
                .parse::<usize>()
                .map_err(|_| err(format!("bad offset `{}` in column `{}`", cell(k), COLUMNS[k])))
        };
        let (start, end) = (offset(1)?, offset(2)?);
        let annotator: AnnotatorId = cell(7).trim().parse().expect("infallible");
        let report = annotator.validate();
        if !report.is_ok() {
            return Err(err(report.to_string()));
        }

        let key = (message_id.to_string(), start, end, annotator.clone());
        let chunk_id = match chunk_ids.get(&key) {
            Some(id) => id.clone(),
            None => {
                let id = format!("{message_id}:{start}-{end}:{annotator}");
                let chunk = Chunk::from_span(id.clone(), message, start, end, annotator.clone())
                    .map_err(|source| TableError::Stereotype { row, source })?;
                if chunk.text != cell(3) {
                    return Err(TableError::Stereotype {
                        row,
                        source: StereotypeError::SpanMismatch {
                            message: message_id.to_string(),
                            start,
                            end,
                        },
                    });
                }
                set.chunks.push(chunk);
                chunk_ids.insert(key, id.clone());
                id
            }
        };

        let frame = cell(4).trim();
        if frame.is_empty() {
            return Err(err("empty frame".into()));
        }
        let phrase = MinimumPhrase {
            id: format!("{chunk_id}#{}", set.phrases.len()),
            frame: frame.to_string(),
            chunk_ref: chunk_id,
            annotator: annotator.clone(),
        };

        let target = cell(8).trim();
        for (k, round) in [(5, ClusterRound::Ten), (6, ClusterRound::Five)] {
            let label = cell(k).trim();
            if label.is_empty() {
                continue;
            }
            if target.is_empty() {
                return Err(err(format!("cluster `{label}` without a target")));
            }
            let target = target_iri(vocab, target);
            let concept = concepts
                .entry((annotator.clone(), round, label.to_string()))
                .or_insert_with(|| StereotypeConcept {
                    label: label.to_string(),
                    round,
                    annotator: annotator.clone(),
                    members: Default::default(),
                    target: target.clone(),
                });
            if concept.target != target {
                return Err(err(format!("cluster `{label}` already has target <{}>", concept.target)));
            }
            concept.members.insert(phrase.id.clone());
        }
        set.phrases.push(phrase);
    }
    set.concepts = concepts.into_values().collect();
    Ok(set)
}

/// Encodes every (chunk, phrase, concept) chain of the set. Phrases with no
/// concept are skipped.
pub fn encode_stereotype_set(vocab: &Vocabulary, set: &StereotypeSet) -> Result<Graph, StereotypeError> {
    let chunks: BTreeMap<&str, &Chunk> = set.chunks.iter().map(|c| (c.id.as_str(), c)).collect();
    let mut g = Graph::new();
    for phrase in &set.phrases {
        let chunk = chunks.get(phrase.chunk_ref.as_str()).ok_or_else(|| {
            StereotypeError::InconsistentRefs(format!("phrase `{}` refers to unknown chunk `{}`", phrase.id, phrase.chunk_ref))
        })?;
        for concept in set.concepts.iter().filter(|c| c.members.contains(&phrase.id)) {
            g.extend(encode_stereotype(vocab, chunk, phrase, concept)?);
        }
    }
    Ok(g)
}
