//! Stereotype annotation encoding: chunk (lexical entry), minimum phrase
//! (lexical sense) and concept cluster (lexical concept) with its target,
//! plus clustering-round checks and annotator profiles.

mod table;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

pub use table::{encode_stereotype_set, load_stereotype_table, StereotypeSet, TableError};

use crate::model::encode::manifestation_iri;
use crate::model::entities::{camel_case, AnnotatorId, Genre, Message};
use crate::model::term::{Graph, Iri, Literal, Triple};
use crate::model::validate::ValidationReport;
use crate::model::vocab::Vocabulary;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StereotypeError {
    #[error("span {start}..{end} does not fit message `{message}` of {len} characters")]
    SpanOutOfRange {
        message: String,
        start: usize,
        end: usize,
        len: usize,
    },
    #[error("chunk text differs from message `{message}` at {start}..{end}")]
    SpanMismatch { message: String, start: usize, end: usize },
    #[error("inconsistent references: {0}")]
    InconsistentRefs(String),
}

/// A text span selected by an annotator. Offsets count Unicode scalar
/// values, end exclusive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chunk {
    pub id: String,
    pub message_ref: String,
    pub genre: Genre,
    pub text: String,
    pub span: (usize, usize),
    pub annotator: AnnotatorId,
}

fn char_slice(text: &str, start: usize, end: usize) -> Option<&str> {
    let mut idx = text.char_indices().map(|(i, _)| i).chain(std::iter::once(text.len()));
    let from = idx.nth(start)?;
    let to = if end == start { from } else { idx.nth(end - start - 1)? };
    Some(&text[from..to])
}

impl Chunk {
    /// Cuts the chunk out of the message text.
    pub fn from_span(
        id: impl Into<String>,
        message: &Message,
        start: usize,
        end: usize,
        annotator: AnnotatorId,
    ) -> Result<Self, StereotypeError> {
        let len = message.text.chars().count();
        if start >= end || end > len {
            return Err(StereotypeError::SpanOutOfRange {
                message: message.id.clone(),
                start,
                end,
                len,
            });
        }
        let text = char_slice(&message.text, start, end).expect("checked range");
        Ok(Chunk {
            id: id.into(),
            message_ref: message.id.clone(),
            genre: message.genre,
            text: text.to_string(),
            span: (start, end),
            annotator,
        })
    }

    /// Whether the stored text equals the message text at the stored span.
    pub fn matches(&self, message: &Message) -> bool {
        message.id == self.message_ref && char_slice(&message.text, self.span.0, self.span.1) == Some(self.text.as_str())
    }
}

/// An S-V-O or S-NP paraphrase of a chunk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinimumPhrase {
    pub id: String,
    pub frame: String,
    pub chunk_ref: String,
    pub annotator: AnnotatorId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClusterRound {
    Ten,
    Five,
}

impl ClusterRound {
    pub fn cap(self) -> usize {
        match self {
            ClusterRound::Ten => 10,
            ClusterRound::Five => 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StereotypeConcept {
    pub label: String,
    pub round: ClusterRound,
    pub annotator: AnnotatorId,
    /// Ids of member minimum phrases.
    pub members: BTreeSet<String>,
    pub target: Iri,
}

impl StereotypeConcept {
    /// IRI local name: the label in CamelCase (`sono pericolosi` ->
    /// `SonoPericolosi`).
    pub fn slug(&self) -> String {
        camel_case(&self.label)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StereotypeAnnotatorProfile {
    pub id: AnnotatorId,
    pub gender: Option<String>,
    pub age: Option<u32>,
    pub birth_country: Option<Iri>,
}

impl StereotypeAnnotatorProfile {
    pub fn new(id: AnnotatorId) -> Self {
        StereotypeAnnotatorProfile {
            id,
            gender: None,
            age: None,
            birth_country: None,
        }
    }

    pub fn validate(&self) -> ValidationReport {
        let mut r = ValidationReport::default();
        if let Some(age) = self.age {
            if !(14..=100).contains(&age) {
                r.push("age", format!("{age} outside [14, 100]"));
            }
        }
        r
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Privacy {
    #[default]
    Withheld,
    Released,
}

pub fn annotator_node(vocab: &Vocabulary, id: &AnnotatorId) -> Iri {
    vocab.ster(id.local_name())
}

pub fn chunk_node(vocab: &Vocabulary, chunk: &Chunk) -> Iri {
    vocab.skolem(&["chunk", &chunk.id])
}

pub fn phrase_node(vocab: &Vocabulary, phrase: &MinimumPhrase) -> Iri {
    vocab.skolem(&["phrase", &phrase.id])
}

pub fn concept_node(vocab: &Vocabulary, concept: &StereotypeConcept) -> Iri {
    vocab.ster(&concept.slug())
}

fn encode_chunk_into(vocab: &Vocabulary, chunk: &Chunk, g: &mut Graph) -> Iri {
    let node = chunk_node(vocab, chunk);
    g.insert(Triple::new(&node, &vocab.rdf_type, &vocab.ontolex_lexical_entry));
    g.insert(Triple::new(&node, &vocab.ster_chunk, Literal::string(chunk.text.clone())));
    g.insert(Triple::new(
        &node,
        &vocab.dul_is_part_of,
        manifestation_iri(vocab, &chunk.message_ref, chunk.genre),
    ));
    g.insert(Triple::new(&node, &vocab.prov_was_attributed_to, annotator_node(vocab, &chunk.annotator)));
    node
}

fn encode_phrase_into(vocab: &Vocabulary, entry: &Iri, phrase: &MinimumPhrase, g: &mut Graph) -> Iri {
    let node = phrase_node(vocab, phrase);
    g.insert(Triple::new(entry, &vocab.ontolex_sense, &node));
    g.insert(Triple::new(&node, &vocab.rdf_type, &vocab.ster_annotation));
    g.insert(Triple::new(&node, &vocab.rdf_type, &vocab.ontolex_lexical_sense));
    g.insert(Triple::new(&node, &vocab.ster_frame, Literal::string(phrase.frame.clone())));
    g.insert(Triple::new(&node, &vocab.prov_was_attributed_to, annotator_node(vocab, &phrase.annotator)));
    node
}

fn encode_concept_into(vocab: &Vocabulary, phrase: &Iri, concept: &StereotypeConcept, g: &mut Graph) {
    let node = concept_node(vocab, concept);
    g.insert(Triple::new(phrase, &vocab.ontolex_is_lexicalized_sense_of, &node));
    g.insert(Triple::new(phrase, &vocab.ster_was_clustered_as, &node));
    g.insert(Triple::new(&node, &vocab.rdfs_sub_class_of, &vocab.ster_stereotype));
    g.insert(Triple::new(&node, &vocab.rdfs_sub_class_of, &vocab.ontolex_lexical_concept));
    g.insert(Triple::new(&node, &vocab.rdfs_label, Literal::string(concept.label.clone())));
    g.insert(Triple::new(
        &node,
        &vocab.ster_round,
        Literal::integer(concept.round.cap() as i64),
    ));
    g.insert(Triple::new(&node, &vocab.ster_has_target, &concept.target));
    g.insert(Triple::new(&node, &vocab.prov_was_attributed_to, annotator_node(vocab, &concept.annotator)));
}

fn check_refs(chunk: &Chunk, phrase: &MinimumPhrase, concept: &StereotypeConcept) -> Result<(), StereotypeError> {
    if phrase.chunk_ref != chunk.id {
        return Err(StereotypeError::InconsistentRefs(format!(
            "phrase `{}` refers to chunk `{}`, not `{}`",
            phrase.id, phrase.chunk_ref, chunk.id
        )));
    }
    if phrase.annotator != chunk.annotator {
        return Err(StereotypeError::InconsistentRefs(format!(
            "phrase `{}` by {} paraphrases a chunk selected by {}",
            phrase.id, phrase.annotator, chunk.annotator
        )));
    }
    if !concept.members.contains(&phrase.id) {
        return Err(StereotypeError::InconsistentRefs(format!(
            "concept `{}` does not contain phrase `{}`",
            concept.label, phrase.id
        )));
    }
    if phrase.frame.trim().is_empty() {
        return Err(StereotypeError::InconsistentRefs(format!("phrase `{}` has an empty frame", phrase.id)));
    }
    Ok(())
}

/// The entry -> sense -> concept chain for one chunk, phrase and concept.
pub fn encode_stereotype(
    vocab: &Vocabulary,
    chunk: &Chunk,
    phrase: &MinimumPhrase,
    concept: &StereotypeConcept,
) -> Result<Graph, StereotypeError> {
    check_refs(chunk, phrase, concept)?;
    let mut g = Graph::new();
    let entry = encode_chunk_into(vocab, chunk, &mut g);
    let sense = encode_phrase_into(vocab, &entry, phrase, &mut g);
    encode_concept_into(vocab, &sense, concept, &mut g);
    Ok(g)
}

/// Checks, for every annotator with concepts in `round`, that each of their
/// phrases sits in exactly one of their concepts, that member ids exist, and
/// (when `strict`) that the round's cluster cap holds.
pub fn validate_clustering(
    phrases: &[MinimumPhrase],
    concepts: &[StereotypeConcept],
    round: ClusterRound,
    strict: bool,
) -> ValidationReport {
    let mut r = ValidationReport::default();
    let known: BTreeSet<&str> = phrases.iter().map(|p| p.id.as_str()).collect();
    let mut by_annotator: BTreeMap<&AnnotatorId, Vec<&StereotypeConcept>> = BTreeMap::new();
    for c in concepts.iter().filter(|c| c.round == round) {
        by_annotator.entry(&c.annotator).or_default().push(c);
    }
    for (annotator, own) in by_annotator {
        let field = format!("{annotator}/{round:?}");
        if strict && own.len() > round.cap() {
            r.push(&field, format!("{} clusters exceed the cap of {}", own.len(), round.cap()));
        }
        let mut membership: BTreeMap<&str, usize> = BTreeMap::new();
        for c in &own {
            for m in &c.members {
                if !known.contains(m.as_str()) {
                    r.push(&field, format!("concept `{}` lists unknown phrase `{m}`", c.label));
                }
                *membership.entry(m.as_str()).or_default() += 1;
            }
        }
        for p in phrases.iter().filter(|p| &p.annotator == annotator) {
            membership.entry(p.id.as_str()).or_default();
        }
        for (phrase, n) in membership {
            if n != 1 && known.contains(phrase) {
                r.push(&field, format!("phrase `{phrase}` is in {n} clusters"));
            }
        }
    }
    r
}

/// Typing and role triples; demographics only when released.
pub fn encode_annotator_profile(vocab: &Vocabulary, profile: &StereotypeAnnotatorProfile, privacy: Privacy) -> Graph {
    let node = annotator_node(vocab, &profile.id);
    let mut g = Graph::new();
    g.insert(Triple::new(&node, &vocab.rdf_type, &vocab.ster_annotator));
    g.insert(Triple::new(&node, &vocab.dul_is_role_of, &vocab.prov_person));
    if privacy == Privacy::Released {
        if let Some(gender) = &profile.gender {
            g.insert(Triple::new(&node, &vocab.ster_gender, Literal::string(gender.clone())));
        }
        if let Some(age) = profile.age {
            g.insert(Triple::new(&node, &vocab.ster_age, Literal::integer(age.into())));
        }
        if let Some(country) = &profile.birth_country {
            g.insert(Triple::new(&node, &vocab.ster_birth_country, country));
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    fn annotator(n: &str) -> AnnotatorId {
        AnnotatorId::Individual(format!("annotator_{n}"))
    }

    #[test]
    fn char_offsets() {
        let m = Message::new("m", "città è qui", Genre::Tweet, "c");
        let c = Chunk::from_span("c1", &m, 6, 7, annotator("1")).unwrap();
        assert_eq!(c.text, "è");
        assert!(c.matches(&m));
        assert!(Chunk::from_span("c2", &m, 3, 3, annotator("1")).is_err());
        assert!(Chunk::from_span("c2", &m, 3, 12, annotator("1")).is_err());
        assert_eq!(Chunk::from_span("c3", &m, 0, 11, annotator("1")).unwrap().text, m.text);
    }

    #[test]
    fn cap_and_partition() {
        let phrases: Vec<MinimumPhrase> = (0..12)
            .map(|i| MinimumPhrase {
                id: format!("p{i}"),
                frame: "x".into(),
                chunk_ref: "c".into(),
                annotator: annotator("1"),
            })
            .collect();
        let target = Iri::new("https://w3id.org/ster#minorities").unwrap();
        let mut concepts: Vec<StereotypeConcept> = (0..11)
            .map(|i| StereotypeConcept {
                label: format!("c{i}"),
                round: ClusterRound::Ten,
                annotator: annotator("1"),
                members: BTreeSet::from([format!("p{i}")]),
                target: target.clone(),
            })
            .collect();
        concepts[10].members.insert("p11".into());
        let r = validate_clustering(&phrases, &concepts, ClusterRound::Ten, true);
        assert_eq!(r.violations.len(), 1, "{r}");
        assert!(validate_clustering(&phrases, &concepts, ClusterRound::Ten, false).is_ok());
        concepts[0].members.insert("p1".into());
        let r = validate_clustering(&phrases, &concepts, ClusterRound::Ten, false);
        assert_eq!(r.violations.len(), 1, "{r}");
        assert!(validate_clustering(&phrases, &concepts, ClusterRound::Five, true).is_ok());
    }

    #[test]
    fn profile_privacy() {
        let vocab = Vocabulary::default();
        let p = StereotypeAnnotatorProfile {
            id: annotator("02"),
            gender: Some("female".into()),
            age: Some(29),
            birth_country: Some(vocab.ster("Italy")),
        };
        assert_eq!(encode_annotator_profile(&vocab, &p, Privacy::Withheld).len(), 2);
        let g = encode_annotator_profile(&vocab, &p, Privacy::Released);
        assert_eq!(g.len(), 5);
        assert!(g.contains(&Triple::new(vocab.ster("annotator_02"), &vocab.ster_age, Literal::integer(29))));
        assert!(!StereotypeAnnotatorProfile { age: Some(12), ..p }.validate().is_ok());
    }
}
