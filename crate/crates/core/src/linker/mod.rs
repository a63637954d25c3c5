//! Entity linking for mentioned users: mention extraction, handle
//! resolution, knowledge-graph candidate search, exact-match
//! disambiguation, and person-fact enrichment.

mod client;
#[cfg(feature = "live")]
pub mod live;

use std::collections::BTreeSet;

use serde::Serialize;
use unicode_normalization::UnicodeNormalization;

pub use client::{
    Candidate, ClientError, Exchange, ExchangeLog, FactRecord, FactsClient, FixtureClients, FixtureError,
    FixtureFacts, FixtureHandleResolver, FixtureKgSearch, HandleResolver, KgSearchClient, Recordings, UserInfo,
};

use crate::model::encode::encode_person;
use crate::model::entities::{Person, PersonFacts};
use crate::model::term::{Graph, Term};
use crate::model::vocab::Vocabulary;
use crate::store::{query, Conjunct, Pattern, PatternTerm, TripleStore};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum MentionPosition {
    /// Part of the run of mentions opening the text.
    LeadingHandle,
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mention {
    pub surface: String,
    pub message_ref: String,
    pub position: MentionPosition,
}

fn handle_of(token: &str) -> Option<&str> {
    let rest = token.strip_prefix('@')?;
    let len = rest
        .char_indices()
        .find(|&(_, c)| !(c.is_ascii_alphanumeric() || c == '_'))
        .map_or(rest.len(), |(i, _)| i);
    (len > 0).then(|| &token[..len + 1])
}

/// `@handle` tokens in order; those before the first non-mention token are
/// leading.
pub fn extract_mentions(message_ref: &str, text: &str) -> Vec<Mention> {
    let mut leading = true;
    let mut out = Vec::new();
    for token in text.split_whitespace() {
        match handle_of(token) {
            Some(handle) => out.push(Mention {
                surface: handle.to_string(),
                message_ref: message_ref.to_string(),
                position: if leading {
                    MentionPosition::LeadingHandle
                } else {
                    MentionPosition::Other
                },
            }),
            None => leading = false,
        }
    }
    out
}

pub const DEFAULT_CANDIDATE_LIMIT: usize = 10;

/// Candidates for `name`, best score first (stable among equal scores), at
/// most `limit`. Errors pass through without partial results.
pub fn search_candidates(name: &str, client: &dyn KgSearchClient, limit: usize) -> Result<Vec<Candidate>, ClientError> {
    let mut found = client.search(name, limit)?;
    found.sort_by(|a, b| b.score.total_cmp(&a.score));
    found.truncate(limit);
    Ok(found)
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MatchOptions {
    pub min_score: f64,
    pub case_fold: bool,
}

fn normalize(s: &str, fold: bool) -> String {
    let n: String = s.nfc().collect();
    if fold {
        n.to_lowercase()
    } else {
        n
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Decision {
    Linked { external_id: String, score: f64, tie: bool },
    NoExactMatch,
    LowScore { best: f64 },
}

/// The highest-scored candidate whose NFC-normalized name equals `name`
/// exactly, if its score reaches `min_score`. A second exact match with the
/// same score is reported as a tie; the first in candidate order wins.
pub fn disambiguate(name: &str, candidates: &[Candidate], opts: MatchOptions) -> Decision {
    let wanted = normalize(name, opts.case_fold);
    let exact: Vec<&Candidate> = candidates
        .iter()
        .filter(|c| normalize(&c.name, opts.case_fold) == wanted)
        .collect();
    let Some(best) = exact.iter().copied().reduce(|a, b| if b.score > a.score { b } else { a }) else {
        return Decision::NoExactMatch;
    };
    if best.score < opts.min_score {
        return Decision::LowScore { best: best.score };
    }
    let tie = exact.iter().filter(|c| c.score == best.score).count() > 1;
    Decision::Linked {
        external_id: best.external_id.clone(),
        score: best.score,
        tie,
    }
}

fn year_of(date: &str) -> Option<i32> {
    let d = date.trim().trim_start_matches('+');
    let (neg, d) = match d.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, d),
    };
    let digits: String = d.chars().take_while(char::is_ascii_digit).collect();
    let y: i32 = digits.parse().ok()?;
    Some(if neg { -y } else { y })
}

/// Person facts from the facts service: the first value of each property in
/// source order. Dropped extra values are logged.
pub fn fetch_person_facts(vocab: &Vocabulary, external_id: &str, client: &dyn FactsClient) -> Result<PersonFacts, ClientError> {
    let record = client.facts(external_id)?;
    let first = |prop: &str, values: &[String]| -> Option<String> {
        if values.len() > 1 {
            log::warn!("{external_id}: {prop} has {} values, keeping `{}`", values.len(), values[0]);
        }
        values.first().map(|v| v.trim().to_string()).filter(|v| !v.is_empty())
    };
    let iri = |prop: &str, values: &[String]| first(prop, values).map(|v| vocab.odang(&v));
    Ok(PersonFacts {
        gender: first("gender", &record.gender),
        birth_year: first("birth_date", &record.birth_date).and_then(|d| year_of(&d)),
        country_of_citizenship: iri("country_of_citizenship", &record.country_of_citizenship),
        place_of_birth: iri("place_of_birth", &record.place_of_birth),
        occupation: iri("occupation", &record.occupation),
        political_party: iri("political_party", &record.political_party),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MentionMode {
    Leading,
    #[default]
    All,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkConfig {
    pub min_score: f64,
    pub candidate_limit: usize,
    pub mentions: MentionMode,
    pub case_fold: bool,
}

impl Default for LinkConfig {
    fn default() -> Self {
        LinkConfig {
            min_score: 0.0,
            candidate_limit: DEFAULT_CANDIDATE_LIMIT,
            mentions: MentionMode::All,
            case_fold: false,
        }
    }
}

pub struct Clients<'a> {
    pub handles: &'a dyn HandleResolver,
    pub search: &'a dyn KgSearchClient,
    pub facts: &'a dyn FactsClient,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinkAudit {
    pub handle: String,
    pub name: Option<String>,
    pub candidates: Vec<Candidate>,
    pub outcome: LinkOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkOutcome {
    Linked { person: String, external_id: String, tie: bool },
    Unresolved,
    NoExactMatch,
    LowScore,
    ClientError { stage: String, error: ClientError },
}

/// Counts are per distinct handle: every handle ends in exactly one of
/// linked, rejected, unresolved or errors.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct LinkReport {
    pub mention_occurrences: usize,
    pub mentions_seen: usize,
    pub candidates_fetched: usize,
    pub linked: usize,
    pub rejected_no_exact_match: usize,
    pub rejected_low_score: usize,
    pub unresolved: usize,
    pub errors: usize,
    pub ties: usize,
    pub audit: Vec<LinkAudit>,
}

/// Texts of all Expressions in the store, by message IRI.
fn message_texts(store: &TripleStore, vocab: &Vocabulary) -> Vec<(String, String)> {
    let pattern = Pattern::new(vec![
        Conjunct::new(PatternTerm::var("m"), vocab.rdf_type.clone(), Term::Iri(vocab.frbr_expression.clone())),
        Conjunct::new(PatternTerm::var("m"), vocab.has_text.clone(), PatternTerm::var("t")),
    ]);
    let solutions = query(store, &pattern).expect("fixed pattern is valid");
    solutions
        .rows
        .iter()
        .filter_map(|row| {
            let m = row[0].as_iri()?.as_str().to_string();
            let t = row[1].as_literal()?.lexical().to_string();
            Some((m, t))
        })
        .collect()
}

/// Person id for a linked handle: `usr_` plus the handle without `@`.
pub fn linked_person_id(handle: &str) -> String {
    format!("usr_{}", handle.trim_start_matches('@'))
}

fn link_handle(vocab: &Vocabulary, handle: &str, clients: &Clients<'_>, config: &LinkConfig, report: &mut LinkReport) -> (LinkAudit, Option<Person>) {
    let mut audit = LinkAudit {
        handle: handle.to_string(),
        name: None,
        candidates: Vec::new(),
        outcome: LinkOutcome::Unresolved,
    };
    let fail = |stage: &str, error: ClientError| LinkOutcome::ClientError {
        stage: stage.to_string(),
        error,
    };
    let info = match clients.handles.resolve(handle) {
        Ok(Some(info)) => info,
        Ok(None) => {
            report.unresolved += 1;
            return (audit, None);
        }
        Err(e) => {
            report.errors += 1;
            audit.outcome = fail("handles", e);
            return (audit, None);
        }
    };
    audit.name = Some(info.name.clone());
    let candidates = match search_candidates(&info.name, clients.search, config.candidate_limit) {
        Ok(c) => c,
        Err(e) => {
            report.errors += 1;
            audit.outcome = fail("search", e);
            return (audit, None);
        }
    };
    report.candidates_fetched += candidates.len();
    audit.candidates = candidates;
    let opts = MatchOptions {
        min_score: config.min_score,
        case_fold: config.case_fold,
    };
    match disambiguate(&info.name, &audit.candidates, opts) {
        Decision::NoExactMatch => {
            report.rejected_no_exact_match += 1;
            audit.outcome = LinkOutcome::NoExactMatch;
            (audit, None)
        }
        Decision::LowScore { .. } => {
            report.rejected_low_score += 1;
            audit.outcome = LinkOutcome::LowScore;
            (audit, None)
        }
        Decision::Linked { external_id, tie, .. } => match fetch_person_facts(vocab, &external_id, clients.facts) {
            Err(e) => {
                report.errors += 1;
                audit.outcome = fail("facts", e);
                (audit, None)
            }
            Ok(facts) => {
                report.linked += 1;
                if tie {
                    report.ties += 1;
                    log::warn!("{handle}: tie between exact matches for `{}`; kept {external_id}", info.name);
                }
                let person = Person {
                    id: linked_person_id(handle),
                    handle: Some(handle.to_string()),
                    platform_id: info.platform_id,
                    facts: Some(facts),
                };
                audit.outcome = LinkOutcome::Linked {
                    person: person.id.clone(),
                    external_id,
                    tie,
                };
                (audit, Some(person))
            }
        },
    }
}

/// Runs extraction, resolution, search, disambiguation and fact fetching
/// for every distinct mentioned handle (in sorted order) and encodes the
/// linked persons. Client failures are counted per handle, never fatal.
pub fn link_corpus(store: &TripleStore, vocab: &Vocabulary, clients: &Clients<'_>, config: &LinkConfig) -> (Graph, LinkReport) {
    let mut report = LinkReport::default();
    let mut handles = BTreeSet::new();
    for (message, text) in message_texts(store, vocab) {
        for m in extract_mentions(&message, &text) {
            if config.mentions == MentionMode::Leading && m.position != MentionPosition::LeadingHandle {
                continue;
            }
            report.mention_occurrences += 1;
            handles.insert(m.surface);
        }
    }
    report.mentions_seen = handles.len();
    let mut graph = Graph::new();
    for handle in &handles {
        let (audit, person) = link_handle(vocab, handle, clients, config, &mut report);
        if let Some(p) = person {
            graph.extend(encode_person(vocab, &p));
        }
        report.audit.push(audit);
    }
    (graph, report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cand(name: &str, id: &str, score: f64) -> Candidate {
        Candidate {
            name: name.into(),
            external_id: id.into(),
            score,
        }
    }

    #[test]
    fn mention_positions() {
        let m = extract_mentions("m", "@a @b ciao @c");
        let got: Vec<_> = m.iter().map(|m| (m.surface.as_str(), m.position)).collect();
        assert_eq!(
            got,
            [
                ("@a", MentionPosition::LeadingHandle),
                ("@b", MentionPosition::LeadingHandle),
                ("@c", MentionPosition::Other)
            ]
        );
        assert!(extract_mentions("m", "ciao mondo").is_empty());
        let k = extract_mentions("m", "@ckyenge, per fare sentire a casa");
        assert_eq!(k[0].surface, "@ckyenge");
        assert!(extract_mentions("m", "@ solo email@example.org").is_empty());
    }

    #[test]
    fn exact_match_beats_score() {
        let c = [cand("X Jr", "id2", 950.0), cand("X", "id1", 900.0)];
        assert_eq!(
            disambiguate("X", &c, MatchOptions::default()),
            Decision::Linked {
                external_id: "id1".into(),
                score: 900.0,
                tie: false
            }
        );
        let opts = MatchOptions {
            min_score: 901.0,
            ..Default::default()
        };
        assert_eq!(disambiguate("X", &c, opts), Decision::LowScore { best: 900.0 });
        assert_eq!(disambiguate("X", &[], MatchOptions::default()), Decision::NoExactMatch);
    }

    #[test]
    fn nfc_and_ties() {
        let decomposed = "Ce\u{301}cile";
        let c = [cand("Cécile", "a", 5.0), cand(decomposed, "b", 5.0)];
        match disambiguate("Cécile", &c, MatchOptions::default()) {
            Decision::Linked { external_id, tie, .. } => {
                assert_eq!(external_id, "a");
                assert!(tie);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(disambiguate("cécile", &c, MatchOptions::default()), Decision::NoExactMatch);
        let folded = MatchOptions {
            case_fold: true,
            ..Default::default()
        };
        assert!(matches!(disambiguate("cécile", &c, folded), Decision::Linked { .. }));
    }

    #[test]
    fn years() {
        assert_eq!(year_of("1985-03-01"), Some(1985));
        assert_eq!(year_of("+1964-08-28T00:00:00Z"), Some(1964));
        assert_eq!(year_of("unknown"), None);
    }
}
