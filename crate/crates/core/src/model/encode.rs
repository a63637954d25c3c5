//! Entity to triple encodings.
//!
//! A message is an Expression with one Manifestation node per platform genre
//! and one `dul:isPartOf` link per corpus. Every annotation record becomes
//! its own description node attributed to its annotator, so that individual
//! and gold-standard judgments stay distinct in the graph.

use thiserror::Error;

use crate::model::entities::{
    AnnotationRecord, AnnotationValue, AnnotatorId, Genre, Message, ParticipantEntity, Person,
    PersonFacts, Role, Situation, ValueDomain,
};
use crate::model::term::{Graph, Iri, Literal, Term, Triple};
use crate::model::validate::{Validate, ValidationReport};
use crate::model::vocab::Vocabulary;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodeError {
    #[error("record for message `{record_message}` passed while encoding message `{message}`")]
    DanglingRecord { message: String, record_message: String },
    #[error("invalid situation: {0}")]
    InvalidSituation(ValidationReport),
}

pub fn message_iri(vocab: &Vocabulary, message_id: &str) -> Iri {
    vocab.odang(&format!("msg_{message_id}"))
}

pub fn manifestation_iri(vocab: &Vocabulary, message_id: &str, genre: Genre) -> Iri {
    vocab.odang(&format!("{}_{message_id}", genre.slug()))
}

pub fn corpus_iri(vocab: &Vocabulary, corpus_id: &str) -> Iri {
    vocab.odang(&format!("corpus_{corpus_id}"))
}

pub fn annotator_iri(vocab: &Vocabulary, annotator: &AnnotatorId) -> Iri {
    vocab.odang(annotator.local_name())
}

pub fn person_iri(vocab: &Vocabulary, person_id: &str) -> Iri {
    vocab.odang(person_id)
}

pub fn role_iri(vocab: &Vocabulary, role: Role) -> Iri {
    vocab.odang(role.local_name())
}

/// Description node for one judgment. Stable for a given
/// (message, scheme, annotator) key.
pub fn description_iri(vocab: &Vocabulary, record: &AnnotationRecord) -> Iri {
    vocab.skolem(&[
        "annotation",
        &record.message_ref,
        &record.scheme.name,
        record.annotator.local_name(),
    ])
}

pub fn value_term(vocab: &Vocabulary, record: &AnnotationRecord) -> Term {
    match (&record.scheme.domain, &record.value) {
        (ValueDomain::Categorical(_), AnnotationValue::Label(label)) => {
            Term::Iri(vocab.odang(&format!("{}_{label}", record.scheme.class_name())))
        }
        (_, AnnotationValue::Int(v)) => Term::Literal(Literal::integer(*v)),
        (_, AnnotationValue::Label(label)) => Term::Literal(Literal::string(label.clone())),
    }
}

/// Expression, text, manifestation, corpus membership, and one description
/// node per record.
pub fn encode_message(
    vocab: &Vocabulary,
    message: &Message,
    records: &[AnnotationRecord],
) -> Result<Graph, EncodeError> {
    if let Some(stray) = records.iter().find(|r| r.message_ref != message.id) {
        return Err(EncodeError::DanglingRecord {
            message: message.id.clone(),
            record_message: stray.message_ref.clone(),
        });
    }
    let mut g = Graph::new();
    let expr = message_iri(vocab, &message.id);
    let manif = manifestation_iri(vocab, &message.id, message.genre);
    g.insert(Triple::new(&expr, &vocab.rdf_type, &vocab.frbr_expression));
    g.insert(Triple::new(&expr, &vocab.has_text, Literal::string(message.text.clone())));
    g.insert(Triple::new(&expr, &vocab.frbr_embodiment, &manif));
    g.insert(Triple::new(&manif, &vocab.rdf_type, vocab.odang(message.genre.class_name())));
    for corpus in &message.corpus_ids {
        g.insert(Triple::new(&expr, &vocab.dul_is_part_of, corpus_iri(vocab, corpus)));
    }
    for record in records {
        encode_record_into(vocab, &expr, record, &mut g);
    }
    Ok(g)
}

fn encode_record_into(vocab: &Vocabulary, expr: &Iri, record: &AnnotationRecord, g: &mut Graph) {
    let desc = description_iri(vocab, record);
    let scheme_class = vocab.odang(&record.scheme.class_name());
    let annotator = annotator_iri(vocab, &record.annotator);
    g.insert(Triple::new(expr, &vocab.is_described, &desc));
    g.insert(Triple::new(&desc, &vocab.rdf_type, &vocab.annotation));
    g.insert(Triple::new(&desc, &vocab.rdf_type, &scheme_class));
    g.insert(Triple::new(&scheme_class, &vocab.rdfs_sub_class_of, &vocab.dul_description));
    g.insert(Triple::new(&desc, &vocab.has_value, value_term(vocab, record)));
    g.insert(Triple::new(&desc, &vocab.prov_was_attributed_to, &annotator));
    g.insert(Triple::new(&annotator, &vocab.rdf_type, &vocab.prov_agent));
    g.insert(Triple::new(&annotator, &vocab.has_role, role_iri(vocab, Role::Annotator)));
}

/// Which property names person facts are written with. Situation graphs use
/// `:citizenship`; entity-linking output uses `:countryOfCitizenship`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactProfile {
    Linked,
    Situation,
}

/// Typing triple, handle and platform id, and one triple per present fact.
pub fn encode_person(vocab: &Vocabulary, person: &Person) -> Graph {
    let mut g = Graph::new();
    encode_person_into(vocab, person, FactProfile::Linked, &mut g);
    g
}

fn encode_person_into(vocab: &Vocabulary, person: &Person, profile: FactProfile, g: &mut Graph) {
    let node = person_iri(vocab, &person.id);
    g.insert(Triple::new(&node, &vocab.rdf_type, &vocab.person));
    if let Some(handle) = &person.handle {
        g.insert(Triple::new(&node, &vocab.handle, Literal::string(handle.clone())));
    }
    if let Some(pid) = &person.platform_id {
        let lit = pid
            .parse::<i64>()
            .map(Literal::integer)
            .unwrap_or_else(|_| Literal::string(pid.clone()));
        g.insert(Triple::new(&node, &vocab.has_id, lit));
    }
    if let Some(facts) = &person.facts {
        encode_facts_into(vocab, &node, facts, profile, g);
    }
}

fn encode_facts_into(vocab: &Vocabulary, node: &Iri, facts: &PersonFacts, profile: FactProfile, g: &mut Graph) {
    if let Some(gender) = &facts.gender {
        g.insert(Triple::new(node, &vocab.gender, vocab.odang(gender)));
    }
    if let Some(year) = facts.birth_year {
        g.insert(Triple::new(node, &vocab.birth_year, Literal::integer(year.into())));
    }
    let citizenship = match profile {
        FactProfile::Linked => &vocab.country_of_citizenship,
        FactProfile::Situation => &vocab.citizenship,
    };
    for (prop, value) in [
        (citizenship, &facts.country_of_citizenship),
        (&vocab.place_of_birth, &facts.place_of_birth),
        (&vocab.occupation, &facts.occupation),
        (&vocab.political_party, &facts.political_party),
    ] {
        if let Some(iri) = value {
            g.insert(Triple::new(node, prop, iri));
        }
    }
}

/// Node standing for a participant inside a situation graph.
pub fn participant_iri(vocab: &Vocabulary, entity: &ParticipantEntity) -> Iri {
    match entity {
        ParticipantEntity::Message(m) => manifestation_iri(vocab, &m.id, m.genre),
        ParticipantEntity::Person(p) => person_iri(vocab, &p.id),
        ParticipantEntity::Group(iri) => iri.clone(),
    }
}

pub fn encode_situation(vocab: &Vocabulary, situation: &Situation) -> Result<Graph, EncodeError> {
    let report = situation.validate();
    if !report.is_ok() {
        return Err(EncodeError::InvalidSituation(report));
    }
    let mut g = Graph::new();
    let node = vocab.odang(&situation.id);
    g.insert(Triple::new(&node, &vocab.rdf_type, &vocab.situation));
    for p in &situation.participants {
        let pnode = participant_iri(vocab, &p.entity);
        g.insert(Triple::new(&node, &vocab.is_setting_for, &pnode));
        g.insert(Triple::new(&pnode, &vocab.has_role, role_iri(vocab, p.role)));
        match &p.entity {
            ParticipantEntity::Message(m) => {
                g.insert(Triple::new(&pnode, &vocab.rdf_type, vocab.odang(m.genre.class_name())));
                g.insert(Triple::new(&pnode, &vocab.has_text, Literal::string(m.text.clone())));
            }
            ParticipantEntity::Person(person) => {
                encode_person_into(vocab, person, FactProfile::Situation, &mut g);
            }
            ParticipantEntity::Group(_) => {
                g.insert(Triple::new(&pnode, &vocab.rdf_type, &vocab.group));
            }
        }
        if let Some(target_key) = &p.target {
            let target = situation
                .participants
                .iter()
                .find(|q| q.entity.key() == target_key)
                .expect("validated: target is a participant");
            g.insert(Triple::new(&pnode, &vocab.has_target, participant_iri(vocab, &target.entity)));
        }
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;
    use std::sync::Arc;

    use super::*;
    use crate::model::entities::{AnnotationScheme, Participant};

    fn hs() -> Arc<AnnotationScheme> {
        Arc::new(AnnotationScheme::new("hate speech", ValueDomain::Binary))
    }

    fn headline() -> Message {
        Message::new(
            "poplit_1",
            "Alessandria, straniero con ascia e martello aggredisce coppia in casa",
            Genre::NewsHeadline,
            "poplit",
        )
    }

    fn rec(m: &Message, v: i64, a: AnnotatorId) -> AnnotationRecord {
        AnnotationRecord {
            message_ref: m.id.clone(),
            scheme: hs(),
            value: AnnotationValue::Int(v),
            annotator: a,
        }
    }

    fn count_pred(g: &Graph, p: &Iri) -> usize {
        g.iter().filter(|t| &t.predicate == p).count()
    }

    #[test]
    fn disagreeing_annotators_get_separate_descriptions() {
        let v = Vocabulary::default();
        let m = headline();
        let records = [rec(&m, 1, AnnotatorId::individual(1)), rec(&m, 0, AnnotatorId::individual(2))];
        let g = encode_message(&v, &m, &records).unwrap();
        let descs: BTreeSet<_> = g
            .iter()
            .filter(|t| t.predicate == v.is_described)
            .map(|t| t.object.clone())
            .collect();
        assert_eq!(descs.len(), 2);
        assert_eq!(count_pred(&g, &v.prov_was_attributed_to), 2);
        for d in &descs {
            let d = d.as_iri().unwrap();
            let attributions = g
                .iter()
                .filter(|t| t.subject == d.into() && t.predicate == v.prov_was_attributed_to)
                .count();
            assert_eq!(attributions, 1);
        }
    }

    #[test]
    fn unannotated_message_only_has_expression_triples() {
        let v = Vocabulary::default();
        let m = headline();
        let g = encode_message(&v, &m, &[]).unwrap();
        // type, text, embodiment, manifestation type, one membership
        assert_eq!(g.len(), 5);
        assert_eq!(count_pred(&g, &v.dul_is_part_of), 1);
    }

    #[test]
    fn two_corpora_two_memberships() {
        let v = Vocabulary::default();
        let mut m = headline();
        m.corpus_ids.insert("other".into());
        let g = encode_message(&v, &m, &[]).unwrap();
        assert_eq!(count_pred(&g, &v.dul_is_part_of), 2);
    }

    #[test]
    fn dangling_record() {
        let v = Vocabulary::default();
        let m = headline();
        let mut r = rec(&m, 1, AnnotatorId::GoldStandard);
        r.message_ref = "elsewhere".into();
        assert!(matches!(
            encode_message(&v, &m, &[r]),
            Err(EncodeError::DanglingRecord { .. })
        ));
    }

    #[test]
    fn person_with_id_only_is_one_triple() {
        let v = Vocabulary::default();
        assert_eq!(encode_person(&v, &Person::new("usr_1")).len(), 1);
    }

    #[test]
    fn three_field_person_enumerated_by_hand() {
        let v = Vocabulary::default();
        let mut p = Person::new("usr_42");
        p.handle = Some("@someone".into());
        p.platform_id = Some("1234".into());
        p.facts = Some(PersonFacts {
            birth_year: Some(1970),
            ..Default::default()
        });
        let node = Iri::new("https://w3id.org/odang#usr_42").unwrap();
        let expected: Graph = [
            Triple::new(
                &node,
                Iri::new("http://www.w3.org/1999/02/22-rdf-syntax-ns#type").unwrap(),
                Iri::new("https://w3id.org/odang#Person").unwrap(),
            ),
            Triple::new(
                &node,
                Iri::new("https://w3id.org/odang#handle").unwrap(),
                Literal::string("@someone"),
            ),
            Triple::new(&node, Iri::new("https://w3id.org/odang#hasID").unwrap(), Literal::integer(1234)),
            Triple::new(
                &node,
                Iri::new("https://w3id.org/odang#birthYear").unwrap(),
                Literal::integer(1970),
            ),
        ]
        .into_iter()
        .collect();
        assert_eq!(encode_person(&v, &p), expected);
    }

    #[test]
    fn situation_without_agents() {
        let v = Vocabulary::default();
        let s = Situation {
            id: "situation_1".into(),
            participants: vec![Participant {
                entity: ParticipantEntity::Message(headline()),
                role: Role::HateSpeechMessage,
                target: None,
            }],
        };
        let g = encode_situation(&v, &s).unwrap();
        // situation type, isSettingFor, role, message type, text
        assert_eq!(g.len(), 5);
        assert_eq!(count_pred(&g, &v.is_setting_for), 1);
    }

    #[test]
    fn absent_facts_emit_nothing() {
        let v = Vocabulary::default();
        let mut p = Person::new("@x");
        p.facts = Some(PersonFacts::default());
        let s = Situation {
            id: "s".into(),
            participants: vec![
                Participant {
                    entity: ParticipantEntity::Message(headline()),
                    role: Role::HateSpeechMessage,
                    target: None,
                },
                Participant {
                    entity: ParticipantEntity::Person(p),
                    role: Role::Addressee,
                    target: None,
                },
            ],
        };
        let g = encode_situation(&v, &s).unwrap();
        for prop in [&v.gender, &v.birth_year, &v.citizenship, &v.place_of_birth] {
            assert_eq!(count_pred(&g, prop), 0);
        }
    }

    #[test]
    fn invalid_situation_rejected() {
        let v = Vocabulary::default();
        let s = Situation {
            id: "s".into(),
            participants: vec![],
        };
        assert!(matches!(encode_situation(&v, &s), Err(EncodeError::InvalidSituation(_))));
    }

    #[test]
    fn categorical_values_become_iris() {
        let v = Vocabulary::default();
        let stance = Arc::new(AnnotationScheme::new(
            "stance",
            ValueDomain::Categorical(vec!["against".into(), "favor".into()]),
        ));
        let r = AnnotationRecord {
            message_ref: "m".into(),
            scheme: stance,
            value: AnnotationValue::Label("favor".into()),
            annotator: AnnotatorId::GoldStandard,
        };
        assert_eq!(
            value_term(&v, &r),
            Term::Iri(Iri::new("https://w3id.org/odang#Stance_favor").unwrap())
        );
    }
}
