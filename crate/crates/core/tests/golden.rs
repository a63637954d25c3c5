mod common;

use std::collections::BTreeSet;

use common::*;
use dskg::ingest::{ingest_corpus, kg_stats, parse_mapping, KgStats};
use dskg::lexprof::{encode_lexicon_entry, load_lexicon, LevelFilter};
use dskg::model::{
    encode_person, encode_situation, AnnotatorId, Genre, Graph, Iri, Message, Participant, ParticipantEntity,
    Person, PersonFacts, Role, Situation, Term, Triple, Vocabulary,
};
use dskg::rdf::{parse_ntriples, parse_turtle_subset, serialize_ntriples, serialize_turtle, PrefixMap};
use dskg::stereotype::{
    encode_annotator_profile, encode_stereotype, Chunk, ClusterRound, MinimumPhrase, Privacy,
    StereotypeAnnotatorProfile, StereotypeConcept,
};
use dskg::store::TripleStore;

#[test]
fn worked_examples_parse_to_enumerated_sets() {
    for (path, want) in golden_blocks() {
        let got = turtle_fixture(path);
        let missing: Vec<_> = want.difference(&got).collect();
        let extra: Vec<_> = got.difference(&want).collect();
        assert!(missing.is_empty() && extra.is_empty(), "{path}: missing {missing:#?}\nextra {extra:#?}");
    }
}

#[test]
fn worked_examples_survive_both_serializers() {
    let prefixes = PrefixMap::standard();
    for (path, want) in golden_blocks() {
        let nt = serialize_ntriples(&want);
        assert_eq!(parse_ntriples(&nt).unwrap(), want, "{path} via N-Triples");
        let ttl = serialize_turtle(&want, &prefixes);
        assert_eq!(parse_turtle_subset(&ttl, &prefixes).unwrap(), want, "{path} via Turtle");
    }
}

#[test]
fn linked_person_encoding_equals_fixture() {
    let v = Vocabulary::default();
    let mut p = Person::new("usr_7986");
    p.platform_id = Some("322933929".into());
    p.facts = Some(PersonFacts {
        gender: Some("female".into()),
        birth_year: Some(1985),
        country_of_citizenship: Some(v.odang("ITA")),
        place_of_birth: Some(v.odang("Lugano")),
        occupation: Some(v.odang("politician")),
        political_party: Some(v.odang("DemocraticParty")),
    });
    assert_eq!(encode_person(&v, &p), linked_user_expected());
}

#[test]
fn situation_encoding_equals_fixture_up_to_the_tweet_node() {
    let v = Vocabulary::default();
    let tweet = Message::new("1342_t", KYENGE_TWEET, Genre::Tweet, "tw");
    let mut kyenge = Person::new("@ckyenge");
    kyenge.facts = Some(PersonFacts {
        gender: Some("female".into()),
        country_of_citizenship: Some(v.odang("ITA")),
        place_of_birth: Some(v.odang("Kambove")),
        ..PersonFacts::default()
    });
    let situation = Situation {
        id: "situation_1342".into(),
        participants: vec![
            Participant {
                entity: ParticipantEntity::Person(kyenge),
                role: Role::Addressee,
                target: None,
            },
            Participant {
                entity: ParticipantEntity::Message(tweet),
                role: Role::HateSpeechMessage,
                target: Some("@ckyenge".into()),
            },
        ],
    };
    let got = encode_situation(&v, &situation).unwrap();
    let tweet_node = Term::Iri(q(":tweet_1342_t"));
    let b0 = q("_:b0");
    let renamed: Graph = got
        .iter()
        .map(|t| {
            let s: Term = t.subject.clone().into();
            let s = if s == tweet_node { b0.clone() } else { t.subject.as_iri().unwrap().clone() };
            let o = if t.object == tweet_node { Term::Iri(b0.clone()) } else { t.object.clone() };
            Triple::new(s, t.predicate.clone(), o)
        })
        .collect();
    assert_eq!(renamed, hate_situation_expected());
}

#[test]
fn lexicon_entry_encoding_equals_fixture() {
    let v = Vocabulary::default();
    let entries = load_lexicon(&read_fixture("lexicon/synthetic.tsv"), LevelFilter::All).unwrap();
    let entry = entries.iter().find(|e| e.id == "IT1241").unwrap();
    assert_eq!(encode_lexicon_entry(&v, entry), lexicon_entry_expected());
}

#[test]
fn released_annotator_profile_is_in_fixture() {
    let v = Vocabulary::default();
    let mut p = StereotypeAnnotatorProfile::new(AnnotatorId::Individual("annotator_02".into()));
    p.gender = Some("female".into());
    p.age = Some(29);
    p.birth_country = Some(v.ster("Italy"));
    let got = encode_annotator_profile(&v, &p, Privacy::Released);
    let fixture = annotator_profile_expected();
    assert_eq!(got.len(), 5);
    assert!(got.is_subset(&fixture));
    let withheld = encode_annotator_profile(&v, &p, Privacy::Withheld);
    assert_eq!(withheld.len(), 2);
    assert!(withheld.iter().all(|t| t.predicate.as_str() == format!("{RDF}type") || t.predicate.as_str() == format!("{DUL}isRoleOf")));
}

#[test]
fn stereotype_chain_has_the_fixture_shape() {
    let v = Vocabulary::default();
    let text = "imputati stranieri vengono tutti a delinquere, dice il giornale";
    let msg = Message::new("s01", text, Genre::Tweet, "st");
    let a2 = AnnotatorId::Individual("annotator_02".into());
    let a1 = AnnotatorId::Individual("annotator_01".into());
    let chunk = Chunk::from_span("c1", &msg, 0, 45, a2.clone()).unwrap();
    assert_eq!(chunk.text, "imputati stranieri vengono tutti a delinquere");
    let phrase = MinimumPhrase {
        id: "p1".into(),
        frame: "gli immigrati sono delinquenti".into(),
        chunk_ref: "c1".into(),
        annotator: a2.clone(),
    };
    let concept = StereotypeConcept {
        label: "Dangerous".into(),
        round: ClusterRound::Five,
        annotator: a1,
        members: BTreeSet::from(["p1".to_string()]),
        target: v.ster("minorities"),
    };
    let g = encode_stereotype(&v, &chunk, &phrase, &concept).unwrap();
    let concept_iri = q("ster:Dangerous");
    let has = |s: &Iri, p: &str, o: Term| g.contains(&Triple::new(s, q(p), o));
    assert!(has(&concept_iri, "ster:hasTarget", Term::Iri(q("ster:minorities"))));
    assert!(has(&concept_iri, "rdfs:subClassOf", Term::Iri(q("ster:Stereotype"))));
    assert!(has(&concept_iri, "rdfs:subClassOf", Term::Iri(q("ontolex:LexicalConcept"))));
    assert!(has(&concept_iri, "prov:wasAttributedTo", Term::Iri(q("ster:annotator_01"))));

    // entry -> sense -> concept, with distinct attributions on both ends
    let entry = g
        .iter()
        .find(|t| t.predicate == q("ontolex:sense"))
        .map(|t| (t.subject.as_iri().unwrap().clone(), t.object.as_iri().unwrap().clone()))
        .unwrap();
    assert!(has(&entry.0, "a", Term::Iri(q("ontolex:LexicalEntry"))));
    assert!(has(&entry.0, "dul:isPartOf", Term::Iri(q(":tweet_s01"))));
    assert!(has(&entry.1, "ontolex:isLexicalizedSenseOf", Term::Iri(concept_iri.clone())));
    assert!(has(&entry.1, "prov:wasAttributedTo", Term::Iri(q("ster:annotator_02"))));
}

#[test]
fn three_row_corpus_matches_golden_file() {
    let v = Vocabulary::default();
    let spec = parse_mapping(&read_fixture("corpus/three_rows.toml")).unwrap();
    let out = ingest_corpus(read_fixture("corpus/three_rows.csv").as_bytes(), &spec, &v).unwrap();
    assert_eq!(out.report.messages_emitted, 3);
    assert_eq!(out.report.records_emitted, 5);
    assert!(out.report.violations.is_empty());
    let graph = out.to_graph(&v).unwrap();
    assert_eq!(serialize_ntriples(&graph), read_fixture("corpus/three_rows.nt"));
}

/// Counted by hand from the fixture: per message 5 expression triples
/// (type, text, embodiment, manifestation type, membership), per record 5
/// description triples (isDescribed, two types, value, attribution), plus
/// the shared scheme subclass triple and 2 triples per annotator.
#[test]
fn three_row_golden_file_has_the_hand_counted_shape() {
    let g = parse_ntriples(&read_fixture("corpus/three_rows.nt")).unwrap();
    assert_eq!(g.len(), 3 * 5 + 5 * 5 + 1 + 2 * 2);
    let store = TripleStore::from_graph(&g);
    let stats = kg_stats(&store, &Vocabulary::default());
    assert_eq!(
        stats,
        KgStats {
            triples: 45,
            messages: 3,
            users: 0,
            records: 5
        }
    );
    let msg101 = q(":msg_fx_101");
    let described = g
        .iter()
        .filter(|t| t.subject.as_iri() == Some(&msg101) && t.predicate == q(":isDescribed"))
        .count();
    assert_eq!(described, 2);
    let msg102 = q(":msg_fx_102");
    let described = g
        .iter()
        .filter(|t| t.subject.as_iri() == Some(&msg102) && t.predicate == q(":isDescribed"))
        .count();
    assert_eq!(described, 1, "the empty annotator cell produces no record");
}

#[test]
fn empty_store_stats_are_zero() {
    let store = TripleStore::new();
    assert_eq!(kg_stats(&store, &Vocabulary::default()), KgStats::default());
}
