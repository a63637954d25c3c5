//! Helpers shared by the integration test targets: fixture access,
//! hand-enumerated expected graphs, seeded generators, and reference
//! implementations written without the library's algorithms.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use dskg::lexprof::{Category, LexiconEntry};
use dskg::model::{BlankNode, Graph, Iri, Literal, Subject, Term, Triple};
use dskg::rdf::{parse_turtle_subset, PrefixMap};
use dskg::store::{Comparator, Conjunct, Pattern, PatternTerm};

pub fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(rel)
}

pub fn read_fixture(rel: &str) -> String {
    std::fs::read_to_string(fixture(rel)).unwrap_or_else(|e| panic!("{rel}: {e}"))
}

pub fn turtle_fixture(rel: &str) -> Graph {
    parse_turtle_subset(&read_fixture(rel), &PrefixMap::standard()).unwrap_or_else(|e| panic!("{rel}: {e}"))
}

// Namespaces spelled out here rather than taken from the library, so the
// expected sets do not depend on the prefix table under test.
pub const RDF: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
pub const RDFS: &str = "http://www.w3.org/2000/01/rdf-schema#";
pub const XSD: &str = "http://www.w3.org/2001/XMLSchema#";
pub const DUL: &str = "http://www.ontologydesignpatterns.org/ont/dul/DUL.owl#";
pub const PROV: &str = "http://www.w3.org/ns/prov#";
pub const FABIO: &str = "http://purl.org/spar/fabio/";
pub const ONTOLEX: &str = "http://www.w3.org/ns/lemon/ontolex#";
pub const LEXINFO: &str = "http://www.lexinfo.net/ontology/3.0/lexinfo#";
pub const STER: &str = "https://w3id.org/ster#";
pub const ODANG: &str = "https://w3id.org/odang#";
pub const GENID: &str = "https://w3id.org/.well-known/genid/";

/// Expands `prefix:local` with the table above; `_:bN` becomes the skolem
/// IRI the Turtle reader mints for the N-th anonymous node.
pub fn q(name: &str) -> Iri {
    if let Some(n) = name.strip_prefix("_:") {
        return Iri::new(format!("{GENID}{n}")).unwrap();
    }
    if name == "a" {
        return Iri::new(format!("{RDF}type")).unwrap();
    }
    let (prefix, local) = name.split_once(':').unwrap_or_else(|| panic!("not a qname: {name}"));
    let ns = match prefix {
        "rdf" => RDF,
        "rdfs" => RDFS,
        "xsd" => XSD,
        "dul" => DUL,
        "prov" => PROV,
        "fabio" => FABIO,
        "ontolex" => ONTOLEX,
        "lexinfo" => LEXINFO,
        "ster" => STER,
        "" | "odang" => ODANG,
        other => panic!("unknown prefix {other}"),
    };
    Iri::new(format!("{ns}{local}")).unwrap()
}

pub enum O {
    I(&'static str),
    S(&'static str),
    N(i64),
}

pub fn expected(rows: &[(&str, &str, O)]) -> Graph {
    rows.iter()
        .map(|(s, p, o)| {
            let o: Term = match o {
                O::I(name) => q(name).into(),
                O::S(text) => Literal::string(*text).into(),
                O::N(n) => Literal::integer(*n).into(),
            };
            Triple::new(q(s), q(p), o)
        })
        .collect()
}

/// Hand enumeration of `kg/annotator_profile.ttl`.
pub fn annotator_profile_expected() -> Graph {
    use O::*;
    expected(&[
        ("_:b0", "a", I("ster:Annotation")),
        ("_:b0", "ster:frame", S("i migranti sono pericolosi")),
        ("_:b0", "prov:wasAttributedTo", I("ster:annotator_02")),
        ("_:b0", "ster:wasClusteredAs", I("ster:Dangerous")),
        ("ster:Dangerous", "rdfs:subClassOf", I("ster:Stereotype")),
        ("ster:Dangerous", "prov:wasAttributedTo", I("ster:annotator_02")),
        ("ster:annotator_02", "a", I("ster:Annotator")),
        ("ster:annotator_02", "dul:isRoleOf", I("prov:Person")),
        ("ster:annotator_02", "ster:gender", S("female")),
        ("ster:annotator_02", "ster:age", N(29)),
        ("ster:annotator_02", "ster:birthCountry", I("ster:Italy")),
    ])
}

/// Hand enumeration of `kg/stereotype_chain.ttl`: entry b0, sense b1,
/// concept b2.
pub fn stereotype_chain_expected() -> Graph {
    use O::*;
    expected(&[
        ("_:b0", "a", I("ontolex:LexicalEntry")),
        ("_:b0", "ster:chunk", S("imputati stranieri vengono tutti a delinquere")),
        ("_:b0", "dul:isPartOf", I("fabio:WebContent")),
        ("_:b0", "prov:wasAttributedTo", I("ster:annotator_02")),
        ("_:b0", "ontolex:sense", I("_:b1")),
        ("_:b1", "a", I("ster:Annotation")),
        ("_:b1", "a", I("ontolex:LexicalSense")),
        ("_:b1", "ster:frame", S("gli immigrati sono delinquenti")),
        ("_:b1", "ontolex:isLexicalizedSenseOf", I("_:b2")),
        ("_:b2", "a", I("ster:Dangerous")),
        ("_:b2", "rdfs:subClassOf", I("ster:Stereotype")),
        ("_:b2", "rdfs:subClassOf", I("ontolex:LexicalConcept")),
        ("_:b2", "ster:hasTarget", I("ster:minorities")),
        ("_:b2", "prov:wasAttributedTo", I("ster:annotator_01")),
    ])
}

pub const KYENGE_TWEET: &str = "@ckyenge per fare sentire a casa voi africani e musulmani e stranieri";

/// Hand enumeration of `kg/hate_situation.ttl`; the tweet is b0.
pub fn hate_situation_expected() -> Graph {
    use O::*;
    expected(&[
        (":situation_1342", "a", I(":Situation")),
        (":situation_1342", ":isSettingFor", I(":@ckyenge")),
        (":situation_1342", ":isSettingFor", I("_:b0")),
        ("_:b0", "a", I(":Tweet")),
        ("_:b0", ":hasRole", I(":HateSpeechMessage")),
        ("_:b0", ":hasText", S(KYENGE_TWEET)),
        ("_:b0", ":hasTarget", I(":@ckyenge")),
        (":@ckyenge", "a", I(":Person")),
        (":@ckyenge", ":hasRole", I(":Addressee")),
        (":@ckyenge", ":gender", I(":female")),
        (":@ckyenge", ":citizenship", I(":ITA")),
        (":@ckyenge", ":placeOfBirth", I(":Kambove")),
    ])
}

/// Hand enumeration of `kg/linked_user.ttl`.
pub fn linked_user_expected() -> Graph {
    use O::*;
    expected(&[
        (":usr_7986", "a", I(":Person")),
        (":usr_7986", ":hasID", N(322933929)),
        (":usr_7986", ":gender", I(":female")),
        (":usr_7986", ":birthYear", N(1985)),
        (":usr_7986", ":countryOfCitizenship", I(":ITA")),
        (":usr_7986", ":placeOfBirth", I(":Lugano")),
        (":usr_7986", ":occupation", I(":politician")),
        (":usr_7986", ":politicalParty", I(":DemocraticParty")),
    ])
}

/// Hand enumeration of `kg/lexicon_entry.ttl`.
pub fn lexicon_entry_expected() -> Graph {
    use O::*;
    expected(&[
        (":IT1241", "a", I(":LexicalEntry")),
        (":IT1241", "rdfs:label", S("fannullone")),
        (":IT1241", "lexinfo:partOfSpeech", I(":Noun")),
        (":IT1241", ":isDescribed", I(":dmc")),
        (":dmc", "a", I(":Offensive")),
        (":dmc", "rdfs:label", S("moral defects")),
    ])
}

/// (fixture path, hand-enumerated set) for the four worked examples plus the
/// lexicon entry.
pub fn golden_blocks() -> Vec<(&'static str, Graph)> {
    vec![
        ("kg/annotator_profile.ttl", annotator_profile_expected()),
        ("kg/stereotype_chain.ttl", stereotype_chain_expected()),
        ("kg/hate_situation.ttl", hate_situation_expected()),
        ("kg/linked_user.ttl", linked_user_expected()),
        ("kg/lexicon_entry.ttl", lexicon_entry_expected()),
    ]
}

// ---------------------------------------------------------------------------
// Random triples

/// Unicode string biased towards characters that need escaping.
pub fn fuzz_string(rng: &mut ChaCha8Rng, max_len: usize) -> String {
    const SPECIAL: &[char] = &[
        '"', '\\', '\n', '\r', '\t', '\u{0}', '\u{7}', '\u{1f}', '\u{7f}', '\u{85}', '\u{2028}', '\u{feff}', 'é',
        'ß', '中', '😀', '\u{10ffff}', ' ', '>', '<', '_', '@', '.', '#',
    ];
    let len = rng.gen_range(0..=max_len);
    (0..len)
        .map(|_| match rng.gen_range(0..4) {
            0 => *SPECIAL.choose(rng).unwrap(),
            1 => rng.gen_range('a'..='z'),
            2 => loop {
                if let Some(c) = char::from_u32(rng.gen_range(0..0x11_0000)) {
                    break c;
                }
            },
            _ => rng.gen_range(' '..='~'),
        })
        .collect()
}

fn iri_local(rng: &mut ChaCha8Rng) -> String {
    const CHARS: &[char] = &['a', 'b', 'z', '0', '9', '_', '-', '.', '~', '%', 'é', '中', '😀', '/', '#', '@'];
    let len = rng.gen_range(1..12);
    let mut s: String = (0..len).map(|_| *CHARS.choose(rng).unwrap()).collect();
    if s.contains('%') {
        s = s.replace('%', "%41");
    }
    s
}

pub fn random_iri(rng: &mut ChaCha8Rng) -> Iri {
    let hosts = ["http://example.org/", "https://w3id.org/odang#", "urn:x:y", "http://a.b/c?d="];
    Iri::new(format!("{}{}", hosts.choose(rng).unwrap(), iri_local(rng))).unwrap()
}

pub fn random_subject(rng: &mut ChaCha8Rng) -> Subject {
    if rng.gen_bool(0.2) {
        let label = format!("b{}", rng.gen_range(0..50));
        Subject::Blank(BlankNode::new(label).unwrap())
    } else {
        Subject::Iri(random_iri(rng))
    }
}

pub fn random_object(rng: &mut ChaCha8Rng) -> Term {
    match rng.gen_range(0..7) {
        0 | 1 => Term::Iri(random_iri(rng)),
        2 => Term::Blank(BlankNode::new(format!("b{}", rng.gen_range(0..50))).unwrap()),
        3 => Literal::string(fuzz_string(rng, 24)).into(),
        4 => {
            let tags = ["it", "en", "en-GB", "de-CH-1901", "x-private"];
            Literal::lang_string(fuzz_string(rng, 16), *tags.choose(rng).unwrap()).unwrap().into()
        }
        5 => Literal::integer(rng.gen_range(i64::MIN..=i64::MAX)).into(),
        _ => Literal::typed(fuzz_string(rng, 12), random_iri(rng)).unwrap().into(),
    }
}

pub fn random_triple(rng: &mut ChaCha8Rng) -> Triple {
    Triple::new(random_subject(rng), random_iri(rng), random_object(rng))
}

// ---------------------------------------------------------------------------
// Random query cases and the reference matcher

pub fn qi(i: usize) -> Iri {
    Iri::new(format!("http://q.example/n{i}")).unwrap()
}

pub fn qp(i: usize) -> Iri {
    Iri::new(format!("http://q.example/p{i}")).unwrap()
}

/// Graph of at most `max` triples over 12 nodes, 4 predicates and a few
/// literals, dense enough for joins to matter.
pub fn random_query_graph(rng: &mut ChaCha8Rng, max: usize) -> Graph {
    let n = if rng.gen_bool(0.05) { rng.gen_range(0..=max) } else { rng.gen_range(max / 2..=max) };
    let mut g = Graph::new();
    for _ in 0..n {
        let s = qi(rng.gen_range(0..12));
        let p = qp(rng.gen_range(0..4));
        let o: Term = match rng.gen_range(0..10) {
            0..=5 => Term::Iri(qi(rng.gen_range(0..12))),
            6..=8 => Literal::integer(rng.gen_range(-3..8)).into(),
            _ => Literal::string(["x", "y", "7"].choose(rng).unwrap().to_string()).into(),
        };
        g.insert(Triple::new(s, p, o));
    }
    g
}

const VARS: [&str; 4] = ["x", "y", "z", "w"];

fn random_position(rng: &mut ChaCha8Rng, graph_terms: &[Term], predicate: bool) -> PatternTerm {
    if predicate {
        if rng.gen_bool(0.8) {
            return PatternTerm::Const(Term::Iri(qp(rng.gen_range(0..4))));
        }
        return PatternTerm::var("w");
    }
    if rng.gen_bool(0.75) || graph_terms.is_empty() {
        PatternTerm::var(VARS[rng.gen_range(0..3)])
    } else {
        PatternTerm::Const(graph_terms.choose(rng).unwrap().clone())
    }
}

/// Pattern with 1..=4 conjuncts and 0..=2 filters over bound variables.
pub fn random_pattern(rng: &mut ChaCha8Rng, graph: &Graph) -> Pattern {
    // constants mostly drawn from the graph, plus one that never occurs
    let mut terms: Vec<Term> = graph.iter().flat_map(|t| [t.subject.clone().into(), t.object.clone()]).collect();
    terms.push(Term::Iri(qi(99)));
    let k = rng.gen_range(1..=4);
    let conjuncts: Vec<Conjunct> = (0..k)
        .map(|_| Conjunct {
            s: random_position(rng, &terms, false),
            p: random_position(rng, &terms, true),
            o: random_position(rng, &terms, false),
        })
        .collect();
    let mut pattern = Pattern::new(conjuncts);
    let bound: Vec<String> = pattern.variables().into_iter().collect();
    if bound.is_empty() {
        return pattern;
    }
    for _ in 0..rng.gen_range(0..=2) {
        let var = bound.choose(rng).unwrap().clone();
        let ops = [
            Comparator::Eq,
            Comparator::Ne,
            Comparator::Lt,
            Comparator::Le,
            Comparator::Gt,
            Comparator::Ge,
        ];
        let op = *ops.choose(rng).unwrap();
        let value: Term = if op.is_numeric() {
            Literal::integer(rng.gen_range(-4..9)).into()
        } else {
            terms.choose(rng).unwrap().clone()
        };
        pattern = pattern.with_filter(&var, op, value);
    }
    pattern
}

fn integer_value(t: &Term) -> Option<i128> {
    let l = t.as_literal()?;
    if l.datatype().as_str() != format!("{XSD}integer") {
        return None;
    }
    l.lexical().parse().ok()
}

fn reference_filter(value: &Term, op: Comparator, c: &Term) -> bool {
    match op {
        Comparator::Eq => value == c,
        Comparator::Ne => value != c,
        _ => {
            let (Some(a), Some(b)) = (integer_value(value), integer_value(c)) else {
                return false;
            };
            match op {
                Comparator::Lt => a < b,
                Comparator::Le => a <= b,
                Comparator::Gt => a > b,
                Comparator::Ge => a >= b,
                _ => unreachable!(),
            }
        }
    }
}

/// Reference matcher: every combination of one triple per conjunct, kept
/// when the variable assignments agree and all filters hold.
pub fn reference_query(graph: &Graph, pattern: &Pattern) -> BTreeSet<BTreeMap<String, Term>> {
    let rows: Vec<[Term; 3]> = graph
        .iter()
        .map(|t| {
            let s: Term = t.subject.clone().into();
            [s, Term::Iri(t.predicate.clone()), t.object.clone()]
        })
        .collect();
    let mut out = BTreeSet::new();
    let mut stack: Vec<(usize, BTreeMap<String, Term>)> = vec![(0, BTreeMap::new())];
    while let Some((depth, binding)) = stack.pop() {
        if depth == pattern.conjuncts.len() {
            if pattern
                .filters
                .iter()
                .all(|f| reference_filter(&binding[&f.var], f.op, &f.value))
            {
                out.insert(binding);
            }
            continue;
        }
        let c = &pattern.conjuncts[depth];
        'rows: for row in &rows {
            let mut next = binding.clone();
            for (pt, term) in [&c.s, &c.p, &c.o].into_iter().zip(row) {
                match pt {
                    PatternTerm::Const(k) if k != term => continue 'rows,
                    PatternTerm::Const(_) => {}
                    PatternTerm::Var(v) => match next.get(v) {
                        Some(b) if b != term => continue 'rows,
                        Some(_) => {}
                        None => {
                            next.insert(v.clone(), term.clone());
                        }
                    },
                }
            }
            stack.push((depth + 1, next));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Profiling reference

/// Occurrence counts by trying every span length from the longest lemma
/// down at each position, skipping past a match. Lemmas are compared as
/// space-joined token strings.
pub fn reference_counts(tokens: &[String], entries: &[LexiconEntry]) -> BTreeMap<Category, u64> {
    let mut lemmas: BTreeMap<String, BTreeSet<Category>> = BTreeMap::new();
    for e in entries {
        let key = e.lemma.to_lowercase().split_whitespace().collect::<Vec<_>>().join(" ");
        lemmas.entry(key).or_default().insert(e.category);
    }
    let longest = lemmas.keys().map(|k| k.split(' ').count()).max().unwrap_or(0);
    let mut counts: BTreeMap<Category, u64> = Category::ALL.iter().map(|&c| (c, 0)).collect();
    let mut i = 0;
    while i < tokens.len() {
        let mut step = 1;
        for len in (1..=longest.min(tokens.len() - i)).rev() {
            let span = tokens[i..i + len].join(" ");
            if let Some(cats) = lemmas.get(&span) {
                for c in cats {
                    *counts.get_mut(c).unwrap() += 1;
                }
                step = len;
                break;
            }
        }
        i += step;
    }
    counts
}

/// Per-category exact means over `docs`.
pub fn reference_means(docs: &[Vec<String>], entries: &[LexiconEntry]) -> BTreeMap<Category, Ratio<u64>> {
    let n = docs.len() as u64;
    let mut sums: BTreeMap<Category, u64> = Category::ALL.iter().map(|&c| (c, 0)).collect();
    for d in docs {
        for (c, k) in reference_counts(d, entries) {
            *sums.get_mut(&c).unwrap() += k;
        }
    }
    sums.into_iter().map(|(c, s)| (c, Ratio::new(s, n))).collect()
}

/// Toy corpus of 1..=100 documents mixing lexicon lemmas (including their
/// multi-word forms and prefixes of them) with filler words.
pub fn random_corpus(rng: &mut ChaCha8Rng, entries: &[LexiconEntry]) -> Vec<Vec<String>> {
    const FILLER: &[&str] = &["il", "la", "di", "a", "testa", "faccia", "buono", "nulla", "sono", "ma", "oggi", "che"];
    let n = rng.gen_range(1..=100);
    (0..n)
        .map(|_| {
            let mut doc = Vec::new();
            let len = rng.gen_range(0..=40);
            while doc.len() < len {
                if rng.gen_bool(0.3) {
                    let e = entries.choose(rng).unwrap();
                    doc.extend(e.lemma.split_whitespace().map(str::to_string));
                } else {
                    doc.push(FILLER.choose(rng).unwrap().to_string());
                }
            }
            doc
        })
        .collect()
}

/// Reads `VmHWM` (peak resident set) in KiB from /proc, when available.
pub fn peak_rss_kib() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    status
        .lines()
        .find_map(|l| l.strip_prefix("VmHWM:"))
        .and_then(|v| v.trim().trim_end_matches("kB").trim().parse().ok())
}
