use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use dskg::ingest::{ingest_corpus, parse_mapping};
use dskg::linker::{link_corpus, Clients, FixtureClients, LinkConfig};
use dskg::model::Vocabulary;
use dskg::rdf::serialize_ntriples;
use dskg::store::TripleStore;
use tempfile::TempDir;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures")
}

fn fx(rel: &str) -> String {
    fixtures().join(rel).display().to_string()
}

fn dskg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dskg")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "exit {:?}: {}", o.status.code(), String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).display().to_string()
}

#[test]
fn stats_of_an_empty_store() {
    let dir = TempDir::new().unwrap();
    let empty = path(&dir, "empty.nt");
    fs::write(&empty, "").unwrap();
    assert_eq!(stdout(&dskg(&["stats", "--store", &empty])).trim(), "0 0 0 0");
    let json: serde_json::Value = serde_json::from_str(&stdout(&dskg(&["stats", "--store", &empty, "--json"]))).unwrap();
    assert_eq!(json["triples"], 0);
}

#[test]
fn ingest_matches_the_golden_file() {
    let out = dskg(&["ingest", "--mapping", &fx("corpus/three_rows.toml"), "--input", &fx("corpus/three_rows.csv")]);
    assert_eq!(stdout(&out), fs::read_to_string(fx("corpus/three_rows.nt")).unwrap());
    let again = dskg(&["ingest", "--mapping", &fx("corpus/three_rows.toml"), "--input", &fx("corpus/three_rows.csv")]);
    assert_eq!(out.stdout, again.stdout);
    assert_eq!(stdout(&dskg(&["stats", "--store", &fx("corpus/three_rows.nt")])).trim(), "45 3 0 5");
}

#[test]
fn query_over_a_turtle_store() {
    let dir = TempDir::new().unwrap();
    let pattern = path(&dir, "q.txt");
    fs::write(&pattern, "?m :hasRole :HateSpeechMessage .\n?m :hasTarget :@ckyenge .\n").unwrap();
    let text = stdout(&dskg(&["query", "--store", &fx("kg/hate_situation.ttl"), "--pattern", &pattern]));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines, ["?m", "<https://w3id.org/.well-known/genid/b0>"]);

    let jsonl = stdout(&dskg(&["query", "--store", &fx("kg/hate_situation.ttl"), "--pattern", &pattern, "--jsonl"]));
    assert_eq!(jsonl.lines().count(), 1);

    let star = stdout(&dskg(&[
        "export",
        "--store",
        &fx("kg/hate_situation.ttl"),
        "--pattern",
        &pattern,
        "--project",
        "m",
    ]));
    assert_eq!(star.lines().count(), 5);
}

#[test]
fn ingest_link_profile_compose() {
    let dir = TempDir::new().unwrap();
    let kg = path(&dir, "kg.nt");
    let linked = path(&dir, "linked.nt");
    let report = path(&dir, "report.json");
    stdout(&dskg(&["ingest", "--mapping", &fx("corpus/mentions.toml"), "--input", &fx("corpus/mentions.csv"), "-o", &kg]));
    stdout(&dskg(&["link", "--store", &kg, "--fixtures", &fx("linker"), "-o", &linked, "--report", &report]));

    // same result as the library pipeline run in-process
    let v = Vocabulary::default();
    let spec = parse_mapping(&fs::read_to_string(fx("corpus/mentions.toml")).unwrap()).unwrap();
    let out = ingest_corpus(fs::read(fx("corpus/mentions.csv")).unwrap().as_slice(), &spec, &v).unwrap();
    let graph = out.to_graph(&v).unwrap();
    assert_eq!(fs::read_to_string(&kg).unwrap(), serialize_ntriples(&graph));
    let clients = FixtureClients::load(&fixtures().join("linker")).unwrap();
    let (persons, _) = link_corpus(
        &TripleStore::from_graph(&graph),
        &v,
        &Clients {
            handles: &clients.handles,
            search: &clients.search,
            facts: &clients.facts,
        },
        &LinkConfig::default(),
    );
    assert_eq!(fs::read_to_string(&linked).unwrap(), serialize_ntriples(&persons));
    let r: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r["linked"], 3);

    // three situation participants plus three linked persons
    let stats = stdout(&dskg(&["stats", "--store", &kg, "--store", &linked]));
    assert_eq!(stats.split_whitespace().nth(2), Some("6"));

    let table = stdout(&dskg(&[
        "profile",
        "--store",
        &kg,
        "--store",
        &linked,
        "--lexicon",
        &fx("lexicon/synthetic.tsv"),
    ]));
    let rows: Vec<&str> = table.lines().collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[1].starts_with("corpus_tw\t5\t"), "{}", rows[1]);
}

#[test]
fn class_rows_in_profile() {
    let dir = TempDir::new().unwrap();
    let kg = path(&dir, "cds.nt");
    stdout(&dskg(&["ingest", "--mapping", &fx("corpus/cds_classes.toml"), "--input", &fx("corpus/cds_classes.csv"), "-o", &kg]));
    let jsonl = path(&dir, "p.jsonl");
    let table = stdout(&dskg(&[
        "profile",
        "--store",
        &kg,
        "--lexicon",
        &fx("lexicon/synthetic.tsv"),
        "--levels",
        "conservative",
        "--class",
        "hate speech=1",
        "--class",
        "hate speech=0",
        "--columns",
        "CDS",
        "--jsonl",
        &jsonl,
    ]));
    let rows: Vec<Vec<&str>> = table.lines().map(|l| l.split('\t').collect()).collect();
    assert_eq!(rows[0], ["dataset", "documents", "CDS"]);
    assert_eq!(rows[1][1..], ["6", "1.5000"]);
    assert_eq!(rows[2][1..], ["3", "2.0000"]);
    assert_eq!(rows[3][1..], ["3", "1.0000"]);
    assert_eq!(fs::read_to_string(&jsonl).unwrap().lines().count(), 3);

    let missing = dskg(&["profile", "--store", &kg, "--lexicon", &fx("lexicon/synthetic.tsv"), "--class", "hate speech=7"]);
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn stereotype_fixture_validates() {
    let out = dskg(&[
        "stereotype",
        "--messages",
        &fx("stereotype/messages.csv"),
        "--annotations",
        &fx("stereotype/annotations.tsv"),
        "--profiles",
        &fx("stereotype/profiles.csv"),
    ]);
    let text = stdout(&out);
    assert!(text.contains("<https://w3id.org/ster#SonoPericolosi>"));
    // demographics stay out unless released
    assert!(!text.contains("<https://w3id.org/ster#birthCountry>"));
    let released = stdout(&dskg(&[
        "stereotype",
        "--messages",
        &fx("stereotype/messages.csv"),
        "--annotations",
        &fx("stereotype/annotations.tsv"),
        "--profiles",
        &fx("stereotype/profiles.csv"),
        "--release-demographics",
    ]));
    assert!(released.contains("<https://w3id.org/ster#Italy>"));
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    // validation problems: an out-of-domain value
    let table = path(&dir, "bad.csv");
    fs::write(&table, "id,text,hs_a1,hs_a2\n1,ok,1,0\n2,no,5,0\n").unwrap();
    let out = dskg(&["ingest", "--mapping", &fx("corpus/three_rows.toml"), "--input", &table]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stdout.is_empty(), "valid rows are still written");

    // missing column
    fs::write(&table, "id,text,hs_a1\n1,ok,1\n").unwrap();
    let out = dskg(&["ingest", "--mapping", &fx("corpus/three_rows.toml"), "--input", &table]);
    assert_eq!(out.status.code(), Some(1));

    // unreadable and unparsable inputs
    let out = dskg(&["stats", "--store", &path(&dir, "nope.nt")]);
    assert_eq!(out.status.code(), Some(2));
    let broken = path(&dir, "broken.nt");
    fs::write(&broken, "<http://a/s> <http://a/p> .\n").unwrap();
    let out = dskg(&["stats", "--store", &broken]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));
}

#[test]
fn lexicon_export_is_deterministic() {
    let a = stdout(&dskg(&["lexicon", "--lexicon", &fx("lexicon/synthetic.tsv")]));
    let b = stdout(&dskg(&["lexicon", "--lexicon", &fx("lexicon/synthetic.tsv")]));
    assert_eq!(a, b);
    // conservative entries only by default
    let all = stdout(&dskg(&["lexicon", "--lexicon", &fx("lexicon/synthetic.tsv"), "--levels", "all"]));
    assert!(a.lines().count() < all.lines().count());
}
