use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use serde::Deserialize;

use dskg::ingest::{ingest_corpus, kg_stats, parse_mapping, IngestReport};
use dskg::lexprof::{
    dataset_profile, encode_lexicon_entry, load_lexicon, profile_jsonl, profile_table, Category, CategoryProfile,
    CountMode, Document, LevelFilter, LexiconIndex,
};
use dskg::linker::{link_corpus, Clients, FixtureClients, LinkConfig, MentionMode};
use dskg::model::encode::annotator_iri;
use dskg::model::{AnnotatorId, Genre, Graph, Literal, Message, Term, Vocabulary};
use dskg::rdf::ntriples::term_to_ntriples;
use dskg::rdf::prefix::DEFAULT_BASE;
use dskg::rdf::{parse_ntriples, write_ntriples, TurtleParser};
use dskg::stereotype::{
    encode_annotator_profile, encode_stereotype_set, load_stereotype_table, validate_clustering, ClusterRound,
    Privacy, StereotypeAnnotatorProfile,
};
use dskg::store::{export_subgraph, parse_pattern_with, query, Conjunct, Pattern, PatternTerm, TripleStore};

use crate::config::RunConfig;
use crate::{
    Cli, Command, CountArg, ExportArgs, IngestArgs, LevelsArg, LexiconArgs, LinkArgs, MentionsArg, ProfileArgs,
    QueryArgs, StatsArgs, StereotypeArgs,
};

/// Input that was read but does not satisfy the rules (exit status 1).
/// Every other error exits with 2.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct Invalid(pub String);

struct Ctx {
    vocab: Vocabulary,
    config: RunConfig,
}

pub fn run(cli: Cli) -> anyhow::Result<u8> {
    let config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let base = cli.base.clone().or_else(|| config.base.clone()).unwrap_or_else(|| DEFAULT_BASE.to_string());
    let vocab = Vocabulary::with_base(&base).with_context(|| format!("base IRI `{base}`"))?;
    let ctx = Ctx { vocab, config };
    match cli.command {
        Command::Ingest(a) => ingest(&ctx, a),
        Command::Link(a) => link(&ctx, a),
        Command::Profile(a) => profile(&ctx, a),
        Command::Query(a) => run_query(&ctx, a),
        Command::Export(a) => export(&ctx, a),
        Command::Stats(a) => stats(&ctx, a),
        Command::Stereotype(a) => stereotype(&ctx, a),
        Command::Lexicon(a) => lexicon(&ctx, a),
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn output(path: Option<&PathBuf>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            fs::File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_graph(graph: &Graph, path: Option<&PathBuf>) -> anyhow::Result<()> {
    let mut w = output(path)?;
    write_ntriples(graph, &mut w)?;
    w.flush()?;
    Ok(())
}

fn write_json<T: serde::Serialize>(value: &T, path: &Path) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

/// Loads every file into one store. `.ttl` files go through the Turtle
/// reader, everything else is read as N-Triples.
fn load_store(ctx: &Ctx, paths: &[PathBuf]) -> anyhow::Result<TripleStore> {
    let mut store = TripleStore::new();
    for path in paths {
        let text = read(path)?;
        let graph = if path.extension().is_some_and(|e| e == "ttl") {
            TurtleParser::new(ctx.vocab.prefixes())
                .with_genid_base(ctx.vocab.genid_base())
                .parse(&text)
        } else {
            parse_ntriples(&text)
        }
        .with_context(|| format!("parsing {}", path.display()))?;
        let added = store.insert(&graph);
        log::info!("{}: {} triples, {added} new", path.display(), graph.len());
    }
    Ok(store)
}

fn load_pattern(ctx: &Ctx, path: &Path) -> anyhow::Result<Pattern> {
    parse_pattern_with(&read(path)?, ctx.vocab.prefixes()).with_context(|| format!("pattern {}", path.display()))
}

fn ingest(ctx: &Ctx, a: IngestArgs) -> anyhow::Result<u8> {
    let spec = parse_mapping(&read(&a.mapping)?).with_context(|| format!("mapping {}", a.mapping.display()))?;
    let mut graph = Graph::new();
    let mut total = IngestReport::default();
    for input in &a.inputs {
        let file = fs::File::open(input).with_context(|| format!("opening {}", input.display()))?;
        let out = match ingest_corpus(file, &spec, &ctx.vocab) {
            Ok(out) => out,
            Err(e @ dskg::ingest::IngestError::ColumnMissing(_)) => {
                return Err(Invalid(format!("{}: {e}", input.display())).into())
            }
            Err(e) => return Err(anyhow!(e).context(format!("reading {}", input.display()))),
        };
        graph.extend(out.to_graph(&ctx.vocab)?);
        let r = out.report;
        total.rows_read += r.rows_read;
        total.messages_emitted += r.messages_emitted;
        total.records_emitted += r.records_emitted;
        total.situations_emitted += r.situations_emitted;
        for v in &r.violations {
            eprintln!("{}: row {}: {}", input.display(), v.row, v.reason);
        }
        total.violations.extend(r.violations);
    }
    write_graph(&graph, a.output.as_ref())?;
    if let Some(path) = &a.report {
        write_json(&total, path)?;
    }
    eprintln!(
        "rows {} messages {} records {} situations {} violations {}",
        total.rows_read,
        total.messages_emitted,
        total.records_emitted,
        total.situations_emitted,
        total.violations.len()
    );
    Ok(if total.violations.is_empty() { 0 } else { 1 })
}

fn link(ctx: &Ctx, a: LinkArgs) -> anyhow::Result<u8> {
    let store = load_store(ctx, &a.store.stores)?;
    let file = &ctx.config.link;
    let mentions = match a.mentions {
        Some(MentionsArg::Leading) => MentionMode::Leading,
        Some(MentionsArg::All) => MentionMode::All,
        None => match file.mentions.as_deref() {
            None | Some("all") => MentionMode::All,
            Some("leading") => MentionMode::Leading,
            Some(other) => bail!("link.mentions: expected `all` or `leading`, found `{other}`"),
        },
    };
    let defaults = LinkConfig::default();
    let config = LinkConfig {
        min_score: a.min_score.or(file.min_score).unwrap_or(defaults.min_score),
        candidate_limit: a.limit.or(file.candidate_limit).unwrap_or(defaults.candidate_limit),
        mentions,
        case_fold: a.case_fold || file.case_fold.unwrap_or(defaults.case_fold),
    };
    let (graph, report, log) = if a.live {
        live_link(ctx, &store, &config)?
    } else {
        let dir = a.fixtures.as_ref().expect("clap requires --fixtures without --live");
        let fx = FixtureClients::load(dir)?;
        let clients = Clients {
            handles: &fx.handles,
            search: &fx.search,
            facts: &fx.facts,
        };
        let (graph, report) = link_corpus(&store, &ctx.vocab, &clients, &config);
        (graph, report, fx.log)
    };
    write_graph(&graph, a.output.as_ref())?;
    if let Some(path) = &a.report {
        write_json(&report, path)?;
    }
    if let Some(path) = &a.exchange_log {
        let mut f = fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .with_context(|| format!("opening {}", path.display()))?;
        f.write_all(log.to_jsonl().as_bytes())?;
    }
    eprintln!(
        "mentions {} linked {} no_exact_match {} low_score {} unresolved {} errors {} ties {}",
        report.mentions_seen,
        report.linked,
        report.rejected_no_exact_match,
        report.rejected_low_score,
        report.unresolved,
        report.errors,
        report.ties
    );
    Ok(0)
}

#[cfg(feature = "live")]
fn live_link(
    ctx: &Ctx,
    store: &TripleStore,
    config: &LinkConfig,
) -> anyhow::Result<(Graph, dskg::linker::LinkReport, dskg::linker::ExchangeLog)> {
    use dskg::linker::live::{LiveHandleResolver, LiveKgSearch, LiveWikidataFacts};
    let env = |name: &str| std::env::var(name).with_context(|| format!("{name} is not set"));
    let log = dskg::linker::ExchangeLog::new();
    let handles = LiveHandleResolver::new(env("DSKG_X_BEARER_TOKEN")?, log.clone());
    let search = LiveKgSearch::new(env("DSKG_GOOGLE_KG_API_KEY")?, log.clone());
    let facts = LiveWikidataFacts::new(log.clone());
    let clients = Clients {
        handles: &handles,
        search: &search,
        facts: &facts,
    };
    let (graph, report) = link_corpus(store, &ctx.vocab, &clients, config);
    Ok((graph, report, log))
}

#[cfg(not(feature = "live"))]
fn live_link(
    _ctx: &Ctx,
    _store: &TripleStore,
    _config: &LinkConfig,
) -> anyhow::Result<(Graph, dskg::linker::LinkReport, dskg::linker::ExchangeLog)> {
    bail!("this build has no network clients; rebuild with `--features live`")
}

fn level_filter(arg: Option<LevelsArg>, file: Option<&str>) -> anyhow::Result<LevelFilter> {
    Ok(match (arg, file) {
        (Some(LevelsArg::Conservative), _) | (None, None | Some("conservative")) => LevelFilter::ConservativeOnly,
        (Some(LevelsArg::All), _) | (None, Some("all")) => LevelFilter::All,
        (None, Some(other)) => bail!("levels: expected `conservative` or `all`, found `{other}`"),
    })
}

/// (message IRI, text, corpus IRI) for every Expression in the store.
fn store_documents(ctx: &Ctx, store: &TripleStore) -> Vec<(String, String, Option<String>)> {
    let v = &ctx.vocab;
    let texts = Pattern::new(vec![
        Conjunct::new(PatternTerm::var("m"), v.rdf_type.clone(), Term::Iri(v.frbr_expression.clone())),
        Conjunct::new(PatternTerm::var("m"), v.has_text.clone(), PatternTerm::var("t")),
    ]);
    let parts = Pattern::new(vec![Conjunct::new(PatternTerm::var("m"), v.dul_is_part_of.clone(), PatternTerm::var("c"))]);
    let mut corpus_of: BTreeMap<String, String> = BTreeMap::new();
    for row in query(store, &parts).expect("fixed pattern is valid").rows {
        if let (Some(c), Some(m)) = (row[0].as_iri(), row[1].as_iri()) {
            corpus_of.entry(m.as_str().to_string()).or_insert_with(|| c.as_str().to_string());
        }
    }
    query(store, &texts)
        .expect("fixed pattern is valid")
        .rows
        .into_iter()
        .filter_map(|row| {
            let m = row[0].as_iri()?.as_str().to_string();
            let t = row[1].as_literal()?.lexical().to_string();
            let c = corpus_of.get(&m).cloned();
            Some((m, t, c))
        })
        .collect()
}

/// Messages whose `annotator` label for `scheme` is `value`. Integer values
/// match integer literals; anything else matches the categorical value IRI.
fn class_members(ctx: &Ctx, store: &TripleStore, class: &str, annotator: &AnnotatorId) -> anyhow::Result<BTreeSet<String>> {
    let (scheme, value) = class
        .split_once('=')
        .ok_or_else(|| anyhow!("--class expects `scheme=value`, found `{class}`"))?;
    let scheme = dskg::model::AnnotationScheme::new(scheme.trim(), dskg::model::ValueDomain::Binary);
    let class_iri = ctx.vocab.odang(&scheme.class_name());
    let value = value.trim();
    let value_term: Term = match value.parse::<i64>() {
        Ok(n) => Term::Literal(Literal::integer(n)),
        Err(_) => Term::Iri(ctx.vocab.odang(&format!("{}_{value}", scheme.class_name()))),
    };
    let v = &ctx.vocab;
    let pattern = Pattern::new(vec![
        Conjunct::new(PatternTerm::var("m"), v.is_described.clone(), PatternTerm::var("d")),
        Conjunct::new(PatternTerm::var("d"), v.rdf_type.clone(), Term::Iri(class_iri)),
        Conjunct::new(PatternTerm::var("d"), v.has_value.clone(), value_term),
        Conjunct::new(
            PatternTerm::var("d"),
            v.prov_was_attributed_to.clone(),
            Term::Iri(annotator_iri(v, annotator)),
        ),
    ]);
    let solutions = query(store, &pattern)?;
    Ok(solutions
        .column("m")
        .unwrap_or_default()
        .into_iter()
        .filter_map(|t| t.as_iri().map(|i| i.as_str().to_string()))
        .collect())
}

fn local_name<'a>(ctx: &Ctx, iri: &'a str) -> &'a str {
    iri.strip_prefix(ctx.vocab.base().as_str()).unwrap_or(iri)
}

fn profile(ctx: &Ctx, a: ProfileArgs) -> anyhow::Result<u8> {
    let file = &ctx.config.profile;
    let filter = level_filter(a.levels, file.levels.as_deref())?;
    let mode = match (a.count, file.count.as_deref()) {
        (Some(CountArg::Occurrences), _) | (None, None | Some("occurrences")) => CountMode::Occurrences,
        (Some(CountArg::Presence), _) | (None, Some("presence")) => CountMode::Presence,
        (None, Some(other)) => bail!("profile.count: expected `occurrences` or `presence`, found `{other}`"),
    };
    let column_names = if a.columns.is_empty() { file.columns.clone().unwrap_or_default() } else { a.columns.clone() };
    let columns = column_names
        .iter()
        .map(|c| c.parse::<Category>().map_err(|e| anyhow!("column `{c}`: {e}")))
        .collect::<anyhow::Result<Vec<_>>>()?;
    let entries = load_lexicon(&read(&a.lexicon)?, filter).with_context(|| format!("lexicon {}", a.lexicon.display()))?;
    let index = LexiconIndex::build(&entries);
    let store = load_store(ctx, &a.store.stores)?;
    let docs = store_documents(ctx, &store);
    if docs.is_empty() {
        return Err(Invalid("the store holds no messages with text".into()).into());
    }

    let mut by_corpus: BTreeMap<String, Vec<Document>> = BTreeMap::new();
    let all: Vec<Document> = docs.iter().map(|(m, t, _)| Document::new(m.clone(), t)).collect();
    for (m, t, c) in &docs {
        let name = c.as_deref().map(|c| local_name(ctx, c).to_string()).unwrap_or_else(|| "unassigned".into());
        by_corpus.entry(name).or_default().push(Document::new(m.clone(), t));
    }
    let mut rows: Vec<(String, CategoryProfile)> = Vec::new();
    for (name, docs) in &by_corpus {
        rows.push((name.clone(), dataset_profile(docs, &index, mode)?));
    }
    if by_corpus.len() > 1 {
        rows.push(("all".into(), dataset_profile(&all, &index, mode)?));
    }
    let annotator: AnnotatorId = a.annotator.parse().expect("infallible");
    for class in &a.classes {
        let members = class_members(ctx, &store, class, &annotator)?;
        let selected: Vec<Document> = all.iter().filter(|d| members.contains(&d.id)).cloned().collect();
        if selected.is_empty() {
            return Err(Invalid(format!("no message is labelled `{class}` by {annotator}")).into());
        }
        rows.push((class.clone(), dataset_profile(&selected, &index, mode)?));
    }

    let mut w = output(a.output.as_ref())?;
    w.write_all(profile_table(&rows, &columns).as_bytes())?;
    w.flush()?;
    if let Some(path) = &a.jsonl {
        fs::write(path, profile_jsonl(&rows)).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(0)
}

fn run_query(ctx: &Ctx, a: QueryArgs) -> anyhow::Result<u8> {
    let store = load_store(ctx, &a.store.stores)?;
    let pattern = load_pattern(ctx, &a.pattern)?;
    let solutions = query(&store, &pattern)?;
    let mut w = output(a.output.as_ref())?;
    if a.jsonl {
        for map in solutions.to_maps() {
            let obj: BTreeMap<&str, String> = map.iter().map(|(k, t)| (k.as_str(), term_to_ntriples(t))).collect();
            writeln!(w, "{}", serde_json::to_string(&obj)?)?;
        }
    } else {
        let header: Vec<String> = solutions.variables.iter().map(|v| format!("?{v}")).collect();
        writeln!(w, "{}", header.join("\t"))?;
        let mut lines: Vec<String> = solutions
            .rows
            .iter()
            .map(|row| row.iter().map(term_to_ntriples).collect::<Vec<_>>().join("\t"))
            .collect();
        lines.sort();
        for line in lines {
            writeln!(w, "{line}")?;
        }
    }
    w.flush()?;
    Ok(0)
}

fn export(ctx: &Ctx, a: ExportArgs) -> anyhow::Result<u8> {
    let store = load_store(ctx, &a.store.stores)?;
    let pattern = load_pattern(ctx, &a.pattern)?;
    let projection: Vec<&str> = a.project.iter().map(String::as_str).collect();
    let graph = export_subgraph(&store, &pattern, &projection)?;
    write_graph(&graph, a.output.as_ref())?;
    Ok(0)
}

fn stats(ctx: &Ctx, a: StatsArgs) -> anyhow::Result<u8> {
    let store = load_store(ctx, &a.store.stores)?;
    let s = kg_stats(&store, &ctx.vocab);
    if a.json {
        println!("{}", serde_json::to_string(&s)?);
    } else {
        println!("{} {} {} {}", s.triples, s.messages, s.users, s.records);
    }
    Ok(0)
}

#[derive(Debug, Deserialize)]
struct MessageRow {
    id: String,
    text: String,
}

#[derive(Debug, Deserialize)]
struct ProfileRow {
    annotator: String,
    #[serde(default)]
    gender: Option<String>,
    #[serde(default)]
    age: Option<u32>,
    #[serde(default)]
    birth_country: Option<String>,
}

fn csv_rows<T: serde::de::DeserializeOwned>(path: &Path) -> anyhow::Result<Vec<T>> {
    let text = read(path)?;
    let delimiter = if text.lines().next().unwrap_or("").contains('\t') { b'\t' } else { b',' };
    csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .trim(csv::Trim::Headers)
        .from_reader(text.as_bytes())
        .deserialize()
        .collect::<Result<Vec<T>, _>>()
        .with_context(|| format!("reading {}", path.display()))
}

fn stereotype(ctx: &Ctx, a: StereotypeArgs) -> anyhow::Result<u8> {
    let file = &ctx.config.stereotype;
    let genre: Genre = a.genre.parse().map_err(|e| anyhow!("--genre: {e}"))?;
    let release = a.release_demographics || file.release_demographics.unwrap_or(false);
    let strict = !a.relaxed_caps && file.strict_caps.unwrap_or(true);

    let messages: BTreeMap<String, Message> = csv_rows::<MessageRow>(&a.messages)?
        .into_iter()
        .map(|r| (r.id.clone(), Message::new(r.id, r.text, genre, "stereotypes")))
        .collect();
    let set = match load_stereotype_table(&read(&a.annotations)?, &messages, &ctx.vocab) {
        Ok(set) => set,
        Err(e @ dskg::stereotype::TableError::Table(_)) => return Err(e.into()),
        Err(e) => return Err(Invalid(format!("{}: {e}", a.annotations.display())).into()),
    };
    let mut graph = encode_stereotype_set(&ctx.vocab, &set)?;

    let mut problems = Vec::new();
    for round in [ClusterRound::Ten, ClusterRound::Five] {
        problems.extend(validate_clustering(&set.phrases, &set.concepts, round, strict).violations);
    }
    if let Some(path) = &a.profiles {
        let privacy = if release { Privacy::Released } else { Privacy::Withheld };
        for row in csv_rows::<ProfileRow>(path)? {
            let mut p = StereotypeAnnotatorProfile::new(row.annotator.parse().expect("infallible"));
            p.gender = row.gender.filter(|g| !g.is_empty());
            p.age = row.age;
            p.birth_country = row
                .birth_country
                .filter(|c| !c.is_empty())
                .map(|c| ctx.vocab.ster(&c.split_whitespace().collect::<Vec<_>>().join("_")));
            let report = p.validate();
            problems.extend(report.violations);
            graph.extend(encode_annotator_profile(&ctx.vocab, &p, privacy));
        }
    }
    write_graph(&graph, a.output.as_ref())?;
    eprintln!(
        "chunks {} phrases {} concepts {}",
        set.chunks.len(),
        set.phrases.len(),
        set.concepts.len()
    );
    for p in &problems {
        eprintln!("{p}");
    }
    Ok(if problems.is_empty() { 0 } else { 1 })
}

fn lexicon(ctx: &Ctx, a: LexiconArgs) -> anyhow::Result<u8> {
    let filter = level_filter(a.levels, ctx.config.profile.levels.as_deref())?;
    let entries = match load_lexicon(&read(&a.lexicon)?, filter) {
        Ok(e) => e,
        Err(e @ dskg::lexprof::LexiconError::Table(_)) => return Err(e.into()),
        Err(e) => return Err(Invalid(format!("{}: {e}", a.lexicon.display())).into()),
    };
    let mut graph = Graph::new();
    for entry in &entries {
        graph.extend(encode_lexicon_entry(&ctx.vocab, entry));
    }
    write_graph(&graph, a.output.as_ref())?;
    Ok(0)
}
