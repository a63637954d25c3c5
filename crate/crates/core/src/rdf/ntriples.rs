//! Canonical N-Triples.
//!
//! Output is one triple per line terminated by ` .\n`, lines ordered by the
//! serialized (subject, predicate, object) forms, so equal sets always give
//! identical bytes.

use std::io::{self, Write};

use rayon::prelude::*;

use crate::model::term::{Graph, Literal, Subject, Term, Triple, XSD_STRING};
use crate::rdf::lex::{escape_literal_into, Cursor};
use crate::rdf::RdfError;

pub(crate) fn write_subject(s: &Subject, out: &mut String) {
    match s {
        Subject::Iri(iri) => {
            out.push('<');
            out.push_str(iri.as_str());
            out.push('>');
        }
        Subject::Blank(b) => {
            out.push_str("_:");
            out.push_str(b.label());
        }
    }
}

pub(crate) fn write_literal(lit: &Literal, out: &mut String) {
    out.push('"');
    escape_literal_into(lit.lexical(), out);
    out.push('"');
    if let Some(lang) = lit.lang() {
        out.push('@');
        out.push_str(lang);
    } else if lit.datatype().as_str() != XSD_STRING {
        out.push_str("^^<");
        out.push_str(lit.datatype().as_str());
        out.push('>');
    }
}

pub fn term_to_ntriples(term: &Term) -> String {
    let mut out = String::new();
    write_term(term, &mut out);
    out
}

pub(crate) fn write_term(term: &Term, out: &mut String) {
    match term {
        Term::Iri(iri) => {
            out.push('<');
            out.push_str(iri.as_str());
            out.push('>');
        }
        Term::Blank(b) => {
            out.push_str("_:");
            out.push_str(b.label());
        }
        Term::Literal(lit) => write_literal(lit, out),
    }
}

struct Line {
    s: String,
    p: String,
    o: String,
}

fn render(t: &Triple) -> Line {
    let mut s = String::new();
    write_subject(&t.subject, &mut s);
    let p = format!("<{}>", t.predicate.as_str());
    let mut o = String::new();
    write_term(&t.object, &mut o);
    Line { s, p, o }
}

fn sorted_lines<'a>(triples: impl IntoIterator<Item = &'a Triple>) -> Vec<Line> {
    let triples: Vec<&Triple> = triples.into_iter().collect();
    let mut lines: Vec<Line> = triples.par_iter().map(|t| render(t)).collect();
    lines.par_sort_unstable_by(|a, b| (&a.s, &a.p, &a.o).cmp(&(&b.s, &b.p, &b.o)));
    lines.dedup_by(|a, b| a.s == b.s && a.p == b.p && a.o == b.o);
    lines
}

/// Streams canonical N-Triples to `w`.
pub fn write_ntriples<'a, W: Write>(triples: impl IntoIterator<Item = &'a Triple>, w: &mut W) -> io::Result<()> {
    let mut buf = String::new();
    for line in sorted_lines(triples) {
        buf.clear();
        buf.push_str(&line.s);
        buf.push(' ');
        buf.push_str(&line.p);
        buf.push(' ');
        buf.push_str(&line.o);
        buf.push_str(" .\n");
        w.write_all(buf.as_bytes())?;
    }
    Ok(())
}

pub fn serialize_ntriples<'a>(triples: impl IntoIterator<Item = &'a Triple>) -> String {
    let mut out = Vec::new();
    write_ntriples(triples, &mut out).expect("writing to a Vec cannot fail");
    String::from_utf8(out).expect("serializer emits UTF-8")
}

fn read_subject(c: &mut Cursor<'_>) -> Result<Subject, RdfError> {
    match c.peek() {
        Some('<') => Ok(Subject::Iri(c.read_iriref()?)),
        Some('_') => Ok(Subject::Blank(c.read_blank()?)),
        _ => Err(c.error("expected IRI or blank node as subject")),
    }
}

pub(crate) fn read_object(c: &mut Cursor<'_>) -> Result<Term, RdfError> {
    match c.peek() {
        Some('<') => Ok(Term::Iri(c.read_iriref()?)),
        Some('_') => Ok(Term::Blank(c.read_blank()?)),
        Some('"') => {
            let start = c.offset();
            let lexical = c.read_quoted()?;
            if c.eat('@') {
                let lang = c.read_lang()?;
                Literal::lang_string(lexical, lang)
                    .map(Term::Literal)
                    .map_err(|e| c.error_at(start, e.to_string()))
            } else if c.eat_str("^^") {
                let dt = c.read_iriref()?;
                Literal::typed(lexical, dt)
                    .map(Term::Literal)
                    .map_err(|e| c.error_at(start, e.to_string()))
            } else {
                Ok(Term::Literal(Literal::string(lexical)))
            }
        }
        _ => Err(c.error("expected IRI, blank node or literal as object")),
    }
}

fn parse_line(line: &str, line_no: usize) -> Result<Option<Triple>, RdfError> {
    let line = line.strip_suffix('\r').unwrap_or(line);
    let mut c = Cursor::new(line, line_no);
    c.skip_inline_ws();
    if c.at_end() || c.peek() == Some('#') {
        return Ok(None);
    }
    let subject = read_subject(&mut c)?;
    c.skip_inline_ws();
    if c.peek() != Some('<') {
        return Err(c.error("expected IRI as predicate"));
    }
    let predicate = c.read_iriref()?;
    c.skip_inline_ws();
    let object = read_object(&mut c)?;
    c.skip_inline_ws();
    if !c.eat('.') {
        return Err(c.error("missing terminating `.`"));
    }
    c.skip_inline_ws();
    if !c.at_end() && c.peek() != Some('#') {
        return Err(c.error("unexpected content after `.`"));
    }
    Ok(Some(Triple {
        subject,
        predicate,
        object,
    }))
}

/// Parses N-Triples; duplicate lines collapse.
pub fn parse_ntriples(text: &str) -> Result<Graph, RdfError> {
    let mut graph = Graph::new();
    for (i, line) in text.split('\n').enumerate() {
        if let Some(t) = parse_line(line, i + 1)? {
            graph.insert(t);
        }
    }
    Ok(graph)
}
