//! A bounded Turtle subset: `@prefix`/`PREFIX` directives, IRIs and prefixed
//! names, `a`, `;` and `,` lists, `[ ... ]` anonymous nodes, `_:` labels,
//! quoted literals with language tags or datatypes, and bare integers.
//! Collections, `@base`, long strings, decimals and booleans are rejected.
//!
//! Prefixed local names additionally accept `@` so that account handles such
//! as `:@ckyenge` can be written without escaping.
//!
//! Anonymous nodes are skolemized to `<genid base>b<n>`, numbered in document
//! order from zero for every parse.

use std::collections::BTreeMap;

use crate::model::term::{Graph, Iri, Literal, Subject, Term, Triple, XSD_INTEGER, XSD_STRING};
use crate::model::vocab::DEFAULT_GENID_BASE;
use crate::rdf::lex::{escape_literal_into, Cursor};
use crate::rdf::ntriples::write_term;
use crate::rdf::prefix::{is_prefix_label, PrefixMap, RDF};
use crate::rdf::RdfError;

const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

pub struct TurtleParser {
    prefixes: PrefixMap,
    genid_base: String,
}

impl TurtleParser {
    pub fn new(prefixes: &PrefixMap) -> Self {
        TurtleParser {
            prefixes: prefixes.clone(),
            genid_base: DEFAULT_GENID_BASE.to_string(),
        }
    }

    pub fn with_genid_base(mut self, base: impl Into<String>) -> Self {
        self.genid_base = base.into();
        self
    }

    pub fn parse(&self, text: &str) -> Result<Graph, RdfError> {
        let mut state = State {
            c: Cursor::new(text, 1),
            prefixes: self.prefixes.clone(),
            genid_base: &self.genid_base,
            next_anon: 0,
            graph: Graph::new(),
        };
        state.document()?;
        Ok(state.graph)
    }
}

/// Parses `text` with `prefixes` as the initial bindings; `@prefix`
/// directives in the document add to or override them.
pub fn parse_turtle_subset(text: &str, prefixes: &PrefixMap) -> Result<Graph, RdfError> {
    TurtleParser::new(prefixes).parse(text)
}

struct State<'a> {
    c: Cursor<'a>,
    prefixes: PrefixMap,
    genid_base: &'a str,
    next_anon: usize,
    graph: Graph,
}

fn is_pn_chars_base(c: char) -> bool {
    c.is_alphabetic()
}

fn is_pn_chars(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '-' || c == '\u{B7}'
}

fn is_local_char(c: char) -> bool {
    is_pn_chars(c) || matches!(c, '.' | ':' | '%' | '\\' | '@')
}

const PN_LOCAL_ESC: &str = "_~.-!$&'()*+,;=/?#@%";

impl<'a> State<'a> {
    fn ws(&mut self) {
        self.c.skip_ws_and_comments();
    }

    fn document(&mut self) -> Result<(), RdfError> {
        loop {
            self.ws();
            if self.c.at_end() {
                return Ok(());
            }
            if self.c.eat_str("@prefix") {
                self.prefix_body(true)?;
            } else if self.at_sparql_prefix() {
                self.c.advance(6);
                self.prefix_body(false)?;
            } else if self.c.peek() == Some('@') {
                return Err(self.c.error("unsupported directive"));
            } else {
                self.triples()?;
                self.ws();
                if !self.c.eat('.') {
                    return Err(self.c.error("expected `.` after statement"));
                }
            }
        }
    }

    fn at_sparql_prefix(&self) -> bool {
        let rest = self.c.rest();
        rest.get(..6).is_some_and(|k| k.eq_ignore_ascii_case("prefix"))
            && rest[6..].chars().next().is_some_and(char::is_whitespace)
    }

    fn prefix_body(&mut self, dotted: bool) -> Result<(), RdfError> {
        self.ws();
        let start = self.c.offset();
        let label = self.read_prefix_label()?;
        if !self.c.eat(':') {
            return Err(self.c.error("expected `:` after prefix label"));
        }
        self.ws();
        let ns = self.c.read_iriref()?;
        self.prefixes
            .insert(&label, ns.as_str())
            .map_err(|e| self.c.error_at(start, e.to_string()))?;
        if dotted {
            self.ws();
            if !self.c.eat('.') {
                return Err(self.c.error("expected `.` after @prefix directive"));
            }
        }
        Ok(())
    }

    fn read_prefix_label(&mut self) -> Result<String, RdfError> {
        let start = self.c.offset();
        while let Some(ch) = self.c.peek() {
            if is_pn_chars(ch) || ch == '.' {
                self.c.bump();
            } else {
                break;
            }
        }
        let label = self.c.rest_from(start);
        // a trailing '.' belongs to the statement, not the label
        let trimmed = label.trim_end_matches('.');
        let extra = label.len() - trimmed.len();
        if extra > 0 {
            self.c.rewind(extra);
        }
        if !is_prefix_label(trimmed) {
            return Err(self.c.error_at(start, format!("invalid prefix label `{trimmed}`")));
        }
        Ok(trimmed.to_string())
    }

    fn anon(&mut self) -> Iri {
        let iri = Iri::new(format!("{}b{}", self.genid_base, self.next_anon)).expect("genid base is an absolute IRI");
        self.next_anon += 1;
        iri
    }

    fn triples(&mut self) -> Result<(), RdfError> {
        if self.c.peek() == Some('[') {
            let node = self.blank_node_property_list()?;
            self.ws();
            if self.c.peek() != Some('.') {
                self.predicate_object_list(&Subject::Iri(node))?;
            }
            return Ok(());
        }
        let subject = match self.term()? {
            Term::Literal(_) => return Err(self.c.error("a literal cannot be a subject")),
            t => t.to_subject().expect("non-literal"),
        };
        self.ws();
        self.predicate_object_list(&subject)
    }

    fn predicate_object_list(&mut self, subject: &Subject) -> Result<(), RdfError> {
        loop {
            self.ws();
            let predicate = self.verb()?;
            self.object_list(subject, &predicate)?;
            self.ws();
            if !self.c.eat(';') {
                return Ok(());
            }
            loop {
                self.ws();
                if !self.c.eat(';') {
                    break;
                }
            }
            self.ws();
            if matches!(self.c.peek(), Some('.' | ']') | None) {
                return Ok(());
            }
        }
    }

    fn verb(&mut self) -> Result<Iri, RdfError> {
        let start = self.c.offset();
        if self.c.peek() == Some('a') && !self.c.peek_nth(1).is_some_and(|n| is_local_char(n) && n != '.') {
            self.c.bump();
            return Ok(Iri::new(RDF_TYPE).expect("static"));
        }
        match self.term()? {
            Term::Iri(iri) => Ok(iri),
            _ => Err(self.c.error_at(start, "predicate must be an IRI")),
        }
    }

    fn object_list(&mut self, subject: &Subject, predicate: &Iri) -> Result<(), RdfError> {
        loop {
            self.ws();
            let object = if self.c.peek() == Some('[') {
                Term::Iri(self.blank_node_property_list()?)
            } else {
                self.term()?
            };
            self.graph.insert(Triple {
                subject: subject.clone(),
                predicate: predicate.clone(),
                object,
            });
            self.ws();
            if !self.c.eat(',') {
                return Ok(());
            }
        }
    }

    fn blank_node_property_list(&mut self) -> Result<Iri, RdfError> {
        if !self.c.eat('[') {
            return Err(self.c.error("expected `[`"));
        }
        let node = self.anon();
        self.ws();
        if self.c.eat(']') {
            return Ok(node);
        }
        self.predicate_object_list(&Subject::Iri(node.clone()))?;
        self.ws();
        if !self.c.eat(']') {
            return Err(self.c.error("expected `]`"));
        }
        Ok(node)
    }

    /// IRI, prefixed name, blank label, or literal.
    fn term(&mut self) -> Result<Term, RdfError> {
        let start = self.c.offset();
        match self.c.peek() {
            Some('<') => Ok(Term::Iri(self.c.read_iriref()?)),
            Some('_') if self.c.peek_nth(1) == Some(':') => Ok(Term::Blank(self.c.read_blank()?)),
            Some('"' | '\'') => self.literal(),
            Some(ch) if ch.is_ascii_digit() || ch == '+' || ch == '-' => self.integer(),
            Some('(') => Err(self.c.error("collections are not supported")),
            Some(ch) if ch == ':' || is_pn_chars_base(ch) => Ok(Term::Iri(self.prefixed_name()?)),
            Some(ch) => Err(self.c.error_at(start, format!("unexpected character {ch:?}"))),
            None => Err(self.c.error("unexpected end of input")),
        }
    }

    fn integer(&mut self) -> Result<Term, RdfError> {
        let start = self.c.offset();
        if matches!(self.c.peek(), Some('+' | '-')) {
            self.c.bump();
        }
        let digits_start = self.c.offset();
        while self.c.peek().is_some_and(|ch| ch.is_ascii_digit()) {
            self.c.bump();
        }
        if self.c.offset() == digits_start {
            return Err(self.c.error_at(start, "expected digits"));
        }
        if self.c.peek() == Some('.') && self.c.peek_nth(1).is_some_and(|ch| ch.is_ascii_digit()) {
            return Err(self.c.error_at(start, "decimal literals are not supported"));
        }
        let lexical = self.c.rest_from(start).to_string();
        Ok(Term::Literal(
            Literal::typed(lexical, Iri::new(XSD_INTEGER).expect("static")).expect("validated digits"),
        ))
    }

    fn literal(&mut self) -> Result<Term, RdfError> {
        let start = self.c.offset();
        if self.c.rest().starts_with("\"\"\"") || self.c.rest().starts_with("'''") {
            return Err(self.c.error("long string literals are not supported"));
        }
        let lexical = self.c.read_quoted()?;
        let lit = if self.c.eat('@') {
            let lang = self.c.read_lang()?;
            Literal::lang_string(lexical, lang)
        } else if self.c.eat_str("^^") {
            let dt = match self.c.peek() {
                Some('<') => self.c.read_iriref()?,
                _ => self.prefixed_name()?,
            };
            Literal::typed(lexical, dt)
        } else {
            Ok(Literal::string(lexical))
        };
        lit.map(Term::Literal).map_err(|e| self.c.error_at(start, e.to_string()))
    }

    fn prefixed_name(&mut self) -> Result<Iri, RdfError> {
        let start = self.c.offset();
        let label = if self.c.peek() == Some(':') {
            String::new()
        } else {
            self.read_prefix_label()?
        };
        if !self.c.eat(':') {
            return Err(self.c.error_at(start, format!("expected prefixed name, found `{label}`")));
        }
        let local = self.read_local()?;
        let ns = self.prefixes.get(&label).ok_or_else(|| {
            let pos = self.c.position_at(start);
            RdfError::UnknownPrefixInDocument {
                prefix: label.clone(),
                line: pos.line,
                column: pos.column,
            }
        })?;
        Iri::new(format!("{}{}", ns.as_str(), local)).map_err(|e| self.c.error_at(start, e.to_string()))
    }

    fn read_local(&mut self) -> Result<String, RdfError> {
        let mut out = String::new();
        let mut raw_len = Vec::new();
        loop {
            let here = self.c.offset();
            match self.c.peek() {
                Some('\\') => {
                    self.c.bump();
                    match self.c.bump() {
                        Some(e) if PN_LOCAL_ESC.contains(e) => out.push(e),
                        _ => return Err(self.c.error_at(here, "invalid escape in local name")),
                    }
                }
                Some('%') => {
                    let hex = self.c.rest().get(1..3).filter(|h| h.bytes().all(|b| b.is_ascii_hexdigit()));
                    let Some(hex) = hex else {
                        return Err(self.c.error_at(here, "`%` must be followed by two hex digits"));
                    };
                    out.push('%');
                    out.push_str(hex);
                    self.c.eat_str(&format!("%{hex}"));
                }
                Some(ch) if is_local_char(ch) => {
                    if out.is_empty() && ch == '-' {
                        break;
                    }
                    self.c.bump();
                    out.push(ch);
                }
                _ => break,
            }
            raw_len.push((self.c.offset() - here, out.len()));
        }
        // trailing '.' terminates the statement
        while out.ends_with('.') {
            let (raw, _) = raw_len.pop().expect("one entry per char");
            self.c.rewind(raw);
            out.pop();
        }
        Ok(out)
    }
}

/// Line-oriented term reader over the Turtle term grammar, for small text
/// formats (such as pattern files) that embed Turtle terms.
pub(crate) struct TermReader<'a> {
    state: State<'a>,
}

impl<'a> TermReader<'a> {
    pub fn new(text: &'a str, first_line: usize, prefixes: &PrefixMap) -> Self {
        TermReader {
            state: State {
                c: Cursor::new(text, first_line),
                prefixes: prefixes.clone(),
                genid_base: DEFAULT_GENID_BASE,
                next_anon: 0,
                graph: Graph::new(),
            },
        }
    }

    pub fn cursor(&mut self) -> &mut Cursor<'a> {
        &mut self.state.c
    }

    pub fn skip_ws(&mut self) {
        self.state.c.skip_inline_ws();
    }

    /// A term; `a` is accepted as `rdf:type` when `verb` is set.
    pub fn term(&mut self, verb: bool) -> Result<Term, RdfError> {
        if verb {
            self.state.verb().map(Term::Iri)
        } else {
            self.state.term()
        }
    }

    pub fn prefix_directive(&mut self, dotted: bool) -> Result<(), RdfError> {
        self.state.prefix_body(dotted)
    }

    pub fn prefixes(&self) -> &PrefixMap {
        &self.state.prefixes
    }
}

impl<'a> Cursor<'a> {
    pub(crate) fn rest_from(&self, start: usize) -> &'a str {
        let text = self.full_text();
        &text[start..self.offset()]
    }
}

/// Whether `local` can be written after `prefix:` and parsed back verbatim.
fn is_safe_local(local: &str) -> bool {
    if local.is_empty() {
        return true;
    }
    if local.starts_with(['-', '.']) || local.ends_with('.') {
        return false;
    }
    let bytes = local.as_bytes();
    let mut i = 0;
    for (idx, ch) in local.char_indices() {
        if idx < i {
            continue;
        }
        match ch {
            '%' => {
                let ok = bytes.len() >= idx + 3 && bytes[idx + 1].is_ascii_hexdigit() && bytes[idx + 2].is_ascii_hexdigit();
                if !ok {
                    return false;
                }
                i = idx + 3;
            }
            ch if is_pn_chars(ch) || matches!(ch, '.' | ':' | '@') => {}
            _ => return false,
        }
    }
    true
}

struct Writer<'p> {
    prefixes: &'p PrefixMap,
    used: BTreeMap<String, String>,
}

impl Writer<'_> {
    fn iri(&mut self, iri: &Iri, out: &mut String) {
        if let Some((label, local)) = self.prefixes.split(iri.as_str()) {
            if is_safe_local(local) {
                let ns = &iri.as_str()[..iri.as_str().len() - local.len()];
                self.used.insert(label.to_string(), ns.to_string());
                out.push_str(label);
                out.push(':');
                out.push_str(local);
                return;
            }
        }
        out.push('<');
        out.push_str(iri.as_str());
        out.push('>');
    }

    fn term(&mut self, term: &Term, out: &mut String) {
        match term {
            Term::Iri(iri) => self.iri(iri, out),
            Term::Blank(_) => write_term(term, out),
            Term::Literal(lit) => {
                if lit.is_integer() {
                    out.push_str(lit.lexical());
                    return;
                }
                out.push('"');
                escape_literal_into(lit.lexical(), out);
                out.push('"');
                if let Some(lang) = lit.lang() {
                    out.push('@');
                    out.push_str(lang);
                } else if lit.datatype().as_str() != XSD_STRING {
                    out.push_str("^^");
                    self.iri(lit.datatype(), out);
                }
            }
        }
    }
}

/// Subject-grouped Turtle with `;` and `,` lists, `a` for `rdf:type`, and
/// prefixed names wherever a binding applies and the local part is safe.
pub fn serialize_turtle(triples: &Graph, prefixes: &PrefixMap) -> String {
    let mut w = Writer {
        prefixes,
        used: BTreeMap::new(),
    };
    let rdf_type = format!("{RDF}type");

    // subject -> predicate -> objects, keyed by rendered forms
    let mut groups: BTreeMap<String, BTreeMap<(bool, String), Vec<String>>> = BTreeMap::new();
    for t in triples {
        let mut s = String::new();
        w.term(&Term::from(t.subject.clone()), &mut s);
        let is_type = t.predicate.as_str() == rdf_type;
        let mut p = String::new();
        if is_type {
            p.push('a');
        } else {
            w.iri(&t.predicate, &mut p);
        }
        let mut o = String::new();
        w.term(&t.object, &mut o);
        groups.entry(s).or_default().entry((!is_type, p)).or_default().push(o);
    }

    let mut body = String::new();
    for (subject, preds) in groups {
        body.push_str(&subject);
        for (i, ((_, pred), mut objects)) in preds.into_iter().enumerate() {
            objects.sort();
            body.push_str(if i == 0 { " " } else { " ;\n    " });
            body.push_str(&pred);
            body.push(' ');
            body.push_str(&objects.join(" , "));
        }
        body.push_str(" .\n");
    }

    let mut out = String::new();
    for (label, ns) in &w.used {
        out.push_str(&format!("@prefix {label}: <{ns}> .\n"));
    }
    if !w.used.is_empty() && !body.is_empty() {
        out.push('\n');
    }
    out.push_str(&body);
    out
}
