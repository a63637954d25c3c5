use std::collections::BTreeSet;
use std::fmt;

use crate::model::term::Term;
use crate::rdf::prefix::PrefixMap;
use crate::rdf::turtle::TermReader;
use crate::rdf::RdfError;
use crate::store::query::QueryError;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PatternTerm {
    Var(String),
    Const(Term),
}

impl PatternTerm {
    pub fn var(name: &str) -> Self {
        PatternTerm::Var(name.to_string())
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            PatternTerm::Var(v) => Some(v),
            PatternTerm::Const(_) => None,
        }
    }
}

impl<T: Into<Term>> From<T> for PatternTerm {
    fn from(t: T) -> Self {
        PatternTerm::Const(t.into())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Conjunct {
    pub s: PatternTerm,
    pub p: PatternTerm,
    pub o: PatternTerm,
}

impl Conjunct {
    pub fn new(s: impl Into<PatternTerm>, p: impl Into<PatternTerm>, o: impl Into<PatternTerm>) -> Self {
        Conjunct {
            s: s.into(),
            p: p.into(),
            o: o.into(),
        }
    }

    pub fn positions(&self) -> [&PatternTerm; 3] {
        [&self.s, &self.p, &self.o]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Comparator {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl Comparator {
    pub fn is_numeric(self) -> bool {
        !matches!(self, Comparator::Eq | Comparator::Ne)
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Comparator::Eq => "=",
            Comparator::Ne => "!=",
            Comparator::Lt => "<",
            Comparator::Le => "<=",
            Comparator::Gt => ">",
            Comparator::Ge => ">=",
        }
    }
}

impl fmt::Display for Comparator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Filter {
    pub var: String,
    pub op: Comparator,
    pub value: Term,
}

/// A conjunction of triple patterns plus filters over their variables.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Pattern {
    pub conjuncts: Vec<Conjunct>,
    pub filters: Vec<Filter>,
}

impl Pattern {
    pub fn new(conjuncts: Vec<Conjunct>) -> Self {
        Pattern {
            conjuncts,
            filters: Vec::new(),
        }
    }

    pub fn with_filter(mut self, var: &str, op: Comparator, value: impl Into<Term>) -> Self {
        self.filters.push(Filter {
            var: var.to_string(),
            op,
            value: value.into(),
        });
        self
    }

    /// Variables of the conjuncts, sorted by name.
    pub fn variables(&self) -> BTreeSet<String> {
        self.conjuncts
            .iter()
            .flat_map(|c| c.positions())
            .filter_map(|t| t.as_var().map(str::to_string))
            .collect()
    }

    pub fn validate(&self) -> Result<(), QueryError> {
        let vars = self.variables();
        for f in &self.filters {
            if !vars.contains(&f.var) {
                return Err(QueryError::UnboundFilterVariable(f.var.clone()));
            }
            if f.op.is_numeric() && !f.value.as_literal().is_some_and(|l| l.is_integer()) {
                return Err(QueryError::NonNumericFilter {
                    var: f.var.clone(),
                    op: f.op,
                });
            }
        }
        Ok(())
    }
}

fn read_var(reader: &mut TermReader<'_>) -> Result<String, RdfError> {
    let c = reader.cursor();
    if !c.eat('?') {
        return Err(c.error("expected variable"));
    }
    let start = c.offset();
    while c.peek().is_some_and(|ch| ch.is_ascii_alphanumeric() || ch == '_') {
        c.bump();
    }
    let name = &c.full_text()[start..c.offset()];
    if name.is_empty() || name.starts_with(|ch: char| ch.is_ascii_digit()) {
        return Err(c.error_at(start, "invalid variable name"));
    }
    Ok(name.to_string())
}

fn read_node(reader: &mut TermReader<'_>, verb: bool) -> Result<PatternTerm, RdfError> {
    if reader.cursor().peek() == Some('?') {
        Ok(PatternTerm::Var(read_var(reader)?))
    } else {
        Ok(PatternTerm::Const(reader.term(verb)?))
    }
}

fn read_op(reader: &mut TermReader<'_>) -> Result<Comparator, RdfError> {
    let c = reader.cursor();
    let op = if c.eat_str("<=") {
        Comparator::Le
    } else if c.eat_str(">=") {
        Comparator::Ge
    } else if c.eat_str("!=") {
        Comparator::Ne
    } else if c.eat('=') {
        Comparator::Eq
    } else if c.eat('<') {
        Comparator::Lt
    } else if c.eat('>') {
        Comparator::Gt
    } else {
        return Err(c.error("expected comparator"));
    };
    if !matches!(c.peek(), Some(' ' | '\t')) {
        return Err(c.error("comparator must be followed by whitespace"));
    }
    Ok(op)
}

fn finish_line(reader: &mut TermReader<'_>) -> Result<(), RdfError> {
    reader.skip_ws();
    let c = reader.cursor();
    c.eat('.');
    c.skip_inline_ws();
    if !c.at_end() && c.peek() != Some('#') {
        return Err(c.error("unexpected trailing content"));
    }
    Ok(())
}

fn starts_keyword(rest: &str, kw: &str) -> bool {
    rest.get(..kw.len()).is_some_and(|k| k.eq_ignore_ascii_case(kw))
        && rest[kw.len()..].starts_with([' ', '\t'])
}

/// Parses a pattern file: one conjunct per line (`?m :hasRole :X`), filter
/// lines (`FILTER ?y >= 1980`), prefix directives and `#` comments. The
/// standard prefixes are pre-bound.
pub fn parse_pattern(text: &str) -> Result<Pattern, QueryError> {
    parse_pattern_with(text, &PrefixMap::standard())
}

pub fn parse_pattern_with(text: &str, prefixes: &PrefixMap) -> Result<Pattern, QueryError> {
    let mut prefixes = prefixes.clone();
    let mut pattern = Pattern::default();
    for (i, raw) in text.split('\n').enumerate() {
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        let mut reader = TermReader::new(line, i + 1, &prefixes);
        reader.skip_ws();
        let rest = reader.cursor().rest();
        if rest.is_empty() || rest.starts_with('#') {
            continue;
        }
        if rest.starts_with("@prefix") || starts_keyword(rest, "prefix") {
            let dotted = rest.starts_with('@');
            reader.cursor().advance(if dotted { 7 } else { 6 });
            reader.prefix_directive(dotted)?;
            finish_line(&mut reader)?;
            prefixes = reader.prefixes().clone();
            continue;
        }
        if starts_keyword(rest, "filter") {
            reader.cursor().advance(6);
            reader.skip_ws();
            let var = read_var(&mut reader)?;
            reader.skip_ws();
            let op = read_op(&mut reader)?;
            reader.skip_ws();
            let value = reader.term(false)?;
            finish_line(&mut reader)?;
            pattern.filters.push(Filter { var, op, value });
            continue;
        }
        let s = read_node(&mut reader, false)?;
        reader.skip_ws();
        let p = read_node(&mut reader, true)?;
        reader.skip_ws();
        let o = read_node(&mut reader, false)?;
        finish_line(&mut reader)?;
        pattern.conjuncts.push(Conjunct { s, p, o });
    }
    pattern.validate()?;
    Ok(pattern)
}
