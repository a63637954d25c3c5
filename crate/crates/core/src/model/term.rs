//! RDF terms and triples.
//!
//! IRIs are reference-counted so that the millions of `rdf:type` and predicate
//! occurrences in a populated graph share one allocation each.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub const XSD_STRING: &str = "http://www.w3.org/2001/XMLSchema#string";
pub const XSD_INTEGER: &str = "http://www.w3.org/2001/XMLSchema#integer";
pub const RDF_LANG_STRING: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#langString";

/// A set of triples. Ordered so that iteration is deterministic.
pub type Graph = BTreeSet<Triple>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("IRI is empty")]
    EmptyIri,
    #[error("IRI `{0}` is not absolute (needs `://` or a `urn:` scheme)")]
    NotAbsolute(String),
    #[error("IRI `{iri}` contains forbidden character {ch:?}")]
    ForbiddenChar { iri: String, ch: char },
    #[error("blank node label `{0}` is not valid")]
    BadBlankLabel(String),
    #[error("language tag `{0}` is not valid")]
    BadLanguageTag(String),
    #[error("`{0}` is not a valid xsd:integer lexical form")]
    BadInteger(String),
}

/// An absolute IRI.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Iri(Arc<str>);

impl Iri {
    pub fn new(value: impl AsRef<str>) -> Result<Self, TermError> {
        let value = value.as_ref();
        check_iri(value)?;
        Ok(Iri(Arc::from(value)))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

fn check_iri(value: &str) -> Result<(), TermError> {
    if value.is_empty() {
        return Err(TermError::EmptyIri);
    }
    if let Some(ch) = value.chars().find(|c| is_forbidden_iri_char(*c)) {
        return Err(TermError::ForbiddenChar {
            iri: value.to_string(),
            ch,
        });
    }
    let absolute = match value.find("://") {
        Some(pos) => pos > 0 && is_scheme(&value[..pos]),
        None => is_urn(value),
    };
    if !absolute {
        return Err(TermError::NotAbsolute(value.to_string()));
    }
    Ok(())
}

pub(crate) fn is_forbidden_iri_char(c: char) -> bool {
    c.is_whitespace()
        || c.is_control()
        || matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\')
}

fn is_scheme(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'))
}

// urn:<nid>:<nss>
fn is_urn(s: &str) -> bool {
    let Some(rest) = s.get(..4).filter(|p| p.eq_ignore_ascii_case("urn:")).map(|_| &s[4..]) else {
        return false;
    };
    let Some((nid, nss)) = rest.split_once(':') else {
        return false;
    };
    !nid.is_empty()
        && nid.len() <= 32
        && nid.chars().all(|c| c.is_ascii_alphanumeric() || c == '-')
        && !nid.starts_with('-')
        && !nss.is_empty()
}

impl fmt::Debug for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0)
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A blank node, identified by its label (without the `_:` prefix).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlankNode(Arc<str>);

impl BlankNode {
    pub fn new(label: impl AsRef<str>) -> Result<Self, TermError> {
        let label = label.as_ref();
        if !is_blank_label(label) {
            return Err(TermError::BadBlankLabel(label.to_string()));
        }
        Ok(BlankNode(Arc::from(label)))
    }

    pub fn label(&self) -> &str {
        &self.0
    }
}

/// Labels are restricted to ASCII alphanumerics, `_` and `-` so that they
/// survive both N-Triples and the Turtle subset unchanged.
pub(crate) fn is_blank_label(label: &str) -> bool {
    !label.is_empty()
        && label
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

/// An RDF literal. `lang` is only ever set together with the `rdf:langString`
/// datatype.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    lexical: String,
    datatype: Iri,
    lang: Option<String>,
}

impl Literal {
    pub fn string(lexical: impl Into<String>) -> Self {
        Literal {
            lexical: lexical.into(),
            datatype: Iri(Arc::from(XSD_STRING)),
            lang: None,
        }
    }

    pub fn integer(value: i64) -> Self {
        Literal {
            lexical: value.to_string(),
            datatype: Iri(Arc::from(XSD_INTEGER)),
            lang: None,
        }
    }

    pub fn lang_string(lexical: impl Into<String>, lang: impl Into<String>) -> Result<Self, TermError> {
        let lang = lang.into();
        if !is_lang_tag(&lang) {
            return Err(TermError::BadLanguageTag(lang));
        }
        Ok(Literal {
            lexical: lexical.into(),
            datatype: Iri(Arc::from(RDF_LANG_STRING)),
            lang: Some(lang),
        })
    }

    /// Typed literal. Integer literals must have a valid lexical form; the
    /// language-string datatype cannot be used without a tag.
    pub fn typed(lexical: impl Into<String>, datatype: Iri) -> Result<Self, TermError> {
        let lexical = lexical.into();
        if datatype.as_str() == XSD_INTEGER && !is_integer_lexical(&lexical) {
            return Err(TermError::BadInteger(lexical));
        }
        if datatype.as_str() == RDF_LANG_STRING {
            return Err(TermError::BadLanguageTag(String::new()));
        }
        Ok(Literal {
            lexical,
            datatype,
            lang: None,
        })
    }

    pub fn lexical(&self) -> &str {
        &self.lexical
    }

    pub fn datatype(&self) -> &Iri {
        &self.datatype
    }

    pub fn lang(&self) -> Option<&str> {
        self.lang.as_deref()
    }

    pub fn is_plain_string(&self) -> bool {
        self.lang.is_none() && self.datatype.as_str() == XSD_STRING
    }

    pub fn is_integer(&self) -> bool {
        self.datatype.as_str() == XSD_INTEGER
    }

    /// Integer value when the literal is an integer that fits in `i64`.
    pub fn as_i64(&self) -> Option<i64> {
        if self.is_integer() {
            self.lexical.parse().ok()
        } else {
            None
        }
    }
}

pub(crate) fn is_lang_tag(tag: &str) -> bool {
    let mut parts = tag.split('-');
    let first = parts.next().unwrap_or("");
    !first.is_empty()
        && first.chars().all(|c| c.is_ascii_alphabetic())
        && parts.all(|p| !p.is_empty() && p.chars().all(|c| c.is_ascii_alphanumeric()))
}

pub(crate) fn is_integer_lexical(s: &str) -> bool {
    let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
    !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
}

/// Compares two valid integer lexical forms numerically, at any magnitude.
pub fn compare_integer_lexical(a: &str, b: &str) -> Ordering {
    fn split(s: &str) -> (bool, &str) {
        let (neg, digits) = match s.as_bytes().first() {
            Some(b'-') => (true, &s[1..]),
            Some(b'+') => (false, &s[1..]),
            _ => (false, s),
        };
        let digits = digits.trim_start_matches('0');
        // -0 is 0
        (neg && !digits.is_empty(), digits)
    }
    fn magnitude(a: &str, b: &str) -> Ordering {
        a.len().cmp(&b.len()).then_with(|| a.cmp(b))
    }
    let (a_neg, a_digits) = split(a);
    let (b_neg, b_digits) = split(b);
    match (a_neg, b_neg) {
        (false, true) => Ordering::Greater,
        (true, false) => Ordering::Less,
        (false, false) => magnitude(a_digits, b_digits),
        (true, true) => magnitude(b_digits, a_digits),
    }
}

/// A node that can appear in subject position.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Subject {
    Iri(Iri),
    Blank(BlankNode),
}

impl Subject {
    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Subject::Iri(iri) => Some(iri),
            Subject::Blank(_) => None,
        }
    }
}

/// Any RDF term.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Iri(Iri),
    Blank(BlankNode),
    Literal(Literal),
}

impl Term {
    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Term::Iri(iri) => Some(iri),
            _ => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Term::Literal(lit) => Some(lit),
            _ => None,
        }
    }

    /// The subject form of this term, if it has one.
    pub fn to_subject(&self) -> Option<Subject> {
        match self {
            Term::Iri(iri) => Some(Subject::Iri(iri.clone())),
            Term::Blank(b) => Some(Subject::Blank(b.clone())),
            Term::Literal(_) => None,
        }
    }
}

impl From<Iri> for Term {
    fn from(iri: Iri) -> Self {
        Term::Iri(iri)
    }
}

impl From<&Iri> for Term {
    fn from(iri: &Iri) -> Self {
        Term::Iri(iri.clone())
    }
}

impl From<BlankNode> for Term {
    fn from(b: BlankNode) -> Self {
        Term::Blank(b)
    }
}

impl From<Literal> for Term {
    fn from(lit: Literal) -> Self {
        Term::Literal(lit)
    }
}

impl From<Subject> for Term {
    fn from(s: Subject) -> Self {
        match s {
            Subject::Iri(iri) => Term::Iri(iri),
            Subject::Blank(b) => Term::Blank(b),
        }
    }
}

impl From<Iri> for Subject {
    fn from(iri: Iri) -> Self {
        Subject::Iri(iri)
    }
}

impl From<&Iri> for Subject {
    fn from(iri: &Iri) -> Self {
        Subject::Iri(iri.clone())
    }
}

impl From<BlankNode> for Subject {
    fn from(b: BlankNode) -> Self {
        Subject::Blank(b)
    }
}

/// An RDF statement. The predicate is an IRI by construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    pub subject: Subject,
    pub predicate: Iri,
    pub object: Term,
}

impl Triple {
    pub fn new(subject: impl Into<Subject>, predicate: impl Into<Iri>, object: impl Into<Term>) -> Self {
        Triple {
            subject: subject.into(),
            predicate: predicate.into(),
            object: object.into(),
        }
    }
}

impl From<&Iri> for Iri {
    fn from(iri: &Iri) -> Self {
        iri.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iri_validation() {
        assert!(Iri::new("https://w3id.org/odang#usr_7986").is_ok());
        assert!(Iri::new("urn:isbn:0451450523").is_ok());
        assert_eq!(Iri::new(""), Err(TermError::EmptyIri));
        assert!(matches!(Iri::new("odang:x"), Err(TermError::NotAbsolute(_))));
        assert!(matches!(
            Iri::new("https://w3id.org/a b"),
            Err(TermError::ForbiddenChar { ch: ' ', .. })
        ));
        assert!(Iri::new("https://x.org/\u{7}").is_err());
        assert!(Iri::new("://nothing").is_err());
    }

    #[test]
    fn literal_invariants() {
        let xsd_int = Iri::new(XSD_INTEGER).unwrap();
        assert!(Literal::typed("29", xsd_int.clone()).is_ok());
        assert!(Literal::typed("-0042", xsd_int.clone()).is_ok());
        assert!(Literal::typed("twenty", xsd_int).is_err());
        assert!(Literal::lang_string("ciao", "it").is_ok());
        assert!(Literal::lang_string("ciao", "it-IT").is_ok());
        assert!(Literal::lang_string("ciao", "").is_err());
        let lang = Literal::lang_string("x", "en").unwrap();
        assert_eq!(lang.datatype().as_str(), RDF_LANG_STRING);
        assert!(Literal::typed("x", Iri::new(RDF_LANG_STRING).unwrap()).is_err());
    }

    #[test]
    fn integer_comparison_handles_sign_and_padding() {
        use Ordering::*;
        assert_eq!(compare_integer_lexical("10", "9"), Greater);
        assert_eq!(compare_integer_lexical("-10", "-9"), Less);
        assert_eq!(compare_integer_lexical("007", "7"), Equal);
        assert_eq!(compare_integer_lexical("-0", "+0"), Equal);
        assert_eq!(compare_integer_lexical("-1", "0"), Less);
        assert_eq!(
            compare_integer_lexical("123456789012345678901234567890", "99"),
            Greater
        );
    }
}
