use std::collections::BTreeMap;

use thiserror::Error;

use crate::model::term::{Iri, TermError};

pub const RDF: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
pub const RDFS: &str = "http://www.w3.org/2000/01/rdf-schema#";
pub const XSD: &str = "http://www.w3.org/2001/XMLSchema#";
pub const DUL: &str = "http://www.ontologydesignpatterns.org/ont/dul/DUL.owl#";
pub const PROV: &str = "http://www.w3.org/ns/prov#";
pub const FRBR: &str = "http://purl.org/spar/frbr/";
pub const FABIO: &str = "http://purl.org/spar/fabio/";
pub const DC: &str = "http://purl.org/dc/elements/1.1/";
pub const ONTOLEX: &str = "http://www.w3.org/ns/lemon/ontolex#";
pub const LEXINFO: &str = "http://www.lexinfo.net/ontology/3.0/lexinfo#";
pub const STER: &str = "https://w3id.org/ster#";
pub const DEFAULT_BASE: &str = "https://w3id.org/odang#";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PrefixError {
    #[error("prefix label `{0}` is not a valid name")]
    BadLabel(String),
    #[error(transparent)]
    Namespace(#[from] TermError),
}

/// Prefix label to namespace bindings. The empty label is the default (`:`)
/// prefix.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PrefixMap {
    bindings: BTreeMap<String, Iri>,
}

impl PrefixMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// The shipped vocabulary prefixes, with both `odang` and the default
    /// prefix bound to `base`.
    pub fn standard_with_base(base: &str) -> Result<Self, PrefixError> {
        let mut map = PrefixMap::new();
        for (label, ns) in [
            ("rdf", RDF),
            ("rdfs", RDFS),
            ("xsd", XSD),
            ("dul", DUL),
            ("prov", PROV),
            ("frbr", FRBR),
            ("fabio", FABIO),
            ("dc", DC),
            ("ontolex", ONTOLEX),
            ("lexinfo", LEXINFO),
            ("ster", STER),
            ("odang", base),
            ("", base),
        ] {
            map.insert(label, ns)?;
        }
        Ok(map)
    }

    pub fn standard() -> Self {
        Self::standard_with_base(DEFAULT_BASE).expect("built-in namespaces are valid")
    }

    /// Binds (or rebinds) `label`.
    pub fn insert(&mut self, label: &str, namespace: &str) -> Result<(), PrefixError> {
        if !is_prefix_label(label) {
            return Err(PrefixError::BadLabel(label.to_string()));
        }
        let ns = Iri::new(namespace)?;
        self.bindings.insert(label.to_string(), ns);
        Ok(())
    }

    pub fn get(&self, label: &str) -> Option<&Iri> {
        self.bindings.get(label)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Iri)> {
        self.bindings.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    /// Splits `iri` into (label, local) using the longest matching namespace.
    /// Among equally long namespaces the smallest label wins.
    pub fn split<'a>(&self, iri: &'a str) -> Option<(&str, &'a str)> {
        let mut best: Option<(&str, usize)> = None;
        for (label, ns) in &self.bindings {
            let ns = ns.as_str();
            if iri.starts_with(ns) && best.map_or(true, |(_, len)| ns.len() > len) {
                best = Some((label, ns.len()));
            }
        }
        best.map(|(label, len)| (label, &iri[len..]))
    }
}

/// `PN_PREFIX`-style label, or the empty default label.
pub(crate) fn is_prefix_label(label: &str) -> bool {
    let mut chars = label.chars();
    match chars.next() {
        None => true,
        Some(c) if c.is_alphabetic() => {
            !label.ends_with('.')
                && chars.all(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '.'))
        }
        _ => false,
    }
}
