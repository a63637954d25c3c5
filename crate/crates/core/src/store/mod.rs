//! In-memory triple store with SPO / POS / OSP orderings over interned term
//! ids, a basic-graph-pattern engine, and subgraph export.

mod pattern;
mod query;
mod shared;

use std::collections::{BTreeSet, HashMap};
use std::ops::RangeInclusive;

pub use pattern::{parse_pattern, parse_pattern_with, Comparator, Conjunct, Filter, Pattern, PatternTerm};
pub use query::{brute_force_query, export_subgraph, query, query_in_order, QueryError, Solutions};
pub use shared::SharedStore;

use crate::model::term::{Graph, Term, Triple};
use crate::rdf::{parse_ntriples, RdfError};

pub type TermId = u32;

/// Deduplicated triple set, stored three times in different key orders.
#[derive(Debug, Default, Clone)]
pub struct TripleStore {
    terms: Vec<Term>,
    ids: HashMap<Term, TermId>,
    spo: BTreeSet<[TermId; 3]>,
    pos: BTreeSet<[TermId; 3]>,
    osp: BTreeSet<[TermId; 3]>,
}

fn range(a: TermId, b: Option<TermId>) -> RangeInclusive<[TermId; 3]> {
    match b {
        Some(b) => [a, b, 0]..=[a, b, TermId::MAX],
        None => [a, 0, 0]..=[a, TermId::MAX, TermId::MAX],
    }
}

impl TripleStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_graph(graph: &Graph) -> Self {
        let mut store = TripleStore::new();
        store.insert(graph);
        store
    }

    pub fn load_ntriples(text: &str) -> Result<Self, RdfError> {
        Ok(Self::from_graph(&parse_ntriples(text)?))
    }

    pub fn len(&self) -> usize {
        self.spo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spo.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    fn intern(&mut self, term: Term) -> TermId {
        if let Some(&id) = self.ids.get(&term) {
            return id;
        }
        let id = TermId::try_from(self.terms.len()).expect("term dictionary overflow");
        self.terms.push(term.clone());
        self.ids.insert(term, id);
        id
    }

    /// Inserts triples with set semantics; returns how many were new.
    pub fn insert<'a>(&mut self, triples: impl IntoIterator<Item = &'a Triple>) -> usize {
        let mut added = 0;
        for t in triples {
            let s = self.intern(t.subject.clone().into());
            let p = self.intern(Term::Iri(t.predicate.clone()));
            let o = self.intern(t.object.clone());
            if self.spo.insert([s, p, o]) {
                self.pos.insert([p, o, s]);
                self.osp.insert([o, s, p]);
                added += 1;
            }
        }
        added
    }

    pub fn id_of(&self, term: &Term) -> Option<TermId> {
        self.ids.get(term).copied()
    }

    pub fn term(&self, id: TermId) -> &Term {
        &self.terms[id as usize]
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        let ids = (
            self.id_of(&triple.subject.clone().into()),
            self.id_of(&Term::Iri(triple.predicate.clone())),
            self.id_of(&triple.object),
        );
        match ids {
            (Some(s), Some(p), Some(o)) => self.spo.contains(&[s, p, o]),
            _ => false,
        }
    }

    /// Matching id triples in (s, p, o) order, served from the ordering whose
    /// prefix covers the bound positions.
    pub fn scan(
        &self,
        s: Option<TermId>,
        p: Option<TermId>,
        o: Option<TermId>,
    ) -> Box<dyn Iterator<Item = [TermId; 3]> + '_> {
        match (s, p, o) {
            (Some(s), Some(p), Some(o)) => Box::new(self.spo.get(&[s, p, o]).copied().into_iter()),
            (Some(s), p, None) => Box::new(self.spo.range(range(s, p)).copied()),
            (Some(s), None, Some(o)) => Box::new(self.osp.range(range(o, Some(s))).map(|&[o, s, p]| [s, p, o])),
            (None, Some(p), o) => Box::new(self.pos.range(range(p, o)).map(|&[p, o, s]| [s, p, o])),
            (None, None, Some(o)) => Box::new(self.osp.range(range(o, None)).map(|&[o, s, p]| [s, p, o])),
            (None, None, None) => Box::new(self.spo.iter().copied()),
        }
    }

    /// Number of triples matching the bound positions.
    pub fn count(&self, s: Option<TermId>, p: Option<TermId>, o: Option<TermId>) -> usize {
        match (s, p, o) {
            (None, None, None) => self.len(),
            _ => self.scan(s, p, o).count(),
        }
    }

    pub fn resolve(&self, ids: [TermId; 3]) -> Triple {
        let [s, p, o] = ids;
        Triple {
            subject: self.term(s).to_subject().expect("subject ids are never literals"),
            predicate: self.term(p).as_iri().expect("predicate ids are IRIs").clone(),
            object: self.term(o).clone(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = Triple> + '_ {
        self.spo.iter().map(|&ids| self.resolve(ids))
    }

    pub fn to_graph(&self) -> Graph {
        self.iter().collect()
    }

    /// Index sizes (spo, pos, osp); always equal.
    pub fn index_sizes(&self) -> (usize, usize, usize) {
        (self.spo.len(), self.pos.len(), self.osp.len())
    }
}
