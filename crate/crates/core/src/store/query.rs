use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::model::term::{compare_integer_lexical, Graph, Term};
use crate::rdf::RdfError;
use crate::store::pattern::{Comparator, Filter, Pattern, PatternTerm};
use crate::store::{TermId, TripleStore};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("pattern syntax: {0}")]
    Parse(#[from] RdfError),
    #[error("filter variable ?{0} does not occur in any conjunct")]
    UnboundFilterVariable(String),
    #[error("comparator {op} on ?{var} needs an integer constant")]
    NonNumericFilter { var: String, op: Comparator },
    #[error("projection variable ?{0} does not occur in the pattern")]
    UnknownProjectionVariable(String),
}

/// Query result: `rows[i][j]` is the binding of `variables[j]` in solution
/// `i`. Variables are sorted by name; rows are ordered by interned ids.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Solutions {
    pub variables: Vec<String>,
    pub rows: Vec<Vec<Term>>,
}

impl Solutions {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn to_maps(&self) -> BTreeSet<BTreeMap<String, Term>> {
        self.rows
            .iter()
            .map(|row| self.variables.iter().cloned().zip(row.iter().cloned()).collect())
            .collect()
    }

    pub fn column(&self, var: &str) -> Option<Vec<&Term>> {
        let j = self.variables.iter().position(|v| v == var)?;
        Some(self.rows.iter().map(|r| &r[j]).collect())
    }
}

#[derive(Clone, Copy)]
enum Slot {
    Const(TermId),
    Var(usize),
}

struct Plan<'a> {
    conjuncts: Vec<[Slot; 3]>,
    /// Filters keyed by the variable slot they test.
    filters: Vec<Vec<&'a Filter>>,
}

fn matches_filter(term: &Term, f: &Filter) -> bool {
    match f.op {
        Comparator::Eq => *term == f.value,
        Comparator::Ne => *term != f.value,
        op => {
            let (Some(a), Some(b)) = (term.as_literal(), f.value.as_literal()) else {
                return false;
            };
            if !a.is_integer() || !b.is_integer() {
                return false;
            }
            let ord = compare_integer_lexical(a.lexical(), b.lexical());
            match op {
                Comparator::Lt => ord == Ordering::Less,
                Comparator::Le => ord != Ordering::Greater,
                Comparator::Gt => ord == Ordering::Greater,
                Comparator::Ge => ord != Ordering::Less,
                Comparator::Eq | Comparator::Ne => unreachable!(),
            }
        }
    }
}

/// Compiles the pattern against the store dictionary. `None` means some
/// constant is absent from the store, so nothing can match.
fn plan<'a>(store: &TripleStore, pattern: &'a Pattern, vars: &[String]) -> Option<Plan<'a>> {
    let slot = |t: &PatternTerm| -> Option<Slot> {
        match t {
            PatternTerm::Var(v) => Some(Slot::Var(vars.binary_search(v).expect("collected variable"))),
            PatternTerm::Const(c) => store.id_of(c).map(Slot::Const),
        }
    };
    let mut conjuncts = Vec::with_capacity(pattern.conjuncts.len());
    for c in &pattern.conjuncts {
        conjuncts.push([slot(&c.s)?, slot(&c.p)?, slot(&c.o)?]);
    }
    let mut filters = vec![Vec::new(); vars.len()];
    for f in &pattern.filters {
        let j = vars.binary_search(&f.var).expect("validated filter variable");
        filters[j].push(f);
    }
    Some(Plan { conjuncts, filters })
}

fn estimate(store: &TripleStore, c: &[Slot; 3]) -> usize {
    let id = |s: Slot| match s {
        Slot::Const(id) => Some(id),
        Slot::Var(_) => None,
    };
    store.count(id(c[0]), id(c[1]), id(c[2]))
}

struct Join<'a> {
    store: &'a TripleStore,
    plan: &'a Plan<'a>,
    order: &'a [usize],
    binding: Vec<Option<TermId>>,
    out: BTreeSet<Vec<TermId>>,
}

impl Join<'_> {
    fn run(&mut self, depth: usize) {
        let Some(&ci) = self.order.get(depth) else {
            let row = self.binding.iter().map(|b| b.expect("all variables bound")).collect();
            self.out.insert(row);
            return;
        };
        let c = self.plan.conjuncts[ci];
        let bound = |s: Slot, binding: &[Option<TermId>]| match s {
            Slot::Const(id) => Some(id),
            Slot::Var(v) => binding[v],
        };
        let key = [bound(c[0], &self.binding), bound(c[1], &self.binding), bound(c[2], &self.binding)];
        let store = self.store;
        'triples: for ids in store.scan(key[0], key[1], key[2]) {
            let mut newly = [usize::MAX; 3];
            for pos in 0..3 {
                if let Slot::Var(v) = c[pos] {
                    match self.binding[v] {
                        Some(x) if x != ids[pos] => {
                            self.undo(&newly);
                            continue 'triples;
                        }
                        Some(_) => {}
                        None => {
                            self.binding[v] = Some(ids[pos]);
                            newly[pos] = v;
                            let term = store.term(ids[pos]);
                            if !self.plan.filters[v].iter().all(|f| matches_filter(term, f)) {
                                self.undo(&newly);
                                continue 'triples;
                            }
                        }
                    }
                }
            }
            self.run(depth + 1);
            self.undo(&newly);
        }
    }

    fn undo(&mut self, newly: &[usize; 3]) {
        for &v in newly {
            if v != usize::MAX {
                self.binding[v] = None;
            }
        }
    }
}

fn evaluate(store: &TripleStore, pattern: &Pattern, order: Option<&[usize]>) -> Result<(Vec<String>, BTreeSet<Vec<TermId>>), QueryError> {
    pattern.validate()?;
    let vars: Vec<String> = pattern.variables().into_iter().collect();
    let Some(plan) = plan(store, pattern, &vars) else {
        return Ok((vars, BTreeSet::new()));
    };
    let order: Vec<usize> = match order {
        Some(o) => {
            let mut check = o.to_vec();
            check.sort_unstable();
            assert!(
                check == (0..plan.conjuncts.len()).collect::<Vec<_>>(),
                "join order must be a permutation of the conjuncts"
            );
            o.to_vec()
        }
        None => {
            let mut keyed: Vec<(usize, usize)> = plan
                .conjuncts
                .iter()
                .enumerate()
                .map(|(i, c)| (estimate(store, c), i))
                .collect();
            keyed.sort_unstable();
            keyed.into_iter().map(|(_, i)| i).collect()
        }
    };
    let mut join = Join {
        store,
        plan: &plan,
        order: &order,
        binding: vec![None; vars.len()],
        out: BTreeSet::new(),
    };
    join.run(0);
    Ok((vars, join.out))
}

fn to_solutions(store: &TripleStore, vars: Vec<String>, rows: BTreeSet<Vec<TermId>>) -> Solutions {
    Solutions {
        variables: vars,
        rows: rows
            .into_iter()
            .map(|r| r.into_iter().map(|id| store.term(id).clone()).collect())
            .collect(),
    }
}

/// Evaluates a basic graph pattern: conjuncts ordered by ascending candidate
/// count, index nested-loop join, filters applied as soon as their variable
/// binds.
pub fn query(store: &TripleStore, pattern: &Pattern) -> Result<Solutions, QueryError> {
    let (vars, rows) = evaluate(store, pattern, None)?;
    Ok(to_solutions(store, vars, rows))
}

/// Same as [`query`] with an explicit join order (a permutation of conjunct
/// indices).
pub fn query_in_order(store: &TripleStore, pattern: &Pattern, order: &[usize]) -> Result<Solutions, QueryError> {
    let (vars, rows) = evaluate(store, pattern, Some(order))?;
    Ok(to_solutions(store, vars, rows))
}

/// Every triple having, as subject or object, a term bound to one of the
/// projected variables in some solution.
pub fn export_subgraph(store: &TripleStore, pattern: &Pattern, projection: &[&str]) -> Result<Graph, QueryError> {
    pattern.validate()?;
    let vars: Vec<String> = pattern.variables().into_iter().collect();
    let mut cols = Vec::new();
    for p in projection {
        let name = p.strip_prefix('?').unwrap_or(p);
        match vars.binary_search_by(|v| v.as_str().cmp(name)) {
            Ok(j) => cols.push(j),
            Err(_) => return Err(QueryError::UnknownProjectionVariable(name.to_string())),
        }
    }
    let (_, rows) = evaluate(store, pattern, None)?;
    let nodes: BTreeSet<TermId> = rows.iter().flat_map(|r| cols.iter().map(|&j| r[j])).collect();
    let mut ids = BTreeSet::new();
    for &n in &nodes {
        ids.extend(store.scan(Some(n), None, None));
        ids.extend(store.scan(None, None, Some(n)));
    }
    Ok(ids.into_iter().map(|t| store.resolve(t)).collect())
}

/// Reference matcher over a plain triple set: tries every triple for every
/// conjunct (backtracking on conflicts) and checks filters on complete
/// assignments. Quadratic or worse; meant for cross-checking [`query`].
pub fn brute_force_query(graph: &Graph, pattern: &Pattern) -> Result<BTreeSet<BTreeMap<String, Term>>, QueryError> {
    pattern.validate()?;
    let triples: Vec<[Term; 3]> = graph
        .iter()
        .map(|t| [t.subject.clone().into(), Term::Iri(t.predicate.clone()), t.object.clone()])
        .collect();
    let mut out = BTreeSet::new();
    let mut binding = BTreeMap::new();
    assign(&triples, pattern, 0, &mut binding, &mut out);
    Ok(out)
}

fn assign(
    triples: &[[Term; 3]],
    pattern: &Pattern,
    i: usize,
    binding: &mut BTreeMap<String, Term>,
    out: &mut BTreeSet<BTreeMap<String, Term>>,
) {
    let Some(c) = pattern.conjuncts.get(i) else {
        if pattern.filters.iter().all(|f| oracle_filter(&binding[&f.var], f)) {
            out.insert(binding.clone());
        }
        return;
    };
    for t in triples {
        let saved = binding.clone();
        let ok = c.positions().into_iter().zip(t.iter()).all(|(pt, term)| match pt {
            PatternTerm::Const(k) => k == term,
            PatternTerm::Var(v) => match binding.get(v) {
                Some(b) => b == term,
                None => {
                    binding.insert(v.clone(), term.clone());
                    true
                }
            },
        });
        if ok {
            assign(triples, pattern, i + 1, binding, out);
        }
        *binding = saved;
    }
}

fn oracle_filter(term: &Term, f: &Filter) -> bool {
    let int = |t: &Term| -> Option<i128> {
        let l = t.as_literal()?;
        if !l.is_integer() {
            return None;
        }
        l.lexical().parse::<i128>().ok()
    };
    match f.op {
        Comparator::Eq => term == &f.value,
        Comparator::Ne => term != &f.value,
        op => match (int(term), int(&f.value)) {
            (Some(a), Some(b)) => match op {
                Comparator::Lt => a < b,
                Comparator::Le => a <= b,
                Comparator::Gt => a > b,
                _ => a >= b,
            },
            _ => false,
        },
    }
}
