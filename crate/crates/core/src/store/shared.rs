use std::sync::{Arc, RwLock, RwLockReadGuard};

use crate::model::term::{Graph, Triple};
use crate::store::{export_subgraph, query, Pattern, QueryError, Solutions, TripleStore};

/// Store handle for many readers or one writer. Inserts hold the write lock
/// for the whole batch, so queries never see a partially indexed triple.
#[derive(Debug, Clone, Default)]
pub struct SharedStore {
    inner: Arc<RwLock<TripleStore>>,
}

impl SharedStore {
    pub fn new(store: TripleStore) -> Self {
        SharedStore {
            inner: Arc::new(RwLock::new(store)),
        }
    }

    pub fn insert(&self, triples: &[Triple]) -> usize {
        self.inner.write().expect("store lock poisoned").insert(triples)
    }

    pub fn read(&self) -> RwLockReadGuard<'_, TripleStore> {
        self.inner.read().expect("store lock poisoned")
    }

    pub fn len(&self) -> usize {
        self.read().len()
    }

    pub fn is_empty(&self) -> bool {
        self.read().is_empty()
    }

    pub fn query(&self, pattern: &Pattern) -> Result<Solutions, QueryError> {
        query(&self.read(), pattern)
    }

    pub fn export_subgraph(&self, pattern: &Pattern, projection: &[&str]) -> Result<Graph, QueryError> {
        export_subgraph(&self.read(), pattern, projection)
    }
}
