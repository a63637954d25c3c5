//! External service interfaces and the recorded-fixture implementations.
//!
//! A fixture directory holds `recordings.jsonl`; each line is
//! `{"key": ..., "response": ...}` or `{"key": ..., "error": "unavailable" |
//! "rate_limited" | "unknown_entity"}`.

use std::collections::HashMap;
use std::fs;
use std::path::Path;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClientError {
    #[error("client unavailable")]
    Unavailable,
    #[error("rate limited")]
    RateLimited,
    #[error("unknown entity")]
    UnknownEntity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub name: String,
    pub external_id: String,
    pub score: f64,
}

/// Platform profile behind a handle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UserInfo {
    pub name: String,
    #[serde(default)]
    pub platform_id: Option<String>,
}

/// Raw property values of an entity in source order; a property may carry
/// several values.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct FactRecord {
    pub gender: Vec<String>,
    pub birth_date: Vec<String>,
    pub country_of_citizenship: Vec<String>,
    pub place_of_birth: Vec<String>,
    pub occupation: Vec<String>,
    pub political_party: Vec<String>,
}

/// Resolves a platform handle (`@name`) to the account's display name.
pub trait HandleResolver {
    fn resolve(&self, handle: &str) -> Result<Option<UserInfo>, ClientError>;
}

/// Searches an external knowledge graph by name.
pub trait KgSearchClient {
    fn search(&self, name: &str, limit: usize) -> Result<Vec<Candidate>, ClientError>;
}

/// Fetches entity properties by external id.
pub trait FactsClient {
    fn facts(&self, external_id: &str) -> Result<FactRecord, ClientError>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exchange {
    pub client: String,
    pub key: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub response: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ClientError>,
}

/// Every request and its outcome, in call order.
#[derive(Debug, Clone, Default)]
pub struct ExchangeLog {
    entries: Arc<Mutex<Vec<Exchange>>>,
}

impl ExchangeLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&self, client: &str, key: &str, outcome: &Result<Value, ClientError>) {
        let (response, error) = match outcome {
            Ok(v) => (Some(v.clone()), None),
            Err(e) => (None, Some(e.clone())),
        };
        self.entries.lock().expect("log lock poisoned").push(Exchange {
            client: client.to_string(),
            key: key.to_string(),
            response,
            error,
        });
    }

    pub fn entries(&self) -> Vec<Exchange> {
        self.entries.lock().expect("log lock poisoned").clone()
    }

    pub fn to_jsonl(&self) -> String {
        self.entries()
            .iter()
            .map(|e| serde_json::to_string(e).expect("exchange serializes") + "\n")
            .collect()
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Recording {
    key: String,
    response: Option<Value>,
    error: Option<ClientError>,
}

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("reading {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}:{line}: {reason}")]
    Format { path: String, line: usize, reason: String },
}

/// Key -> recorded outcome, loaded from a fixture directory.
#[derive(Debug, Clone)]
pub struct Recordings {
    name: String,
    map: HashMap<String, Result<Value, ClientError>>,
    log: ExchangeLog,
}

impl Recordings {
    pub fn from_jsonl(name: &str, text: &str, origin: &str, log: ExchangeLog) -> Result<Self, FixtureError> {
        let mut map = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let fmt = |reason: String| FixtureError::Format {
                path: origin.to_string(),
                line: i + 1,
                reason,
            };
            let rec: Recording = serde_json::from_str(line).map_err(|e| fmt(e.to_string()))?;
            let outcome = match (rec.response, rec.error) {
                (Some(v), None) => Ok(v),
                (None, Some(e)) => Err(e),
                _ => return Err(fmt("exactly one of `response` or `error` required".into())),
            };
            if map.insert(rec.key.clone(), outcome).is_some() {
                return Err(fmt(format!("duplicate key `{}`", rec.key)));
            }
        }
        Ok(Recordings {
            name: name.to_string(),
            map,
            log,
        })
    }

    pub fn load(name: &str, dir: &Path, log: ExchangeLog) -> Result<Self, FixtureError> {
        let path = dir.join("recordings.jsonl");
        let text = fs::read_to_string(&path).map_err(|source| FixtureError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_jsonl(name, &text, &path.display().to_string(), log)
    }

    /// Recorded outcome for `key`, logged; `None` when nothing was recorded.
    fn replay(&self, key: &str) -> Option<Result<Value, ClientError>> {
        let outcome = self.map.get(key).cloned();
        if let Some(o) = &outcome {
            self.log.record(&self.name, key, o);
        } else {
            self.log.record(&self.name, key, &Ok(Value::Null));
        }
        outcome
    }
}

fn decode<T: for<'de> Deserialize<'de>>(v: Value) -> Result<T, ClientError> {
    serde_json::from_value(v).map_err(|e| {
        log::error!("malformed recorded response: {e}");
        ClientError::Unavailable
    })
}

pub struct FixtureHandleResolver(pub Recordings);
pub struct FixtureKgSearch(pub Recordings);
pub struct FixtureFacts(pub Recordings);

impl HandleResolver for FixtureHandleResolver {
    fn resolve(&self, handle: &str) -> Result<Option<UserInfo>, ClientError> {
        match self.0.replay(handle) {
            None => Ok(None),
            Some(outcome) => decode(outcome?).map(Some),
        }
    }
}

impl KgSearchClient for FixtureKgSearch {
    fn search(&self, name: &str, limit: usize) -> Result<Vec<Candidate>, ClientError> {
        match self.0.replay(name) {
            None => Ok(Vec::new()),
            Some(outcome) => {
                let mut found: Vec<Candidate> = decode(outcome?)?;
                found.truncate(limit);
                Ok(found)
            }
        }
    }
}

impl FactsClient for FixtureFacts {
    fn facts(&self, external_id: &str) -> Result<FactRecord, ClientError> {
        match self.0.replay(external_id) {
            None => Err(ClientError::UnknownEntity),
            Some(outcome) => decode(outcome?),
        }
    }
}

/// The three fixture clients loaded from `<root>/handles`, `<root>/search`
/// and `<root>/facts`, sharing one exchange log.
pub struct FixtureClients {
    pub handles: FixtureHandleResolver,
    pub search: FixtureKgSearch,
    pub facts: FixtureFacts,
    pub log: ExchangeLog,
}

impl FixtureClients {
    pub fn load(root: &Path) -> Result<Self, FixtureError> {
        let log = ExchangeLog::new();
        Ok(FixtureClients {
            handles: FixtureHandleResolver(Recordings::load("handles", &root.join("handles"), log.clone())?),
            search: FixtureKgSearch(Recordings::load("search", &root.join("search"), log.clone())?),
            facts: FixtureFacts(Recordings::load("facts", &root.join("facts"), log.clone())?),
            log,
        })
    }
}
