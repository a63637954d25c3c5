//! HTTP clients for the public services: the X/Twitter v2 user lookup, the
//! Google Knowledge Graph Search API, and Wikidata. Not exercised by tests.

use std::time::Duration;

use reqwest::blocking::Client;
use reqwest::StatusCode;
use serde_json::Value;

use crate::linker::{Candidate, ClientError, ExchangeLog, FactRecord, FactsClient, HandleResolver, KgSearchClient, UserInfo};

fn http() -> Client {
    Client::builder()
        .timeout(Duration::from_secs(30))
        .user_agent(concat!("dskg/", env!("CARGO_PKG_VERSION")))
        .build()
        .expect("HTTP client builds")
}

fn get_json(log: &ExchangeLog, client_name: &str, key: &str, req: reqwest::blocking::RequestBuilder) -> Result<Value, ClientError> {
    let outcome = match req.send() {
        Err(e) => {
            log::warn!("{client_name}: {e}");
            Err(ClientError::Unavailable)
        }
        Ok(resp) => match resp.status() {
            StatusCode::TOO_MANY_REQUESTS => Err(ClientError::RateLimited),
            StatusCode::NOT_FOUND => Err(ClientError::UnknownEntity),
            s if !s.is_success() => Err(ClientError::Unavailable),
            _ => resp.json::<Value>().map_err(|_| ClientError::Unavailable),
        },
    };
    log.record(client_name, key, &outcome);
    outcome
}

pub struct LiveHandleResolver {
    http: Client,
    bearer_token: String,
    log: ExchangeLog,
}

impl LiveHandleResolver {
    pub fn new(bearer_token: impl Into<String>, log: ExchangeLog) -> Self {
        LiveHandleResolver {
            http: http(),
            bearer_token: bearer_token.into(),
            log,
        }
    }
}

impl HandleResolver for LiveHandleResolver {
    fn resolve(&self, handle: &str) -> Result<Option<UserInfo>, ClientError> {
        let username = handle.trim_start_matches('@');
        let url = format!("https://api.twitter.com/2/users/by/username/{username}");
        let req = self.http.get(url).bearer_auth(&self.bearer_token);
        let body = match get_json(&self.log, "handles", handle, req) {
            Err(ClientError::UnknownEntity) => return Ok(None),
            other => other?,
        };
        let Some(data) = body.get("data") else {
            return Ok(None);
        };
        Ok(data.get("name").and_then(Value::as_str).map(|name| UserInfo {
            name: name.to_string(),
            platform_id: data.get("id").and_then(Value::as_str).map(str::to_string),
        }))
    }
}

pub struct LiveKgSearch {
    http: Client,
    api_key: String,
    log: ExchangeLog,
}

impl LiveKgSearch {
    pub fn new(api_key: impl Into<String>, log: ExchangeLog) -> Self {
        LiveKgSearch {
            http: http(),
            api_key: api_key.into(),
            log,
        }
    }
}

impl KgSearchClient for LiveKgSearch {
    fn search(&self, name: &str, limit: usize) -> Result<Vec<Candidate>, ClientError> {
        let limit = limit.to_string();
        let req = self.http.get("https://kgsearch.googleapis.com/v1/entities:search").query(&[
            ("query", name),
            ("key", self.api_key.as_str()),
            ("limit", limit.as_str()),
            ("types", "Person"),
        ]);
        let body = get_json(&self.log, "search", name, req)?;
        let items = body.get("itemListElement").and_then(Value::as_array).cloned().unwrap_or_default();
        Ok(items
            .iter()
            .filter_map(|item| {
                let result = item.get("result")?;
                Some(Candidate {
                    name: result.get("name")?.as_str()?.to_string(),
                    external_id: result.get("@id")?.as_str()?.trim_start_matches("kg:").to_string(),
                    score: item.get("resultScore")?.as_f64()?,
                })
            })
            .collect())
    }
}

/// Wikidata facts for a Google KG id, found through the Google Knowledge
/// Graph ID (P2671) or Freebase ID (P646) statements.
pub struct LiveWikidataFacts {
    http: Client,
    log: ExchangeLog,
}

impl LiveWikidataFacts {
    pub fn new(log: ExchangeLog) -> Self {
        LiveWikidataFacts { http: http(), log }
    }

    fn qid_for(&self, external_id: &str) -> Result<String, ClientError> {
        let property = if external_id.starts_with("/m/") { "P646" } else { "P2671" };
        let search = format!("haswbstatement:{property}={external_id}");
        let req = self.http.get("https://www.wikidata.org/w/api.php").query(&[
            ("action", "query"),
            ("list", "search"),
            ("srsearch", search.as_str()),
            ("format", "json"),
        ]);
        let body = get_json(&self.log, "facts", external_id, req)?;
        body.pointer("/query/search/0/title")
            .and_then(Value::as_str)
            .map(str::to_string)
            .ok_or(ClientError::UnknownEntity)
    }
}

fn claim_values(entity: &Value, property: &str) -> Vec<String> {
    entity
        .pointer(&format!("/claims/{property}"))
        .and_then(Value::as_array)
        .map(|claims| {
            claims
                .iter()
                .filter_map(|c| {
                    let v = c.pointer("/mainsnak/datavalue/value")?;
                    v.get("id")
                        .or_else(|| v.get("time"))
                        .and_then(Value::as_str)
                        .map(str::to_string)
                })
                .collect()
        })
        .unwrap_or_default()
}

impl FactsClient for LiveWikidataFacts {
    fn facts(&self, external_id: &str) -> Result<FactRecord, ClientError> {
        let qid = self.qid_for(external_id)?;
        let url = format!("https://www.wikidata.org/wiki/Special:EntityData/{qid}.json");
        let body = get_json(&self.log, "facts", &qid, self.http.get(url))?;
        let entity = body.pointer(&format!("/entities/{qid}")).ok_or(ClientError::UnknownEntity)?;
        Ok(FactRecord {
            gender: claim_values(entity, "P21"),
            birth_date: claim_values(entity, "P569"),
            country_of_citizenship: claim_values(entity, "P27"),
            place_of_birth: claim_values(entity, "P19"),
            occupation: claim_values(entity, "P106"),
            political_party: claim_values(entity, "P102"),
        })
    }
}
