//! IRI minting and the fixed vocabulary used by the encoders.

use thiserror::Error;
use uuid::Uuid;

use crate::model::term::Iri;
use crate::rdf::prefix::{self, PrefixError, PrefixMap};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MintError {
    #[error("prefix `{0}` is not registered")]
    UnknownPrefix(String),
    #[error("local name is empty")]
    EmptyLocalName,
}

/// Percent-escapes everything outside the unreserved, sub-delim, `:`, `@`,
/// `/` and `?` characters. Non-ASCII characters are kept verbatim unless
/// they are whitespace or control characters.
pub fn escape_local_name(local: &str) -> String {
    let mut out = String::with_capacity(local.len());
    for ch in local.chars() {
        let keep = if ch.is_ascii() {
            ch.is_ascii_alphanumeric()
                || matches!(
                    ch,
                    '-' | '.' | '_' | '~' | '!' | '$' | '&' | '\'' | '(' | ')' | '*' | '+' | ','
                        | ';' | '=' | ':' | '@' | '/' | '?'
                )
        } else {
            !ch.is_whitespace() && !ch.is_control()
        };
        if keep {
            out.push(ch);
        } else {
            let mut buf = [0u8; 4];
            for b in ch.encode_utf8(&mut buf).bytes() {
                out.push_str(&format!("%{b:02X}"));
            }
        }
    }
    out
}

/// `namespace:localName` to a full IRI under `prefixes`.
pub fn mint_iri(prefixes: &PrefixMap, namespace: &str, local_name: &str) -> Result<Iri, MintError> {
    let ns = prefixes
        .get(namespace)
        .ok_or_else(|| MintError::UnknownPrefix(namespace.to_string()))?;
    if local_name.is_empty() {
        return Err(MintError::EmptyLocalName);
    }
    let iri = format!("{}{}", ns.as_str(), escape_local_name(local_name));
    Ok(Iri::new(iri).expect("escaped local name under a valid namespace is a valid IRI"))
}

/// `scheme://authority/.well-known/genid/` for the given base.
fn genid_base(base: &str) -> String {
    let authority_end = base
        .find("://")
        .map(|i| {
            let rest = &base[i + 3..];
            i + 3 + rest.find(['/', '#', '?']).unwrap_or(rest.len())
        })
        .unwrap_or(base.len());
    format!("{}/.well-known/genid/", &base[..authority_end])
}

pub const DEFAULT_GENID_BASE: &str = "https://w3id.org/.well-known/genid/";

/// Resolved IRIs for every term the encoders emit, plus the prefix map they
/// were resolved against.
#[derive(Debug, Clone)]
pub struct Vocabulary {
    prefixes: PrefixMap,
    base: Iri,
    genid: String,
    skolem_ns: Uuid,

    pub rdf_type: Iri,
    pub rdfs_label: Iri,
    pub rdfs_sub_class_of: Iri,

    pub frbr_expression: Iri,
    pub frbr_embodiment: Iri,
    pub dul_is_part_of: Iri,
    pub dul_description: Iri,
    pub dul_is_role_of: Iri,
    pub prov_was_attributed_to: Iri,
    pub prov_agent: Iri,
    pub prov_person: Iri,
    pub lexinfo_part_of_speech: Iri,

    pub ontolex_lexical_entry: Iri,
    pub ontolex_lexical_sense: Iri,
    pub ontolex_lexical_concept: Iri,
    pub ontolex_sense: Iri,
    pub ontolex_is_lexicalized_sense_of: Iri,

    pub ster_annotation: Iri,
    pub ster_annotator: Iri,
    pub ster_chunk: Iri,
    pub ster_frame: Iri,
    pub ster_has_target: Iri,
    pub ster_stereotype: Iri,
    pub ster_was_clustered_as: Iri,
    pub ster_gender: Iri,
    pub ster_age: Iri,
    pub ster_birth_country: Iri,
    pub ster_round: Iri,

    pub situation: Iri,
    pub is_setting_for: Iri,
    pub has_role: Iri,
    pub has_text: Iri,
    pub has_target: Iri,
    pub person: Iri,
    pub group: Iri,
    pub annotation: Iri,
    pub is_described: Iri,
    pub has_value: Iri,
    pub has_id: Iri,
    pub handle: Iri,
    pub gender: Iri,
    pub birth_year: Iri,
    pub citizenship: Iri,
    pub country_of_citizenship: Iri,
    pub place_of_birth: Iri,
    pub occupation: Iri,
    pub political_party: Iri,
    pub lexical_entry: Iri,
    pub offensive: Iri,
}

impl Default for Vocabulary {
    fn default() -> Self {
        Vocabulary::with_base(prefix::DEFAULT_BASE).expect("default base is valid")
    }
}

impl Vocabulary {
    pub fn with_base(base: &str) -> Result<Self, PrefixError> {
        let prefixes = PrefixMap::standard_with_base(base)?;
        let m = |ns: &str, local: &str| mint_iri(&prefixes, ns, local).expect("static vocabulary");
        let genid = genid_base(base);
        Ok(Vocabulary {
            base: Iri::new(base)?,
            skolem_ns: Uuid::new_v5(&Uuid::NAMESPACE_URL, base.as_bytes()),
            rdf_type: m("rdf", "type"),
            rdfs_label: m("rdfs", "label"),
            rdfs_sub_class_of: m("rdfs", "subClassOf"),
            frbr_expression: m("frbr", "Expression"),
            frbr_embodiment: m("frbr", "embodiment"),
            dul_is_part_of: m("dul", "isPartOf"),
            dul_description: m("dul", "Description"),
            dul_is_role_of: m("dul", "isRoleOf"),
            prov_was_attributed_to: m("prov", "wasAttributedTo"),
            prov_agent: m("prov", "Agent"),
            prov_person: m("prov", "Person"),
            lexinfo_part_of_speech: m("lexinfo", "partOfSpeech"),
            ontolex_lexical_entry: m("ontolex", "LexicalEntry"),
            ontolex_lexical_sense: m("ontolex", "LexicalSense"),
            ontolex_lexical_concept: m("ontolex", "LexicalConcept"),
            ontolex_sense: m("ontolex", "sense"),
            ontolex_is_lexicalized_sense_of: m("ontolex", "isLexicalizedSenseOf"),
            ster_annotation: m("ster", "Annotation"),
            ster_annotator: m("ster", "Annotator"),
            ster_chunk: m("ster", "chunk"),
            ster_frame: m("ster", "frame"),
            ster_has_target: m("ster", "hasTarget"),
            ster_stereotype: m("ster", "Stereotype"),
            ster_was_clustered_as: m("ster", "wasClusteredAs"),
            ster_gender: m("ster", "gender"),
            ster_age: m("ster", "age"),
            ster_birth_country: m("ster", "birthCountry"),
            ster_round: m("ster", "clusteringRound"),
            situation: m("odang", "Situation"),
            is_setting_for: m("odang", "isSettingFor"),
            has_role: m("odang", "hasRole"),
            has_text: m("odang", "hasText"),
            has_target: m("odang", "hasTarget"),
            person: m("odang", "Person"),
            group: m("odang", "Group"),
            annotation: m("odang", "Annotation"),
            is_described: m("odang", "isDescribed"),
            has_value: m("odang", "hasValue"),
            has_id: m("odang", "hasID"),
            handle: m("odang", "handle"),
            gender: m("odang", "gender"),
            birth_year: m("odang", "birthYear"),
            citizenship: m("odang", "citizenship"),
            country_of_citizenship: m("odang", "countryOfCitizenship"),
            place_of_birth: m("odang", "placeOfBirth"),
            occupation: m("odang", "occupation"),
            political_party: m("odang", "politicalParty"),
            lexical_entry: m("odang", "LexicalEntry"),
            offensive: m("odang", "Offensive"),
            genid,
            prefixes,
        })
    }

    pub fn prefixes(&self) -> &PrefixMap {
        &self.prefixes
    }

    pub fn base(&self) -> &Iri {
        &self.base
    }

    pub fn genid_base(&self) -> &str {
        &self.genid
    }

    pub fn mint(&self, namespace: &str, local_name: &str) -> Result<Iri, MintError> {
        mint_iri(&self.prefixes, namespace, local_name)
    }

    /// IRI in the base namespace. Panics on an empty local name, which is an
    /// encoder bug rather than an input error.
    pub fn odang(&self, local_name: &str) -> Iri {
        self.mint("odang", local_name).expect("non-empty local name")
    }

    pub fn ster(&self, local_name: &str) -> Iri {
        self.mint("ster", local_name).expect("non-empty local name")
    }

    /// Deterministic skolem IRI for an anonymous node identified by `parts`.
    pub fn skolem(&self, parts: &[&str]) -> Iri {
        let mut key = Vec::new();
        for part in parts {
            key.extend_from_slice(part.as_bytes());
            key.push(0x1f);
        }
        let id = Uuid::new_v5(&self.skolem_ns, &key);
        Iri::new(format!("{}{}", self.genid, id.simple())).expect("genid IRI is valid")
    }
}
