//! Corpus-level domain types: messages, annotation schemes and judgments,
//! people, and the communicative situations that bind them.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::model::term::Iri;

/// Platform embodiment of a message.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Genre {
    Tweet,
    FacebookPost,
    NewsHeadline,
    WebContent,
}

impl Genre {
    pub const ALL: [Genre; 4] = [
        Genre::Tweet,
        Genre::FacebookPost,
        Genre::NewsHeadline,
        Genre::WebContent,
    ];

    /// Local name of the manifestation class.
    pub fn class_name(self) -> &'static str {
        match self {
            Genre::Tweet => "Tweet",
            Genre::FacebookPost => "FacebookPost",
            Genre::NewsHeadline => "NewsHeadline",
            Genre::WebContent => "WebContent",
        }
    }

    pub fn slug(self) -> &'static str {
        match self {
            Genre::Tweet => "tweet",
            Genre::FacebookPost => "facebook_post",
            Genre::NewsHeadline => "news_headline",
            Genre::WebContent => "web_content",
        }
    }
}

impl FromStr for Genre {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm: String = s
            .chars()
            .filter(|c| c.is_alphanumeric())
            .flat_map(char::to_lowercase)
            .collect();
        match norm.as_str() {
            "tweet" => Ok(Genre::Tweet),
            "facebookpost" | "facebook" => Ok(Genre::FacebookPost),
            "newsheadline" | "headline" => Ok(Genre::NewsHeadline),
            "webcontent" | "web" => Ok(Genre::WebContent),
            _ => Err(format!("unknown genre `{s}`")),
        }
    }
}

/// An annotated text (an Expression) and the corpora it belongs to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Message {
    pub id: String,
    pub text: String,
    pub genre: Genre,
    pub corpus_ids: BTreeSet<String>,
}

impl Message {
    pub fn new(id: impl Into<String>, text: impl Into<String>, genre: Genre, corpus: impl Into<String>) -> Self {
        Message {
            id: id.into(),
            text: text.into(),
            genre,
            corpus_ids: BTreeSet::from([corpus.into()]),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ValueDomain {
    Binary,
    Categorical(Vec<String>),
    IntegerScale { min: i64, max: i64 },
}

/// One annotated value.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AnnotationValue {
    Int(i64),
    Label(String),
}

impl fmt::Display for AnnotationValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnnotationValue::Int(v) => write!(f, "{v}"),
            AnnotationValue::Label(l) => f.write_str(l),
        }
    }
}

/// An annotation scheme: a named description with a value domain.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AnnotationScheme {
    pub name: String,
    pub domain: ValueDomain,
}

impl AnnotationScheme {
    pub fn new(name: impl Into<String>, domain: ValueDomain) -> Self {
        AnnotationScheme {
            name: name.into(),
            domain,
        }
    }

    /// CamelCase class local name: "hate speech" -> "HateSpeech".
    pub fn class_name(&self) -> String {
        camel_case(&self.name)
    }

    pub fn contains(&self, value: &AnnotationValue) -> bool {
        match (&self.domain, value) {
            (ValueDomain::Binary, AnnotationValue::Int(v)) => *v == 0 || *v == 1,
            (ValueDomain::IntegerScale { min, max }, AnnotationValue::Int(v)) => min <= v && v <= max,
            (ValueDomain::Categorical(labels), AnnotationValue::Label(l)) => labels.contains(l),
            _ => false,
        }
    }

    /// Reads a raw cell into a value of this scheme's domain. Returns `None`
    /// when the cell is not a member of the domain.
    pub fn parse_value(&self, raw: &str) -> Option<AnnotationValue> {
        let raw = raw.trim();
        let value = match &self.domain {
            ValueDomain::Binary => match raw.to_ascii_lowercase().as_str() {
                "0" | "false" => AnnotationValue::Int(0),
                "1" | "true" => AnnotationValue::Int(1),
                _ => return None,
            },
            ValueDomain::IntegerScale { .. } => AnnotationValue::Int(raw.parse().ok()?),
            ValueDomain::Categorical(_) => AnnotationValue::Label(raw.to_string()),
        };
        self.contains(&value).then_some(value)
    }
}

pub(crate) fn camel_case(s: &str) -> String {
    let mut out = String::new();
    for word in s.split(|c: char| !c.is_alphanumeric()).filter(|w| !w.is_empty()) {
        let mut chars = word.chars();
        if let Some(first) = chars.next() {
            out.extend(first.to_uppercase());
            out.push_str(chars.as_str());
        }
    }
    out
}

/// Who produced a judgment. The gold standard stands for all aggregated
/// labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AnnotatorId {
    GoldStandard,
    Individual(String),
}

impl AnnotatorId {
    pub const GOLD_STANDARD: &'static str = "gold_standard";

    pub fn individual(n: u32) -> Self {
        AnnotatorId::Individual(format!("annotator_{n}"))
    }

    pub fn local_name(&self) -> &str {
        match self {
            AnnotatorId::GoldStandard => Self::GOLD_STANDARD,
            AnnotatorId::Individual(id) => id,
        }
    }
}

impl FromStr for AnnotatorId {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(if s == Self::GOLD_STANDARD {
            AnnotatorId::GoldStandard
        } else {
            AnnotatorId::Individual(s.to_string())
        })
    }
}

impl fmt::Display for AnnotatorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.local_name())
    }
}

/// One (message, scheme, value, annotator) judgment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotationRecord {
    pub message_ref: String,
    pub scheme: Arc<AnnotationScheme>,
    pub value: AnnotationValue,
    pub annotator: AnnotatorId,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PersonFacts {
    pub gender: Option<String>,
    pub birth_year: Option<i32>,
    pub country_of_citizenship: Option<Iri>,
    pub place_of_birth: Option<Iri>,
    pub occupation: Option<Iri>,
    pub political_party: Option<Iri>,
}

impl PersonFacts {
    pub fn is_empty(&self) -> bool {
        *self == PersonFacts::default()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Person {
    /// Local name of the person node, e.g. `usr_7986` or `@ckyenge`.
    pub id: String,
    pub handle: Option<String>,
    /// Numeric platform account id, when known.
    pub platform_id: Option<String>,
    pub facts: Option<PersonFacts>,
}

impl Person {
    pub fn new(id: impl Into<String>) -> Self {
        Person {
            id: id.into(),
            handle: None,
            platform_id: None,
            facts: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    Addresser,
    Addressee,
    Target,
    Annotator,
    HateSpeechMessage,
}

impl Role {
    pub fn local_name(self) -> &'static str {
        match self {
            Role::Addresser => "Addresser",
            Role::Addressee => "Addressee",
            Role::Target => "Target",
            Role::Annotator => "Annotator",
            Role::HateSpeechMessage => "HateSpeechMessage",
        }
    }

    pub fn applies_to_messages(self) -> bool {
        self == Role::HateSpeechMessage
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParticipantEntity {
    Message(Message),
    Person(Person),
    /// A group target such as "minorities", kept as an opaque IRI.
    Group(Iri),
}

impl ParticipantEntity {
    /// Identifier used by `Participant::target` references.
    pub fn key(&self) -> &str {
        match self {
            ParticipantEntity::Message(m) => &m.id,
            ParticipantEntity::Person(p) => &p.id,
            ParticipantEntity::Group(iri) => iri.as_str(),
        }
    }

    pub fn is_message(&self) -> bool {
        matches!(self, ParticipantEntity::Message(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Participant {
    pub entity: ParticipantEntity,
    pub role: Role,
    /// Key of another participant of the same situation.
    pub target: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Situation {
    pub id: String,
    pub participants: Vec<Participant>,
}
