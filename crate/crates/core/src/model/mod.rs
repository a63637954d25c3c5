//! Domain model: RDF terms, IRI minting, corpus entities, validation, and
//! the canonical entity-to-triples encodings.

pub mod encode;
pub mod entities;
pub mod term;
pub mod validate;
pub mod vocab;

pub use encode::{encode_message, encode_person, encode_situation, EncodeError};
pub use entities::{
    AnnotationRecord, AnnotationScheme, AnnotationValue, AnnotatorId, Genre, Message, Participant,
    ParticipantEntity, Person, PersonFacts, Role, Situation, ValueDomain,
};
pub use term::{BlankNode, Graph, Iri, Literal, Subject, Term, TermError, Triple};
pub use validate::{validate_records, Validate, ValidationReport, Violation};
pub use vocab::{mint_iri, MintError, Vocabulary};
