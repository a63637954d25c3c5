//! Knowledge-graph construction for annotated abusive-language corpora.
//!
//! * [`model`] domain types and their triple encodings
//! * [`rdf`] N-Triples / Turtle-subset codecs
//! * [`store`] indexed triple store and basic graph pattern queries
//! * [`ingest`] tabular corpora + mapping documents to messages and judgments
//! * [`linker`] mention extraction and fixture-backed entity linking
//! * [`lexprof`] lexicon-based category profiling
//! * [`stereotype`] chunk / minimum phrase / concept encoding and clustering checks

pub mod ingest;
pub mod lexprof;
pub mod linker;
pub mod model;
pub mod rdf;
pub mod stereotype;
pub mod store;
