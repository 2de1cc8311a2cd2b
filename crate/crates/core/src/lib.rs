//! Linking RDF graphs through their subject-predicate-object structure.
//!
//! * [`ntriples`] reads and writes N-Triples.
//! * [`graphmodel`] interns terms, skolemizes blank nodes and projects a graph
//!   onto a labeled multigraph.
//! * [`relate`] classifies how two graphs relate by intersecting their
//!   subject, predicate and object sets.
//! * [`patterns`] mines adaptive relational patterns over a store of symbol
//!   sequences, one sequence per session.
//! * [`belief`] combines relation evidence with Dempster's rule to decide
//!   whether two graphs match.
//!
//! Belief computations are generic over [`Scalar`]; the aliases below fix the
//! common choices.

pub mod belief;
pub mod graphmodel;
pub mod model;
pub mod ntriples;
pub mod patterns;
pub mod relate;
pub mod scalar;

pub use graphmodel::{project_multigraph, reify_blank_nodes, LabeledMultigraph, SymbolId, SymbolTable};
pub use model::{BlankNode, Graph, Iri, Literal, Term, TermKind, Triple};
pub use ntriples::{parse_document, parse_line, serialize, ParseError};
pub use patterns::{MiningStore, Pattern, PatternSet, SequenceStore, SessionState};
pub use relate::{classify_pair, component_sets, relate_all, LinkGraph, RelationKind, RelationReport, ScoringConfig};
pub use scalar::Scalar;

pub use num_rational::BigRational;

pub type MassFunction = belief::MassFunction<f64>;
pub type MassFunctionF32 = belief::MassFunction<f32>;
pub type ExactMassFunction = belief::MassFunction<BigRational>;

pub type BeliefTable = belief::BeliefTable<f64>;
pub type ExactBeliefTable = belief::BeliefTable<BigRational>;

pub type MatchResult = belief::MatchResult<f64>;
pub type ExactMatchResult = belief::MatchResult<BigRational>;
