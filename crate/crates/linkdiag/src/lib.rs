//! Combinatorial link diagrams.
//!
//! A diagram is a 4-valent plane graph with under/over data at every vertex,
//! stored as PD tuples. On top of that this crate provides Reidemeister
//! moves with replayable traces, primality and connected-sum splitting,
//! satellite constructions (blackboard-framed doubles, entanglement of a
//! pattern with a companion, cables), the Kauffman bracket and Jones
//! polynomial, and a census of small diagrams with crossing-number bound
//! experiments.

pub(crate) mod builder;
pub mod census;
pub mod diagram;
pub mod error;
pub mod invariants;
pub mod moves;
pub mod poly;
pub mod satellite;
pub mod structure;

pub use diagram::{Diagram, DiagramJson};
pub use error::{LinkError, Result};
pub use poly::LaurentPoly;
