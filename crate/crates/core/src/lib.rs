//! Requirement compilation: controlled English to conceptual graphs, logic,
//! Z schemas and CAD check rules, plus the merged semantic network.

pub mod cadlink;
pub mod cg;
pub mod lexicon;
pub mod logic;
pub mod network;
pub mod ontology;
pub mod pipeline;
pub mod project;
pub mod resources;
pub mod semantics;
pub mod syntax;
pub mod zspec;
