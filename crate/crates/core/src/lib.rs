//! Linearized-fragment search for drug leads.
//!
//! SMILES strings are tokenized into symbols, sliced into contiguous
//! fragments, and sent as literal queries to a search backend (a live web
//! API or an offline substring index). The resulting hit counts are fitted
//! against fragment length on a log scale. Fragments can also be kept in a
//! small drug-lead ontology (class, drug, components) that feeds queries.

pub mod analysis;
pub mod corpus;
pub mod fragment;
pub mod ontology;
pub mod search;
pub mod smiles;

pub use analysis::{ResultRow, ResultTable, TrendFit};
pub use corpus::{Corpus, SubstringIndex};
pub use fragment::{Fragment, SizeSchedule};
pub use ontology::{Component, DrugEntry, DrugLeadOntology};
pub use smiles::{
    encode, parse, parse_smiles, tokenize, ElementCounts, MolecularGraph, SmilesError, Token,
    TokenSequence,
};
