//! Tokenizing, parsing and re-encoding of organic-subset SMILES.
//!
//! Accepted: uppercase atoms `B C N O P S F Cl Br I`, bonds `- = #`, ring
//! digits `1`-`9` and branch parentheses. Aromatic atoms, bracket atoms,
//! `%nn` ring labels and `.` disconnection are rejected.

mod element;
mod encode;
mod graph;
mod parse;
mod token;

pub use element::Element;
pub use encode::encode;
pub use graph::{Atom, Bond, ElementCounts, GraphError, MolecularGraph, ValenceWarning};
pub use parse::parse;
pub use token::{tokenize, Token, TokenKind, TokenSequence};

/// Errors from tokenizing, parsing or encoding. Positions are 0-based
/// character offsets into the source string.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SmilesError {
    #[error("empty SMILES string")]
    EmptyInput,
    #[error("unknown symbol {character:?} at position {position}")]
    UnknownSymbol { position: usize, character: char },
    #[error("ring digit {digit} opened at position {position} is never closed")]
    UnmatchedRingDigit { position: usize, digit: u8 },
    #[error("unmatched parenthesis at position {position}")]
    UnmatchedParenthesis { position: usize },
    #[error("empty branch at position {position}")]
    EmptyBranch { position: usize },
    #[error("bond symbol at position {position} is not followed by an atom or ring digit")]
    DanglingBondSymbol { position: usize },
    #[error("structure token {symbol:?} at position {position} has no preceding atom")]
    LeadingStructureToken {
        position: usize,
        symbol: &'static str,
    },
    #[error("ring closure at position {position} conflicts with existing bond: {source}")]
    InvalidRingClosure { position: usize, source: GraphError },
    #[error("ring closure at position {position} has conflicting bond orders")]
    ConflictingRingBond { position: usize },
    #[error("graph is not connected")]
    Disconnected,
    #[error("more than 9 ring closures open at once")]
    RingDigitExhausted,
}

impl SmilesError {
    /// Stable identifier for diagnostics.
    pub fn code(&self) -> &'static str {
        match self {
            SmilesError::EmptyInput => "EmptyInput",
            SmilesError::UnknownSymbol { .. } => "UnknownSymbol",
            SmilesError::UnmatchedRingDigit { .. } => "UnmatchedRingDigit",
            SmilesError::UnmatchedParenthesis { .. } => "UnmatchedParenthesis",
            SmilesError::EmptyBranch { .. } => "EmptyBranch",
            SmilesError::DanglingBondSymbol { .. } => "DanglingBondSymbol",
            SmilesError::LeadingStructureToken { .. } => "LeadingStructureToken",
            SmilesError::InvalidRingClosure { .. } => "InvalidRingClosure",
            SmilesError::ConflictingRingBond { .. } => "ConflictingRingBond",
            SmilesError::Disconnected => "Disconnected",
            SmilesError::RingDigitExhausted => "RingDigitExhausted",
        }
    }
}

/// Tokenize, parse and fill implicit hydrogens in one step.
pub fn parse_smiles(source: &str) -> Result<MolecularGraph, SmilesError> {
    let tokens = tokenize(source)?;
    let graph = parse(&tokens)?;
    Ok(graph.assign_implicit_hydrogens().0)
}

/// Molecular formula of a SMILES string, e.g. `C11H15N5O5`.
pub fn formula_of(source: &str) -> Result<ElementCounts, SmilesError> {
    Ok(parse_smiles(source)?.molecular_formula())
}
