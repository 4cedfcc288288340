use std::fmt;

use super::{Element, SmilesError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Atom(Element),
    /// Ring-closure label, 1 through 9.
    RingDigit(u8),
    /// Bond order spelled by `-`, `=` or `#`.
    Bond(u8),
    OpenBranch,
    CloseBranch,
}

/// One SMILES symbol together with its location in the source string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Token {
    pub kind: TokenKind,
    /// 0-based character offset into the source.
    pub offset: usize,
}

impl Token {
    pub fn text(&self) -> &'static str {
        match self.kind {
            TokenKind::Atom(e) => e.symbol(),
            TokenKind::RingDigit(d) => DIGITS[d as usize],
            TokenKind::Bond(1) => "-",
            TokenKind::Bond(2) => "=",
            TokenKind::Bond(_) => "#",
            TokenKind::OpenBranch => "(",
            TokenKind::CloseBranch => ")",
        }
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.text().len()
    }
}

const DIGITS: [&str; 10] = ["0", "1", "2", "3", "4", "5", "6", "7", "8", "9"];

pub(crate) fn bond_symbol(order: u8) -> &'static str {
    match order {
        1 => "-",
        2 => "=",
        _ => "#",
    }
}

/// A tokenized SMILES string. Token texts concatenate back to `source`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenSequence {
    source: String,
    tokens: Vec<Token>,
}

impl TokenSequence {
    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Byte range in `source` covered by tokens `start..start + len`.
    pub fn char_span(&self, start: usize, len: usize) -> std::ops::Range<usize> {
        let first = &self.tokens[start];
        let last = &self.tokens[start + len - 1];
        first.offset..last.offset + last.len()
    }
}

impl fmt::Display for TokenSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

/// Split a SMILES string into symbols. `Cl` and `Br` are single tokens.
pub fn tokenize(source: &str) -> Result<TokenSequence, SmilesError> {
    if source.is_empty() {
        return Err(SmilesError::EmptyInput);
    }
    let chars: Vec<char> = source.chars().collect();
    let mut tokens = Vec::with_capacity(chars.len());
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let next = chars.get(i + 1).copied();
        let (kind, width) = match c {
            'C' if next == Some('l') => (TokenKind::Atom(Element::Cl), 2),
            'B' if next == Some('r') => (TokenKind::Atom(Element::Br), 2),
            'B' => (TokenKind::Atom(Element::B), 1),
            'C' => (TokenKind::Atom(Element::C), 1),
            'N' => (TokenKind::Atom(Element::N), 1),
            'O' => (TokenKind::Atom(Element::O), 1),
            'P' => (TokenKind::Atom(Element::P), 1),
            'S' => (TokenKind::Atom(Element::S), 1),
            'F' => (TokenKind::Atom(Element::F), 1),
            'I' => (TokenKind::Atom(Element::I), 1),
            '1'..='9' => (TokenKind::RingDigit(c as u8 - b'0'), 1),
            '-' => (TokenKind::Bond(1), 1),
            '=' => (TokenKind::Bond(2), 1),
            '#' => (TokenKind::Bond(3), 1),
            '(' => (TokenKind::OpenBranch, 1),
            ')' => (TokenKind::CloseBranch, 1),
            other => {
                return Err(SmilesError::UnknownSymbol {
                    position: i,
                    character: other,
                })
            }
        };
        tokens.push(Token { kind, offset: i });
        i += width;
    }
    Ok(TokenSequence {
        source: source.to_owned(),
        tokens,
    })
}
