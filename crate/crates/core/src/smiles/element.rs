use std::fmt;

/// Elements of the organic subset accepted by the tokenizer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Element {
    B,
    C,
    N,
    O,
    P,
    S,
    F,
    Cl,
    Br,
    I,
}

impl Element {
    pub const ALL: [Element; 10] = [
        Element::B,
        Element::C,
        Element::N,
        Element::O,
        Element::P,
        Element::S,
        Element::F,
        Element::Cl,
        Element::Br,
        Element::I,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            Element::B => "B",
            Element::C => "C",
            Element::N => "N",
            Element::O => "O",
            Element::P => "P",
            Element::S => "S",
            Element::F => "F",
            Element::Cl => "Cl",
            Element::Br => "Br",
            Element::I => "I",
        }
    }

    /// Lowest normal valence, used to fill implicit hydrogens.
    pub fn default_valence(self) -> u8 {
        match self {
            Element::C => 4,
            Element::N | Element::P | Element::B => 3,
            Element::O | Element::S => 2,
            Element::F | Element::Cl | Element::Br | Element::I => 1,
        }
    }

    pub fn from_symbol(symbol: &str) -> Option<Element> {
        Element::ALL.into_iter().find(|e| e.symbol() == symbol)
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}
