use std::collections::BTreeMap;
use std::fmt;

use super::Element;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Atom {
    pub element: Element,
    pub implicit_h: u8,
}

impl Atom {
    pub fn new(element: Element) -> Self {
        Atom {
            element,
            implicit_h: 0,
        }
    }
}

/// Bond between two distinct atoms. `a < b` always holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Bond {
    pub a: usize,
    pub b: usize,
    pub order: u8,
}

impl Bond {
    pub fn other(&self, atom: usize) -> usize {
        if self.a == atom {
            self.b
        } else {
            self.a
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("atom index {0} out of range")]
    AtomOutOfRange(usize),
    #[error("self-loop on atom {0}")]
    SelfLoop(usize),
    #[error("atoms {0} and {1} are already bonded")]
    DuplicateBond(usize, usize),
    #[error("bond order {0} is not 1, 2 or 3")]
    InvalidOrder(u8),
}

/// Heavy-atom graph of a single connected molecule.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MolecularGraph {
    atoms: Vec<Atom>,
    bonds: Vec<Bond>,
    adjacency: Vec<Vec<usize>>,
}

impl MolecularGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_atom(&mut self, element: Element) -> usize {
        self.atoms.push(Atom::new(element));
        self.adjacency.push(Vec::new());
        self.atoms.len() - 1
    }

    pub fn add_bond(&mut self, x: usize, y: usize, order: u8) -> Result<usize, GraphError> {
        let n = self.atoms.len();
        for i in [x, y] {
            if i >= n {
                return Err(GraphError::AtomOutOfRange(i));
            }
        }
        if x == y {
            return Err(GraphError::SelfLoop(x));
        }
        if !(1..=3).contains(&order) {
            return Err(GraphError::InvalidOrder(order));
        }
        if self.bond_between(x, y).is_some() {
            return Err(GraphError::DuplicateBond(x.min(y), x.max(y)));
        }
        let id = self.bonds.len();
        self.bonds.push(Bond {
            a: x.min(y),
            b: x.max(y),
            order,
        });
        self.adjacency[x].push(id);
        self.adjacency[y].push(id);
        Ok(id)
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn bond_count(&self) -> usize {
        self.bonds.len()
    }

    /// Bond ids incident to `atom`, in insertion order.
    pub fn incident(&self, atom: usize) -> &[usize] {
        &self.adjacency[atom]
    }

    pub fn bond_between(&self, x: usize, y: usize) -> Option<&Bond> {
        self.adjacency
            .get(x)?
            .iter()
            .map(|&id| &self.bonds[id])
            .find(|b| b.other(x) == y)
    }

    /// Neighbor atoms of `atom` sorted by index.
    pub fn neighbors(&self, atom: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.adjacency[atom]
            .iter()
            .map(|&id| self.bonds[id].other(atom))
            .collect();
        out.sort_unstable();
        out
    }

    pub fn bond_order_sum(&self, atom: usize) -> u32 {
        self.adjacency[atom]
            .iter()
            .map(|&id| u32::from(self.bonds[id].order))
            .sum()
    }

    pub fn is_connected(&self) -> bool {
        if self.atoms.is_empty() {
            return true;
        }
        let mut seen = vec![false; self.atoms.len()];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for w in self.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.atoms.len()
    }

    /// Copy of the graph with every atom's implicit hydrogen count filled
    /// from its default valence. Over-bonded atoms clamp to zero and are
    /// reported.
    pub fn assign_implicit_hydrogens(&self) -> (MolecularGraph, Vec<ValenceWarning>) {
        let mut graph = self.clone();
        let mut warnings = Vec::new();
        for i in 0..graph.atoms.len() {
            let element = graph.atoms[i].element;
            let valence = u32::from(element.default_valence());
            let used = graph.bond_order_sum(i);
            if used > valence {
                warnings.push(ValenceWarning {
                    atom: i,
                    element,
                    bond_order_sum: used,
                });
            }
            graph.atoms[i].implicit_h = valence.saturating_sub(used) as u8;
        }
        (graph, warnings)
    }

    /// Element counts including implicit hydrogens.
    pub fn molecular_formula(&self) -> ElementCounts {
        let mut counts = ElementCounts::default();
        for atom in &self.atoms {
            *counts.heavy.entry(atom.element).or_insert(0) += 1;
            counts.hydrogen += u32::from(atom.implicit_h);
        }
        counts
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValenceWarning {
    pub atom: usize,
    pub element: Element,
    pub bond_order_sum: u32,
}

impl fmt::Display for ValenceWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "atom {} ({}) has bond order sum {} above default valence {}",
            self.atom,
            self.element,
            self.bond_order_sum,
            self.element.default_valence()
        )
    }
}

/// Molecular formula. Displays in Hill order: C, then H, then the rest
/// alphabetically; without carbon everything (H included) is alphabetical.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ElementCounts {
    heavy: BTreeMap<Element, u32>,
    hydrogen: u32,
}

impl ElementCounts {
    pub fn count(&self, symbol: &str) -> u32 {
        if symbol == "H" {
            return self.hydrogen;
        }
        Element::from_symbol(symbol)
            .and_then(|e| self.heavy.get(&e).copied())
            .unwrap_or(0)
    }

    /// `(symbol, count)` pairs in Hill order, zero counts omitted.
    pub fn hill_order(&self) -> Vec<(&'static str, u32)> {
        let mut rest: Vec<(&'static str, u32)> = self
            .heavy
            .iter()
            .filter(|(e, _)| **e != Element::C)
            .map(|(e, &n)| (e.symbol(), n))
            .collect();
        let carbon = self.heavy.get(&Element::C).copied().unwrap_or(0);
        let mut out = Vec::with_capacity(rest.len() + 2);
        if carbon > 0 {
            out.push(("C", carbon));
            if self.hydrogen > 0 {
                out.push(("H", self.hydrogen));
            }
        } else if self.hydrogen > 0 {
            rest.push(("H", self.hydrogen));
        }
        rest.sort_by(|a, b| a.0.cmp(b.0));
        out.extend(rest);
        out
    }
}

impl fmt::Display for ElementCounts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (symbol, n) in self.hill_order() {
            if n == 1 {
                write!(f, "{symbol}")?;
            } else {
                write!(f, "{symbol}{n}")?;
            }
        }
        Ok(())
    }
}
