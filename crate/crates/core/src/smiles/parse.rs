use super::{MolecularGraph, SmilesError, Token, TokenKind, TokenSequence};

struct OpenRing {
    atom: usize,
    order: Option<u8>,
    position: usize,
}

/// Build the heavy-atom graph described by a token sequence.
///
/// A bond symbol applies to the next bond created, whether that is a chain
/// bond to the following atom or a ring closure. Unmarked bonds have order 1.
/// Implicit hydrogens are left at zero; see
/// [`MolecularGraph::assign_implicit_hydrogens`].
pub fn parse(tokens: &TokenSequence) -> Result<MolecularGraph, SmilesError> {
    if tokens.is_empty() {
        return Err(SmilesError::EmptyInput);
    }
    let mut graph = MolecularGraph::new();
    let mut current: Option<usize> = None;
    let mut pending: Option<(u8, usize)> = None;
    // (atom the branch hangs from, position of '(', atoms created before it)
    let mut branches: Vec<(usize, usize, usize)> = Vec::new();
    let mut rings: [Option<OpenRing>; 10] = Default::default();

    for &Token { kind, offset } in tokens.tokens() {
        let anchor = |current: Option<usize>, symbol| {
            current.ok_or(SmilesError::LeadingStructureToken {
                position: offset,
                symbol,
            })
        };
        match kind {
            TokenKind::Atom(element) => {
                let atom = graph.add_atom(element);
                if let Some(prev) = current {
                    let order = pending.take().map_or(1, |(o, _)| o);
                    graph
                        .add_bond(prev, atom, order)
                        .expect("chain bond to a fresh atom is always valid");
                }
                current = Some(atom);
            }
            TokenKind::Bond(order) => {
                anchor(current, Token { kind, offset }.text())?;
                if let Some((_, position)) = pending {
                    return Err(SmilesError::DanglingBondSymbol { position });
                }
                pending = Some((order, offset));
            }
            TokenKind::RingDigit(digit) => {
                let atom = anchor(current, Token { kind, offset }.text())?;
                let order = pending.take().map(|(o, _)| o);
                let slot = &mut rings[digit as usize];
                match slot.take() {
                    None => {
                        *slot = Some(OpenRing {
                            atom,
                            order,
                            position: offset,
                        })
                    }
                    Some(open) => {
                        let order = match (open.order, order) {
                            (Some(a), Some(b)) if a != b => {
                                return Err(SmilesError::ConflictingRingBond { position: offset })
                            }
                            (a, b) => a.or(b).unwrap_or(1),
                        };
                        graph.add_bond(open.atom, atom, order).map_err(|source| {
                            SmilesError::InvalidRingClosure {
                                position: offset,
                                source,
                            }
                        })?;
                    }
                }
            }
            TokenKind::OpenBranch => {
                let atom = anchor(current, "(")?;
                if let Some((_, position)) = pending {
                    return Err(SmilesError::DanglingBondSymbol { position });
                }
                branches.push((atom, offset, graph.atom_count()));
            }
            TokenKind::CloseBranch => {
                anchor(current, ")")?;
                let Some((atom, _, atoms_before)) = branches.pop() else {
                    return Err(SmilesError::UnmatchedParenthesis { position: offset });
                };
                if let Some((_, position)) = pending {
                    return Err(SmilesError::DanglingBondSymbol { position });
                }
                if graph.atom_count() == atoms_before {
                    return Err(SmilesError::EmptyBranch { position: offset });
                }
                current = Some(atom);
            }
        }
    }

    if let Some((_, position)) = pending {
        return Err(SmilesError::DanglingBondSymbol { position });
    }
    if let Some(&(_, position, _)) = branches.last() {
        return Err(SmilesError::UnmatchedParenthesis { position });
    }
    if let Some((digit, open)) = rings
        .iter()
        .enumerate()
        .filter_map(|(d, r)| r.as_ref().map(|r| (d, r)))
        .min_by_key(|(_, r)| r.position)
    {
        return Err(SmilesError::UnmatchedRingDigit {
            position: open.position,
            digit: digit as u8,
        });
    }
    Ok(graph)
}
