use super::token::bond_symbol;
use super::{MolecularGraph, SmilesError};

struct Traversal {
    order: Vec<usize>,
    /// Tree children per atom, in visit order, with the bond order to each.
    children: Vec<Vec<(usize, u8)>>,
    /// Non-tree bonds as (earlier atom, later atom, order).
    closures: Vec<(usize, usize, u8)>,
}

fn traverse(graph: &MolecularGraph) -> Traversal {
    let n = graph.atom_count();
    let mut visited = vec![false; n];
    let mut tree_bond = vec![false; graph.bond_count()];
    let mut closed = vec![false; graph.bond_count()];
    let mut rank = vec![usize::MAX; n];
    let mut out = Traversal {
        order: Vec::with_capacity(n),
        children: vec![Vec::new(); n],
        closures: Vec::new(),
    };

    // explicit stack of (atom, next neighbor cursor)
    let mut stack: Vec<(usize, usize)> = vec![(0, 0)];
    visited[0] = true;
    rank[0] = 0;
    out.order.push(0);
    let neighbor_bonds = |v: usize| {
        let mut ids: Vec<usize> = graph.incident(v).to_vec();
        ids.sort_by_key(|&id| graph.bonds()[id].other(v));
        ids
    };
    let sorted: Vec<Vec<usize>> = (0..n).map(neighbor_bonds).collect();
    while let Some(top) = stack.last_mut() {
        let v = top.0;
        let Some(&id) = sorted[v].get(top.1) else {
            stack.pop();
            continue;
        };
        top.1 += 1;
        if tree_bond[id] || closed[id] {
            continue;
        }
        let bond = graph.bonds()[id];
        let w = bond.other(v);
        if visited[w] {
            closed[id] = true;
            out.closures.push((w, v, bond.order));
        } else {
            tree_bond[id] = true;
            visited[w] = true;
            rank[w] = out.order.len();
            out.order.push(w);
            out.children[v].push((w, bond.order));
            stack.push((w, 0));
        }
    }
    out.closures
        .sort_by_key(|&(open, close, _)| (rank[open], rank[close]));
    out
}

/// Write a connected graph as SMILES.
///
/// Depth-first from atom 0, neighbors visited in ascending index order.
/// Ring-closure digits take the lowest free label and are reused once
/// closed; the bond symbol of a closure is written at its opening digit.
/// All but the last child at a branch point are parenthesized.
pub fn encode(graph: &MolecularGraph) -> Result<String, SmilesError> {
    if graph.atom_count() == 0 {
        return Err(SmilesError::EmptyInput);
    }
    if !graph.is_connected() {
        return Err(SmilesError::Disconnected);
    }
    let t = traverse(graph);

    // per atom: closures where it is the earlier (opening) or later atom
    let n = graph.atom_count();
    let mut opens: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut closes: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, &(open, close, _)) in t.closures.iter().enumerate() {
        opens[open].push(i);
        closes[close].push(i);
    }

    let mut out = String::with_capacity(n * 2);
    let mut labels: Vec<Option<u8>> = vec![None; t.closures.len()];
    let mut free = [true; 10];
    free[0] = false;

    enum Step {
        Enter(usize, u8),
        Text(&'static str),
    }
    let mut work = vec![Step::Enter(t.order[0], 1)];
    while let Some(step) = work.pop() {
        let (atom, order) = match step {
            Step::Text(s) => {
                out.push_str(s);
                continue;
            }
            Step::Enter(atom, order) => (atom, order),
        };
        if order > 1 {
            out.push_str(bond_symbol(order));
        }
        out.push_str(graph.atoms()[atom].element.symbol());
        for &c in &closes[atom] {
            let d = labels[c].expect("closure opened before it closes");
            free[d as usize] = true;
            out.push(char::from(b'0' + d));
        }
        for &c in &opens[atom] {
            let d = (1..=9u8)
                .find(|&d| free[d as usize])
                .ok_or(SmilesError::RingDigitExhausted)?;
            free[d as usize] = false;
            labels[c] = Some(d);
            let bond_order = t.closures[c].2;
            if bond_order > 1 {
                out.push_str(bond_symbol(bond_order));
            }
            out.push(char::from(b'0' + d));
        }
        let kids = &t.children[atom];
        // pushed in reverse so the first child is emitted first
        if let Some((&(last, last_order), rest)) = kids.split_last() {
            work.push(Step::Enter(last, last_order));
            for &(child, child_order) in rest.iter().rev() {
                work.push(Step::Text(")"));
                work.push(Step::Enter(child, child_order));
                work.push(Step::Text("("));
            }
        }
    }
    Ok(out)
}
