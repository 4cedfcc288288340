#![allow(dead_code)]

use std::io::{Read, Write};
use std::net::{SocketAddr, TcpListener};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use fraglead_core::smiles::{Element, MolecularGraph};
use rand::seq::SliceRandom;
use rand::Rng;

pub const NELARABINE: &str = "COC1=NC(N)=NC2=C1N=CN2C1OC(CO)C(O)C1O";
pub const MIDAZOLAM: &str = "CC1=NC=C2N1C3=C(C=C(C=C3)Cl)C(=NC2)C4=CC=CC=C4F";

/// One row of a historical result table, as printed.
pub struct PrintedRow {
    pub size: f64,
    pub log: f64,
    pub symbols: usize,
    pub printed: &'static str,
    /// Fragment after the minimal character repair, when one was needed.
    pub fragment: &'static str,
}

const fn row(
    size: f64,
    log: f64,
    symbols: usize,
    printed: &'static str,
    fragment: &'static str,
) -> PrintedRow {
    PrintedRow {
        size,
        log,
        symbols,
        printed,
        fragment,
    }
}

pub const NELARABINE_TABLE: [PrintedRow; 9] = [
    row(38.5e6, 7.59, 2, "NC", "NC"),
    row(772e3, 5.89, 4, "CN2C", "CN2C"),
    row(189e6, 8.28, 6, "=NC2=C", "=NC2=C"),
    // '{' is not a SMILES symbol; read as '('
    row(19e6, 7.28, 8, "COC1=NC{", "COC1=NC("),
    row(9.14e3, 3.96, 10, "NC2=C1N=CN", "NC2=C1N=CN"),
    row(21.0, 1.32, 12, "CN2C1OC(CO)C", "CN2C1OC(CO)C"),
    row(3800.0, 3.58, 14, "NC(N)=NC2=C1N=", "NC(N)=NC2=C1N="),
    row(165.0, 2.22, 16, "(N)=NC2=C1N=CN2C", "(N)=NC2=C1N=CN2C"),
    row(2540.0, 3.4, 18, "C1=NC(N)=NC2=C1N=C", "C1=NC(N)=NC2=C1N=C"),
];

pub const MIDAZOLAM_TABLE: [PrintedRow; 9] = [
    row(14.9e6, 7.17, 2, "C1", "C1"),
    row(2.1e6, 6.32, 4, "C1=N", "C1=N"),
    // printed size 229e2 disagrees with the printed log 8.36
    row(229e2, 8.36, 6, "N1C3=C", "N1C3=C"),
    // "CI" read as the chlorine atom "Cl"
    row(729e3, 5.86, 8, "(C=C3)CI", "(C=C3)Cl"),
    row(368e3, 5.56, 10, "C(=NC2)C4=", "C(=NC2)C4="),
    row(143e3, 5.16, 12, "C4=CC=CC=C4F", "C4=CC=CC=C4F"),
    // printed ')' is not in the parent string; read as '=' to keep it contiguous
    row(218.0, 2.34, 14, "C1=NC=C2N1C3)C", "C1=NC=C2N1C3=C"),
    row(3320.0, 3.52, 16, "NC2)C4=CC=CC=C4F", "NC2)C4=CC=CC=C4F"),
    row(7.0, 0.85, 18, "CC1=NC=C2N1C3=C(C=", "CC1=NC=C2N1C3=C(C="),
];

// ---------------------------------------------------------------------------
// Graph isomorphism oracle: backtracking over element- and degree-matched
// candidates, checking bond orders against every already-mapped atom.

pub fn isomorphic(g: &MolecularGraph, h: &MolecularGraph) -> bool {
    let n = g.atom_count();
    if n != h.atom_count() || g.bond_count() != h.bond_count() {
        return false;
    }
    let degree = |m: &MolecularGraph, i: usize| m.neighbors(i).len();
    let mut g_profile: Vec<_> = (0..n)
        .map(|i| (g.atoms()[i].element, degree(g, i)))
        .collect();
    let mut h_profile: Vec<_> = (0..n)
        .map(|i| (h.atoms()[i].element, degree(h, i)))
        .collect();
    g_profile.sort();
    h_profile.sort();
    if g_profile != h_profile {
        return false;
    }
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    extend(g, h, 0, &mut map, &mut used)
}

fn order(m: &MolecularGraph, a: usize, b: usize) -> u8 {
    m.bond_between(a, b).map_or(0, |bond| bond.order)
}

fn extend(
    g: &MolecularGraph,
    h: &MolecularGraph,
    v: usize,
    map: &mut [usize],
    used: &mut [bool],
) -> bool {
    let n = g.atom_count();
    if v == n {
        return true;
    }
    for w in 0..n {
        if used[w]
            || g.atoms()[v].element != h.atoms()[w].element
            || g.neighbors(v).len() != h.neighbors(w).len()
        {
            continue;
        }
        if (0..v).any(|u| order(g, v, u) != order(h, w, map[u])) {
            continue;
        }
        map[v] = w;
        used[w] = true;
        if extend(g, h, v + 1, map, used) {
            return true;
        }
        used[w] = false;
    }
    map[v] = usize::MAX;
    false
}

/// Random connected graph: a random tree of `1..=max_atoms` atoms plus up
/// to `max_rings` extra bonds, atom labels shuffled.
pub fn random_graph<R: Rng>(rng: &mut R, max_atoms: usize, max_rings: usize) -> MolecularGraph {
    let n = rng.gen_range(1..=max_atoms);
    let mut labels: Vec<usize> = (0..n).collect();
    labels.shuffle(rng);
    let elements: Vec<Element> = (0..n)
        .map(|_| {
            if rng.gen_bool(0.5) {
                Element::C
            } else {
                *Element::ALL.choose(rng).unwrap()
            }
        })
        .collect();
    let mut bonds: Vec<(usize, usize, u8)> = Vec::new();
    let random_order = |rng: &mut R| [1u8, 1, 1, 2, 2, 3][rng.gen_range(0..6)];
    for i in 1..n {
        let parent = rng.gen_range(0..i);
        bonds.push((parent, i, random_order(rng)));
    }
    let rings = if n >= 3 {
        rng.gen_range(0..=max_rings)
    } else {
        0
    };
    for _ in 0..rings {
        for _ in 0..20 {
            let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
            let exists = bonds
                .iter()
                .any(|&(x, y, _)| (x == a && y == b) || (x == b && y == a));
            if a != b && !exists {
                bonds.push((a, b, random_order(rng)));
                break;
            }
        }
    }
    // insert atoms in shuffled label order
    let mut graph = MolecularGraph::new();
    let mut position = vec![0; n];
    let mut inverse: Vec<usize> = (0..n).collect();
    inverse.sort_by_key(|&i| labels[i]);
    for (slot, &original) in inverse.iter().enumerate() {
        position[original] = slot;
        graph.add_atom(elements[original]);
    }
    bonds.shuffle(rng);
    for (a, b, o) in bonds {
        graph.add_bond(position[a], position[b], o).unwrap();
    }
    graph
}

// ---------------------------------------------------------------------------
// Minimal HTTP/1.1 server for exercising the web backend end to end.

pub struct MockServer {
    pub addr: SocketAddr,
    hits: Arc<AtomicUsize>,
    paths: Arc<Mutex<Vec<String>>>,
}

impl MockServer {
    /// `respond` maps the request target (path + query) to a status and body.
    pub fn start<F>(respond: F) -> Self
    where
        F: Fn(&str) -> (u16, String) + Send + 'static,
    {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        let hits = Arc::new(AtomicUsize::new(0));
        let paths = Arc::new(Mutex::new(Vec::new()));
        let (h, p) = (hits.clone(), paths.clone());
        std::thread::spawn(move || {
            for stream in listener.incoming() {
                let Ok(mut stream) = stream else { continue };
                let mut buf = Vec::new();
                let mut chunk = [0u8; 1024];
                while !buf.windows(4).any(|w| w == b"\r\n\r\n") {
                    match stream.read(&mut chunk) {
                        Ok(0) | Err(_) => break,
                        Ok(k) => buf.extend_from_slice(&chunk[..k]),
                    }
                }
                let request = String::from_utf8_lossy(&buf);
                let target = request.split_whitespace().nth(1).unwrap_or("").to_owned();
                h.fetch_add(1, Ordering::SeqCst);
                p.lock().unwrap().push(target.clone());
                let (status, body) = respond(&target);
                let reply = format!(
                    "HTTP/1.1 {status} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
                    body.len()
                );
                let _ = stream.write_all(reply.as_bytes());
            }
        });
        MockServer { addr, hits, paths }
    }

    pub fn url(&self, path_and_query: &str) -> String {
        format!("http://{}{}", self.addr, path_and_query)
    }

    pub fn hits(&self) -> usize {
        self.hits.load(Ordering::SeqCst)
    }

    pub fn paths(&self) -> Vec<String> {
        self.paths.lock().unwrap().clone()
    }
}
