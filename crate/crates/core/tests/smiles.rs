mod support;

use fraglead_core::smiles::{
    encode, formula_of, parse, parse_smiles, tokenize, Element, TokenKind,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use support::{isomorphic, random_graph, MIDAZOLAM, NELARABINE};

#[test]
fn token_counts_of_example_molecules() {
    let n = tokenize(NELARABINE).unwrap();
    assert_eq!(n.len(), 37);
    assert_eq!(NELARABINE.len(), 37);
    let m = tokenize(MIDAZOLAM).unwrap();
    assert_eq!(MIDAZOLAM.len(), 47);
    assert_eq!(m.len(), 46);
}

#[test]
fn nelarabine_graph() {
    let g = parse(&tokenize(NELARABINE).unwrap()).unwrap();
    assert_eq!(g.atom_count(), 21);
    assert_eq!(g.bond_count(), 23);
    let f = g.assign_implicit_hydrogens().0.molecular_formula();
    assert_eq!((f.count("C"), f.count("N"), f.count("O")), (11, 5, 5));
}

#[test]
fn midazolam_graph() {
    let g = parse(&tokenize(MIDAZOLAM).unwrap()).unwrap();
    assert_eq!(g.atom_count(), 23);
    // 22 tree edges + 4 ring closures
    assert_eq!(g.bond_count(), 26);
}

#[test]
fn formulas() {
    assert_eq!(formula_of(NELARABINE).unwrap().to_string(), "C11H15N5O5");
    assert_eq!(formula_of(MIDAZOLAM).unwrap().to_string(), "C18H13ClFN3");
    assert_eq!(formula_of("C").unwrap().to_string(), "CH4");
}

#[test]
fn nelarabine_hydrogens() {
    let g = parse_smiles(NELARABINE).unwrap();
    // "COC1=NC(N)=..." : the branch N is atom 5
    assert_eq!(g.atoms()[5].element, Element::N);
    assert_eq!(g.atoms()[5].implicit_h, 2);
    // final "...C1O"
    let last = g.atom_count() - 1;
    assert_eq!(g.atoms()[last].element, Element::O);
    assert_eq!(g.atoms()[last].implicit_h, 1);
    let (_, warnings) = parse(&tokenize(MIDAZOLAM).unwrap())
        .unwrap()
        .assign_implicit_hydrogens();
    assert!(warnings.is_empty());
}

#[test]
fn reference_molecules_round_trip() {
    for s in [NELARABINE, MIDAZOLAM] {
        let g = parse_smiles(s).unwrap();
        let text = encode(&g).unwrap();
        let back = parse_smiles(&text).unwrap();
        assert_eq!(back.molecular_formula(), g.molecular_formula(), "{text}");
        assert_eq!(
            (back.atom_count(), back.bond_count()),
            (g.atom_count(), g.bond_count())
        );
        assert!(isomorphic(&g, &back), "{s} -> {text}");
    }
}

#[test]
fn oracle_rejects_non_isomorphic() {
    let a = parse_smiles("CC(C)CO").unwrap();
    let b = parse_smiles("CCCCO").unwrap();
    assert!(!isomorphic(&a, &b));
    let c = parse_smiles("C=CCO").unwrap();
    let d = parse_smiles("CC=CO").unwrap();
    assert!(!isomorphic(&c, &d));
    assert!(isomorphic(&parse_smiles("OCC=C").unwrap(), &c));
}

#[test]
fn random_graphs_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..500 {
        let g = random_graph(&mut rng, 10, 3);
        let text = encode(&g).unwrap();
        let back = parse(&tokenize(&text).unwrap()).unwrap();
        assert!(isomorphic(&g, &back), "{text}");
        // re-encoding a parsed graph is a fixed point
        assert_eq!(encode(&back).unwrap(), text);
    }
}

const ALPHABET: &[&str] = &[
    "B", "C", "N", "O", "P", "S", "F", "Cl", "Br", "I", "1", "2", "3", "9", "-", "=", "#", "(", ")",
];

proptest! {
    #[test]
    fn tokenize_partitions_source(parts in prop::collection::vec(prop::sample::select(ALPHABET), 1..60)) {
        let s: String = parts.concat();
        let seq = tokenize(&s).unwrap();
        let joined: String = seq.tokens().iter().map(|t| t.text()).collect();
        prop_assert_eq!(&joined, &s);
        let two_char = seq.tokens().iter().filter(|t| t.len() == 2).count();
        prop_assert_eq!(seq.len(), s.len() - two_char);
        let mut at = 0;
        for t in seq.tokens() {
            prop_assert_eq!(t.offset, at);
            at += t.len();
        }
    }

    #[test]
    fn parse_totals(parts in prop::collection::vec(prop::sample::select(ALPHABET), 1..40)) {
        let s: String = parts.concat();
        let seq = tokenize(&s).unwrap();
        if let Ok(g) = parse(&seq) {
            let atoms = seq.tokens().iter().filter(|t| matches!(t.kind, TokenKind::Atom(_))).count();
            let digits = seq.tokens().iter().filter(|t| matches!(t.kind, TokenKind::RingDigit(_))).count();
            prop_assert_eq!(g.atom_count(), atoms);
            prop_assert_eq!(g.bond_count(), atoms - 1 + digits / 2);
            prop_assert!(g.is_connected());
            let (h, _) = g.assign_implicit_hydrogens();
            for (i, atom) in h.atoms().iter().enumerate() {
                let expected = i64::from(atom.element.default_valence()) - i64::from(h.bond_order_sum(i));
                prop_assert_eq!(i64::from(atom.implicit_h), expected.max(0));
            }
        }
    }
}
