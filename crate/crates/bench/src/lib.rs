//! Inputs shared by the benchmarks.

use fraglead_core::Corpus;

pub const NELARABINE: &str = "COC1=NC(N)=NC2=C1N=CN2C1OC(CO)C(O)C1O";
pub const MIDAZOLAM: &str = "CC1=NC=C2N1C3=C(C=C(C=C3)Cl)C(=NC2)C4=CC=CC=C4F";

const ALPHABET: &[&str] = &["C", "C", "C", "N", "O", "=", "(", ")", "1", "2", "Cl", "F"];

/// `n` pseudo-SMILES documents of 20 to 100 symbols from a fixed LCG.
pub fn synthetic_corpus(n: usize, seed: u64) -> Corpus {
    let mut state = seed
        .wrapping_mul(6364136223846793005)
        .wrapping_add(1442695040888963407);
    let mut next = move || {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (state >> 33) as usize
    };
    Corpus::from_bodies((0..n).map(|_| {
        let len = 20 + next() % 81;
        (0..len)
            .map(|_| ALPHABET[next() % ALPHABET.len()])
            .collect::<String>()
    }))
}
