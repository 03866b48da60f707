//! Seeded corpora shared by the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use smiself::selfies::{alphabet, decode, SelfiesSymbol};
use smiself::{canonical_smiles, default_table, mutate_smiles, MolecularGraph};

/// Random SELFIES strings of 1..=`max_len` alphabet symbols.
pub fn selfies_strings(n: usize, max_len: usize, seed: u64) -> Vec<Vec<SelfiesSymbol>> {
    let alpha = alphabet(default_table());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let len = rng.gen_range(1..=max_len);
            (0..len)
                .map(|_| alpha[rng.gen_range(0..alpha.len())])
                .collect()
        })
        .collect()
}

/// Valid molecules with at least two atoms.
pub fn molecules(n: usize, seed: u64) -> Vec<MolecularGraph> {
    let t = default_table();
    let mut out = Vec::with_capacity(n);
    let mut round = seed;
    while out.len() < n {
        out.extend(
            selfies_strings(n, 40, round)
                .iter()
                .map(|s| decode(s, t).graph)
                .filter(|g| g.atom_count() >= 2),
        );
        round += 1;
    }
    out.truncate(n);
    out
}

pub fn valid_smiles(n: usize, seed: u64) -> Vec<String> {
    molecules(n, seed)
        .iter()
        .map(|g| canonical_smiles(g, default_table()))
        .collect()
}

/// One seeded mutation of each valid string.
pub fn broken_smiles(n: usize, seed: u64) -> Vec<String> {
    valid_smiles(n, seed)
        .iter()
        .enumerate()
        .map(|(i, s)| mutate_smiles(s, seed.wrapping_add(i as u64)))
        .collect()
}
