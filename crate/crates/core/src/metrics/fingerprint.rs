use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::MetricsError;
use crate::element::ValenceTable;
use crate::graph::MolecularGraph;

pub const DEFAULT_RADIUS: u32 = 2;
pub const DEFAULT_WIDTH: usize = 2048;

/// Circular-environment bit set.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Fingerprint {
    words: Vec<u64>,
    width: usize,
    radius: u32,
}

impl Fingerprint {
    /// An empty fingerprint. `width` must be a power of two.
    pub fn empty(width: usize, radius: u32) -> Fingerprint {
        assert!(
            width.is_power_of_two(),
            "fingerprint width {width} is not a power of two"
        );
        Fingerprint {
            words: vec![0; width.div_ceil(64)],
            width,
            radius,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn set(&mut self, bit: usize) {
        let bit = bit % self.width;
        self.words[bit / 64] |= 1 << (bit % 64);
    }

    pub fn get(&self, bit: usize) -> bool {
        bit < self.width && self.words[bit / 64] >> (bit % 64) & 1 == 1
    }

    pub fn count_ones(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.width).filter(|&b| self.get(b))
    }
}

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn combine(h: u64, x: u64) -> u64 {
    mix(h ^ x
        .wrapping_add(0x9e37_79b9_7f4a_7c15)
        .wrapping_add(h << 6)
        .wrapping_add(h >> 2))
}

/// Morgan/ECFP-style fingerprint. Every distinct environment identifier at
/// every radius 0..=`radius` sets one bit.
///
/// The atom invariant is (element, charge, degree, bond order sum, hydrogen
/// count), hydrogens counted the same way equivalence counts them so that
/// equivalent graphs always share a fingerprint.
pub fn morgan_fingerprint(
    graph: &MolecularGraph,
    table: &ValenceTable,
    radius: u32,
    width: usize,
) -> Fingerprint {
    let mut fp = Fingerprint::empty(width, radius);
    let n = graph.atom_count();
    let mut ids: Vec<u64> = (0..n)
        .map(|i| {
            let a = graph.atom(i);
            [
                a.element.atomic_number() as u64,
                a.charge as i64 as u64,
                graph.degree(i) as u64,
                graph.bond_order_sum(i) as u64,
                graph.hydrogen_count(table, i) as u64,
            ]
            .into_iter()
            .fold(0, combine)
        })
        .collect();
    let mut seen: BTreeSet<u64> = ids.iter().copied().collect();
    for round in 1..=radius {
        ids = (0..n)
            .map(|i| {
                let mut env: Vec<(u8, u64)> = graph
                    .neighbors(i)
                    .iter()
                    .map(|&(j, b)| (graph.bond(b).order, ids[j]))
                    .collect();
                env.sort_unstable();
                env.into_iter()
                    .fold(combine(round as u64, ids[i]), |h, (o, id)| {
                        combine(combine(h, o as u64), id)
                    })
            })
            .collect();
        seen.extend(ids.iter().copied());
    }
    for id in seen {
        fp.set((id % width as u64) as usize);
    }
    fp
}

/// |a ∧ b| / |a ∨ b|, 1.0 when both are empty.
pub fn tanimoto(a: &Fingerprint, b: &Fingerprint) -> Result<f64, MetricsError> {
    if a.width != b.width || a.radius != b.radius {
        return Err(MetricsError::FingerprintMismatch {
            left: (a.width, a.radius),
            right: (b.width, b.radius),
        });
    }
    let (mut both, mut either) = (0u32, 0u32);
    for (x, y) in a.words.iter().zip(&b.words) {
        both += (x & y).count_ones();
        either += (x | y).count_ones();
    }
    Ok(if either == 0 {
        1.0
    } else {
        both as f64 / either as f64
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::default_table;
    use crate::smiles::parse_strict;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn fp(s: &str, radius: u32) -> Fingerprint {
        morgan_fingerprint(
            &parse_strict(s).unwrap(),
            default_table(),
            radius,
            DEFAULT_WIDTH,
        )
    }

    #[test]
    fn self_similarity() {
        for s in ["C", "CCO", "CC(=O)OC1=CC=CC=C1C(=O)O"] {
            let f = fp(s, 2);
            assert!(f.count_ones() > 0);
            assert_eq!(tanimoto(&f, &f).unwrap(), 1.0);
        }
    }

    #[test]
    fn carbon_and_oxygen_are_disjoint() {
        let (c, o) = (fp("C", 0), fp("O", 0));
        assert_eq!(c.count_ones(), 1);
        assert_eq!(o.count_ones(), 1);
        assert_eq!(tanimoto(&c, &o).unwrap(), 0.0);
    }

    #[test]
    fn relabeling_invariant() {
        let g = parse_strict("CC(=O)OC1=CC=CC=C1C(=O)O").unwrap();
        let base = morgan_fingerprint(&g, default_table(), 2, DEFAULT_WIDTH);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let mut perm: Vec<usize> = (0..g.atom_count()).collect();
            perm.shuffle(&mut rng);
            assert_eq!(
                morgan_fingerprint(&g.permuted(&perm), default_table(), 2, DEFAULT_WIDTH),
                base
            );
        }
    }

    #[test]
    fn mismatch_is_an_error() {
        let a = fp("CC", 2);
        let b = morgan_fingerprint(
            &parse_strict("CC").unwrap(),
            default_table(),
            1,
            DEFAULT_WIDTH,
        );
        assert!(tanimoto(&a, &b).is_err());
        let e = Fingerprint::empty(64, 2);
        assert_eq!(tanimoto(&e, &e.clone()).unwrap(), 1.0);
    }

    #[test]
    #[should_panic]
    fn width_must_be_power_of_two() {
        Fingerprint::empty(1000, 2);
    }
}
