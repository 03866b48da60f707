//! Canonical atom ranking by partition refinement with an
//! individualization search, and the canonical SMILES built on it.

use std::cmp::Ordering;

use super::write::write_ranked;
use crate::element::ValenceTable;
use crate::graph::MolecularGraph;

/// Leaves explored before the search settles for the best one so far.
/// Only highly symmetric graphs get near it.
pub const LEAF_BUDGET: usize = 4096;

type Invariant = (u8, i8, u16, u8, usize, u32);

fn invariants(graph: &MolecularGraph, table: &ValenceTable) -> Vec<Invariant> {
    (0..graph.atom_count())
        .map(|i| {
            let a = graph.atom(i);
            (
                a.element.atomic_number(),
                a.charge,
                a.isotope.unwrap_or(0),
                graph.hydrogen_count(table, i),
                graph.degree(i),
                graph.bond_order_sum(i),
            )
        })
        .collect()
}

/// Dense ranks 0..k of `keys`, equal keys sharing a rank.
fn dense_ranks<K: Ord>(keys: &[K]) -> Vec<u32> {
    let mut idx: Vec<usize> = (0..keys.len()).collect();
    idx.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
    let mut ranks = vec![0u32; keys.len()];
    let mut r = 0u32;
    for w in 0..idx.len() {
        if w > 0 && keys[idx[w - 1]] != keys[idx[w]] {
            r += 1;
        }
        ranks[idx[w]] = r;
    }
    ranks
}

fn cell_count(ranks: &[u32]) -> usize {
    ranks.iter().max().map_or(0, |&m| m as usize + 1)
}

/// Splits cells by the multiset of (neighbor cell, bond order) until stable.
/// Cells keep their relative order, so refinement commutes with relabeling.
fn refine(graph: &MolecularGraph, mut ranks: Vec<u32>) -> Vec<u32> {
    let mut cells = cell_count(&ranks);
    loop {
        let keys: Vec<(u32, Vec<(u32, u8)>)> = (0..ranks.len())
            .map(|i| {
                let mut sig: Vec<(u32, u8)> = graph
                    .neighbors(i)
                    .iter()
                    .map(|&(nb, b)| (ranks[nb], graph.bond(b).order))
                    .collect();
                sig.sort_unstable();
                (ranks[i], sig)
            })
            .collect();
        let next = dense_ranks(&keys);
        let next_cells = cell_count(&next);
        ranks = next;
        if next_cells == cells {
            return ranks;
        }
        cells = next_cells;
    }
}

fn individualize(ranks: &[u32], v: usize) -> Vec<u32> {
    // Shift everything at or above v's cell up by one and keep v in front.
    let rv = ranks[v];
    ranks
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            if r > rv || (r == rv && i != v) {
                r + 1
            } else {
                r
            }
        })
        .collect()
}

/// Members of the first cell with more than one atom, minus atoms that are
/// twins of an earlier member (same neighbors with the same bond orders).
/// Swapping twins is an automorphism, so their subtrees look identical.
fn target_cell(graph: &MolecularGraph, ranks: &[u32]) -> Option<Vec<usize>> {
    let mut counts = vec![0usize; cell_count(ranks)];
    for &r in ranks {
        counts[r as usize] += 1;
    }
    let cell = counts.iter().position(|&c| c > 1)? as u32;
    let members: Vec<usize> = (0..ranks.len()).filter(|&i| ranks[i] == cell).collect();
    let nbhd = |u: usize, other: usize| -> Vec<(usize, u8)> {
        let mut v: Vec<(usize, u8)> = graph
            .neighbors(u)
            .iter()
            .filter(|&&(nb, _)| nb != other)
            .map(|&(nb, b)| (nb, graph.bond(b).order))
            .collect();
        v.sort_unstable();
        v
    };
    let mut reps: Vec<usize> = Vec::new();
    for &m in &members {
        let twin = reps.iter().any(|&r| nbhd(r, m) == nbhd(m, r));
        if !twin {
            reps.push(m);
        }
    }
    Some(reps)
}

/// Graph under a labeling, as a sequence comparable between leaves.
fn certificate(graph: &MolecularGraph, inv: &[Invariant], ranks: &[u32]) -> Vec<u64> {
    let n = ranks.len();
    let mut by_label = vec![0usize; n];
    for (i, &r) in ranks.iter().enumerate() {
        by_label[r as usize] = i;
    }
    let mut cert: Vec<u64> = by_label
        .iter()
        .map(|&i| {
            let (z, c, iso, h, _, _) = inv[i];
            (z as u64) << 40 | ((c as i16 + 128) as u64) << 32 | (iso as u64) << 8 | h as u64
        })
        .collect();
    let mut edges: Vec<u64> = graph
        .bonds()
        .iter()
        .map(|b| {
            let (x, y) = b.endpoints();
            let (lo, hi) = (ranks[x].min(ranks[y]) as u64, ranks[x].max(ranks[y]) as u64);
            lo << 34 | hi << 4 | b.order as u64
        })
        .collect();
    edges.sort_unstable();
    cert.extend(edges);
    cert
}

/// Canonical rank of every atom: isomorphic graphs get ranks under which
/// their relabeled copies coincide.
pub fn canonical_rank(graph: &MolecularGraph, table: &ValenceTable) -> Vec<usize> {
    let n = graph.atom_count();
    if n == 0 {
        return Vec::new();
    }
    let inv = invariants(graph, table);
    let root = refine(graph, dense_ranks(&inv));

    let mut best: Option<(Vec<u64>, Vec<u32>)> = None;
    let mut leaves = 0usize;
    let mut consider = |ranks: Vec<u32>, leaves: &mut usize| {
        *leaves += 1;
        let cert = certificate(graph, &inv, &ranks);
        let better = match &best {
            None => true,
            Some((c, _)) => cert.cmp(c) == Ordering::Less,
        };
        if better {
            best = Some((cert, ranks));
        }
    };

    struct Frame {
        ranks: Vec<u32>,
        candidates: Vec<usize>,
        next: usize,
    }
    match target_cell(graph, &root) {
        None => consider(root, &mut leaves),
        Some(candidates) => {
            let mut stack = vec![Frame {
                ranks: root,
                candidates,
                next: 0,
            }];
            while let Some(top) = stack.last_mut() {
                if leaves >= LEAF_BUDGET {
                    break;
                }
                let Some(&v) = top.candidates.get(top.next) else {
                    stack.pop();
                    continue;
                };
                top.next += 1;
                let ranks = refine(graph, individualize(&top.ranks, v));
                match target_cell(graph, &ranks) {
                    None => consider(ranks, &mut leaves),
                    Some(candidates) => stack.push(Frame {
                        ranks,
                        candidates,
                        next: 0,
                    }),
                }
            }
        }
    }
    best.expect("at least one leaf")
        .1
        .into_iter()
        .map(|r| r as usize)
        .collect()
}

/// Canonical SMILES: each component written from its canonical ranking,
/// components sorted and joined with `.`.
pub fn canonical_smiles(graph: &MolecularGraph, table: &ValenceTable) -> String {
    let mut parts: Vec<String> = graph
        .components()
        .into_iter()
        .map(|comp| {
            let sub = induced(graph, &comp);
            let rank = canonical_rank(&sub, table);
            write_ranked(&sub, table, &rank)
        })
        .collect();
    parts.sort();
    parts.join(".")
}

fn induced(graph: &MolecularGraph, atoms: &[usize]) -> MolecularGraph {
    let mut map = vec![usize::MAX; graph.atom_count()];
    let mut g = MolecularGraph::new();
    for &a in atoms {
        map[a] = g.add_atom(graph.atom(a).clone());
    }
    for b in graph.bonds() {
        let (x, y) = b.endpoints();
        if map[x] != usize::MAX {
            g.add_bond(map[x], map[y], b.order)
                .expect("subgraph of a simple graph");
        }
    }
    g
}

/// Same atoms (element, charge, isotope, attached hydrogens) joined by the
/// same bonds, up to renumbering.
pub fn graphs_equivalent(a: &MolecularGraph, b: &MolecularGraph, table: &ValenceTable) -> bool {
    if a.atom_count() != b.atom_count() || a.bond_count() != b.bond_count() {
        return false;
    }
    let mut ia = invariants(a, table);
    let mut ib = invariants(b, table);
    ia.sort_unstable();
    ib.sort_unstable();
    ia == ib && canonical_smiles(a, table) == canonical_smiles(b, table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::default_table;
    use crate::smiles::parse_strict;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn canon(s: &str) -> String {
        canonical_smiles(&parse_strict(s).unwrap(), default_table())
    }

    #[test]
    fn spellings_agree() {
        let groups: &[&[&str]] = &[
            &["CCO", "OCC", "C(O)C"],
            &["c1ccccc1", "C1=CC=CC=C1", "C1C=CC=CC=1"],
            &["CC(=O)O", "OC(C)=O", "O=C(O)C"],
            &["C1CC2CCC1CC2", "C1CC2CCC1CC2", "C12CCC(CC1)CC2"],
            &["O.C", "C.O"],
            &["[NH4+].[Cl-]", "[Cl-].[NH4+]"],
            &["CC1=CC=CC=C1C", "C1=CC=C(C)C(C)=C1"],
        ];
        for g in groups {
            let first = canon(g[0]);
            for s in *g {
                assert_eq!(canon(s), first, "{s}");
            }
        }
    }

    #[test]
    fn distinct_molecules_differ() {
        assert_ne!(canon("CCO"), canon("COC"));
        assert_ne!(canon("Cc1ccccc1C"), canon("Cc1cccc(C)c1"));
        assert_ne!(canon("[CH2]C"), canon("CC"));
        assert_eq!(canon("[CH3]C"), canon("CC"));
        // Kekulé forms with the substituents on a double vs a single bond
        assert_ne!(canon("CC1=C(C)C=CC=C1"), canon("CC1C(C)=CC=CC=1"));
        assert_ne!(canon("[13CH4]"), canon("C"));
    }

    #[test]
    fn canonical_output_reparses_to_same_graph() {
        for s in [
            "CC(C)(C)C(=O)N",
            "C1CC1C1CC1",
            "OC(=O)C=C",
            "N#CC#N",
            "c1ccc2ccccc2c1",
        ] {
            let g = parse_strict(s).unwrap();
            let c = canonical_smiles(&g, default_table());
            let back = parse_strict(&c).unwrap();
            assert!(graphs_equivalent(&g, &back, default_table()), "{s} -> {c}");
            assert_eq!(canonical_smiles(&back, default_table()), c);
        }
    }

    #[test]
    fn symmetric_cages_finish() {
        // cages and big rings stress the search
        let cubane = parse_strict("C12C3C4C1C5C2C3C45").unwrap();
        let c = canonical_smiles(&cubane, default_table());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut perm: Vec<usize> = (0..8).collect();
        for _ in 0..20 {
            perm.shuffle(&mut rng);
            assert_eq!(
                canonical_smiles(&cubane.permuted(&perm), default_table()),
                c
            );
        }
        for ring in ["C1CCCCCCCCCCCCCCCCCCCCCCCCCCCCC1", "C1C2CC3CC1CC(C2)C3"] {
            let g = parse_strict(ring).unwrap();
            let c = canonical_smiles(&g, default_table());
            let mut perm: Vec<usize> = (0..g.atom_count()).collect();
            perm.shuffle(&mut rng);
            assert_eq!(canonical_smiles(&g.permuted(&perm), default_table()), c);
        }
    }

    #[test]
    fn ranks_are_a_permutation() {
        let g = parse_strict("CC(C)C.CC(C)C").unwrap();
        let mut r = canonical_rank(&g, default_table());
        r.sort_unstable();
        assert_eq!(r, (0..8).collect::<Vec<_>>());
    }
}
