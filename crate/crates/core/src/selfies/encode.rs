//! Graph to SELFIES. No validity check happens here; decoding the result is
//! what repairs an over-bonded graph.

use super::symbol::{index_symbols, symbols_to_string, SelfiesSymbol};
use crate::element::ValenceTable;
use crate::graph::{implicit_hydrogens, MolecularGraph};

/// Largest value three index digits can hold.
const MAX_INDEX: usize = 16 * 16 * 16 - 1;

fn digits_for(value: usize) -> u8 {
    match value {
        0..=15 => 1,
        16..=255 => 2,
        _ => 3,
    }
}

/// Encodes each component depth-first from its lowest-numbered atom,
/// visiting neighbors in index order. Components are joined by `.`.
///
/// Ring bonds whose partner lies more than 4096 atoms back, and branches
/// longer than 4096 symbols, can't be spelled with three index digits; the
/// former are dropped and the latter truncated.
pub fn encode(graph: &MolecularGraph, table: &ValenceTable) -> Vec<SelfiesSymbol> {
    let n = graph.atom_count();
    let nbrs: Vec<Vec<(usize, usize)>> = (0..n)
        .map(|a| {
            let mut v = graph.neighbors(a).to_vec();
            v.sort_unstable();
            v
        })
        .collect();

    let mut out = Vec::new();
    let mut pos = vec![usize::MAX; n];
    let mut next_pos = 0;
    for start in 0..n {
        if pos[start] != usize::MAX {
            continue;
        }
        if !out.is_empty() {
            out.push(SelfiesSymbol::SEPARATOR);
        }
        encode_component(
            graph,
            table,
            &nbrs,
            start,
            &mut pos,
            &mut next_pos,
            &mut out,
        );
    }
    out
}

pub fn encode_to_string(graph: &MolecularGraph, table: &ValenceTable) -> String {
    symbols_to_string(&encode(graph, table))
}

fn atom_symbol(
    graph: &MolecularGraph,
    table: &ValenceTable,
    atom: usize,
    order: u8,
) -> SelfiesSymbol {
    let a = graph.atom(atom);
    let h = graph.hydrogen_count(table, atom);
    let plain = a.charge == 0
        && a.isotope.is_none()
        && h == implicit_hydrogens(table, a.element, 0, graph.bond_order_sum(atom));
    if plain {
        SelfiesSymbol::plain(order, a.element)
    } else {
        SelfiesSymbol::atom(order, a.element, a.charge, Some(h), a.isotope)
    }
}

fn encode_component(
    graph: &MolecularGraph,
    table: &ValenceTable,
    nbrs: &[Vec<(usize, usize)>],
    start: usize,
    pos: &mut [usize],
    next_pos: &mut usize,
    out: &mut Vec<SelfiesSymbol>,
) {
    // DFS preorder is also the order the decoder will place atoms in.
    let mut preorder = Vec::new();
    let mut parent: std::collections::HashMap<usize, (usize, usize)> = Default::default();
    let mut children: std::collections::HashMap<usize, Vec<usize>> = Default::default();
    let mut stack = vec![(start, 0usize)];
    pos[start] = *next_pos;
    *next_pos += 1;
    preorder.push(start);
    while let Some(top) = stack.last_mut() {
        let (u, slot) = *top;
        match nbrs[u].get(slot) {
            Some(&(v, b)) => {
                top.1 += 1;
                if pos[v] == usize::MAX {
                    pos[v] = *next_pos;
                    *next_pos += 1;
                    preorder.push(v);
                    parent.insert(v, (u, b));
                    children.entry(u).or_default().push(v);
                    stack.push((v, 0));
                }
            }
            None => {
                stack.pop();
            }
        }
    }

    // Ring bonds are written at the later atom, pointing back.
    let rings: std::collections::HashMap<usize, Vec<(usize, u8)>> = preorder
        .iter()
        .map(|&u| {
            let tree = parent.get(&u).map(|&(_, b)| b);
            let mut back: Vec<(usize, u8)> = nbrs[u]
                .iter()
                .filter(|&&(w, b)| Some(b) != tree && pos[w] < pos[u])
                .filter(|&&(w, _)| pos[u] - pos[w] - 1 <= MAX_INDEX)
                .map(|&(w, b)| (pos[u] - pos[w] - 1, graph.bond(b).order))
                .collect();
            back.sort_unstable_by_key(|&(q, _)| std::cmp::Reverse(q));
            (u, back)
        })
        .collect();

    // Symbol count of each subtree, children before parents.
    let mut len: std::collections::HashMap<usize, usize> = Default::default();
    let branch_len = |l: usize| 1 + digits_for((l - 1).min(MAX_INDEX)) as usize + l;
    for &u in preorder.iter().rev() {
        let mut l = 1 + rings[&u]
            .iter()
            .map(|&(q, _)| 1 + digits_for(q) as usize)
            .sum::<usize>();
        if let Some(kids) = children.get(&u) {
            let (last, rest) = kids.split_last().unwrap();
            l += rest.iter().map(|c| branch_len(len[c])).sum::<usize>() + len[last];
        }
        len.insert(u, l);
    }

    enum Step {
        Header(usize),
        Atom(usize),
    }
    let order_to = |u: usize| parent.get(&u).map_or(1, |&(_, b)| graph.bond(b).order);
    let mut steps = vec![Step::Atom(start)];
    while let Some(step) = steps.pop() {
        match step {
            Step::Header(c) => {
                let value = (len[&c] - 1).min(MAX_INDEX);
                let d = digits_for(value);
                out.push(SelfiesSymbol::branch(d, order_to(c)));
                out.extend(index_symbols(value, d));
            }
            Step::Atom(u) => {
                out.push(atom_symbol(graph, table, u, order_to(u)));
                for &(q, order) in &rings[&u] {
                    let d = digits_for(q);
                    out.push(SelfiesSymbol::ring(d, order));
                    out.extend(index_symbols(q, d));
                }
                if let Some(kids) = children.get(&u) {
                    let (last, rest) = kids.split_last().unwrap();
                    steps.push(Step::Atom(*last));
                    for &c in rest.iter().rev() {
                        steps.push(Step::Atom(c));
                        steps.push(Step::Header(c));
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::default_table;
    use crate::selfies::decode::decode;
    use crate::smiles::{graphs_equivalent, parse_lenient, parse_strict};

    fn enc(s: &str) -> String {
        encode_to_string(&parse_lenient(s).graph, default_table())
    }

    fn round_trip(s: &str) {
        let g = parse_strict(s).unwrap();
        let syms = encode(&g, default_table());
        let back = decode(&syms, default_table()).graph;
        assert!(
            graphs_equivalent(&g, &back, default_table()),
            "{s} -> {}",
            symbols_to_string(&syms)
        );
    }

    #[test]
    fn small_encodings() {
        assert_eq!(enc("C"), "[C]");
        assert_eq!(enc("CCO"), "[C][C][O]");
        assert_eq!(enc("CC(=O)O"), "[C][C][=Branch1][ε][=O][O]");
        assert_eq!(enc("C.O"), "[C].[O]");
        assert_eq!(enc(""), "");
    }

    #[test]
    fn benzene_has_one_ring_block() {
        let s = enc("c1ccccc1");
        assert_eq!(s.matches("Ring").count(), 1);
        assert_eq!(s, "[C][=C][C][=C][C][=C][Ring1][O]");
        round_trip("c1ccccc1");
    }

    #[test]
    fn aspirin_typo_walkthrough() {
        assert_eq!(
            enc("CC(=O)OC1=CC=CC=C1=C(=O)O)"),
            "[C][C][=Branch1][ε][=O][O][C][=C][C][=C][C][=C][Ring1][O][=C][=Branch1][ε][=O][O]"
        );
    }

    #[test]
    fn decorated_atoms() {
        assert_eq!(enc("C[NH3+]"), "[C][NH3+1]");
        assert_eq!(enc("[C]"), "[CH0]");
        assert_eq!(enc("[13CH4]"), "[13CH4]");
        round_trip("C[NH3+]");
        round_trip("[O-]C(=O)C");
        round_trip("[CH2]C");
    }

    #[test]
    fn round_trips() {
        for s in [
            "CCO",
            "OCC(N)C(=O)O",
            "C1CC2CCC1CC2",
            "C12C3C4C1C5C2C3C45",
            "CC(C)(C)C(C)(C)C",
            "N#CC#N",
            "C=C=C",
            "O=S(=O)(O)O",
            "c1ccc2ccccc2c1",
            "[Na+].[Cl-]",
            "FC(F)(F)Cl",
            "C1CC1.C1CC1",
        ] {
            round_trip(s);
        }
    }

    #[test]
    fn long_branches_use_more_digits() {
        let s = format!("C({})O", "C".repeat(40));
        let e = enc(&s);
        assert!(e.starts_with("[C][Branch2]"), "{e}");
        round_trip(&s);
        let ring = format!("C1{}C1", "C".repeat(30));
        assert!(enc(&ring).contains("[Ring2]"));
        round_trip(&ring);
    }

    #[test]
    fn deep_chain() {
        let s = "C".repeat(100_000);
        let g = parse_strict(&s).unwrap();
        assert_eq!(encode(&g, default_table()).len(), 100_000);
    }
}
