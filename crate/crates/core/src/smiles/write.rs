//! SMILES writer. Output is always Kekulé form; aromatic flags on the graph
//! are ignored.

use crate::element::ValenceTable;
use crate::graph::{implicit_hydrogens, MolecularGraph};

/// Writes `graph` walking atoms in index order.
pub fn write_smiles(graph: &MolecularGraph, table: &ValenceTable) -> String {
    let order: Vec<usize> = (0..graph.atom_count()).collect();
    write_ranked(graph, table, &order)
}

/// Writes `graph` with `rank[atom]` deciding the start atom of each
/// component and the order neighbors are visited in. Components come out in
/// order of their lowest-ranked atom.
pub fn write_ranked(graph: &MolecularGraph, table: &ValenceTable, rank: &[usize]) -> String {
    let n = graph.atom_count();
    assert_eq!(rank.len(), n);
    let mut by_rank: Vec<usize> = (0..n).collect();
    by_rank.sort_by_key(|&a| rank[a]);

    let sorted_nbrs: Vec<Vec<(usize, usize)>> = (0..n)
        .map(|a| {
            let mut v = graph.neighbors(a).to_vec();
            v.sort_by_key(|&(nb, _)| rank[nb]);
            v
        })
        .collect();

    let mut out = String::new();
    let mut visited = vec![false; n];
    for &start in &by_rank {
        if visited[start] {
            continue;
        }
        if !out.is_empty() {
            out.push('.');
        }
        write_component(graph, table, start, &sorted_nbrs, &mut visited, &mut out);
    }
    out
}

const NONE: usize = usize::MAX;

fn write_component(
    graph: &MolecularGraph,
    table: &ValenceTable,
    start: usize,
    nbrs: &[Vec<(usize, usize)>],
    visited: &mut [bool],
    out: &mut String,
) {
    // Forward pass: spanning tree in DFS preorder, back edges become rings.
    let mut preorder = Vec::new();
    let mut parent_bond: Vec<(usize, usize)> = Vec::new();
    let mut children: std::collections::HashMap<usize, Vec<usize>> = Default::default();
    let mut tree_bond = vec![false; graph.bond_count()];
    let mut stack = vec![(start, 0usize)];
    visited[start] = true;
    preorder.push(start);
    parent_bond.push((start, NONE));
    while let Some(top) = stack.last_mut() {
        let (u, slot) = *top;
        match nbrs[u].get(slot) {
            Some(&(v, b)) => {
                top.1 += 1;
                if !visited[v] {
                    visited[v] = true;
                    tree_bond[b] = true;
                    preorder.push(v);
                    parent_bond.push((v, b));
                    children.entry(u).or_default().push(v);
                    stack.push((v, 0));
                }
            }
            None => {
                stack.pop();
            }
        }
    }
    let mut pre_index = std::collections::HashMap::with_capacity(preorder.len());
    for (i, &a) in preorder.iter().enumerate() {
        pre_index.insert(a, i);
    }
    let in_bond: std::collections::HashMap<usize, usize> = parent_bond.iter().copied().collect();

    // Ring labels: at each atom release the rings it closes, then take the
    // lowest free labels for the rings it opens.
    let mut opens: Vec<Vec<(usize, usize)>> = vec![Vec::new(); preorder.len()];
    let mut closes: Vec<Vec<(usize, usize)>> = vec![Vec::new(); preorder.len()];
    for &a in &preorder {
        for &(nb, b) in &nbrs[a] {
            if tree_bond[b] {
                continue;
            }
            let (ia, ib) = (pre_index[&a], pre_index[&nb]);
            if ia < ib {
                opens[ia].push((ib, b));
            } else {
                closes[ia].push((ib, b));
            }
        }
    }
    let mut label_of_bond = std::collections::HashMap::new();
    let mut in_use: Vec<bool> = Vec::new();
    let mut ring_text: Vec<String> = vec![String::new(); preorder.len()];
    for i in 0..preorder.len() {
        closes[i].sort_unstable();
        for &(_, b) in &closes[i] {
            let label: usize = label_of_bond[&b];
            in_use[label] = false;
            push_label(&mut ring_text[i], label);
        }
        opens[i].sort_unstable();
        for &(_, b) in &opens[i] {
            let label = match in_use.iter().skip(1).position(|u| !u) {
                Some(p) => p + 1,
                None => in_use.len().max(1),
            };
            if label >= in_use.len() {
                in_use.resize(label + 1, false);
            }
            in_use[label] = true;
            label_of_bond.insert(b, label);
            ring_text[i].push_str(bond_text(graph.bond(b).order));
            push_label(&mut ring_text[i], label);
        }
    }

    // Emission pass with an explicit stack so deep chains can't overflow.
    enum Step {
        Text(&'static str),
        Atom(usize),
    }
    let mut steps = vec![Step::Atom(start)];
    while let Some(step) = steps.pop() {
        match step {
            Step::Text(t) => out.push_str(t),
            Step::Atom(a) => {
                let b = in_bond[&a];
                if b != NONE {
                    out.push_str(bond_text(graph.bond(b).order));
                }
                push_atom(graph, table, a, out);
                out.push_str(&ring_text[pre_index[&a]]);
                if let Some(kids) = children.get(&a) {
                    let (last, rest) = kids.split_last().unwrap();
                    steps.push(Step::Atom(*last));
                    for &k in rest.iter().rev() {
                        steps.push(Step::Text(")"));
                        steps.push(Step::Atom(k));
                        steps.push(Step::Text("("));
                    }
                }
            }
        }
    }
}

fn push_label(out: &mut String, label: usize) {
    if label < 10 {
        out.push(char::from(b'0' + label as u8));
    } else {
        out.push('%');
        out.push_str(&label.to_string());
    }
}

fn bond_text(order: u8) -> &'static str {
    match order {
        2 => "=",
        3 => "#",
        _ => "",
    }
}

/// Appends the atom, bare when a reader would infer the same hydrogens.
pub(crate) fn push_atom(
    graph: &MolecularGraph,
    table: &ValenceTable,
    atom: usize,
    out: &mut String,
) {
    let a = graph.atom(atom);
    let h = graph.hydrogen_count(table, atom);
    let bare = a.element.is_organic_subset()
        && a.charge == 0
        && a.isotope.is_none()
        && h == implicit_hydrogens(table, a.element, 0, graph.bond_order_sum(atom));
    if bare {
        out.push_str(a.element.symbol());
        return;
    }
    out.push('[');
    if let Some(iso) = a.isotope {
        out.push_str(&iso.to_string());
    }
    out.push_str(a.element.symbol());
    match h {
        0 => {}
        1 => out.push('H'),
        n => {
            out.push('H');
            out.push_str(&n.to_string());
        }
    }
    match a.charge {
        0 => {}
        1 => out.push('+'),
        -1 => out.push('-'),
        c if c > 0 => out.push_str(&format!("+{c}")),
        c => out.push_str(&format!("-{}", -c)),
    }
    out.push(']');
}
