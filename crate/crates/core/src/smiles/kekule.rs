//! Kekulization: turn lowercase aromatic rings into alternating single and
//! double bonds by finding a perfect matching over the atoms that still need
//! a double bond.

use crate::diagnostic::{Diagnostic, ErrorClass, Recovery};
use crate::element::ValenceTable;
use crate::graph::MolecularGraph;

const NONE: usize = usize::MAX;

#[derive(Debug, Clone)]
pub struct Kekulized {
    pub graph: MolecularGraph,
    /// Positions are atom indices.
    pub diagnostics: Vec<Diagnostic>,
}

/// Kekulizes `graph`. Never fails: atoms that cannot take part in a
/// Kekulé structure are demoted to aliphatic and reported.
pub fn kekulize(graph: &MolecularGraph, table: &ValenceTable) -> Kekulized {
    kekulize_with_positions(graph, table, |atom| atom)
}

pub(crate) fn kekulize_with_positions(
    graph: &MolecularGraph,
    table: &ValenceTable,
    position: impl Fn(usize) -> usize,
) -> Kekulized {
    let mut diagnostics = Vec::new();
    let has_aromatic =
        graph.atoms().iter().any(|a| a.aromatic) || graph.bonds().iter().any(|b| b.aromatic);
    if !has_aromatic {
        return Kekulized {
            graph: graph.clone(),
            diagnostics,
        };
    }

    let mut g = graph.clone();
    let bridge = bridges(graph);
    for (i, b) in graph.bonds().iter().enumerate() {
        if b.aromatic && bridge[i] {
            g.set_bond(i, 1, false);
        }
    }

    let n = g.atom_count();
    for atom in 0..n {
        if !g.atom(atom).aromatic {
            continue;
        }
        let in_ring = g.neighbors(atom).iter().any(|&(_, b)| !bridge[b]);
        let has_aromatic_bond = g.neighbors(atom).iter().any(|&(_, b)| g.bond(b).aromatic);
        if !in_ring {
            diagnostics.push(Diagnostic::new(
                ErrorClass::AromaticityError,
                position(atom),
                format!("non-ring atom {atom} marked aromatic"),
                Recovery::DemotedAromatic,
            ));
            g.atom_mut(atom).aromatic = false;
        } else if !has_aromatic_bond {
            g.atom_mut(atom).aromatic = false;
        }
    }

    // Atoms whose valence still has room for one more bond need a double bond.
    let needs: Vec<bool> = (0..n)
        .map(|atom| g.atom(atom).aromatic && matches!(g.free_valence(table, atom), Ok(f) if f >= 1))
        .collect();
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|atom| {
            if !needs[atom] {
                return Vec::new();
            }
            g.neighbors(atom)
                .iter()
                .filter(|&&(nb, b)| needs[nb] && g.bond(b).aromatic)
                .map(|&(nb, _)| nb)
                .collect()
        })
        .collect();
    let mate = maximum_matching(&adj);

    for i in 0..g.bond_count() {
        if g.bond(i).aromatic {
            let (a, b) = g.bond(i).endpoints();
            let order = if mate[a] == b { 2 } else { 1 };
            g.set_bond(i, order, false);
        }
    }
    let unmatched: Vec<usize> = (0..n).filter(|&a| needs[a] && mate[a] == NONE).collect();
    if let Some(&first) = unmatched.first() {
        let list: Vec<String> = unmatched.iter().map(|a| a.to_string()).collect();
        diagnostics.push(Diagnostic::new(
            ErrorClass::AromaticityError,
            position(first),
            format!(
                "can't kekulize: unmatched aromatic atoms {}",
                list.join(" ")
            ),
            Recovery::DemotedAromatic,
        ));
    }
    for atom in 0..n {
        g.atom_mut(atom).aromatic = false;
    }
    Kekulized {
        graph: g,
        diagnostics,
    }
}

/// Marks bonds whose removal disconnects their endpoints.
pub(crate) fn bridges(graph: &MolecularGraph) -> Vec<bool> {
    let n = graph.atom_count();
    let mut is_bridge = vec![false; graph.bond_count()];
    let mut disc = vec![NONE; n];
    let mut low = vec![0usize; n];
    let mut timer = 0;
    for root in 0..n {
        if disc[root] != NONE {
            continue;
        }
        // (atom, bond used to enter it, next neighbor slot)
        let mut stack: Vec<(usize, usize, usize)> = vec![(root, NONE, 0)];
        disc[root] = timer;
        low[root] = timer;
        timer += 1;
        while let Some(top) = stack.last_mut() {
            let (u, via, slot) = *top;
            if let Some(&(v, b)) = graph.neighbors(u).get(slot) {
                top.2 += 1;
                if b == via {
                    continue;
                }
                if disc[v] == NONE {
                    disc[v] = timer;
                    low[v] = timer;
                    timer += 1;
                    stack.push((v, b, 0));
                } else {
                    low[u] = low[u].min(disc[v]);
                }
            } else {
                stack.pop();
                if let Some(&(parent, _, _)) = stack.last() {
                    low[parent] = low[parent].min(low[u]);
                    if low[u] > disc[parent] {
                        is_bridge[via] = true;
                    }
                }
            }
        }
    }
    is_bridge
}

/// Edmonds' blossom algorithm. Returns each vertex's mate, or `usize::MAX`.
pub(crate) fn maximum_matching(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let mut mate = vec![NONE; n];
    // Greedy start.
    for v in 0..n {
        if mate[v] == NONE {
            if let Some(&u) = adj[v].iter().find(|&&u| mate[u] == NONE) {
                mate[v] = u;
                mate[u] = v;
            }
        }
    }
    let mut search = BlossomSearch::new(n);
    for root in 0..n {
        if mate[root] != NONE || adj[root].is_empty() {
            continue;
        }
        let mut v = search.find_augmenting_path(adj, &mate, root);
        while v != NONE {
            let pv = search.parent[v];
            let ppv = mate[pv];
            mate[v] = pv;
            mate[pv] = v;
            v = ppv;
        }
    }
    mate
}

struct BlossomSearch {
    parent: Vec<usize>,
    base: Vec<usize>,
    used: Vec<bool>,
    blossom: Vec<bool>,
    queue: std::collections::VecDeque<usize>,
}

impl BlossomSearch {
    fn new(n: usize) -> Self {
        BlossomSearch {
            parent: vec![NONE; n],
            base: (0..n).collect(),
            used: vec![false; n],
            blossom: vec![false; n],
            queue: Default::default(),
        }
    }

    fn lca(&self, mate: &[usize], mut a: usize, mut b: usize) -> usize {
        let mut seen = vec![false; mate.len()];
        loop {
            a = self.base[a];
            seen[a] = true;
            if mate[a] == NONE {
                break;
            }
            a = self.parent[mate[a]];
        }
        loop {
            b = self.base[b];
            if seen[b] {
                return b;
            }
            b = self.parent[mate[b]];
        }
    }

    fn mark_path(&mut self, mate: &[usize], mut v: usize, b: usize, mut child: usize) {
        while self.base[v] != b {
            self.blossom[self.base[v]] = true;
            self.blossom[self.base[mate[v]]] = true;
            self.parent[v] = child;
            child = mate[v];
            v = self.parent[mate[v]];
        }
    }

    fn find_augmenting_path(&mut self, adj: &[Vec<usize>], mate: &[usize], root: usize) -> usize {
        let n = adj.len();
        self.used.iter_mut().for_each(|u| *u = false);
        self.parent.iter_mut().for_each(|p| *p = NONE);
        for (i, b) in self.base.iter_mut().enumerate() {
            *b = i;
        }
        self.queue.clear();
        self.used[root] = true;
        self.queue.push_back(root);
        while let Some(v) = self.queue.pop_front() {
            for &to in &adj[v] {
                if self.base[v] == self.base[to] || mate[v] == to {
                    continue;
                }
                if to == root || (mate[to] != NONE && self.parent[mate[to]] != NONE) {
                    let cur = self.lca(mate, v, to);
                    self.blossom.iter_mut().for_each(|b| *b = false);
                    self.mark_path(mate, v, cur, to);
                    self.mark_path(mate, to, cur, v);
                    for i in 0..n {
                        if self.blossom[self.base[i]] {
                            self.base[i] = cur;
                            if !self.used[i] {
                                self.used[i] = true;
                                self.queue.push_back(i);
                            }
                        }
                    }
                } else if self.parent[to] == NONE {
                    self.parent[to] = v;
                    if mate[to] == NONE {
                        return to;
                    }
                    let next = mate[to];
                    self.used[next] = true;
                    self.queue.push_back(next);
                }
            }
        }
        NONE
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::{default_table, Element};
    use crate::graph::Atom;

    fn aromatic_ring(n: usize) -> MolecularGraph {
        let mut g = MolecularGraph::new();
        for _ in 0..n {
            g.add_atom(Atom::new(Element::C).aromatic());
        }
        for i in 0..n {
            g.add_aromatic_bond(i, (i + 1) % n).unwrap();
        }
        g
    }

    fn brute_force_matching_size(adj: &[Vec<usize>]) -> usize {
        let edges: Vec<(usize, usize)> = adj
            .iter()
            .enumerate()
            .flat_map(|(u, ns)| ns.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
            .collect();
        fn go(edges: &[(usize, usize)], used: &mut Vec<bool>) -> usize {
            let Some((&(u, v), rest)) = edges.split_first() else {
                return 0;
            };
            let skip = go(rest, used);
            if used[u] || used[v] {
                return skip;
            }
            used[u] = true;
            used[v] = true;
            let take = 1 + go(rest, used);
            used[u] = false;
            used[v] = false;
            skip.max(take)
        }
        go(&edges, &mut vec![false; adj.len()])
    }

    #[test]
    fn benzene_alternates() {
        let k = kekulize(&aromatic_ring(6), default_table());
        assert!(k.diagnostics.is_empty());
        let orders: Vec<u8> = k.graph.bonds().iter().map(|b| b.order).collect();
        assert_eq!(orders.iter().filter(|&&o| o == 2).count(), 3);
        for w in 0..6 {
            assert_ne!(orders[w], orders[(w + 1) % 6]);
        }
        assert!(k.graph.atoms().iter().all(|a| !a.aromatic));
        assert!(k.graph.is_semantically_valid(default_table()));
    }

    #[test]
    fn odd_ring_cannot_kekulize() {
        let k = kekulize(&aromatic_ring(5), default_table());
        assert_eq!(k.diagnostics.len(), 1);
        assert_eq!(k.diagnostics[0].class, ErrorClass::AromaticityError);
        assert!(k.graph.is_semantically_valid(default_table()));
    }

    #[test]
    fn four_ring_has_a_kekule_structure() {
        let k = kekulize(&aromatic_ring(4), default_table());
        assert!(k.diagnostics.is_empty());
        assert_eq!(k.graph.bonds().iter().filter(|b| b.order == 2).count(), 2);
    }

    #[test]
    fn lone_aromatic_atom() {
        let mut g = MolecularGraph::new();
        g.add_atom(Atom::new(Element::C).aromatic());
        let k = kekulize(&g, default_table());
        assert_eq!(k.diagnostics.len(), 1);
        assert!(k.diagnostics[0].message.contains("non-ring"));
        assert!(!k.graph.atom(0).aromatic);
    }

    #[test]
    fn bridges_found() {
        // two triangles joined by one bond
        let mut g = MolecularGraph::new();
        for _ in 0..6 {
            g.add_atom(Atom::new(Element::C));
        }
        for (a, b) in [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (2, 3)] {
            g.add_bond(a, b, 1).unwrap();
        }
        let br = bridges(&g);
        assert_eq!(br, vec![false, false, false, false, false, false, true]);
    }

    #[test]
    fn blossom_matches_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..400 {
            let n = rng.gen_range(1..10);
            let mut adj = vec![Vec::new(); n];
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(0.3) {
                        adj[u].push(v);
                        adj[v].push(u);
                    }
                }
            }
            let mate = maximum_matching(&adj);
            let size = (0..n).filter(|&v| mate[v] != NONE).count() / 2;
            for v in 0..n {
                if mate[v] != NONE {
                    assert_eq!(mate[mate[v]], v);
                    assert!(adj[v].contains(&mate[v]));
                }
            }
            assert_eq!(size, brute_force_matching_size(&adj), "{adj:?}");
        }
    }
}
