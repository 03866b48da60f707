//! Substructure membership: backtracking subgraph monomorphism plus the
//! named pattern sets that define monomer classes.

use std::collections::BTreeMap;

use crate::element::ValenceTable;
use crate::graph::MolecularGraph;
use crate::smiles::SmilesReader;

use super::MetricsError;

const SHIPPED: &str = include_str!("../../data/patterns.tsv");

/// True iff `pattern` maps injectively into `graph` preserving elements and
/// bond orders. A pattern atom with bracket hydrogens needs at least that
/// many on its image; other pattern atoms match any hydrogen count.
pub fn membership(graph: &MolecularGraph, pattern: &MolecularGraph, table: &ValenceTable) -> bool {
    let p = pattern.atom_count();
    if p == 0 {
        return true;
    }
    if p > graph.atom_count() || pattern.bond_count() > graph.bond_count() {
        return false;
    }
    let order = search_order(pattern);
    let mut map = vec![usize::MAX; p];
    let mut used = vec![false; graph.atom_count()];
    extend(graph, pattern, table, &order, 0, &mut map, &mut used)
}

/// Pattern atoms in BFS order so every atom after a component's first has
/// an already-placed neighbor to anchor its candidates.
fn search_order(pattern: &MolecularGraph) -> Vec<(usize, Option<usize>)> {
    let mut order = Vec::with_capacity(pattern.atom_count());
    let mut seen = vec![false; pattern.atom_count()];
    for comp in pattern.components() {
        let root = comp[0];
        seen[root] = true;
        order.push((root, None));
        let mut head = order.len() - 1;
        while head < order.len() {
            let u = order[head].0;
            head += 1;
            for &(v, _) in pattern.neighbors(u) {
                if !seen[v] {
                    seen[v] = true;
                    order.push((v, Some(u)));
                }
            }
        }
    }
    order
}

fn compatible(
    graph: &MolecularGraph,
    pattern: &MolecularGraph,
    table: &ValenceTable,
    pa: usize,
    ga: usize,
) -> bool {
    let (x, y) = (pattern.atom(pa), graph.atom(ga));
    x.element == y.element
        && (x.charge == 0 || x.charge == y.charge)
        && x.hydrogens
            .is_none_or(|h| graph.hydrogen_count(table, ga) >= h)
        && graph.degree(ga) >= pattern.degree(pa)
}

fn extend(
    graph: &MolecularGraph,
    pattern: &MolecularGraph,
    table: &ValenceTable,
    order: &[(usize, Option<usize>)],
    depth: usize,
    map: &mut [usize],
    used: &mut [bool],
) -> bool {
    let Some(&(pa, anchor)) = order.get(depth) else {
        return true;
    };
    let candidates: Vec<usize> = match anchor {
        Some(q) => graph.neighbors(map[q]).iter().map(|&(v, _)| v).collect(),
        None => (0..graph.atom_count()).collect(),
    };
    for ga in candidates {
        if used[ga] || !compatible(graph, pattern, table, pa, ga) {
            continue;
        }
        let edges_ok = pattern.neighbors(pa).iter().all(|&(pb, bond)| {
            map[pb] == usize::MAX
                || graph
                    .bond_between(ga, map[pb])
                    .is_some_and(|gb| graph.bond(gb).order == pattern.bond(bond).order)
        });
        if !edges_ok {
            continue;
        }
        map[pa] = ga;
        used[ga] = true;
        if extend(graph, pattern, table, order, depth + 1, map, used) {
            return true;
        }
        map[pa] = usize::MAX;
        used[ga] = false;
    }
    false
}

#[derive(Debug, Clone)]
pub struct Pattern {
    pub class: String,
    pub smiles: String,
    pub graph: MolecularGraph,
}

/// Named patterns grouped by class.
#[derive(Debug, Clone, Default)]
pub struct PatternSet {
    patterns: Vec<Pattern>,
}

impl PatternSet {
    /// The acrylate, isocyanate and chain extender patterns.
    pub fn shipped(table: &ValenceTable) -> PatternSet {
        PatternSet::parse(SHIPPED, table).expect("shipped patterns parse")
    }

    /// Reads `name<TAB>smiles` lines. Blank lines and `#` comments are skipped.
    pub fn parse(text: &str, table: &ValenceTable) -> Result<PatternSet, MetricsError> {
        let reader = SmilesReader::new(table);
        let mut patterns = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |reason: String| MetricsError::Pattern {
                line: i + 1,
                reason,
            };
            let (class, smiles) = line
                .split_once('\t')
                .ok_or_else(|| bad("expected name<TAB>smiles".into()))?;
            let (class, smiles) = (class.trim(), smiles.trim());
            if class.is_empty() {
                return Err(bad("empty class name".into()));
            }
            let graph = reader
                .parse_strict(smiles)
                .map_err(|e| bad(e.to_string()))?;
            patterns.push(Pattern {
                class: class.to_string(),
                smiles: smiles.to_string(),
                graph,
            });
        }
        Ok(PatternSet { patterns })
    }

    pub fn patterns(&self) -> &[Pattern] {
        &self.patterns
    }

    pub fn classes(&self) -> Vec<&str> {
        let mut c: Vec<&str> = self.patterns.iter().map(|p| p.class.as_str()).collect();
        c.sort_unstable();
        c.dedup();
        c
    }

    pub fn has_class(&self, class: &str) -> bool {
        self.patterns.iter().any(|p| p.class == class)
    }

    /// Whether any pattern of `class` occurs in `graph`.
    pub fn matches(&self, class: &str, graph: &MolecularGraph, table: &ValenceTable) -> bool {
        self.patterns
            .iter()
            .filter(|p| p.class == class)
            .any(|p| membership(graph, &p.graph, table))
    }

    /// Every class with a pattern in `graph`, keyed by class.
    pub fn classify(&self, graph: &MolecularGraph, table: &ValenceTable) -> BTreeMap<String, bool> {
        self.classes()
            .into_iter()
            .map(|c| (c.to_string(), self.matches(c, graph, table)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::default_table;
    use crate::smiles::parse_strict;

    fn contains(g: &str, p: &str) -> bool {
        membership(
            &parse_strict(g).unwrap(),
            &parse_strict(p).unwrap(),
            default_table(),
        )
    }

    #[test]
    fn acrylate_examples() {
        assert!(contains("COC(=O)C=C", "C=CC(=O)O"));
        assert!(!contains("CCO", "C=CC(=O)O"));
        assert!(contains("CC(=C)C(=O)OC", "C=CC(=O)O"));
        assert!(!contains("CC(=O)OC", "C=CC(=O)O"));
    }

    #[test]
    fn bond_orders_must_agree() {
        assert!(!contains("CCC(=O)O", "C=CC(=O)O"));
        assert!(contains("O=C=NC", "N=C=O"));
        assert!(!contains("OC#N", "N=C=O"));
    }

    #[test]
    fn hydrogen_lower_bounds() {
        assert!(contains("OCCO", "[OH]C.[OH]C"));
        assert!(!contains("COCCOC", "[OH]C.[OH]C"));
        // Two distinct hydroxyls are needed.
        assert!(!contains("CCO", "[OH]C.[OH]C"));
        assert!(contains("NCCN", "[NH2]C.[NH2]C"));
    }

    #[test]
    fn matching_is_injective() {
        assert!(!contains("CC", "CCC"));
        assert!(contains("C1CC1", "CCC"));
        assert!(!contains("CCC", "C1CC1"));
    }

    #[test]
    fn shipped_set() {
        let set = PatternSet::shipped(default_table());
        assert_eq!(set.classes(), ["acrylate", "chain_extender", "isocyanate"]);
        let hdi = parse_strict("O=C=NCCCCCCN=C=O").unwrap();
        assert!(set.matches("isocyanate", &hdi, default_table()));
        assert!(!set.matches("acrylate", &hdi, default_table()));
    }

    #[test]
    fn loader_errors_carry_line_numbers() {
        let err = PatternSet::parse("# c\nok\tCC\nbad line\n", default_table()).unwrap_err();
        assert!(matches!(err, MetricsError::Pattern { line: 3, .. }));
        let err = PatternSet::parse("x\tC(", default_table()).unwrap_err();
        assert!(matches!(err, MetricsError::Pattern { line: 1, .. }));
    }
}
