//! Molecular graph value type.
//!
//! Hydrogens are never stored as atoms. Bracket atoms record an explicit count
//! in [`Atom::hydrogens`]; every other atom carries implicit hydrogens derived
//! from the valence table.

use thiserror::Error;

use crate::element::{Element, ValenceTable, ValenceTableError};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Atom {
    pub element: Element,
    pub charge: i8,
    /// Set only for atoms written in bracket form.
    pub hydrogens: Option<u8>,
    pub isotope: Option<u16>,
    /// Lowercase in the source; cleared by kekulization.
    pub aromatic: bool,
}

impl Atom {
    pub fn new(element: Element) -> Atom {
        Atom {
            element,
            charge: 0,
            hydrogens: None,
            isotope: None,
            aromatic: false,
        }
    }

    pub fn with_charge(mut self, charge: i8) -> Atom {
        self.charge = charge;
        self
    }

    pub fn with_hydrogens(mut self, h: u8) -> Atom {
        self.hydrogens = Some(h);
        self
    }

    pub fn with_isotope(mut self, isotope: u16) -> Atom {
        self.isotope = Some(isotope);
        self
    }

    pub fn aromatic(mut self) -> Atom {
        self.aromatic = true;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Bond {
    a: usize,
    b: usize,
    pub order: u8,
    pub aromatic: bool,
}

impl Bond {
    pub fn endpoints(&self) -> (usize, usize) {
        (self.a, self.b)
    }

    pub fn other(&self, atom: usize) -> usize {
        if self.a == atom {
            self.b
        } else {
            self.a
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("atom index {0} out of range")]
    AtomOutOfRange(usize),
    #[error("atom {0} cannot bond to itself")]
    SelfLoop(usize),
    #[error("atoms {0} and {1} are already bonded")]
    DuplicateBond(usize, usize),
    #[error("bond order {0} is not 1, 2 or 3")]
    BadOrder(u8),
    #[error(transparent)]
    Valence(#[from] ValenceTableError),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MolecularGraph {
    atoms: Vec<Atom>,
    bonds: Vec<Bond>,
    /// Per atom: (neighbor, bond index), in bond-creation order.
    adjacency: Vec<Vec<(usize, usize)>>,
}

impl MolecularGraph {
    pub fn new() -> MolecularGraph {
        MolecularGraph::default()
    }

    pub fn add_atom(&mut self, atom: Atom) -> usize {
        self.atoms.push(atom);
        self.adjacency.push(Vec::new());
        self.atoms.len() - 1
    }

    pub fn add_bond(&mut self, a: usize, b: usize, order: u8) -> Result<usize, GraphError> {
        self.add_bond_inner(a, b, order, false)
    }

    pub(crate) fn add_aromatic_bond(&mut self, a: usize, b: usize) -> Result<usize, GraphError> {
        self.add_bond_inner(a, b, 1, true)
    }

    fn add_bond_inner(
        &mut self,
        a: usize,
        b: usize,
        order: u8,
        aromatic: bool,
    ) -> Result<usize, GraphError> {
        let n = self.atoms.len();
        if a >= n {
            return Err(GraphError::AtomOutOfRange(a));
        }
        if b >= n {
            return Err(GraphError::AtomOutOfRange(b));
        }
        if a == b {
            return Err(GraphError::SelfLoop(a));
        }
        if !(1..=3).contains(&order) {
            return Err(GraphError::BadOrder(order));
        }
        if self.bond_between(a, b).is_some() {
            return Err(GraphError::DuplicateBond(a, b));
        }
        let idx = self.bonds.len();
        self.bonds.push(Bond {
            a,
            b,
            order,
            aromatic,
        });
        self.adjacency[a].push((b, idx));
        self.adjacency[b].push((a, idx));
        Ok(idx)
    }

    pub(crate) fn set_bond(&mut self, bond: usize, order: u8, aromatic: bool) {
        self.bonds[bond].order = order;
        self.bonds[bond].aromatic = aromatic;
    }

    pub(crate) fn atom_mut(&mut self, atom: usize) -> &mut Atom {
        &mut self.atoms[atom]
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn atom(&self, atom: usize) -> &Atom {
        &self.atoms[atom]
    }

    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    pub fn bond(&self, bond: usize) -> &Bond {
        &self.bonds[bond]
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn bond_count(&self) -> usize {
        self.bonds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// (neighbor, bond index) pairs.
    pub fn neighbors(&self, atom: usize) -> &[(usize, usize)] {
        &self.adjacency[atom]
    }

    pub fn degree(&self, atom: usize) -> usize {
        self.adjacency[atom].len()
    }

    pub fn bond_between(&self, a: usize, b: usize) -> Option<usize> {
        self.adjacency
            .get(a)?
            .iter()
            .find(|(n, _)| *n == b)
            .map(|&(_, bond)| bond)
    }

    pub fn bond_order_sum(&self, atom: usize) -> u32 {
        self.adjacency[atom]
            .iter()
            .map(|&(_, b)| self.bonds[b].order as u32)
            .sum()
    }

    /// Sum of incident bond orders plus explicit hydrogens.
    pub fn used_valence(&self, atom: usize) -> Result<u32, GraphError> {
        let a = self
            .atoms
            .get(atom)
            .ok_or(GraphError::AtomOutOfRange(atom))?;
        Ok(self.bond_order_sum(atom) + a.hydrogens.unwrap_or(0) as u32)
    }

    /// Remaining valence under the smallest allowed valence that fits;
    /// negative when the atom is over-bonded.
    pub fn free_valence(&self, table: &ValenceTable, atom: usize) -> Result<i32, GraphError> {
        let used = self.used_valence(atom)?;
        let a = &self.atoms[atom];
        Ok(table.free_for(a.element, a.charge, used)?)
    }

    /// Every atom has non-negative free valence. Unknown elements under a
    /// rejecting table make the graph invalid.
    pub fn is_semantically_valid(&self, table: &ValenceTable) -> bool {
        (0..self.atoms.len()).all(|i| matches!(self.free_valence(table, i), Ok(f) if f >= 0))
    }

    /// Hydrogens attached to the atom: the explicit count for bracket atoms,
    /// otherwise whatever fills the smallest accommodating valence.
    pub fn hydrogen_count(&self, table: &ValenceTable, atom: usize) -> u8 {
        let a = &self.atoms[atom];
        if let Some(h) = a.hydrogens {
            return h;
        }
        implicit_hydrogens(table, a.element, a.charge, self.bond_order_sum(atom))
    }

    /// Connected components, each sorted ascending, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.atoms.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut stack = vec![start];
            let mut comp = Vec::new();
            while let Some(u) = stack.pop() {
                comp.push(u);
                for &(v, _) in &self.adjacency[u] {
                    if !seen[v] {
                        seen[v] = true;
                        stack.push(v);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Copy with atoms renumbered: atom `i` moves to `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> MolecularGraph {
        assert_eq!(perm.len(), self.atoms.len());
        let mut atoms = vec![None; self.atoms.len()];
        for (i, a) in self.atoms.iter().enumerate() {
            atoms[perm[i]] = Some(a.clone());
        }
        let mut g = MolecularGraph::new();
        for a in atoms {
            g.add_atom(a.expect("perm is not a permutation"));
        }
        for b in &self.bonds {
            g.add_bond_inner(perm[b.a], perm[b.b], b.order, b.aromatic)
                .expect("permutation preserves simple graphs");
        }
        g
    }

    /// Graph without the given bond; other bond indices shift down.
    pub fn without_bond(&self, bond: usize) -> MolecularGraph {
        let mut g = MolecularGraph::new();
        for a in &self.atoms {
            g.add_atom(a.clone());
        }
        for (i, b) in self.bonds.iter().enumerate() {
            if i != bond {
                g.add_bond_inner(b.a, b.b, b.order, b.aromatic).unwrap();
            }
        }
        g
    }
}

/// Implicit hydrogen count for a non-bracket atom with `bond_sum` bond order.
/// Elements outside the table get none.
pub fn implicit_hydrogens(table: &ValenceTable, element: Element, charge: i8, bond_sum: u32) -> u8 {
    if !table.contains(element) {
        return 0;
    }
    table
        .free_for(element, charge, bond_sum)
        .map(|f| f.max(0) as u8)
        .unwrap_or(0)
}
