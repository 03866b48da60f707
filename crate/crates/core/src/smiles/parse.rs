//! One parsing engine behind both readers. The lenient reader keeps going
//! after every error and records what it did; the strict reader succeeds only
//! when the lenient one has nothing to report.

use thiserror::Error;

use super::kekule::kekulize_with_positions;
use super::token::{bracket_atom, organic_atom, tokenize, BondSymbol, TokenKind};
use crate::diagnostic::{first_error, Diagnostic, ErrorClass, Recovery};
use crate::element::{default_table, ValenceTable};
use crate::graph::MolecularGraph;

#[derive(Debug, Clone)]
pub struct ParseResult {
    /// Kekulized and free of dangling or duplicate bonds; may break valence rules.
    pub graph: MolecularGraph,
    pub diagnostics: Vec<Diagnostic>,
    /// Informational remarks that are not errors (dropped stereo marks etc).
    pub notes: Vec<String>,
    /// Source character offset of each atom.
    pub atom_positions: Vec<usize>,
}

impl ParseResult {
    pub fn is_valid(&self) -> bool {
        self.diagnostics.is_empty()
    }

    pub fn error_class(&self) -> ErrorClass {
        first_error(&self.diagnostics).map_or(ErrorClass::Valid, |d| d.class)
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("{diagnostic}")]
pub struct ParseError {
    pub diagnostic: Diagnostic,
}

/// SMILES reader bound to a valence table.
#[derive(Debug, Clone, Copy)]
pub struct SmilesReader<'t> {
    table: &'t ValenceTable,
}

impl Default for SmilesReader<'static> {
    fn default() -> Self {
        SmilesReader::new(default_table())
    }
}

impl<'t> SmilesReader<'t> {
    pub fn new(table: &'t ValenceTable) -> Self {
        SmilesReader { table }
    }

    pub fn table(&self) -> &'t ValenceTable {
        self.table
    }

    pub fn parse_lenient(&self, input: &str) -> ParseResult {
        let mut p = Engine::new(input);
        p.run();
        p.finish(self.table)
    }

    pub fn parse_strict(&self, input: &str) -> Result<MolecularGraph, ParseError> {
        let r = self.parse_lenient(input);
        match first_error(&r.diagnostics) {
            None => Ok(r.graph),
            Some(d) => Err(ParseError {
                diagnostic: d.clone(),
            }),
        }
    }

    pub fn classify_error(&self, input: &str) -> ErrorClass {
        self.parse_lenient(input).error_class()
    }
}

pub fn parse_lenient(input: &str) -> ParseResult {
    SmilesReader::default().parse_lenient(input)
}

pub fn parse_strict(input: &str) -> Result<MolecularGraph, ParseError> {
    SmilesReader::default().parse_strict(input)
}

pub fn classify_error(input: &str) -> ErrorClass {
    SmilesReader::default().classify_error(input)
}

struct RingOpen {
    atom: usize,
    bond: Option<BondSymbol>,
    position: usize,
}

struct BranchOpen {
    prev: Option<usize>,
    position: usize,
    atoms_at_open: usize,
}

struct Engine<'a> {
    input: &'a str,
    graph: MolecularGraph,
    positions: Vec<usize>,
    prev: Option<usize>,
    pending: Option<(BondSymbol, usize)>,
    branches: Vec<BranchOpen>,
    rings: Vec<Option<RingOpen>>,
    dangling_dot: Option<usize>,
    diagnostics: Vec<Diagnostic>,
    notes: Vec<String>,
}

impl<'a> Engine<'a> {
    fn new(input: &'a str) -> Self {
        Engine {
            input,
            graph: MolecularGraph::new(),
            positions: Vec::new(),
            prev: None,
            pending: None,
            branches: Vec::new(),
            rings: (0..100).map(|_| None).collect(),
            dangling_dot: None,
            diagnostics: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn error(
        &mut self,
        class: ErrorClass,
        position: usize,
        message: impl Into<String>,
        recovery: Recovery,
    ) {
        self.diagnostics
            .push(Diagnostic::new(class, position, message, recovery));
    }

    fn syntax(&mut self, position: usize, message: impl Into<String>, recovery: Recovery) {
        self.error(ErrorClass::SyntaxError, position, message, recovery);
    }

    fn run(&mut self) {
        for tok in tokenize(self.input) {
            let pos = tok.position;
            match tok.kind {
                TokenKind::OrganicAtom => self.atom(organic_atom(tok.lexeme), pos),
                TokenKind::BracketAtom => match bracket_atom(tok.lexeme) {
                    Some(b) => {
                        if b.stereo {
                            self.notes.push(format!("ignored chirality at {pos}"));
                        }
                        self.atom(b.atom, pos);
                    }
                    None => self.syntax(
                        pos,
                        format!("malformed bracket atom {}", tok.lexeme),
                        Recovery::SkippedToken,
                    ),
                },
                TokenKind::Bond(sym) => {
                    if self.prev.is_none() {
                        self.syntax(
                            pos,
                            "bond symbol without a preceding atom",
                            Recovery::DroppedBondSymbol,
                        );
                    } else if self.pending.is_some() {
                        self.syntax(pos, "consecutive bond symbols", Recovery::DroppedBondSymbol);
                    } else {
                        if sym.is_stereo() {
                            self.notes.push(format!("ignored bond direction at {pos}"));
                        }
                        self.pending = Some((sym, pos));
                    }
                }
                TokenKind::RingDigit(label) => self.ring(label, pos),
                TokenKind::OpenParen => {
                    if self.prev.is_none() {
                        self.syntax(
                            pos,
                            "branch without a preceding atom",
                            Recovery::SkippedToken,
                        );
                        continue;
                    }
                    if let Some((_, bpos)) = self.pending.take() {
                        self.syntax(
                            bpos,
                            "bond symbol before a branch",
                            Recovery::DroppedBondSymbol,
                        );
                    }
                    self.branches.push(BranchOpen {
                        prev: self.prev,
                        position: pos,
                        atoms_at_open: self.graph.atom_count(),
                    });
                }
                TokenKind::CloseParen => match self.branches.pop() {
                    None => self.error(
                        ErrorClass::ParenthesesError,
                        pos,
                        "extra close parenthesis",
                        Recovery::SkippedToken,
                    ),
                    Some(open) => {
                        if let Some((_, bpos)) = self.pending.take() {
                            self.syntax(
                                bpos,
                                "bond symbol at the end of a branch",
                                Recovery::DroppedBondSymbol,
                            );
                        }
                        if self.graph.atom_count() == open.atoms_at_open {
                            self.syntax(pos, "empty branch", Recovery::SkippedToken);
                        }
                        self.prev = open.prev;
                    }
                },
                TokenKind::Dot => {
                    if let Some((_, bpos)) = self.pending.take() {
                        self.syntax(bpos, "bond symbol before '.'", Recovery::DroppedBondSymbol);
                    }
                    if self.prev.is_none() {
                        self.syntax(pos, "'.' without a preceding atom", Recovery::SkippedToken);
                    } else {
                        self.prev = None;
                        self.dangling_dot = Some(pos);
                    }
                }
                TokenKind::Garbage => self.syntax(
                    pos,
                    format!("unexpected character {:?}", tok.lexeme),
                    Recovery::SkippedToken,
                ),
            }
        }
    }

    fn bond_between(&mut self, a: usize, b: usize, sym: Option<BondSymbol>) {
        let both_aromatic = self.graph.atom(a).aromatic && self.graph.atom(b).aromatic;
        let result = match sym {
            None | Some(BondSymbol::Aromatic) if both_aromatic => {
                self.graph.add_aromatic_bond(a, b)
            }
            Some(s) => self.graph.add_bond(a, b, s.order()),
            None => self.graph.add_bond(a, b, 1),
        };
        debug_assert!(result.is_ok());
    }

    fn atom(&mut self, atom: crate::graph::Atom, pos: usize) {
        let idx = self.graph.add_atom(atom);
        self.positions.push(pos);
        if let Some(prev) = self.prev {
            let sym = self.pending.take().map(|(s, _)| s);
            self.bond_between(prev, idx, sym);
        }
        self.prev = Some(idx);
        self.dangling_dot = None;
    }

    fn ring(&mut self, label: u8, pos: usize) {
        let Some(cur) = self.prev else {
            self.syntax(
                pos,
                "ring-closure digit without a preceding atom",
                Recovery::SkippedToken,
            );
            return;
        };
        let here = self.pending.take();
        match self.rings[label as usize].take() {
            None => {
                self.rings[label as usize] = Some(RingOpen {
                    atom: cur,
                    bond: here.map(|(s, _)| s),
                    position: pos,
                });
            }
            Some(open) => {
                let sym = match (open.bond, here.map(|(s, _)| s)) {
                    (Some(a), Some(b)) if a.order() != b.order() => {
                        self.notes.push(format!(
                            "ring closure {label} has conflicting bond orders; kept the higher"
                        ));
                        Some(if a.order() > b.order() { a } else { b })
                    }
                    (a, b) => a.or(b),
                };
                if open.atom == cur {
                    self.error(
                        ErrorClass::BondAlreadyExists,
                        pos,
                        format!("duplicated ring closure {label} bonds atom {cur} to itself"),
                        Recovery::DroppedRingBond,
                    );
                } else if self.graph.bond_between(open.atom, cur).is_some() {
                    self.error(
                        ErrorClass::BondAlreadyExists,
                        pos,
                        format!(
                            "ring closure {label} duplicates bond between atom {} and atom {cur}",
                            open.atom
                        ),
                        Recovery::DroppedRingBond,
                    );
                } else {
                    self.bond_between(open.atom, cur, sym);
                }
            }
        }
    }

    fn finish(mut self, table: &ValenceTable) -> ParseResult {
        let end = self.input.chars().count();
        if let Some((_, bpos)) = self.pending.take() {
            self.syntax(
                bpos,
                "bond symbol at the end of input",
                Recovery::DroppedBondSymbol,
            );
        }
        if let Some(pos) = self.dangling_dot {
            self.syntax(pos, "'.' at the end of input", Recovery::SkippedToken);
        }
        for open in std::mem::take(&mut self.branches) {
            self.error(
                ErrorClass::ParenthesesError,
                open.position,
                "extra open parenthesis",
                Recovery::ClosedBranchAtEnd,
            );
        }
        let mut unclosed: Vec<(usize, u8)> = self
            .rings
            .iter()
            .enumerate()
            .filter_map(|(label, r)| r.as_ref().map(|r| (r.position, label as u8)))
            .collect();
        unclosed.sort_unstable();
        for (pos, label) in unclosed {
            self.error(
                ErrorClass::UnclosedRing,
                pos,
                format!("unclosed ring {label}"),
                Recovery::DroppedRingBond,
            );
        }
        if self.graph.is_empty() {
            self.syntax(end, "no atoms", Recovery::Nothing);
        }

        let positions = self.positions;
        let k = kekulize_with_positions(&self.graph, table, |atom| positions[atom]);
        self.diagnostics.extend(k.diagnostics);
        let graph = k.graph;

        for (atom, &position) in positions.iter().enumerate().take(graph.atom_count()) {
            let a = graph.atom(atom);
            match graph.free_valence(table, atom) {
                Ok(f) if f >= 0 => {}
                Ok(_) => {
                    let used = graph.used_valence(atom).unwrap();
                    self.diagnostics.push(Diagnostic::new(
                        ErrorClass::ValenceError,
                        position,
                        format!(
                            "explicit valence for atom {atom} {}, {used}, is greater than permitted",
                            a.element
                        ),
                        Recovery::KeptBonds,
                    ));
                }
                Err(e) => self.diagnostics.push(Diagnostic::new(
                    ErrorClass::ValenceError,
                    position,
                    e.to_string(),
                    Recovery::KeptBonds,
                )),
            }
        }

        ParseResult {
            graph,
            diagnostics: self.diagnostics,
            notes: self.notes,
            atom_positions: positions,
        }
    }
}
