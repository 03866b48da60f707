//! SELFIES to graph. Every symbol sequence decodes to a graph that satisfies
//! the valence table.

use super::symbol::{digit_value, edit_invalid, SelfiesSymbol, SymbolKind};
use crate::element::{Element, ValenceTable};
use crate::graph::{Atom, MolecularGraph};

/// Which reading to follow where the grammar table and the widely used
/// reference decoder disagree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DecodeRules {
    /// `[ε]` opening a branch places a carbon, a branch or ring opening a
    /// branch is ignored, and a ring onto an existing bond is skipped.
    #[default]
    Grammar,
    /// `[ε]` opening a branch just ends it, branches and rings there act as
    /// on any atom, and a ring onto an existing bond raises its order.
    Reference,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IgnoreReason {
    /// Branch, ring or `[ε]` before the first atom of a fragment.
    InitialState,
    /// Branch on an atom with fewer than two free slots.
    LowCapacity,
    /// Branch or ring as the first symbol of a branch.
    BranchStart,
    /// Atom whose element the valence table can't answer for.
    UnknownElement,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RingOutcome {
    Formed { order: u8 },
    SameAtom,
    NoCapacity,
    BondExists,
}

/// What happened at one input symbol. `symbol` is an index into the decoded
/// slice; index-digit symbols belong to the branch or ring that read them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceEvent {
    /// `order` is 0 for the first atom of a fragment and otherwise the bond
    /// actually made, which may be lower than `requested`.
    Placed {
        symbol: usize,
        atom: usize,
        requested: u8,
        order: u8,
    },
    /// `[ε]` opening a branch puts a single-bonded carbon there.
    DefaultCarbon {
        symbol: usize,
        atom: usize,
    },
    Ignored {
        symbol: usize,
        reason: IgnoreReason,
    },
    Branch {
        symbol: usize,
        length: usize,
        order: u8,
    },
    Ring {
        symbol: usize,
        head: usize,
        target: usize,
        requested: u8,
        order: u8,
        outcome: RingOutcome,
    },
    /// `[ε]`, or an atom that could not bond at all, ended the scope.
    Terminated {
        symbol: usize,
    },
    Discarded {
        from: usize,
        count: usize,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DecodeTrace {
    pub events: Vec<TraceEvent>,
}

impl DecodeTrace {
    /// Placements whose bond came out lower than the symbol asked for, as
    /// `(symbol, requested, order)`.
    pub fn reduced_bonds(&self) -> impl Iterator<Item = (usize, u8, u8)> + '_ {
        self.events.iter().filter_map(|e| match *e {
            TraceEvent::Placed {
                symbol,
                requested,
                order,
                ..
            } if order > 0 && order < requested => Some((symbol, requested, order)),
            _ => None,
        })
    }
}

#[derive(Debug, Clone)]
pub struct Decoded {
    pub graph: MolecularGraph,
    pub trace: DecodeTrace,
}

/// Edits `input` down to its in-alphabet symbols and decodes them.
pub fn decode_str(input: &str, table: &ValenceTable) -> Decoded {
    decode(&edit_invalid(input, table), table)
}

pub fn decode(symbols: &[SelfiesSymbol], table: &ValenceTable) -> Decoded {
    decode_with(symbols, table, DecodeRules::Grammar)
}

pub fn decode_with(symbols: &[SelfiesSymbol], table: &ValenceTable, rules: DecodeRules) -> Decoded {
    let mut d = Decoder {
        symbols,
        table,
        rules,
        graph: MolecularGraph::new(),
        capacity: Vec::new(),
        events: Vec::new(),
        rings: Vec::new(),
    };
    let mut start = 0;
    while start <= symbols.len() {
        let end = symbols[start..]
            .iter()
            .position(|s| s.kind == SymbolKind::Separator)
            .map_or(symbols.len(), |p| start + p);
        d.fragment(start, end);
        start = end + 1;
    }
    d.form_rings();
    Decoded {
        graph: d.graph,
        trace: DecodeTrace { events: d.events },
    }
}

#[derive(Debug, Clone, Copy)]
enum State {
    Initial,
    Free(u8),
    BranchStart(u8),
}

struct Scope {
    state: State,
    head: Option<usize>,
    start: usize,
    budget: usize,
}

struct PendingRing {
    target: usize,
    head: usize,
    order: u8,
    event: usize,
}

struct Decoder<'a> {
    symbols: &'a [SelfiesSymbol],
    table: &'a ValenceTable,
    rules: DecodeRules,
    graph: MolecularGraph,
    capacity: Vec<u8>,
    events: Vec<TraceEvent>,
    rings: Vec<PendingRing>,
}

impl Decoder<'_> {
    /// Atom and bonding capacity for an atom symbol, explicit H clamped.
    fn atom_for(&self, kind: SymbolKind) -> Option<(Atom, u8)> {
        let SymbolKind::Atom {
            element,
            charge,
            hydrogens,
            isotope,
            ..
        } = kind
        else {
            unreachable!()
        };
        let max = self.table.max_valence(element, charge).ok()?;
        let h = hydrogens.map(|h| h.min(max));
        let atom = Atom {
            element,
            charge,
            hydrogens: h,
            isotope,
            aromatic: false,
        };
        Some((atom, max - h.unwrap_or(0)))
    }

    fn place(&mut self, atom: Atom, capacity: u8) -> usize {
        self.capacity.push(capacity);
        self.graph.add_atom(atom)
    }

    fn read_index(&self, p: &mut usize, end: usize, digits: u8) -> usize {
        let mut value = 0;
        for _ in 0..digits {
            let v = if *p < end {
                *p += 1;
                digit_value(&self.symbols[*p - 1])
            } else {
                0
            };
            value = value * 16 + v;
        }
        value
    }

    fn fragment(&mut self, from: usize, end: usize) {
        let mut p = from;
        let mut stack = vec![Scope {
            state: State::Initial,
            head: None,
            start: from,
            budget: usize::MAX,
        }];
        loop {
            let Some(top) = stack.last() else { return };
            if p >= end || p - top.start >= top.budget {
                stack.pop();
                if p >= end {
                    return;
                }
                continue;
            }
            let i = p;
            p += 1;
            let kind = self.symbols[i].kind;
            let top = stack.last_mut().unwrap();
            let mut terminate = false;
            let state = match (top.state, self.rules) {
                (State::BranchStart(k), DecodeRules::Reference) => State::Free(k),
                (s, _) => s,
            };
            match (state, kind) {
                (_, SymbolKind::Separator) => unreachable!("fragments are split on separators"),
                (State::Initial, SymbolKind::Atom { .. }) => match self.atom_for(kind) {
                    None => self.events.push(TraceEvent::Ignored {
                        symbol: i,
                        reason: IgnoreReason::UnknownElement,
                    }),
                    Some((atom, cap)) => {
                        let SymbolKind::Atom { order, .. } = kind else {
                            unreachable!()
                        };
                        let idx = self.place(atom, cap);
                        self.events.push(TraceEvent::Placed {
                            symbol: i,
                            atom: idx,
                            requested: order,
                            order: 0,
                        });
                        top.head = Some(idx);
                        top.state = State::Free(cap);
                        terminate = cap == 0;
                    }
                },
                (State::Free(k) | State::BranchStart(k), SymbolKind::Atom { order, .. }) => {
                    match self.atom_for(kind) {
                        None => self.events.push(TraceEvent::Ignored {
                            symbol: i,
                            reason: IgnoreReason::UnknownElement,
                        }),
                        Some((atom, cap)) => {
                            let m = order.min(k).min(cap);
                            if m == 0 {
                                self.events.push(TraceEvent::Terminated { symbol: i });
                                terminate = true;
                            } else {
                                let head = top.head.expect("non-initial scope has a head");
                                let idx = self.place(atom, cap);
                                self.graph.add_bond(head, idx, m).expect("fresh atom");
                                self.events.push(TraceEvent::Placed {
                                    symbol: i,
                                    atom: idx,
                                    requested: order,
                                    order: m,
                                });
                                top.head = Some(idx);
                                top.state = State::Free(cap - m);
                                terminate = cap == m;
                            }
                        }
                    }
                }
                (State::Initial, _) => self.events.push(TraceEvent::Ignored {
                    symbol: i,
                    reason: IgnoreReason::InitialState,
                }),
                (State::Free(_), SymbolKind::Epsilon) => {
                    self.events.push(TraceEvent::Terminated { symbol: i });
                    terminate = true;
                }
                (State::BranchStart(_), SymbolKind::Epsilon) => {
                    let head = top.head.expect("branch has a root");
                    let idx = self.place(Atom::new(Element::C), 4);
                    self.graph.add_bond(head, idx, 1).expect("fresh atom");
                    self.events.push(TraceEvent::DefaultCarbon {
                        symbol: i,
                        atom: idx,
                    });
                    terminate = true;
                }
                (State::BranchStart(_), _) => self.events.push(TraceEvent::Ignored {
                    symbol: i,
                    reason: IgnoreReason::BranchStart,
                }),
                (State::Free(k), SymbolKind::Branch { .. }) if k < 2 => {
                    self.events.push(TraceEvent::Ignored {
                        symbol: i,
                        reason: IgnoreReason::LowCapacity,
                    })
                }
                (State::Free(k), SymbolKind::Branch { digits, order }) => {
                    let cap = (k - 1).min(order);
                    let head = top.head;
                    top.state = State::Free(k - cap);
                    let length = self.read_index(&mut p, end, digits) + 1;
                    self.events.push(TraceEvent::Branch {
                        symbol: i,
                        length,
                        order: cap,
                    });
                    stack.push(Scope {
                        state: State::BranchStart(cap),
                        head,
                        start: p,
                        budget: length,
                    });
                }
                (State::Free(k), SymbolKind::Ring { digits, order }) => {
                    let m = order.min(k);
                    let head = top.head.expect("non-initial scope has a head");
                    top.state = State::Free(k - m);
                    terminate = k == m;
                    let q = self.read_index(&mut p, end, digits);
                    let target = head.saturating_sub(q + 1);
                    self.rings.push(PendingRing {
                        target,
                        head,
                        order: m,
                        event: self.events.len(),
                    });
                    self.events.push(TraceEvent::Ring {
                        symbol: i,
                        head,
                        target,
                        requested: order,
                        order: m,
                        outcome: RingOutcome::SameAtom,
                    });
                }
            }
            if terminate {
                let top = stack.pop().unwrap();
                let left = top.budget.saturating_sub(p - top.start).min(end - p);
                if left > 0 {
                    self.events.push(TraceEvent::Discarded {
                        from: p,
                        count: left,
                    });
                    p += left;
                }
                if stack.is_empty() {
                    return;
                }
            }
        }
    }

    /// Ring bonds are made after every fragment is placed, in queue order.
    fn form_rings(&mut self) {
        for ring in std::mem::take(&mut self.rings) {
            let (a, b) = (ring.target, ring.head);
            let free =
                |g: &MolecularGraph, x: usize| self.capacity[x] as i64 - g.bond_order_sum(x) as i64;
            let outcome = if a == b {
                RingOutcome::SameAtom
            } else {
                let (fa, fb) = (free(&self.graph, a), free(&self.graph, b));
                let order = (ring.order as i64).min(fa).min(fb) as u8;
                if fa <= 0 || fb <= 0 {
                    RingOutcome::NoCapacity
                } else if let Some(bond) = self.graph.bond_between(a, b) {
                    if self.rules == DecodeRules::Reference {
                        let raised = (self.graph.bond(bond).order + order).min(3);
                        self.graph.set_bond(bond, raised, false);
                    }
                    RingOutcome::BondExists
                } else {
                    self.graph.add_bond(a, b, order).expect("checked above");
                    RingOutcome::Formed { order }
                }
            };
            if let TraceEvent::Ring { outcome: o, .. } = &mut self.events[ring.event] {
                *o = outcome;
            }
        }
    }
}
