//! SELFIES symbols, the alphabet and the index map used for branch lengths
//! and ring distances.

use std::collections::HashMap;
use std::fmt;

use crate::element::{Element, ValenceTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SymbolKind {
    /// `[ε]`: pads, or ends the current scope.
    Epsilon,
    /// `hydrogens` is `None` exactly for plain symbols like `[C]`; decorated
    /// symbols (charge, isotope or H count) always carry a count.
    Atom {
        order: u8,
        element: Element,
        charge: i8,
        hydrogens: Option<u8>,
        isotope: Option<u16>,
    },
    Branch {
        digits: u8,
        order: u8,
    },
    Ring {
        digits: u8,
        order: u8,
    },
    /// `.` between fragments.
    Separator,
}

/// One SELFIES symbol. The lexeme is its `Display` form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SelfiesSymbol {
    pub kind: SymbolKind,
}

impl SelfiesSymbol {
    pub const EPSILON: SelfiesSymbol = SelfiesSymbol {
        kind: SymbolKind::Epsilon,
    };
    pub const SEPARATOR: SelfiesSymbol = SelfiesSymbol {
        kind: SymbolKind::Separator,
    };

    pub fn plain(order: u8, element: Element) -> SelfiesSymbol {
        Self::atom(order, element, 0, None, None)
    }

    /// Atom symbol; a charge or isotope forces an explicit H count (0 when absent).
    pub fn atom(
        order: u8,
        element: Element,
        charge: i8,
        hydrogens: Option<u8>,
        isotope: Option<u16>,
    ) -> SelfiesSymbol {
        assert!((1..=3).contains(&order));
        let hydrogens = if charge != 0 || isotope.is_some() {
            hydrogens.or(Some(0))
        } else {
            hydrogens
        };
        SelfiesSymbol {
            kind: SymbolKind::Atom {
                order,
                element,
                charge,
                hydrogens,
                isotope,
            },
        }
    }

    pub fn branch(digits: u8, order: u8) -> SelfiesSymbol {
        assert!((1..=3).contains(&digits) && (1..=3).contains(&order));
        SelfiesSymbol {
            kind: SymbolKind::Branch { digits, order },
        }
    }

    pub fn ring(digits: u8, order: u8) -> SelfiesSymbol {
        assert!((1..=3).contains(&digits) && (1..=3).contains(&order));
        SelfiesSymbol {
            kind: SymbolKind::Ring { digits, order },
        }
    }

    /// Reads one lexeme. Atom symbols must name an element of `table`.
    pub fn parse(lexeme: &str, table: &ValenceTable) -> Option<SelfiesSymbol> {
        if lexeme == "." {
            return Some(Self::SEPARATOR);
        }
        let body = lexeme.strip_prefix('[')?.strip_suffix(']')?;
        if body == "ε" {
            return Some(Self::EPSILON);
        }
        let (order, rest) = match body.as_bytes().first()? {
            b'=' => (2, &body[1..]),
            b'#' => (3, &body[1..]),
            _ => (1, body),
        };
        for (word, ring) in [("Branch", false), ("Ring", true)] {
            if let Some(d) = rest.strip_prefix(word) {
                let digits = match d {
                    "1" => 1,
                    "2" => 2,
                    "3" => 3,
                    _ => return None,
                };
                return Some(if ring {
                    Self::ring(digits, order)
                } else {
                    Self::branch(digits, order)
                });
            }
        }
        let (element, charge, hydrogens, isotope) = parse_atom_body(rest)?;
        if !table.contains(element) {
            return None;
        }
        Some(Self::atom(order, element, charge, hydrogens, isotope))
    }

    pub fn is_atom(&self) -> bool {
        matches!(self.kind, SymbolKind::Atom { .. })
    }
}

/// `isotope? Symbol (H count?)? charge?`
fn parse_atom_body(s: &str) -> Option<(Element, i8, Option<u8>, Option<u16>)> {
    let b = s.as_bytes();
    let mut i = 0;
    while i < b.len() && b[i].is_ascii_digit() {
        i += 1;
    }
    let isotope = if i > 0 {
        let v: u16 = s[..i].parse().ok()?;
        (v > 0).then_some(v)?;
        Some(v)
    } else {
        None
    };
    if !b.get(i)?.is_ascii_uppercase() {
        return None;
    }
    let two = s
        .get(i..i + 2)
        .filter(|t| t.as_bytes()[1].is_ascii_lowercase());
    let (element, len) = match two.and_then(Element::from_symbol) {
        Some(e) => (e, 2),
        None => (Element::from_symbol(&s[i..i + 1])?, 1),
    };
    i += len;
    let mut hydrogens = None;
    if b.get(i) == Some(&b'H') {
        i += 1;
        let start = i;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
        hydrogens = Some(if start == i {
            1
        } else {
            s[start..i].parse().ok()?
        });
    }
    let mut charge = 0i32;
    if let Some(&sign) = b.get(i).filter(|c| **c == b'+' || **c == b'-') {
        let unit = if sign == b'+' { 1 } else { -1 };
        i += 1;
        let start = i;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
        if start < i {
            charge = unit * s[start..i].parse::<i32>().ok()?;
        } else {
            charge = unit;
            while b.get(i) == Some(&sign) {
                charge += unit;
                i += 1;
            }
        }
        if charge == 0 || charge.abs() > 15 {
            return None;
        }
    }
    (i == b.len()).then_some((element, charge as i8, hydrogens, isotope))
}

fn prefix(order: u8) -> &'static str {
    match order {
        2 => "=",
        3 => "#",
        _ => "",
    }
}

impl fmt::Display for SelfiesSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            SymbolKind::Epsilon => f.write_str("[ε]"),
            SymbolKind::Separator => f.write_str("."),
            SymbolKind::Branch { digits, order } => write!(f, "[{}Branch{digits}]", prefix(order)),
            SymbolKind::Ring { digits, order } => write!(f, "[{}Ring{digits}]", prefix(order)),
            SymbolKind::Atom {
                order,
                element,
                charge,
                hydrogens,
                isotope,
            } => {
                f.write_str("[")?;
                f.write_str(prefix(order))?;
                if let Some(iso) = isotope {
                    write!(f, "{iso}")?;
                }
                f.write_str(element.symbol())?;
                // `[CH0]` has to stay distinct from the plain `[C]`
                match hydrogens {
                    Some(0) if charge == 0 && isotope.is_none() => f.write_str("H0")?,
                    Some(0) | None => {}
                    Some(h) => write!(f, "H{h}")?,
                }
                if charge != 0 {
                    write!(f, "{charge:+}")?;
                }
                f.write_str("]")
            }
        }
    }
}

/// The sixteen symbols that double as base-16 digits, in digit order.
pub const INDEX_SYMBOLS: [&str; 16] = [
    "[ε]",
    "[F]",
    "[=O]",
    "[#N]",
    "[O]",
    "[N]",
    "[=N]",
    "[C]",
    "[=C]",
    "[#C]",
    "[Branch1]",
    "[Branch2]",
    "[Branch3]",
    "[Ring1]",
    "[Ring2]",
    "[Ring3]",
];

fn index_symbol(digit: usize) -> SelfiesSymbol {
    let core = [
        SelfiesSymbol::EPSILON,
        SelfiesSymbol::plain(1, Element::F),
        SelfiesSymbol::plain(2, Element::O),
        SelfiesSymbol::plain(3, Element::N),
        SelfiesSymbol::plain(1, Element::O),
        SelfiesSymbol::plain(1, Element::N),
        SelfiesSymbol::plain(2, Element::N),
        SelfiesSymbol::plain(1, Element::C),
        SelfiesSymbol::plain(2, Element::C),
        SelfiesSymbol::plain(3, Element::C),
        SelfiesSymbol::branch(1, 1),
        SelfiesSymbol::branch(2, 1),
        SelfiesSymbol::branch(3, 1),
        SelfiesSymbol::ring(1, 1),
        SelfiesSymbol::ring(2, 1),
        SelfiesSymbol::ring(3, 1),
    ];
    core[digit]
}

/// Digit value of a symbol read as part of a branch length or ring
/// distance. Symbols outside the sixteen index symbols read as 0.
pub fn digit_value(symbol: &SelfiesSymbol) -> usize {
    use SymbolKind::*;
    match symbol.kind {
        Epsilon => 0,
        Atom {
            order,
            element,
            charge: 0,
            hydrogens: None,
            isotope: None,
        } => match (order, element) {
            (1, Element::F) => 1,
            (2, Element::O) => 2,
            (3, Element::N) => 3,
            (1, Element::O) => 4,
            (1, Element::N) => 5,
            (2, Element::N) => 6,
            (1, Element::C) => 7,
            (2, Element::C) => 8,
            (3, Element::C) => 9,
            _ => 0,
        },
        Branch { digits, order: 1 } => 9 + digits as usize,
        Ring { digits, order: 1 } => 12 + digits as usize,
        _ => 0,
    }
}

/// Symbols spelling `value` in exactly `digits` base-16 digits.
pub fn index_symbols(value: usize, digits: u8) -> Vec<SelfiesSymbol> {
    (0..digits)
        .rev()
        .map(|place| index_symbol((value >> (4 * place as usize)) & 15))
        .collect()
}

/// The enumerated alphabet, in index order: the fourteen core symbols,
/// `[Ring2]` and `[Ring3]`, prefixed branches and rings, then one plain atom
/// symbol per bond prefix for every other element of the table.
pub fn alphabet(table: &ValenceTable) -> Vec<SelfiesSymbol> {
    let mut out: Vec<SelfiesSymbol> = (0..16).map(index_symbol).collect();
    for order in [2, 3] {
        for digits in 1..=3 {
            out.push(SelfiesSymbol::branch(digits, order));
        }
    }
    for order in [2, 3] {
        for digits in 1..=3 {
            out.push(SelfiesSymbol::ring(digits, order));
        }
    }
    for element in table.elements() {
        if [Element::C, Element::N, Element::O, Element::F].contains(&element) {
            continue;
        }
        for order in 1..=3 {
            out.push(SelfiesSymbol::plain(order, element));
        }
    }
    out
}

/// 1-based positions of the alphabet symbols.
#[derive(Debug, Clone)]
pub struct SymbolIndexMap {
    symbols: Vec<SelfiesSymbol>,
    index: HashMap<SelfiesSymbol, usize>,
}

impl SymbolIndexMap {
    pub fn new(table: &ValenceTable) -> SymbolIndexMap {
        let symbols = alphabet(table);
        let index = symbols
            .iter()
            .enumerate()
            .map(|(i, s)| (*s, i + 1))
            .collect();
        SymbolIndexMap { symbols, index }
    }

    pub fn index(&self, symbol: &SelfiesSymbol) -> Option<usize> {
        self.index.get(symbol).copied()
    }

    pub fn symbol(&self, index: usize) -> Option<SelfiesSymbol> {
        index
            .checked_sub(1)
            .and_then(|i| self.symbols.get(i))
            .copied()
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

/// Splits on bracket pairs. Anything outside a bracket pair other than `.`,
/// and bracketed lexemes that are not symbols over `table`, are flagged
/// `false`.
pub fn tokenize_selfies<'a>(input: &'a str, table: &ValenceTable) -> Vec<(&'a str, bool)> {
    let mut out = Vec::new();
    let mut rest = input;
    while let Some(c) = rest.chars().next() {
        let len = if c == '[' {
            match rest[1..].find(['[', ']']) {
                Some(p) if rest.as_bytes()[1 + p] == b']' => p + 2,
                _ => 1,
            }
        } else {
            c.len_utf8()
        };
        let lexeme = &rest[..len];
        let ok = SelfiesSymbol::parse(lexeme, table).is_some();
        out.push((lexeme, ok));
        rest = &rest[len..];
    }
    out
}

/// Keeps only the in-alphabet tokens.
pub fn edit_invalid(input: &str, table: &ValenceTable) -> Vec<SelfiesSymbol> {
    tokenize_selfies(input, table)
        .into_iter()
        .filter(|(_, ok)| *ok)
        .map(|(lexeme, _)| SelfiesSymbol::parse(lexeme, table).unwrap())
        .collect()
}

pub fn symbols_to_string(symbols: &[SelfiesSymbol]) -> String {
    let mut s = String::new();
    for sym in symbols {
        s.push_str(&sym.to_string());
    }
    s
}
