//! Elements and the valence table.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::LazyLock;

use thiserror::Error;

/// Element symbols indexed by atomic number - 1.
const SYMBOLS: [&str; 118] = [
    "H", "He", "Li", "Be", "B", "C", "N", "O", "F", "Ne", "Na", "Mg", "Al", "Si", "P", "S", "Cl",
    "Ar", "K", "Ca", "Sc", "Ti", "V", "Cr", "Mn", "Fe", "Co", "Ni", "Cu", "Zn", "Ga", "Ge", "As",
    "Se", "Br", "Kr", "Rb", "Sr", "Y", "Zr", "Nb", "Mo", "Tc", "Ru", "Rh", "Pd", "Ag", "Cd", "In",
    "Sn", "Sb", "Te", "I", "Xe", "Cs", "Ba", "La", "Ce", "Pr", "Nd", "Pm", "Sm", "Eu", "Gd", "Tb",
    "Dy", "Ho", "Er", "Tm", "Yb", "Lu", "Hf", "Ta", "W", "Re", "Os", "Ir", "Pt", "Au", "Hg", "Tl",
    "Pb", "Bi", "Po", "At", "Rn", "Fr", "Ra", "Ac", "Th", "Pa", "U", "Np", "Pu", "Am", "Cm", "Bk",
    "Cf", "Es", "Fm", "Md", "No", "Lr", "Rf", "Db", "Sg", "Bh", "Hs", "Mt", "Ds", "Rg", "Cn", "Nh",
    "Fl", "Mc", "Lv", "Ts", "Og",
];

/// Valence assigned to elements that are missing from a lenient table.
pub const WILDCARD_VALENCE: u8 = 8;

/// A chemical element, stored as its atomic number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Element(u8);

impl Element {
    pub const H: Element = Element(1);
    pub const B: Element = Element(5);
    pub const C: Element = Element(6);
    pub const N: Element = Element(7);
    pub const O: Element = Element(8);
    pub const F: Element = Element(9);
    pub const P: Element = Element(15);
    pub const S: Element = Element(16);
    pub const CL: Element = Element(17);
    pub const BR: Element = Element(35);
    pub const I: Element = Element(53);

    pub fn from_atomic_number(z: u8) -> Option<Element> {
        (1..=SYMBOLS.len() as u8).contains(&z).then_some(Element(z))
    }

    pub fn from_symbol(symbol: &str) -> Option<Element> {
        SYMBOLS
            .iter()
            .position(|s| *s == symbol)
            .map(|i| Element(i as u8 + 1))
    }

    pub fn atomic_number(self) -> u8 {
        self.0
    }

    pub fn symbol(self) -> &'static str {
        SYMBOLS[self.0 as usize - 1]
    }

    /// Members of the SMILES organic subset may be written without brackets.
    pub fn is_organic_subset(self) -> bool {
        matches!(self.0, 5 | 6 | 7 | 8 | 9 | 15 | 16 | 17 | 35 | 53)
    }

    pub fn all() -> impl Iterator<Item = Element> {
        (1..=SYMBOLS.len() as u8).map(Element)
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ValenceTableError {
    #[error("line {line}: unknown element symbol `{symbol}`")]
    UnknownSymbol { line: usize, symbol: String },
    #[error(
        "line {line}: valences must be a non-empty, strictly increasing list of positive integers"
    )]
    BadValences { line: usize },
    #[error("line {line}: expected `symbol<TAB>v1,v2,...`")]
    Malformed { line: usize },
    #[error("valence table lacks the core element {0}")]
    MissingCore(&'static str),
    #[error("element {0} is not in the valence table")]
    UnknownElement(Element),
}

/// How a table answers for elements it has no entry for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UnknownElementPolicy {
    /// Treat the element as able to carry [`WILDCARD_VALENCE`] bonds.
    #[default]
    Wildcard,
    /// Refuse to answer.
    Reject,
}

/// Allowed total bond counts per element.
///
/// Formal charge shifts every allowed valence by the charge (floored at 0), so
/// `[N+]` allows 4 and `[O-]` allows 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValenceTable {
    entries: BTreeMap<Element, Vec<u8>>,
    unknown: UnknownElementPolicy,
}

static DEFAULT_TABLE: LazyLock<ValenceTable> = LazyLock::new(ValenceTable::new);

/// Shared instance of [`ValenceTable::new`].
pub fn default_table() -> &'static ValenceTable {
    &DEFAULT_TABLE
}

impl Default for ValenceTable {
    fn default() -> Self {
        ValenceTable::new()
    }
}

impl ValenceTable {
    /// The organic elements plus a handful of common main-group atoms.
    pub fn new() -> ValenceTable {
        let defaults: &[(&str, &[u8])] = &[
            ("H", &[1]),
            ("B", &[3]),
            ("C", &[4]),
            ("N", &[3]),
            ("O", &[2]),
            ("F", &[1]),
            ("Si", &[4]),
            ("P", &[3, 5]),
            ("S", &[2, 4, 6]),
            ("Cl", &[1]),
            ("Ge", &[4]),
            ("As", &[3, 5]),
            ("Se", &[2, 4, 6]),
            ("Br", &[1]),
            ("Sn", &[2, 4]),
            ("Te", &[2, 4, 6]),
            ("I", &[1, 3, 5]),
            ("Li", &[1]),
            ("Na", &[1]),
            ("K", &[1]),
            ("Mg", &[2]),
            ("Ca", &[2]),
            ("Zn", &[2]),
            ("Al", &[3]),
        ];
        let entries = defaults
            .iter()
            .map(|(s, v)| (Element::from_symbol(s).unwrap(), v.to_vec()))
            .collect();
        ValenceTable {
            entries,
            unknown: UnknownElementPolicy::Wildcard,
        }
    }

    pub fn with_policy(mut self, policy: UnknownElementPolicy) -> ValenceTable {
        self.unknown = policy;
        self
    }

    pub fn policy(&self) -> UnknownElementPolicy {
        self.unknown
    }

    /// Sets the valences for one element. Returns `false` (and leaves the table
    /// untouched) when `valences` is empty, unsorted or contains zero.
    pub fn insert(&mut self, element: Element, valences: Vec<u8>) -> bool {
        let ok =
            !valences.is_empty() && valences[0] > 0 && valences.windows(2).all(|w| w[0] < w[1]);
        if ok {
            self.entries.insert(element, valences);
        }
        ok
    }

    /// Reads `symbol<TAB>v1,v2,...` lines on top of the default table.
    /// Blank lines and `#` comments are skipped.
    pub fn parse_overrides(text: &str) -> Result<ValenceTable, ValenceTableError> {
        let mut table = ValenceTable::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let raw = raw.trim();
            if raw.is_empty() || raw.starts_with('#') {
                continue;
            }
            let mut fields = raw.split(|c: char| c == '\t' || c.is_whitespace());
            let (Some(symbol), Some(list)) = (fields.next(), fields.find(|f| !f.is_empty())) else {
                return Err(ValenceTableError::Malformed { line });
            };
            let element =
                Element::from_symbol(symbol).ok_or_else(|| ValenceTableError::UnknownSymbol {
                    line,
                    symbol: symbol.to_string(),
                })?;
            let valences = list
                .split(',')
                .map(|v| u8::from_str(v.trim()))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| ValenceTableError::BadValences { line })?;
            if !table.insert(element, valences) {
                return Err(ValenceTableError::BadValences { line });
            }
        }
        table.check_core()?;
        Ok(table)
    }

    fn check_core(&self) -> Result<(), ValenceTableError> {
        for (e, name) in [
            (Element::C, "C"),
            (Element::N, "N"),
            (Element::O, "O"),
            (Element::F, "F"),
        ] {
            if !self.entries.contains_key(&e) {
                return Err(ValenceTableError::MissingCore(name));
            }
        }
        Ok(())
    }

    pub fn contains(&self, element: Element) -> bool {
        self.entries.contains_key(&element)
    }

    /// Elements with an explicit entry, in atomic-number order.
    pub fn elements(&self) -> impl Iterator<Item = Element> + '_ {
        self.entries.keys().copied()
    }

    /// Default (uncharged) valences.
    pub fn default_valences(&self, element: Element) -> Result<Vec<u8>, ValenceTableError> {
        match self.entries.get(&element) {
            Some(v) => Ok(v.clone()),
            None => match self.unknown {
                UnknownElementPolicy::Wildcard => Ok(vec![WILDCARD_VALENCE]),
                UnknownElementPolicy::Reject => Err(ValenceTableError::UnknownElement(element)),
            },
        }
    }

    /// Charge-adjusted valences, ascending and deduplicated.
    pub fn allowed_valences(
        &self,
        element: Element,
        charge: i8,
    ) -> Result<Vec<u8>, ValenceTableError> {
        let mut out: Vec<u8> = self
            .default_valences(element)?
            .into_iter()
            .map(|v| (v as i16 + charge as i16).clamp(0, u8::MAX as i16) as u8)
            .collect();
        out.dedup();
        Ok(out)
    }

    /// Largest charge-adjusted valence; the bonding capacity used by SELFIES.
    pub fn max_valence(&self, element: Element, charge: i8) -> Result<u8, ValenceTableError> {
        Ok(*self.allowed_valences(element, charge)?.last().unwrap())
    }

    /// Smallest allowed valence that accommodates `used`, minus `used`.
    /// Negative when `used` exceeds every allowed valence.
    pub fn free_for(
        &self,
        element: Element,
        charge: i8,
        used: u32,
    ) -> Result<i32, ValenceTableError> {
        let allowed = self.allowed_valences(element, charge)?;
        let used = used as i32;
        let chosen = allowed
            .iter()
            .map(|&v| v as i32)
            .find(|&v| v >= used)
            .unwrap_or(*allowed.last().unwrap() as i32);
        Ok(chosen - used)
    }
}
