//! Total SMILES tokenizer. Every character lands in exactly one token.

use crate::element::Element;
use crate::graph::Atom;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BondSymbol {
    Single,
    Double,
    Triple,
    Aromatic,
    Up,
    Down,
}

impl BondSymbol {
    pub fn order(self) -> u8 {
        match self {
            BondSymbol::Double => 2,
            BondSymbol::Triple => 3,
            _ => 1,
        }
    }

    pub fn is_stereo(self) -> bool {
        matches!(self, BondSymbol::Up | BondSymbol::Down)
    }

    fn from_char(c: char) -> Option<BondSymbol> {
        Some(match c {
            '-' => BondSymbol::Single,
            '=' => BondSymbol::Double,
            '#' => BondSymbol::Triple,
            ':' => BondSymbol::Aromatic,
            '/' => BondSymbol::Up,
            '\\' => BondSymbol::Down,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    OrganicAtom,
    BracketAtom,
    Bond(BondSymbol),
    /// Ring-closure label, 0-99.
    RingDigit(u8),
    OpenParen,
    CloseParen,
    Dot,
    Garbage,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Token<'a> {
    pub kind: TokenKind,
    pub lexeme: &'a str,
    /// Character offset of the first character.
    pub position: usize,
}

pub fn tokenize(input: &str) -> Vec<Token<'_>> {
    let chars: Vec<(usize, char)> = input.char_indices().collect();
    let byte_at = |i: usize| chars.get(i).map_or(input.len(), |&(b, _)| b);
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i].1;
        let (kind, len) = match c {
            'C' if next_is(&chars, i, 'l') => (TokenKind::OrganicAtom, 2),
            'B' if next_is(&chars, i, 'r') => (TokenKind::OrganicAtom, 2),
            'B' | 'C' | 'N' | 'O' | 'P' | 'S' | 'F' | 'I' | 'b' | 'c' | 'n' | 'o' | 'p' | 's' => {
                (TokenKind::OrganicAtom, 1)
            }
            '[' => match chars[i + 1..]
                .iter()
                .position(|&(_, d)| d == ']' || d == '[')
            {
                Some(off) if chars[i + 1 + off].1 == ']' => (TokenKind::BracketAtom, off + 2),
                _ => (TokenKind::Garbage, 1),
            },
            '0'..='9' => (TokenKind::RingDigit(c as u8 - b'0'), 1),
            '%' => match (chars.get(i + 1), chars.get(i + 2)) {
                (Some(&(_, a)), Some(&(_, b))) if a.is_ascii_digit() && b.is_ascii_digit() => (
                    TokenKind::RingDigit((a as u8 - b'0') * 10 + (b as u8 - b'0')),
                    3,
                ),
                _ => (TokenKind::Garbage, 1),
            },
            '(' => (TokenKind::OpenParen, 1),
            ')' => (TokenKind::CloseParen, 1),
            '.' => (TokenKind::Dot, 1),
            _ => match BondSymbol::from_char(c) {
                Some(b) => (TokenKind::Bond(b), 1),
                None => (TokenKind::Garbage, 1),
            },
        };
        tokens.push(Token {
            kind,
            lexeme: &input[byte_at(i)..byte_at(i + len)],
            position: i,
        });
        i += len;
    }
    tokens
}

fn next_is(chars: &[(usize, char)], i: usize, c: char) -> bool {
    chars.get(i + 1).is_some_and(|&(_, d)| d == c)
}

/// Atom for an organic-subset lexeme such as `C`, `Cl` or `c`.
pub(crate) fn organic_atom(lexeme: &str) -> Atom {
    let aromatic = lexeme.starts_with(|c: char| c.is_ascii_lowercase());
    let symbol = if aromatic {
        lexeme.to_ascii_uppercase()
    } else {
        lexeme.to_string()
    };
    let mut atom = Atom::new(Element::from_symbol(&symbol).expect("organic subset symbol"));
    atom.aromatic = aromatic;
    atom
}

/// Outcome of reading a bracket atom.
#[derive(Debug, PartialEq, Eq)]
pub(crate) struct BracketAtom {
    pub atom: Atom,
    pub stereo: bool,
}

/// Parses `[isotope? symbol chirality? hcount? charge? class?]`.
pub(crate) fn bracket_atom(lexeme: &str) -> Option<BracketAtom> {
    let body = lexeme.strip_prefix('[')?.strip_suffix(']')?;
    let b = body.as_bytes();
    let mut i = 0;

    let digits = |i: &mut usize| -> Option<u32> {
        let start = *i;
        while *i < b.len() && b[*i].is_ascii_digit() && *i - start < 4 {
            *i += 1;
        }
        (start != *i).then(|| body[start..*i].parse().unwrap())
    };

    let isotope = digits(&mut i).map(|v| v as u16);
    if isotope == Some(0) {
        return None;
    }

    let rest = &body[i..];
    let (element, aromatic, len) =
        if let Some(e) = ["se", "as", "te"].iter().find(|s| rest.starts_with(**s)) {
            (Element::from_symbol(&capitalize(e))?, true, 2)
        } else if let Some(c) = rest.chars().next().filter(|c| "bcnops".contains(*c)) {
            (
                Element::from_symbol(&c.to_ascii_uppercase().to_string())?,
                true,
                1,
            )
        } else {
            let two = rest.get(..2).and_then(Element::from_symbol);
            match two {
                Some(e) if rest.as_bytes()[1].is_ascii_lowercase() => (e, false, 2),
                _ => (rest.get(..1).and_then(Element::from_symbol)?, false, 1),
            }
        };
    i += len;

    let mut stereo = false;
    if b.get(i) == Some(&b'@') {
        stereo = true;
        i += 1;
        if b.get(i) == Some(&b'@') {
            i += 1;
        } else if let Some(class) = body.get(i..i + 2) {
            if ["TH", "AL", "SP", "TB", "OH"].contains(&class) {
                i += 2;
                digits(&mut i)?;
            }
        }
    }

    let mut hydrogens = 0u8;
    if b.get(i) == Some(&b'H') {
        i += 1;
        hydrogens = digits(&mut i).map_or(Some(1), |v| u8::try_from(v).ok())?;
    }

    let mut charge: i32 = 0;
    if let Some(&sign) = b.get(i).filter(|c| **c == b'+' || **c == b'-') {
        let unit = if sign == b'+' { 1 } else { -1 };
        i += 1;
        if let Some(v) = digits(&mut i) {
            charge = unit * v as i32;
        } else {
            charge = unit;
            while b.get(i) == Some(&sign) {
                charge += unit;
                i += 1;
            }
        }
        if charge.abs() > 15 {
            return None;
        }
    }

    if b.get(i) == Some(&b':') {
        i += 1;
        digits(&mut i)?;
    }
    if i != b.len() {
        return None;
    }

    let mut atom = Atom::new(element)
        .with_hydrogens(hydrogens)
        .with_charge(charge as i8);
    atom.isotope = isotope;
    atom.aromatic = aromatic;
    Some(BracketAtom { atom, stereo })
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    c.next()
        .map(|f| f.to_ascii_uppercase().to_string() + c.as_str())
        .unwrap_or_default()
}
