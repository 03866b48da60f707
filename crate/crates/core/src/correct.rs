//! SmiSelf: repair a SMILES string by a round trip through SELFIES, plus a
//! seeded mutator for building corrupted corpora.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::diagnostic::Diagnostic;
use crate::element::{default_table, ValenceTable};
use crate::selfies::{decode, encode, symbols_to_string};
use crate::smiles::token::{tokenize, TokenKind};
use crate::smiles::{canonical_smiles, graphs_equivalent, SmilesReader};

/// Note attached when nothing survives decoding and the output is `""`.
pub const EMPTY_RESULT: &str = "EmptyResult";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrectionReport {
    pub input: String,
    pub diagnostics: Vec<Diagnostic>,
    /// SELFIES the input went through; `None` for inputs that were already valid.
    pub intermediate_selfies: Option<String>,
    /// Canonical SMILES, or `""` when decoding left no atoms.
    pub output: String,
    pub was_already_valid: bool,
    /// The repaired molecule differs from what the lenient reader saw.
    pub changed: bool,
    pub notes: Vec<String>,
}

impl CorrectionReport {
    pub fn is_sentinel(&self) -> bool {
        self.output.is_empty()
    }
}

/// The SmiSelf corrector bound to a valence table.
#[derive(Debug, Clone, Copy)]
pub struct SmiSelf<'t> {
    table: &'t ValenceTable,
}

impl Default for SmiSelf<'static> {
    fn default() -> Self {
        SmiSelf::new(default_table())
    }
}

impl<'t> SmiSelf<'t> {
    pub fn new(table: &'t ValenceTable) -> Self {
        SmiSelf { table }
    }

    pub fn correct(&self, input: &str) -> CorrectionReport {
        let parsed = SmilesReader::new(self.table).parse_lenient(input);
        if parsed.is_valid() {
            return CorrectionReport {
                input: input.to_string(),
                diagnostics: Vec::new(),
                intermediate_selfies: None,
                output: canonical_smiles(&parsed.graph, self.table),
                was_already_valid: true,
                changed: false,
                notes: parsed.notes,
            };
        }
        let symbols = encode(&parsed.graph, self.table);
        let decoded = decode(&symbols, self.table).graph;
        let mut notes = parsed.notes;
        let output = if decoded.is_empty() {
            notes.push(format!("{EMPTY_RESULT}: no atoms survived decoding"));
            String::new()
        } else {
            canonical_smiles(&decoded, self.table)
        };
        CorrectionReport {
            input: input.to_string(),
            diagnostics: parsed.diagnostics,
            intermediate_selfies: Some(symbols_to_string(&symbols)),
            changed: !graphs_equivalent(&parsed.graph, &decoded, self.table),
            output,
            was_already_valid: false,
            notes,
        }
    }
}

/// [`SmiSelf::correct`] with the default valence table.
pub fn smiself_correct(input: &str) -> CorrectionReport {
    SmiSelf::default().correct(input)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MutationKind {
    InsertParen,
    DeleteParen,
    DeleteRingDigit,
    DuplicateRingClosure,
    InsertBond,
    InsertGarbage,
    FlipCase,
}

impl MutationKind {
    pub const ALL: [MutationKind; 7] = [
        MutationKind::InsertParen,
        MutationKind::DeleteParen,
        MutationKind::DeleteRingDigit,
        MutationKind::DuplicateRingClosure,
        MutationKind::InsertBond,
        MutationKind::InsertGarbage,
        MutationKind::FlipCase,
    ];
}

const GARBAGE: &[char] = &[
    '!', '?', 'x', 'Z', '$', '&', '^', '~', '"', ';', '{', '}', '|', '<', '>', ',',
];

fn rng_for(input: &str, seed: u64) -> ChaCha8Rng {
    // FNV-1a over the input so equal seeds still differ between molecules.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in input.bytes() {
        h = (h ^ b as u64).wrapping_mul(0x0100_0000_01b3);
    }
    ChaCha8Rng::seed_from_u64(seed ^ h)
}

/// Applies one mutation of a kind that fits the input, picked by `seed`.
pub fn mutate_smiles(input: &str, seed: u64) -> String {
    let mut rng = rng_for(input, seed);
    let mut kinds = MutationKind::ALL.to_vec();
    kinds.shuffle(&mut rng);
    for kind in kinds {
        if let Some(out) = apply(input, kind, &mut rng) {
            return out;
        }
    }
    unreachable!("garbage insertion always applies")
}

/// Applies a mutation of the given kind, or `None` when the input has
/// nothing it could act on (no parenthesis to delete, no ring digit, ...).
pub fn mutate_with(input: &str, kind: MutationKind, seed: u64) -> Option<String> {
    apply(input, kind, &mut rng_for(input, seed))
}

fn apply(input: &str, kind: MutationKind, rng: &mut ChaCha8Rng) -> Option<String> {
    let chars: Vec<char> = input.chars().collect();
    let insert_at = |rng: &mut ChaCha8Rng, c: &str| {
        let at = rng.gen_range(0..=chars.len());
        let mut s: String = chars[..at].iter().collect();
        s.push_str(c);
        s.extend(&chars[at..]);
        s
    };
    let delete_one = |rng: &mut ChaCha8Rng, pick: &dyn Fn(usize, char) -> bool| {
        let spots: Vec<usize> = chars
            .iter()
            .enumerate()
            .filter(|&(i, &c)| pick(i, c))
            .map(|(i, _)| i)
            .collect();
        let &at = spots.choose(rng)?;
        Some(
            chars
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != at)
                .map(|(_, c)| c)
                .collect::<String>(),
        )
    };
    let tokens = tokenize(input);
    match kind {
        MutationKind::InsertParen => {
            let c = if rng.gen_bool(0.5) { "(" } else { ")" };
            Some(insert_at(rng, c))
        }
        MutationKind::DeleteParen => delete_one(rng, &|_, c| c == '(' || c == ')'),
        MutationKind::DeleteRingDigit => {
            let digits: Vec<usize> = tokens
                .iter()
                .filter(|t| matches!(t.kind, TokenKind::RingDigit(_)))
                .map(|t| t.position)
                .collect();
            let &at = digits.choose(rng)?;
            let len = tokens
                .iter()
                .find(|t| t.position == at)
                .unwrap()
                .lexeme
                .chars()
                .count();
            Some(chars[..at].iter().chain(&chars[at + len..]).collect())
        }
        MutationKind::DuplicateRingClosure => {
            let pairs: Vec<(usize, usize)> = tokens
                .windows(2)
                .filter(|w| is_atom(w[0].kind) && is_atom(w[1].kind))
                .map(|w| {
                    (
                        w[0].position + w[0].lexeme.chars().count(),
                        w[1].position + w[1].lexeme.chars().count(),
                    )
                })
                .collect();
            let &(a, b) = pairs.choose(rng)?;
            let label = fresh_label(&tokens);
            let mut s: String = chars[..a].iter().collect();
            s.push_str(&label);
            s.extend(&chars[a..b]);
            s.push_str(&label);
            s.extend(&chars[b..]);
            Some(s)
        }
        MutationKind::InsertBond => {
            let c = if rng.gen_bool(0.5) { "=" } else { "#" };
            Some(insert_at(rng, c))
        }
        MutationKind::InsertGarbage => {
            let c = *GARBAGE.choose(rng).unwrap();
            Some(insert_at(rng, &c.to_string()))
        }
        MutationKind::FlipCase => flip_case(&chars, &tokens, rng),
    }
}

fn is_atom(kind: TokenKind) -> bool {
    matches!(kind, TokenKind::OrganicAtom | TokenKind::BracketAtom)
}

fn fresh_label(tokens: &[crate::smiles::token::Token<'_>]) -> String {
    let used: Vec<u8> = tokens
        .iter()
        .filter_map(|t| match t.kind {
            TokenKind::RingDigit(d) => Some(d),
            _ => None,
        })
        .collect();
    let label = (1..100u8).find(|d| !used.contains(d)).unwrap_or(99);
    if label < 10 {
        label.to_string()
    } else {
        format!("%{label}")
    }
}

/// Flips the case of one single-letter organic atom.
fn flip_case(
    chars: &[char],
    tokens: &[crate::smiles::token::Token<'_>],
    rng: &mut ChaCha8Rng,
) -> Option<String> {
    let spots: Vec<usize> = tokens
        .iter()
        .filter(|t| t.kind == TokenKind::OrganicAtom && t.lexeme.len() == 1)
        .map(|t| t.position)
        .collect();
    let &at = spots.choose(rng)?;
    let mut out: Vec<char> = chars.to_vec();
    let c = out[at];
    out[at] = if c.is_ascii_uppercase() {
        c.to_ascii_lowercase()
    } else {
        c.to_ascii_uppercase()
    };
    Some(out.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostic::ErrorClass;
    use crate::smiles::{classify_error, parse_strict};

    fn equivalent(a: &str, b: &str) -> bool {
        graphs_equivalent(
            &parse_strict(a).unwrap(),
            &parse_strict(b).unwrap(),
            default_table(),
        )
    }

    #[test]
    fn aspirin_typo() {
        let r = smiself_correct("CC(=O)OC1=CC=CC=C1=C(=O)O)");
        assert!(!r.was_already_valid);
        assert!(r.changed);
        assert!(
            equivalent(&r.output, "CC(=O)OC1=CC=CC=C1C(=O)O"),
            "{}",
            r.output
        );
        assert_eq!(r.diagnostics[0].class, ErrorClass::ParenthesesError);
    }

    #[test]
    fn tetralin_typo() {
        let r = smiself_correct("CC1=CC2=C(C=C1)C(CCC2)(C)C)");
        assert!(equivalent(&r.output, "CC1=CC2=C(C=C1)C(CCC2)(C)C"));
        assert!(!r.changed);
    }

    #[test]
    fn valid_input_is_only_canonicalized() {
        let r = smiself_correct("C=C=C");
        assert!(r.was_already_valid);
        assert!(!r.changed);
        assert_eq!(
            r.output,
            canonical_smiles(&parse_strict("C=C=C").unwrap(), default_table())
        );
        assert!(r.intermediate_selfies.is_none());
    }

    #[test]
    fn every_error_class_is_repaired() {
        for s in [
            "C1CC",
            "CC(C",
            "C1C1",
            "c1cccc1",
            "C#C=C",
            "C?C",
            "C(C)(C)(C)(C)C",
            "cC",
        ] {
            let r = smiself_correct(s);
            assert!(parse_strict(&r.output).is_ok(), "{s} -> {}", r.output);
        }
    }

    #[test]
    fn empty_sentinel() {
        for s in ["", "???", ")("] {
            let r = smiself_correct(s);
            assert_eq!(r.output, "");
            assert!(r.is_sentinel());
            assert!(r.notes.iter().any(|n| n.starts_with(EMPTY_RESULT)));
        }
    }

    #[test]
    fn mutator_examples() {
        let seed = (0..1000)
            .find(|&s| mutate_with("CCO", MutationKind::InsertParen, s).as_deref() == Some("CCO)"))
            .unwrap();
        assert_eq!(
            mutate_with("CCO", MutationKind::InsertParen, seed).unwrap(),
            "CCO)"
        );
        let out = mutate_with("C1CC1", MutationKind::DeleteRingDigit, 1).unwrap();
        assert!(out == "C1CC" || out == "CC1");
        assert_eq!(classify_error(&out), ErrorClass::UnclosedRing);
        assert_eq!(mutate_with("CCO", MutationKind::DeleteParen, 1), None);
        let dup = mutate_with("CCO", MutationKind::DuplicateRingClosure, 5).unwrap();
        assert_eq!(classify_error(&dup), ErrorClass::BondAlreadyExists, "{dup}");
    }

    #[test]
    fn mutation_is_deterministic() {
        for seed in 0..50 {
            assert_eq!(
                mutate_smiles("CC(=O)OC1=CC=CC=C1", seed),
                mutate_smiles("CC(=O)OC1=CC=CC=C1", seed)
            );
        }
    }

    #[test]
    fn garbage_breaks_validity() {
        let broken = (0..1000)
            .filter(|&s| {
                classify_error(&mutate_with("CCO", MutationKind::InsertGarbage, s).unwrap())
                    != ErrorClass::Valid
            })
            .count();
        assert!(broken >= 950, "{broken}");
    }
}
