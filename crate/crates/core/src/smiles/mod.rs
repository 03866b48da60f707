//! SMILES reading and writing.

pub mod canon;
pub mod kekule;
pub mod parse;
pub mod token;
pub mod write;

pub use canon::{canonical_rank, canonical_smiles, graphs_equivalent};
pub use kekule::{kekulize, Kekulized};
pub use parse::{
    classify_error, parse_lenient, parse_strict, ParseError, ParseResult, SmilesReader,
};
pub use token::{tokenize, BondSymbol, Token, TokenKind};
pub use write::{write_ranked, write_smiles};
