//! SELFIES: symbols, the always-valid decoder and the graph encoder.

pub mod decode;
pub mod encode;
pub mod symbol;

pub use decode::{
    decode, decode_str, decode_with, DecodeRules, DecodeTrace, Decoded, IgnoreReason, RingOutcome,
    TraceEvent,
};
pub use encode::{encode, encode_to_string};
pub use symbol::{
    alphabet, digit_value, edit_invalid, index_symbols, symbols_to_string, tokenize_selfies,
    SelfiesSymbol, SymbolIndexMap, SymbolKind,
};
