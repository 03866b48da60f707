//! Molecular graphs, a lenient SMILES reader, a SELFIES codec and the
//! correction pipeline built on them.

pub mod correct;
pub mod corrector;
pub mod diagnostic;
pub mod element;
pub mod graph;
pub mod metrics;
pub mod selfies;
pub mod smiles;

pub use correct::{
    mutate_smiles, mutate_with, smiself_correct, CorrectionReport, MutationKind, SmiSelf,
};
pub use corrector::{run_loop, verify, CorrectionRequest, Corrector, Feedback, LoopResult};
pub use diagnostic::{Diagnostic, ErrorClass, Recovery};
pub use element::{default_table, Element, UnknownElementPolicy, ValenceTable, ValenceTableError};
pub use graph::{Atom, Bond, GraphError, MolecularGraph};
pub use metrics::{Fingerprint, MetricsError, MetricsReport, PatternSet};
pub use selfies::{decode, decode_str, edit_invalid, encode, DecodeTrace, Decoded, SelfiesSymbol};
pub use smiles::{
    canonical_rank, canonical_smiles, classify_error, graphs_equivalent, parse_lenient,
    parse_strict, write_smiles, ParseError, ParseResult, SmilesReader,
};
