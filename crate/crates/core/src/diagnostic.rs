use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Invalid-SMILES categories, named after the messages a reference toolkit
/// prints, plus `Valid`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ErrorClass {
    SyntaxError,
    UnclosedRing,
    ParenthesesError,
    BondAlreadyExists,
    AromaticityError,
    ValenceError,
    Valid,
}

impl ErrorClass {
    pub const ALL: [ErrorClass; 7] = [
        ErrorClass::SyntaxError,
        ErrorClass::UnclosedRing,
        ErrorClass::ParenthesesError,
        ErrorClass::BondAlreadyExists,
        ErrorClass::AromaticityError,
        ErrorClass::ValenceError,
        ErrorClass::Valid,
    ];

    /// Errors that prevent building a graph at all, as opposed to chemistry
    /// errors found on a well-formed graph.
    pub fn is_syntactic(self) -> bool {
        matches!(
            self,
            ErrorClass::SyntaxError
                | ErrorClass::UnclosedRing
                | ErrorClass::ParenthesesError
                | ErrorClass::BondAlreadyExists
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            ErrorClass::SyntaxError => "SyntaxError",
            ErrorClass::UnclosedRing => "UnclosedRing",
            ErrorClass::ParenthesesError => "ParenthesesError",
            ErrorClass::BondAlreadyExists => "BondAlreadyExists",
            ErrorClass::AromaticityError => "AromaticityError",
            ErrorClass::ValenceError => "ValenceError",
            ErrorClass::Valid => "Valid",
        }
    }
}

impl fmt::Display for ErrorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ErrorClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ErrorClass::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown error class `{s}`"))
    }
}

/// What the lenient parser did to get past an error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Recovery {
    SkippedToken,
    ClosedBranchAtEnd,
    DroppedRingBond,
    DroppedBondSymbol,
    DemotedAromatic,
    KeptBonds,
    Nothing,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub class: ErrorClass,
    /// Character offset into the input (the input length for end-of-input errors).
    pub position: usize,
    pub message: String,
    pub recovery: Recovery,
}

impl Diagnostic {
    pub(crate) fn new(
        class: ErrorClass,
        position: usize,
        message: impl Into<String>,
        recovery: Recovery,
    ) -> Diagnostic {
        debug_assert_ne!(class, ErrorClass::Valid);
        Diagnostic {
            class,
            position,
            message: message.into(),
            recovery,
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}: {}", self.class, self.position, self.message)
    }
}

/// First error in the order a strict parser meets them: any syntax error
/// wins over aromaticity and valence problems.
pub fn first_error(diagnostics: &[Diagnostic]) -> Option<&Diagnostic> {
    diagnostics
        .iter()
        .find(|d| d.class.is_syntactic())
        .or_else(|| diagnostics.first())
}
