//! Corpus-level evaluation metrics. "Undefined" results (empty corpora and
//! the like) are `None`.

mod fingerprint;
mod membership;

pub use fingerprint::{morgan_fingerprint, tanimoto, Fingerprint, DEFAULT_RADIUS, DEFAULT_WIDTH};
pub use membership::{membership, Pattern, PatternSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::element::ValenceTable;
use crate::graph::MolecularGraph;
use crate::smiles::{canonical_smiles, SmilesReader};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("{what}: {left} items vs {right}")]
    LengthMismatch {
        what: &'static str,
        left: usize,
        right: usize,
    },
    #[error("fingerprints differ in (width, radius): {left:?} vs {right:?}")]
    FingerprintMismatch {
        left: (usize, u32),
        right: (usize, u32),
    },
    #[error("{valid_after} valid after correction exceeds {invalid_before} invalid before")]
    CorrectionCounts {
        invalid_before: usize,
        valid_after: usize,
    },
    #[error("pattern line {line}: {reason}")]
    Pattern { line: usize, reason: String },
    #[error("no patterns for class {0:?}")]
    UnknownClass(String),
}

/// Fraction of strings the strict reader accepts.
pub fn validity<S: AsRef<str>>(corpus: &[S], table: &ValenceTable) -> Option<f64> {
    let reader = SmilesReader::new(table);
    let valid = corpus
        .iter()
        .filter(|s| reader.parse_strict(s.as_ref()).is_ok())
        .count();
    fraction(valid, corpus.len())
}

/// Fraction of pairs where both sides are valid and canonically equal.
pub fn exact_match<S: AsRef<str>, T: AsRef<str>>(
    predictions: &[S],
    references: &[T],
    table: &ValenceTable,
) -> Result<Option<f64>, MetricsError> {
    same_length("exact_match", predictions.len(), references.len())?;
    let reader = SmilesReader::new(table);
    let canon = |s: &str| {
        reader
            .parse_strict(s)
            .ok()
            .map(|g| canonical_smiles(&g, table))
    };
    let hits = predictions
        .iter()
        .zip(references)
        .filter(
            |(p, r)| matches!((canon(p.as_ref()), canon(r.as_ref())), (Some(a), Some(b)) if a == b),
        )
        .count();
    Ok(fraction(hits, predictions.len()))
}

/// Character edit distance on the raw strings.
pub fn levenshtein(a: &str, b: &str) -> usize {
    strsim::levenshtein(a, b)
}

/// Mean pairwise Tanimoto distance over default fingerprints.
pub fn diversity(graphs: &[MolecularGraph], table: &ValenceTable) -> Option<f64> {
    if graphs.len() < 2 {
        return None;
    }
    let fps: Vec<Fingerprint> = graphs
        .iter()
        .map(|g| morgan_fingerprint(g, table, DEFAULT_RADIUS, DEFAULT_WIDTH))
        .collect();
    let mut total = 0.0;
    for i in 0..fps.len() {
        for j in i + 1..fps.len() {
            total += 1.0 - tanimoto(&fps[i], &fps[j]).expect("same parameters");
        }
    }
    let pairs = fps.len() * (fps.len() - 1) / 2;
    Some(total / pairs as f64)
}

pub fn correction_rate(
    invalid_before: usize,
    valid_after: usize,
) -> Result<Option<f64>, MetricsError> {
    if valid_after > invalid_before {
        return Err(MetricsError::CorrectionCounts {
            invalid_before,
            valid_after,
        });
    }
    Ok(fraction(valid_after, invalid_before))
}

fn fraction(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

fn same_length(what: &'static str, left: usize, right: usize) -> Result<(), MetricsError> {
    if left == right {
        Ok(())
    } else {
        Err(MetricsError::LengthMismatch { what, left, right })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Counts {
    pub predictions: usize,
    pub valid_predictions: usize,
    pub references: Option<usize>,
    pub invalid_before: Option<usize>,
    pub valid_after: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub validity: Option<f64>,
    pub exact_match: Option<f64>,
    pub mean_levenshtein: Option<f64>,
    pub mean_tanimoto: Option<f64>,
    pub diversity: Option<f64>,
    pub membership: Option<f64>,
    pub correction_rate: Option<f64>,
    pub counts: Counts,
}

/// What a report is computed from. Only `predictions` is required; each
/// optional input enables the metrics that need it.
#[derive(Debug, Clone, Copy)]
pub struct ReportInputs<'a> {
    pub predictions: &'a [String],
    /// Enables exact match, Levenshtein and Tanimoto.
    pub references: Option<&'a [String]>,
    /// The strings before correction, line-aligned with `predictions`.
    pub before: Option<&'a [String]>,
    /// Pattern set and the class to score membership against.
    pub membership: Option<(&'a PatternSet, &'a str)>,
}

impl MetricsReport {
    pub fn compute(
        inputs: ReportInputs<'_>,
        table: &ValenceTable,
    ) -> Result<MetricsReport, MetricsError> {
        let reader = SmilesReader::new(table);
        let preds = inputs.predictions;
        let graphs: Vec<Option<MolecularGraph>> =
            preds.iter().map(|s| reader.parse_strict(s).ok()).collect();
        let valid: Vec<MolecularGraph> = graphs.iter().flatten().cloned().collect();
        let mut report = MetricsReport {
            validity: fraction(valid.len(), preds.len()),
            diversity: diversity(&valid, table),
            counts: Counts {
                predictions: preds.len(),
                valid_predictions: valid.len(),
                ..Counts::default()
            },
            ..MetricsReport::default()
        };

        if let Some(refs) = inputs.references {
            report.exact_match = exact_match(preds, refs, table)?;
            report.counts.references = Some(refs.len());
            let dist: usize = preds.iter().zip(refs).map(|(p, r)| levenshtein(p, r)).sum();
            report.mean_levenshtein = fraction(dist, preds.len());
            let fp =
                |g: &MolecularGraph| morgan_fingerprint(g, table, DEFAULT_RADIUS, DEFAULT_WIDTH);
            let sims: Vec<f64> = graphs
                .iter()
                .zip(refs)
                .filter_map(|(g, r)| Some((g.as_ref()?, reader.parse_strict(r).ok()?)))
                .map(|(g, r)| tanimoto(&fp(g), &fp(&r)).expect("same parameters"))
                .collect();
            report.mean_tanimoto =
                (!sims.is_empty()).then(|| sims.iter().sum::<f64>() / sims.len() as f64);
        }

        if let Some(before) = inputs.before {
            same_length("correction_rate", before.len(), preds.len())?;
            let broken: Vec<usize> = (0..before.len())
                .filter(|&i| reader.parse_strict(&before[i]).is_err())
                .collect();
            let fixed = broken.iter().filter(|&&i| graphs[i].is_some()).count();
            report.correction_rate = correction_rate(broken.len(), fixed)?;
            report.counts.invalid_before = Some(broken.len());
            report.counts.valid_after = Some(fixed);
        }

        if let Some((set, class)) = inputs.membership {
            if !set.has_class(class) {
                return Err(MetricsError::UnknownClass(class.to_string()));
            }
            let members = valid
                .iter()
                .filter(|g| set.matches(class, g, table))
                .count();
            report.membership = fraction(members, preds.len());
        }
        Ok(report)
    }
}
