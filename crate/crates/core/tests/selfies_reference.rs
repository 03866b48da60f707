//! Differential check against strings decoded by an independent SELFIES
//! implementation (see tests/data/gen_selfies_reference.py).

use smiself::element::default_table;
use smiself::selfies::{
    decode, decode_str, decode_with, edit_invalid, encode, DecodeRules, IgnoreReason, RingOutcome,
    TraceEvent,
};
use smiself::smiles::{graphs_equivalent, parse_strict};

const DATA: &str = include_str!("data/selfies_reference.tsv");

fn rows(kind: &'static str) -> impl Iterator<Item = (&'static str, &'static str)> {
    DATA.lines().skip(1).filter_map(move |l| {
        let mut f = l.split('\t');
        (f.next()? == kind).then(|| (f.next().unwrap(), f.next().unwrap_or("")))
    })
}

/// Rules where the decoder follows the grammar table rather than the
/// reference implementation.
fn uses_table_only_rule(events: &[TraceEvent]) -> bool {
    events.iter().any(|e| {
        matches!(
            e,
            TraceEvent::Ring {
                outcome: RingOutcome::BondExists,
                ..
            } | TraceEvent::Ignored {
                reason: IgnoreReason::BranchStart,
                ..
            } | TraceEvent::DefaultCarbon { .. }
        )
    })
}

#[test]
fn molecules_round_trip() {
    let t = default_table();
    let mut n = 0;
    for (smiles, _) in rows("molecule") {
        let g = parse_strict(smiles).unwrap_or_else(|e| panic!("{smiles}: {e}"));
        let back = decode(&encode(&g, t), t).graph;
        assert!(graphs_equivalent(&g, &back, t), "{smiles}");
        n += 1;
    }
    assert_eq!(n, 1000);
}

#[test]
fn reference_encodings_decode_alike() {
    let t = default_table();
    let mut bad = Vec::new();
    for (selfies, expected) in rows("roundtrip") {
        let ours = decode_str(selfies, t);
        let want = parse_strict(expected).unwrap();
        if !graphs_equivalent(&ours.graph, &want, t) {
            bad.push(selfies);
        }
    }
    assert!(
        bad.is_empty(),
        "{} mismatches, first {:?}",
        bad.len(),
        &bad[..bad.len().min(5)]
    );
}

#[test]
fn random_strings_decode_alike() {
    let t = default_table();
    let (mut same, mut explained, mut bad) = (0, 0, Vec::new());
    for (selfies, expected) in rows("decode") {
        let ours = decode_str(selfies, t);
        let want = if expected.is_empty() {
            smiself::MolecularGraph::new()
        } else {
            parse_strict(expected).unwrap()
        };
        if graphs_equivalent(&ours.graph, &want, t) {
            same += 1;
        } else if uses_table_only_rule(&ours.trace.events) {
            explained += 1;
        } else {
            bad.push((selfies, expected));
        }
    }
    eprintln!("decode rows: {same} identical, {explained} explained divergences");
    assert!(
        bad.is_empty(),
        "{} unexplained, first {:?}",
        bad.len(),
        &bad[..bad.len().min(5)]
    );
}

#[test]
fn reference_rules_match_every_row() {
    let t = default_table();
    let mut bad = Vec::new();
    for kind in ["decode", "roundtrip"] {
        for (selfies, expected) in rows(kind) {
            let ours = decode_with(&edit_invalid(selfies, t), t, DecodeRules::Reference).graph;
            let want = if expected.is_empty() {
                smiself::MolecularGraph::new()
            } else {
                parse_strict(expected).unwrap()
            };
            if !graphs_equivalent(&ours, &want, t) {
                bad.push(selfies);
            }
        }
    }
    assert!(
        bad.is_empty(),
        "{} mismatches, first {:?}",
        bad.len(),
        &bad[..bad.len().min(5)]
    );
}

#[test]
fn our_encodings_decode_alike_in_reference() {
    let t = default_table();
    let mut n = 0;
    for ((smiles, _), (selfies, reference)) in rows("molecule").zip(rows("ours")) {
        let g = parse_strict(smiles).unwrap();
        assert_eq!(
            smiself::selfies::encode_to_string(&g, t),
            selfies,
            "{smiles}"
        );
        let theirs = parse_strict(reference).unwrap();
        assert!(
            graphs_equivalent(&g, &theirs, t),
            "{smiles}: reference decodes {selfies} to {reference}"
        );
        n += 1;
    }
    assert_eq!(n, 1000);
}
