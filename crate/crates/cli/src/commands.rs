use std::fs;
use std::io::{self, BufWriter, Read, Write};
use std::path::Path;
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use smiself::corrector::{ExternalProcess, SelfiesEditBackend, SmiSelfBackend};
use smiself::metrics::ReportInputs;
use smiself::selfies::{edit_invalid, symbols_to_string};
use smiself::{
    canonical_smiles, decode, default_table, encode, mutate_smiles, mutate_with, run_loop,
    CorrectionRequest, Corrector, ErrorClass, MetricsReport, MutationKind, PatternSet, SmiSelf,
    SmilesReader, ValenceTable,
};

use crate::{Backend, Cli, Cmd, Format, Kind, LoopArgs, MetricsArgs, SelfiesMode};

/// One output line: the TSV fields and the JSON object for the same record.
struct Record {
    tsv: Vec<String>,
    json: serde_json::Value,
    sentinel: bool,
}

pub fn run(cli: &Cli) -> Result<ExitCode> {
    let g = &cli.global;
    if let Some(jobs) = g.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs as usize)
            .build_global()
            .context("starting worker pool")?;
    }
    let owned;
    let table: &ValenceTable = match &g.valence_table {
        Some(path) => {
            owned = ValenceTable::parse_overrides(&read_text(path)?)
                .with_context(|| format!("valence table {}", path.display()))?;
            &owned
        }
        None => default_table(),
    };

    let input = match &g.input {
        Some(path) => read_text(path)?,
        None => {
            let mut buf = Vec::new();
            io::stdin()
                .read_to_end(&mut buf)
                .context("reading standard input")?;
            String::from_utf8_lossy(&buf).into_owned()
        }
    };
    let lines: Vec<&str> = input.lines().collect();

    let mut out: Box<dyn Write> = match &g.output {
        Some(path) => Box::new(BufWriter::new(
            fs::File::create(path).with_context(|| format!("creating {}", path.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };

    let records = match &cli.command {
        Cmd::Correct => lines
            .par_iter()
            .map(|l| correct(l, table, g.verbose))
            .collect(),
        Cmd::Classify => {
            let records: Vec<(Record, ErrorClass)> = lines
                .par_iter()
                .map(|l| classify(l, table, g.verbose))
                .collect();
            let mut counts = [0usize; ErrorClass::ALL.len()];
            for (_, c) in &records {
                counts[ErrorClass::ALL.iter().position(|x| x == c).unwrap()] += 1;
            }
            write_records(&mut out, g.format, records.iter().map(|(r, _)| r))?;
            let total = lines.len();
            let classes: serde_json::Map<String, serde_json::Value> = ErrorClass::ALL
                .iter()
                .zip(counts)
                .map(|(c, n)| {
                    let frac = (total > 0).then(|| n as f64 / total as f64);
                    (
                        c.name().to_string(),
                        json!({ "count": n, "fraction": frac }),
                    )
                })
                .collect();
            writeln!(
                out,
                "{}",
                json!({ "summary": { "total": total, "classes": classes } })
            )?;
            out.flush()?;
            return Ok(ExitCode::SUCCESS);
        }
        Cmd::Metrics(args) => {
            let report = metrics(&lines, args, g.patterns.as_deref(), table)?;
            writeln!(out, "{}", serde_json::to_string(&report)?)?;
            out.flush()?;
            return Ok(ExitCode::SUCCESS);
        }
        Cmd::Selfies { mode } => lines.par_iter().map(|l| selfies(l, *mode, table)).collect(),
        Cmd::Mutate { kind } => {
            let kinds: Vec<MutationKind> = kind.iter().map(|k| mutation_kind(*k)).collect();
            lines
                .par_iter()
                .enumerate()
                .map(|(i, l)| mutate(l, &kinds, g.seed.wrapping_add(i as u64)))
                .collect()
        }
        Cmd::Loop(args) => correction_loop(&lines, args, table)?,
    };
    let records: Vec<Record> = records;
    write_records(&mut out, g.format, records.iter())?;
    out.flush()?;
    Ok(if records.iter().any(|r| r.sentinel) {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

fn read_text(path: &Path) -> Result<String> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(String::from_utf8_lossy(&bytes).into_owned())
}

fn read_lines(path: &Path) -> Result<Vec<String>> {
    Ok(read_text(path)?.lines().map(str::to_string).collect())
}

fn write_records<'a>(
    out: &mut dyn Write,
    format: Format,
    records: impl Iterator<Item = &'a Record>,
) -> Result<()> {
    for r in records {
        match format {
            Format::Jsonl => writeln!(out, "{}", r.json)?,
            Format::Tsv => {
                let fields: Vec<String> = r.tsv.iter().map(|f| tsv_escape(f)).collect();
                writeln!(out, "{}", fields.join("\t"))?
            }
        }
    }
    Ok(())
}

fn tsv_escape(field: &str) -> String {
    field.replace('\\', "\\\\").replace('\t', "\\t")
}

#[derive(Serialize)]
struct CorrectJson<'a> {
    input: &'a str,
    output: &'a str,
    was_already_valid: bool,
    changed: bool,
    error_classes: Vec<ErrorClass>,
    #[serde(skip_serializing_if = "<[String]>::is_empty")]
    notes: &'a [String],
    #[serde(skip_serializing_if = "Option::is_none")]
    intermediate_selfies: Option<&'a str>,
}

fn correct(line: &str, table: &ValenceTable, verbose: bool) -> Record {
    let report = SmiSelf::new(table).correct(line);
    let mut classes: Vec<ErrorClass> = Vec::new();
    for d in &report.diagnostics {
        if !classes.contains(&d.class) {
            classes.push(d.class);
        }
    }
    let mut flags = Vec::new();
    if report.was_already_valid {
        flags.push("valid");
    }
    if report.changed {
        flags.push("changed");
    }
    if report.is_sentinel() {
        flags.push("sentinel");
    }
    let names: Vec<&str> = classes.iter().map(|c| c.name()).collect();
    let json = serde_json::to_value(CorrectJson {
        input: line,
        output: &report.output,
        was_already_valid: report.was_already_valid,
        changed: report.changed,
        error_classes: classes.clone(),
        notes: &report.notes,
        intermediate_selfies: if verbose {
            report.intermediate_selfies.as_deref()
        } else {
            None
        },
    })
    .expect("record serializes");
    let mut tsv = vec![
        line.to_string(),
        report.output.clone(),
        flags.join(","),
        names.join(";"),
    ];
    if verbose {
        tsv.push(report.intermediate_selfies.clone().unwrap_or_default());
    }
    Record {
        tsv,
        json,
        sentinel: report.is_sentinel(),
    }
}

fn classify(line: &str, table: &ValenceTable, verbose: bool) -> (Record, ErrorClass) {
    let parsed = SmilesReader::new(table).parse_lenient(line);
    let class = parsed.error_class();
    let mut json = json!({ "input": line, "error_class": class });
    if verbose {
        json["diagnostics"] =
            serde_json::to_value(&parsed.diagnostics).expect("diagnostics serialize");
    }
    let record = Record {
        tsv: vec![line.to_string(), class.name().to_string()],
        json,
        sentinel: false,
    };
    (record, class)
}

fn metrics(
    predictions: &[&str],
    args: &MetricsArgs,
    patterns: Option<&Path>,
    table: &ValenceTable,
) -> Result<MetricsReport> {
    let predictions: Vec<String> = predictions.iter().map(|s| s.to_string()).collect();
    let references = args.references.as_deref().map(read_lines).transpose()?;
    let before = args.before.as_deref().map(read_lines).transpose()?;
    let set = match patterns {
        Some(path) => PatternSet::parse(&read_text(path)?, table)?,
        None => PatternSet::shipped(table),
    };
    if patterns.is_some() && args.class.is_none() {
        bail!("--patterns needs --class to pick the class to score");
    }
    let inputs = ReportInputs {
        predictions: &predictions,
        references: references.as_deref(),
        before: before.as_deref(),
        membership: args.class.as_deref().map(|c| (&set, c)),
    };
    Ok(MetricsReport::compute(inputs, table)?)
}

fn selfies(line: &str, mode: SelfiesMode, table: &ValenceTable) -> Record {
    let (output, sentinel) = match mode {
        SelfiesMode::Encode => {
            let graph = SmilesReader::new(table).parse_lenient(line).graph;
            (symbols_to_string(&encode(&graph, table)), false)
        }
        SelfiesMode::Decode => {
            let graph = decode(&edit_invalid(line, table), table).graph;
            (canonical_smiles(&graph, table), graph.is_empty())
        }
        SelfiesMode::Edit => (symbols_to_string(&edit_invalid(line, table)), false),
    };
    Record {
        json: json!({ "input": line, "output": output }),
        tsv: vec![output],
        sentinel,
    }
}

fn mutation_kind(k: Kind) -> MutationKind {
    match k {
        Kind::ParenInsert => MutationKind::InsertParen,
        Kind::ParenDelete => MutationKind::DeleteParen,
        Kind::RingDelete => MutationKind::DeleteRingDigit,
        Kind::RingDuplicate => MutationKind::DuplicateRingClosure,
        Kind::BondInsert => MutationKind::InsertBond,
        Kind::Garbage => MutationKind::InsertGarbage,
        Kind::CaseFlip => MutationKind::FlipCase,
    }
}

/// With `kinds` given, the first of them (in seeded order) that applies;
/// the line is left alone if none does.
fn mutate(line: &str, kinds: &[MutationKind], seed: u64) -> Record {
    let output = if kinds.is_empty() {
        mutate_smiles(line, seed)
    } else {
        let start = (seed % kinds.len() as u64) as usize;
        (0..kinds.len())
            .find_map(|i| mutate_with(line, kinds[(start + i) % kinds.len()], seed))
            .unwrap_or_else(|| line.to_string())
    };
    Record {
        json: json!({ "input": line, "output": output }),
        tsv: vec![output],
        sentinel: false,
    }
}

fn correction_loop(lines: &[&str], args: &LoopArgs, table: &ValenceTable) -> Result<Vec<Record>> {
    let external = match args.backend {
        Backend::External => {
            let Some((program, rest)) = args.command.split_first() else {
                bail!("--backend external needs a program after `--`");
            };
            Some(std::sync::Mutex::new(
                ExternalProcess::new(program.clone(), rest.to_vec())
                    .with_timeout(Duration::from_secs(args.timeout))
                    .concurrent_safe(args.concurrent),
            ))
        }
        _ => None,
    };
    let make = || -> Box<dyn Corrector + Send> {
        match (args.backend, &external) {
            (Backend::Smiself, _) => Box::new(SmiSelfBackend::new(table)),
            (Backend::SelfiesEdit, _) => Box::new(SelfiesEditBackend::new(table)),
            (Backend::External, ext) => {
                let template = ext.as_ref().expect("checked above");
                Box::new(template.lock().unwrap_or_else(|p| p.into_inner()).clone())
            }
        }
    };
    Ok(lines
        .par_iter()
        .map_init(make, |backend, line| {
            let (description, smiles) = line.split_once('\t').unwrap_or(("", line));
            let mut request =
                CorrectionRequest::new(description, smiles, args.max_iterations as usize);
            if let Some(t) = &args.template {
                request.prompt_template = t.clone();
            }
            let result =
                run_loop(&request, backend.as_mut(), table).expect("at least one iteration");
            Record {
                tsv: vec![
                    smiles.to_string(),
                    result.final_candidate.clone(),
                    result.succeeded.to_string(),
                    result.iterations_used.to_string(),
                ],
                json: json!({ "input": smiles, "description": description, "result": result }),
                sentinel: !result.succeeded,
            }
        })
        .collect())
}
