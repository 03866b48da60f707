//! Verify-and-retry correction loop over pluggable backends.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::correct::SmiSelf;
use crate::diagnostic::{first_error, ErrorClass};
use crate::element::ValenceTable;
use crate::selfies::decode_str;
use crate::smiles::{canonical_smiles, SmilesReader};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Feedback {
    pub valid: bool,
    pub error_class: ErrorClass,
    pub message: String,
}

/// Strict-parser verdict on a candidate.
pub fn verify(candidate: &str, table: &ValenceTable) -> Feedback {
    let parsed = SmilesReader::new(table).parse_lenient(candidate);
    match first_error(&parsed.diagnostics) {
        None => Feedback {
            valid: true,
            error_class: ErrorClass::Valid,
            message: String::new(),
        },
        Some(d) => Feedback {
            valid: false,
            error_class: d.class,
            message: d.to_string(),
        },
    }
}

pub const DEFAULT_TEMPLATE: &str =
    "Description: {description}\nInvalid SMILES: {smiles}\nError: {error_class}: {message}\nCorrected SMILES:";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrectionRequest {
    pub description: String,
    pub initial_candidate: String,
    /// Placeholders: `{description}`, `{smiles}`, `{attempt}`, `{error_class}`, `{message}`.
    pub prompt_template: String,
    pub max_iterations: usize,
}

impl CorrectionRequest {
    pub fn new(
        description: impl Into<String>,
        initial_candidate: impl Into<String>,
        max_iterations: usize,
    ) -> Self {
        CorrectionRequest {
            description: description.into(),
            initial_candidate: initial_candidate.into(),
            prompt_template: DEFAULT_TEMPLATE.to_string(),
            max_iterations,
        }
    }

    pub fn render(&self, candidate: &str, attempt: usize, feedback: &Feedback) -> String {
        self.prompt_template
            .replace("{description}", &self.description)
            .replace("{smiles}", candidate)
            .replace("{attempt}", &attempt.to_string())
            .replace("{error_class}", feedback.error_class.name())
            .replace("{message}", &feedback.message)
    }
}

/// Everything a backend may look at when proposing the next candidate.
#[derive(Debug, Clone, Copy)]
pub struct Attempt<'a> {
    pub description: &'a str,
    pub candidate: &'a str,
    /// 1-based.
    pub attempt: usize,
    pub feedback: &'a Feedback,
    pub prompt: &'a str,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BackendError {
    #[error("backend process failed: {0}")]
    Process(String),
    #[error("backend timed out after {0:?}")]
    Timeout(Duration),
    #[error("backend response is not valid JSON: {0}")]
    BadResponse(String),
    #[error("{0}")]
    Other(String),
}

pub trait Corrector {
    fn propose(&mut self, attempt: &Attempt<'_>) -> Result<String, BackendError>;
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistoryEntry {
    /// The proposal, or `""` when the backend failed.
    pub candidate: String,
    pub feedback: Feedback,
    pub backend_error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoopResult {
    pub final_candidate: String,
    pub iterations_used: usize,
    pub succeeded: bool,
    pub history: Vec<HistoryEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LoopError {
    #[error("max_iterations must be at least 1")]
    NoIterations,
}

/// Proposes and verifies up to `max_iterations` times, stopping at the first
/// valid candidate. A backend failure is a failed attempt; the next attempt
/// starts again from the last real candidate. An initial candidate that is
/// already valid is returned without calling the backend.
pub fn run_loop(
    request: &CorrectionRequest,
    backend: &mut dyn Corrector,
    table: &ValenceTable,
) -> Result<LoopResult, LoopError> {
    if request.max_iterations == 0 {
        return Err(LoopError::NoIterations);
    }
    let mut current = request.initial_candidate.clone();
    let mut feedback = verify(&current, table);
    let mut history = Vec::new();
    if !feedback.valid {
        for attempt in 1..=request.max_iterations {
            let prompt = request.render(&current, attempt, &feedback);
            let proposal = backend.propose(&Attempt {
                description: &request.description,
                candidate: &current,
                attempt,
                feedback: &feedback,
                prompt: &prompt,
            });
            match proposal {
                Ok(candidate) => {
                    let fb = verify(&candidate, table);
                    history.push(HistoryEntry {
                        candidate: candidate.clone(),
                        feedback: fb.clone(),
                        backend_error: None,
                    });
                    current = candidate;
                    feedback = fb;
                    if feedback.valid {
                        break;
                    }
                }
                Err(e) => history.push(HistoryEntry {
                    candidate: String::new(),
                    feedback: Feedback {
                        valid: false,
                        error_class: ErrorClass::SyntaxError,
                        message: e.to_string(),
                    },
                    backend_error: Some(e.to_string()),
                }),
            }
        }
    }
    Ok(LoopResult {
        final_candidate: current,
        iterations_used: history.len(),
        succeeded: feedback.valid,
        history,
    })
}

/// The SmiSelf pipeline as a backend.
#[derive(Debug, Clone, Copy)]
pub struct SmiSelfBackend<'t> {
    table: &'t ValenceTable,
}

impl<'t> SmiSelfBackend<'t> {
    pub fn new(table: &'t ValenceTable) -> Self {
        SmiSelfBackend { table }
    }
}

impl Corrector for SmiSelfBackend<'_> {
    fn propose(&mut self, attempt: &Attempt<'_>) -> Result<String, BackendError> {
        Ok(SmiSelf::new(self.table).correct(attempt.candidate).output)
    }
}

/// Reads the candidate as SELFIES, dropping anything outside the alphabet,
/// and decodes it.
#[derive(Debug, Clone, Copy)]
pub struct SelfiesEditBackend<'t> {
    table: &'t ValenceTable,
}

impl<'t> SelfiesEditBackend<'t> {
    pub fn new(table: &'t ValenceTable) -> Self {
        SelfiesEditBackend { table }
    }
}

impl Corrector for SelfiesEditBackend<'_> {
    fn propose(&mut self, attempt: &Attempt<'_>) -> Result<String, BackendError> {
        let graph = decode_str(attempt.candidate, self.table).graph;
        Ok(canonical_smiles(&graph, self.table))
    }
}

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(60);

#[derive(Serialize)]
struct WireRequest<'a> {
    description: &'a str,
    invalid_smiles: &'a str,
    attempt: usize,
    error_class: &'a str,
    message: &'a str,
}

#[derive(Deserialize)]
struct WireResponse {
    smiles: String,
}

struct Running {
    child: Child,
    stdin: ChildStdin,
    lines: Receiver<std::io::Result<String>>,
}

impl Drop for Running {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

/// A long-lived child process speaking one JSON object per line: requests
/// on its stdin, `{"smiles": ...}` responses on its stdout.
///
/// Clones share a gate. Unless the backend is declared concurrent-safe,
/// only one request is in flight across all clones at a time; each clone
/// runs its own child.
pub struct ExternalProcess {
    program: String,
    args: Vec<String>,
    timeout: Duration,
    concurrent: bool,
    gate: Arc<Mutex<()>>,
    running: Option<Running>,
}

impl Clone for ExternalProcess {
    fn clone(&self) -> Self {
        ExternalProcess {
            program: self.program.clone(),
            args: self.args.clone(),
            timeout: self.timeout,
            concurrent: self.concurrent,
            gate: Arc::clone(&self.gate),
            running: None,
        }
    }
}

impl std::fmt::Debug for ExternalProcess {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ExternalProcess")
            .field("program", &self.program)
            .field("args", &self.args)
            .field("timeout", &self.timeout)
            .field("concurrent", &self.concurrent)
            .finish()
    }
}

impl ExternalProcess {
    pub fn new(program: impl Into<String>, args: Vec<String>) -> Self {
        ExternalProcess {
            program: program.into(),
            args,
            timeout: DEFAULT_TIMEOUT,
            concurrent: false,
            gate: Arc::new(Mutex::new(())),
            running: None,
        }
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }

    pub fn concurrent_safe(mut self, yes: bool) -> Self {
        self.concurrent = yes;
        self
    }

    pub fn is_concurrent_safe(&self) -> bool {
        self.concurrent
    }

    fn spawn(&self) -> Result<Running, BackendError> {
        let mut child = Command::new(&self.program)
            .args(&self.args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| BackendError::Process(format!("{}: {e}", self.program)))?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = child.stdout.take().expect("piped stdout");
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        Ok(Running {
            child,
            stdin,
            lines: rx,
        })
    }

    fn exchange(&mut self, request: &str) -> Result<String, BackendError> {
        if self.running.is_none() {
            self.running = Some(self.spawn()?);
        }
        let run = self.running.as_mut().unwrap();
        writeln!(run.stdin, "{request}")
            .and_then(|_| run.stdin.flush())
            .map_err(|e| BackendError::Process(e.to_string()))?;
        match run.lines.recv_timeout(self.timeout) {
            Ok(Ok(line)) => Ok(line),
            Ok(Err(e)) => Err(BackendError::Process(e.to_string())),
            Err(RecvTimeoutError::Timeout) => Err(BackendError::Timeout(self.timeout)),
            Err(RecvTimeoutError::Disconnected) => {
                Err(BackendError::Process("end of output".into()))
            }
        }
    }
}

impl Corrector for ExternalProcess {
    fn propose(&mut self, attempt: &Attempt<'_>) -> Result<String, BackendError> {
        let request = serde_json::to_string(&WireRequest {
            description: attempt.description,
            invalid_smiles: attempt.candidate,
            attempt: attempt.attempt,
            error_class: attempt.feedback.error_class.name(),
            message: &attempt.feedback.message,
        })
        .expect("request serializes");
        let gate = Arc::clone(&self.gate);
        let _serial = (!self.concurrent).then(|| gate.lock().unwrap_or_else(|p| p.into_inner()));
        let outcome = self.exchange(&request).and_then(|line| {
            serde_json::from_str::<WireResponse>(&line)
                .map(|r| r.smiles)
                .map_err(|_| BackendError::BadResponse(line))
        });
        if matches!(
            outcome,
            Err(BackendError::Process(_) | BackendError::Timeout(_))
        ) {
            // A dead or stuck child is replaced on the next attempt.
            self.running = None;
        }
        outcome
    }
}
