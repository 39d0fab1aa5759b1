//! Trace puzzles.
//!
//! A quiz shows a trace with one part hidden. In a forward quiz the program
//! is given and the resulting stack is the question; in an inverse quiz the
//! starting and resulting stacks are given and the program is the question.
//! Inverse quizzes are solved by trying every program over a small alphabet,
//! shortest first.
//!
//! Quiz files are line oriented:
//!
//! ```text
//! # find the program
//! kind: inverse
//! stack: 2 3 4
//! target: 14
//! alphabet: + *
//! max-len: 2
//! ```

use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use thiserror::Error;

use crate::engine::Machine;
use crate::error::{EvalError, ReadError};
use crate::reader::{self, TokenKind};
use crate::tracer::{self, Line, Trace};
use crate::value::{render_seq, Value};

/// Steps each candidate program may take before it is given up on.
pub const DEFAULT_STEP_BUDGET: u64 = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuizKind {
    Forward,
    Inverse,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Quiz {
    pub kind: QuizKind,
    pub initial_stack: Vec<Value>,
    /// The program of a forward quiz.
    pub program: Option<String>,
    /// The resulting stack of an inverse quiz.
    pub target: Option<Vec<Value>>,
    pub alphabet: Vec<String>,
    pub max_len: usize,
    /// Leave number, truth value and string literals and brackets out of
    /// the search, so answers must work with the values already there.
    pub no_literals: bool,
    pub step_budget: u64,
}

#[derive(Debug, Error, PartialEq)]
pub enum QuizError {
    #[error("Line {line} of the quiz file: {message}")]
    Syntax { line: usize, message: String },
    #[error("The quiz file has no '{0}:' line.")]
    Missing(&'static str),
    #[error("A forward quiz gives the program, so it cannot also give a target.")]
    ForwardWithTarget,
    #[error("An inverse quiz asks for the program, so it cannot also give one.")]
    InverseWithProgram,
    #[error("This needs a {0} quiz.")]
    WrongKind(&'static str),
    #[error("The alphabet is empty, so there are no programs to try.")]
    EmptyAlphabet,
    #[error("There are too many programs of length {0} to try them all.")]
    TooManyCandidates(usize),
    #[error("No program of at most {0} tokens solves this quiz.")]
    NoSolution(usize),
    #[error("The trace has no step {0}.")]
    NoSuchStep(usize),
    #[error("Step {0} is hidden in this trace, so it cannot hold the question mark.")]
    HiddenStep(usize),
    #[error("The program has {len} tokens, so tokens {start} to {end} cannot be hidden.")]
    SegmentOutOfRange { start: usize, end: usize, len: usize },
    #[error(transparent)]
    Read(#[from] ReadError),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    Correct,
    Incorrect { actual: Vec<Value> },
    /// The answer uses tokens the quiz rules out.
    NotAllowed(String),
    /// The program fails before it produces a stack.
    ProgramFails(EvalError),
}

impl Verdict {
    pub fn is_correct(&self) -> bool {
        matches!(self, Verdict::Correct)
    }

    pub fn sentence(&self) -> String {
        match self {
            Verdict::Correct => "Correct.".to_string(),
            Verdict::Incorrect { actual } => {
                format!("Not quite: the program leaves {}.", describe_stack(actual))
            }
            Verdict::NotAllowed(token) => {
                format!("The token '{token}' is not allowed in this quiz.")
            }
            Verdict::ProgramFails(err) => format!("The program itself fails: {}", err.kind),
        }
    }
}

fn describe_stack(stack: &[Value]) -> String {
    if stack.is_empty() {
        "an empty stack".to_string()
    } else {
        render_seq(stack)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub candidates: u64,
    pub steps: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolutionSet {
    /// Shortest first, then in alphabet order.
    pub programs: Vec<Vec<String>>,
    pub stats: SearchStats,
}

impl SolutionSet {
    pub fn lines(&self) -> Vec<String> {
        self.programs.iter().map(|p| p.join(" ")).collect()
    }
}

impl Quiz {
    pub fn parse(text: &str) -> Result<Quiz, QuizError> {
        let mut kind = None;
        let mut stack = Vec::new();
        let mut program = None;
        let mut target = None;
        let mut alphabet = None;
        let mut max_len = None;
        let mut no_literals = false;
        let mut step_budget = DEFAULT_STEP_BUDGET;

        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let syntax = |message: String| QuizError::Syntax { line, message };
            let Some((key, rest)) = trimmed.split_once(':') else {
                return Err(syntax("expected a 'name: value' line.".into()));
            };
            let rest = rest.trim();
            let values = |rest: &str| {
                reader::parse_values(rest).map_err(|e| syntax(e.to_string()))
            };
            match key.trim() {
                "kind" => {
                    kind = Some(match rest {
                        "forward" => QuizKind::Forward,
                        "inverse" => QuizKind::Inverse,
                        other => {
                            return Err(syntax(format!(
                                "the kind must be 'forward' or 'inverse', not '{other}'."
                            )))
                        }
                    })
                }
                "stack" => stack = values(rest)?,
                "target" => target = Some(values(rest)?),
                "program" => {
                    reader::tokenize(rest).map_err(|e| syntax(e.to_string()))?;
                    program = Some(rest.to_string());
                }
                "alphabet" => {
                    let tokens = reader::tokenize(rest).map_err(|e| syntax(e.to_string()))?;
                    let mut names: Vec<String> = Vec::new();
                    for t in tokens {
                        let text = t.text();
                        if !names.contains(&text) {
                            names.push(text);
                        }
                    }
                    alphabet = Some(names);
                }
                "max-len" => {
                    max_len = Some(rest.parse().map_err(|_| {
                        syntax(format!("max-len must be a whole number, not '{rest}'."))
                    })?)
                }
                "budget" => {
                    step_budget = rest.parse().map_err(|_| {
                        syntax(format!("budget must be a whole number, not '{rest}'."))
                    })?
                }
                "constraints" => {
                    for flag in rest.split([',', ' ']).filter(|f| !f.is_empty()) {
                        match flag {
                            "no-literals" => no_literals = true,
                            other => {
                                return Err(syntax(format!("unknown constraint '{other}'.")))
                            }
                        }
                    }
                }
                other => return Err(syntax(format!("unknown field '{other}'."))),
            }
        }

        let kind = kind.ok_or(QuizError::Missing("kind"))?;
        match kind {
            QuizKind::Forward => {
                if program.is_none() {
                    return Err(QuizError::Missing("program"));
                }
                if target.is_some() {
                    return Err(QuizError::ForwardWithTarget);
                }
            }
            QuizKind::Inverse => {
                if target.is_none() {
                    return Err(QuizError::Missing("target"));
                }
                if program.is_some() {
                    return Err(QuizError::InverseWithProgram);
                }
                if alphabet.is_none() {
                    return Err(QuizError::Missing("alphabet"));
                }
                if max_len.is_none() {
                    return Err(QuizError::Missing("max-len"));
                }
            }
        }
        Ok(Quiz {
            kind,
            initial_stack: stack,
            program,
            target,
            alphabet: alphabet.unwrap_or_default(),
            max_len: max_len.unwrap_or(0),
            no_literals,
            step_budget,
        })
    }

    /// Alphabet tokens that take part in the search.
    pub fn search_alphabet(&self) -> Vec<String> {
        self.alphabet
            .iter()
            .filter(|t| !(self.no_literals && is_literal(t)))
            .cloned()
            .collect()
    }
}

/// Whether a token is a data literal or a bracket.
pub fn is_literal(token: &str) -> bool {
    match reader::tokenize(token) {
        Ok(tokens) => tokens.iter().any(|t| !matches!(t.kind, TokenKind::Word(_))),
        Err(_) => true,
    }
}

/// Runs `program` on a copy of `base` starting from `stack`. Returns the
/// final stack, the number of steps taken, or the error.
fn run_candidate(
    base: &Machine,
    stack: &[Value],
    program: &str,
    budget: Option<u64>,
) -> (Result<Vec<Value>, EvalError>, u64) {
    let mut m = base.clone();
    m.clear_input();
    m.clear_open();
    m.set_stack(stack.to_vec());
    m.reset_step_count();
    m.step_limit = budget;
    let result = m.eval(program).and_then(|()| {
        m.ensure_closed().map_err(|kind| EvalError {
            kind,
            step: m.step_count(),
            token: String::new(),
            pos: None,
        })
    });
    (result.map(|()| m.stack().to_vec()), m.step_count())
}

/// Runs the program of a forward quiz and compares its result with `answer`.
pub fn check_forward(base: &Machine, q: &Quiz, answer: &[Value]) -> Result<Verdict, QuizError> {
    let (QuizKind::Forward, Some(program)) = (q.kind, &q.program) else {
        return Err(QuizError::WrongKind("forward"));
    };
    let (result, _) = run_candidate(base, &q.initial_stack, program, base.step_limit);
    Ok(match result {
        Err(err) => Verdict::ProgramFails(err),
        Ok(stack) if stack == answer => Verdict::Correct,
        Ok(actual) => Verdict::Incorrect { actual },
    })
}

/// Runs a proposed program for an inverse quiz and compares its result with
/// the target.
pub fn check_inverse(base: &Machine, q: &Quiz, answer: &str) -> Result<Verdict, QuizError> {
    let (QuizKind::Inverse, Some(target)) = (q.kind, &q.target) else {
        return Err(QuizError::WrongKind("inverse"));
    };
    let tokens = reader::tokenize(answer)?;
    if q.no_literals {
        if let Some(t) = tokens.iter().find(|t| !matches!(t.kind, TokenKind::Word(_))) {
            return Ok(Verdict::NotAllowed(t.text()));
        }
    }
    let (result, _) = run_candidate(base, &q.initial_stack, answer, Some(q.step_budget));
    Ok(match result {
        Err(err) => Verdict::ProgramFails(err),
        Ok(stack) if &stack == target => Verdict::Correct,
        Ok(actual) => Verdict::Incorrect { actual },
    })
}

/// Every program over the quiz alphabet of at most `max_len` tokens that
/// turns the starting stack into the target without an error.
pub fn solve_inverse(base: &Machine, q: &Quiz) -> Result<SolutionSet, QuizError> {
    let (QuizKind::Inverse, Some(target)) = (q.kind, &q.target) else {
        return Err(QuizError::WrongKind("inverse"));
    };
    let alphabet = q.search_alphabet();
    if alphabet.is_empty() {
        return Err(QuizError::EmptyAlphabet);
    }
    let steps = AtomicU64::new(0);
    let mut stats = SearchStats::default();
    let mut programs = Vec::new();
    for len in 0..=q.max_len {
        let count = u32::try_from(len)
            .ok()
            .and_then(|l| alphabet.len().checked_pow(l))
            .ok_or(QuizError::TooManyCandidates(len))?;
        let found: Vec<Vec<String>> = (0..count)
            .into_par_iter()
            .filter_map(|n| {
                let candidate = nth_program(&alphabet, len, n);
                let (result, used) = run_candidate(
                    base,
                    &q.initial_stack,
                    &candidate.join(" "),
                    Some(q.step_budget),
                );
                steps.fetch_add(used, Ordering::Relaxed);
                matches!(result, Ok(stack) if &stack == target).then_some(candidate)
            })
            .collect();
        stats.candidates += count as u64;
        programs.extend(found);
    }
    stats.steps = steps.into_inner();
    Ok(SolutionSet { programs, stats })
}

/// The `n`th program of length `len`, counting in alphabet order with the
/// first token most significant.
fn nth_program(alphabet: &[String], len: usize, mut n: usize) -> Vec<String> {
    let mut tokens = vec![String::new(); len];
    for slot in tokens.iter_mut().rev() {
        *slot = alphabet[n % alphabet.len()].clone();
        n /= alphabet.len();
    }
    tokens
}

/// The part of a trace replaced by a question mark.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Hole {
    /// The stack drawn at step `k`.
    Stack(usize),
    /// Program tokens `start..start + len`, wherever they are still in the
    /// input.
    Program { start: usize, len: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HoleSheet {
    pub text: String,
    /// What the question mark stands for.
    pub key: String,
}

/// Draws `t` as text with the `hole` region replaced by `?`.
pub fn make_hole_trace(t: &Trace, hole: &Hole) -> Result<HoleSheet, QuizError> {
    let program_len = t.steps[0]
        .snapshot
        .as_ref()
        .map_or(0, |s| s.input.iter().filter(|c| c.source_index.is_some()).count());
    let key = match *hole {
        Hole::Stack(k) => {
            let step = t.steps.get(k).ok_or(QuizError::NoSuchStep(k))?;
            let snapshot = step.snapshot.as_ref().ok_or(QuizError::HiddenStep(k))?;
            if step.error.is_some() {
                return Err(QuizError::HiddenStep(k));
            }
            t.stack_text(snapshot).to_string()
        }
        Hole::Program { start, len } => {
            let end = start + len;
            if len == 0 || end > program_len {
                return Err(QuizError::SegmentOutOfRange { start, end, len: program_len });
            }
            let first = t.steps[0].snapshot.as_ref().expect("initial state is drawn");
            tracer::join_cells(
                first
                    .input
                    .iter()
                    .filter(|c| c.source_index.is_some_and(|i| (start..end).contains(&(i as usize))))
                    .map(|c| c.text.as_str()),
            )
        }
    };

    let mut text = String::new();
    for line in t.lines() {
        let drawn = match line {
            Line::State { step, snapshot } => {
                let stack = match hole {
                    Hole::Stack(k) if *k == step => "?",
                    _ => t.stack_text(snapshot),
                };
                let input = tracer::join_cells(snapshot.input.iter().map(|c| match hole {
                    Hole::Program { start, len }
                        if c.source_index.is_some_and(|i| {
                            (*start..start + len).contains(&(i as usize))
                        }) =>
                    {
                        "?"
                    }
                    _ => c.text.as_str(),
                }));
                tracer::state_line(stack, &input)
            }
            Line::Dots => "...".to_string(),
            Line::Error(err) => tracer::error_line(err),
        };
        text.push_str(&drawn);
        text.push('\n');
    }
    Ok(HoleSheet { text, key })
}

/// A printable quiz: the hole trace and every accepted answer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuizSheet {
    pub text: String,
    pub answers: Vec<String>,
}

/// Builds the sheet for a quiz. Only the first and last states are drawn, so
/// the steps in between do not give the answer away.
pub fn make_sheet(base: &Machine, q: &Quiz) -> Result<QuizSheet, QuizError> {
    let (program, answers, hole_of) = match q.kind {
        QuizKind::Forward => {
            let program = q.program.clone().ok_or(QuizError::Missing("program"))?;
            (program, None, None)
        }
        QuizKind::Inverse => {
            let solutions = solve_inverse(base, q)?.lines();
            let first = solutions.first().cloned().ok_or(QuizError::NoSolution(q.max_len))?;
            let len = reader::tokenize(&first)?.len();
            (first, Some(solutions), Some(len))
        }
    };
    let mut t = tracer::record(base, &program, &q.initial_stack, Some(0))?;
    let last = t.steps.len() - 1;
    for step in &mut t.steps[1..last.max(1)] {
        step.snapshot = None;
    }
    let hole = match hole_of {
        Some(len) if len > 0 => Hole::Program { start: 0, len },
        _ => Hole::Stack(last),
    };
    let sheet = make_hole_trace(&t, &hole)?;
    Ok(QuizSheet { text: sheet.text, answers: answers.unwrap_or_else(|| vec![sheet.key]) })
}
