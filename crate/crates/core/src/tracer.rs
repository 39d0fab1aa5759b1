//! Execution traces.
//!
//! A trace is the sequence of machine states, one per step, starting with the
//! initial state. Time runs from top to bottom; each line shows the stack on
//! the left (top at the right end) and the remaining input on the right:
//!
//! ```text
//! □ | 1 2 +
//! 1 | 2 +
//! 1 2 | +
//! 3 |
//! ```
//!
//! Steps that come from expanding library tokens deeper than the depth limit
//! are collapsed into a `...` line.

use std::ops::Range;

use crate::engine::{Action, Machine};
use crate::error::{EvalError, ReadError};
use crate::value::Value;

pub const EMPTY_STACK: &str = "□";
pub const EMPTY_STACK_ASCII: &str = "#";

/// One token of the remaining input as drawn in a trace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InputCell {
    pub text: String,
    /// Position of the token in the traced program, for tokens that come
    /// straight from it.
    pub source_index: Option<u32>,
}

/// The drawn state of the machine after a step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Snapshot {
    /// Stack from bottom to top; empty when there is nothing on it.
    pub stack: String,
    /// Byte offset of the `->` insertion marker in `stack`.
    pub marker: Option<usize>,
    pub input: Vec<InputCell>,
}

impl Snapshot {
    fn of(m: &Machine) -> Snapshot {
        let (stack, marker) = m.render_stack("");
        let input = m
            .input()
            .map(|item| InputCell {
                text: item.term.render(),
                source_index: item
                    .pos
                    .as_ref()
                    .filter(|p| p.file.is_none() && item.depth == 0)
                    .map(|p| p.index),
            })
            .collect();
        Snapshot { stack, marker, input }
    }

    pub fn input_render(&self) -> String {
        join_cells(self.input.iter().map(|c| c.text.as_str()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub index: usize,
    /// Text of the token consumed by this step; empty for the initial state.
    pub origin: String,
    pub action: Option<Action>,
    pub expansion_depth: u32,
    /// `None` for steps hidden by the depth limit.
    pub snapshot: Option<Snapshot>,
    /// Set on the final step when the program failed.
    pub error: Option<EvalError>,
}

impl TraceStep {
    pub fn is_visible(&self) -> bool {
        self.snapshot.is_some()
    }
}

/// One printed line of a trace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Line<'a> {
    State { step: usize, snapshot: &'a Snapshot },
    Dots,
    Error(&'a EvalError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub steps: Vec<TraceStep>,
    /// Drawn in place of an empty stack.
    pub empty_stack: String,
}

impl Trace {
    /// Ranges of hidden steps, each drawn as a single `...` line. They never
    /// include the first or the last step.
    pub fn elision_ranges(&self) -> Vec<Range<usize>> {
        let mut ranges = Vec::new();
        let mut start = None;
        for (i, step) in self.steps.iter().enumerate() {
            match (step.is_visible(), start) {
                (false, None) => start = Some(i),
                (true, Some(s)) => {
                    ranges.push(s..i);
                    start = None;
                }
                _ => {}
            }
        }
        ranges
    }

    pub fn error(&self) -> Option<&EvalError> {
        self.steps.last().and_then(|s| s.error.as_ref())
    }

    pub fn lines(&self) -> Vec<Line<'_>> {
        let mut lines = Vec::new();
        for step in &self.steps {
            if let Some(err) = &step.error {
                lines.push(Line::Error(err));
                continue;
            }
            match &step.snapshot {
                Some(snapshot) => lines.push(Line::State { step: step.index, snapshot }),
                None if lines.last() != Some(&Line::Dots) => lines.push(Line::Dots),
                None => {}
            }
        }
        lines
    }

    pub fn stack_text<'a>(&'a self, snapshot: &'a Snapshot) -> &'a str {
        if snapshot.stack.is_empty() {
            &self.empty_stack
        } else {
            &snapshot.stack
        }
    }

    /// Plain text rendering: one `stack | input` line per visible step.
    pub fn emit_text(&self) -> String {
        let mut out = String::new();
        for line in self.lines() {
            out.push_str(&match line {
                Line::State { snapshot, .. } => {
                    state_line(self.stack_text(snapshot), &snapshot.input_render())
                }
                Line::Dots => "...".to_string(),
                Line::Error(err) => error_line(err),
            });
            out.push('\n');
        }
        out
    }

    /// A Typst table with the same cells as [`Trace::emit_text`].
    pub fn emit_typst(&self) -> String {
        let mut out = String::from(
            "#table(\n  columns: 2,\n  align: (right, left),\n  stroke: none,\n",
        );
        for line in self.lines() {
            match line {
                Line::State { snapshot, .. } => {
                    out.push_str(&format!(
                        "  raw({}), raw({}),\n",
                        typst_string(self.stack_text(snapshot)),
                        typst_string(&snapshot.input_render())
                    ));
                }
                Line::Dots => {
                    out.push_str("  table.cell(colspan: 2, align: center)[$dots.v$],\n");
                }
                Line::Error(err) => {
                    out.push_str(&format!(
                        "  table.cell(colspan: 2)[#raw({})],\n",
                        typst_string(&error_line(err))
                    ));
                }
            }
        }
        out.push_str(")\n");
        out
    }
}

pub fn state_line(stack: &str, input: &str) -> String {
    format!("{stack} | {input}")
}

pub fn error_line(err: &EvalError) -> String {
    format!("! {}", err.kind)
}

pub fn join_cells<'a>(cells: impl IntoIterator<Item = &'a str>) -> String {
    cells.into_iter().collect::<Vec<_>>().join(" ")
}

fn typst_string(s: &str) -> String {
    let mut out = String::from("\"");
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Runs `program` on a copy of `base` whose stack is `initial` and records
/// every step. Steps deeper than `depth_limit` are hidden; `.depth` inside
/// the program changes the limit from then on. Evaluation errors end the
/// trace with an error step.
pub fn record(
    base: &Machine,
    program: &str,
    initial: &[Value],
    depth_limit: Option<u32>,
) -> Result<Trace, ReadError> {
    let mut m = base.clone();
    m.clear_input();
    m.clear_open();
    m.set_stack(initial.to_vec());
    m.depth_limit = depth_limit;
    m.reset_step_count();
    m.push_source(program)?;

    let mut steps = vec![TraceStep {
        index: 0,
        origin: String::new(),
        action: None,
        expansion_depth: 0,
        snapshot: Some(Snapshot::of(&m)),
        error: None,
    }];
    while !m.quit_requested() {
        match m.step() {
            Ok(None) => break,
            Ok(Some(info)) => {
                let visible = m.depth_limit.is_none_or(|limit| info.depth <= limit);
                steps.push(TraceStep {
                    index: steps.len(),
                    origin: info.origin,
                    action: Some(info.action),
                    expansion_depth: info.depth,
                    snapshot: visible.then(|| Snapshot::of(&m)),
                    error: None,
                });
            }
            Err(err) => {
                let depth = m.input().next().map_or(0, |item| item.depth);
                steps.push(TraceStep {
                    index: steps.len(),
                    origin: err.token.clone(),
                    action: None,
                    expansion_depth: depth,
                    snapshot: Some(Snapshot::of(&m)),
                    error: Some(err),
                });
                break;
            }
        }
    }
    let last = steps.last_mut().expect("initial step");
    if last.snapshot.is_none() {
        last.snapshot = Some(Snapshot::of(&m));
    }
    Ok(Trace { steps, empty_stack: EMPTY_STACK.to_string() })
}
