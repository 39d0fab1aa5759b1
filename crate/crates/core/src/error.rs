//! Error sentences.
//!
//! Every message is a complete sentence written for a learner: it names the
//! token involved and what was expected, without mentioning how the runtime
//! is built.

use std::fmt;
use std::path::PathBuf;
use std::sync::Arc;

use thiserror::Error;

/// A place in source text. Lines and columns start at 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
    /// Ordinal of the token within its source text.
    pub index: u32,
    /// File the token was loaded from, if any.
    pub file: Option<Arc<PathBuf>>,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.file {
            Some(file) => write!(f, "{}, line {}, column {}", file.display(), self.line, self.col),
            None => write!(f, "line {}, column {}", self.line, self.col),
        }
    }
}

/// Problems found while splitting source text into tokens.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ReadError {
    #[error("The text starting at line {line}, column {col} is missing its closing double quote.")]
    UnterminatedString { line: u32, col: u32 },
    #[error("The token '{token}' at line {line}, column {col} has a double quote inside it.")]
    StrayQuote { token: String, line: u32, col: u32 },
    #[error("The brackets in '{token}' at line {line}, column {col} must be separated from other characters by spaces.")]
    AttachedBracket { token: String, line: u32, col: u32 },
    #[error("The text at line {line}, column {col} uses the escape '\\{escape}', but only \\\" and \\\\ are allowed.")]
    BadEscape { escape: char, line: u32, col: u32 },
}

/// Why a step could not be carried out.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ErrorKind {
    #[error("The token '{0}' has no meaning yet.")]
    UnknownToken(String),
    #[error("There is no open list to close.")]
    NoOpenList,
    #[error("A list was opened with '[' but never closed.")]
    UnclosedList,
    #[error("The program did not finish within {0} steps.")]
    StepLimit(u64),
    #[error("Cannot copy the top of an empty stack.")]
    EmptyCopy,
    #[error("Cannot discard the top of an empty stack.")]
    EmptyDiscard,
    #[error("The token '{token}' needs {} on the stack, but {}.", count_values(*needed), describe_depth(*found))]
    NotEnough {
        token: String,
        needed: usize,
        found: usize,
    },
    #[error("The token '{token}' needs {expected}, but found {found}.")]
    WrongKind {
        token: String,
        expected: String,
        found: String,
    },
    #[error("Cannot divide by zero.")]
    DivideByZero,
    #[error("Cannot cut an empty list.")]
    EmptyCut,
    #[error("Cannot take the last item of an empty list.")]
    EmptyLast,
    #[error("There is no item at position {index} in a list of {}.", count_items(*len))]
    OutOfRange { index: String, len: usize },
    #[error("The token '{0}' is built in; it has no source to show.")]
    BuiltIn(String),
    #[error("The name '{name}' cannot be defined, because {reason}.")]
    BadName { name: String, reason: &'static str },
    #[error("The file '{0}' could not be read.")]
    FileUnreadable(String),
    #[error("The trace depth cannot be negative.")]
    NegativeDepth,
    #[error(transparent)]
    Read(#[from] ReadError),
}

impl ErrorKind {
    pub(crate) fn wrong_kind(token: &str, expected: &str, found: &crate::Value) -> ErrorKind {
        ErrorKind::WrongKind {
            token: token.to_string(),
            expected: expected.to_string(),
            found: found.render(),
        }
    }
}

fn number_word(n: usize) -> String {
    const WORDS: [&str; 7] = ["no", "one", "two", "three", "four", "five", "six"];
    WORDS.get(n).map(|w| w.to_string()).unwrap_or_else(|| n.to_string())
}

fn count_values(n: usize) -> String {
    match n {
        1 => "one value".to_string(),
        n => format!("{} values", number_word(n)),
    }
}

fn count_items(n: usize) -> String {
    match n {
        1 => "one item".to_string(),
        n => format!("{} items", number_word(n)),
    }
}

fn describe_depth(n: usize) -> String {
    match n {
        0 => "the stack is empty".to_string(),
        1 => "there is only one".to_string(),
        n => format!("there are only {}", number_word(n)),
    }
}

/// A failed evaluation step, located in the program.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalError {
    pub kind: ErrorKind,
    /// Number of the step that failed (the first step is 1).
    pub step: u64,
    /// Text of the token being evaluated.
    pub token: String,
    pub pos: Option<Pos>,
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        if let Some(pos) = &self.pos {
            write!(f, " (at {pos})")?;
        }
        Ok(())
    }
}

impl std::error::Error for EvalError {}
