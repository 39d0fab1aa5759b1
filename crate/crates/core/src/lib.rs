//! Con-Cat: a small concatenative language for teaching programming.
//!
//! A program is a sequence of tokens. The [`Machine`] keeps a stack and an
//! input buffer; each step evaluates the leftmost token. Lists double as
//! quoted programs, so code can be built and inspected as data.
//!
//! Besides the evaluator this crate records execution traces
//! ([`tracer`]) and builds and solves trace puzzles ([`quiz`]).

#![allow(clippy::result_large_err)]

pub mod engine;
pub mod error;
pub mod kernel;
pub mod meta;
pub mod quiz;
pub mod reader;
pub mod stdlib;
pub mod tracer;
pub mod value;

pub use engine::{Action, Definition, Kind, Machine, StepInfo, DEFAULT_STEP_LIMIT};
pub use error::{ErrorKind, EvalError, Pos, ReadError};
pub use kernel::KernelOp;
pub use meta::MetaOp;
pub use quiz::{Hole, Quiz, QuizError, QuizKind, SolutionSet, Verdict};
pub use tracer::{Trace, TraceStep};
pub use value::Value;
