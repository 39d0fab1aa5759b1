//! The standard library, shipped as Con-Cat source.

use std::path::Path;

use crate::engine::Machine;
use crate::error::{ErrorKind, EvalError};

/// Source of `resources/stdlib.concat`, built into the binary.
pub const SOURCE: &str = include_str!("../resources/stdlib.concat");

/// Every token the standard library defines.
pub const NAMES: [&str; 44] = [
    "->", "any?", "ddip", "ddrop", "dec", "dip", "drop4", "duco", "even?", "factorial",
    "factorial2", "filter", "first", "fix", "fold", "ifte", "inc", "map", "map2", "odd?", "over",
    "pack", "pair", "quote", "range", "rec-fold", "rec-map", "rec-while", "remove", "rjoin",
    "rjoin-if", "run", "rund", "sifte", "sim", "square", "sum", "tdip", "tdrop", "times", "while",
    "y", "zero?", "|",
];

/// Runs library source on `m` without counting its steps against the
/// program that follows.
pub fn load_source(m: &mut Machine, source: &str) -> Result<(), EvalError> {
    let limit = m.step_limit.take();
    let result = m.eval(source);
    m.step_limit = limit;
    m.reset_step_count();
    result
}

pub fn load_file(m: &mut Machine, path: &Path) -> Result<(), EvalError> {
    let source = std::fs::read_to_string(path).map_err(|_| EvalError {
        kind: ErrorKind::FileUnreadable(path.display().to_string()),
        step: 0,
        token: String::new(),
        pos: None,
    })?;
    load_source(m, &source)
}

impl Machine {
    /// A fresh machine with the built-in standard library loaded.
    pub fn with_stdlib() -> Machine {
        let mut m = Machine::new();
        load_source(&mut m, SOURCE).expect("the built-in library loads");
        m
    }
}
