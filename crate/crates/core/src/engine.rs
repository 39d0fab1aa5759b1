//! The stack and input-buffer machine.
//!
//! Each step takes the leftmost item of the input buffer and evaluates it.
//! Data pushes itself, `[` opens a list that swallows everything up to the
//! matching `]`, kernel words run built-in code, library words prepend their
//! body to the input, and dot words act on the session itself.

use std::collections::{HashMap, VecDeque};
use std::path::PathBuf;
use std::sync::Arc;

use crate::error::{ErrorKind, EvalError, Pos, ReadError};
use crate::kernel::{Effect, KernelOp};
use crate::meta::MetaOp;
use crate::reader::{self, Token, TokenKind};
use crate::value::{render_seq, Value};

pub const DEFAULT_STEP_LIMIT: u64 = 1_000_000;

/// One element of the input buffer.
#[derive(Clone, Debug, PartialEq)]
pub enum Term {
    Open,
    Close,
    Value(Value),
}

impl Term {
    pub fn render(&self) -> String {
        match self {
            Term::Open => "[".into(),
            Term::Close => "]".into(),
            Term::Value(v) => v.render(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Item {
    pub term: Term,
    pub pos: Option<Pos>,
    /// 0 for user tokens, one more for every library expansion it came from.
    pub depth: u32,
}

impl Item {
    fn from_token(token: Token, depth: u32) -> Item {
        let term = match token.kind {
            TokenKind::Open => Term::Open,
            TokenKind::Close => Term::Close,
            _ => Term::Value(token.value().expect("non-bracket token")),
        };
        Item { term, pos: Some(token.pos), depth }
    }

    fn from_value(value: Value, depth: u32) -> Item {
        Item { term: Term::Value(value), pos: None, depth }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kind {
    Kernel,
    Library,
    Meta,
}

#[derive(Clone, Debug)]
pub enum Behavior {
    Kernel(KernelOp),
    Library(Arc<Vec<Value>>),
    Meta(MetaOp),
}

#[derive(Clone, Debug)]
pub struct Definition {
    pub name: String,
    pub behavior: Behavior,
}

impl Definition {
    pub fn kind(&self) -> Kind {
        match self.behavior {
            Behavior::Kernel(_) => Kind::Kernel,
            Behavior::Library(_) => Kind::Library,
            Behavior::Meta(_) => Kind::Meta,
        }
    }

    /// The body as source text, for library tokens.
    pub fn source_text(&self) -> Option<String> {
        match &self.behavior {
            Behavior::Library(body) => Some(Value::List(body.clone()).render()),
            _ => None,
        }
    }
}

/// What a single step did.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Action {
    Push,
    /// Inserted into an open list instead of being evaluated.
    Swallow,
    Open,
    Close,
    Kernel(KernelOp),
    Expand(String),
    Meta(MetaOp),
}

#[derive(Clone, Debug)]
pub struct StepInfo {
    pub origin: String,
    pub depth: u32,
    pub pos: Option<Pos>,
    pub action: Action,
}

#[derive(Clone, Debug)]
pub struct Machine {
    pub(crate) stack: Vec<Value>,
    /// Lists under construction, outermost first.
    pub(crate) open: Vec<Vec<Value>>,
    pub(crate) input: VecDeque<Item>,
    pub(crate) dict: Arc<HashMap<String, Definition>>,
    step_count: u64,
    pub step_limit: Option<u64>,
    /// Expansion depth shown in traces; `None` shows everything.
    pub depth_limit: Option<u32>,
    pub(crate) output: Vec<String>,
    pub(crate) quit: bool,
}

impl Default for Machine {
    fn default() -> Self {
        Machine::new()
    }
}

impl Machine {
    /// A machine that knows only kernel and meta tokens.
    pub fn new() -> Machine {
        let mut dict = HashMap::new();
        for op in KernelOp::ALL {
            dict.insert(
                op.name().to_string(),
                Definition { name: op.name().to_string(), behavior: Behavior::Kernel(op) },
            );
        }
        for op in MetaOp::ALL {
            dict.insert(
                op.name().to_string(),
                Definition { name: op.name().to_string(), behavior: Behavior::Meta(op) },
            );
        }
        Machine {
            stack: Vec::new(),
            open: Vec::new(),
            input: VecDeque::new(),
            dict: Arc::new(dict),
            step_count: 0,
            step_limit: Some(DEFAULT_STEP_LIMIT),
            depth_limit: None,
            output: Vec::new(),
            quit: false,
        }
    }

    pub fn stack(&self) -> &[Value] {
        &self.stack
    }

    pub fn set_stack(&mut self, values: Vec<Value>) {
        self.stack = values;
    }

    pub fn open_depth(&self) -> usize {
        self.open.len()
    }

    pub fn input(&self) -> impl Iterator<Item = &Item> {
        self.input.iter()
    }

    pub fn input_is_empty(&self) -> bool {
        self.input.is_empty()
    }

    pub fn clear_input(&mut self) {
        self.input.clear();
    }

    /// Abandons any half-built list.
    pub fn clear_open(&mut self) {
        self.open.clear();
    }

    pub fn step_count(&self) -> u64 {
        self.step_count
    }

    pub fn reset_step_count(&mut self) {
        self.step_count = 0;
    }

    pub fn quit_requested(&self) -> bool {
        self.quit
    }

    /// Lines printed by `.src` and `.language` since the last call.
    pub fn take_output(&mut self) -> Vec<String> {
        std::mem::take(&mut self.output)
    }

    pub fn lookup(&self, name: &str) -> Option<&Definition> {
        self.dict.get(name)
    }

    pub fn definitions(&self) -> impl Iterator<Item = &Definition> {
        self.dict.values()
    }

    /// Token names of one kind in byte order.
    pub fn names(&self, kind: Kind) -> Vec<&str> {
        let mut names: Vec<&str> = self
            .dict
            .values()
            .filter(|d| d.kind() == kind)
            .map(|d| d.name.as_str())
            .collect();
        names.sort_unstable();
        names
    }

    /// The categorized token listing printed by `.language` and at startup.
    pub fn language_banner(&self) -> Vec<String> {
        [(Kind::Kernel, "KERNEL"), (Kind::Library, "LIBRARY"), (Kind::Meta, "META/SYSTEM")]
            .into_iter()
            .map(|(kind, label)| format!("{label}   {}", self.names(kind).join("  ")))
            .collect()
    }

    /// Appends source text to the end of the input buffer.
    pub fn push_source(&mut self, source: &str) -> Result<(), ReadError> {
        let tokens = reader::tokenize(source)?;
        self.input.extend(tokens.into_iter().map(|t| Item::from_token(t, 0)));
        Ok(())
    }

    /// Reads and runs `source` after whatever is already queued.
    pub fn eval(&mut self, source: &str) -> Result<(), EvalError> {
        self.push_source(source).map_err(|e| EvalError {
            kind: e.into(),
            step: self.step_count,
            token: String::new(),
            pos: None,
        })?;
        self.run()
    }

    pub(crate) fn prepend_tokens(&mut self, tokens: Vec<Token>, depth: u32) {
        for t in tokens.into_iter().rev() {
            self.input.push_front(Item::from_token(t, depth));
        }
    }

    fn prepend_values(&mut self, values: &[Value], depth: u32) {
        for v in values.iter().rev() {
            self.input.push_front(Item::from_value(v.clone(), depth));
        }
    }

    /// Binds `name` to `body` as a library token, replacing any earlier
    /// meaning including a kernel one.
    pub fn define(&mut self, name: &str, body: Vec<Value>) -> Result<(), ErrorKind> {
        check_name(name)?;
        Arc::make_mut(&mut self.dict).insert(
            name.to_string(),
            Definition { name: name.to_string(), behavior: Behavior::Library(Arc::new(body)) },
        );
        Ok(())
    }

    /// Removes a definition. Returns whether it existed.
    pub fn undefine(&mut self, name: &str) -> bool {
        Arc::make_mut(&mut self.dict).remove(name).is_some()
    }

    /// Evaluates the leftmost input item. Returns `None` when the input is
    /// empty. On error the item is put back and the stack is unchanged by it.
    pub fn step(&mut self) -> Result<Option<StepInfo>, EvalError> {
        if self.input.is_empty() {
            return Ok(None);
        }
        if let Some(limit) = self.step_limit {
            if self.step_count >= limit {
                let item = &self.input[0];
                return Err(EvalError {
                    kind: ErrorKind::StepLimit(limit),
                    step: self.step_count + 1,
                    token: item.term.render(),
                    pos: item.pos.clone(),
                });
            }
        }
        let item = self.input.pop_front().expect("nonempty input");
        match self.dispatch(&item) {
            Ok(action) => {
                self.step_count += 1;
                Ok(Some(StepInfo {
                    origin: item.term.render(),
                    depth: item.depth,
                    pos: item.pos,
                    action,
                }))
            }
            Err(kind) => {
                let err = EvalError {
                    kind,
                    step: self.step_count + 1,
                    token: item.term.render(),
                    pos: item.pos.clone(),
                };
                self.input.push_front(item);
                Err(err)
            }
        }
    }

    fn dispatch(&mut self, item: &Item) -> Result<Action, ErrorKind> {
        match &item.term {
            Term::Open => {
                self.open.push(Vec::new());
                Ok(Action::Open)
            }
            Term::Close => {
                let done = self.open.pop().ok_or(ErrorKind::NoOpenList)?;
                let list = Value::list(done);
                match self.open.last_mut() {
                    Some(parent) => parent.push(list),
                    None => self.stack.push(list),
                }
                Ok(Action::Close)
            }
            Term::Value(v) => {
                if let Some(frame) = self.open.last_mut() {
                    frame.push(v.clone());
                    return Ok(Action::Swallow);
                }
                let Value::Word(word) = v else {
                    self.stack.push(v.clone());
                    return Ok(Action::Push);
                };
                let behavior = self
                    .dict
                    .get(word.as_str())
                    .map(|d| d.behavior.clone())
                    .ok_or_else(|| ErrorKind::UnknownToken(word.clone()))?;
                match behavior {
                    Behavior::Kernel(op) => {
                        if let Effect::Dequote(program) = op.apply(&mut self.stack)? {
                            self.prepend_values(&program, item.depth);
                        }
                        Ok(Action::Kernel(op))
                    }
                    Behavior::Library(body) => {
                        self.prepend_values(&body, item.depth + 1);
                        Ok(Action::Expand(word.clone()))
                    }
                    Behavior::Meta(op) => {
                        op.apply(self, item)?;
                        Ok(Action::Meta(op))
                    }
                }
            }
        }
    }

    /// Steps until the input is empty, `.quit` runs, or an error occurs.
    pub fn run(&mut self) -> Result<(), EvalError> {
        while !self.quit {
            if self.step()?.is_none() {
                break;
            }
        }
        Ok(())
    }

    /// Fails if a list is still open. Used where a program must be complete.
    pub fn ensure_closed(&self) -> Result<(), ErrorKind> {
        if self.open.is_empty() {
            Ok(())
        } else {
            Err(ErrorKind::UnclosedList)
        }
    }

    /// Stack as one line, bottom first. Open lists are drawn unclosed with
    /// `->` where the next item lands. Returns the byte offset of that marker.
    pub fn render_stack(&self, empty: &str) -> (String, Option<usize>) {
        if self.stack.is_empty() && self.open.is_empty() {
            return (empty.to_string(), None);
        }
        let mut out = render_seq(&self.stack);
        for frame in &self.open {
            if !out.is_empty() {
                out.push(' ');
            }
            out.push('[');
            for v in frame {
                out.push(' ');
                out.push_str(&v.render());
            }
        }
        let marker = if self.open.is_empty() {
            None
        } else {
            out.push(' ');
            let at = out.len();
            out.push_str("->");
            Some(at)
        };
        (out, marker)
    }

    pub fn render_input(&self) -> String {
        let mut out = String::new();
        for (i, item) in self.input.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            out.push_str(&item.term.render());
        }
        out
    }

    pub(crate) fn resolve_load_path(&self, path: &str, item: &Item) -> Option<PathBuf> {
        let requested = PathBuf::from(path);
        if requested.is_absolute() {
            return requested.is_file().then_some(requested);
        }
        let from_file = item
            .pos
            .as_ref()
            .and_then(|p| p.file.as_ref())
            .and_then(|f| f.parent().map(|dir| dir.join(&requested)));
        from_file
            .into_iter()
            .chain(std::iter::once(requested))
            .find(|p| p.is_file())
    }
}

fn check_name(name: &str) -> Result<(), ErrorKind> {
    let reason = if name.is_empty() {
        "it is empty"
    } else if name.chars().any(char::is_whitespace) {
        "it contains spaces"
    } else if name.contains('[') || name.contains(']') {
        "square brackets are reserved for building lists"
    } else if name.starts_with('.') {
        "names starting with a dot are reserved for system tokens"
    } else if name.starts_with('#') {
        "it would be read as a comment"
    } else if name.contains('"') {
        "it contains a double quote"
    } else if reader::is_int_literal(name) {
        "it would be read as a number"
    } else if name == "true" || name == "false" {
        "it would be read as a truth value"
    } else {
        return Ok(());
    };
    Err(ErrorKind::BadName { name: name.to_string(), reason })
}
