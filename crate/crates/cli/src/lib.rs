//! The `con-cat` command: an interactive session, a file runner, a trace
//! writer and quiz tools, all over [`concat_core`].

use std::fmt;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};

use concat_core::quiz::{self, Quiz, QuizKind, QuizSheet};
use concat_core::reader::parse_values;
use concat_core::tracer::{self, Trace};
use concat_core::{stdlib, Machine, Value};

/// Where the library tokens come from.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum Library {
    #[default]
    Builtin,
    File(PathBuf),
    None,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SessionConfig {
    pub library: Library,
    pub step_limit: Option<u64>,
    pub depth_limit: Option<u32>,
    pub ascii: bool,
}

impl Default for SessionConfig {
    fn default() -> Self {
        SessionConfig {
            library: Library::Builtin,
            step_limit: Some(concat_core::DEFAULT_STEP_LIMIT),
            depth_limit: None,
            ascii: false,
        }
    }
}

/// A failure reported to the user as a sentence, with the exit status to
/// end on.
#[derive(Debug, PartialEq, Eq)]
pub struct Failure {
    pub message: String,
    pub status: u8,
}

impl Failure {
    pub fn new(message: impl fmt::Display) -> Failure {
        Failure { message: message.to_string(), status: 1 }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::new(format!("Could not write the output: {e}."))
    }
}

pub type Outcome = Result<u8, Failure>;

pub fn build_machine(cfg: &SessionConfig) -> Result<Machine, Failure> {
    let mut m = Machine::new();
    match &cfg.library {
        Library::Builtin => stdlib::load_source(&mut m, stdlib::SOURCE).map_err(Failure::new)?,
        Library::File(path) => stdlib::load_file(&mut m, path).map_err(Failure::new)?,
        Library::None => {}
    }
    m.step_limit = cfg.step_limit;
    m.depth_limit = cfg.depth_limit;
    Ok(m)
}

pub fn version_line() -> String {
    format!(
        "con-cat {} {}-{}",
        env!("CARGO_PKG_VERSION"),
        std::env::consts::ARCH,
        std::env::consts::OS
    )
}

/// The stack one value per line, `0:` being the top and the index growing
/// with depth. The deepest value is printed first.
pub fn stack_lines(stack: &[Value]) -> Vec<String> {
    if stack.is_empty() {
        return vec!["empty stack".to_string()];
    }
    stack
        .iter()
        .enumerate()
        .map(|(i, v)| format!("{}: {v}", stack.len() - 1 - i))
        .collect()
}

fn print_state(m: &Machine, out: &mut impl Write) -> io::Result<()> {
    for line in stack_lines(m.stack()) {
        writeln!(out, "{line}")?;
    }
    if m.open_depth() > 0 {
        let (open, _) = m.render_stack("");
        writeln!(out, "open: {open}")?;
    }
    Ok(())
}

/// An interactive session reading lines from `input`. Ends with status 0 on
/// `.quit` or end of input.
pub fn repl(
    mut m: Machine,
    input: impl BufRead,
    out: &mut impl Write,
    prompt: bool,
) -> Outcome {
    writeln!(out, "{}", version_line())?;
    for line in m.language_banner() {
        writeln!(out, "{line}")?;
    }
    writeln!(out)?;
    print_state(&m, out)?;
    let mut lines = input.lines();
    loop {
        if prompt {
            write!(out, "> ")?;
            out.flush()?;
        }
        let Some(line) = lines.next() else { break };
        let line = line.map_err(|e| Failure::new(format!("Could not read the input: {e}.")))?;
        let result = m.eval(&line);
        for text in m.take_output() {
            writeln!(out, "{text}")?;
        }
        if let Err(err) = result {
            m.clear_input();
            writeln!(out, "{}", err.kind)?;
        }
        if m.quit_requested() {
            break;
        }
        writeln!(out)?;
        print_state(&m, out)?;
    }
    Ok(0)
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|_| Failure::new(format!("The file '{}' could not be read.", path.display())))
}

/// Runs a program file and prints the final stack.
pub fn run_file(mut m: Machine, path: &Path, out: &mut impl Write) -> Outcome {
    let source = read(path)?;
    m.push_source(&source).map_err(Failure::new)?;
    let result = m.run();
    for text in m.take_output() {
        writeln!(out, "{text}")?;
    }
    result.map_err(Failure::new)?;
    m.ensure_closed().map_err(Failure::new)?;
    for line in stack_lines(m.stack()) {
        writeln!(out, "{line}")?;
    }
    Ok(0)
}

pub enum TraceSource {
    File(PathBuf),
    Text(String),
}

pub struct TraceRequest {
    pub source: TraceSource,
    pub initial_stack: String,
    /// Where the text trace goes; standard output when `None` for programs
    /// given on the command line.
    pub out: Option<PathBuf>,
    pub typst: Option<PathBuf>,
}

/// `prog.concat` is traced to `prog.trace.txt`.
pub fn default_trace_path(program: &Path) -> PathBuf {
    program.with_extension("trace.txt")
}

pub fn record_trace(m: &Machine, program: &str, initial: &str, cfg: &SessionConfig) -> Result<Trace, Failure> {
    let initial = parse_values(initial).map_err(Failure::new)?;
    let mut t = tracer::record(m, program, &initial, cfg.depth_limit).map_err(Failure::new)?;
    if cfg.ascii {
        t.empty_stack = tracer::EMPTY_STACK_ASCII.to_string();
    }
    Ok(t)
}

/// Writes the trace of a program. Ends with status 1 when the traced
/// program fails; the trace up to the failure is still written.
pub fn trace_cmd(m: &Machine, req: &TraceRequest, cfg: &SessionConfig, out: &mut impl Write) -> Outcome {
    let (program, default_out) = match &req.source {
        TraceSource::File(path) => (read(path)?, Some(default_trace_path(path))),
        TraceSource::Text(text) => (text.clone(), None),
    };
    let t = record_trace(m, &program, &req.initial_stack, cfg)?;
    let text = t.emit_text();
    match req.out.clone().or(default_out) {
        Some(path) => write_file(&path, &text)?,
        None => out.write_all(text.as_bytes())?,
    }
    if let Some(path) = &req.typst {
        write_file(path, &t.emit_typst())?;
    }
    Ok(if t.error().is_some() { 1 } else { 0 })
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text)
        .map_err(|_| Failure::new(format!("The file '{}' could not be written.", path.display())))
}

pub fn load_quiz(path: &Path) -> Result<Quiz, Failure> {
    Quiz::parse(&read(path)?).map_err(Failure::new)
}

/// Checks an answer and prints the verdict. Status 0 means correct.
pub fn quiz_check(m: &Machine, path: &Path, answer: &str, out: &mut impl Write) -> Outcome {
    let q = load_quiz(path)?;
    let verdict = match q.kind {
        QuizKind::Forward => {
            let answer = parse_values(answer).map_err(Failure::new)?;
            quiz::check_forward(m, &q, &answer)
        }
        QuizKind::Inverse => quiz::check_inverse(m, &q, answer),
    }
    .map_err(Failure::new)?;
    writeln!(out, "{}", verdict.sentence())?;
    Ok(if verdict.is_correct() { 0 } else { 1 })
}

/// Prints every solution of an inverse quiz, one program per line.
pub fn quiz_solve(m: &Machine, path: &Path, stats: bool, out: &mut impl Write, err: &mut impl Write) -> Outcome {
    let q = load_quiz(path)?;
    let set = quiz::solve_inverse(m, &q).map_err(Failure::new)?;
    if stats {
        writeln!(err, "tried {} programs in {} steps", set.stats.candidates, set.stats.steps)?;
    }
    if set.programs.is_empty() {
        return Err(Failure::new(quiz::QuizError::NoSolution(q.max_len)));
    }
    for line in set.lines() {
        writeln!(out, "{line}")?;
    }
    Ok(0)
}

/// Prints the question sheet, or the answers when `key` is set.
pub fn quiz_sheet(m: &Machine, path: &Path, key: bool, cfg: &SessionConfig, out: &mut impl Write) -> Outcome {
    let q = load_quiz(path)?;
    let QuizSheet { mut text, answers } = quiz::make_sheet(m, &q).map_err(Failure::new)?;
    if cfg.ascii {
        text = text
            .lines()
            .map(|l| match l.strip_prefix(tracer::EMPTY_STACK) {
                Some(rest) if rest.starts_with(" |") => format!("{}{rest}\n", tracer::EMPTY_STACK_ASCII),
                _ => format!("{l}\n"),
            })
            .collect();
    }
    if key {
        for answer in answers {
            writeln!(out, "{answer}")?;
        }
    } else {
        out.write_all(text.as_bytes())?;
    }
    Ok(0)
}
