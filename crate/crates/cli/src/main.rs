use std::io::{self, IsTerminal};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use concat_cli::{
    build_machine, quiz_check, quiz_sheet, quiz_solve, repl, run_file, trace_cmd, Failure,
    Library, Outcome, SessionConfig, TraceRequest, TraceSource,
};

/// Con-Cat, a small concatenative language for learning to program.
#[derive(Parser)]
#[command(name = "con-cat", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Args)]
struct Global {
    /// Start without the standard library.
    #[arg(long, global = true, conflicts_with = "stdlib")]
    no_stdlib: bool,
    /// Load the library from this file instead of the built-in one.
    #[arg(long, global = true, env = "CONCAT_STDLIB", value_name = "PATH")]
    stdlib: Option<PathBuf>,
    /// Stop programs after this many steps; 0 means no limit.
    #[arg(long, global = true, env = "CONCAT_STEP_LIMIT", value_name = "N",
          default_value_t = concat_core::DEFAULT_STEP_LIMIT)]
    step_limit: u64,
    /// Hide trace steps from library expansions nested deeper than N.
    #[arg(long, global = true, value_name = "N")]
    depth: Option<u32>,
    /// Draw the empty stack as '#' instead of '□'.
    #[arg(long, global = true)]
    ascii: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Interactive session (the default).
    Repl,
    /// Run a program file and print the final stack.
    Run { file: PathBuf },
    /// Write the step-by-step trace of a program.
    Trace {
        /// Program file; the trace goes next to it as NAME.trace.txt.
        #[arg(required_unless_present = "eval", conflicts_with = "eval")]
        file: Option<PathBuf>,
        /// Trace this program text instead of a file.
        #[arg(long, value_name = "PROG")]
        eval: Option<String>,
        /// Values on the stack before the program starts.
        #[arg(long, value_name = "VALUES", default_value = "")]
        stack: String,
        /// Write the text trace here.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
        /// Also write a Typst table here.
        #[arg(long, value_name = "PATH")]
        typst: Option<PathBuf>,
    },
    /// Check, solve and print trace puzzles.
    #[command(subcommand)]
    Quiz(QuizCommand),
}

#[derive(Subcommand)]
enum QuizCommand {
    /// Check an answer: the resulting stack for a forward quiz, the program
    /// for an inverse one. Exits with 0 when it is correct.
    Check { file: PathBuf, answer: String },
    /// Print every program that solves an inverse quiz.
    Solve {
        file: PathBuf,
        /// Report how many programs were tried.
        #[arg(long)]
        stats: bool,
    },
    /// Print the quiz as a trace with a question mark.
    Sheet {
        file: PathBuf,
        /// Print the answers instead.
        #[arg(long)]
        key: bool,
    },
}

impl Global {
    fn config(&self) -> SessionConfig {
        let library = match (&self.stdlib, self.no_stdlib) {
            (_, true) => Library::None,
            (Some(path), false) => Library::File(path.clone()),
            (None, false) => Library::Builtin,
        };
        SessionConfig {
            library,
            step_limit: (self.step_limit > 0).then_some(self.step_limit),
            depth_limit: self.depth,
            ascii: self.ascii,
        }
    }
}

fn dispatch(cli: Cli) -> Outcome {
    let cfg = cli.global.config();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command.unwrap_or(Command::Repl) {
        Command::Repl => {
            let m = build_machine(&cfg)?;
            let stdin = io::stdin();
            let prompt = stdin.is_terminal();
            repl(m, stdin.lock(), &mut out, prompt)
        }
        Command::Run { file } => run_file(build_machine(&cfg)?, &file, &mut out),
        Command::Trace { file, eval, stack, out: path, typst } => {
            let source = match (file, eval) {
                (Some(file), _) => TraceSource::File(file),
                (None, Some(text)) => TraceSource::Text(text),
                (None, None) => unreachable!("clap requires one of them"),
            };
            let m = build_machine(&cfg)?;
            let req = TraceRequest { source, initial_stack: stack, out: path, typst };
            trace_cmd(&m, &req, &cfg, &mut out)
        }
        Command::Quiz(cmd) => {
            let m = build_machine(&cfg)?;
            match cmd {
                QuizCommand::Check { file, answer } => quiz_check(&m, &file, &answer, &mut out),
                QuizCommand::Solve { file, stats } => {
                    quiz_solve(&m, &file, stats, &mut out, &mut io::stderr())
                }
                QuizCommand::Sheet { file, key } => quiz_sheet(&m, &file, key, &cfg, &mut out),
            }
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(status) => ExitCode::from(status),
        Err(Failure { message, status }) => {
            eprintln!("{message}");
            ExitCode::from(status)
        }
    }
}
