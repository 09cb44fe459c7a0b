//! The `coolio` command: per-phase compiler driver, language server entry
//! point and editor asset generator.

pub mod dump;

use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use coolio_core::ast::{program_exprs, ExprKind};
use coolio_core::diagnostics::format_diagnostic;
use coolio_core::interpreter::{run_program, RunConfig, RunResult};
use coolio_core::lexer::TokenKind;
use coolio_core::pipeline::{analyze, Analysis, Stage};
use coolio_core::pretty::quote;

pub mod exit {
    pub const OK: i32 = 0;
    /// Diagnostics or a runtime error.
    pub const FAILURE: i32 = 1;
    /// Bad usage, unreadable input or unwritable output.
    pub const USAGE: i32 = 2;
    pub const ABORT: i32 = 3;
}

#[derive(Parser, Debug)]
#[command(name = "coolio", version, about = "COOL compiler front end, interpreter and language server")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print the token stream, one token per line
    Lex { file: PathBuf },
    /// Print the syntax tree
    Parse { file: PathBuf },
    /// Type-check and print the class map
    Typecheck { file: PathBuf },
    /// Type-check and evaluate; the program reads standard input
    Run {
        file: PathBuf,
        /// Stop with an error after this many evaluation steps
        #[arg(long)]
        fuel: Option<u64>,
    },
    /// Serve the language server protocol on standard input/output
    Lsp,
    /// Write the TextMate grammar and snippet files
    EmitAssets {
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

/// Standard streams of one invocation.
pub struct Io<'a> {
    pub stdin: &'a mut dyn BufRead,
    pub stdout: &'a mut dyn Write,
    pub stderr: &'a mut dyn Write,
}

pub fn run<I, T>(args: I, io: &mut Io<'_>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(io.stderr, "{text}");
                exit::USAGE
            } else {
                let _ = write!(io.stdout, "{text}");
                exit::OK
            };
        }
    };
    execute(cli.command, io)
}

fn read_source(path: &Path, io: &mut Io<'_>) -> Result<String, i32> {
    if path.extension().and_then(|e| e.to_str()) != Some("cl") {
        let _ = writeln!(io.stderr, "warning: {} does not have a .cl extension", path.display());
    }
    let bytes = std::fs::read(path).map_err(|e| {
        let _ = writeln!(io.stderr, "error: cannot read {}: {e}", path.display());
        exit::USAGE
    })?;
    String::from_utf8(bytes).map_err(|_| {
        let _ = writeln!(io.stderr, "error: {} is not valid UTF-8", path.display());
        exit::USAGE
    })
}

/// Prints diagnostics to stderr; returns whether there were any.
fn report(analysis: &Analysis, io: &mut Io<'_>) -> bool {
    for d in &analysis.diagnostics {
        let _ = writeln!(io.stderr, "{}", format_diagnostic(d));
    }
    !analysis.diagnostics.is_empty()
}

fn token_text(kind: &TokenKind, lexeme: &str) -> String {
    match kind {
        TokenKind::StringLiteral(s) => quote(s),
        _ => lexeme.to_string(),
    }
}

fn execute(command: Command, io: &mut Io<'_>) -> i32 {
    match command {
        Command::Lex { file } => {
            let source = match read_source(&file, io) {
                Ok(s) => s,
                Err(code) => return code,
            };
            let analysis = analyze(&source, Stage::Lex);
            for t in analysis.tokens.iter().filter(|t| t.kind != TokenKind::Eof) {
                let _ = writeln!(
                    io.stdout,
                    "{}: {} {}",
                    t.span.line,
                    t.kind.name(),
                    token_text(&t.kind, &t.lexeme)
                );
            }
            if report(&analysis, io) {
                exit::FAILURE
            } else {
                exit::OK
            }
        }
        Command::Parse { file } => {
            let source = match read_source(&file, io) {
                Ok(s) => s,
                Err(code) => return code,
            };
            let analysis = analyze(&source, Stage::Parse);
            if report(&analysis, io) {
                return exit::FAILURE;
            }
            let program = analysis.program.as_ref().expect("parse stage ran");
            let _ = write!(io.stdout, "{}", dump::dump_program(program));
            exit::OK
        }
        Command::Typecheck { file } => {
            let source = match read_source(&file, io) {
                Ok(s) => s,
                Err(code) => return code,
            };
            let analysis = analyze(&source, Stage::Typecheck);
            if report(&analysis, io) {
                return exit::FAILURE;
            }
            let table = analysis.table.as_ref().expect("typecheck stage ran");
            let _ = writeln!(io.stdout, "OK");
            let _ = write!(io.stdout, "{}", dump::dump_class_map(table));
            exit::OK
        }
        Command::Run { file, fuel } => {
            let source = match read_source(&file, io) {
                Ok(s) => s,
                Err(code) => return code,
            };
            let analysis = analyze(&source, Stage::Typecheck);
            if report(&analysis, io) {
                return exit::FAILURE;
            }
            let program = analysis.program.as_ref().expect("parse stage ran");
            let table = analysis.table.as_ref().expect("typecheck stage ran");
            // Only block on stdin when the program can read it.
            let reads_input = program_exprs(program).iter().any(|e| {
                matches!(&e.kind, ExprKind::Dispatch { method, .. } if method.name == "in_string" || method.name == "in_int")
            });
            let mut input = String::new();
            if reads_input {
                let _ = io.stdin.read_to_string(&mut input);
            }
            let config = RunConfig {
                fuel,
                ..RunConfig::default()
            };
            let outcome = run_program(program, table, &input, &config);
            let _ = io.stdout.write_all(outcome.output.as_bytes());
            let _ = io.stdout.flush();
            match outcome.result {
                RunResult::Completed => exit::OK,
                RunResult::Aborted { class } => {
                    let _ = writeln!(io.stderr, "abort called from class {class}");
                    exit::ABORT
                }
                RunResult::Error(d) => {
                    let _ = writeln!(io.stderr, "{}", format_diagnostic(&d));
                    exit::FAILURE
                }
            }
        }
        Command::Lsp => coolio_lsp::serve(&mut *io.stdin, &mut *io.stdout),
        Command::EmitAssets { out } => {
            let written = std::fs::create_dir_all(&out).and_then(|_| coolio_core::assets::emit_assets(&out));
            match written {
                Ok(paths) => {
                    for p in paths {
                        let _ = writeln!(io.stdout, "{}", p.display());
                    }
                    exit::OK
                }
                Err(e) => {
                    let _ = writeln!(io.stderr, "error: cannot write assets to {}: {e}", out.display());
                    exit::USAGE
                }
            }
        }
    }
}
