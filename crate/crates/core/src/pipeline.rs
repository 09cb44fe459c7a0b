//! Runs the front-end phases in order and collects their diagnostics.

use crate::ast::Program;
use crate::diagnostics::{sort_diagnostics, Diagnostic};
use crate::lexer::{tokenize, Token};
use crate::parser::parse;
use crate::semantics::{build_class_table, typecheck, ClassTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Lex,
    Parse,
    Typecheck,
}

#[derive(Clone, Debug)]
pub struct Analysis {
    pub tokens: Vec<Token>,
    /// Present once parsing has run.
    pub program: Option<Program>,
    /// Present once semantic analysis has run.
    pub table: Option<ClassTable>,
    /// Diagnostics from every phase that ran, sorted.
    pub diagnostics: Vec<Diagnostic>,
}

impl Analysis {
    pub fn is_ok(&self) -> bool {
        self.diagnostics.is_empty()
    }
}

/// Runs phases up to and including `through`. Parsing proceeds despite
/// lexical errors; semantic analysis runs only on a clean parse, so a later
/// phase's diagnostics always include every earlier phase's.
pub fn analyze(source: &str, through: Stage) -> Analysis {
    let (tokens, mut diagnostics) = tokenize(source);
    let mut analysis = Analysis {
        tokens,
        program: None,
        table: None,
        diagnostics: Vec::new(),
    };
    if through >= Stage::Parse {
        let (mut program, parse_diags) = parse(&analysis.tokens);
        diagnostics.extend(parse_diags);
        if through >= Stage::Typecheck && diagnostics.is_empty() {
            let (table, table_diags) = build_class_table(&program);
            diagnostics.extend(table_diags);
            diagnostics.extend(typecheck(&table, &mut program));
            analysis.table = Some(table);
        }
        analysis.program = Some(program);
    }
    sort_diagnostics(&mut diagnostics);
    analysis.diagnostics = diagnostics;
    analysis
}
