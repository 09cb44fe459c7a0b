//! Front end and interpreter for the Classroom Object-Oriented Language.

pub mod assets;
pub mod ast;
pub mod diagnostics;
pub mod interpreter;
pub mod lexer;
pub mod parser;
pub mod pipeline;
pub mod pretty;
pub mod semantics;
pub mod span;

pub use diagnostics::{format_diagnostic, sort_diagnostics, Diagnostic, Phase, Severity};
pub use span::SourceSpan;
