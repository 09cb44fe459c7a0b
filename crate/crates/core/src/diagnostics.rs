//! The error model shared by every compiler phase, and the conversion from
//! line numbers to character ranges that editors expect.

use std::fmt;

use crate::span::SourceSpan;

/// Compiler stage that produced a diagnostic. The derived ordering is the
/// pipeline order and is used when sorting.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Phase {
    Lexing,
    Parsing,
    Typechecking,
    Evaluation,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Lexing => "lexing",
            Phase::Parsing => "parsing",
            Phase::Typechecking => "typechecking",
            Phase::Evaluation => "evaluation",
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Reserved for protocol interop; every diagnostic the compiler emits today
/// is an error.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Severity {
    #[default]
    Error,
    Warning,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Diagnostic {
    pub phase: Phase,
    /// 1-based.
    pub line: u32,
    pub message: String,
    pub severity: Severity,
    /// Offending source region, when the phase knows it precisely.
    pub span: Option<SourceSpan>,
}

impl Diagnostic {
    pub fn new(phase: Phase, line: u32, message: impl Into<String>) -> Self {
        Diagnostic {
            phase,
            line: line.max(1),
            message: message.into(),
            severity: Severity::Error,
            span: None,
        }
    }

    pub fn at(phase: Phase, span: SourceSpan, message: impl Into<String>) -> Self {
        Diagnostic {
            span: Some(span),
            ..Diagnostic::new(phase, span.line, message)
        }
    }

    pub fn lexing(span: SourceSpan, message: impl Into<String>) -> Self {
        Diagnostic::at(Phase::Lexing, span, message)
    }

    pub fn parsing(span: SourceSpan, message: impl Into<String>) -> Self {
        Diagnostic::at(Phase::Parsing, span, message)
    }

    pub fn typechecking(span: SourceSpan, message: impl Into<String>) -> Self {
        Diagnostic::at(Phase::Typechecking, span, message)
    }

    fn sort_key(&self) -> (u32, Phase, &str) {
        (self.line, self.phase, self.message.as_str())
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_diagnostic(self))
    }
}

/// Renders `ERROR: <line>: <phase>: <message>` on a single line.
///
/// Backslashes and line breaks in the message are escaped so the output is
/// always one line and distinct diagnostics never render identically.
pub fn format_diagnostic(d: &Diagnostic) -> String {
    let mut message = String::with_capacity(d.message.len());
    for c in d.message.chars() {
        match c {
            '\\' => message.push_str("\\\\"),
            '\n' => message.push_str("\\n"),
            '\r' => message.push_str("\\r"),
            c => message.push(c),
        }
    }
    format!("ERROR: {}: {}: {}", d.line, d.phase, message)
}

/// Sorts by line, then phase order, then message.
pub fn sort_diagnostics(diagnostics: &mut [Diagnostic]) {
    diagnostics.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
}

/// Unit used for the `character` field of a [`LinePosition`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum PositionEncoding {
    #[default]
    Utf16,
    Utf8,
}

/// A position inside a document: `line` is 1-based, `character` is a
/// 0-based count of code units in the chosen encoding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinePosition {
    pub line: u32,
    pub character: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TextRange {
    pub start: LinePosition,
    pub end: LinePosition,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
struct Offsets {
    chars: usize,
    bytes: usize,
    utf16: usize,
}

impl Offsets {
    fn advance(&mut self, c: char) {
        self.chars += 1;
        self.bytes += c.len_utf8();
        self.utf16 += c.len_utf16();
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct LineEntry {
    start: Offsets,
    /// Length of the line's content, excluding `\n` and a preceding `\r`.
    content: Offsets,
}

/// Start offsets of every line in a document.
///
/// A line is a maximal run of characters not containing `\n`, so a document
/// with `n` newlines has `n + 1` lines and a trailing newline produces a
/// final empty line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineIndex {
    lines: Vec<LineEntry>,
    total: Offsets,
}

impl LineIndex {
    pub fn new(text: &str) -> Self {
        let mut lines = Vec::new();
        let mut pos = Offsets::default();
        let mut line_start = pos;
        // Offsets just before a pending '\r', so "\r\n" can be trimmed.
        let mut before_cr: Option<Offsets> = None;
        for c in text.chars() {
            if c == '\n' {
                let content_end = before_cr.unwrap_or(pos);
                lines.push(LineEntry {
                    start: line_start,
                    content: Offsets {
                        chars: content_end.chars - line_start.chars,
                        bytes: content_end.bytes - line_start.bytes,
                        utf16: content_end.utf16 - line_start.utf16,
                    },
                });
                pos.advance(c);
                line_start = pos;
                before_cr = None;
                continue;
            }
            before_cr = if c == '\r' { Some(pos) } else { None };
            pos.advance(c);
        }
        lines.push(LineEntry {
            start: line_start,
            content: Offsets {
                chars: pos.chars - line_start.chars,
                bytes: pos.bytes - line_start.bytes,
                utf16: pos.utf16 - line_start.utf16,
            },
        });
        LineIndex { lines, total: pos }
    }

    pub fn line_count(&self) -> usize {
        self.lines.len()
    }

    /// Character offset at which each line begins.
    pub fn line_starts(&self) -> Vec<usize> {
        self.lines.iter().map(|l| l.start.chars).collect()
    }

    /// UTF-16 offset at which each line begins.
    pub fn line_starts_utf16(&self) -> Vec<usize> {
        self.lines.iter().map(|l| l.start.utf16).collect()
    }

    pub fn len_chars(&self) -> usize {
        self.total.chars
    }

    pub fn len_bytes(&self) -> usize {
        self.total.bytes
    }

    pub fn len_utf16(&self) -> usize {
        self.total.utf16
    }

    /// Byte range of a 1-based line's content, clamped to the last line.
    pub fn line_bytes(&self, line: u32) -> std::ops::Range<usize> {
        let entry = &self.lines[self.clamp(line)];
        entry.start.bytes..entry.start.bytes + entry.content.bytes
    }

    /// Length of a 1-based line's content in the given encoding.
    pub fn line_len(&self, line: u32, encoding: PositionEncoding) -> usize {
        let entry = &self.lines[self.clamp(line)];
        match encoding {
            PositionEncoding::Utf16 => entry.content.utf16,
            PositionEncoding::Utf8 => entry.content.bytes,
        }
    }

    fn clamp(&self, line: u32) -> usize {
        (line.max(1) as usize - 1).min(self.lines.len() - 1)
    }

    /// Full extent of a 1-based line in UTF-16 code units.
    pub fn line_to_range(&self, line: u32) -> TextRange {
        self.line_to_range_in(line, PositionEncoding::Utf16)
    }

    /// Full extent of a 1-based line. Lines past the end of the document
    /// clamp to the last line.
    pub fn line_to_range_in(&self, line: u32, encoding: PositionEncoding) -> TextRange {
        let line = self.clamp(line) as u32 + 1;
        let len = self.line_len(line, encoding) as u32;
        TextRange {
            start: LinePosition { line, character: 0 },
            end: LinePosition {
                line,
                character: len,
            },
        }
    }
}

/// Free-function form of [`LineIndex::new`].
pub fn build_line_index(document: &str) -> LineIndex {
    LineIndex::new(document)
}

/// Free-function form of [`LineIndex::line_to_range`].
pub fn line_to_range(index: &LineIndex, line: u32) -> TextRange {
    index.line_to_range(line)
}
