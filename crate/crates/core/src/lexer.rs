//! Tokenizer for COOL source text.
//!
//! [`tokenize`] is total: malformed input is reported as lexing diagnostics
//! and scanning resumes, so the parser always receives an `Eof`-terminated
//! token stream.

use std::fmt;

use crate::diagnostics::Diagnostic;
use crate::span::SourceSpan;

/// Longest decoded string constant accepted.
pub const MAX_STRING_LEN: usize = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Keyword {
    Class,
    Else,
    False,
    Fi,
    If,
    In,
    Inherits,
    IsVoid,
    Let,
    Loop,
    Pool,
    Then,
    While,
    Case,
    Esac,
    New,
    Of,
    Not,
    True,
}

impl Keyword {
    /// Every keyword, in the order the language reference lists them.
    pub const ALL: [Keyword; 19] = [
        Keyword::Class,
        Keyword::Else,
        Keyword::False,
        Keyword::Fi,
        Keyword::If,
        Keyword::In,
        Keyword::Inherits,
        Keyword::IsVoid,
        Keyword::Let,
        Keyword::Loop,
        Keyword::Pool,
        Keyword::Then,
        Keyword::While,
        Keyword::Case,
        Keyword::Esac,
        Keyword::New,
        Keyword::Of,
        Keyword::Not,
        Keyword::True,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Keyword::Class => "class",
            Keyword::Else => "else",
            Keyword::False => "false",
            Keyword::Fi => "fi",
            Keyword::If => "if",
            Keyword::In => "in",
            Keyword::Inherits => "inherits",
            Keyword::IsVoid => "isvoid",
            Keyword::Let => "let",
            Keyword::Loop => "loop",
            Keyword::Pool => "pool",
            Keyword::Then => "then",
            Keyword::While => "while",
            Keyword::Case => "case",
            Keyword::Esac => "esac",
            Keyword::New => "new",
            Keyword::Of => "of",
            Keyword::Not => "not",
            Keyword::True => "true",
        }
    }

    /// Keywords are case-insensitive, except that `true` and `false` must
    /// start with a lowercase letter.
    pub fn lookup(word: &str) -> Option<Keyword> {
        let lower = word.to_ascii_lowercase();
        let kw = Keyword::ALL.into_iter().find(|k| k.as_str() == lower)?;
        if matches!(kw, Keyword::True | Keyword::False)
            && !word.starts_with(|c: char| c.is_ascii_lowercase())
        {
            return None;
        }
        Some(kw)
    }
}

impl fmt::Display for Keyword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Keyword(Keyword),
    TypeId(String),
    ObjectId(String),
    IntLiteral(i32),
    /// Decoded text, escapes already applied.
    StringLiteral(String),
    Assign,
    At,
    Dot,
    Comma,
    Semi,
    Colon,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Plus,
    Minus,
    Star,
    Slash,
    Tilde,
    Lt,
    Le,
    Eq,
    DArrow,
    Eof,
}

impl TokenKind {
    /// Upper-case class name used by the `lex` dump.
    pub fn name(&self) -> &'static str {
        match self {
            TokenKind::Keyword(Keyword::True | Keyword::False) => "BOOL_CONST",
            TokenKind::Keyword(k) => match k {
                Keyword::Class => "CLASS",
                Keyword::Else => "ELSE",
                Keyword::Fi => "FI",
                Keyword::If => "IF",
                Keyword::In => "IN",
                Keyword::Inherits => "INHERITS",
                Keyword::IsVoid => "ISVOID",
                Keyword::Let => "LET",
                Keyword::Loop => "LOOP",
                Keyword::Pool => "POOL",
                Keyword::Then => "THEN",
                Keyword::While => "WHILE",
                Keyword::Case => "CASE",
                Keyword::Esac => "ESAC",
                Keyword::New => "NEW",
                Keyword::Of => "OF",
                Keyword::Not => "NOT",
                Keyword::True | Keyword::False => unreachable!(),
            },
            TokenKind::TypeId(_) => "TYPEID",
            TokenKind::ObjectId(_) => "OBJECTID",
            TokenKind::IntLiteral(_) => "INT_CONST",
            TokenKind::StringLiteral(_) => "STR_CONST",
            TokenKind::Assign => "ASSIGN",
            TokenKind::At => "AT",
            TokenKind::Dot => "DOT",
            TokenKind::Comma => "COMMA",
            TokenKind::Semi => "SEMI",
            TokenKind::Colon => "COLON",
            TokenKind::LParen => "LPAREN",
            TokenKind::RParen => "RPAREN",
            TokenKind::LBrace => "LBRACE",
            TokenKind::RBrace => "RBRACE",
            TokenKind::Plus => "PLUS",
            TokenKind::Minus => "MINUS",
            TokenKind::Star => "STAR",
            TokenKind::Slash => "SLASH",
            TokenKind::Tilde => "TILDE",
            TokenKind::Lt => "LT",
            TokenKind::Le => "LE",
            TokenKind::Eq => "EQ",
            TokenKind::DArrow => "DARROW",
            TokenKind::Eof => "EOF",
        }
    }

    /// How the token reads in an error message.
    pub fn describe(&self) -> String {
        match self {
            TokenKind::Keyword(k) => format!("keyword '{k}'"),
            TokenKind::TypeId(s) => format!("type identifier '{s}'"),
            TokenKind::ObjectId(s) => format!("identifier '{s}'"),
            TokenKind::IntLiteral(i) => format!("integer {i}"),
            TokenKind::StringLiteral(_) => "string constant".to_string(),
            TokenKind::Eof => "end of file".to_string(),
            other => format!("'{}'", other.symbol().unwrap_or("?")),
        }
    }

    fn symbol(&self) -> Option<&'static str> {
        Some(match self {
            TokenKind::Assign => "<-",
            TokenKind::At => "@",
            TokenKind::Dot => ".",
            TokenKind::Comma => ",",
            TokenKind::Semi => ";",
            TokenKind::Colon => ":",
            TokenKind::LParen => "(",
            TokenKind::RParen => ")",
            TokenKind::LBrace => "{",
            TokenKind::RBrace => "}",
            TokenKind::Plus => "+",
            TokenKind::Minus => "-",
            TokenKind::Star => "*",
            TokenKind::Slash => "/",
            TokenKind::Tilde => "~",
            TokenKind::Lt => "<",
            TokenKind::Le => "<=",
            TokenKind::Eq => "=",
            TokenKind::DArrow => "=>",
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    /// Raw source text of the token.
    pub lexeme: String,
    pub span: SourceSpan,
}

/// Splits `source` into tokens, always ending with [`TokenKind::Eof`].
pub fn tokenize(source: &str) -> (Vec<Token>, Vec<Diagnostic>) {
    let mut lexer = Lexer::new(source);
    lexer.run();
    (lexer.tokens, lexer.diagnostics)
}

struct Lexer {
    chars: Vec<char>,
    pos: usize,
    line: u32,
    column: u32,
    tokens: Vec<Token>,
    diagnostics: Vec<Diagnostic>,
}

#[derive(Clone, Copy)]
struct Mark {
    pos: usize,
    line: u32,
    column: u32,
}

impl Lexer {
    fn new(source: &str) -> Self {
        Lexer {
            chars: source.chars().collect(),
            pos: 0,
            line: 1,
            column: 1,
            tokens: Vec::new(),
            diagnostics: Vec::new(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, ahead: usize) -> Option<char> {
        self.chars.get(self.pos + ahead).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn mark(&self) -> Mark {
        Mark {
            pos: self.pos,
            line: self.line,
            column: self.column,
        }
    }

    fn span_from(&self, m: Mark) -> SourceSpan {
        SourceSpan::new(m.pos, self.pos, m.line, m.column)
    }

    fn text_from(&self, m: Mark) -> String {
        self.chars[m.pos..self.pos].iter().collect()
    }

    fn push(&mut self, kind: TokenKind, m: Mark) {
        let lexeme = self.text_from(m);
        let span = self.span_from(m);
        self.tokens.push(Token { kind, lexeme, span });
    }

    fn error(&mut self, m: Mark, message: impl Into<String>) {
        let span = self.span_from(m);
        self.diagnostics.push(Diagnostic::lexing(span, message));
    }

    fn run(&mut self) {
        while let Some(c) = self.peek() {
            let m = self.mark();
            match c {
                c if c.is_whitespace() => {
                    self.bump();
                }
                '-' if self.peek_at(1) == Some('-') => self.line_comment(),
                '(' if self.peek_at(1) == Some('*') => self.block_comment(m),
                '*' if self.peek_at(1) == Some(')') => {
                    self.bump();
                    self.bump();
                    self.error(m, "unmatched '*)'");
                }
                '"' => self.string(m),
                '0'..='9' => self.integer(m),
                c if c.is_ascii_alphabetic() => self.identifier(m),
                _ => self.operator(m, c),
            }
        }
        let m = self.mark();
        self.push(TokenKind::Eof, m);
    }

    fn line_comment(&mut self) {
        while let Some(c) = self.peek() {
            if c == '\n' {
                break;
            }
            self.bump();
        }
    }

    fn block_comment(&mut self, m: Mark) {
        self.bump();
        self.bump();
        let mut depth = 1usize;
        while depth > 0 {
            match (self.peek(), self.peek_at(1)) {
                (None, _) => {
                    self.error(m, "unterminated block comment");
                    return;
                }
                (Some('('), Some('*')) => {
                    self.bump();
                    self.bump();
                    depth += 1;
                }
                (Some('*'), Some(')')) => {
                    self.bump();
                    self.bump();
                    depth -= 1;
                }
                _ => {
                    self.bump();
                }
            }
        }
    }

    fn string(&mut self, m: Mark) {
        self.bump();
        let mut text = String::new();
        let mut len = 0usize;
        loop {
            match self.peek() {
                None => {
                    self.error(m, "unterminated string");
                    break;
                }
                Some('\n') => {
                    // Resume after the newline; it is not part of the token.
                    self.error(m, "unterminated string");
                    self.push(TokenKind::StringLiteral(text), m);
                    self.bump();
                    return;
                }
                Some('"') => {
                    self.bump();
                    break;
                }
                Some('\\') => {
                    self.bump();
                    let decoded = match self.bump() {
                        None => {
                            self.error(m, "unterminated string");
                            break;
                        }
                        Some('n') => '\n',
                        Some('t') => '\t',
                        Some('b') => '\u{8}',
                        Some('f') => '\u{c}',
                        Some(other) => other,
                    };
                    text.push(decoded);
                    len += 1;
                }
                Some(c) => {
                    self.bump();
                    text.push(c);
                    len += 1;
                }
            }
        }
        if len > MAX_STRING_LEN {
            self.error(
                m,
                format!("string constant too long ({len} > {MAX_STRING_LEN} characters)"),
            );
        }
        self.push(TokenKind::StringLiteral(text), m);
    }

    fn integer(&mut self, m: Mark) {
        while matches!(self.peek(), Some('0'..='9')) {
            self.bump();
        }
        let digits = self.text_from(m);
        if digits.len() > 1 && digits.starts_with('0') {
            self.error(m, format!("integer literal {digits} has a leading zero"));
        }
        let value = match digits.parse::<i32>() {
            Ok(v) => v,
            Err(_) => {
                self.error(m, format!("integer literal {digits} is out of range"));
                0
            }
        };
        self.push(TokenKind::IntLiteral(value), m);
    }

    fn identifier(&mut self, m: Mark) {
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
            self.bump();
        }
        let word = self.text_from(m);
        let kind = if let Some(kw) = Keyword::lookup(&word) {
            TokenKind::Keyword(kw)
        } else if word.starts_with(|c: char| c.is_ascii_uppercase()) {
            TokenKind::TypeId(word)
        } else {
            TokenKind::ObjectId(word)
        };
        self.push(kind, m);
    }

    fn operator(&mut self, m: Mark, c: char) {
        self.bump();
        let kind = match c {
            '<' => match self.peek() {
                Some('-') => {
                    self.bump();
                    TokenKind::Assign
                }
                Some('=') => {
                    self.bump();
                    TokenKind::Le
                }
                _ => TokenKind::Lt,
            },
            '=' if self.peek() == Some('>') => {
                self.bump();
                TokenKind::DArrow
            }
            '=' => TokenKind::Eq,
            '@' => TokenKind::At,
            '.' => TokenKind::Dot,
            ',' => TokenKind::Comma,
            ';' => TokenKind::Semi,
            ':' => TokenKind::Colon,
            '(' => TokenKind::LParen,
            ')' => TokenKind::RParen,
            '{' => TokenKind::LBrace,
            '}' => TokenKind::RBrace,
            '+' => TokenKind::Plus,
            '-' => TokenKind::Minus,
            '*' => TokenKind::Star,
            '/' => TokenKind::Slash,
            '~' => TokenKind::Tilde,
            other => {
                self.error(m, format!("invalid character {:?}", other));
                return;
            }
        };
        self.push(kind, m);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use TokenKind as T;

    fn kinds(src: &str) -> Vec<TokenKind> {
        tokenize(src).0.into_iter().map(|t| t.kind).collect()
    }

    fn errors(src: &str) -> Vec<String> {
        tokenize(src).1.into_iter().map(|d| d.message).collect()
    }

    #[test]
    fn keyword_if() {
        assert_eq!(kinds("if"), vec![T::Keyword(Keyword::If), T::Eof]);
    }

    #[test]
    fn empty_source() {
        let (toks, diags) = tokenize("");
        assert_eq!(toks.len(), 1);
        assert_eq!(toks[0].kind, T::Eof);
        assert!(diags.is_empty());
    }

    #[test]
    fn line_comment_is_dropped() {
        assert_eq!(
            kinds("x <- 42 -- note\n"),
            vec![T::ObjectId("x".into()), T::Assign, T::IntLiteral(42), T::Eof]
        );
    }

    #[test]
    fn block_comments_nest() {
        assert_eq!(kinds("(* a (* b *) c *) 1"), vec![T::IntLiteral(1), T::Eof]);
        assert!(errors("(* a (* b *) c *) 1").is_empty());
    }

    #[test]
    fn type_id() {
        assert_eq!(kinds("Main"), vec![T::TypeId("Main".into()), T::Eof]);
    }

    #[test]
    fn keyword_case_rules() {
        assert_eq!(kinds("CLASS")[0], T::Keyword(Keyword::Class));
        assert_eq!(kinds("InHeRiTs")[0], T::Keyword(Keyword::Inherits));
        assert_eq!(kinds("tRUE")[0], T::Keyword(Keyword::True));
        assert_eq!(kinds("True")[0], T::TypeId("True".into()));
        assert_eq!(kinds("False")[0], T::TypeId("False".into()));
        assert_eq!(kinds("self")[0], T::ObjectId("self".into()));
        assert_eq!(kinds("SELF_TYPE")[0], T::TypeId("SELF_TYPE".into()));
    }

    #[test]
    fn identifiers_allow_digits_and_underscores() {
        assert_eq!(
            kinds("a_1 B2_c"),
            vec![T::ObjectId("a_1".into()), T::TypeId("B2_c".into()), T::Eof]
        );
    }

    #[test]
    fn operators_maximal_munch() {
        assert_eq!(
            kinds("<- <= < => = @.,;:(){}+-*/~"),
            vec![
                T::Assign,
                T::Le,
                T::Lt,
                T::DArrow,
                T::Eq,
                T::At,
                T::Dot,
                T::Comma,
                T::Semi,
                T::Colon,
                T::LParen,
                T::RParen,
                T::LBrace,
                T::RBrace,
                T::Plus,
                T::Minus,
                T::Star,
                T::Slash,
                T::Tilde,
                T::Eof
            ]
        );
    }

    #[test]
    fn string_escapes() {
        let src = r#""a\nb\tc\bd\fe\\f\"g\qh""#;
        assert_eq!(
            kinds(src)[0],
            T::StringLiteral("a\nb\tc\u{8}d\u{c}e\\f\"gqh".into())
        );
        assert!(errors(src).is_empty());
    }

    #[test]
    fn escaped_newline_continues_string() {
        let (toks, diags) = tokenize("\"ab\\\ncd\" x");
        assert!(diags.is_empty());
        assert_eq!(toks[0].kind, T::StringLiteral("ab\ncd".into()));
        assert_eq!(toks[1].span.line, 2);
    }

    #[test]
    fn raw_newline_in_string_is_an_error() {
        let (toks, diags) = tokenize("\"abc\nx");
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].message, "unterminated string");
        assert_eq!(diags[0].line, 1);
        // scanning resumes on the next line
        assert_eq!(toks[1].kind, T::ObjectId("x".into()));
        assert_eq!(toks[1].span.line, 2);
    }

    #[test]
    fn eof_in_string() {
        assert_eq!(errors("\"abc"), vec!["unterminated string"]);
        assert_eq!(errors("\"abc\\"), vec!["unterminated string"]);
    }

    #[test]
    fn string_length_limit() {
        let ok = format!("\"{}\"", "a".repeat(MAX_STRING_LEN));
        assert!(errors(&ok).is_empty());
        let long = format!("\"{}\"", "a".repeat(MAX_STRING_LEN + 1));
        assert_eq!(errors(&long).len(), 1);
        assert!(errors(&long)[0].contains("too long"));
    }

    #[test]
    fn leading_zero_is_reported_but_tokenized() {
        let (toks, diags) = tokenize("007 0");
        assert_eq!(toks[0].kind, T::IntLiteral(7));
        assert_eq!(toks[1].kind, T::IntLiteral(0));
        assert_eq!(diags.len(), 1);
        assert!(diags[0].message.contains("leading zero"));
        assert_eq!(diags[0].span.unwrap().len(), 3);
    }

    #[test]
    fn integer_range() {
        assert_eq!(kinds("2147483647")[0], T::IntLiteral(i32::MAX));
        assert!(errors("2147483647").is_empty());
        assert_eq!(errors("2147483648").len(), 1);
    }

    #[test]
    fn comment_errors() {
        assert_eq!(errors("(* (* *)"), vec!["unterminated block comment"]);
        assert_eq!(errors("x *) y"), vec!["unmatched '*)'"]);
        assert_eq!(kinds("x *) y").len(), 3);
    }

    #[test]
    fn invalid_characters_are_skipped() {
        let (toks, diags) = tokenize("a # b _c é");
        assert_eq!(diags.len(), 3);
        assert_eq!(
            toks.iter().map(|t| t.kind.clone()).collect::<Vec<_>>(),
            vec![
                T::ObjectId("a".into()),
                T::ObjectId("b".into()),
                T::ObjectId("c".into()),
                T::Eof
            ]
        );
    }

    #[test]
    fn spans_track_lines_and_columns() {
        let (toks, _) = tokenize("class\n  Main");
        assert_eq!(toks[1].span, SourceSpan::new(8, 12, 2, 3));
        assert_eq!(toks[2].span.line, 2);
    }

    #[test]
    fn every_keyword_yields_one_token() {
        for kw in Keyword::ALL {
            assert_eq!(kinds(kw.as_str()), vec![T::Keyword(kw), T::Eof], "{kw}");
        }
    }

    proptest! {
        #[test]
        fn never_panics_and_covers_source(src in "\\PC{0,80}") {
            let (toks, _) = tokenize(&src);
            prop_assert_eq!(&toks.last().unwrap().kind, &T::Eof);
            let chars: Vec<char> = src.chars().collect();
            let mut prev_end = 0;
            for t in &toks {
                prop_assert!(t.span.start >= prev_end);
                prop_assert!(t.span.end <= chars.len());
                let slice: String = chars[t.span.start..t.span.end].iter().collect();
                prop_assert_eq!(&slice, &t.lexeme);
                // Gaps hold only whitespace, comments or rejected characters.
                let gap: String = chars[prev_end..t.span.start].iter().collect();
                let (gap_toks, _) = tokenize(&gap);
                prop_assert_eq!(gap_toks.len(), 1);
                prev_end = t.span.end;
                if t.kind != T::Eof {
                    prop_assert!(t.span.start < t.span.end);
                }
            }
        }

        #[test]
        fn cool_like_input_never_panics(src in "[a-zA-Z0-9 \n\"\\\\(*)<=>~@.,;:{}+/-]{0,80}") {
            let (toks, diags) = tokenize(&src);
            prop_assert_eq!(&toks.last().unwrap().kind, &T::Eof);
            for d in diags {
                prop_assert!(d.line >= 1);
            }
        }
    }
}
