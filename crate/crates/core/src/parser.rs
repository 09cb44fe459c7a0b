//! Recursive-descent parser producing the [`crate::ast`] tree.
//!
//! Binary operators are parsed by precedence climbing. From tightest to
//! loosest: `.`/`@` dispatch, `~`, `isvoid`, `*` `/`, `+` `-`, the
//! non-associative comparisons `<` `<=` `=`, `not`, and finally `<-`, which
//! is right-associative. Arithmetic associates to the left.
//!
//! On a syntax error the parser records a diagnostic and skips to the end of
//! the current feature (or to the next `class`), so one bad feature does not
//! hide errors later in the file.

use crate::ast::*;
use crate::diagnostics::Diagnostic;
use crate::lexer::{tokenize, Keyword, Token, TokenKind};
use crate::span::SourceSpan;

/// Binding strength of each operator class. Higher binds tighter.
pub mod prec {
    pub const LOWEST: u8 = 0;
    pub const NOT: u8 = 1;
    pub const COMPARE: u8 = 2;
    pub const ADD: u8 = 3;
    pub const MUL: u8 = 4;
    pub const ISVOID: u8 = 5;
    pub const NEG: u8 = 6;
    pub const DISPATCH: u8 = 7;
    pub const ATOM: u8 = 8;
}

pub fn binop_precedence(op: BinOp) -> u8 {
    match op {
        BinOp::Mul | BinOp::Div => prec::MUL,
        BinOp::Add | BinOp::Sub => prec::ADD,
        BinOp::Lt | BinOp::Le | BinOp::Eq => prec::COMPARE,
    }
}

/// Parses a whole program from a token stream.
pub fn parse(tokens: &[Token]) -> (Program, Vec<Diagnostic>) {
    let mut p = Parser::new(tokens);
    let program = p.program();
    (program, p.diagnostics)
}

/// Parses a single expression that must span the whole token stream.
pub fn parse_expression(tokens: &[Token]) -> (Option<Expr>, Vec<Diagnostic>) {
    let mut p = Parser::new(tokens);
    let expr = p.expr().ok();
    let expr = match expr {
        Some(e) if p.at(&TokenKind::Eof) => Some(e),
        Some(_) => {
            let _ = p.unexpected::<()>("end of expression");
            None
        }
        None => None,
    };
    (expr, p.diagnostics)
}

/// Lexes and parses `source`; lexing diagnostics come first.
pub fn parse_source(source: &str) -> (Program, Vec<Diagnostic>) {
    let (tokens, mut diagnostics) = tokenize(source);
    let (program, parse_diags) = parse(&tokens);
    diagnostics.extend(parse_diags);
    (program, diagnostics)
}

/// Marker for an error that has already been reported.
#[derive(Debug)]
struct Reported;

type PResult<T> = Result<T, Reported>;

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    last_span: SourceSpan,
    diagnostics: Vec<Diagnostic>,
}

fn binop_for(kind: &TokenKind) -> Option<BinOp> {
    Some(match kind {
        TokenKind::Plus => BinOp::Add,
        TokenKind::Minus => BinOp::Sub,
        TokenKind::Star => BinOp::Mul,
        TokenKind::Slash => BinOp::Div,
        TokenKind::Lt => BinOp::Lt,
        TokenKind::Le => BinOp::Le,
        TokenKind::Eq => BinOp::Eq,
        _ => return None,
    })
}

impl Parser {
    fn new(tokens: &[Token]) -> Self {
        let mut tokens = tokens.to_vec();
        if tokens.last().map(|t| &t.kind) != Some(&TokenKind::Eof) {
            let span = tokens
                .last()
                .map(|t| SourceSpan::new(t.span.end, t.span.end, t.span.line, t.span.column))
                .unwrap_or_else(|| SourceSpan::new(0, 0, 1, 1));
            tokens.push(Token {
                kind: TokenKind::Eof,
                lexeme: String::new(),
                span,
            });
        }
        Parser {
            tokens,
            pos: 0,
            last_span: SourceSpan::new(0, 0, 1, 1),
            diagnostics: Vec::new(),
        }
    }

    fn peek(&self) -> &Token {
        &self.tokens[self.pos.min(self.tokens.len() - 1)]
    }

    fn at(&self, kind: &TokenKind) -> bool {
        &self.peek().kind == kind
    }

    fn at_keyword(&self, kw: Keyword) -> bool {
        self.at(&TokenKind::Keyword(kw))
    }

    fn advance(&mut self) -> Token {
        let tok = self.peek().clone();
        if tok.kind != TokenKind::Eof {
            self.pos += 1;
        }
        self.last_span = tok.span;
        tok
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.at(kind) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn unexpected<T>(&mut self, expected: &str) -> PResult<T> {
        let tok = self.peek();
        let message = format!("expected {expected} but found {}", tok.kind.describe());
        let span = tok.span;
        self.diagnostics.push(Diagnostic::parsing(span, message));
        Err(Reported)
    }

    fn expect(&mut self, kind: TokenKind, expected: &str) -> PResult<Token> {
        if self.at(&kind) {
            Ok(self.advance())
        } else {
            self.unexpected(expected)
        }
    }

    fn expect_keyword(&mut self, kw: Keyword) -> PResult<Token> {
        self.expect(TokenKind::Keyword(kw), &format!("'{kw}'"))
    }

    fn type_id(&mut self, what: &str) -> PResult<Ident> {
        match &self.peek().kind {
            TokenKind::TypeId(name) => {
                let name = name.clone();
                let tok = self.advance();
                Ok(Ident::new(name, tok.span))
            }
            _ => self.unexpected(what),
        }
    }

    fn object_id(&mut self, what: &str) -> PResult<Ident> {
        match &self.peek().kind {
            TokenKind::ObjectId(name) => {
                let name = name.clone();
                let tok = self.advance();
                Ok(Ident::new(name, tok.span))
            }
            _ => self.unexpected(what),
        }
    }

    // ---- program structure ----

    fn program(&mut self) -> Program {
        let mut classes = Vec::new();
        if self.at(&TokenKind::Eof) {
            let span = self.peek().span;
            self.diagnostics.push(Diagnostic::parsing(
                span,
                "program requires at least one class",
            ));
            return Program { classes };
        }
        while !self.at(&TokenKind::Eof) {
            if !self.at_keyword(Keyword::Class) {
                let _ = self.unexpected::<()>("'class'");
                self.advance();
                self.skip_to_class();
                continue;
            }
            match self.class() {
                Ok(class) => {
                    classes.push(class);
                    if !self.eat(&TokenKind::Semi) {
                        let _ = self.unexpected::<()>("';' after class definition");
                        self.skip_to_class();
                    }
                }
                Err(Reported) => self.skip_to_class(),
            }
        }
        Program { classes }
    }

    fn skip_to_class(&mut self) {
        while !self.at(&TokenKind::Eof) && !self.at_keyword(Keyword::Class) {
            self.advance();
        }
    }

    fn class(&mut self) -> PResult<Class> {
        let start = self.expect_keyword(Keyword::Class)?.span;
        let name = self.type_id("class name")?;
        let parent = if self.eat(&TokenKind::Keyword(Keyword::Inherits)) {
            Some(self.type_id("parent class name")?)
        } else {
            None
        };
        self.expect(TokenKind::LBrace, "'{'")?;
        let mut features = Vec::new();
        loop {
            if self.at(&TokenKind::RBrace) {
                break;
            }
            if self.at(&TokenKind::Eof) || self.at_keyword(Keyword::Class) {
                return self.unexpected(&format!("'}}' to close class {}", name.name));
            }
            let feature_start = self.pos;
            match self.feature() {
                Ok(feature) => {
                    features.push(feature);
                    if !self.eat(&TokenKind::Semi) {
                        let _ = self.unexpected::<()>("';' after feature");
                        self.skip_feature_from(self.pos);
                    }
                }
                Err(Reported) => self.skip_feature_from(feature_start),
            }
        }
        let end = self.advance().span;
        Ok(Class {
            name,
            parent,
            features,
            span: start.to(end),
        })
    }

    /// Moves past the `;` ending the feature that began at `start`, matching
    /// brackets from there. Stops early at a `class` keyword or at the `}`
    /// closing the enclosing class.
    fn skip_feature_from(&mut self, start: usize) {
        let error_pos = self.pos;
        let mut depth = 0usize;
        let mut i = start;
        loop {
            let kind = &self.tokens[i].kind;
            match kind {
                TokenKind::Eof | TokenKind::Keyword(Keyword::Class) => break,
                TokenKind::Semi if depth == 0 => {
                    i += 1;
                    break;
                }
                TokenKind::RBrace | TokenKind::RParen if depth == 0 => break,
                TokenKind::LBrace | TokenKind::LParen => depth += 1,
                TokenKind::RBrace | TokenKind::RParen => depth -= 1,
                _ => {}
            }
            i += 1;
        }
        if i > error_pos || (i == error_pos && i > start) {
            self.pos = i;
            return;
        }
        // Bracket matching ended before the error point; fall back to a
        // plain scan from where the error happened.
        self.pos = error_pos;
        if self.pos == start {
            self.advance();
        }
        while !matches!(
            self.peek().kind,
            TokenKind::Eof | TokenKind::Semi | TokenKind::RBrace | TokenKind::Keyword(Keyword::Class)
        ) {
            self.advance();
        }
        self.eat(&TokenKind::Semi);
    }

    fn feature(&mut self) -> PResult<Feature> {
        let name = self.object_id("feature name")?;
        if self.eat(&TokenKind::LParen) {
            let mut formals = Vec::new();
            if !self.at(&TokenKind::RParen) {
                loop {
                    formals.push(self.formal()?);
                    if !self.eat(&TokenKind::Comma) {
                        break;
                    }
                }
            }
            self.expect(TokenKind::RParen, "')' or ','")?;
            self.expect(TokenKind::Colon, "':'")?;
            let return_type = self.type_id("return type")?;
            self.expect(TokenKind::LBrace, "'{'")?;
            let body = self.expr()?;
            let end = self.expect(TokenKind::RBrace, "'}'")?.span;
            Ok(Feature::Method(Method {
                span: name.span.to(end),
                name,
                formals,
                return_type,
                body,
            }))
        } else {
            self.expect(TokenKind::Colon, "':' or '('")?;
            let declared_type = self.type_id("type name")?;
            let init = if self.eat(&TokenKind::Assign) {
                Some(self.expr()?)
            } else {
                None
            };
            Ok(Feature::Attribute(Attribute {
                span: name.span.to(self.last_span),
                name,
                declared_type,
                init,
            }))
        }
    }

    fn formal(&mut self) -> PResult<Formal> {
        let name = self.object_id("formal parameter name")?;
        self.expect(TokenKind::Colon, "':'")?;
        let ty = self.type_id("type name")?;
        Ok(Formal {
            span: name.span.to(ty.span),
            name,
            ty,
        })
    }

    // ---- expressions ----

    fn expr(&mut self) -> PResult<Expr> {
        self.expr_bp(prec::LOWEST)
    }

    fn expr_bp(&mut self, min: u8) -> PResult<Expr> {
        let mut lhs = self.prefix()?;
        loop {
            let kind = self.peek().kind.clone();
            if matches!(kind, TokenKind::Dot | TokenKind::At) {
                lhs = self.dispatch_suffix(lhs)?;
                continue;
            }
            let Some(op) = binop_for(&kind) else { break };
            let level = binop_precedence(op);
            if level <= min {
                break;
            }
            self.advance();
            let rhs = self.expr_bp(level)?;
            let span = lhs.span.to(rhs.span);
            lhs = Expr::new(
                ExprKind::BinOp {
                    op,
                    lhs: Box::new(lhs),
                    rhs: Box::new(rhs),
                },
                span,
            );
            if level == prec::COMPARE
                && binop_for(&self.peek().kind).map(binop_precedence) == Some(prec::COMPARE)
            {
                let span = self.peek().span;
                self.diagnostics.push(Diagnostic::parsing(
                    span,
                    "comparison operators are non-associative; add parentheses",
                ));
                return Err(Reported);
            }
        }
        Ok(lhs)
    }

    fn unary(&mut self, start: SourceSpan, level: u8, make: fn(Box<Expr>) -> ExprKind) -> PResult<Expr> {
        let operand = self.expr_bp(level)?;
        let span = start.to(operand.span);
        Ok(Expr::new(make(Box::new(operand)), span))
    }

    fn prefix(&mut self) -> PResult<Expr> {
        let tok = self.peek().clone();
        let start = tok.span;
        match tok.kind {
            TokenKind::IntLiteral(i) => {
                self.advance();
                Ok(Expr::new(ExprKind::IntConst(i), start))
            }
            TokenKind::StringLiteral(s) => {
                self.advance();
                Ok(Expr::new(ExprKind::StringConst(s), start))
            }
            TokenKind::Keyword(Keyword::True) => {
                self.advance();
                Ok(Expr::new(ExprKind::BoolConst(true), start))
            }
            TokenKind::Keyword(Keyword::False) => {
                self.advance();
                Ok(Expr::new(ExprKind::BoolConst(false), start))
            }
            TokenKind::ObjectId(name) => {
                self.advance();
                let id = Ident::new(name, start);
                match self.peek().kind {
                    TokenKind::Assign => {
                        self.advance();
                        let value = self.expr_bp(prec::LOWEST)?;
                        let span = start.to(value.span);
                        Ok(Expr::new(
                            ExprKind::Assign {
                                name: id,
                                value: Box::new(value),
                            },
                            span,
                        ))
                    }
                    TokenKind::LParen => {
                        let args = self.arguments()?;
                        Ok(Expr::new(
                            ExprKind::Dispatch {
                                receiver: None,
                                static_type: None,
                                method: id,
                                args,
                            },
                            start.to(self.last_span),
                        ))
                    }
                    _ => Ok(Expr::new(ExprKind::Identifier(id), start)),
                }
            }
            TokenKind::Keyword(Keyword::If) => {
                self.advance();
                let cond = self.expr()?;
                self.expect_keyword(Keyword::Then)?;
                let then_branch = self.expr()?;
                self.expect_keyword(Keyword::Else)?;
                let else_branch = self.expr()?;
                let end = self.expect_keyword(Keyword::Fi)?.span;
                Ok(Expr::new(
                    ExprKind::If {
                        cond: Box::new(cond),
                        then_branch: Box::new(then_branch),
                        else_branch: Box::new(else_branch),
                    },
                    start.to(end),
                ))
            }
            TokenKind::Keyword(Keyword::While) => {
                self.advance();
                let cond = self.expr()?;
                self.expect_keyword(Keyword::Loop)?;
                let body = self.expr()?;
                let end = self.expect_keyword(Keyword::Pool)?.span;
                Ok(Expr::new(
                    ExprKind::While {
                        cond: Box::new(cond),
                        body: Box::new(body),
                    },
                    start.to(end),
                ))
            }
            TokenKind::LBrace => {
                self.advance();
                let mut items = Vec::new();
                loop {
                    items.push(self.expr()?);
                    self.expect(TokenKind::Semi, "';' after expression in block")?;
                    if self.at(&TokenKind::RBrace) {
                        break;
                    }
                }
                let end = self.advance().span;
                Ok(Expr::new(ExprKind::Block(items), start.to(end)))
            }
            TokenKind::Keyword(Keyword::Let) => {
                self.advance();
                let mut bindings = Vec::new();
                loop {
                    let name = self.object_id("variable name in let")?;
                    self.expect(TokenKind::Colon, "':'")?;
                    let ty = self.type_id("type name")?;
                    let init = if self.eat(&TokenKind::Assign) {
                        Some(self.expr()?)
                    } else {
                        None
                    };
                    bindings.push(LetBinding {
                        span: name.span.to(self.last_span),
                        name,
                        ty,
                        init,
                    });
                    if !self.eat(&TokenKind::Comma) {
                        break;
                    }
                }
                self.expect(TokenKind::Keyword(Keyword::In), "',' or 'in'")?;
                let body = self.expr_bp(prec::LOWEST)?;
                let span = start.to(body.span);
                Ok(Expr::new(
                    ExprKind::Let {
                        bindings,
                        body: Box::new(body),
                    },
                    span,
                ))
            }
            TokenKind::Keyword(Keyword::Case) => {
                self.advance();
                let scrutinee = self.expr()?;
                self.expect_keyword(Keyword::Of)?;
                let mut branches = Vec::new();
                loop {
                    let name = self.object_id("identifier in case branch")?;
                    self.expect(TokenKind::Colon, "':'")?;
                    let ty = self.type_id("type name")?;
                    self.expect(TokenKind::DArrow, "'=>'")?;
                    let body = self.expr()?;
                    let end = self.expect(TokenKind::Semi, "';' after case branch")?.span;
                    branches.push(CaseBranch {
                        span: name.span.to(end),
                        name,
                        ty,
                        body,
                    });
                    if !matches!(self.peek().kind, TokenKind::ObjectId(_)) {
                        break;
                    }
                }
                let end = self.expect_keyword(Keyword::Esac)?.span;
                Ok(Expr::new(
                    ExprKind::Case {
                        scrutinee: Box::new(scrutinee),
                        branches,
                    },
                    start.to(end),
                ))
            }
            TokenKind::Keyword(Keyword::New) => {
                self.advance();
                let ty = self.type_id("type name after 'new'")?;
                let span = start.to(ty.span);
                Ok(Expr::new(ExprKind::New(ty), span))
            }
            TokenKind::Keyword(Keyword::IsVoid) => {
                self.advance();
                self.unary(start, prec::ISVOID, ExprKind::IsVoid)
            }
            TokenKind::Tilde => {
                self.advance();
                self.unary(start, prec::NEG, ExprKind::Neg)
            }
            TokenKind::Keyword(Keyword::Not) => {
                self.advance();
                self.unary(start, prec::NOT, ExprKind::Not)
            }
            TokenKind::LParen => {
                self.advance();
                let inner = self.expr()?;
                let end = self.expect(TokenKind::RParen, "')'")?.span;
                Ok(Expr::new(ExprKind::Paren(Box::new(inner)), start.to(end)))
            }
            _ => self.unexpected("expression"),
        }
    }

    fn arguments(&mut self) -> PResult<Vec<Expr>> {
        self.expect(TokenKind::LParen, "'('")?;
        let mut args = Vec::new();
        if !self.at(&TokenKind::RParen) {
            loop {
                args.push(self.expr()?);
                if !self.eat(&TokenKind::Comma) {
                    break;
                }
            }
        }
        self.expect(TokenKind::RParen, "')' or ','")?;
        Ok(args)
    }

    fn dispatch_suffix(&mut self, receiver: Expr) -> PResult<Expr> {
        let static_type = if self.eat(&TokenKind::At) {
            let ty = self.type_id("type name after '@'")?;
            self.expect(TokenKind::Dot, "'.'")?;
            Some(ty)
        } else {
            self.expect(TokenKind::Dot, "'.'")?;
            None
        };
        let method = self.object_id("method name")?;
        let args = self.arguments()?;
        let span = receiver.span.to(self.last_span);
        Ok(Expr::new(
            ExprKind::Dispatch {
                receiver: Some(Box::new(receiver)),
                static_type,
                method,
                args,
            },
            span,
        ))
    }
}
