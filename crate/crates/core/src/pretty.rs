//! Source printer for the syntax tree.
//!
//! Output re-parses to the same tree (ignoring spans and redundant
//! parentheses). Parentheses are inserted only where operator precedence
//! requires them.

use crate::ast::*;
use crate::parser::{binop_precedence, prec};

const INDENT: &str = "  ";

pub fn pretty_print(program: &Program) -> String {
    let mut out = String::new();
    for class in &program.classes {
        out.push_str("class ");
        out.push_str(&class.name.name);
        if let Some(parent) = &class.parent {
            out.push_str(" inherits ");
            out.push_str(&parent.name);
        }
        out.push_str(" {\n");
        for feature in &class.features {
            out.push_str(INDENT);
            match feature {
                Feature::Method(m) => {
                    let formals: Vec<String> = m
                        .formals
                        .iter()
                        .map(|f| format!("{} : {}", f.name, f.ty))
                        .collect();
                    out.push_str(&format!(
                        "{}({}) : {} {{\n{}{}\n{}}};\n",
                        m.name,
                        formals.join(", "),
                        m.return_type,
                        INDENT.repeat(2),
                        print(&m.body, prec::LOWEST, 2),
                        INDENT
                    ));
                }
                Feature::Attribute(a) => {
                    out.push_str(&format!("{} : {}", a.name, a.declared_type));
                    if let Some(init) = &a.init {
                        out.push_str(" <- ");
                        out.push_str(&print(init, prec::LOWEST, 1));
                    }
                    out.push_str(";\n");
                }
            }
        }
        out.push_str("};\n");
    }
    out
}

/// Prints one expression as it would appear at the top of a method body.
pub fn pretty_print_expr(expr: &Expr) -> String {
    print(expr, prec::LOWEST, 0)
}

/// Precedence of the construct at the root of `expr`. Constructs whose
/// trailing sub-expression extends as far right as possible (`let`, `<-`)
/// get the lowest level.
pub fn expr_precedence(expr: &Expr) -> u8 {
    match &expr.kind {
        ExprKind::Assign { .. } | ExprKind::Let { .. } => prec::LOWEST,
        ExprKind::Not(_) => prec::NOT,
        ExprKind::BinOp { op, .. } => binop_precedence(*op),
        ExprKind::IsVoid(_) => prec::ISVOID,
        ExprKind::Neg(_) => prec::NEG,
        ExprKind::Dispatch {
            receiver: Some(_), ..
        } => prec::DISPATCH,
        _ => prec::ATOM,
    }
}

fn nl(depth: usize) -> String {
    format!("\n{}", INDENT.repeat(depth))
}

/// Prints `expr` so that it parses back as a single operand in a context
/// that only accepts constructs at `min` precedence or tighter.
fn print(expr: &Expr, min: u8, depth: usize) -> String {
    let text = print_bare(expr, depth);
    if expr_precedence(expr) < min {
        format!("({text})")
    } else {
        text
    }
}

fn print_args(args: &[Expr], depth: usize) -> String {
    let args: Vec<String> = args.iter().map(|a| print(a, prec::LOWEST, depth)).collect();
    args.join(", ")
}

fn print_bare(expr: &Expr, depth: usize) -> String {
    match &expr.kind {
        ExprKind::Assign { name, value } => {
            format!("{} <- {}", name, print(value, prec::LOWEST, depth))
        }
        ExprKind::Dispatch {
            receiver,
            static_type,
            method,
            args,
        } => {
            let mut s = String::new();
            if let Some(recv) = receiver {
                s.push_str(&print(recv, prec::DISPATCH, depth));
                if let Some(t) = static_type {
                    s.push('@');
                    s.push_str(&t.name);
                }
                s.push('.');
            }
            s.push_str(&format!("{}({})", method, print_args(args, depth)));
            s
        }
        ExprKind::If {
            cond,
            then_branch,
            else_branch,
        } => format!(
            "if {} then{}{}{}else{}{}{}fi",
            print(cond, prec::LOWEST, depth),
            nl(depth + 1),
            print(then_branch, prec::LOWEST, depth + 1),
            nl(depth),
            nl(depth + 1),
            print(else_branch, prec::LOWEST, depth + 1),
            nl(depth),
        ),
        ExprKind::While { cond, body } => format!(
            "while {} loop{}{}{}pool",
            print(cond, prec::LOWEST, depth),
            nl(depth + 1),
            print(body, prec::LOWEST, depth + 1),
            nl(depth),
        ),
        ExprKind::Block(items) => {
            let mut s = String::from("{");
            for item in items {
                s.push_str(&nl(depth + 1));
                s.push_str(&print(item, prec::LOWEST, depth + 1));
                s.push(';');
            }
            s.push_str(&nl(depth));
            s.push('}');
            s
        }
        ExprKind::Let { bindings, body } => {
            let bindings: Vec<String> = bindings
                .iter()
                .map(|b| match &b.init {
                    Some(init) => format!("{} : {} <- {}", b.name, b.ty, print(init, prec::LOWEST, depth + 1)),
                    None => format!("{} : {}", b.name, b.ty),
                })
                .collect();
            format!(
                "let {} in{}{}",
                bindings.join(", "),
                nl(depth + 1),
                print(body, prec::LOWEST, depth + 1)
            )
        }
        ExprKind::Case {
            scrutinee,
            branches,
        } => {
            let mut s = format!("case {} of", print(scrutinee, prec::LOWEST, depth));
            for b in branches {
                s.push_str(&nl(depth + 1));
                s.push_str(&format!(
                    "{} : {} => {};",
                    b.name,
                    b.ty,
                    print(&b.body, prec::LOWEST, depth + 1)
                ));
            }
            s.push_str(&nl(depth));
            s.push_str("esac");
            s
        }
        ExprKind::New(t) => format!("new {t}"),
        ExprKind::IsVoid(e) => format!("isvoid {}", print(e, prec::ISVOID, depth)),
        ExprKind::Neg(e) => format!("~{}", print(e, prec::NEG, depth)),
        ExprKind::Not(e) => format!("not {}", print(e, prec::NOT, depth)),
        ExprKind::Paren(e) => format!("({})", print(e, prec::LOWEST, depth)),
        ExprKind::BinOp { op, lhs, rhs } => {
            let level = binop_precedence(*op);
            // Left operand may share the level only for left-associative
            // arithmetic; comparisons do not chain.
            let lhs_min = if op.is_arithmetic() { level } else { level + 1 };
            format!(
                "{} {} {}",
                print(lhs, lhs_min, depth),
                op,
                print(rhs, level + 1, depth)
            )
        }
        ExprKind::Identifier(id) => id.name.clone(),
        ExprKind::IntConst(i) => i.to_string(),
        ExprKind::StringConst(s) => quote(s),
        ExprKind::BoolConst(b) => b.to_string(),
    }
}

/// Encodes a string constant so the lexer decodes it back to `s`.
pub fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\u{8}' => out.push_str("\\b"),
            '\u{c}' => out.push_str("\\f"),
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}
