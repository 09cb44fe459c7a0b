//! Indented tree dump: one `kind detail [line]` node per line, two spaces
//! per level.

use std::fmt::Write;

use coolio_core::ast::*;
use coolio_core::pretty::quote;
use coolio_core::semantics::ClassTable;

struct Dumper {
    out: String,
}

impl Dumper {
    fn node(&mut self, depth: usize, label: &str, line: u32) {
        let _ = writeln!(self.out, "{}{label} [{line}]", "  ".repeat(depth));
    }

    fn expr(&mut self, e: &Expr, depth: usize) {
        let line = e.span.line;
        let kind = e.kind.name();
        match &e.kind {
            ExprKind::Assign { name, value } => {
                self.node(depth, &format!("{kind} {name}"), line);
                self.expr(value, depth + 1);
            }
            ExprKind::Dispatch {
                receiver,
                static_type,
                method,
                args,
            } => {
                let label = match static_type {
                    Some(t) => format!("{kind} {method} @{t}"),
                    None => format!("{kind} {method}"),
                };
                self.node(depth, &label, line);
                if let Some(r) = receiver {
                    self.expr(r, depth + 1);
                }
                for a in args {
                    self.expr(a, depth + 1);
                }
            }
            ExprKind::If {
                cond,
                then_branch,
                else_branch,
            } => {
                self.node(depth, kind, line);
                for c in [cond, then_branch, else_branch] {
                    self.expr(c, depth + 1);
                }
            }
            ExprKind::While { cond, body } => {
                self.node(depth, kind, line);
                self.expr(cond, depth + 1);
                self.expr(body, depth + 1);
            }
            ExprKind::Block(items) => {
                self.node(depth, kind, line);
                for item in items {
                    self.expr(item, depth + 1);
                }
            }
            ExprKind::Let { bindings, body } => {
                self.node(depth, kind, line);
                for b in bindings {
                    self.node(depth + 1, &format!("binding {} : {}", b.name, b.ty), b.span.line);
                    if let Some(init) = &b.init {
                        self.expr(init, depth + 2);
                    }
                }
                self.expr(body, depth + 1);
            }
            ExprKind::Case { scrutinee, branches } => {
                self.node(depth, kind, line);
                self.expr(scrutinee, depth + 1);
                for b in branches {
                    self.node(depth + 1, &format!("branch {} : {}", b.name, b.ty), b.span.line);
                    self.expr(&b.body, depth + 2);
                }
            }
            ExprKind::New(t) => self.node(depth, &format!("{kind} {t}"), line),
            ExprKind::IsVoid(inner) | ExprKind::Neg(inner) | ExprKind::Not(inner) | ExprKind::Paren(inner) => {
                self.node(depth, kind, line);
                self.expr(inner, depth + 1);
            }
            ExprKind::BinOp { op, lhs, rhs } => {
                self.node(depth, &format!("{kind} {op}"), line);
                self.expr(lhs, depth + 1);
                self.expr(rhs, depth + 1);
            }
            ExprKind::Identifier(id) => self.node(depth, &format!("{kind} {id}"), line),
            ExprKind::IntConst(i) => self.node(depth, &format!("{kind} {i}"), line),
            ExprKind::StringConst(s) => self.node(depth, &format!("{kind} {}", quote(s)), line),
            ExprKind::BoolConst(b) => self.node(depth, &format!("{kind} {b}"), line),
        }
    }
}

pub fn dump_program(program: &Program) -> String {
    let mut d = Dumper { out: String::new() };
    let first_line = program.classes.first().map_or(1, |c| c.span.line);
    d.node(0, "program", first_line);
    for class in &program.classes {
        let label = match &class.parent {
            Some(p) => format!("class {} inherits {p}", class.name),
            None => format!("class {}", class.name),
        };
        d.node(1, &label, class.span.line);
        for feature in &class.features {
            match feature {
                Feature::Attribute(a) => {
                    d.node(2, &format!("attribute {} : {}", a.name, a.declared_type), a.span.line);
                    if let Some(init) = &a.init {
                        d.expr(init, 3);
                    }
                }
                Feature::Method(m) => {
                    d.node(2, &format!("method {} : {}", m.name, m.return_type), m.span.line);
                    for f in &m.formals {
                        d.node(3, &format!("formal {} : {}", f.name, f.ty), f.span.line);
                    }
                    d.expr(&m.body, 3);
                }
            }
        }
    }
    d.out
}

/// The user classes of a checked program with their own features.
pub fn dump_class_map(table: &ClassTable) -> String {
    let mut out = String::new();
    for info in table.classes().filter(|c| !c.is_builtin()) {
        let parent = info.parent.as_deref().unwrap_or("Object");
        let _ = writeln!(out, "class {} inherits {parent}", info.name);
        for (name, ty) in &info.attributes {
            let _ = writeln!(out, "  attribute {name} : {ty}");
        }
        for sig in info.methods.values() {
            let formals: Vec<String> = sig.formals.iter().map(|(n, t)| format!("{n} : {t}")).collect();
            let _ = writeln!(out, "  method {}({}) : {}", sig.name, formals.join(", "), sig.return_type);
        }
    }
    out
}
