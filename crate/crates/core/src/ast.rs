//! Syntax tree for COOL programs.
//!
//! Every node carries its [`SourceSpan`]. Expressions also carry a slot for
//! the static type the checker infers.

use std::fmt;

use crate::span::SourceSpan;

/// A static type: either a class name or `SELF_TYPE`, whose meaning depends
/// on the class in which it appears.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Type {
    Class(String),
    SelfType,
}

pub const SELF_TYPE: &str = "SELF_TYPE";

impl Type {
    pub fn named(name: impl Into<String>) -> Type {
        let name = name.into();
        if name == SELF_TYPE {
            Type::SelfType
        } else {
            Type::Class(name)
        }
    }

    pub fn object() -> Type {
        Type::Class("Object".to_string())
    }

    pub fn is_self_type(&self) -> bool {
        matches!(self, Type::SelfType)
    }

    /// `SELF_TYPE` resolved against `current_class`.
    pub fn resolve<'a>(&'a self, current_class: &'a str) -> &'a str {
        match self {
            Type::Class(name) => name,
            Type::SelfType => current_class,
        }
    }

    pub fn is(&self, name: &str) -> bool {
        matches!(self, Type::Class(n) if n == name)
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Class(name) => f.write_str(name),
            Type::SelfType => f.write_str(SELF_TYPE),
        }
    }
}

/// An identifier occurrence: object name, method name or type name.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ident {
    pub name: String,
    pub span: SourceSpan,
}

impl Ident {
    pub fn new(name: impl Into<String>, span: SourceSpan) -> Self {
        Ident {
            name: name.into(),
            span,
        }
    }
}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Program {
    pub classes: Vec<Class>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Class {
    pub name: Ident,
    /// `None` means the class implicitly inherits from `Object`.
    pub parent: Option<Ident>,
    pub features: Vec<Feature>,
    pub span: SourceSpan,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Feature {
    Method(Method),
    Attribute(Attribute),
}

impl Feature {
    pub fn name(&self) -> &Ident {
        match self {
            Feature::Method(m) => &m.name,
            Feature::Attribute(a) => &a.name,
        }
    }

    pub fn span(&self) -> SourceSpan {
        match self {
            Feature::Method(m) => m.span,
            Feature::Attribute(a) => a.span,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Method {
    pub name: Ident,
    pub formals: Vec<Formal>,
    pub return_type: Ident,
    pub body: Expr,
    pub span: SourceSpan,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Formal {
    pub name: Ident,
    pub ty: Ident,
    pub span: SourceSpan,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Attribute {
    pub name: Ident,
    pub declared_type: Ident,
    pub init: Option<Expr>,
    pub span: SourceSpan,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: SourceSpan,
    /// Filled in by the type checker.
    pub static_type: Option<Type>,
}

impl Expr {
    pub fn new(kind: ExprKind, span: SourceSpan) -> Self {
        Expr {
            kind,
            span,
            static_type: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Lt,
    Le,
    Eq,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Eq => "=",
        }
    }

    pub fn is_arithmetic(self) -> bool {
        matches!(self, BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div)
    }
}

impl fmt::Display for BinOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LetBinding {
    pub name: Ident,
    pub ty: Ident,
    pub init: Option<Expr>,
    pub span: SourceSpan,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaseBranch {
    pub name: Ident,
    pub ty: Ident,
    pub body: Expr,
    pub span: SourceSpan,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExprKind {
    Assign {
        name: Ident,
        value: Box<Expr>,
    },
    /// `receiver[@static_type].method(args)`; a missing receiver is an
    /// implicit dispatch on `self`.
    Dispatch {
        receiver: Option<Box<Expr>>,
        static_type: Option<Ident>,
        method: Ident,
        args: Vec<Expr>,
    },
    If {
        cond: Box<Expr>,
        then_branch: Box<Expr>,
        else_branch: Box<Expr>,
    },
    While {
        cond: Box<Expr>,
        body: Box<Expr>,
    },
    Block(Vec<Expr>),
    Let {
        bindings: Vec<LetBinding>,
        body: Box<Expr>,
    },
    Case {
        scrutinee: Box<Expr>,
        branches: Vec<CaseBranch>,
    },
    New(Ident),
    IsVoid(Box<Expr>),
    Neg(Box<Expr>),
    Not(Box<Expr>),
    Paren(Box<Expr>),
    BinOp {
        op: BinOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Identifier(Ident),
    IntConst(i32),
    StringConst(String),
    BoolConst(bool),
}

impl ExprKind {
    /// Short node name, as used in tree dumps.
    pub fn name(&self) -> &'static str {
        match self {
            ExprKind::Assign { .. } => "assign",
            ExprKind::Dispatch {
                static_type: Some(_),
                ..
            } => "static_dispatch",
            ExprKind::Dispatch { receiver: None, .. } => "self_dispatch",
            ExprKind::Dispatch { .. } => "dispatch",
            ExprKind::If { .. } => "if",
            ExprKind::While { .. } => "while",
            ExprKind::Block(_) => "block",
            ExprKind::Let { .. } => "let",
            ExprKind::Case { .. } => "case",
            ExprKind::New(_) => "new",
            ExprKind::IsVoid(_) => "isvoid",
            ExprKind::Neg(_) => "neg",
            ExprKind::Not(_) => "not",
            ExprKind::Paren(_) => "paren",
            ExprKind::BinOp { .. } => "binop",
            ExprKind::Identifier(_) => "identifier",
            ExprKind::IntConst(_) => "int",
            ExprKind::StringConst(_) => "string",
            ExprKind::BoolConst(_) => "bool",
        }
    }
}

/// Direct sub-expressions in evaluation order.
pub fn children(expr: &Expr) -> Vec<&Expr> {
    let mut out = Vec::new();
    match &expr.kind {
        ExprKind::Assign { value, .. } => out.push(&**value),
        ExprKind::Dispatch { receiver, args, .. } => {
            out.extend(receiver.as_deref());
            out.extend(args.iter());
        }
        ExprKind::If {
            cond,
            then_branch,
            else_branch,
        } => out.extend([&**cond, &**then_branch, &**else_branch]),
        ExprKind::While { cond, body } => out.extend([&**cond, &**body]),
        ExprKind::Block(items) => out.extend(items.iter()),
        ExprKind::Let { bindings, body } => {
            out.extend(bindings.iter().filter_map(|b| b.init.as_ref()));
            out.push(body);
        }
        ExprKind::Case {
            scrutinee,
            branches,
        } => {
            out.push(scrutinee);
            out.extend(branches.iter().map(|b| &b.body));
        }
        ExprKind::IsVoid(e) | ExprKind::Neg(e) | ExprKind::Not(e) | ExprKind::Paren(e) => {
            out.push(e)
        }
        ExprKind::BinOp { lhs, rhs, .. } => out.extend([&**lhs, &**rhs]),
        ExprKind::New(_)
        | ExprKind::Identifier(_)
        | ExprKind::IntConst(_)
        | ExprKind::StringConst(_)
        | ExprKind::BoolConst(_) => {}
    }
    out
}

/// Calls `f` on `expr` and every expression nested inside it, parents first.
pub fn walk<'a>(expr: &'a Expr, f: &mut dyn FnMut(&'a Expr)) {
    f(expr);
    for child in children(expr) {
        walk(child, f);
    }
}

/// Every expression in the program, parents first.
pub fn program_exprs(program: &Program) -> Vec<&Expr> {
    let mut out = Vec::new();
    for class in &program.classes {
        for feature in &class.features {
            let root = match feature {
                Feature::Method(m) => Some(&m.body),
                Feature::Attribute(a) => a.init.as_ref(),
            };
            if let Some(root) = root {
                walk(root, &mut |e| out.push(e));
            }
        }
    }
    out
}

impl Program {
    /// A copy with spans and inferred types erased and parentheses removed,
    /// for comparing trees by structure alone.
    pub fn normalized(&self) -> Program {
        Program {
            classes: self.classes.iter().map(normalize_class).collect(),
        }
    }
}

impl Expr {
    /// See [`Program::normalized`].
    pub fn normalized(&self) -> Expr {
        normalize_expr(self)
    }
}

fn nid(id: &Ident) -> Ident {
    Ident::new(id.name.clone(), SourceSpan::default())
}

fn normalize_class(c: &Class) -> Class {
    Class {
        name: nid(&c.name),
        parent: c.parent.as_ref().map(nid),
        features: c
            .features
            .iter()
            .map(|f| match f {
                Feature::Method(m) => Feature::Method(Method {
                    name: nid(&m.name),
                    formals: m
                        .formals
                        .iter()
                        .map(|p| Formal {
                            name: nid(&p.name),
                            ty: nid(&p.ty),
                            span: SourceSpan::default(),
                        })
                        .collect(),
                    return_type: nid(&m.return_type),
                    body: normalize_expr(&m.body),
                    span: SourceSpan::default(),
                }),
                Feature::Attribute(a) => Feature::Attribute(Attribute {
                    name: nid(&a.name),
                    declared_type: nid(&a.declared_type),
                    init: a.init.as_ref().map(normalize_expr),
                    span: SourceSpan::default(),
                }),
            })
            .collect(),
        span: SourceSpan::default(),
    }
}

fn normalize_expr(e: &Expr) -> Expr {
    let b = |e: &Expr| Box::new(normalize_expr(e));
    let kind = match &e.kind {
        ExprKind::Paren(inner) => return normalize_expr(inner),
        ExprKind::Assign { name, value } => ExprKind::Assign {
            name: nid(name),
            value: b(value),
        },
        ExprKind::Dispatch {
            receiver,
            static_type,
            method,
            args,
        } => ExprKind::Dispatch {
            receiver: receiver.as_deref().map(b),
            static_type: static_type.as_ref().map(nid),
            method: nid(method),
            args: args.iter().map(normalize_expr).collect(),
        },
        ExprKind::If {
            cond,
            then_branch,
            else_branch,
        } => ExprKind::If {
            cond: b(cond),
            then_branch: b(then_branch),
            else_branch: b(else_branch),
        },
        ExprKind::While { cond, body } => ExprKind::While {
            cond: b(cond),
            body: b(body),
        },
        ExprKind::Block(items) => ExprKind::Block(items.iter().map(normalize_expr).collect()),
        ExprKind::Let { bindings, body } => ExprKind::Let {
            bindings: bindings
                .iter()
                .map(|l| LetBinding {
                    name: nid(&l.name),
                    ty: nid(&l.ty),
                    init: l.init.as_ref().map(normalize_expr),
                    span: SourceSpan::default(),
                })
                .collect(),
            body: b(body),
        },
        ExprKind::Case {
            scrutinee,
            branches,
        } => ExprKind::Case {
            scrutinee: b(scrutinee),
            branches: branches
                .iter()
                .map(|br| CaseBranch {
                    name: nid(&br.name),
                    ty: nid(&br.ty),
                    body: normalize_expr(&br.body),
                    span: SourceSpan::default(),
                })
                .collect(),
        },
        ExprKind::New(t) => ExprKind::New(nid(t)),
        ExprKind::IsVoid(inner) => ExprKind::IsVoid(b(inner)),
        ExprKind::Neg(inner) => ExprKind::Neg(b(inner)),
        ExprKind::Not(inner) => ExprKind::Not(b(inner)),
        ExprKind::BinOp { op, lhs, rhs } => ExprKind::BinOp {
            op: *op,
            lhs: b(lhs),
            rhs: b(rhs),
        },
        ExprKind::Identifier(id) => ExprKind::Identifier(nid(id)),
        ExprKind::IntConst(i) => ExprKind::IntConst(*i),
        ExprKind::StringConst(s) => ExprKind::StringConst(s.clone()),
        ExprKind::BoolConst(v) => ExprKind::BoolConst(*v),
    };
    Expr::new(kind, SourceSpan::default())
}
