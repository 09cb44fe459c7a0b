use std::collections::HashMap;

use super::class_table::{ClassTable, BOOL, INT, STRING};
use crate::ast::*;
use crate::diagnostics::{Diagnostic, Phase};
use crate::span::SourceSpan;

/// Type-checks every class in `program` that made it into `table`, filling
/// in each expression's `static_type`. An expression that fails to check is
/// given type `Object` so checking of the enclosing expression continues.
pub fn typecheck(table: &ClassTable, program: &mut Program) -> Vec<Diagnostic> {
    let owners: HashMap<usize, String> = table
        .classes()
        .filter_map(|c| c.decl_index.map(|i| (i, c.name.clone())))
        .collect();
    let mut diags = Vec::new();
    for (index, class) in program.classes.iter_mut().enumerate() {
        let Some(name) = owners.get(&index) else {
            continue;
        };
        let mut checker = Checker {
            table,
            class: name,
            scopes: Vec::new(),
            diags: &mut diags,
        };
        for feature in &mut class.features {
            checker.feature(feature);
        }
    }
    diags
}

/// Lexical environment of one class body.
struct Checker<'a> {
    table: &'a ClassTable,
    class: &'a str,
    scopes: Vec<(String, Type)>,
    diags: &'a mut Vec<Diagnostic>,
}

impl Checker<'_> {
    fn error(&mut self, span: SourceSpan, message: String) {
        self.diags
            .push(Diagnostic::at(Phase::Typechecking, span, message));
    }

    /// Conformance, treating undefined types (already reported) as
    /// conforming to avoid cascades.
    fn conforms(&self, t1: &Type, t2: &Type) -> bool {
        self.table.conforms(t1, t2, self.class).unwrap_or(true)
    }

    fn join(&self, t1: &Type, t2: &Type) -> Type {
        self.table
            .join(t1, t2, self.class)
            .unwrap_or_else(|_| Type::object())
    }

    fn lookup(&self, name: &str) -> Option<Type> {
        if name == "self" {
            return Some(Type::SelfType);
        }
        if let Some((_, t)) = self.scopes.iter().rev().find(|(n, _)| n == name) {
            return Some(t.clone());
        }
        self.table.lookup_attribute(self.class, name).cloned()
    }

    /// The declared type named by `id`, or `Object` if it is not defined.
    fn declared(&self, id: &Ident) -> Type {
        let ty = Type::named(id.name.clone());
        if self.table.is_defined(&ty) {
            ty
        } else {
            Type::object()
        }
    }

    fn feature(&mut self, feature: &mut Feature) {
        match feature {
            Feature::Attribute(attr) => {
                let declared = self.declared(&attr.declared_type);
                if let Some(init) = &mut attr.init {
                    let t = self.expr(init);
                    if !self.conforms(&t, &declared) {
                        self.error(
                            attr.span,
                            format!(
                                "{t} does not conform to {declared} in initialization of attribute {}",
                                attr.name
                            ),
                        );
                    }
                }
            }
            Feature::Method(method) => {
                self.scopes.clear();
                for formal in &method.formals {
                    if formal.name.name == "self" {
                        continue;
                    }
                    let ty = match self.declared(&formal.ty) {
                        Type::SelfType => Type::object(),
                        t => t,
                    };
                    self.scopes.push((formal.name.name.clone(), ty));
                }
                let declared = self.declared(&method.return_type);
                let t = self.expr(&mut method.body);
                if !self.conforms(&t, &declared) {
                    self.error(
                        method.body.span,
                        format!(
                            "{t} does not conform to declared return type {declared} of method {}",
                            method.name
                        ),
                    );
                }
                self.scopes.clear();
            }
        }
    }

    fn expr(&mut self, expr: &mut Expr) -> Type {
        let ty = self.infer(expr);
        expr.static_type = Some(ty.clone());
        ty
    }

    fn expect_int(&mut self, operand: &mut Expr, what: &str) {
        let t = self.expr(operand);
        if !t.is(INT) {
            self.error(operand.span, format!("{what} is not Int (found {t})"));
        }
    }

    fn infer(&mut self, expr: &mut Expr) -> Type {
        let span = expr.span;
        match &mut expr.kind {
            ExprKind::IntConst(_) => Type::named(INT),
            ExprKind::StringConst(_) => Type::named(STRING),
            ExprKind::BoolConst(_) => Type::named(BOOL),
            ExprKind::Identifier(id) => match self.lookup(&id.name) {
                Some(t) => t,
                None => {
                    self.error(id.span, format!("undeclared identifier {}", id.name));
                    Type::object()
                }
            },
            ExprKind::Assign { name, value } => {
                let t = self.expr(value);
                if name.name == "self" {
                    self.error(name.span, "cannot assign to 'self'".into());
                    return t;
                }
                match self.lookup(&name.name) {
                    None => self.error(name.span, format!("undeclared identifier {}", name.name)),
                    Some(declared) => {
                        if !self.conforms(&t, &declared) {
                            self.error(
                                span,
                                format!("{t} does not conform to {declared} in assignment to {name}"),
                            );
                        }
                    }
                }
                t
            }
            ExprKind::Dispatch {
                receiver,
                static_type,
                method,
                args,
            } => {
                let recv_ty = match receiver {
                    Some(r) => self.expr(r),
                    None => Type::SelfType,
                };
                let arg_types: Vec<(Type, SourceSpan)> =
                    args.iter_mut().map(|a| (self.expr(a), a.span)).collect();

                let lookup_class = match static_type {
                    Some(st) => {
                        if st.name == SELF_TYPE {
                            self.error(st.span, "static dispatch to SELF_TYPE is not allowed".into());
                            return Type::object();
                        }
                        if !self.table.contains(&st.name) {
                            self.error(st.span, format!("static dispatch to undefined class {}", st.name));
                            return Type::object();
                        }
                        let target = Type::named(st.name.clone());
                        if !self.conforms(&recv_ty, &target) {
                            self.error(
                                span,
                                format!("{recv_ty} does not conform to {target} in static dispatch"),
                            );
                            return Type::object();
                        }
                        st.name.clone()
                    }
                    None => recv_ty.resolve(self.class).to_string(),
                };

                let Some(sig) = self.table.lookup_method(&lookup_class, &method.name) else {
                    self.error(
                        method.span,
                        format!("dispatch to undefined method {} in class {lookup_class}", method.name),
                    );
                    return Type::object();
                };
                if sig.arity() != arg_types.len() {
                    self.error(
                        span,
                        format!(
                            "method {} called with {} arguments but takes {}",
                            method.name,
                            arg_types.len(),
                            sig.arity()
                        ),
                    );
                } else {
                    for ((actual, arg_span), (pname, formal)) in arg_types.iter().zip(&sig.formals) {
                        if !self.conforms(actual, formal) {
                            self.error(
                                *arg_span,
                                format!(
                                    "{actual} does not conform to {formal} for parameter {pname} of method {}",
                                    method.name
                                ),
                            );
                        }
                    }
                }
                match &sig.return_type {
                    Type::SelfType => recv_ty,
                    t => t.clone(),
                }
            }
            ExprKind::If {
                cond,
                then_branch,
                else_branch,
            } => {
                let c = self.expr(cond);
                if !c.is(BOOL) {
                    self.error(cond.span, format!("predicate of 'if' is not Bool (found {c})"));
                }
                let a = self.expr(then_branch);
                let b = self.expr(else_branch);
                self.join(&a, &b)
            }
            ExprKind::While { cond, body } => {
                let c = self.expr(cond);
                if !c.is(BOOL) {
                    self.error(cond.span, format!("loop condition is not Bool (found {c})"));
                }
                self.expr(body);
                Type::object()
            }
            ExprKind::Block(items) => {
                let mut last = Type::object();
                for item in items.iter_mut() {
                    last = self.expr(item);
                }
                last
            }
            ExprKind::Let { bindings, body } => {
                let depth = self.scopes.len();
                for binding in bindings.iter_mut() {
                    let declared = Type::named(binding.ty.name.clone());
                    let declared = if self.table.is_defined(&declared) {
                        declared
                    } else {
                        self.error(
                            binding.ty.span,
                            format!("undefined type {} in let binding {}", binding.ty.name, binding.name),
                        );
                        Type::object()
                    };
                    if let Some(init) = &mut binding.init {
                        let t = self.expr(init);
                        if !self.conforms(&t, &declared) {
                            self.error(
                                binding.span,
                                format!(
                                    "{t} does not conform to {declared} in initialization of {}",
                                    binding.name
                                ),
                            );
                        }
                    }
                    if binding.name.name == "self" {
                        self.error(binding.name.span, "'self' cannot be bound in a let expression".into());
                    } else {
                        self.scopes.push((binding.name.name.clone(), declared));
                    }
                }
                let t = self.expr(body);
                self.scopes.truncate(depth);
                t
            }
            ExprKind::Case {
                scrutinee,
                branches,
            } => {
                self.expr(scrutinee);
                let mut seen: Vec<&str> = Vec::new();
                let mut result: Option<Type> = None;
                for branch in branches.iter_mut() {
                    let tname = branch.ty.name.as_str();
                    let ty = if tname == SELF_TYPE {
                        self.error(branch.ty.span, "case branch cannot have type SELF_TYPE".into());
                        Type::object()
                    } else if !self.table.contains(tname) {
                        self.error(branch.ty.span, format!("undefined type {tname} in case branch"));
                        Type::object()
                    } else {
                        if seen.contains(&tname) {
                            self.error(
                                branch.ty.span,
                                format!("duplicate branch {tname} in case expression"),
                            );
                        }
                        Type::named(tname)
                    };
                    seen.push(tname);
                    let depth = self.scopes.len();
                    if branch.name.name == "self" {
                        self.error(branch.name.span, "'self' cannot be bound in a case branch".into());
                    } else {
                        self.scopes.push((branch.name.name.clone(), ty));
                    }
                    let t = self.expr(&mut branch.body);
                    self.scopes.truncate(depth);
                    result = Some(match result {
                        None => t,
                        Some(prev) => self.join(&prev, &t),
                    });
                }
                result.unwrap_or_else(Type::object)
            }
            ExprKind::New(t) => {
                let ty = Type::named(t.name.clone());
                if self.table.is_defined(&ty) {
                    ty
                } else {
                    self.error(t.span, format!("'new' used with undefined class {}", t.name));
                    Type::object()
                }
            }
            ExprKind::IsVoid(e) => {
                self.expr(e);
                Type::named(BOOL)
            }
            ExprKind::Neg(e) => {
                self.expect_int(e, "argument of '~'");
                Type::named(INT)
            }
            ExprKind::Not(e) => {
                let t = self.expr(e);
                if !t.is(BOOL) {
                    self.error(e.span, format!("argument of 'not' is not Bool (found {t})"));
                }
                Type::named(BOOL)
            }
            ExprKind::Paren(e) => self.expr(e),
            ExprKind::BinOp { op, lhs, rhs } => {
                let op = *op;
                if op == BinOp::Eq {
                    let a = self.expr(lhs);
                    let b = self.expr(rhs);
                    let basic = |t: &Type| t.is(INT) || t.is(STRING) || t.is(BOOL);
                    if (basic(&a) || basic(&b)) && a != b {
                        self.error(span, format!("illegal comparison of {a} with {b}"));
                    }
                    return Type::named(BOOL);
                }
                let name = op.symbol();
                self.expect_int(lhs, &format!("left operand of {name}"));
                self.expect_int(rhs, &format!("right operand of {name}"));
                if op.is_arithmetic() {
                    Type::named(INT)
                } else {
                    Type::named(BOOL)
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_source;
    use crate::semantics::build_class_table;

    fn check(src: &str) -> (Program, Vec<Diagnostic>) {
        let (mut program, diags) = parse_source(src);
        assert!(diags.is_empty(), "{diags:?}");
        let (table, mut diags) = build_class_table(&program);
        diags.extend(typecheck(&table, &mut program));
        (program, diags)
    }

    fn messages(src: &str) -> Vec<String> {
        check(src).1.into_iter().map(|d| d.message).collect()
    }

    /// Static type of the body of `main`, which returns Object.
    fn main_type(body: &str) -> (Type, Vec<String>) {
        let src = format!("class Main {{ main() : Object {{ {body} }}; }};");
        let (program, diags) = check(&src);
        let Feature::Method(m) = &program.classes[0].features[0] else {
            panic!()
        };
        (
            m.body.static_type.clone().unwrap(),
            diags.into_iter().map(|d| d.message).collect(),
        )
    }

    #[test]
    fn string_attribute_for_int() {
        let src = "class Main inherits IO {\n  num : Int <- \"hello\";\n  main() : Object { 0 };\n};\n";
        let (_, diags) = check(src);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].line, 2);
        assert!(diags[0].message.starts_with("String does not conform to Int"));
    }

    #[test]
    fn arithmetic_is_int() {
        assert_eq!(main_type("1 + 2"), (Type::named("Int"), vec![]));
        assert_eq!(main_type("~3 * 4 / 2 - 1").0, Type::named("Int"));
    }

    #[test]
    fn if_joins_branches() {
        assert_eq!(main_type("if true then 1 else \"s\" fi"), (Type::object(), vec![]));
        assert_eq!(main_type("if true then 1 else 2 fi").0, Type::named("Int"));
    }

    #[test]
    fn non_int_operand() {
        let (t, diags) = main_type("\"a\" + 1");
        assert_eq!(t, Type::named("Int"));
        assert_eq!(diags, vec!["left operand of + is not Int (found String)"]);
        let (_, diags) = main_type("1 < true");
        assert_eq!(diags, vec!["right operand of < is not Int (found Bool)"]);
    }

    #[test]
    fn comparison_and_equality() {
        assert_eq!(main_type("1 <= 2"), (Type::named("Bool"), vec![]));
        assert_eq!(main_type("new Object = new IO"), (Type::named("Bool"), vec![]));
        assert_eq!(main_type("\"a\" = \"b\"").1, Vec::<String>::new());
        assert_eq!(main_type("1 = \"b\"").1, vec!["illegal comparison of Int with String"]);
        assert_eq!(main_type("new Object = 1").1, vec!["illegal comparison of Object with Int"]);
    }

    #[test]
    fn unary_operators() {
        assert_eq!(main_type("not true"), (Type::named("Bool"), vec![]));
        assert_eq!(main_type("isvoid 3"), (Type::named("Bool"), vec![]));
        assert_eq!(main_type("not 3").1, vec!["argument of 'not' is not Bool (found Int)"]);
        assert_eq!(main_type("~true").1, vec!["argument of '~' is not Int (found Bool)"]);
    }

    #[test]
    fn while_is_object_and_needs_bool() {
        assert_eq!(main_type("while false loop 1 pool"), (Type::object(), vec![]));
        assert_eq!(main_type("while 1 loop 1 pool").1, vec!["loop condition is not Bool (found Int)"]);
        assert_eq!(main_type("if 1 then 1 else 1 fi").1, vec!["predicate of 'if' is not Bool (found Int)"]);
    }

    #[test]
    fn let_scoping_and_defaults() {
        assert_eq!(main_type("let x : Int <- 1, y : Int <- x + 1 in y"), (Type::named("Int"), vec![]));
        assert_eq!(
            main_type("let x : Int <- \"s\" in x").1,
            vec!["String does not conform to Int in initialization of x"]
        );
        assert_eq!(main_type("let x : Nope in x").1, vec!["undefined type Nope in let binding x"]);
        assert_eq!(main_type("let self : Int in 0").1, vec!["'self' cannot be bound in a let expression"]);
        assert_eq!(main_type("{ let x : Int in x; x; }").1, vec!["undeclared identifier x"]);
    }

    #[test]
    fn case_rules() {
        assert_eq!(
            main_type("case 1 of x : Int => x; y : String => y; esac"),
            (Type::object(), vec![])
        );
        assert_eq!(main_type("case 1 of x : Int => x; esac").0, Type::named("Int"));
        assert_eq!(
            main_type("case 1 of x : Int => x; y : Int => y; esac").1,
            vec!["duplicate branch Int in case expression"]
        );
        assert_eq!(
            main_type("case 1 of x : SELF_TYPE => x; esac").1,
            vec!["case branch cannot have type SELF_TYPE"]
        );
    }

    #[test]
    fn assignment_rules() {
        assert_eq!(main_type("let x : Object in x <- 3"), (Type::named("Int"), vec![]));
        assert_eq!(
            main_type("let x : Int in x <- \"s\"").1,
            vec!["String does not conform to Int in assignment to x"]
        );
        assert_eq!(main_type("self <- self").1, vec!["cannot assign to 'self'"]);
        assert_eq!(main_type("y <- 1").1, vec!["undeclared identifier y"]);
    }

    #[test]
    fn dispatch_rules() {
        let src = "class A {\n  f(x : Int) : SELF_TYPE { self };\n  g() : Int { 1 };\n};\n\
                   class B inherits A {\n  g() : Int { 2 };\n};\n\
                   class Main {\n  main() : Object {{\n\
                   (new B).f(1).g();\n\
                   (new B)@A.g();\n\
                   (new A)@B.g();\n\
                   (new A).f(\"s\");\n\
                   (new A).f();\n\
                   (new A).h();\n\
                   (new A)@Zip.g();\n\
                   \"abc\".substr(1, 2).length();\n\
                   }};\n};\n";
        let (program, diags) = check(src);
        let msgs: Vec<&str> = diags.iter().map(|d| d.message.as_str()).collect();
        assert_eq!(
            msgs,
            vec![
                "A does not conform to B in static dispatch",
                "String does not conform to Int for parameter x of method f",
                "method f called with 0 arguments but takes 1",
                "dispatch to undefined method h in class A",
                "static dispatch to undefined class Zip",
            ]
        );
        // (new B).f(1) has type B because f returns SELF_TYPE
        let exprs = program_exprs(&program);
        let f_call = exprs
            .iter()
            .find(|e| matches!(&e.kind, ExprKind::Dispatch { method, .. } if method.name == "f"))
            .unwrap();
        assert_eq!(f_call.static_type, Some(Type::named("B")));
    }

    #[test]
    fn self_type_flows() {
        let src = "class Main inherits IO {\n  me : SELF_TYPE <- self;\n  main() : SELF_TYPE { out_string(\"x\").copy() };\n};";
        let (program, diags) = check(src);
        assert!(diags.is_empty(), "{diags:?}");
        let Feature::Method(m) = &program.classes[0].features[1] else {
            panic!()
        };
        assert_eq!(m.body.static_type, Some(Type::SelfType));
        assert_eq!(
            messages("class Main { main() : SELF_TYPE { new Main }; };"),
            vec!["Main does not conform to declared return type SELF_TYPE of method main"]
        );
        assert!(messages("class Main { main() : Main { new SELF_TYPE }; };").is_empty());
    }

    #[test]
    fn attributes_visible_in_initializers_and_methods() {
        let src = "class A { a : Int <- b + 1; b : Int <- 2; };\n\
                   class Main inherits A { c : Int <- a * b; main() : Int { a + b + c }; };";
        assert!(messages(src).is_empty());
    }

    #[test]
    fn formals_shadow_attributes() {
        let src = "class Main { x : String; main() : Object { f(1) }; f(x : Int) : Int { x + 1 }; };";
        assert!(messages(src).is_empty());
    }

    #[test]
    fn undefined_new() {
        assert_eq!(main_type("new Nope").1, vec!["'new' used with undefined class Nope"]);
    }

    #[test]
    fn every_expression_gets_a_type() {
        let src = "class Main inherits IO {\n  main() : Object {{\n    out_string(\"hi\");\n    let i : Int <- 0 in while i < 3 loop i <- i + 1 pool;\n    case self of m : Main => m; o : Object => o; esac;\n    not isvoid (new Object);\n  }};\n};";
        let (program, diags) = check(src);
        assert!(diags.is_empty(), "{diags:?}");
        let table = build_class_table(&program).0;
        for e in program_exprs(&program) {
            let t = e.static_type.as_ref().expect("type slot filled");
            assert!(table.is_defined(t));
        }
    }

    #[test]
    fn deterministic() {
        let src = "class Main { main() : Object { 1 + \"a\" + (new Nope) }; x : Int <- true; };";
        assert_eq!(check(src), check(src));
    }
}
