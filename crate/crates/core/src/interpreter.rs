//! Tree-walking evaluator.
//!
//! Objects live in an arena [`Store`] addressed by [`Location`]. Environments
//! map identifiers to locations, so assignment writes through to the store and
//! every alias observes it.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::rc::Rc;

use indexmap::IndexMap;

use crate::ast::*;
use crate::diagnostics::{Diagnostic, Phase};
use crate::semantics::{ClassTable, BOOL, INT, IO, OBJECT, STRING};
use crate::span::SourceSpan;

/// Default limit on nested method calls and object constructions.
pub const DEFAULT_MAX_DEPTH: usize = 10_000;

/// Stack size of the thread [`run_program`] evaluates on.
const EVAL_STACK_BYTES: usize = 512 * 1024 * 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Location(pub usize);

#[derive(Debug)]
pub struct Object {
    pub class: String,
    pub attrs: IndexMap<String, Location>,
}

#[derive(Clone, Debug)]
pub enum Value {
    Int(i32),
    Str(Rc<str>),
    Bool(bool),
    Void,
    Object(Rc<Object>),
}

impl Value {
    pub fn string(s: &str) -> Value {
        Value::Str(Rc::from(s))
    }

    /// Dynamic class of the value; `None` for void.
    pub fn class_name(&self) -> Option<&str> {
        match self {
            Value::Int(_) => Some(INT),
            Value::Str(_) => Some(STRING),
            Value::Bool(_) => Some(BOOL),
            Value::Void => None,
            Value::Object(o) => Some(&o.class),
        }
    }

    pub fn is_void(&self) -> bool {
        matches!(self, Value::Void)
    }

    /// `=` semantics: basic values by content, objects by identity.
    pub fn same(&self, other: &Value) -> bool {
        match (self, other) {
            (Value::Int(a), Value::Int(b)) => a == b,
            (Value::Str(a), Value::Str(b)) => a == b,
            (Value::Bool(a), Value::Bool(b)) => a == b,
            (Value::Void, Value::Void) => true,
            (Value::Object(a), Value::Object(b)) => Rc::ptr_eq(a, b),
            _ => false,
        }
    }

    /// Default value of an uninitialized variable of type `ty`.
    pub fn default_for(ty: &str) -> Value {
        match ty {
            INT => Value::Int(0),
            STRING => Value::string(""),
            BOOL => Value::Bool(false),
            _ => Value::Void,
        }
    }
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        self.same(other)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            Value::Str(s) => f.write_str(s),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Void => f.write_str("void"),
            Value::Object(o) => write!(f, "<{} object>", o.class),
        }
    }
}

#[derive(Debug, Default)]
pub struct Store {
    cells: Vec<Value>,
}

impl Store {
    pub fn alloc(&mut self, value: Value) -> Location {
        self.cells.push(value);
        Location(self.cells.len() - 1)
    }

    pub fn get(&self, loc: Location) -> Option<&Value> {
        self.cells.get(loc.0)
    }

    fn set(&mut self, loc: Location, value: Value) {
        self.cells[loc.0] = value;
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    /// Maximum number of evaluation steps; `None` is unlimited.
    pub fuel: Option<u64>,
    pub max_depth: usize,
    /// Check after every call that all reachable locations exist.
    pub audit: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            fuel: None,
            max_depth: DEFAULT_MAX_DEPTH,
            audit: false,
        }
    }
}

/// How evaluation stopped early.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RunError {
    Runtime(Diagnostic),
    Abort { class: String },
}

impl RunError {
    fn at(span: SourceSpan, message: impl Into<String>) -> RunError {
        RunError::Runtime(Diagnostic::at(Phase::Evaluation, span, message))
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Runtime(d) => f.write_str(&crate::diagnostics::format_diagnostic(d)),
            RunError::Abort { class } => write!(f, "abort called from class {class}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RunResult {
    Completed,
    Aborted { class: String },
    Error(Diagnostic),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunOutcome {
    pub output: String,
    pub result: RunResult,
    /// Evaluation steps taken.
    pub steps: u64,
    /// Locations verified by audit mode.
    pub audited: u64,
}

/// Runs `new Main.main()` on a dedicated thread with a large stack.
pub fn run_program(program: &Program, table: &ClassTable, input: &str, config: &RunConfig) -> RunOutcome {
    std::thread::scope(|scope| {
        std::thread::Builder::new()
            .name("cool-eval".into())
            .stack_size(EVAL_STACK_BYTES)
            .spawn_scoped(scope, || {
                let mut interp = Interpreter::new(program, table, input, config.clone());
                let result = match interp.run_main() {
                    Ok(_) => RunResult::Completed,
                    Err(RunError::Abort { class }) => RunResult::Aborted { class },
                    Err(RunError::Runtime(d)) => RunResult::Error(d),
                };
                RunOutcome {
                    output: std::mem::take(&mut interp.output),
                    result,
                    steps: interp.steps,
                    audited: interp.audited,
                }
            })
            .expect("spawn evaluator thread")
            .join()
            .expect("evaluator thread panicked")
    })
}

struct Frame {
    self_value: Value,
    scopes: Vec<(String, Location)>,
}

pub struct Interpreter<'p> {
    table: &'p ClassTable,
    methods: HashMap<(&'p str, &'p str), &'p Method>,
    attr_inits: HashMap<&'p str, Vec<&'p Attribute>>,
    store: Store,
    frames: Vec<Frame>,
    input: std::str::Lines<'p>,
    config: RunConfig,
    pub output: String,
    pub steps: u64,
    pub audited: u64,
}

impl<'p> Interpreter<'p> {
    pub fn new(program: &'p Program, table: &'p ClassTable, input: &'p str, config: RunConfig) -> Self {
        let mut methods = HashMap::new();
        let mut attr_inits: HashMap<&str, Vec<&Attribute>> = HashMap::new();
        for info in table.classes() {
            let Some(i) = info.decl_index else { continue };
            let class = &program.classes[i];
            for feature in &class.features {
                match feature {
                    Feature::Method(m) => {
                        methods.entry((info.name.as_str(), m.name.name.as_str())).or_insert(m);
                    }
                    Feature::Attribute(a) => {
                        let inits = attr_inits.entry(info.name.as_str()).or_default();
                        if !inits.iter().any(|b| b.name.name == a.name.name) {
                            inits.push(a);
                        }
                    }
                }
            }
        }
        Interpreter {
            table,
            methods,
            attr_inits,
            store: Store::default(),
            frames: Vec::new(),
            input: input.lines(),
            config,
            output: String::new(),
            steps: 0,
            audited: 0,
        }
    }

    pub fn store(&self) -> &Store {
        &self.store
    }

    /// Instantiates `Main` and calls its `main` method.
    pub fn run_main(&mut self) -> Result<Value, RunError> {
        let origin = SourceSpan::new(0, 0, 1, 1);
        let main = self.instantiate("Main", origin)?;
        let result = self.call(main, None, "main", Vec::new(), origin)?;
        if self.config.audit {
            self.audit()?;
        }
        Ok(result)
    }

    /// Evaluates `expr` with `self` bound to `self_value` and no locals.
    pub fn eval_expr(&mut self, expr: &Expr, self_value: Value) -> Result<Value, RunError> {
        self.frames.push(Frame {
            self_value,
            scopes: Vec::new(),
        });
        let result = self.eval(expr);
        self.frames.pop();
        result
    }

    fn frame(&mut self) -> &mut Frame {
        self.frames.last_mut().expect("evaluation outside of a frame")
    }

    fn enter(&mut self, frame: Frame, span: SourceSpan) -> Result<(), RunError> {
        if self.frames.len() >= self.config.max_depth {
            return Err(RunError::at(span, "call stack depth exceeded"));
        }
        self.frames.push(frame);
        Ok(())
    }

    fn lookup(&self, name: &str) -> Option<Location> {
        let frame = self.frames.last()?;
        if let Some((_, loc)) = frame.scopes.iter().rev().find(|(n, _)| n == name) {
            return Some(*loc);
        }
        match &frame.self_value {
            Value::Object(o) => o.attrs.get(name).copied(),
            _ => None,
        }
    }

    fn read(&self, loc: Location) -> Value {
        self.store.get(loc).cloned().unwrap_or(Value::Void)
    }

    /// Allocates an object of `class` with default attribute values, then
    /// runs attribute initializers, ancestors first.
    fn instantiate(&mut self, class: &str, span: SourceSpan) -> Result<Value, RunError> {
        match class {
            INT | STRING | BOOL => return Ok(Value::default_for(class)),
            _ => {}
        }
        let table = self.table;
        if !table.contains(class) {
            return Err(RunError::at(span, format!("internal error: unknown class {class}")));
        }
        let mut attrs = IndexMap::new();
        for (name, ty) in table.all_attributes(class) {
            let loc = self.store.alloc(Value::default_for(ty.resolve(class)));
            attrs.insert(name.to_string(), loc);
        }
        let obj = Value::Object(Rc::new(Object {
            class: class.to_string(),
            attrs,
        }));
        let mut chain = table.ancestors(class);
        chain.reverse();
        self.enter(
            Frame {
                self_value: obj.clone(),
                scopes: Vec::new(),
            },
            span,
        )?;
        let result = (|| {
            for c in chain {
                let inits = self.attr_inits.get(c).cloned().unwrap_or_default();
                for attr in inits {
                    if let Some(init) = &attr.init {
                        let v = self.eval(init)?;
                        let loc = self.lookup(&attr.name.name).expect("attribute allocated");
                        self.store.set(loc, v);
                    }
                }
            }
            Ok(())
        })();
        self.frames.pop();
        result.map(|_| obj)
    }

    fn copy(&mut self, value: &Value) -> Value {
        match value {
            Value::Object(o) => {
                let attrs = o
                    .attrs
                    .iter()
                    .map(|(n, loc)| {
                        let v = self.read(*loc);
                        (n.clone(), self.store.alloc(v))
                    })
                    .collect();
                Value::Object(Rc::new(Object {
                    class: o.class.clone(),
                    attrs,
                }))
            }
            v => v.clone(),
        }
    }

    fn call(
        &mut self,
        receiver: Value,
        static_class: Option<&str>,
        method: &str,
        args: Vec<Value>,
        span: SourceSpan,
    ) -> Result<Value, RunError> {
        let Some(dynamic) = receiver.class_name() else {
            return Err(RunError::at(span, "dispatch on void"));
        };
        let start = static_class.unwrap_or(dynamic).to_string();
        let table = self.table;
        let Some(owner) = table
            .ancestors(&start)
            .into_iter()
            .find(|c| table.get(c).is_some_and(|info| info.methods.contains_key(method)))
        else {
            return Err(RunError::at(span, format!("internal error: no method {method} in class {start}")));
        };
        if table.get(owner).is_some_and(|info| info.is_builtin()) {
            return self.builtin(owner, method, receiver, args, span);
        }
        let body = self.methods[&(owner, method)];
        let scopes = body
            .formals
            .iter()
            .zip(args)
            .map(|(f, v)| (f.name.name.clone(), self.store.alloc(v)))
            .collect();
        self.enter(
            Frame {
                self_value: receiver,
                scopes,
            },
            span,
        )?;
        let result = self.eval(&body.body);
        if result.is_ok() && self.config.audit {
            self.audit()?;
        }
        self.frames.pop();
        result
    }

    fn builtin(
        &mut self,
        class: &str,
        method: &str,
        receiver: Value,
        args: Vec<Value>,
        span: SourceSpan,
    ) -> Result<Value, RunError> {
        match (class, method, args.as_slice()) {
            (OBJECT, "abort", []) => Err(RunError::Abort {
                class: receiver.class_name().unwrap_or(OBJECT).to_string(),
            }),
            (OBJECT, "type_name", []) => Ok(Value::string(receiver.class_name().unwrap_or(OBJECT))),
            (OBJECT, "copy", []) => Ok(self.copy(&receiver)),
            (IO, "out_string", [Value::Str(s)]) => {
                self.output.push_str(s);
                Ok(receiver)
            }
            (IO, "out_int", [Value::Int(i)]) => {
                self.output.push_str(&i.to_string());
                Ok(receiver)
            }
            (IO, "in_string", []) => Ok(Value::string(self.input.next().unwrap_or(""))),
            (IO, "in_int", []) => {
                let line = self.input.next().unwrap_or("");
                Ok(Value::Int(line.trim().parse().unwrap_or(0)))
            }
            (STRING, "length", []) => match &receiver {
                Value::Str(s) => Ok(Value::Int(s.chars().count() as i32)),
                v => Err(confusion(span, STRING, v)),
            },
            (STRING, "concat", [Value::Str(t)]) => match &receiver {
                Value::Str(s) => Ok(Value::Str(Rc::from(format!("{s}{t}")))),
                v => Err(confusion(span, STRING, v)),
            },
            (STRING, "substr", [Value::Int(i), Value::Int(l)]) => match &receiver {
                Value::Str(s) => {
                    let len = s.chars().count() as i64;
                    let (i, l) = (*i as i64, *l as i64);
                    if i < 0 || l < 0 || i + l > len {
                        return Err(RunError::at(span, "substr out of range"));
                    }
                    let sub: String = s.chars().skip(i as usize).take(l as usize).collect();
                    Ok(Value::Str(Rc::from(sub)))
                }
                v => Err(confusion(span, STRING, v)),
            },
            _ => Err(RunError::at(
                span,
                format!("internal error: bad call to built-in {class}.{method}"),
            )),
        }
    }

    fn tick(&mut self, span: SourceSpan) -> Result<(), RunError> {
        self.steps += 1;
        if let Some(fuel) = self.config.fuel {
            if self.steps > fuel {
                return Err(RunError::at(span, "fuel exhausted"));
            }
        }
        Ok(())
    }

    fn eval_int(&mut self, expr: &Expr) -> Result<i32, RunError> {
        match self.eval(expr)? {
            Value::Int(i) => Ok(i),
            v => Err(confusion(expr.span, INT, &v)),
        }
    }

    fn eval_bool(&mut self, expr: &Expr) -> Result<bool, RunError> {
        match self.eval(expr)? {
            Value::Bool(b) => Ok(b),
            v => Err(confusion(expr.span, BOOL, &v)),
        }
    }

    fn self_class(&self) -> String {
        self.frames
            .last()
            .and_then(|f| f.self_value.class_name())
            .unwrap_or(OBJECT)
            .to_string()
    }

    pub fn eval(&mut self, expr: &Expr) -> Result<Value, RunError> {
        self.tick(expr.span)?;
        let span = expr.span;
        match &expr.kind {
            ExprKind::IntConst(i) => Ok(Value::Int(*i)),
            ExprKind::StringConst(s) => Ok(Value::string(s)),
            ExprKind::BoolConst(b) => Ok(Value::Bool(*b)),
            ExprKind::Identifier(id) => {
                if id.name == "self" {
                    return Ok(self.frame().self_value.clone());
                }
                match self.lookup(&id.name) {
                    Some(loc) => Ok(self.read(loc)),
                    None => Err(RunError::at(id.span, format!("internal error: unbound identifier {}", id.name))),
                }
            }
            ExprKind::Assign { name, value } => {
                let v = self.eval(value)?;
                let Some(loc) = self.lookup(&name.name) else {
                    return Err(RunError::at(name.span, format!("internal error: unbound identifier {name}")));
                };
                self.store.set(loc, v.clone());
                Ok(v)
            }
            ExprKind::Dispatch {
                receiver,
                static_type,
                method,
                args,
            } => {
                let recv = match receiver {
                    Some(r) => self.eval(r)?,
                    None => self.frame().self_value.clone(),
                };
                let mut values = Vec::with_capacity(args.len());
                for arg in args {
                    values.push(self.eval(arg)?);
                }
                self.call(
                    recv,
                    static_type.as_ref().map(|t| t.name.as_str()),
                    &method.name,
                    values,
                    span,
                )
            }
            ExprKind::If {
                cond,
                then_branch,
                else_branch,
            } => {
                if self.eval_bool(cond)? {
                    self.eval(then_branch)
                } else {
                    self.eval(else_branch)
                }
            }
            ExprKind::While { cond, body } => {
                while self.eval_bool(cond)? {
                    self.eval(body)?;
                }
                Ok(Value::Void)
            }
            ExprKind::Block(items) => {
                let mut last = Value::Void;
                for item in items {
                    last = self.eval(item)?;
                }
                Ok(last)
            }
            ExprKind::Let { bindings, body } => {
                let depth = self.frame().scopes.len();
                let result = (|| {
                    for b in bindings {
                        let v = match &b.init {
                            Some(init) => self.eval(init)?,
                            None => Value::default_for(&b.ty.name),
                        };
                        let loc = self.store.alloc(v);
                        self.frame().scopes.push((b.name.name.clone(), loc));
                    }
                    self.eval(body)
                })();
                self.frame().scopes.truncate(depth);
                result
            }
            ExprKind::Case { scrutinee, branches } => {
                let v = self.eval(scrutinee)?;
                let Some(class) = v.class_name() else {
                    return Err(RunError::at(span, "case on void"));
                };
                let table = self.table;
                let branch = table
                    .ancestors(class)
                    .into_iter()
                    .find_map(|c| branches.iter().find(|b| b.ty.name == c));
                let Some(branch) = branch else {
                    return Err(RunError::at(span, "no matching case branch"));
                };
                let loc = self.store.alloc(v);
                self.frame().scopes.push((branch.name.name.clone(), loc));
                let result = self.eval(&branch.body);
                self.frame().scopes.pop();
                result
            }
            ExprKind::New(t) => {
                let class = if t.name == SELF_TYPE {
                    self.self_class()
                } else {
                    t.name.clone()
                };
                self.instantiate(&class, span)
            }
            ExprKind::IsVoid(e) => Ok(Value::Bool(self.eval(e)?.is_void())),
            ExprKind::Neg(e) => Ok(Value::Int(self.eval_int(e)?.wrapping_neg())),
            ExprKind::Not(e) => Ok(Value::Bool(!self.eval_bool(e)?)),
            ExprKind::Paren(e) => self.eval(e),
            ExprKind::BinOp { op, lhs, rhs } => {
                if *op == BinOp::Eq {
                    let a = self.eval(lhs)?;
                    let b = self.eval(rhs)?;
                    return Ok(Value::Bool(a.same(&b)));
                }
                let a = self.eval_int(lhs)?;
                let b = self.eval_int(rhs)?;
                Ok(match op {
                    BinOp::Add => Value::Int(a.wrapping_add(b)),
                    BinOp::Sub => Value::Int(a.wrapping_sub(b)),
                    BinOp::Mul => Value::Int(a.wrapping_mul(b)),
                    BinOp::Div => {
                        if b == 0 {
                            return Err(RunError::at(span, "division by zero"));
                        }
                        Value::Int(a.wrapping_div(b))
                    }
                    BinOp::Lt => Value::Bool(a < b),
                    BinOp::Le => Value::Bool(a <= b),
                    BinOp::Eq => unreachable!(),
                })
            }
        }
    }

    /// Verifies that every location reachable from a live frame is in the
    /// store.
    fn audit(&mut self) -> Result<(), RunError> {
        let mut seen: HashSet<*const Object> = HashSet::new();
        let mut pending: Vec<Value> = Vec::new();
        let mut locations: Vec<Location> = Vec::new();
        for frame in &self.frames {
            pending.push(frame.self_value.clone());
            locations.extend(frame.scopes.iter().map(|(_, l)| *l));
        }
        loop {
            while let Some(loc) = locations.pop() {
                self.audited += 1;
                match self.store.get(loc) {
                    Some(v) => pending.push(v.clone()),
                    None => {
                        return Err(RunError::at(
                            SourceSpan::new(0, 0, 1, 1),
                            format!("internal error: dangling location {}", loc.0),
                        ))
                    }
                }
            }
            let Some(v) = pending.pop() else { break };
            if let Value::Object(o) = v {
                if seen.insert(Rc::as_ptr(&o)) {
                    locations.extend(o.attrs.values().copied());
                }
            }
        }
        Ok(())
    }
}

fn confusion(span: SourceSpan, expected: &str, found: &Value) -> RunError {
    RunError::at(
        span,
        format!(
            "internal error: expected {expected} but found {}",
            found.class_name().unwrap_or("void")
        ),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_source;
    use crate::semantics::{build_class_table, typecheck};

    fn run_with(src: &str, input: &str, config: RunConfig) -> RunOutcome {
        let (mut program, diags) = parse_source(src);
        assert!(diags.is_empty(), "{diags:?}");
        let (table, mut diags) = build_class_table(&program);
        diags.extend(typecheck(&table, &mut program));
        assert!(diags.is_empty(), "{diags:?}");
        run_program(&program, &table, input, &config)
    }

    fn run(src: &str) -> RunOutcome {
        run_with(src, "", RunConfig { audit: true, ..RunConfig::default() })
    }

    fn main_io(body: &str) -> RunOutcome {
        run(&format!("class Main inherits IO {{\n  main() : Object {{\n{body}\n  }};\n}};\n"))
    }

    fn output(body: &str) -> String {
        let out = main_io(body);
        assert_eq!(out.result, RunResult::Completed, "{}", out.output);
        out.output
    }

    fn eval_main(body: &str) -> Value {
        let src = format!("class Main {{ main() : Object {{ {body} }}; }};");
        let (mut program, _) = parse_source(&src);
        let (table, _) = build_class_table(&program);
        assert!(typecheck(&table, &mut program).is_empty());
        let mut interp = Interpreter::new(&program, &table, "", RunConfig::default());
        interp.run_main().unwrap()
    }

    #[test]
    fn value_examples() {
        assert_eq!(eval_main("3 + 7"), Value::Int(10));
        assert!(eval_main("while false loop 0 pool").is_void());
        assert_eq!(eval_main("~5"), Value::Int(-5));
        assert_eq!(eval_main("isvoid (new Object)"), Value::Bool(false));
        assert_eq!(eval_main("let x : Int in x"), Value::Int(0));
        assert_eq!(eval_main("let s : String in s"), Value::string(""));
        assert_eq!(eval_main("let b : Bool in b"), Value::Bool(false));
        assert!(eval_main("let o : Object in o").is_void());
    }

    #[test]
    fn out_int_sum() {
        assert_eq!(output("(new IO).out_int(3 + 7)"), "10");
    }

    #[test]
    fn wrapping_arithmetic() {
        assert_eq!(eval_main("2147483647 + 1"), Value::Int(i32::MIN));
        assert_eq!(eval_main("~2147483647 - 1 - 1"), Value::Int(i32::MAX));
        assert_eq!(eval_main("65536 * 65536"), Value::Int(0));
        assert_eq!(eval_main("(~2147483647 - 1) / ~1"), Value::Int(i32::MIN));
        assert_eq!(eval_main("~7 / 2"), Value::Int(-3));
    }

    #[test]
    fn division_by_zero_reports_line() {
        let out = main_io("    1\n    /\n    0");
        match out.result {
            RunResult::Error(d) => {
                assert_eq!(d.phase, Phase::Evaluation);
                assert_eq!(d.message, "division by zero");
                assert_eq!(d.line, 3);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn runtime_errors() {
        let err = |body: &str| match main_io(body).result {
            RunResult::Error(d) => d.message,
            other => panic!("{other:?}"),
        };
        assert_eq!(err("let o : Object in o.type_name()"), "dispatch on void");
        assert_eq!(err("let o : Object in case o of x : Object => x; esac"), "case on void");
        assert_eq!(err("case 3 of s : String => s; esac"), "no matching case branch");
        assert_eq!(err("\"abc\".substr(2, 2)"), "substr out of range");
        assert_eq!(err("\"abc\".substr(~1, 1)"), "substr out of range");
    }

    #[test]
    fn abort_stops_with_class() {
        let out = main_io("{ out_string(\"a\"); abort(); out_string(\"b\"); }");
        assert_eq!(out.output, "a");
        assert_eq!(out.result, RunResult::Aborted { class: "Main".into() });
    }

    #[test]
    fn dynamic_dispatch() {
        let src = "class A { f() : String { type_name() }; g() : String { \"A\" }; };\n\
                   class B inherits A { g() : String { \"B\" }; };\n\
                   class Main inherits IO { main() : Object {{\n\
                   out_string((new B).f());\n\
                   out_string((new B).g());\n\
                   out_string((new B)@A.g());\n\
                   let a : A <- new B in out_string(a.g());\n\
                   }}; };";
        assert_eq!(run(src).output, "BBAB");
    }

    #[test]
    fn evaluation_order() {
        let src = "class Main inherits IO {\n\
                   t(s : String) : Main { { out_string(s); self; } };\n\
                   f(a : Int, b : Int) : Int { a - b };\n\
                   main() : Object {{\n\
                   t(\"r\").f(t(\"1\").f(0,0), t(\"2\").f(0,0));\n\
                   out_int(f(t(\"x\").f(5,0), t(\"y\").f(2,0)));\n\
                   }}; };";
        assert_eq!(run(src).output, "r12xy3");
    }

    #[test]
    fn attributes_initialize_ancestors_first() {
        let src = "class A inherits IO { a : Int <- { out_string(\"A\"); 1; }; };\n\
                   class B inherits A { b : Int <- { out_string(\"B\"); a + 1; }; getb() : Int { b }; };\n\
                   class Main inherits IO { main() : Object { out_int((new B).getb()) }; };";
        assert_eq!(run(src).output, "AB2");
    }

    #[test]
    fn copy_is_shallow_with_fresh_locations() {
        let src = "class C { x : Int; set(v : Int) : C { { x <- v; self; } }; get() : Int { x }; };\n\
                   class Main inherits IO { main() : Object {\n\
                   let a : C <- (new C).set(1), b : C <- a.copy() in {\n\
                   b.set(2); out_int(a.get()); out_int(b.get());\n\
                   out_string(if a = b then \"same\" else \"diff\" fi);\n\
                   out_string(if a = a then \"same\" else \"diff\" fi);\n\
                   } }; };";
        assert_eq!(run(src).output, "12diffsame");
    }

    #[test]
    fn equality_semantics() {
        assert_eq!(eval_main("\"ab\" = \"a\".concat(\"b\")"), Value::Bool(true));
        assert_eq!(eval_main("new Object = new Object"), Value::Bool(false));
        assert_eq!(eval_main("let a : Object, b : Object in a = b"), Value::Bool(true));
        assert_eq!(eval_main("let a : Object in a = new Object"), Value::Bool(false));
    }

    #[test]
    fn case_picks_closest_ancestor() {
        let src = "class A {}; class B inherits A {}; class C inherits B {};\n\
                   class Main inherits IO { main() : Object {\n\
                   out_string(case new C of a : A => \"A\"; o : Object => \"O\"; b : B => \"B\"; esac)\n\
                   }; };";
        assert_eq!(run(src).output, "B");
    }

    #[test]
    fn string_builtins_and_io() {
        assert_eq!(
            output("{ out_int(\"hello\".length()); out_string(\"hello\".substr(1, 3)); out_string(\"x\".type_name()); out_string(3.type_name()); }"),
            "5ellStringInt"
        );
        let src = "class Main inherits IO { main() : Object {\n\
                   let s : String <- in_string(), n : Int <- in_int() in { out_string(s.concat(\"!\")); out_int(n * 2); out_int(in_int()); }\n\
                   }; };";
        let out = run_with(src, "hi there\n 21 \n", RunConfig::default());
        assert_eq!(out.output, "hi there!420");
    }

    #[test]
    fn self_type_new_follows_dynamic_class() {
        let src = "class A { make() : SELF_TYPE { new SELF_TYPE }; };\n\
                   class B inherits A {};\n\
                   class Main inherits IO { main() : Object { out_string((new B).make().type_name()) }; };";
        assert_eq!(run(src).output, "B");
    }

    #[test]
    fn fuel_exhaustion() {
        let src = "class Main { main() : Object { while true loop 0 pool }; };";
        let out = run_with(src, "", RunConfig { fuel: Some(1000), ..RunConfig::default() });
        match out.result {
            RunResult::Error(d) => assert_eq!(d.message, "fuel exhausted"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn deep_recursion_hits_depth_limit() {
        let src = "class Main { f(n : Int) : Int { f(n + 1) }; main() : Object { f(0) }; };";
        let out = run_with(src, "", RunConfig::default());
        match out.result {
            RunResult::Error(d) => assert_eq!(d.message, "call stack depth exceeded"),
            other => panic!("{other:?}"),
        }
        let src = "class Main { f(n : Int) : Int { if n = 0 then 0 else 1 + f(n - 1) fi }; main() : Object { f(5000) }; };";
        assert_eq!(run_with(src, "", RunConfig::default()).result, RunResult::Completed);
    }

    #[test]
    fn audit_visits_reachable_locations() {
        let src = "class Node { next : Node; v : Int; link(n : Node) : Node { { next <- n; self; } }; };\n\
                   class Main { main() : Object {\n\
                   let a : Node <- new Node, b : Node <- (new Node).link(a) in a.link(b)\n\
                   }; };";
        let out = run(src);
        assert_eq!(out.result, RunResult::Completed);
        assert!(out.audited > 0);
    }

    #[test]
    fn deterministic_runs() {
        let src = "class Main inherits IO { main() : Object {\n\
                   let i : Int <- 0 in while i < 20 loop { out_int(i * i / 3); i <- i + 1; } pool\n\
                   }; };";
        assert_eq!(run(src), run(src));
    }
}
