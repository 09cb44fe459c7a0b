use std::collections::{HashMap, HashSet};
use std::fmt;

use indexmap::IndexMap;

use crate::ast::{Feature, Program, Type, SELF_TYPE};
use crate::diagnostics::{Diagnostic, Phase};
use crate::span::SourceSpan;

pub const OBJECT: &str = "Object";
pub const IO: &str = "IO";
pub const INT: &str = "Int";
pub const STRING: &str = "String";
pub const BOOL: &str = "Bool";

pub const BASIC_CLASSES: [&str; 5] = [OBJECT, IO, INT, STRING, BOOL];

/// Classes that may not be inherited from.
pub const SEALED_CLASSES: [&str; 3] = [INT, STRING, BOOL];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MethodSig {
    pub name: String,
    pub formals: Vec<(String, Type)>,
    pub return_type: Type,
    /// Class whose declaration this signature comes from.
    pub defined_in: String,
}

impl MethodSig {
    pub fn arity(&self) -> usize {
        self.formals.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassInfo {
    pub name: String,
    /// `None` only for `Object`.
    pub parent: Option<String>,
    /// Attributes declared in this class (not inherited), in order.
    pub attributes: IndexMap<String, Type>,
    /// Methods declared in this class (not inherited), in order.
    pub methods: IndexMap<String, MethodSig>,
    pub span: Option<SourceSpan>,
    /// Index of the declaring class in `Program::classes`; `None` for the
    /// built-in classes.
    pub decl_index: Option<usize>,
}

impl ClassInfo {
    pub fn is_builtin(&self) -> bool {
        self.decl_index.is_none()
    }
}

/// A type name that is not in the class table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UndefinedType(pub String);

impl fmt::Display for UndefinedType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "undefined type {}", self.0)
    }
}

impl std::error::Error for UndefinedType {}

/// The validated inheritance tree with every class's attribute and method
/// environments. Immutable once built.
#[derive(Clone, Debug)]
pub struct ClassTable {
    classes: IndexMap<String, ClassInfo>,
}

/// `(name, formals, return type)`
type BuiltinMethod<'a> = (&'a str, &'a [(&'a str, &'a str)], &'a str);

fn builtin(name: &str, parent: Option<&str>, methods: &[BuiltinMethod<'_>]) -> ClassInfo {
    ClassInfo {
        name: name.to_string(),
        parent: parent.map(str::to_string),
        attributes: IndexMap::new(),
        methods: methods
            .iter()
            .map(|(m, formals, ret)| {
                (
                    m.to_string(),
                    MethodSig {
                        name: m.to_string(),
                        formals: formals
                            .iter()
                            .map(|(n, t)| (n.to_string(), Type::named(*t)))
                            .collect(),
                        return_type: Type::named(*ret),
                        defined_in: name.to_string(),
                    },
                )
            })
            .collect(),
        span: None,
        decl_index: None,
    }
}

impl ClassTable {
    /// A table holding only the built-in classes.
    pub fn builtins() -> ClassTable {
        let mut classes = IndexMap::new();
        for info in [
            builtin(
                OBJECT,
                None,
                &[
                    ("abort", &[], OBJECT),
                    ("type_name", &[], STRING),
                    ("copy", &[], SELF_TYPE),
                ],
            ),
            builtin(
                IO,
                Some(OBJECT),
                &[
                    ("out_string", &[("x", STRING)], SELF_TYPE),
                    ("out_int", &[("x", INT)], SELF_TYPE),
                    ("in_string", &[], STRING),
                    ("in_int", &[], INT),
                ],
            ),
            builtin(INT, Some(OBJECT), &[]),
            builtin(
                STRING,
                Some(OBJECT),
                &[
                    ("length", &[], INT),
                    ("concat", &[("s", STRING)], STRING),
                    ("substr", &[("i", INT), ("l", INT)], STRING),
                ],
            ),
            builtin(BOOL, Some(OBJECT), &[]),
        ] {
            classes.insert(info.name.clone(), info);
        }
        ClassTable { classes }
    }

    pub fn get(&self, name: &str) -> Option<&ClassInfo> {
        self.classes.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.classes.contains_key(name)
    }

    /// True if `ty` names a class in the table or is `SELF_TYPE`.
    pub fn is_defined(&self, ty: &Type) -> bool {
        match ty {
            Type::SelfType => true,
            Type::Class(name) => self.contains(name),
        }
    }

    pub fn class_names(&self) -> impl Iterator<Item = &str> {
        self.classes.keys().map(String::as_str)
    }

    pub fn classes(&self) -> impl Iterator<Item = &ClassInfo> {
        self.classes.values()
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn parent(&self, name: &str) -> Option<&str> {
        self.get(name)?.parent.as_deref()
    }

    /// `name` followed by its ancestors up to `Object`. Empty if `name` is
    /// not in the table.
    pub fn ancestors<'a>(&'a self, name: &'a str) -> Vec<&'a str> {
        let mut out = Vec::new();
        let mut cur = self.get(name);
        while let Some(info) = cur {
            out.push(info.name.as_str());
            cur = info.parent.as_deref().and_then(|p| self.get(p));
        }
        out
    }

    /// The signature `class` responds to for `method`, searching ancestors.
    pub fn lookup_method(&self, class: &str, method: &str) -> Option<&MethodSig> {
        self.ancestors(class)
            .into_iter()
            .find_map(|c| self.classes[c].methods.get(method))
    }

    pub fn lookup_attribute(&self, class: &str, attr: &str) -> Option<&Type> {
        self.ancestors(class)
            .into_iter()
            .find_map(|c| self.classes[c].attributes.get(attr))
    }

    /// Every attribute of `class`, ancestors' first, as `(name, type)`.
    pub fn all_attributes(&self, class: &str) -> Vec<(&str, &Type)> {
        let mut chain = self.ancestors(class);
        chain.reverse();
        chain
            .into_iter()
            .flat_map(|c| self.classes[c].attributes.iter())
            .map(|(n, t)| (n.as_str(), t))
            .collect()
    }

    fn check_defined(&self, ty: &Type, current_class: &str) -> Result<(), UndefinedType> {
        let name = ty.resolve(current_class);
        if self.contains(name) {
            Ok(())
        } else {
            Err(UndefinedType(name.to_string()))
        }
    }

    /// Whether `t1 ≤ t2`. `SELF_TYPE` stands for the self type of
    /// `current_class`: it conforms to whatever `current_class` conforms to,
    /// and only `SELF_TYPE` conforms to it.
    pub fn conforms(&self, t1: &Type, t2: &Type, current_class: &str) -> Result<bool, UndefinedType> {
        self.check_defined(t1, current_class)?;
        self.check_defined(t2, current_class)?;
        if let Type::SelfType = t2 {
            return Ok(t1.is_self_type());
        }
        let target = t2.resolve(current_class);
        Ok(self
            .ancestors(t1.resolve(current_class))
            .contains(&target))
    }

    /// Least upper bound of two types.
    pub fn join(&self, t1: &Type, t2: &Type, current_class: &str) -> Result<Type, UndefinedType> {
        self.check_defined(t1, current_class)?;
        self.check_defined(t2, current_class)?;
        if t1.is_self_type() && t2.is_self_type() {
            return Ok(Type::SelfType);
        }
        let left = self.ancestors(t1.resolve(current_class));
        let common = self
            .ancestors(t2.resolve(current_class))
            .into_iter()
            .find(|c| left.contains(c))
            .unwrap_or(OBJECT);
        Ok(Type::Class(common.to_string()))
    }
}

pub fn conforms(
    table: &ClassTable,
    t1: &Type,
    t2: &Type,
    current_class: &str,
) -> Result<bool, UndefinedType> {
    table.conforms(t1, t2, current_class)
}

pub fn join(table: &ClassTable, t1: &Type, t2: &Type, current_class: &str) -> Result<Type, UndefinedType> {
    table.join(t1, t2, current_class)
}

fn diag(span: SourceSpan, message: String) -> Diagnostic {
    Diagnostic::at(Phase::Typechecking, span, message)
}

/// Builds the class table for `program`, reporting every problem with the
/// inheritance graph and with feature declarations. Classes on an
/// inheritance cycle, and classes inheriting from one, are left out.
pub fn build_class_table(program: &Program) -> (ClassTable, Vec<Diagnostic>) {
    let mut table = ClassTable::builtins();
    let mut diags = Vec::new();

    // Accepted declarations, by name.
    let mut decls: IndexMap<&str, usize> = IndexMap::new();
    for (i, class) in program.classes.iter().enumerate() {
        let name = class.name.name.as_str();
        if name == SELF_TYPE {
            diags.push(diag(class.name.span, "SELF_TYPE cannot be used as a class name".into()));
        } else if BASIC_CLASSES.contains(&name) {
            diags.push(diag(class.name.span, format!("redefinition of basic class {name}")));
        } else if decls.contains_key(name) {
            diags.push(diag(class.name.span, format!("class {name} was previously defined")));
        } else {
            decls.insert(name, i);
        }
    }

    let mut parent_of: IndexMap<&str, &str> = IndexMap::new();
    for (&name, &i) in &decls {
        let class = &program.classes[i];
        let parent = match &class.parent {
            None => OBJECT,
            Some(p) => {
                let p_name = p.name.as_str();
                if SEALED_CLASSES.contains(&p_name) || p_name == SELF_TYPE {
                    diags.push(diag(p.span, format!("class {name} cannot inherit class {p_name}")));
                    OBJECT
                } else if !BASIC_CLASSES.contains(&p_name) && !decls.contains_key(p_name) {
                    diags.push(diag(
                        p.span,
                        format!("class {name} inherits from an undefined class {p_name}"),
                    ));
                    OBJECT
                } else {
                    p_name
                }
            }
        };
        parent_of.insert(name, parent);
    }

    let (cyclic, tainted) = find_cycles(&parent_of);
    for (&name, &i) in &decls {
        let span = program.classes[i].name.span;
        if cyclic.contains(name) {
            diags.push(diag(span, format!("class {name} is involved in an inheritance cycle")));
        } else if tainted.contains(name) {
            diags.push(diag(
                span,
                format!(
                    "class {name} inherits from class {}, which is involved in an inheritance cycle",
                    parent_of[name]
                ),
            ));
        }
    }

    let known: HashSet<&str> = BASIC_CLASSES
        .iter()
        .copied()
        .chain(
            decls
                .keys()
                .copied()
                .filter(|n| !cyclic.contains(n) && !tainted.contains(n)),
        )
        .collect();

    // Add classes parents-first so inherited features are visible.
    let mut added: HashSet<&str> = HashSet::new();
    for &name in decls.keys() {
        if !known.contains(name) {
            continue;
        }
        let mut chain = Vec::new();
        let mut cur = name;
        while !added.contains(cur) && !BASIC_CLASSES.contains(&cur) {
            chain.push(cur);
            cur = parent_of[cur];
        }
        for &c in chain.iter().rev() {
            let index = decls[c];
            let info = declare_class(&table, program, index, parent_of[c], &known, &mut diags);
            table.classes.insert(c.to_string(), info);
            added.insert(c);
        }
    }

    check_main(&table, &decls, &mut diags);
    (table, diags)
}

/// Returns the classes lying on a cycle and the classes that only reach a
/// cycle through their ancestors.
fn find_cycles<'a>(parent_of: &IndexMap<&'a str, &'a str>) -> (HashSet<&'a str>, HashSet<&'a str>) {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Visiting,
        Done,
    }
    let mut marks: HashMap<&str, Mark> = HashMap::new();
    let mut cyclic = HashSet::new();
    let mut reaches_cycle: HashSet<&str> = HashSet::new();
    for &start in parent_of.keys() {
        let mut path = Vec::new();
        let mut cur = start;
        let mut bad = false;
        loop {
            match marks.get(cur) {
                Some(Mark::Visiting) => {
                    let pos = path.iter().position(|&c| c == cur).unwrap();
                    cyclic.extend(path[pos..].iter().copied());
                    bad = true;
                    break;
                }
                Some(Mark::Done) => {
                    bad = reaches_cycle.contains(cur);
                    break;
                }
                None => {}
            }
            let Some(&parent) = parent_of.get(cur) else { break };
            marks.insert(cur, Mark::Visiting);
            path.push(cur);
            cur = parent;
        }
        for &c in &path {
            marks.insert(c, Mark::Done);
            if bad {
                reaches_cycle.insert(c);
            }
        }
    }
    let tainted = reaches_cycle.difference(&cyclic).copied().collect();
    (cyclic, tainted)
}

fn declare_class(
    table: &ClassTable,
    program: &Program,
    index: usize,
    parent: &str,
    known: &HashSet<&str>,
    diags: &mut Vec<Diagnostic>,
) -> ClassInfo {
    let class = &program.classes[index];
    let cname = class.name.name.as_str();
    let mut attributes = IndexMap::new();
    let mut methods: IndexMap<String, MethodSig> = IndexMap::new();

    for feature in &class.features {
        match feature {
            Feature::Attribute(a) => {
                let name = a.name.name.as_str();
                if name == "self" {
                    diags.push(diag(a.name.span, "'self' cannot be the name of an attribute".into()));
                    continue;
                }
                if attributes.contains_key(name) {
                    diags.push(diag(
                        a.name.span,
                        format!("attribute {name} is multiply defined in class {cname}"),
                    ));
                    continue;
                }
                if table.lookup_attribute(parent, name).is_some() {
                    diags.push(diag(
                        a.name.span,
                        format!("attribute {name} is an attribute of an inherited class"),
                    ));
                    continue;
                }
                let mut ty = Type::named(a.declared_type.name.clone());
                if let Type::Class(t) = &ty {
                    if !known.contains(t.as_str()) {
                        diags.push(diag(
                            a.declared_type.span,
                            format!("class {t} of attribute {name} is undefined"),
                        ));
                        ty = Type::object();
                    }
                }
                attributes.insert(name.to_string(), ty);
            }
            Feature::Method(m) => {
                let mname = m.name.name.as_str();
                if methods.contains_key(mname) {
                    diags.push(diag(
                        m.name.span,
                        format!("method {mname} is multiply defined in class {cname}"),
                    ));
                    continue;
                }
                let mut formals: Vec<(String, Type)> = Vec::new();
                for f in &m.formals {
                    let fname = f.name.name.as_str();
                    if fname == "self" {
                        diags.push(diag(
                            f.name.span,
                            "'self' cannot be the name of a formal parameter".into(),
                        ));
                    } else if formals.iter().any(|(n, _)| n == fname) {
                        diags.push(diag(
                            f.name.span,
                            format!("formal parameter {fname} is multiply defined in method {mname}"),
                        ));
                    }
                    let tname = f.ty.name.as_str();
                    let ty = if tname == SELF_TYPE {
                        diags.push(diag(
                            f.ty.span,
                            format!("formal parameter {fname} cannot have type SELF_TYPE"),
                        ));
                        Type::object()
                    } else if !known.contains(tname) {
                        diags.push(diag(
                            f.ty.span,
                            format!("class {tname} of formal parameter {fname} is undefined"),
                        ));
                        Type::object()
                    } else {
                        Type::named(tname)
                    };
                    formals.push((fname.to_string(), ty));
                }
                let mut return_type = Type::named(m.return_type.name.clone());
                if let Type::Class(t) = &return_type {
                    if !known.contains(t.as_str()) {
                        diags.push(diag(
                            m.return_type.span,
                            format!("undefined return type {t} in method {mname}"),
                        ));
                        return_type = Type::object();
                    }
                }
                let sig = MethodSig {
                    name: mname.to_string(),
                    formals,
                    return_type,
                    defined_in: cname.to_string(),
                };
                if let Some(inherited) = table.lookup_method(parent, mname) {
                    check_override(inherited, &sig, m.name.span, diags);
                }
                methods.insert(mname.to_string(), sig);
            }
        }
    }

    ClassInfo {
        name: cname.to_string(),
        parent: Some(parent.to_string()),
        attributes,
        methods,
        span: Some(class.span),
        decl_index: Some(index),
    }
}

fn check_override(original: &MethodSig, new: &MethodSig, span: SourceSpan, diags: &mut Vec<Diagnostic>) {
    let name = &new.name;
    if original.arity() != new.arity() {
        diags.push(diag(
            span,
            format!("incompatible number of formal parameters in redefined method {name}"),
        ));
        return;
    }
    for ((_, old_ty), (pname, new_ty)) in original.formals.iter().zip(&new.formals) {
        if old_ty != new_ty {
            diags.push(diag(
                span,
                format!(
                    "in redefined method {name}, parameter {pname} has type {new_ty} instead of the original type {old_ty}"
                ),
            ));
        }
    }
    if original.return_type != new.return_type {
        diags.push(diag(
            span,
            format!(
                "in redefined method {name}, return type {} is different from original return type {}",
                new.return_type, original.return_type
            ),
        ));
    }
}

fn check_main(table: &ClassTable, decls: &IndexMap<&str, usize>, diags: &mut Vec<Diagnostic>) {
    if !decls.contains_key("Main") {
        diags.push(Diagnostic::new(Phase::Typechecking, 1, "class Main not found"));
        return;
    }
    let Some(info) = table.get("Main") else {
        // Main sits on a cycle; already reported.
        return;
    };
    let span = info.span.unwrap_or_default();
    match table.lookup_method("Main", "main") {
        None => diags.push(diag(span, "no 'main' method in class Main".into())),
        Some(sig) if sig.arity() != 0 => diags.push(diag(
            span,
            "'main' method in class Main must take no arguments".into(),
        )),
        Some(_) => {}
    }
}
