//! Naming conventions, docstring presence and physical-line rules.

use std::collections::BTreeSet;

use super::{Registry, Sink};
use crate::ast::*;

pub(super) fn check(module: &Module, registry: &Registry, sink: &mut Sink) {
    if !module.body.is_empty() && docstring(&module.body).is_none() {
        sink.emit("C0114", 1, "Missing module docstring".into());
    }
    let mut n = Namer { registry, sink };
    n.module_body(&module.body);
}

pub(super) fn check_lines(source: &str, registry: &Registry, sink: &mut Sink) {
    for (idx, line) in source.lines().enumerate() {
        let lineno = idx as u32 + 1;
        let width = line.chars().count();
        if width > registry.options.max_line_length {
            sink.emit("C0301", lineno, format!("Line too long ({width}/{})", registry.options.max_line_length));
        }
        if line.ends_with([' ', '\t']) {
            sink.emit("C0303", lineno, "Trailing whitespace".into());
        }
    }
}

fn style_of(kind: &str) -> &'static str {
    match kind {
        "class" => "PascalCase",
        "const" => "UPPER_CASE",
        _ => "snake_case",
    }
}

fn label_of(kind: &str) -> &'static str {
    match kind {
        "function" => "Function",
        "method" => "Method",
        "argument" => "Argument",
        "variable" => "Variable",
        "attr" => "Attribute",
        "class" => "Class",
        _ => "Constant",
    }
}

/// True for values a constant-folding evaluator would reduce to a literal.
fn is_constant_value(e: &Expr) -> bool {
    match &e.kind {
        ExprKind::Constant(_) => true,
        ExprKind::UnaryOp { operand, .. } => is_constant_value(operand),
        ExprKind::BinOp { left, right, .. } => is_constant_value(left) && is_constant_value(right),
        _ => false,
    }
}

fn target_names<'a>(t: &'a Expr, out: &mut Vec<(&'a str, u32)>) {
    match &t.kind {
        ExprKind::Name(n) => out.push((n, t.line)),
        ExprKind::Tuple(elts) | ExprKind::List(elts) => {
            for e in elts {
                target_names(e, out);
            }
        }
        ExprKind::Starred(v) => target_names(v, out),
        _ => {}
    }
}

struct Namer<'r, 's, 'a> {
    registry: &'r Registry,
    sink: &'s mut Sink<'a>,
}

impl Namer<'_, '_, '_> {
    fn check_name(&mut self, kind: &str, name: &str, line: u32) {
        if !self.registry.name_ok(kind, name) {
            self.sink.emit(
                "C0103",
                line,
                format!("{} name \"{name}\" doesn't conform to {} naming style", label_of(kind), style_of(kind)),
            );
        }
    }

    fn module_body(&mut self, body: &[Stmt]) {
        for s in body {
            match &s.kind {
                StmtKind::FunctionDef(f) => self.function(f, s.line, false),
                StmtKind::ClassDef(c) => self.class(c, s.line),
                StmtKind::Assign { targets, value } if is_constant_value(value) => {
                    for t in targets {
                        self.constants(t);
                    }
                }
                StmtKind::AnnAssign { target, value: Some(v), .. } if is_constant_value(v) => self.constants(target),
                // names bound inside loops are reassigned, so they are not constants
                StmtKind::For { .. } | StmtKind::While { .. } => self.definitions_only(&s.blocks()),
                _ => {
                    for b in s.blocks() {
                        self.module_body(b);
                    }
                }
            }
        }
    }

    fn definitions_only(&mut self, blocks: &[&[Stmt]]) {
        for b in blocks {
            for s in b.iter() {
                match &s.kind {
                    StmtKind::FunctionDef(f) => self.function(f, s.line, false),
                    StmtKind::ClassDef(c) => self.class(c, s.line),
                    _ => self.definitions_only(&s.blocks()),
                }
            }
        }
    }

    fn constants(&mut self, target: &Expr) {
        let mut names = Vec::new();
        target_names(target, &mut names);
        for (n, line) in names {
            self.check_name("const", n, line);
        }
    }

    fn class(&mut self, c: &ClassDef, line: u32) {
        self.check_name("class", &c.name, line);
        if docstring(&c.body).is_none() {
            self.sink.emit("C0115", line, "Missing class docstring".into());
        }
        let mut attrs = BTreeSet::new();
        self.class_body(&c.body, &mut attrs);
    }

    fn class_body(&mut self, body: &[Stmt], attrs: &mut BTreeSet<String>) {
        for s in body {
            match &s.kind {
                StmtKind::FunctionDef(f) => {
                    self.function(f, s.line, true);
                    if let Some(first) = f.args.posonly.iter().chain(f.args.args.iter()).next() {
                        self.instance_attrs(&f.body, &first.name, attrs);
                    }
                }
                StmtKind::ClassDef(c) => self.class(c, s.line),
                _ => {
                    for b in s.blocks() {
                        self.class_body(b, attrs);
                    }
                }
            }
        }
    }

    /// `self.attr = ...` assignments inside one method body.
    fn instance_attrs(&mut self, body: &[Stmt], receiver: &str, attrs: &mut BTreeSet<String>) {
        for s in body {
            let targets: Vec<&Expr> = match &s.kind {
                StmtKind::Assign { targets, .. } => targets.iter().collect(),
                StmtKind::AnnAssign { target, .. } | StmtKind::AugAssign { target, .. } => vec![target],
                StmtKind::FunctionDef(_) | StmtKind::ClassDef(_) => continue,
                _ => Vec::new(),
            };
            for t in targets {
                let mut stack = vec![t];
                while let Some(e) = stack.pop() {
                    match &e.kind {
                        ExprKind::Attribute { value, attr } if value.as_name() == Some(receiver) => {
                            if attrs.insert(attr.clone()) {
                                self.check_name("attr", attr, e.line);
                            }
                        }
                        ExprKind::Tuple(elts) | ExprKind::List(elts) => stack.extend(elts.iter().rev()),
                        ExprKind::Starred(v) => stack.push(v),
                        _ => {}
                    }
                }
            }
            for b in s.blocks() {
                self.instance_attrs(b, receiver, attrs);
            }
        }
    }

    fn function(&mut self, f: &FunctionDef, line: u32, is_method: bool) {
        self.check_name(if is_method { "method" } else { "function" }, &f.name, line);
        if docstring(&f.body).is_none() && !f.name.starts_with('_') {
            let what = if is_method { "method" } else { "function" };
            self.sink.emit("C0116", line, format!("Missing {what} docstring"));
        }
        let mut seen = BTreeSet::new();
        for a in f.args.all() {
            if seen.insert(a.name.as_str()) {
                self.check_name("argument", &a.name, a.line);
            }
        }
        let mut globals = BTreeSet::new();
        collect_globals(&f.body, &mut globals);
        let mut checked: BTreeSet<String> = seen.iter().map(|s| s.to_string()).collect();
        checked.extend(globals);
        self.function_body(&f.body, &mut checked);
    }

    fn function_body(&mut self, body: &[Stmt], checked: &mut BTreeSet<String>) {
        for s in body {
            let mut names = Vec::new();
            match &s.kind {
                StmtKind::FunctionDef(f) => {
                    self.function(f, s.line, false);
                    continue;
                }
                StmtKind::ClassDef(c) => {
                    self.class(c, s.line);
                    continue;
                }
                StmtKind::Assign { targets, .. } => {
                    for t in targets {
                        target_names(t, &mut names);
                    }
                }
                StmtKind::AnnAssign { target, .. } | StmtKind::For { target, .. } => target_names(target, &mut names),
                StmtKind::With { items, .. } => {
                    for it in items {
                        if let Some(v) = &it.optional_vars {
                            target_names(v, &mut names);
                        }
                    }
                }
                StmtKind::Try { handlers, .. } => {
                    for h in handlers {
                        if let Some(n) = &h.name {
                            names.push((n, h.line));
                        }
                    }
                }
                _ => {}
            }
            for e in s.exprs() {
                walk_expr(e, &mut |x| {
                    if let ExprKind::NamedExpr { target, .. } = &x.kind {
                        target_names(target, &mut names);
                    }
                });
            }
            for (n, line) in names {
                if checked.insert(n.to_string()) {
                    self.check_name("variable", n, line);
                }
            }
            for b in s.blocks() {
                self.function_body(b, checked);
            }
        }
    }
}

fn collect_globals(body: &[Stmt], out: &mut BTreeSet<String>) {
    for s in body {
        match &s.kind {
            StmtKind::Global(names) | StmtKind::Nonlocal(names) => out.extend(names.iter().cloned()),
            StmtKind::FunctionDef(_) | StmtKind::ClassDef(_) => {}
            _ => {
                for b in s.blocks() {
                    collect_globals(b, out);
                }
            }
        }
    }
}
