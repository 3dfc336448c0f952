//! Structural checks and the checks driven by scope resolution.

use std::collections::BTreeSet;

use super::scope::{BindingKind, ScopeKind, ScopeTree};
use super::{Registry, Sink};
use crate::ast::*;

pub(super) fn check(module: &Module, sink: &mut Sink) {
    returns_outside_function(&module.body, sink);
    walk_stmts(&module.body, &mut |s| {
        match &s.kind {
            StmtKind::Try { handlers, .. } => {
                for h in handlers.iter().filter(|h| h.type_.is_none()) {
                    sink.emit("W0702", h.line, "No exception type(s) specified".into());
                }
            }
            StmtKind::FunctionDef(f) => duplicate_arguments(&f.args, s.line, sink),
            _ => {}
        }
        for e in s.exprs() {
            walk_expr(e, &mut |x| {
                if let ExprKind::Lambda { args, .. } = &x.kind {
                    duplicate_arguments(args, x.line, sink);
                }
            });
        }
    });
}

fn returns_outside_function(body: &[Stmt], sink: &mut Sink) {
    for s in body {
        match &s.kind {
            StmtKind::FunctionDef(_) => {}
            StmtKind::Return(_) => sink.emit("E0104", s.line, "Return outside function".into()),
            _ => {
                for b in s.blocks() {
                    returns_outside_function(b, sink);
                }
            }
        }
    }
}

fn duplicate_arguments(args: &Arguments, line: u32, sink: &mut Sink) {
    let mut seen = BTreeSet::new();
    let mut reported = BTreeSet::new();
    for a in args.all() {
        if !seen.insert(a.name.as_str()) && reported.insert(a.name.as_str()) {
            sink.emit("E0108", line, format!("Duplicate argument name {} in function definition", a.name));
        }
    }
}

pub(super) fn check_scopes(tree: &ScopeTree, registry: &Registry, sink: &mut Sink) {
    for (sid, scope) in tree.scopes.iter().enumerate() {
        if scope.kind != ScopeKind::Class {
            for b in scope.first_bindings() {
                if registry.is_builtin(&b.name) {
                    sink.emit("W0622", b.line, format!("Redefining built-in '{}'", b.name));
                }
            }
        }
        if matches!(scope.kind, ScopeKind::Module | ScopeKind::Function) {
            let mut reported = BTreeSet::new();
            for b in scope.bindings.iter().filter(|b| b.kind == BindingKind::Import) {
                if !tree.is_used(sid, &b.name) && !tree.exported.contains(&b.name) && reported.insert(b.name.as_str()) {
                    sink.emit("W0611", b.line, format!("Unused import {}", b.name));
                }
            }
        }
        if scope.kind == ScopeKind::Function && !scope.calls_locals {
            let mut reported = BTreeSet::new();
            for b in &scope.bindings {
                let candidate = matches!(
                    b.kind,
                    BindingKind::Assign | BindingKind::WithAs | BindingKind::ExceptAs | BindingKind::Walrus
                );
                if candidate
                    && !b.name.starts_with('_')
                    && !scope.nonlocals.contains(&b.name)
                    && !tree.is_used(sid, &b.name)
                    && !scope.bindings.iter().any(|o| o.name == b.name && o.kind == BindingKind::Import)
                    && reported.insert(b.name.as_str())
                {
                    sink.emit("W0612", b.line, format!("Unused variable '{}'", b.name));
                }
            }
        }
    }
    if !tree.star_import {
        for (_, load) in &tree.undefined {
            sink.emit("E0602", load.line, format!("Undefined variable '{}'", load.name));
        }
    }
}
