//! Per-function size limits.
//!
//! Arguments: named parameters, excluding `_`-prefixed ones and a leading
//! `self` or `cls` receiver.
//! Branches: each `if`/`elif`, each loop, each `except`, plus one for every
//! `else` block that is not an `elif` chain and one for a `finally` block.
//! Statements: every statement inside the function, where a nested
//! definition counts as one. Locals: distinct names bound in the function
//! scope, parameters included.

use std::collections::BTreeSet;

use super::scope::{ScopeKind, ScopeTree};
use super::{Registry, Sink};
use crate::ast::*;

pub(super) fn check(module: &Module, registry: &Registry, scopes: &ScopeTree, sink: &mut Sink) {
    let opts = &registry.options;
    walk_stmts(&module.body, &mut |s| {
        let StmtKind::FunctionDef(f) = &s.kind else { return };
        let args = f
            .args
            .named()
            .enumerate()
            .filter(|(i, a)| !a.name.starts_with('_') && !(*i == 0 && (a.name == "self" || a.name == "cls")))
            .count();
        if args > opts.max_args {
            sink.emit("R0913", s.line, format!("Too many arguments ({args}/{})", opts.max_args));
        }
        let mut tally = Tally::default();
        tally.body(&f.body);
        if tally.branches > opts.max_branches {
            sink.emit("R0912", s.line, format!("Too many branches ({}/{})", tally.branches, opts.max_branches));
        }
        if tally.statements > opts.max_statements {
            sink.emit("R0915", s.line, format!("Too many statements ({}/{})", tally.statements, opts.max_statements));
        }
        if tally.returns > opts.max_returns {
            sink.emit("R0911", s.line, format!("Too many return statements ({}/{})", tally.returns, opts.max_returns));
        }
    });
    for scope in scopes.scopes.iter().filter(|s| s.kind == ScopeKind::Function) {
        let locals: BTreeSet<&str> = scope.bindings.iter().map(|b| b.name.as_str()).collect();
        if locals.len() > opts.max_locals {
            sink.emit("R0914", scope.line, format!("Too many local variables ({}/{})", locals.len(), opts.max_locals));
        }
    }
}

#[derive(Default)]
struct Tally {
    branches: usize,
    statements: usize,
    returns: usize,
}

impl Tally {
    fn body(&mut self, body: &[Stmt]) {
        for s in body {
            self.statements += 1;
            match &s.kind {
                StmtKind::FunctionDef(_) | StmtKind::ClassDef(_) => continue,
                StmtKind::Return(_) => self.returns += 1,
                StmtKind::If { orelse, .. } => {
                    self.branches += 1;
                    let elif_chain =
                        matches!(orelse.as_slice(), [Stmt { kind: StmtKind::If { is_elif: true, .. }, .. }]);
                    if !orelse.is_empty() && !elif_chain {
                        self.branches += 1;
                    }
                }
                StmtKind::For { orelse, .. } | StmtKind::While { orelse, .. } => {
                    self.branches += 1 + usize::from(!orelse.is_empty());
                }
                StmtKind::Try { handlers, orelse, finalbody, .. } => {
                    self.branches +=
                        handlers.len() + usize::from(!orelse.is_empty()) + usize::from(!finalbody.is_empty());
                }
                _ => {}
            }
            for b in s.blocks() {
                self.body(b);
            }
        }
    }
}
