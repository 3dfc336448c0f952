//! Lexical scope model.
//!
//! Builds one scope per module, class, function, lambda and comprehension,
//! records every binding and every name read, then resolves each read with
//! Python's rules: local, then enclosing function scopes (class bodies are
//! skipped), then the module, then builtins.

use std::collections::BTreeSet;

use crate::ast::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScopeKind {
    Module,
    Class,
    Function,
    Lambda,
    Comprehension,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BindingKind {
    Assign,
    /// Annotation without a value (`x: int`).
    Declare,
    AugAssign,
    Loop,
    Param,
    Import,
    FunctionDef,
    ClassDef,
    ExceptAs,
    WithAs,
    Walrus,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Binding {
    pub name: String,
    pub line: u32,
    pub kind: BindingKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Load {
    pub name: String,
    pub line: u32,
}

#[derive(Debug, Clone)]
pub struct Scope {
    pub kind: ScopeKind,
    pub name: String,
    pub line: u32,
    pub parent: Option<usize>,
    pub bindings: Vec<Binding>,
    pub loads: Vec<Load>,
    pub globals: BTreeSet<String>,
    pub nonlocals: BTreeSet<String>,
    /// The scope calls `locals()`, so any local may be read indirectly.
    pub calls_locals: bool,
}

impl Scope {
    fn new(kind: ScopeKind, name: &str, line: u32, parent: Option<usize>) -> Self {
        Scope {
            kind,
            name: name.to_string(),
            line,
            parent,
            bindings: Vec::new(),
            loads: Vec::new(),
            globals: BTreeSet::new(),
            nonlocals: BTreeSet::new(),
            calls_locals: false,
        }
    }

    pub fn binds(&self, name: &str) -> bool {
        self.bindings.iter().any(|b| b.name == name)
    }

    /// First binding of each name, in order of first appearance.
    pub fn first_bindings(&self) -> Vec<&Binding> {
        let mut seen = BTreeSet::new();
        self.bindings.iter().filter(|b| seen.insert(b.name.as_str())).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Resolution {
    Scope(usize),
    Builtin,
    Undefined,
}

#[derive(Debug, Clone)]
pub struct ScopeTree {
    pub scopes: Vec<Scope>,
    /// `from m import *` appears somewhere, so undefined names are unknowable.
    pub star_import: bool,
    /// Names listed in a module-level `__all__`.
    pub exported: BTreeSet<String>,
    /// Reads resolved to their binding scope: (scope, name) pairs that are used.
    pub used: BTreeSet<(usize, String)>,
    /// Reads that resolved nowhere: (scope, load).
    pub undefined: Vec<(usize, Load)>,
}

impl ScopeTree {
    pub fn build(module: &Module, builtins: &BTreeSet<String>) -> Self {
        let mut b = Builder {
            scopes: vec![Scope::new(ScopeKind::Module, "<module>", 1, None)],
            star_import: false,
            exported: BTreeSet::new(),
        };
        b.body(&module.body, 0);
        let mut tree = ScopeTree {
            scopes: b.scopes,
            star_import: b.star_import,
            exported: b.exported,
            used: BTreeSet::new(),
            undefined: Vec::new(),
        };
        for sid in 0..tree.scopes.len() {
            for load in tree.scopes[sid].loads.clone() {
                match tree.resolve(sid, &load.name, builtins) {
                    Resolution::Scope(owner) => {
                        tree.used.insert((owner, load.name.clone()));
                    }
                    Resolution::Builtin => {}
                    Resolution::Undefined => tree.undefined.push((sid, load)),
                }
            }
        }
        tree
    }

    pub fn resolve(&self, from: usize, name: &str, builtins: &BTreeSet<String>) -> Resolution {
        let mut sid = from;
        let mut first = true;
        loop {
            let s = &self.scopes[sid];
            if s.globals.contains(name) {
                return self.resolve_global(name, builtins);
            }
            let visible = first || s.kind != ScopeKind::Class;
            if visible && !s.nonlocals.contains(name) && s.binds(name) {
                return Resolution::Scope(sid);
            }
            match s.parent {
                Some(p) => sid = p,
                None => break,
            }
            first = false;
        }
        if builtins.contains(name) {
            Resolution::Builtin
        } else {
            Resolution::Undefined
        }
    }

    fn resolve_global(&self, name: &str, builtins: &BTreeSet<String>) -> Resolution {
        if self.scopes[0].binds(name) {
            Resolution::Scope(0)
        } else if builtins.contains(name) {
            Resolution::Builtin
        } else {
            Resolution::Undefined
        }
    }

    pub fn is_used(&self, scope: usize, name: &str) -> bool {
        self.used.contains(&(scope, name.to_string()))
    }
}

struct Builder {
    scopes: Vec<Scope>,
    star_import: bool,
    exported: BTreeSet<String>,
}

impl Builder {
    fn push_scope(&mut self, kind: ScopeKind, name: &str, line: u32, parent: usize) -> usize {
        self.scopes.push(Scope::new(kind, name, line, Some(parent)));
        self.scopes.len() - 1
    }

    fn bind(&mut self, sid: usize, name: &str, line: u32, kind: BindingKind) {
        let target = if self.scopes[sid].globals.contains(name) { 0 } else { sid };
        self.scopes[target].bindings.push(Binding { name: name.to_string(), line, kind });
    }

    fn load(&mut self, sid: usize, name: &str, line: u32) {
        self.scopes[sid].loads.push(Load { name: name.to_string(), line });
    }

    fn body(&mut self, body: &[Stmt], sid: usize) {
        for s in body {
            self.stmt(s, sid);
        }
    }

    fn stmt(&mut self, s: &Stmt, sid: usize) {
        match &s.kind {
            StmtKind::FunctionDef(f) => {
                for d in &f.decorators {
                    self.expr(d, sid);
                }
                self.argument_defaults(&f.args, sid);
                for a in f.args.all() {
                    if let Some(ann) = &a.annotation {
                        self.expr(ann, sid);
                    }
                }
                if let Some(r) = &f.returns {
                    self.expr(r, sid);
                }
                self.bind(sid, &f.name, s.line, BindingKind::FunctionDef);
                let fid = self.push_scope(ScopeKind::Function, &f.name, s.line, sid);
                for a in f.args.all() {
                    self.bind(fid, &a.name, a.line, BindingKind::Param);
                }
                self.body(&f.body, fid);
            }
            StmtKind::ClassDef(c) => {
                for d in &c.decorators {
                    self.expr(d, sid);
                }
                for e in &c.bases {
                    self.expr(e, sid);
                }
                for k in &c.keywords {
                    self.expr(&k.value, sid);
                }
                self.bind(sid, &c.name, s.line, BindingKind::ClassDef);
                let cid = self.push_scope(ScopeKind::Class, &c.name, s.line, sid);
                self.body(&c.body, cid);
            }
            StmtKind::Assign { targets, value } => {
                self.expr(value, sid);
                if sid == 0 && targets.iter().any(|t| t.as_name() == Some("__all__")) {
                    self.record_exports(value);
                }
                for t in targets {
                    self.target(t, sid, BindingKind::Assign);
                }
            }
            StmtKind::AugAssign { target, value, .. } => {
                self.expr(value, sid);
                if let Some(n) = target.as_name() {
                    self.load(sid, n, target.line);
                }
                self.target(target, sid, BindingKind::AugAssign);
            }
            StmtKind::AnnAssign { target, annotation, value } => {
                self.expr(annotation, sid);
                if let Some(v) = value {
                    self.expr(v, sid);
                    self.target(target, sid, BindingKind::Assign);
                } else {
                    self.target(target, sid, BindingKind::Declare);
                }
            }
            StmtKind::For { target, iter, body, orelse, .. } => {
                self.expr(iter, sid);
                self.target(target, sid, BindingKind::Loop);
                self.body(body, sid);
                self.body(orelse, sid);
            }
            StmtKind::With { items, body, .. } => {
                for it in items {
                    self.expr(&it.context_expr, sid);
                    if let Some(v) = &it.optional_vars {
                        self.target(v, sid, BindingKind::WithAs);
                    }
                }
                self.body(body, sid);
            }
            StmtKind::Try { body, handlers, orelse, finalbody } => {
                self.body(body, sid);
                for h in handlers {
                    if let Some(t) = &h.type_ {
                        self.expr(t, sid);
                    }
                    if let Some(n) = &h.name {
                        self.bind(sid, n, h.line, BindingKind::ExceptAs);
                    }
                    self.body(&h.body, sid);
                }
                self.body(orelse, sid);
                self.body(finalbody, sid);
            }
            StmtKind::Import(names) => {
                for a in names {
                    self.bind(sid, a.bound_name(), s.line, BindingKind::Import);
                }
            }
            StmtKind::ImportFrom { module, names, .. } => {
                if module.as_deref() == Some("__future__") {
                    return;
                }
                for a in names {
                    if a.name == "*" {
                        self.star_import = true;
                    } else {
                        self.bind(sid, a.bound_name(), s.line, BindingKind::Import);
                    }
                }
            }
            StmtKind::Global(names) => {
                if sid != 0 {
                    self.scopes[sid].globals.extend(names.iter().cloned());
                }
            }
            StmtKind::Nonlocal(names) => self.scopes[sid].nonlocals.extend(names.iter().cloned()),
            StmtKind::Delete(targets) => {
                for t in targets {
                    self.expr(t, sid);
                }
            }
            _ => {
                for e in s.exprs() {
                    self.expr(e, sid);
                }
                for b in s.blocks() {
                    self.body(b, sid);
                }
            }
        }
    }

    fn record_exports(&mut self, value: &Expr) {
        if let ExprKind::List(elts) | ExprKind::Tuple(elts) = &value.kind {
            for e in elts {
                if let ExprKind::Constant(Constant::Str(s)) = &e.kind {
                    self.exported.insert(s.clone());
                }
            }
        }
    }

    fn argument_defaults(&mut self, args: &Arguments, sid: usize) {
        for d in args.defaults.iter().chain(args.kw_defaults.iter().flatten()) {
            self.expr(d, sid);
        }
    }

    /// Binds the names of an assignment target; subscripts and attributes
    /// only read their base expressions.
    fn target(&mut self, t: &Expr, sid: usize, kind: BindingKind) {
        match &t.kind {
            ExprKind::Name(n) => self.bind(sid, n, t.line, kind),
            ExprKind::Tuple(elts) | ExprKind::List(elts) => {
                for e in elts {
                    self.target(e, sid, kind);
                }
            }
            ExprKind::Starred(v) => self.target(v, sid, kind),
            _ => self.expr(t, sid),
        }
    }

    /// Nearest scope that is not a comprehension (walrus targets bind there).
    fn walrus_scope(&self, mut sid: usize) -> usize {
        while self.scopes[sid].kind == ScopeKind::Comprehension {
            sid = self.scopes[sid].parent.unwrap_or(0);
        }
        sid
    }

    fn comprehension(&mut self, kind_name: &str, line: u32, gens: &[Comprehension], elts: &[&Expr], sid: usize) {
        let Some(first) = gens.first() else { return };
        self.expr(&first.iter, sid);
        let cid = self.push_scope(ScopeKind::Comprehension, kind_name, line, sid);
        for (i, g) in gens.iter().enumerate() {
            if i > 0 {
                self.expr(&g.iter, cid);
            }
            self.target(&g.target, cid, BindingKind::Loop);
            for cond in &g.ifs {
                self.expr(cond, cid);
            }
        }
        for e in elts {
            self.expr(e, cid);
        }
    }

    fn expr(&mut self, e: &Expr, sid: usize) {
        match &e.kind {
            ExprKind::Name(n) => self.load(sid, n, e.line),
            ExprKind::NamedExpr { target, value } => {
                self.expr(value, sid);
                if let Some(n) = target.as_name() {
                    let owner = self.walrus_scope(sid);
                    self.bind(owner, n, target.line, BindingKind::Walrus);
                }
            }
            ExprKind::Lambda { args, body } => {
                self.argument_defaults(args, sid);
                let lid = self.push_scope(ScopeKind::Lambda, "<lambda>", e.line, sid);
                for a in args.all() {
                    self.bind(lid, &a.name, a.line, BindingKind::Param);
                }
                self.expr(body, lid);
            }
            ExprKind::ListComp { elt, generators } => self.comprehension("<listcomp>", e.line, generators, &[elt], sid),
            ExprKind::SetComp { elt, generators } => self.comprehension("<setcomp>", e.line, generators, &[elt], sid),
            ExprKind::GeneratorExp { elt, generators } => {
                self.comprehension("<genexpr>", e.line, generators, &[elt], sid)
            }
            ExprKind::DictComp { key, value, generators } => {
                self.comprehension("<dictcomp>", e.line, generators, &[key, value], sid)
            }
            ExprKind::Call { func, .. } => {
                if func.as_name() == Some("locals") {
                    self.scopes[sid].calls_locals = true;
                }
                for c in e.children() {
                    self.expr(c, sid);
                }
            }
            _ => {
                for c in e.children() {
                    self.expr(c, sid);
                }
            }
        }
    }
}
