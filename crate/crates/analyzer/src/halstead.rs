//! Halstead software-science metrics.
//!
//! The operator/operand classification lives in `data/halstead.json`; this
//! module walks the tree, names each construct it meets, and lets the table
//! decide whether the construct counts and under which symbol.

use std::collections::{BTreeMap, HashMap};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::ast::*;
use crate::error::AnalyzerError;

/// Every construct name the walker can emit. The table must cover all of them.
pub const CONSTRUCTS: [&str; 66] = [
    "Assign",
    "AugAssign",
    "AnnAssign",
    "NamedExpr",
    "BinOp",
    "UnaryOp",
    "BoolOp",
    "Compare",
    "Call",
    "Subscript",
    "Slice",
    "Attribute",
    "Starred",
    "DoubleStarred",
    "List",
    "Tuple",
    "Dict",
    "Set",
    "ListComp",
    "SetComp",
    "DictComp",
    "GeneratorExp",
    "ComprehensionFor",
    "ComprehensionIf",
    "IfExp",
    "Lambda",
    "Await",
    "Yield",
    "YieldFrom",
    "JoinedStr",
    "FormattedValue",
    "FunctionDef",
    "AsyncFunctionDef",
    "ClassDef",
    "Decorator",
    "Return",
    "Delete",
    "For",
    "AsyncFor",
    "While",
    "If",
    "Elif",
    "With",
    "AsyncWith",
    "Raise",
    "Try",
    "ExceptHandler",
    "Assert",
    "Import",
    "ImportFrom",
    "Global",
    "Nonlocal",
    "Pass",
    "Break",
    "Continue",
    "ExprStmt",
    "Name",
    "Constant",
    "FunctionName",
    "ClassName",
    "Parameter",
    "AttributeName",
    "ImportName",
    "KeywordName",
    "ExceptName",
    "GlobalName",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Operator,
    Operand,
    Ignore,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructRule {
    pub role: Role,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symbol: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationTable {
    #[serde(default)]
    pub description: String,
    pub constructs: BTreeMap<String, ConstructRule>,
}

impl ClassificationTable {
    pub fn from_json(text: &str) -> Result<Self, AnalyzerError> {
        let table: ClassificationTable = serde_json::from_str(text)?;
        for name in CONSTRUCTS {
            let rule = table
                .constructs
                .get(name)
                .ok_or_else(|| AnalyzerError::OperatorTable(format!("construct {name} is not classified")))?;
            if rule.role == Role::Operator && rule.symbol.is_none() {
                return Err(AnalyzerError::OperatorTable(format!("operator {name} has no symbol")));
            }
        }
        if let Some(extra) = table.constructs.keys().find(|k| !CONSTRUCTS.contains(&k.as_str())) {
            return Err(AnalyzerError::OperatorTable(format!("unknown construct {extra}")));
        }
        Ok(table)
    }

    /// The table shipped with the crate.
    pub fn builtin() -> &'static ClassificationTable {
        static TABLE: OnceLock<ClassificationTable> = OnceLock::new();
        TABLE.get_or_init(|| {
            ClassificationTable::from_json(include_str!("../data/halstead.json"))
                .expect("bundled Halstead table is valid")
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct HalsteadReport {
    pub n1: u64,
    pub n2: u64,
    #[serde(rename = "N1")]
    pub big_n1: u64,
    #[serde(rename = "N2")]
    pub big_n2: u64,
    pub vocabulary: u64,
    pub length: u64,
    pub volume: f64,
    pub delivered_bugs: f64,
}

impl HalsteadReport {
    pub fn from_counts(n1: u64, n2: u64, big_n1: u64, big_n2: u64) -> Self {
        let vocabulary = n1 + n2;
        let length = big_n1 + big_n2;
        let volume = if vocabulary > 1 { length as f64 * (vocabulary as f64).log2() } else { 0.0 };
        HalsteadReport { n1, n2, big_n1, big_n2, vocabulary, length, volume, delivered_bugs: volume / 3000.0 }
    }
}

/// Operator and operand occurrence counts keyed by identity.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HalsteadCounts {
    pub operators: BTreeMap<String, u64>,
    pub operands: BTreeMap<String, u64>,
}

impl HalsteadCounts {
    pub fn report(&self) -> HalsteadReport {
        HalsteadReport::from_counts(
            self.operators.len() as u64,
            self.operands.len() as u64,
            self.operators.values().sum(),
            self.operands.values().sum(),
        )
    }
}

pub fn halstead(module: &Module) -> HalsteadReport {
    halstead_counts(module, ClassificationTable::builtin()).report()
}

pub fn halstead_counts(module: &Module, table: &ClassificationTable) -> HalsteadCounts {
    let mut w = Walker {
        rules: table.constructs.iter().map(|(k, v)| (k.as_str(), v)).collect(),
        counts: HalsteadCounts::default(),
    };
    w.body(&module.body);
    w.counts
}

struct Walker<'t> {
    rules: HashMap<&'t str, &'t ConstructRule>,
    counts: HalsteadCounts,
}

impl Walker<'_> {
    /// Records one occurrence of `construct`; `text` is the concrete operator
    /// spelling or the operand identity.
    fn emit(&mut self, construct: &str, text: &str) {
        let Some(rule) = self.rules.get(construct) else { return };
        match rule.role {
            Role::Operator => {
                let symbol = rule.symbol.as_deref().unwrap_or(construct).replace("{op}", text);
                *self.counts.operators.entry(symbol).or_default() += 1;
            }
            Role::Operand => *self.counts.operands.entry(text.to_string()).or_default() += 1,
            Role::Ignore => {}
        }
    }

    fn body(&mut self, body: &[Stmt]) {
        let skip = usize::from(docstring(body).is_some());
        for s in &body[skip..] {
            self.stmt(s);
        }
    }

    fn params(&mut self, args: &Arguments) {
        for a in args.all() {
            self.emit("Parameter", &a.name);
            if let Some(ann) = &a.annotation {
                self.expr(ann);
            }
        }
        for d in args.defaults.iter().chain(args.kw_defaults.iter().flatten()) {
            self.expr(d);
        }
    }

    fn keyword(&mut self, k: &Keyword) {
        match &k.arg {
            Some(name) => self.emit("KeywordName", name),
            None => self.emit("DoubleStarred", "**"),
        }
        self.expr(&k.value);
    }

    fn exprs<'e>(&mut self, es: impl IntoIterator<Item = &'e Expr>) {
        for e in es {
            self.expr(e);
        }
    }

    fn stmt(&mut self, s: &Stmt) {
        match &s.kind {
            StmtKind::FunctionDef(f) => {
                for d in &f.decorators {
                    self.emit("Decorator", "@");
                    self.expr(d);
                }
                self.emit(if f.is_async { "AsyncFunctionDef" } else { "FunctionDef" }, "def");
                self.emit("FunctionName", &f.name);
                self.params(&f.args);
                self.exprs(&f.returns);
                self.body(&f.body);
            }
            StmtKind::ClassDef(c) => {
                for d in &c.decorators {
                    self.emit("Decorator", "@");
                    self.expr(d);
                }
                self.emit("ClassDef", "class");
                self.emit("ClassName", &c.name);
                self.exprs(&c.bases);
                for k in &c.keywords {
                    self.keyword(k);
                }
                self.body(&c.body);
            }
            StmtKind::Return(v) => {
                self.emit("Return", "return");
                self.exprs(v);
            }
            StmtKind::Delete(ts) => {
                self.emit("Delete", "del");
                self.exprs(ts);
            }
            StmtKind::Assign { targets, value } => {
                for t in targets {
                    self.emit("Assign", "=");
                    self.expr(t);
                }
                self.expr(value);
            }
            StmtKind::AugAssign { target, op, value } => {
                self.emit("AugAssign", op.symbol());
                self.expr(target);
                self.expr(value);
            }
            StmtKind::AnnAssign { target, annotation, value } => {
                if value.is_some() {
                    self.emit("AnnAssign", "=");
                }
                self.expr(target);
                self.expr(annotation);
                self.exprs(value);
            }
            StmtKind::For { target, iter, body, orelse, is_async } => {
                self.emit(if *is_async { "AsyncFor" } else { "For" }, "for");
                self.expr(target);
                self.expr(iter);
                self.body(body);
                self.body(orelse);
            }
            StmtKind::While { test, body, orelse } => {
                self.emit("While", "while");
                self.expr(test);
                self.body(body);
                self.body(orelse);
            }
            StmtKind::If { test, body, orelse, is_elif } => {
                self.emit(if *is_elif { "Elif" } else { "If" }, "if");
                self.expr(test);
                self.body(body);
                self.body(orelse);
            }
            StmtKind::With { items, body, is_async } => {
                self.emit(if *is_async { "AsyncWith" } else { "With" }, "with");
                for it in items {
                    self.expr(&it.context_expr);
                    self.exprs(&it.optional_vars);
                }
                self.body(body);
            }
            StmtKind::Raise { exc, cause } => {
                self.emit("Raise", "raise");
                self.exprs(exc);
                self.exprs(cause);
            }
            StmtKind::Try { body, handlers, orelse, finalbody } => {
                self.emit("Try", "try");
                self.body(body);
                for h in handlers {
                    self.emit("ExceptHandler", "except");
                    self.exprs(&h.type_);
                    if let Some(n) = &h.name {
                        self.emit("ExceptName", n);
                    }
                    self.body(&h.body);
                }
                self.body(orelse);
                self.body(finalbody);
            }
            StmtKind::Assert { test, msg } => {
                self.emit("Assert", "assert");
                self.expr(test);
                self.exprs(msg);
            }
            StmtKind::Import(names) => {
                self.emit("Import", "import");
                self.aliases(names);
            }
            StmtKind::ImportFrom { module, names, .. } => {
                self.emit("ImportFrom", "import");
                if let Some(m) = module {
                    self.emit("ImportName", m);
                }
                self.aliases(names);
            }
            StmtKind::Global(names) | StmtKind::Nonlocal(names) => {
                if matches!(s.kind, StmtKind::Global(_)) {
                    self.emit("Global", "global");
                } else {
                    self.emit("Nonlocal", "nonlocal");
                }
                for n in names {
                    self.emit("GlobalName", n);
                }
            }
            StmtKind::Expr(e) => {
                self.emit("ExprStmt", "");
                self.expr(e);
            }
            StmtKind::Pass => self.emit("Pass", "pass"),
            StmtKind::Break => self.emit("Break", "break"),
            StmtKind::Continue => self.emit("Continue", "continue"),
        }
    }

    fn aliases(&mut self, names: &[Alias]) {
        for a in names {
            self.emit("ImportName", &a.name);
            if let Some(asname) = &a.asname {
                self.emit("ImportName", asname);
            }
        }
    }

    fn generators(&mut self, gens: &[Comprehension]) {
        for g in gens {
            self.emit("ComprehensionFor", "for");
            self.expr(&g.target);
            self.expr(&g.iter);
            for cond in &g.ifs {
                self.emit("ComprehensionIf", "if");
                self.expr(cond);
            }
        }
    }

    fn expr(&mut self, e: &Expr) {
        match &e.kind {
            ExprKind::BoolOp { op, values } => {
                for _ in 1..values.len() {
                    self.emit("BoolOp", op.symbol());
                }
                self.exprs(values);
            }
            ExprKind::NamedExpr { target, value } => {
                self.emit("NamedExpr", ":=");
                self.expr(target);
                self.expr(value);
            }
            ExprKind::BinOp { left, op, right } => {
                self.emit("BinOp", op.symbol());
                self.expr(left);
                self.expr(right);
            }
            ExprKind::UnaryOp { op, operand } => {
                self.emit("UnaryOp", op.symbol());
                self.expr(operand);
            }
            ExprKind::Lambda { args, body } => {
                self.emit("Lambda", "lambda");
                self.params(args);
                self.expr(body);
            }
            ExprKind::IfExp { test, body, orelse } => {
                self.emit("IfExp", "if-else");
                self.expr(body);
                self.expr(test);
                self.expr(orelse);
            }
            ExprKind::Dict { keys, values } => {
                self.emit("Dict", "dict");
                for (k, v) in keys.iter().zip(values) {
                    match k {
                        Some(k) => self.expr(k),
                        None => self.emit("DoubleStarred", "**"),
                    }
                    self.expr(v);
                }
            }
            ExprKind::Set(elts) => {
                self.emit("Set", "set");
                self.exprs(elts);
            }
            ExprKind::List(elts) => {
                self.emit("List", "list");
                self.exprs(elts);
            }
            ExprKind::Tuple(elts) => {
                self.emit("Tuple", "tuple");
                self.exprs(elts);
            }
            ExprKind::ListComp { elt, generators } => {
                self.emit("ListComp", "listcomp");
                self.expr(elt);
                self.generators(generators);
            }
            ExprKind::SetComp { elt, generators } => {
                self.emit("SetComp", "setcomp");
                self.expr(elt);
                self.generators(generators);
            }
            ExprKind::GeneratorExp { elt, generators } => {
                self.emit("GeneratorExp", "genexp");
                self.expr(elt);
                self.generators(generators);
            }
            ExprKind::DictComp { key, value, generators } => {
                self.emit("DictComp", "dictcomp");
                self.expr(key);
                self.expr(value);
                self.generators(generators);
            }
            ExprKind::Await(v) => {
                self.emit("Await", "await");
                self.expr(v);
            }
            ExprKind::Yield(v) => {
                self.emit("Yield", "yield");
                if let Some(v) = v {
                    self.expr(v);
                }
            }
            ExprKind::YieldFrom(v) => {
                self.emit("YieldFrom", "yield from");
                self.expr(v);
            }
            ExprKind::Compare { left, ops, comparators } => {
                for op in ops {
                    self.emit("Compare", op.symbol());
                }
                self.expr(left);
                self.exprs(comparators);
            }
            ExprKind::Call { func, args, keywords } => {
                self.emit("Call", "()");
                self.expr(func);
                self.exprs(args);
                for k in keywords {
                    self.keyword(k);
                }
            }
            ExprKind::FormattedValue { value, format_spec, .. } => {
                self.emit("FormattedValue", "");
                self.expr(value);
                if let Some(spec) = format_spec {
                    for part in joined_fields(spec) {
                        self.expr(part);
                    }
                }
            }
            ExprKind::JoinedStr(parts) => {
                self.emit("JoinedStr", "f-string");
                for p in parts {
                    if !matches!(p.kind, ExprKind::Constant(_)) {
                        self.expr(p);
                    }
                }
            }
            ExprKind::Constant(c) => self.emit("Constant", &c.key()),
            ExprKind::Attribute { value, attr } => {
                self.emit("Attribute", ".");
                self.expr(value);
                self.emit("AttributeName", attr);
            }
            ExprKind::Subscript { value, slice } => {
                self.emit("Subscript", "[]");
                self.expr(value);
                self.expr(slice);
            }
            ExprKind::Starred(v) => {
                self.emit("Starred", "*");
                self.expr(v);
            }
            ExprKind::Name(n) => self.emit("Name", n),
            ExprKind::Slice { lower, upper, step } => {
                self.emit("Slice", ":");
                for part in [lower, upper, step].into_iter().flatten() {
                    self.expr(part);
                }
            }
        }
    }
}

/// Replacement fields of a format-spec `JoinedStr`.
fn joined_fields(spec: &Expr) -> Vec<&Expr> {
    match &spec.kind {
        ExprKind::JoinedStr(parts) => parts.iter().filter(|p| !matches!(p.kind, ExprKind::Constant(_))).collect(),
        _ => vec![spec],
    }
}
