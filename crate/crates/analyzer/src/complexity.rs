//! Cyclomatic complexity.
//!
//! Decision points: `if`, `elif`, conditional expressions, `for` (including
//! `async for`), `while`, each `except` clause, each extra operand of an
//! `and`/`or` chain, each comprehension `for` and `if` clause, and `assert`.
//! Each function scores 1 plus its decision points. Nested functions are
//! scored separately; lambdas count toward the function that contains them.
//! Code outside any function (module and class bodies) forms a `<module>`
//! entry, which is reported only when it has decision points.

use serde::{Deserialize, Serialize};

use crate::ast::{walk_expr, Expr, ExprKind, Module, Stmt, StmtKind};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionComplexity {
    /// Dotted path, e.g. `Outer.method` or `outer.inner`.
    pub name: String,
    pub line: u32,
    pub cc: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexityReport {
    pub functions: Vec<FunctionComplexity>,
    pub total_cc: u64,
}

pub const MODULE_ENTRY: &str = "<module>";

pub fn cyclomatic_complexity(module: &Module) -> ComplexityReport {
    let mut functions = Vec::new();
    let module_points = scope_points(&module.body, "", &mut functions);
    if module_points > 0 {
        functions.insert(0, FunctionComplexity { name: MODULE_ENTRY.to_string(), line: 1, cc: 1 + module_points });
    }
    let total_cc = functions.iter().map(|f| f.cc).sum();
    ComplexityReport { functions, total_cc }
}

/// Decision points of `body` belonging to the current scope; nested
/// functions are pushed to `out` as they are found.
fn scope_points(body: &[Stmt], prefix: &str, out: &mut Vec<FunctionComplexity>) -> u64 {
    let mut points = 0;
    for s in body {
        points += s.exprs().into_iter().map(expr_points).sum::<u64>();
        points += match &s.kind {
            StmtKind::If { .. } | StmtKind::For { .. } | StmtKind::While { .. } | StmtKind::Assert { .. } => 1,
            StmtKind::Try { handlers, .. } => handlers.len() as u64,
            _ => 0,
        };
        match &s.kind {
            StmtKind::FunctionDef(f) => {
                let name = format!("{prefix}{}", f.name);
                let slot = out.len();
                out.push(FunctionComplexity { name: name.clone(), line: s.line, cc: 1 });
                let inner = scope_points(&f.body, &format!("{name}."), out);
                out[slot].cc += inner;
            }
            StmtKind::ClassDef(c) => {
                points += scope_points(&c.body, &format!("{prefix}{}.", c.name), out);
            }
            _ => {
                for block in s.blocks() {
                    points += scope_points(block, prefix, out);
                }
            }
        }
    }
    points
}

fn expr_points(e: &Expr) -> u64 {
    let mut points = 0;
    walk_expr(e, &mut |x| {
        points += match &x.kind {
            ExprKind::IfExp { .. } => 1,
            ExprKind::BoolOp { values, .. } => values.len() as u64 - 1,
            ExprKind::ListComp { generators, .. }
            | ExprKind::SetComp { generators, .. }
            | ExprKind::DictComp { generators, .. }
            | ExprKind::GeneratorExp { generators, .. } => generators.iter().map(|g| 1 + g.ifs.len() as u64).sum(),
            _ => 0,
        };
    });
    points
}
