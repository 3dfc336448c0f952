//! The closed registry of minor adjustments.
//!
//! Two edits are allowed: inserting an import the task allows for a name
//! the solution uses but never binds, and adding a top-level wrapper when
//! the entry point exists only as a class method. Anything else is a major
//! change and is left to a follow-up request.

use std::collections::BTreeSet;

use pelli_analyzer::ast::{Arguments, ClassDef, Constant, ExprKind, FunctionDef, Stmt, StmtKind};
use pelli_analyzer::lint::undefined_names;
use pelli_analyzer::SyntaxTree;

use crate::corpus::TaskSpec;
use crate::solution::{Adjustment, AdjustmentKind, Solution, SolutionStatus};

/// Applies every applicable registered adjustment. Unparseable or already
/// complete sources come back unchanged.
pub fn apply_minor_adjustments(solution: &Solution, task: &TaskSpec) -> Solution {
    let (source, edits) = adjust_source(&solution.source_text, task);
    let mut out = solution.clone();
    if !edits.is_empty() {
        out.source_text = source;
        out.adjustments.extend(edits);
        out.status = SolutionStatus::Adjusted;
    }
    out
}

pub fn adjust_source(source: &str, task: &TaskSpec) -> (String, Vec<Adjustment>) {
    let Ok(tree) = pelli_analyzer::parse(source) else {
        return (source.to_string(), Vec::new());
    };
    let mut text = source.to_string();
    let mut edits = Vec::new();
    if let Some(edit) = insert_imports(&mut text, &tree, task) {
        edits.push(edit);
    }
    // Re-parse so the wrapper sees the shifted lines; imports never change
    // which names are defined at top level.
    if let Ok(tree) = pelli_analyzer::parse(&text) {
        if let Some(edit) = add_entry_wrapper(&mut text, &tree, &task.entry_point.name) {
            edits.push(edit);
        }
    }
    (text, edits)
}

fn is_docstring(s: &Stmt) -> bool {
    matches!(&s.kind, StmtKind::Expr(e) if matches!(e.kind, ExprKind::Constant(Constant::Str(_))))
}

fn is_future_import(s: &Stmt) -> bool {
    matches!(&s.kind, StmtKind::ImportFrom { module: Some(m), .. } if m == "__future__")
}

/// 1-based line where new imports go: before the first statement that is
/// neither the module docstring nor a `__future__` import.
fn import_line(tree: &SyntaxTree, line_count: usize) -> usize {
    let body = &tree.module.body;
    let mut skip = 0;
    if body.first().is_some_and(is_docstring) {
        skip = 1;
    }
    while body.get(skip).is_some_and(is_future_import) {
        skip += 1;
    }
    match (skip, body.get(skip)) {
        (0, _) => 1,
        (_, Some(s)) => s.line as usize,
        (_, None) => line_count + 1,
    }
}

fn insert_lines(text: &mut String, at: usize, block: &str) {
    let mut offset = 0;
    for _ in 1..at {
        match text[offset..].find('\n') {
            Some(i) => offset += i + 1,
            None => {
                offset = text.len();
                break;
            }
        }
    }
    if offset == text.len() && !text.is_empty() && !text.ends_with('\n') {
        text.push('\n');
        offset = text.len();
    }
    text.insert_str(offset, block);
}

fn insert_imports(text: &mut String, tree: &SyntaxTree, task: &TaskSpec) -> Option<Adjustment> {
    let missing = undefined_names(tree);
    let mut statements = BTreeSet::new();
    let mut names = Vec::new();
    for name in &missing {
        if let Some(stmt) = task.allowed_imports.get(name) {
            statements.insert(stmt.trim().to_string());
            names.push(name.as_str());
        }
    }
    if statements.is_empty() {
        return None;
    }
    let line = import_line(tree, text.lines().count());
    let block: String = statements.iter().map(|s| format!("{s}\n")).collect();
    insert_lines(text, line, &block);
    Some(Adjustment {
        kind: AdjustmentKind::MissingImport,
        line: line as u32,
        detail: format!("inserted {} for {}", statements.into_iter().collect::<Vec<_>>().join("; "), names.join(", ")),
    })
}

fn binds_at_top_level(s: &Stmt, name: &str) -> bool {
    match &s.kind {
        StmtKind::FunctionDef(f) => f.name == name,
        StmtKind::ClassDef(c) => c.name == name,
        StmtKind::Assign { targets, .. } => targets.iter().any(|t| t.as_name() == Some(name)),
        StmtKind::AnnAssign { target, .. } => target.as_name() == Some(name),
        StmtKind::Import(aliases) | StmtKind::ImportFrom { names: aliases, .. } => aliases
            .iter()
            .any(|a| a.asname.as_deref().unwrap_or_else(|| a.name.split('.').next().unwrap_or(&a.name)) == name),
        _ => false,
    }
}

fn has_decorator(f: &FunctionDef, name: &str) -> bool {
    f.decorators.iter().any(|d| d.as_name() == Some(name))
}

/// Whether `Class()` needs no arguments.
fn constructible_without_args(class: &ClassDef) -> bool {
    let init = class.body.iter().find_map(|s| match &s.kind {
        StmtKind::FunctionDef(f) if f.name == "__init__" => Some(f),
        _ => None,
    });
    let Some(init) = init else { return true };
    let a: &Arguments = &init.args;
    let positional = a.posonly.len() + a.args.len();
    let required_positional = positional.saturating_sub(1 + a.defaults.len());
    let required_kwonly = a.kw_defaults.iter().filter(|d| d.is_none()).count();
    positional >= 1 && required_positional == 0 && required_kwonly == 0
}

fn add_entry_wrapper(text: &mut String, tree: &SyntaxTree, entry: &str) -> Option<Adjustment> {
    let body = &tree.module.body;
    if body.iter().any(|s| binds_at_top_level(s, entry)) {
        return None;
    }
    let (class, method) = body.iter().find_map(|s| match &s.kind {
        StmtKind::ClassDef(c) => c.body.iter().find_map(|m| match &m.kind {
            StmtKind::FunctionDef(f) if f.name == entry => Some((c.as_ref(), f.as_ref())),
            _ => None,
        }),
        _ => None,
    })?;
    let target = if has_decorator(method, "staticmethod") || has_decorator(method, "classmethod") {
        class.name.clone()
    } else if constructible_without_args(class) {
        format!("{}()", class.name)
    } else {
        return None;
    };
    if !text.is_empty() && !text.ends_with('\n') {
        text.push('\n');
    }
    let line = text.lines().count() + 3;
    text.push_str(&format!("\n\ndef {entry}(*args, **kwargs):\n    return {target}.{entry}(*args, **kwargs)\n"));
    Some(Adjustment {
        kind: AdjustmentKind::EntryPointWrapper,
        line: line as u32,
        detail: format!("added top-level {entry} calling {target}.{entry}"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Algorithm, ArgSpec, EntryPoint, InputFormat, InputSpec};

    fn task(entry: &str, imports: &[(&str, &str)]) -> TaskSpec {
        TaskSpec {
            id: "t".into(),
            domain: Algorithm::QuickSort.domain(),
            algorithm: Algorithm::QuickSort,
            entry_point: EntryPoint { name: entry.into(), arity: 1 },
            input_spec: InputSpec { format: InputFormat::Json, args: vec![ArgSpec::Int { value: 1 }] },
            timeout_secs: 5.0,
            allowed_imports: imports.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
        }
    }

    #[test]
    fn complete_solution_is_untouched() {
        let src = "import math\n\ndef f(x):\n    return math.sqrt(x)\n";
        let s = Solution::new("t", None, "p", 1, src.into());
        let out = apply_minor_adjustments(&s, &task("f", &[("math", "import math")]));
        assert_eq!(out, s);
    }

    #[test]
    fn import_goes_after_docstring_and_future() {
        let src =
            "\"\"\"Doc\nstring.\"\"\"\nfrom __future__ import annotations\n\ndef f(x):\n    return math.floor(x)\n";
        let (out, edits) = adjust_source(src, &task("f", &[("math", "import math")]));
        assert_eq!(
            out,
            "\"\"\"Doc\nstring.\"\"\"\nfrom __future__ import annotations\n\nimport math\ndef f(x):\n    return math.floor(x)\n"
        );
        assert_eq!(edits[0].line, 5);
    }

    #[test]
    fn import_at_top_without_preamble() {
        let (out, edits) =
            adjust_source("def f(a):\n    return np.array(a)\n", &task("f", &[("np", "import numpy as np")]));
        assert_eq!(out, "import numpy as np\ndef f(a):\n    return np.array(a)\n");
        assert_eq!(edits[0].line, 1);
    }

    #[test]
    fn undeclared_names_are_left_alone() {
        let (out, edits) =
            adjust_source("def f(x):\n    return scipy.fft(x)\n", &task("f", &[("math", "import math")]));
        assert!(edits.is_empty());
        assert_eq!(out, "def f(x):\n    return scipy.fft(x)\n");
    }

    #[test]
    fn static_method_is_called_through_the_class() {
        let src = "class S:\n    @staticmethod\n    def f(a):\n        return a";
        let (out, edits) = adjust_source(src, &task("f", &[]));
        assert!(out.ends_with("\n\n\ndef f(*args, **kwargs):\n    return S.f(*args, **kwargs)\n"), "{out}");
        assert_eq!(edits[0].line, 7);
        assert_eq!(out.lines().nth(6), Some("def f(*args, **kwargs):"));
    }

    #[test]
    fn class_needing_arguments_gets_no_wrapper() {
        let src = "class S:\n    def __init__(self, n):\n        self.n = n\n    def f(self, a):\n        return a\n";
        assert!(adjust_source(src, &task("f", &[])).1.is_empty());
    }

    #[test]
    fn unparseable_source_is_a_no_op() {
        assert!(adjust_source("def f(:\n", &task("f", &[])).1.is_empty());
    }
}
