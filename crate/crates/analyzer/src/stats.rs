//! Physical line statistics.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::ast::{walk_stmts, Module, StmtKind};
use crate::lexer::TokenKind;
use crate::parser::SyntaxTree;

/// Line counts for one source file.
///
/// A line holding both code and a comment counts toward `sloc` and
/// `comment_lines`, so the three line classes may overlap.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceStats {
    pub loc: u64,
    pub sloc: u64,
    pub comment_lines: u64,
    pub blank_lines: u64,
    pub method_count: u64,
}

impl SourceStats {
    /// Comment lines per physical line; 0 for an empty file.
    pub fn comments_to_loc(&self) -> f64 {
        if self.loc == 0 {
            0.0
        } else {
            self.comment_lines as f64 / self.loc as f64
        }
    }
}

/// Lines of the statements that are docstrings (first string statement of a
/// module, class or function body).
pub fn docstring_lines(module: &Module) -> BTreeSet<u32> {
    let mut lines = BTreeSet::new();
    if let Some(s) = module.body.first().filter(|s| s.as_docstring().is_some()) {
        lines.insert(s.line);
    }
    walk_stmts(&module.body, &mut |s| {
        let body = match &s.kind {
            StmtKind::FunctionDef(f) => &f.body,
            StmtKind::ClassDef(c) => &c.body,
            _ => return,
        };
        if let Some(d) = body.first().filter(|d| d.as_docstring().is_some()) {
            lines.insert(d.line);
        }
    });
    lines
}

pub fn source_stats(tree: &SyntaxTree, source: &str) -> SourceStats {
    let physical: Vec<&str> = source.lines().collect();
    let loc = physical.len();
    let blank: Vec<bool> = physical.iter().map(|l| l.trim().is_empty()).collect();
    let doc_starts = docstring_lines(&tree.module);

    let mut code = vec![false; loc + 2];
    let mut comment = vec![false; loc + 2];
    let toks = &tree.tokens.tokens;
    let mut in_docstring = false;
    for (i, t) in toks.iter().enumerate() {
        match t.kind {
            TokenKind::Newline | TokenKind::Indent | TokenKind::Dedent | TokenKind::EndMarker => {
                in_docstring = false;
                continue;
            }
            TokenKind::String => {
                let starts_statement = i == 0
                    || matches!(toks[i - 1].kind, TokenKind::Newline | TokenKind::Indent | TokenKind::Dedent)
                    || toks[i - 1].is_op(":");
                if starts_statement && doc_starts.contains(&t.line) {
                    in_docstring = true;
                }
            }
            _ => in_docstring = false,
        }
        let marks = if in_docstring { &mut comment } else { &mut code };
        for line in t.line..=t.end_line {
            if let Some(m) = marks.get_mut(line as usize) {
                *m = true;
            }
        }
    }
    for c in &tree.tokens.comments {
        if let Some(m) = comment.get_mut(c.line as usize) {
            *m = true;
        }
    }

    let mut stats = SourceStats { loc: loc as u64, ..SourceStats::default() };
    for (idx, is_blank) in blank.iter().enumerate() {
        let line = idx + 1;
        if *is_blank {
            stats.blank_lines += 1;
            continue;
        }
        if code[line] {
            stats.sloc += 1;
        }
        if comment[line] {
            stats.comment_lines += 1;
        }
    }
    walk_stmts(&tree.module.body, &mut |s| {
        if matches!(s.kind, StmtKind::FunctionDef(_)) {
            stats.method_count += 1;
        }
    });
    stats
}
