//! Lint engine.
//!
//! Rules, their categories and default thresholds come from
//! `data/rules.json`. Checks are grouped by concern: naming and docstrings,
//! function design limits, scope-based checks, and a few structural ones.

mod design;
mod naming;
pub mod scope;
mod structure;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{AnalyzerError, SyntaxError};
use crate::parser::SyntaxTree;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Category {
    /// Convention.
    C,
    /// Refactoring.
    R,
    /// Warning.
    W,
    /// Error.
    E,
    /// Fatal: analysis could not proceed.
    F,
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Category::C => "C",
            Category::R => "R",
            Category::W => "W",
            Category::E => "E",
            Category::F => "F",
        };
        f.write_str(c)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LintFinding {
    pub rule_id: String,
    pub category: Category,
    pub line: u32,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleInfo {
    pub id: String,
    pub symbol: String,
    pub category: Category,
    pub description: String,
    pub enabled: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LintOptions {
    pub max_args: usize,
    pub max_branches: usize,
    pub max_locals: usize,
    pub max_statements: usize,
    pub max_returns: usize,
    pub max_line_length: usize,
    pub good_names: Vec<String>,
    pub regex: BTreeMap<String, String>,
    pub builtins: Vec<String>,
    pub implicit_globals: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RegistryFile {
    #[serde(default)]
    description: String,
    rules: Vec<RuleInfo>,
    options: LintOptions,
}

/// Naming styles checked by invalid-name.
pub const NAME_KINDS: [&str; 7] = ["function", "method", "argument", "variable", "attr", "class", "const"];

#[derive(Debug, Clone)]
pub struct Registry {
    pub rules: Vec<RuleInfo>,
    pub options: LintOptions,
    patterns: BTreeMap<String, Regex>,
    names_visible_everywhere: BTreeSet<String>,
}

impl Registry {
    pub fn from_json(text: &str) -> Result<Self, AnalyzerError> {
        let file: RegistryFile = serde_json::from_str(text)?;
        let mut ids = BTreeSet::new();
        for r in &file.rules {
            if !ids.insert(r.id.as_str()) {
                return Err(AnalyzerError::Registry(format!("duplicate rule id {}", r.id)));
            }
            if !r.id.starts_with(&r.category.to_string()) {
                return Err(AnalyzerError::Registry(format!("rule {} does not match its category", r.id)));
            }
        }
        let mut patterns = BTreeMap::new();
        for kind in NAME_KINDS {
            let src = file
                .options
                .regex
                .get(kind)
                .ok_or_else(|| AnalyzerError::Registry(format!("missing naming regex for {kind}")))?;
            let re = Regex::new(&format!("^(?:{src})")).map_err(|e| AnalyzerError::Registry(e.to_string()))?;
            patterns.insert(kind.to_string(), re);
        }
        let names_visible_everywhere =
            file.options.builtins.iter().chain(file.options.implicit_globals.iter()).cloned().collect();
        Ok(Registry { rules: file.rules, options: file.options, patterns, names_visible_everywhere })
    }

    pub fn builtin() -> &'static Registry {
        static REGISTRY: OnceLock<Registry> = OnceLock::new();
        REGISTRY.get_or_init(|| {
            Registry::from_json(include_str!("../../data/rules.json")).expect("bundled rule registry is valid")
        })
    }

    pub fn rule(&self, id: &str) -> Option<&RuleInfo> {
        self.rules.iter().find(|r| r.id == id)
    }

    pub fn name_ok(&self, kind: &str, name: &str) -> bool {
        self.options.good_names.iter().any(|g| g == name) || self.patterns.get(kind).is_some_and(|re| re.is_match(name))
    }

    pub fn is_builtin(&self, name: &str) -> bool {
        self.options.builtins.iter().any(|b| b == name)
    }
}

/// Which rules run: registry defaults adjusted by explicit lists.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LintConfig {
    #[serde(default)]
    pub disabled: BTreeSet<String>,
    #[serde(default)]
    pub enabled: BTreeSet<String>,
}

impl LintConfig {
    pub fn is_enabled(&self, rule: &RuleInfo) -> bool {
        if self.disabled.contains(&rule.id) || self.disabled.contains(&rule.symbol) {
            return false;
        }
        rule.enabled || self.enabled.contains(&rule.id) || self.enabled.contains(&rule.symbol)
    }
}

/// Collects findings for enabled rules only.
pub(crate) struct Sink<'a> {
    registry: &'a Registry,
    config: &'a LintConfig,
    findings: Vec<LintFinding>,
}

impl Sink<'_> {
    pub(crate) fn emit(&mut self, id: &str, line: u32, message: String) {
        let rule = self.registry.rule(id).unwrap_or_else(|| panic!("rule {id} missing from registry"));
        if self.config.is_enabled(rule) {
            self.findings.push(LintFinding { line, rule_id: rule.id.clone(), category: rule.category, message });
        }
    }
}

/// Lints with the bundled registry and its defaults.
pub fn lint(tree: &SyntaxTree, source: &str) -> Vec<LintFinding> {
    lint_with(tree, source, Registry::builtin(), &LintConfig::default())
}

pub fn lint_with(tree: &SyntaxTree, source: &str, registry: &Registry, config: &LintConfig) -> Vec<LintFinding> {
    let mut sink = Sink { registry, config, findings: Vec::new() };
    let scopes = scope::ScopeTree::build(&tree.module, &registry.names_visible_everywhere);
    naming::check(&tree.module, registry, &mut sink);
    naming::check_lines(source, registry, &mut sink);
    design::check(&tree.module, registry, &scopes, &mut sink);
    structure::check(&tree.module, &mut sink);
    structure::check_scopes(&scopes, registry, &mut sink);
    let mut findings = sink.findings;
    findings.sort_by(|a, b| (a.line, &a.rule_id, &a.message).cmp(&(b.line, &b.rule_id, &b.message)));
    findings
}

/// Names read somewhere in the module that resolve to no binding or builtin.
/// Empty when a star import makes resolution unknowable.
pub fn undefined_names(tree: &SyntaxTree) -> BTreeSet<String> {
    let registry = Registry::builtin();
    let scopes = scope::ScopeTree::build(&tree.module, &registry.names_visible_everywhere);
    if scopes.star_import {
        return BTreeSet::new();
    }
    scopes.undefined.into_iter().map(|(_, load)| load.name).collect()
}

/// The single finding reported for unparseable source.
pub fn fatal_finding(err: &SyntaxError) -> LintFinding {
    LintFinding {
        line: err.line,
        rule_id: "F0001".into(),
        category: Category::F,
        message: format!("syntax error: {}", err.message),
    }
}

/// Findings as JSON lines: `{"rule_id", "category", "line", "message"}`.
pub fn to_json_lines(findings: &[LintFinding]) -> String {
    let mut out = String::new();
    for f in findings {
        out.push_str(&serde_json::to_string(f).expect("finding serializes"));
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryCounts {
    pub convention: u64,
    pub refactor: u64,
    pub warning: u64,
    pub error: u64,
    pub fatal: u64,
}

impl CategoryCounts {
    pub fn tally(findings: &[LintFinding]) -> Self {
        let mut c = CategoryCounts::default();
        for f in findings {
            match f.category {
                Category::C => c.convention += 1,
                Category::R => c.refactor += 1,
                Category::W => c.warning += 1,
                Category::E => c.error += 1,
                Category::F => c.fatal += 1,
            }
        }
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse;

    fn ids(src: &str) -> Vec<String> {
        lint(&parse(src).unwrap(), src).into_iter().map(|f| f.rule_id).collect()
    }

    fn has(src: &str, id: &str) -> bool {
        ids(src).iter().any(|i| i == id)
    }

    const DOC: &str = "\"\"\"m\"\"\"\n";

    #[test]
    fn undefined_names_are_collected_once() {
        let tree = crate::parse("def f():\n    return math.sqrt(2) + math.pi + g\n").unwrap();
        let names: Vec<String> = undefined_names(&tree).into_iter().collect();
        assert_eq!(names, ["g", "math"]);
        let starred = crate::parse("from os import *\nprint(path)\n").unwrap();
        assert!(undefined_names(&starred).is_empty());
    }

    #[test]
    fn bundled_registry_loads() {
        let r = Registry::builtin();
        assert!(r.rule("C0301").is_some_and(|r| !r.enabled));
        assert!(r.rule("C0303").is_some_and(|r| !r.enabled));
        assert_eq!(r.options.max_args, 5);
    }

    #[test]
    fn pascal_case_function_is_invalid_name() {
        let src = format!("{DOC}def QuickSort(arr):\n    \"\"\"d\"\"\"\n    return arr\n");
        let f = lint(&parse(&src).unwrap(), &src);
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].rule_id, "C0103");
        assert!(f[0].message.contains("QuickSort"));
    }

    #[test]
    fn block_matrix_locals_are_invalid_names() {
        let src = format!("{DOC}def mul(a, b):\n    \"\"\"d\"\"\"\n    A_11 = a\n    B = b\n    return A_11, B\n");
        let c: Vec<_> = ids(&src).into_iter().filter(|i| i == "C0103").collect();
        assert_eq!(c.len(), 2);
    }

    #[test]
    fn seven_parameters_is_too_many() {
        let src = format!("{DOC}def f(a, b, c, d, e, g, h):\n    \"\"\"d\"\"\"\n    return a, b, c, d, e, g, h\n");
        assert_eq!(ids(&src), vec!["R0913"]);
    }

    #[test]
    fn method_receiver_not_counted_as_argument() {
        let src = format!("{DOC}class A:\n    \"\"\"d\"\"\"\n    def m(self, a, b, c, d, e):\n        \"\"\"d\"\"\"\n        return a, b, c, d, e\n");
        assert!(!has(&src, "R0913"));
    }

    #[test]
    fn disabled_rules_are_never_emitted() {
        let long = format!("{DOC}x = 1  \ny = '{}'\n", "a".repeat(120));
        let got = ids(&long);
        assert!(!got.iter().any(|i| i == "C0301" || i == "C0303"), "{got:?}");
        let mut cfg = LintConfig::default();
        cfg.enabled.insert("line-too-long".into());
        let f = lint_with(&parse(&long).unwrap(), &long, Registry::builtin(), &cfg);
        assert!(f.iter().any(|f| f.rule_id == "C0301"));
    }

    #[test]
    fn config_can_disable_by_id_or_symbol() {
        let src = "def QuickSort():\n    pass\n";
        let mut cfg = LintConfig::default();
        cfg.disabled.insert("invalid-name".into());
        cfg.disabled.insert("C0116".into());
        let f = lint_with(&parse(src).unwrap(), src, Registry::builtin(), &cfg);
        assert_eq!(f.iter().map(|f| f.rule_id.as_str()).collect::<Vec<_>>(), vec!["C0114"]);
    }

    #[test]
    fn module_constants_must_be_upper_case() {
        assert!(has(&format!("{DOC}limit = 10\n"), "C0103"));
        assert!(!has(&format!("{DOC}LIMIT = 10\n"), "C0103"));
        assert!(!has(&format!("{DOC}data = load()\n"), "C0103"));
        assert!(!has(&format!("{DOC}for i in range(3):\n    total = 1\n"), "C0103"));
    }

    #[test]
    fn warnings() {
        assert!(has(&format!("{DOC}import os\n"), "W0611"));
        assert!(!has(&format!("{DOC}import os\nprint(os.sep)\n"), "W0611"));
        assert!(!has(&format!("{DOC}import os\n__all__ = ['os']\n"), "W0611"));
        assert!(has(&format!("{DOC}def _f():\n    x = 1\n"), "W0612"));
        assert!(!has(&format!("{DOC}def _f():\n    for x in []:\n        pass\n    _y = 2\n"), "W0612"));
        assert!(has(&format!("{DOC}try:\n    pass\nexcept:\n    pass\n"), "W0702"));
        assert!(has(&format!("{DOC}def _f(list):\n    return list\n"), "W0622"));
    }

    #[test]
    fn errors() {
        assert!(has(&format!("{DOC}print(missing)\n"), "E0602"));
        assert!(!has(&format!("{DOC}from m import *\nprint(missing)\n"), "E0602"));
        assert!(has(&format!("{DOC}def _f(a, a):\n    return a\n"), "E0108"));
        assert!(has(&format!("{DOC}return 1\n"), "E0104"));
        assert!(has(&format!("{DOC}class A:\n    \"\"\"d\"\"\"\n    return 1\n"), "E0104"));
    }

    #[test]
    fn too_many_branches_returns_statements_locals() {
        let mut body = String::new();
        for i in 0..13 {
            body.push_str(&format!("    if x == {i}:\n        return {i}\n"));
        }
        let src = format!("{DOC}def _f(x):\n{body}    return -1\n");
        let got = ids(&src);
        assert!(got.contains(&"R0912".to_string()) && got.contains(&"R0911".to_string()), "{got:?}");

        let locals: String = (0..16).map(|i| format!("    v{i} = {i}\n")).collect();
        let uses: Vec<String> = (0..16).map(|i| format!("v{i}")).collect();
        let src = format!("{DOC}def _f():\n{locals}    return {}\n", uses.join(", "));
        assert_eq!(ids(&src), vec!["R0914"]);

        let stmts: String = (0..51).map(|_| "    pass\n").collect();
        assert_eq!(ids(&format!("{DOC}def _f():\n{stmts}")), vec!["R0915"]);
    }

    #[test]
    fn json_lines_export() {
        let src = "import os\n";
        let text = to_json_lines(&lint(&parse(src).unwrap(), src));
        let first: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        for key in ["rule_id", "category", "line", "message"] {
            assert!(first.get(key).is_some(), "{key}");
        }
        assert_eq!(text.lines().count(), 2);
    }
}
