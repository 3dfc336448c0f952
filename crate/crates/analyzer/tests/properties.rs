//! Property tests over randomly generated Python programs.

use std::collections::BTreeSet;

use pelli_analyzer::lint::{Category, CategoryCounts, LintConfig, Registry};
use pelli_analyzer::{analyze, analyze_with, Analysis};
use proptest::prelude::*;

#[derive(Debug, Clone)]
enum Node {
    Simple(String),
    /// Clauses sharing one indentation level, e.g. `if`/`else` or `try`/`except`.
    Compound(Vec<(String, Vec<Node>)>),
}

fn render(nodes: &[Node], unit: &str, depth: usize, out: &mut Vec<String>) {
    for node in nodes {
        match node {
            Node::Simple(s) => out.push(format!("{}{s}", unit.repeat(depth))),
            Node::Compound(clauses) => {
                for (header, body) in clauses {
                    out.push(format!("{}{header}", unit.repeat(depth)));
                    render(body, unit, depth + 1, out);
                }
            }
        }
    }
}

fn program(nodes: &[Node], unit: &str) -> String {
    let mut lines = Vec::new();
    render(nodes, unit, 0, &mut lines);
    let mut text = lines.join("\n");
    text.push('\n');
    text
}

fn name() -> impl Strategy<Value = String> {
    prop_oneof![
        Just("a"),
        Just("b"),
        Just("total"),
        Just("Value"),
        Just("x1"),
        Just("_tmp"),
        Just("items"),
        Just("len"),
        Just("os"),
    ]
    .prop_map(String::from)
}

fn expr() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        name(),
        (0u32..100).prop_map(|n| n.to_string()),
        Just("'text'".to_string()),
        Just("None".to_string()),
        Just("2.5".to_string()),
    ];
    leaf.prop_recursive(3, 16, 3, |inner| {
        prop_oneof![
            (inner.clone(), prop_oneof![Just("+"), Just("-"), Just("*"), Just("//"), Just("%")], inner.clone())
                .prop_map(|(l, op, r)| format!("({l} {op} {r})")),
            (inner.clone(), prop_oneof![Just("<"), Just("=="), Just("is not"), Just("in")], inner.clone())
                .prop_map(|(l, op, r)| format!("({l} {op} {r})")),
            (inner.clone(), prop_oneof![Just("and"), Just("or")], inner.clone())
                .prop_map(|(l, op, r)| format!("({l} {op} {r})")),
            (name(), prop::collection::vec(inner.clone(), 0..3))
                .prop_map(|(f, args)| format!("{f}({})", args.join(", "))),
            (name(), inner.clone()).prop_map(|(v, i)| format!("{v}[{i}]")),
            (inner.clone(), inner.clone(), inner.clone()).prop_map(|(a, c, b)| format!("({a} if {c} else {b})")),
            (inner.clone(), name(), inner.clone()).prop_map(|(e, v, it)| format!("[{e} for {v} in {it} if {v}]")),
            inner.clone().prop_map(|e| format!("(lambda q: q + {e})")),
            inner.prop_map(|e| format!("(not {e})")),
        ]
    })
}

fn simple() -> impl Strategy<Value = Node> {
    prop_oneof![
        (name(), expr()).prop_map(|(n, e)| format!("{n} = {e}")),
        (name(), expr()).prop_map(|(n, e)| format!("{n} += {e}")),
        expr().prop_map(|e| format!("print({e})")),
        expr().prop_map(|e| format!("return {e}")),
        Just("pass".to_string()),
        Just("import os".to_string()),
        Just("from math import sqrt".to_string()),
        Just("'''Docstring-like text.'''".to_string()),
    ]
    .prop_map(Node::Simple)
}

fn block() -> impl Strategy<Value = Vec<Node>> {
    let stmt = simple().prop_recursive(3, 24, 4, |inner| {
        let body = prop::collection::vec(inner, 1..4);
        prop_oneof![
            (expr(), body.clone()).prop_map(|(c, b)| Node::Compound(vec![(format!("if {c}:"), b)])),
            (expr(), body.clone(), body.clone())
                .prop_map(|(c, b, e)| Node::Compound(vec![(format!("if {c}:"), b), ("else:".into(), e)])),
            (name(), expr(), body.clone())
                .prop_map(|(v, it, b)| Node::Compound(vec![(format!("for {v} in {it}:"), b)])),
            (expr(), body.clone()).prop_map(|(c, b)| Node::Compound(vec![(format!("while {c}:"), b)])),
            (body.clone(), body.clone())
                .prop_map(|(b, h)| Node::Compound(vec![("try:".into(), b), ("except ValueError as err:".into(), h)])),
            (prop_oneof![Just("fn"), Just("Compute"), Just("helper_2")], 0usize..8, body.clone()).prop_map(
                |(f, argc, b)| {
                    let params: Vec<String> = (0..argc).map(|i| format!("p{i}")).collect();
                    Node::Compound(vec![(format!("def {f}({}):", params.join(", ")), b)])
                }
            ),
            (prop_oneof![Just("Shape"), Just("bad_class")], body)
                .prop_map(|(c, b)| Node::Compound(vec![(format!("class {c}:"), b)])),
        ]
    });
    prop::collection::vec(stmt, 1..6)
}

fn fingerprint(a: &Analysis) -> String {
    serde_json::to_string(&(&a.metrics, &a.findings, &a.complexity, &a.halstead, &a.stats)).unwrap()
}

fn nonconvention(a: &Analysis) -> (u64, u64, u64) {
    let c = a.counts();
    (c.refactor, c.warning, c.error)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn generated_programs_parse(nodes in block()) {
        let src = program(&nodes, "    ");
        let a = analyze(&src);
        prop_assert!(a.is_usable(), "{:?}\n{}", a.syntax_error, src);
    }

    #[test]
    fn analysis_is_deterministic(nodes in block()) {
        let src = program(&nodes, "    ");
        prop_assert_eq!(fingerprint(&analyze(&src)), fingerprint(&analyze(&src)));
    }

    #[test]
    fn comment_lines_do_not_change_code_metrics(nodes in block(), at in any::<prop::sample::Index>()) {
        let src = program(&nodes, "    ");
        let mut lines: Vec<&str> = src.lines().collect();
        let k = at.index(lines.len() + 1);
        lines.insert(k, "# an inserted remark");
        let commented = lines.join("\n") + "\n";
        let before = analyze(&src);
        let after = analyze(&commented);
        prop_assert!(after.is_usable());
        prop_assert_eq!(nonconvention(&before), nonconvention(&after));
        prop_assert_eq!(&before.halstead, &after.halstead);
        let cc = |a: &Analysis| a.complexity.as_ref().map(|c| (c.total_cc, c.functions.iter().map(|f| f.cc).collect::<Vec<_>>()));
        prop_assert_eq!(cc(&before), cc(&after));
        let (sb, sa) = (before.stats.unwrap(), after.stats.unwrap());
        prop_assert_eq!(sb.sloc, sa.sloc);
        prop_assert_eq!(sb.comment_lines + 1, sa.comment_lines);
        prop_assert_eq!(sb.loc + 1, sa.loc);
    }

    #[test]
    fn indentation_width_does_not_change_metrics(nodes in block(), unit in prop_oneof![Just("  "), Just("\t"), Just("        ")]) {
        let four = analyze(&program(&nodes, "    "));
        let other = analyze(&program(&nodes, unit));
        prop_assert_eq!(fingerprint(&four), fingerprint(&other));
    }

    #[test]
    fn complexity_is_at_least_one_per_function(nodes in block()) {
        let a = analyze(&program(&nodes, "    "));
        let cx = a.complexity.unwrap();
        prop_assert!(cx.functions.iter().all(|f| f.cc >= 1));
        prop_assert_eq!(cx.total_cc, cx.functions.iter().map(|f| f.cc).sum::<u64>());
    }

    #[test]
    fn delivered_bugs_is_volume_over_3000(nodes in block()) {
        let a = analyze(&program(&nodes, "    "));
        let h = a.halstead.unwrap();
        prop_assert!((h.delivered_bugs - h.volume / 3000.0).abs() <= 1e-12 * h.volume.max(1.0));
        prop_assert_eq!(h.vocabulary, h.n1 + h.n2);
        prop_assert_eq!(h.length, h.big_n1 + h.big_n2);
        let m = a.metrics.unwrap();
        prop_assert!((0.0..=100.0).contains(&m.mi));
    }

    #[test]
    fn disabled_rules_are_never_reported(nodes in block(), mask in prop::collection::vec(any::<bool>(), 32)) {
        let registry = Registry::builtin();
        let disabled: BTreeSet<String> = registry
            .rules
            .iter()
            .zip(mask.iter().cycle())
            .filter(|(_, off)| **off)
            .map(|(r, _)| r.id.clone())
            .collect();
        let config = LintConfig { disabled: disabled.clone(), enabled: BTreeSet::new() };
        let a = analyze_with(&program(&nodes, "    "), registry, &config);
        prop_assert!(a.findings.iter().all(|f| !disabled.contains(&f.rule_id)));
    }

    #[test]
    fn findings_partition_into_categories(nodes in block()) {
        let a = analyze(&program(&nodes, "    "));
        let c: CategoryCounts = a.counts();
        let total = c.convention + c.refactor + c.warning + c.error + c.fatal;
        prop_assert_eq!(total as usize, a.findings.len());
        for f in &a.findings {
            let prefix = f.rule_id.chars().next().unwrap().to_string();
            prop_assert_eq!(prefix, f.category.to_string());
        }
        let m = a.metrics.unwrap();
        prop_assert_eq!((m.convention_count, m.refactor_count, m.warning_count, m.error_count), (c.convention, c.refactor, c.warning, c.error));
        prop_assert!(a.findings.iter().all(|f| f.category != Category::F));
    }

    #[test]
    fn line_counts_are_consistent(nodes in block(), blanks in prop::collection::vec(any::<prop::sample::Index>(), 0..4)) {
        let src = program(&nodes, "    ");
        let mut lines: Vec<&str> = src.lines().collect();
        for b in &blanks {
            let k = b.index(lines.len() + 1);
            lines.insert(k, "");
        }
        let src = lines.join("\n") + "\n";
        let s = analyze(&src).stats.unwrap();
        prop_assert!(s.sloc + s.blank_lines <= s.loc);
        prop_assert!(s.comment_lines + s.blank_lines <= s.loc);
        prop_assert_eq!(s.loc as usize, src.lines().count());
    }

    #[test]
    fn arbitrary_text_never_panics(src in "[ -~\n\t]{0,200}") {
        let a = analyze(&src);
        if !a.is_usable() {
            prop_assert_eq!(a.findings.len(), 1);
            prop_assert_eq!(a.findings[0].rule_id.as_str(), "F0001");
        }
    }
}
