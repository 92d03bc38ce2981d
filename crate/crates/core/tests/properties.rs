//! Property-based invariants over generated method bodies, synthetic
//! listeners and the metric formulas.

mod common;

use std::collections::BTreeSet;
use std::path::Path;

use blobscan::catalog::swing;
use blobscan::cfg::{build_cfg, Branch, EdgeKind, ENTRY};
use blobscan::commands::prune_indices;
use blobscan::detection::{analyze_listeners, detect_blobs, DetectionConfig};
use blobscan::eval::{compute_metrics, match_spans};
use blobscan::java::{conditional_count, parse_unit, parse_unit_with, Stmt};
use blobscan::report::LineRange;
use blobscan::types::TypeIndex;
use common::{keyword_count, synthetic_listener};
use proptest::prelude::*;

fn stmts() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        Just("a();".to_string()),
        Just("x = e.getSource();".to_string()),
        Just("return;".to_string()),
        Just("break;".to_string()),
        Just("continue;".to_string()),
        Just("int n = 1;".to_string()),
        Just("throw new RuntimeException();".to_string()),
    ];
    leaf.prop_recursive(4, 40, 4, |inner| {
        let block = prop::collection::vec(inner.clone(), 0..4).prop_map(|v| v.join(" "));
        prop_oneof![
            (block.clone(), prop::option::of(block.clone())).prop_map(|(t, e)| match e {
                Some(e) => format!("if (c) {{ {t} }} else {{ {e} }}"),
                None => format!("if (c) {{ {t} }}"),
            }),
            block.clone().prop_map(|b| format!("while (c) {{ {b} }}")),
            block.clone().prop_map(|b| format!("do {{ {b} }} while (c);")),
            block.clone().prop_map(|b| format!("for (int i = 0; i < 3; i++) {{ {b} }}")),
            (block.clone(), block.clone(), any::<bool>()).prop_map(|(a, b, d)| {
                let last = if d { "default" } else { "case 2" };
                format!("switch (k) {{ case 1: {a} {last}: {b} }}")
            }),
            (block.clone(), block.clone()).prop_map(|(a, b)| format!("try {{ {a} }} catch (Exception ex) {{ {b} }}")),
            block.clone().prop_map(|b| format!("outer: {{ {b} }}")),
            block.prop_map(|b| format!("{{ {b} }}")),
        ]
    })
}

fn method_source(body: &str) -> String {
    format!("class T {{\n  void m(ActionEvent e) {{\n    {body}\n  }}\n}}\n")
}

fn check_containment(s: &Stmt) -> Result<(), TestCaseError> {
    for c in s.child_statements() {
        prop_assert!(s.span.contains(&c.span), "child span escapes its parent");
        check_containment(c)?;
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn spans_nest(body in prop::collection::vec(stmts(), 1..4)) {
        let src = method_source(&body.join("\n    "));
        let unit = parse_unit(Path::new("T.java"), &src);
        prop_assert!(unit.parse_diagnostics.is_empty(), "{:?}", unit.parse_diagnostics);
        let m = &unit.types[0].methods[0];
        let b = m.body.as_ref().unwrap();
        prop_assert!(m.span.contains(&b.span));
        check_containment(b)?;
        prop_assert_eq!(conditional_count(&unit), keyword_count(&src));
    }

    #[test]
    fn governing_chains_match_path_oracle(body in prop::collection::vec(stmts(), 1..4)) {
        let src = method_source(&body.join("\n    "));
        let unit = parse_unit(Path::new("T.java"), &src);
        let cfg = build_cfg(&unit.types[0].methods[0]);
        let n = cfg.nodes.len();
        let reach = |skip: Option<usize>| {
            let mut seen = vec![false; n];
            let mut stack = vec![ENTRY];
            seen[ENTRY] = true;
            while let Some(x) = stack.pop() {
                for (i, e) in cfg.edges.iter().enumerate() {
                    if e.from == x && Some(i) != skip && !seen[e.to] {
                        seen[e.to] = true;
                        stack.push(e.to);
                    }
                }
            }
            seen
        };
        let base = reach(None);
        let branch_edges: Vec<(usize, Branch)> = cfg
            .edges
            .iter()
            .enumerate()
            .filter(|(_, e)| cfg.statement(e.from).is_some_and(|s| s.is_conditional()))
            .filter_map(|(i, e)| match e.kind {
                EdgeKind::True => Some((i, Branch::Then)),
                EdgeKind::False => Some((i, Branch::Else)),
                EdgeKind::Case(c) => Some((i, Branch::Case(c))),
                _ => None,
            })
            .collect();
        let cut: Vec<(usize, Branch, Vec<bool>)> = branch_edges.iter().map(|&(i, b)| (i, b, reach(Some(i)))).collect();
        for node in 0..n {
            if !base[node] || cfg.statement(node).is_none() {
                continue;
            }
            let expected: BTreeSet<_> = cut
                .iter()
                .filter(|(_, _, r)| !r[node])
                .map(|(i, b, _)| (cfg.statement(cfg.edges[*i].from).unwrap().id, *b))
                .collect();
            let got: BTreeSet<_> = cfg.chain_of_node(node).iter().map(|g| (g.conditional, g.branch)).collect();
            prop_assert_eq!(got, expected);
        }
    }

    #[test]
    fn mutated_sources_never_panic(body in prop::collection::vec(stmts(), 1..3), cut in any::<prop::sample::Index>(), extra in "[{}()<>;\"'/*a-z ]{0,6}") {
        let src = method_source(&body.join(" "));
        let at = cut.index(src.len());
        let at = (0..=at).rev().find(|i| src.is_char_boundary(*i)).unwrap_or(0);
        let mutated = format!("{}{}{}", &src[..at], extra, &src[at..]);
        let unit = parse_unit(Path::new("T.java"), &mutated);
        if let Some(m) = unit.types.first().and_then(|t| t.methods.first()) {
            let _ = build_cfg(m);
        }
    }

    #[test]
    fn threshold_is_monotone(counts in prop::collection::vec(0usize..=6, 1..12)) {
        let cat = swing();
        let opts = cat.parse_options();
        let units: Vec<_> = counts
            .iter()
            .enumerate()
            .map(|(i, k)| parse_unit_with(Path::new(&format!("L{i:03}.java")), &synthetic_listener(i, *k), &opts))
            .collect();
        let index = TypeIndex::new(&units);
        let analyses = analyze_listeners(&index, &cat, &DetectionConfig::default());
        let counted: Vec<usize> = analyses.iter().map(|a| a.command_count()).collect();
        prop_assert_eq!(&counted, &counts);
        let mut previous: Option<BTreeSet<String>> = None;
        for t in 1..=7 {
            let config = DetectionConfig { threshold: t, ..Default::default() };
            let flagged: BTreeSet<String> = detect_blobs(&analyses, &cat, &config).iter().map(|f| f.listener.owner.name.clone()).collect();
            let expected = counts.iter().enumerate().filter(|(_, k)| **k >= t).count();
            prop_assert_eq!(flagged.len(), expected);
            if let Some(p) = &previous {
                prop_assert!(flagged.is_subset(p));
            }
            previous = Some(flagged);
        }
    }

    #[test]
    fn pruning_keeps_a_subset(parents in prop::collection::vec(prop::option::of(0usize..8), 1..12)) {
        // Parent links must point backwards to form a forest.
        let nested: Vec<Option<usize>> = parents.iter().enumerate().map(|(i, p)| p.filter(|p| *p < i)).collect();
        let kept = prune_indices(&nested);
        let children = |p: usize| nested.iter().filter(|x| **x == Some(p)).count();
        prop_assert!(kept.windows(2).all(|w| w[0] < w[1]));
        for (i, parent) in nested.iter().enumerate() {
            let is_kept = kept.contains(&i);
            if children(i) > 1 {
                prop_assert!(!is_kept, "a candidate with several nested ones is dropped");
            }
            if let Some(p) = *parent {
                if children(p) == 1 {
                    prop_assert!(!is_kept, "a single nested candidate is dropped");
                }
                if children(p) > 1 && children(i) <= 1 {
                    prop_assert!(is_kept);
                }
            } else if children(i) <= 1 {
                prop_assert!(is_kept);
            }
        }
    }

    #[test]
    fn metrics_are_scale_free(tp in 0usize..500, fn_ in 0usize..500, fp in 0usize..500, k in 1usize..20) {
        let a = compute_metrics(tp, fn_, fp);
        let b = compute_metrics(tp * k, fn_ * k, fp * k);
        prop_assert_eq!(a.recall_text(), b.recall_text());
        prop_assert_eq!(a.precision_text(), b.precision_text());
        prop_assert!(a.recall_pct >= 0.0 && a.recall_pct <= 100.0);
    }

    #[test]
    fn matching_is_symmetric(
        det in prop::collection::vec((1u32..60, 0u32..5), 0..8),
        rel in prop::collection::vec((1u32..60, 0u32..5), 0..8),
    ) {
        let to = |v: &[(u32, u32)]| -> Vec<LineRange> { v.iter().map(|&(s, l)| LineRange { start: s, end: s + l }).collect() };
        let (d, r) = (to(&det), to(&rel));
        let (tp, fns, fps) = match_spans(&d, &r);
        prop_assert_eq!(tp + fps.len(), d.len());
        prop_assert_eq!(tp + fns.len(), r.len());
        let (tp2, _, _) = match_spans(&r, &d);
        prop_assert_eq!(tp, tp2);
    }
}
