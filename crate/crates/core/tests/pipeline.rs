//! End-to-end behavior on the fixture sources and through the CLI binary.

mod common;

use std::collections::BTreeSet;
use std::process::Command;

use blobscan::catalog::swing;
use blobscan::cfg::build_cfg;
use blobscan::commands::{get_potential_commands, AnalysisContext, EvidenceKind, DEFAULT_MAX_TRACE_DEPTH};
use blobscan::detection::{analyze_listeners, command_distribution, DetectionConfig};
use blobscan::java::parse_unit_with;
use blobscan::listeners::{find_conditional_listeners, find_listener_methods};
use blobscan::report::{run_stats, ReportError, RunOptions};
use blobscan::types::TypeIndex;
use common::*;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_blobscan"))
}

#[test]
fn lambda_listeners_are_found() {
    let r = detect("lambda_listeners");
    assert_eq!((r.listeners, r.conditional_listeners, r.commands), (2, 1, 0));
    assert!(r.inventory.iter().all(|i| i.method == "actionPerformed" && i.interface == "ActionListener"));
}

#[test]
fn listener_class_methods_are_separate_listeners() {
    let r = detect("listener_class");
    assert_eq!(r.listeners, 5);
    assert_eq!(r.conditional_listeners, 1);
    assert!(r.findings.is_empty());
}

#[test]
fn anonymous_listeners_have_positional_names() {
    let r = detect("one_widget_per_listener");
    let owners: Vec<&str> = r.inventory.iter().map(|i| i.owner.as_str()).collect();
    assert_eq!(owners, ["PagedView$1", "PagedView$2"]);
    assert_eq!(r.commands, 0);
}

#[test]
fn nested_copy_guard_keeps_outer_command() {
    let cat = swing();
    let text = std::fs::read_to_string(fixture("nested_single/CopyAction.java")).unwrap();
    let units = vec![parse_unit_with(std::path::Path::new("CopyAction.java"), &text, &cat.parse_options())];
    let index = TypeIndex::new(&units);
    let methods = find_listener_methods(&index, &cat);
    let cl = &find_conditional_listeners(&methods)[0];
    let cfg = build_cfg(cl.listener.method);
    let ctx = AnalysisContext::new(&index, &cat, cl.listener, DEFAULT_MAX_TRACE_DEPTH);
    let cands = get_potential_commands(cl, &cfg, &ctx);
    assert_eq!(cands.len(), 2);
    assert_eq!(cands[1].nested_in, Some(0));
    // The inner guard reaches the widget field through getText().
    assert!(cands[1].evidence.iter().any(|e| e.kind == EvidenceKind::PropertyAccess && e.accessor.as_deref() == Some("getText")));
}

#[test]
fn fixture_commands_never_nest() {
    let r = detect_with(&fixture(""), 1, false);
    for row in &r.inventory {
        for a in &row.command_lines {
            for b in &row.command_lines {
                let strictly_inside = a != b && a.start <= b.start && b.end <= a.end && (a.start < b.start || b.end < a.end);
                assert!(!strictly_inside, "{}: {:?} contains {:?}", row.file, a, b);
            }
        }
    }
}

#[test]
fn explain_shows_derivation() {
    let r = detect_with(&fixture("multi_widget_controller"), 3, true);
    let cmd = &r.findings[0].commands[0];
    let ev = cmd.evidence.as_ref().expect("explain includes evidence");
    let derived = ev.iter().find(|e| e.kind == "derived-variable").expect("src is derived");
    assert_eq!(derived.terminal, "event-source-access");
    assert_eq!(derived.trace[0].name, "src");
    assert!(ev.iter().any(|e| e.kind == "widget-field-comparison" && e.text == "b1"));
}

#[test]
fn widening_accessors_never_loses_candidates() {
    let base = swing();
    let wider = swing().with_property_accessor("getDot").unwrap().with_property_accessor("getMark").unwrap();
    let sources = fixture_sources();
    let count = |cat: &blobscan::catalog::ToolkitCatalog| -> usize {
        let opts = cat.parse_options();
        let units: Vec<_> = sources.iter().map(|(p, t)| parse_unit_with(p, t, &opts)).collect();
        let index = TypeIndex::new(&units);
        analyze_listeners(&index, cat, &DetectionConfig::default()).iter().map(|a| a.candidates.len()).sum()
    };
    assert!(count(&wider) >= count(&base));
}

#[test]
fn distribution_sums_to_listener_count() {
    let r = detect_with(&fixture(""), 3, false);
    let dist = run_stats(&fixture(""), &DetectionConfig::default()).unwrap();
    assert_eq!(dist.values().sum::<usize>(), r.listeners);
    let single = run_stats(&fixture("multi_widget_controller"), &DetectionConfig::default()).unwrap();
    assert_eq!(single["3"], 1);
    assert_eq!(command_distribution(&[]).values().sum::<usize>(), 0);
}

#[test]
fn empty_directory_reports_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let r = detect_with(dir.path(), 3, false);
    assert_eq!((r.files_analyzed, r.listeners, r.findings.len()), (0, 0, 0));
    let out = bin().arg("detect").arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn single_file_root() {
    let r = detect_with(&fixture("menu_listener/MenuListener.java"), 3, false);
    assert_eq!(r.findings.len(), 1);
    assert_eq!(r.findings[0].file, "MenuListener.java");
}

#[test]
fn undecodable_file_becomes_a_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("Bad.java"), b"class Bad { \xff\xfe }").unwrap();
    std::fs::copy(fixture("instanceof_dispatch/FormController.java"), dir.path().join("FormController.java")).unwrap();
    let r = detect_with(dir.path(), 3, false);
    assert_eq!(r.files_analyzed, 1);
    assert_eq!(r.findings.len(), 1);
    assert!(r.diagnostics.iter().any(|d| d.file == "Bad.java" && d.message.contains("UTF-8")));
}

#[test]
fn syntax_errors_do_not_hide_other_listeners() {
    let dir = tempfile::tempdir().unwrap();
    let src = std::fs::read_to_string(fixture("reference_comparison/NavigationController.java")).unwrap();
    let broken = src.replacen("public void actionPerformed", "public void actionPerformed(( @@ ) {} public void actionPerformed", 1);
    std::fs::write(dir.path().join("NavigationController.java"), broken).unwrap();
    let r = detect_with(dir.path(), 3, false);
    assert!(!r.diagnostics.is_empty());
    assert_eq!(r.findings.len(), 1);
    assert_eq!(r.findings[0].command_count, 6);
}

#[test]
fn cli_exit_codes() {
    let found = bin().args(["detect", "--no-timing"]).arg(fixture("instanceof_dispatch")).output().unwrap();
    assert_eq!(found.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&found.stdout).contains("4 commands"));
    let clean = bin().args(["detect"]).arg(fixture("lambda_listeners")).output().unwrap();
    assert_eq!(clean.status.code(), Some(0));
    let missing = bin().args(["detect", "/no/such/dir"]).output().unwrap();
    assert_eq!(missing.status.code(), Some(2));
    let bad_toolkit = bin().args(["detect", "--toolkit", "qt"]).arg(fixture("lambda_listeners")).output().unwrap();
    assert_eq!(bad_toolkit.status.code(), Some(2));
    let zero = bin().args(["detect", "--threshold", "0"]).arg(fixture("lambda_listeners")).output().unwrap();
    assert_eq!(zero.status.code(), Some(2));
    let raised = bin().args(["detect", "--threshold", "5"]).arg(fixture("instanceof_dispatch")).output().unwrap();
    assert_eq!(raised.status.code(), Some(0));
}

#[test]
fn cli_json_fields_are_stable() {
    let out = bin().args(["detect", "--format", "json", "--no-timing"]).arg(fixture("menu_listener")).output().unwrap();
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    let expected: BTreeSet<&str> = [
        "tool_version",
        "config",
        "files_analyzed",
        "listeners",
        "conditional_listeners",
        "commands",
        "findings",
        "inventory",
        "diagnostics",
    ]
    .into();
    assert_eq!(keys.iter().copied().collect::<BTreeSet<_>>(), expected);
    let timed = bin().args(["detect", "--format", "json"]).arg(fixture("menu_listener")).output().unwrap();
    let v: serde_json::Value = serde_json::from_slice(&timed.stdout).unwrap();
    assert!(v.get("timing_ms").is_some());
}

#[test]
fn cli_stats_json_and_cfg_dump() {
    let out = bin().args(["stats", "--format", "json"]).arg(fixture("nested_multiple")).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["3"], 1);
    assert_eq!(v.as_object().unwrap().len(), 5);
    let dump = bin().args(["detect", "--cfg-dump", "--no-timing"]).arg(fixture("nested_multiple")).output().unwrap();
    assert!(String::from_utf8_lossy(&dump.stdout).contains("digraph \"actionPerformed\""));
}

#[test]
fn custom_catalog_file() {
    let dir = tempfile::tempdir().unwrap();
    let catalog = "[toolkit]\nname = tiny\n\n[listeners]\nbus.Listener.onEvent(bus.Event)\n\n[widgets]\nbus.Widget\n\n[events]\nbus.Event\n\n[source_accessors]\norigin\n\n[property_accessors]\nkind\n";
    let path = dir.path().join("tiny.catalog");
    std::fs::write(&path, catalog).unwrap();
    let src = "import bus.*;\nclass H implements Listener {\n  public void onEvent(Event ev) {\n    if (ev.kind() == 1) { }\n    else if (ev.kind() == 2) { }\n    else if (ev.kind() == 3) { }\n  }\n}\n";
    std::fs::write(dir.path().join("H.java"), src).unwrap();
    let config = DetectionConfig { toolkit: path.display().to_string(), ..Default::default() };
    let r = blobscan::report::run_detect(dir.path(), &config, &RunOptions::default()).unwrap();
    assert_eq!(r.findings.len(), 1, "{}", blobscan::report::render_text(&r));
    let bad = DetectionConfig { toolkit: dir.path().join("missing.catalog").display().to_string(), ..Default::default() };
    assert!(matches!(blobscan::report::run_detect(dir.path(), &bad, &RunOptions::default()), Err(ReportError::Catalog(_))));
}
