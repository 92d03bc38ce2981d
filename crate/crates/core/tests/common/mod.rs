//! Helpers shared by the integration tests.
#![allow(dead_code)]

use std::path::{Path, PathBuf};

use blobscan::detection::DetectionConfig;
use blobscan::java::lexer::{tokenize, TokenKind};
use blobscan::report::{run_detect, AnalysisReport, RunOptions};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn detect_with(root: &Path, threshold: usize, explain: bool) -> AnalysisReport {
    let config = DetectionConfig { threshold, ..Default::default() };
    run_detect(root, &config, &RunOptions { explain, timing: false, cfg_dump: false }).expect("detection runs")
}

pub fn detect(name: &str) -> AnalysisReport {
    detect_with(&fixture(name), 3, false)
}

/// Listener fixture directories named after the smell pattern they show.
pub const LISTING_FIXTURES: &[&str] = &[
    "multi_widget_controller",
    "menu_listener",
    "instanceof_dispatch",
    "reference_comparison",
    "nested_single",
    "nested_multiple",
    "nested_chain",
    "one_widget_per_listener",
    "lambda_listeners",
    "state_based_selection",
    "listener_class",
];

/// Every `.java` file text under the fixtures directory, sorted by path.
pub fn fixture_sources() -> Vec<(PathBuf, String)> {
    let files = blobscan::report::discover(&fixture("")).expect("fixtures exist");
    files
        .into_iter()
        .map(|p| {
            let t = std::fs::read_to_string(&p).expect("fixture is UTF-8");
            (p, t)
        })
        .collect()
}

/// Number of `if`/`switch` keyword tokens (comments and strings excluded).
pub fn keyword_count(text: &str) -> usize {
    tokenize(text).tokens.iter().filter(|t| t.kind == TokenKind::Ident && matches!(&text[t.start..t.end], "if" | "switch")).count()
}

/// A listener class whose `actionPerformed` dispatches `commands` widgets by
/// reference comparison; zero commands gives a non-GUI conditional.
pub fn synthetic_listener(id: usize, commands: usize) -> String {
    let mut s = format!("import java.awt.event.*;\nimport javax.swing.*;\n\npublic class Listener{id} implements ActionListener {{\n  private boolean busy;\n");
    for k in 0..commands {
        s.push_str(&format!("  private JButton b{k};\n"));
    }
    s.push_str("  public void actionPerformed(ActionEvent e) {\n    Object src = e.getSource();\n");
    if commands == 0 {
        s.push_str("    if (busy) { return; }\n");
    }
    for k in 0..commands {
        let kw = if k == 0 { "    if" } else { " else if" };
        s.push_str(&format!("{kw} (src == b{k}) {{\n      run{k}();\n    }}"));
    }
    s.push_str("\n  }\n}\n");
    s
}

/// Writes `n` synthetic listeners with 0..=6 commands into `dir`; returns the
/// generated command count per class name.
pub fn write_synthetic_corpus(dir: &Path, n: usize, seed: u64) -> Vec<(String, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let k = rng.gen_range(0..=6);
            std::fs::write(dir.join(format!("Listener{i}.java")), synthetic_listener(i, k)).expect("write synthetic source");
            (format!("Listener{i}"), k)
        })
        .collect()
}

/// `n` single-character-deletion mutants drawn from `sources`.
pub fn deletion_mutants(sources: &[String], n: usize, seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let text = sources.choose(&mut rng).expect("at least one source");
            let chars: Vec<(usize, char)> = text.char_indices().collect();
            let (at, c) = chars[rng.gen_range(0..chars.len())];
            let mut m = String::with_capacity(text.len());
            m.push_str(&text[..at]);
            m.push_str(&text[at + c.len_utf8()..]);
            m
        })
        .collect()
}
