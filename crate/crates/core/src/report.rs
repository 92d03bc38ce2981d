//! End-to-end pipeline over a source tree and report rendering.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;
use walkdir::WalkDir;

use crate::catalog::{load_toolkit, CatalogError, ToolkitCatalog};
use crate::cfg::{build_cfg, Branch};
use crate::commands::{GuiCommand, GuiReferenceEvidence};
use crate::detection::{analyze_listeners, command_distribution, detect_blobs, ConfigError, DetectionConfig, ListenerAnalysis};
use crate::java::{parse_bytes, CompilationUnit, ParseError};
use crate::span::Span;
use crate::types::TypeIndex;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}: no such file or directory")]
    NotFound(PathBuf),
    #[error("toolkit catalog: {0}")]
    Catalog(#[from] CatalogError),
    #[error("configuration: {0}")]
    Config(#[from] ConfigError),
}

/// Parsed sources of one analysis root.
#[derive(Debug)]
pub struct Corpus {
    pub units: Vec<CompilationUnit>,
    pub texts: Vec<String>,
    /// Files that could not be decoded.
    pub rejected: Vec<DiagnosticRow>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct DiagnosticRow {
    pub file: String,
    pub line: u32,
    pub column: u32,
    pub message: String,
}

/// Every `.java` file under `root` (or `root` itself), sorted by path.
pub fn discover(root: &Path) -> Result<Vec<PathBuf>, ReportError> {
    if !root.exists() {
        return Err(ReportError::NotFound(root.to_path_buf()));
    }
    let mut out = Vec::new();
    for entry in WalkDir::new(root).follow_links(false) {
        let entry = entry.map_err(|e| ReportError::Io {
            path: e.path().map(Path::to_path_buf).unwrap_or_else(|| root.to_path_buf()),
            source: e.into_io_error().unwrap_or_else(|| std::io::Error::other("directory walk failed")),
        })?;
        if entry.file_type().is_file() && entry.path().extension().is_some_and(|x| x == "java") {
            out.push(entry.into_path());
        }
    }
    out.sort();
    Ok(out)
}

/// Report-facing path: relative to the root, `/`-separated.
pub fn display_path(root: &Path, file: &Path) -> String {
    let rel = match file.strip_prefix(root) {
        Ok(r) if !r.as_os_str().is_empty() => r,
        _ => file.file_name().map(Path::new).unwrap_or(file),
    };
    rel.components().map(|c| c.as_os_str().to_string_lossy()).collect::<Vec<_>>().join("/")
}

/// Parses `files`; their order does not affect the result.
pub fn load_corpus(root: &Path, files: &[PathBuf], catalog: &ToolkitCatalog) -> Result<Corpus, ReportError> {
    let options = catalog.parse_options();
    let mut sorted: Vec<&PathBuf> = files.iter().collect();
    sorted.sort();
    sorted.dedup();
    let mut corpus = Corpus { units: Vec::new(), texts: Vec::new(), rejected: Vec::new() };
    for f in sorted {
        let bytes = std::fs::read(f).map_err(|e| ReportError::Io { path: f.clone(), source: e })?;
        let shown = display_path(root, f);
        match parse_bytes(Path::new(&shown), &bytes, &options) {
            Ok(unit) => {
                let text = String::from_utf8_lossy(&bytes);
                corpus.texts.push(text.strip_prefix('\u{feff}').unwrap_or(&text).to_string());
                corpus.units.push(unit);
            }
            Err(ParseError::Encoding { offset, .. }) => corpus.rejected.push(DiagnosticRow {
                file: shown,
                line: 0,
                column: 0,
                message: format!("not valid UTF-8 (byte {offset}); file skipped"),
            }),
            Err(ParseError::Io { source, .. }) => return Err(ReportError::Io { path: f.clone(), source }),
        }
    }
    Ok(corpus)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LineRange {
    pub start: u32,
    pub end: u32,
}

impl From<Span> for LineRange {
    fn from(s: Span) -> Self {
        LineRange { start: s.start.line, end: s.end.line }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HopRow {
    pub name: String,
    pub line: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EvidenceRow {
    pub kind: &'static str,
    pub terminal: &'static str,
    pub line: u32,
    pub text: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub accessor: Option<String>,
    pub trace: Vec<HopRow>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CommandRow {
    pub ordinal: usize,
    pub lines: LineRange,
    pub guard_line: u32,
    pub branch: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub evidence: Option<Vec<EvidenceRow>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FindingRow {
    pub file: String,
    pub lines: LineRange,
    pub owner: String,
    pub method: String,
    pub interface: String,
    pub loc: u32,
    pub command_count: usize,
    pub variants: Vec<&'static str>,
    pub notes: Vec<String>,
    pub commands: Vec<CommandRow>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InventoryRow {
    pub file: String,
    pub owner: String,
    pub method: String,
    pub interface: String,
    pub lines: LineRange,
    pub loc: u32,
    pub conditional: bool,
    pub command_count: usize,
    pub command_lines: Vec<LineRange>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CfgDump {
    pub file: String,
    pub owner: String,
    pub method: String,
    pub dot: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub tool_version: &'static str,
    pub config: DetectionConfig,
    pub files_analyzed: usize,
    pub listeners: usize,
    pub conditional_listeners: usize,
    pub commands: usize,
    pub findings: Vec<FindingRow>,
    pub inventory: Vec<InventoryRow>,
    pub diagnostics: Vec<DiagnosticRow>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub cfg: Vec<CfgDump>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<BTreeMap<&'static str, f64>>,
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub explain: bool,
    pub timing: bool,
    pub cfg_dump: bool,
}

fn branch_name(b: Branch) -> String {
    match b {
        Branch::Then => "then".into(),
        Branch::Else => "else".into(),
        Branch::Case(i) => format!("case {}", i + 1),
    }
}

fn evidence_row(e: &GuiReferenceEvidence, text: &str) -> EvidenceRow {
    EvidenceRow {
        kind: e.kind.as_str(),
        terminal: e.terminal.as_str(),
        line: e.span.start.line,
        text: e.span.slice(text).split_whitespace().collect::<Vec<_>>().join(" "),
        accessor: e.accessor.clone(),
        trace: e.resolution_trace.iter().map(|h| HopRow { name: h.name.clone(), line: h.definition.start.line }).collect(),
    }
}

fn command_row(c: &GuiCommand<'_>, text: &str, explain: bool) -> CommandRow {
    CommandRow {
        ordinal: c.ordinal,
        lines: c.body_span.into(),
        guard_line: c.guard_span.start.line,
        branch: branch_name(c.guard.branch),
        evidence: explain.then(|| c.all_evidence().map(|e| evidence_row(e, text)).collect()),
    }
}

fn unit_text<'t>(corpus: &'t Corpus, unit: &CompilationUnit) -> &'t str {
    corpus.units.iter().position(|u| std::ptr::eq(u, unit)).map_or("", |i| corpus.texts[i].as_str())
}

/// Runs the analysis over a parsed corpus.
pub fn analyze_corpus(corpus: &Corpus, catalog: &ToolkitCatalog, config: &DetectionConfig, opts: &RunOptions) -> AnalysisReport {
    let t0 = Instant::now();
    let index = TypeIndex::new(&corpus.units);
    let analyses = analyze_listeners(&index, catalog, config);
    let findings = detect_blobs(&analyses, catalog, config);
    let analyze_ms = t0.elapsed().as_secs_f64() * 1000.0;

    let file_of = |a: &ListenerAnalysis<'_>| a.listener.unit.file.to_string_lossy().into_owned();
    let finding_rows = findings
        .iter()
        .map(|f| {
            let text = unit_text(corpus, f.listener.unit);
            FindingRow {
                file: f.listener.unit.file.to_string_lossy().into_owned(),
                lines: f.listener.span.into(),
                owner: f.listener.owner_display().to_string(),
                method: f.listener.method.name.clone(),
                interface: f.listener.interface_simple().to_string(),
                loc: f.listener.loc(),
                command_count: f.command_count,
                variants: f.variants.iter().map(|v| v.as_str()).collect(),
                notes: f.notes.clone(),
                commands: f.commands.iter().map(|c| command_row(c, text, opts.explain)).collect(),
            }
        })
        .collect();
    let inventory: Vec<InventoryRow> = analyses
        .iter()
        .map(|a| InventoryRow {
            file: file_of(a),
            owner: a.listener.owner_display().to_string(),
            method: a.listener.method.name.clone(),
            interface: a.listener.interface_simple().to_string(),
            lines: a.listener.span.into(),
            loc: a.listener.loc(),
            conditional: a.conditional,
            command_count: a.command_count(),
            command_lines: a.commands.iter().map(|c| c.body_span.into()).collect(),
        })
        .collect();

    let mut diagnostics: Vec<DiagnosticRow> = corpus.rejected.clone();
    for u in &corpus.units {
        for d in &u.parse_diagnostics {
            diagnostics.push(DiagnosticRow {
                file: u.file.to_string_lossy().into_owned(),
                line: d.span.start.line,
                column: d.span.start.column,
                message: d.message.clone(),
            });
        }
    }
    for a in &analyses {
        for s in &a.unreachable {
            diagnostics.push(DiagnosticRow {
                file: file_of(a),
                line: s.start.line,
                column: s.start.column,
                message: format!("unreachable statement in listener {}", a.listener.method.name),
            });
        }
    }
    diagnostics.sort();
    diagnostics.dedup();

    let cfg = if opts.cfg_dump {
        analyses
            .iter()
            .filter(|a| a.conditional)
            .map(|a| CfgDump {
                file: file_of(a),
                owner: a.listener.owner_display().to_string(),
                method: a.listener.method.name.clone(),
                dot: build_cfg(a.listener.method).to_dot(),
            })
            .collect()
    } else {
        Vec::new()
    };

    AnalysisReport {
        tool_version: TOOL_VERSION,
        config: config.clone(),
        files_analyzed: corpus.units.len(),
        listeners: analyses.len(),
        conditional_listeners: analyses.iter().filter(|a| a.conditional).count(),
        commands: analyses.iter().map(|a| a.command_count()).sum(),
        findings: finding_rows,
        inventory,
        diagnostics,
        cfg,
        timing_ms: opts.timing.then(|| BTreeMap::from([("analyze", round3(analyze_ms))])),
    }
}

fn round3(x: f64) -> f64 {
    (x * 1000.0).round() / 1000.0
}

/// Discovers, parses and analyzes `root`.
pub fn run_detect(root: &Path, config: &DetectionConfig, opts: &RunOptions) -> Result<AnalysisReport, ReportError> {
    config.validate()?;
    let catalog = load_toolkit(&config.toolkit)?;
    let t0 = Instant::now();
    let files = discover(root)?;
    let corpus = load_corpus(root, &files, &catalog)?;
    let parse_ms = t0.elapsed().as_secs_f64() * 1000.0;
    let mut report = analyze_corpus(&corpus, &catalog, config, opts);
    if let Some(t) = report.timing_ms.as_mut() {
        t.insert("discover_parse", round3(parse_ms));
    }
    Ok(report)
}

/// Command-count distribution over every listener under `root`.
pub fn run_stats(root: &Path, config: &DetectionConfig) -> Result<BTreeMap<&'static str, usize>, ReportError> {
    config.validate()?;
    let catalog = load_toolkit(&config.toolkit)?;
    let files = discover(root)?;
    let corpus = load_corpus(root, &files, &catalog)?;
    let index = TypeIndex::new(&corpus.units);
    let analyses = analyze_listeners(&index, &catalog, config);
    Ok(command_distribution(&analyses))
}

pub fn render_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report values serialize");
    s.push('\n');
    s
}

pub fn render_text(report: &AnalysisReport) -> String {
    let mut out = String::new();
    for f in &report.findings {
        let _ = writeln!(
            out,
            "{}:{}-{}: {}.{} ({}) is a Blob Listener: {} commands, {} LoC",
            f.file, f.lines.start, f.lines.end, f.owner, f.method, f.interface, f.command_count, f.loc
        );
        if !f.variants.is_empty() {
            let _ = writeln!(out, "  variants: {}", f.variants.join(", "));
        }
        for n in &f.notes {
            let _ = writeln!(out, "  note: {n}");
        }
        for c in &f.commands {
            let _ = writeln!(
                out,
                "  command #{} lines {}-{} ({} branch, guard at line {})",
                c.ordinal, c.lines.start, c.lines.end, c.branch, c.guard_line
            );
            for e in c.evidence.iter().flatten() {
                let _ = write!(out, "    {} line {}: {}", e.kind, e.line, e.text);
                if e.kind != e.terminal {
                    let _ = write!(out, " -> {}", e.terminal);
                }
                if let Some(a) = &e.accessor {
                    let _ = write!(out, " [{a}]");
                }
                for h in &e.trace {
                    let _ = write!(out, " via {}@{}", h.name, h.line);
                }
                out.push('\n');
            }
        }
    }
    for d in &report.diagnostics {
        let _ = writeln!(out, "warning: {}:{}:{}: {}", d.file, d.line, d.column, d.message);
    }
    for c in &report.cfg {
        let _ = writeln!(out, "// {} {}.{}", c.file, c.owner, c.method);
        out.push_str(&c.dot);
    }
    let _ = writeln!(
        out,
        "{} files, {} listeners, {} conditional, {} commands, {} blob listeners (threshold {})",
        report.files_analyzed,
        report.listeners,
        report.conditional_listeners,
        report.commands,
        report.findings.len(),
        report.config.threshold
    );
    if let Some(t) = &report.timing_ms {
        let parts: Vec<String> = t.iter().map(|(k, v)| format!("{k} {v:.1} ms")).collect();
        let _ = writeln!(out, "timing: {}", parts.join(", "));
    }
    out
}

pub fn render_stats_text(dist: &BTreeMap<&'static str, usize>) -> String {
    let mut out = String::from("commands  listeners\n");
    for (k, v) in dist {
        let _ = writeln!(out, "{k:<9} {v:>9}");
    }
    let _ = writeln!(out, "{:<9} {:>9}", "total", dist.values().sum::<usize>());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_path_is_relative_and_slashed() {
        assert_eq!(display_path(Path::new("/a/b"), Path::new("/a/b/c/D.java")), "c/D.java");
        assert_eq!(display_path(Path::new("/a/b/D.java"), Path::new("/a/b/D.java")), "D.java");
    }

    #[test]
    fn missing_root_is_an_error() {
        assert!(matches!(discover(Path::new("/definitely/not/here")), Err(ReportError::NotFound(_))));
    }

    #[test]
    fn stats_text_lists_all_buckets() {
        let d = command_distribution(&[]);
        let t = render_stats_text(&d);
        assert!(t.contains("4+"));
        assert!(t.trim_end().ends_with('0'));
    }
}
