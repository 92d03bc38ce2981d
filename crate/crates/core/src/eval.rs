//! Comparison of a detection report against hand-made annotations, with
//! recall and precision for commands and for Blob Listeners.
//!
//! Annotation format, one listener per line, tab-separated:
//!
//! ```text
//! # file            owner       method           commands       verdict
//! ui/Ctl.java       Ctl         actionPerformed  12-14,15-17    noblob
//! ```
//!
//! `commands` is a comma-separated list of `L1-L2` line ranges (`-` or empty
//! for none); `verdict` is `blob` or `noblob`.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::report::{AnalysisReport, LineRange};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("ground truth line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("ground truth line {line}: duplicate entry for {file} {owner}.{method}")]
    Duplicate { line: usize, file: String, owner: String, method: String },
    #[error("ground truth names {file} {owner}.{method}, which is not a listener in the analyzed sources")]
    TruthReference { file: String, owner: String, method: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruthEntry {
    pub file: String,
    pub owner: String,
    pub method: String,
    pub commands: Vec<LineRange>,
    pub is_blob: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GroundTruth {
    pub entries: Vec<TruthEntry>,
}

type Key = (String, String, String);

impl TruthEntry {
    fn key(&self) -> Key {
        (self.file.clone(), self.owner.clone(), self.method.clone())
    }
}

fn parse_range(s: &str, line: usize) -> Result<LineRange, EvalError> {
    let err = |m: &str| EvalError::Syntax { line, message: format!("{m}: `{s}`") };
    let s = s.trim().trim_start_matches('L');
    let (a, b) = s.split_once('-').unwrap_or((s, s));
    let start: u32 = a.trim().trim_start_matches('L').parse().map_err(|_| err("bad line range"))?;
    let end: u32 = b.trim().trim_start_matches('L').parse().map_err(|_| err("bad line range"))?;
    if start == 0 || end < start {
        return Err(err("empty line range"));
    }
    Ok(LineRange { start, end })
}

pub fn parse_ground_truth(text: &str) -> Result<GroundTruth, EvalError> {
    let mut entries = Vec::new();
    let mut seen = BTreeSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split('\t').map(str::trim).collect();
        if fields.len() != 5 {
            return Err(EvalError::Syntax { line, message: format!("expected 5 tab-separated fields, found {}", fields.len()) });
        }
        let commands = match fields[3] {
            "" | "-" => Vec::new(),
            list => list.split(',').map(|r| parse_range(r, line)).collect::<Result<_, _>>()?,
        };
        let is_blob = match fields[4] {
            "blob" => true,
            "noblob" => false,
            other => return Err(EvalError::Syntax { line, message: format!("verdict must be blob or noblob, found `{other}`") }),
        };
        let e = TruthEntry { file: fields[0].to_string(), owner: fields[1].to_string(), method: fields[2].to_string(), commands, is_blob };
        if !seen.insert(e.key()) {
            return Err(EvalError::Duplicate { line, file: e.file, owner: e.owner, method: e.method });
        }
        entries.push(e);
    }
    Ok(GroundTruth { entries })
}

pub fn load_ground_truth(path: &Path) -> Result<GroundTruth, EvalError> {
    let text = std::fs::read_to_string(path).map_err(|e| EvalError::Io { path: path.display().to_string(), message: e.to_string() })?;
    parse_ground_truth(&text)
}

fn two_dp<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64((v * 100.0).round() / 100.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvalMetrics {
    pub detected: usize,
    pub false_negatives: usize,
    pub false_positives: usize,
    #[serde(serialize_with = "two_dp")]
    pub recall_pct: f64,
    #[serde(serialize_with = "two_dp")]
    pub precision_pct: f64,
}

impl EvalMetrics {
    pub fn recall_text(&self) -> String {
        format!("{:.2}", self.recall_pct)
    }

    pub fn precision_text(&self) -> String {
        format!("{:.2}", self.precision_pct)
    }
}

fn pct(num: usize, den: usize) -> f64 {
    if den == 0 {
        100.0
    } else {
        num as f64 / den as f64 * 100.0
    }
}

pub fn compute_metrics(tp: usize, fn_: usize, fp: usize) -> EvalMetrics {
    EvalMetrics { detected: tp, false_negatives: fn_, false_positives: fp, recall_pct: pct(tp, tp + fn_), precision_pct: pct(tp, tp + fp) }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ListenerOutcome {
    pub file: String,
    pub owner: String,
    pub method: String,
    pub true_positives: usize,
    pub false_negatives: Vec<LineRange>,
    pub false_positives: Vec<LineRange>,
    pub flagged: bool,
    pub annotated_blob: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvalReport {
    pub commands: EvalMetrics,
    pub blobs: EvalMetrics,
    pub per_listener: Vec<ListenerOutcome>,
}

fn overlaps(a: &LineRange, b: &LineRange) -> bool {
    a.start <= b.end && b.start <= a.end
}

/// Greedy one-to-one matching by ascending start line; returns
/// (matched count, unmatched relevant, unmatched detected).
pub fn match_spans(detected: &[LineRange], relevant: &[LineRange]) -> (usize, Vec<LineRange>, Vec<LineRange>) {
    let mut det: Vec<&LineRange> = detected.iter().collect();
    det.sort_by_key(|r| (r.start, r.end));
    let mut rel: Vec<&LineRange> = relevant.iter().collect();
    rel.sort_by_key(|r| (r.start, r.end));
    let mut used = vec![false; rel.len()];
    let mut tp = 0;
    let mut fps = Vec::new();
    for d in det {
        match rel.iter().enumerate().find(|(i, r)| !used[*i] && overlaps(d, r)) {
            Some((i, _)) => {
                used[i] = true;
                tp += 1;
            }
            None => fps.push(d.clone()),
        }
    }
    let fns = rel.iter().zip(&used).filter(|(_, u)| !**u).map(|(r, _)| (*r).clone()).collect();
    (tp, fns, fps)
}

fn inventory_keys(report: &AnalysisReport) -> BTreeMap<Key, Vec<LineRange>> {
    let mut m: BTreeMap<Key, Vec<LineRange>> = BTreeMap::new();
    for row in &report.inventory {
        m.entry((row.file.clone(), row.owner.clone(), row.method.clone())).or_default().extend(row.command_lines.iter().cloned());
    }
    m
}

fn check_references(report: &AnalysisReport, truth: &GroundTruth) -> Result<BTreeMap<Key, Vec<LineRange>>, EvalError> {
    let inv = inventory_keys(report);
    for e in &truth.entries {
        if !inv.contains_key(&e.key()) {
            return Err(EvalError::TruthReference { file: e.file.clone(), owner: e.owner.clone(), method: e.method.clone() });
        }
    }
    Ok(inv)
}

/// Per-listener command matching. Listeners without an annotation count as
/// having no relevant commands.
pub fn match_commands(report: &AnalysisReport, truth: &GroundTruth) -> Result<Vec<ListenerOutcome>, EvalError> {
    let inv = check_references(report, truth)?;
    let by_key: BTreeMap<Key, &TruthEntry> = truth.entries.iter().map(|e| (e.key(), e)).collect();
    let flagged: BTreeSet<Key> = report.findings.iter().map(|f| (f.file.clone(), f.owner.clone(), f.method.clone())).collect();
    Ok(inv
        .into_iter()
        .map(|(key, detected)| {
            let entry = by_key.get(&key);
            let relevant: &[LineRange] = entry.map_or(&[], |e| &e.commands);
            let (tp, fns, fps) = match_spans(&detected, relevant);
            ListenerOutcome {
                flagged: flagged.contains(&key),
                annotated_blob: entry.is_some_and(|e| e.is_blob),
                file: key.0,
                owner: key.1,
                method: key.2,
                true_positives: tp,
                false_negatives: fns,
                false_positives: fps,
            }
        })
        .collect())
}

/// (TP, FN, FP) at listener granularity.
pub fn match_blobs(report: &AnalysisReport, truth: &GroundTruth) -> Result<(usize, usize, usize), EvalError> {
    let outcomes = match_commands(report, truth)?;
    let tp = outcomes.iter().filter(|o| o.flagged && o.annotated_blob).count();
    let fn_ = outcomes.iter().filter(|o| !o.flagged && o.annotated_blob).count();
    let fp = outcomes.iter().filter(|o| o.flagged && !o.annotated_blob).count();
    Ok((tp, fn_, fp))
}

pub fn evaluate(report: &AnalysisReport, truth: &GroundTruth) -> Result<EvalReport, EvalError> {
    let per_listener = match_commands(report, truth)?;
    let tp = per_listener.iter().map(|o| o.true_positives).sum();
    let fn_ = per_listener.iter().map(|o| o.false_negatives.len()).sum();
    let fp = per_listener.iter().map(|o| o.false_positives.len()).sum();
    let (btp, bfn, bfp) = match_blobs(report, truth)?;
    Ok(EvalReport { commands: compute_metrics(tp, fn_, fp), blobs: compute_metrics(btp, bfn, bfp), per_listener })
}

pub fn render_eval_text(r: &EvalReport) -> String {
    let mut out = format!("{:<10} {:>8} {:>4} {:>4} {:>9} {:>10}\n", "", "detected", "FN", "FP", "recall", "precision");
    for (name, m) in [("commands", &r.commands), ("blobs", &r.blobs)] {
        out.push_str(&format!(
            "{:<10} {:>8} {:>4} {:>4} {:>9} {:>10}\n",
            name,
            m.detected,
            m.false_negatives,
            m.false_positives,
            m.recall_text(),
            m.precision_text()
        ));
    }
    for o in &r.per_listener {
        if o.false_negatives.is_empty() && o.false_positives.is_empty() && o.flagged == o.annotated_blob {
            continue;
        }
        let ranges = |v: &[LineRange]| v.iter().map(|r| format!("{}-{}", r.start, r.end)).collect::<Vec<_>>().join(",");
        out.push_str(&format!("{} {}.{}:", o.file, o.owner, o.method));
        if !o.false_negatives.is_empty() {
            out.push_str(&format!(" missed {}", ranges(&o.false_negatives)));
        }
        if !o.false_positives.is_empty() {
            out.push_str(&format!(" spurious {}", ranges(&o.false_positives)));
        }
        if o.flagged != o.annotated_blob {
            out.push_str(if o.flagged { " flagged but annotated noblob" } else { " annotated blob but not flagged" });
        }
        out.push('\n');
    }
    out
}
