//! Threshold rule and smell-variant classification.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::catalog::ToolkitCatalog;
use crate::cfg::build_cfg;
use crate::commands::{
    get_potential_commands, get_proper_commands, AnalysisContext, CommandCandidate, EvidenceKind, GuiCommand, DEFAULT_MAX_TRACE_DEPTH,
};
use crate::listeners::{find_conditional_listeners, find_listener_methods, ListenerMethod};
use crate::span::Span;
use crate::types::TypeIndex;

pub const DEFAULT_THRESHOLD: usize = 3;

pub const STATE_BASED_NOTE: &str = "state-based: every command is selected through widget state accessors";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("threshold must be at least 1")]
    ZeroThreshold,
    #[error("max trace depth must be at least 1")]
    ZeroTraceDepth,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DetectionConfig {
    pub threshold: usize,
    pub max_trace_depth: usize,
    pub toolkit: String,
}

impl Default for DetectionConfig {
    fn default() -> Self {
        DetectionConfig { threshold: DEFAULT_THRESHOLD, max_trace_depth: DEFAULT_MAX_TRACE_DEPTH, toolkit: "swing".into() }
    }
}

impl DetectionConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.threshold == 0 {
            return Err(ConfigError::ZeroThreshold);
        }
        if self.max_trace_depth == 0 {
            return Err(ConfigError::ZeroTraceDepth);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    PropertyComparison,
    TypeCheck,
    ReferenceComparison,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::PropertyComparison => "property-comparison",
            Variant::TypeCheck => "type-check",
            Variant::ReferenceComparison => "reference-comparison",
        }
    }

    fn implied_by(kind: EvidenceKind) -> Option<Variant> {
        match kind {
            EvidenceKind::PropertyAccess => Some(Variant::PropertyComparison),
            EvidenceKind::InstanceofWidget => Some(Variant::TypeCheck),
            EvidenceKind::WidgetFieldComparison => Some(Variant::ReferenceComparison),
            _ => None,
        }
    }
}

/// Everything the pipeline learned about one listener method.
#[derive(Debug, Clone)]
pub struct ListenerAnalysis<'a> {
    pub listener: ListenerMethod<'a>,
    pub conditional: bool,
    pub candidates: Vec<CommandCandidate<'a>>,
    pub commands: Vec<GuiCommand<'a>>,
    pub unreachable: Vec<Span>,
}

impl ListenerAnalysis<'_> {
    pub fn command_count(&self) -> usize {
        self.commands.len()
    }
}

#[derive(Debug, Clone)]
pub struct BlobFinding<'a> {
    pub listener: ListenerMethod<'a>,
    pub command_count: usize,
    pub commands: Vec<GuiCommand<'a>>,
    pub variants: BTreeSet<Variant>,
    pub notes: Vec<String>,
}

/// Runs listener discovery and command analysis over every indexed unit.
pub fn analyze_listeners<'a>(index: &TypeIndex<'a>, catalog: &'a ToolkitCatalog, config: &DetectionConfig) -> Vec<ListenerAnalysis<'a>> {
    let methods = find_listener_methods(index, catalog);
    let conditional = find_conditional_listeners(&methods);
    let mut cond_iter = conditional.iter().peekable();
    methods
        .iter()
        .map(|m| {
            let cl = cond_iter.next_if(|c| std::ptr::eq(c.listener.method, m.method));
            match cl {
                Some(cl) => {
                    let cfg = build_cfg(m.method);
                    let ctx = AnalysisContext::new(index, catalog, *m, config.max_trace_depth);
                    let candidates = get_potential_commands(cl, &cfg, &ctx);
                    let commands = get_proper_commands(&candidates);
                    ListenerAnalysis { listener: *m, conditional: true, candidates, commands, unreachable: cfg.unreachable_spans() }
                }
                None => ListenerAnalysis {
                    listener: *m,
                    conditional: false,
                    candidates: Vec::new(),
                    commands: Vec::new(),
                    unreachable: Vec::new(),
                },
            }
        })
        .collect()
}

/// Variant tags implied by the commands' own and enclosing evidence.
pub fn classify_variants(commands: &[GuiCommand<'_>]) -> BTreeSet<Variant> {
    commands.iter().flat_map(|c| c.all_evidence()).filter_map(|e| Variant::implied_by(e.terminal)).collect()
}

/// Whether every piece of evidence behind the commands goes through a state
/// accessor (selection, adjustment, enabled state...).
pub fn is_state_based(commands: &[GuiCommand<'_>], catalog: &ToolkitCatalog) -> bool {
    let mut any = false;
    for e in commands.iter().flat_map(|c| c.all_evidence()) {
        any = true;
        match &e.accessor {
            Some(a) if catalog.is_state_accessor(a) => {}
            _ => return false,
        }
    }
    any
}

/// One finding per listener with at least `threshold` commands, ordered by
/// file then line.
pub fn detect_blobs<'a>(analyses: &[ListenerAnalysis<'a>], catalog: &ToolkitCatalog, config: &DetectionConfig) -> Vec<BlobFinding<'a>> {
    let mut out: Vec<BlobFinding<'a>> = analyses
        .iter()
        .filter(|a| a.command_count() >= config.threshold)
        .map(|a| {
            let mut notes = Vec::new();
            if is_state_based(&a.commands, catalog) {
                notes.push(STATE_BASED_NOTE.to_string());
            }
            BlobFinding {
                listener: a.listener,
                command_count: a.command_count(),
                commands: a.commands.clone(),
                variants: classify_variants(&a.commands),
                notes,
            }
        })
        .collect();
    out.sort_by(|a, b| {
        (&a.listener.unit.file, a.listener.span.start.line, a.listener.span.start.offset).cmp(&(
            &b.listener.unit.file,
            b.listener.span.start.line,
            b.listener.span.start.offset,
        ))
    });
    out
}

pub const BUCKETS: [&str; 5] = ["0", "1", "2", "3", "4+"];

pub fn bucket_of(count: usize) -> &'static str {
    BUCKETS[count.min(4)]
}

/// Listener counts per command-count bucket; every bucket is present.
pub fn command_distribution(analyses: &[ListenerAnalysis<'_>]) -> BTreeMap<&'static str, usize> {
    let mut m: BTreeMap<&'static str, usize> = BUCKETS.iter().map(|b| (*b, 0)).collect();
    for a in analyses {
        *m.get_mut(bucket_of(a.command_count())).expect("bucket exists") += 1;
    }
    m
}
