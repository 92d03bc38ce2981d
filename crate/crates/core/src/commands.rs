//! GUI command extraction: finds the conditional branches of a listener whose
//! guards reference a GUI object, then prunes nested candidates down to the
//! proper commands.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::catalog::ToolkitCatalog;
use crate::cfg::{Branch, ControlFlowGraph};
use crate::java::{walk_expr, Expr, ExprKind, NodeId, Stmt, StmtKind};
use crate::listeners::{ConditionalListener, ListenerMethod};
use crate::span::Span;
use crate::types::TypeIndex;

pub const DEFAULT_MAX_TRACE_DEPTH: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvidenceKind {
    EventSourceAccess,
    PropertyAccess,
    WidgetTypedName,
    InstanceofWidget,
    WidgetFieldComparison,
    DerivedVariable,
}

impl EvidenceKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EvidenceKind::EventSourceAccess => "event-source-access",
            EvidenceKind::PropertyAccess => "property-access",
            EvidenceKind::WidgetTypedName => "widget-typed-name",
            EvidenceKind::InstanceofWidget => "instanceof-widget",
            EvidenceKind::WidgetFieldComparison => "widget-field-comparison",
            EvidenceKind::DerivedVariable => "derived-variable",
        }
    }
}

/// One hop of a name resolution: the name and the span of the definition
/// (declaration initializer or assignment) it was resolved through.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct TraceHop {
    pub name: String,
    pub definition: Span,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GuiReferenceEvidence {
    pub kind: EvidenceKind,
    /// The kind the trace ends at; equals `kind` unless `kind` is derived.
    pub terminal: EvidenceKind,
    #[serde(skip)]
    pub expression: NodeId,
    pub span: Span,
    /// Accessor method named by the terminal evidence, if any.
    pub accessor: Option<String>,
    pub resolution_trace: Vec<TraceHop>,
}

/// A guard: the conditional statement and which of its branches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Guard {
    pub conditional: NodeId,
    pub branch: Branch,
}

#[derive(Debug, Clone)]
pub struct CommandCandidate<'a> {
    pub listener: ListenerMethod<'a>,
    pub guard: Guard,
    /// Span of the guard's condition (or switch case labels).
    pub guard_span: Span,
    pub body_span: Span,
    pub statements: Vec<&'a Stmt>,
    pub evidence: Vec<GuiReferenceEvidence>,
    /// Evidence of the conditions that govern the guard itself.
    pub enclosing_evidence: Vec<GuiReferenceEvidence>,
    /// A trailing `else`/`default` admitted because its siblings carry evidence.
    pub trailing: bool,
    /// Index of the smallest candidate strictly containing this one.
    pub nested_in: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct GuiCommand<'a> {
    pub listener: ListenerMethod<'a>,
    pub guard: Guard,
    pub guard_span: Span,
    pub body_span: Span,
    pub statements: Vec<&'a Stmt>,
    pub evidence: Vec<GuiReferenceEvidence>,
    pub enclosing_evidence: Vec<GuiReferenceEvidence>,
    pub trailing: bool,
    /// 1-based position within the listener, document order.
    pub ordinal: usize,
}

impl GuiCommand<'_> {
    /// Own evidence followed by enclosing evidence.
    pub fn all_evidence(&self) -> impl Iterator<Item = &GuiReferenceEvidence> {
        self.evidence.iter().chain(&self.enclosing_evidence)
    }
}

/// Analysis scope for one listener method.
pub struct AnalysisContext<'i, 'a> {
    index: &'i TypeIndex<'a>,
    catalog: &'i ToolkitCatalog,
    listener: ListenerMethod<'a>,
    unit: usize,
    max_trace_depth: usize,
    locals: Vec<LocalDef<'a>>,
    assignments: Vec<Assignment<'a>>,
}

struct LocalDef<'a> {
    name: &'a str,
    declared_type: &'a str,
    offset: usize,
    initializer: Option<&'a Expr>,
    span: Span,
}

struct Assignment<'a> {
    name: &'a str,
    /// Whether the target was written `this.name`.
    this_qualified: bool,
    value: &'a Expr,
    span: Span,
}

enum NameDef<'a> {
    Local(&'a LocalDef<'a>),
    Field { declared_type: &'a str, initializer: Option<&'a Expr>, span: Span },
}

type Found = Vec<GuiReferenceEvidence>;

impl<'i, 'a> AnalysisContext<'i, 'a> {
    pub fn new(index: &'i TypeIndex<'a>, catalog: &'i ToolkitCatalog, listener: ListenerMethod<'a>, max_trace_depth: usize) -> Self {
        let unit = index.entry(listener.owner_index).unit;
        let m = listener.method;
        let mut locals: Vec<LocalDef<'a>> = m
            .parameters
            .iter()
            .map(|p| LocalDef {
                name: &p.name,
                declared_type: &p.declared_type,
                offset: m.span.start.offset,
                initializer: None,
                span: m.span,
            })
            .collect();
        let mut assignments = Vec::new();
        for s in m.statements() {
            if let StmtKind::LocalVarDecl { name, declared_type, initializer } = &s.kind {
                locals.push(LocalDef { name, declared_type, offset: s.span.start.offset, initializer: initializer.as_ref(), span: s.span });
            }
            if let StmtKind::Try { catches, .. } = &s.kind {
                for c in catches {
                    let p = &c.parameter;
                    locals.push(LocalDef {
                        name: &p.name,
                        declared_type: &p.declared_type,
                        offset: c.span.start.offset,
                        initializer: None,
                        span: c.span,
                    });
                }
            }
            for e in s.expressions() {
                walk_expr(e, &mut |x| match &x.kind {
                    ExprKind::Assignment { target, value, .. } => {
                        if let Some(name) = target.simple_name() {
                            let this_qualified = !matches!(target.kind, ExprKind::Identifier(_));
                            assignments.push(Assignment { name, this_qualified, value, span: x.span });
                        }
                    }
                    ExprKind::InstanceOf { type_name, binding: Some(b), .. } => {
                        locals.push(LocalDef {
                            name: b,
                            declared_type: type_name,
                            offset: x.span.start.offset,
                            initializer: None,
                            span: x.span,
                        });
                    }
                    _ => {}
                });
            }
        }
        AnalysisContext { index, catalog, listener, unit, max_trace_depth, locals, assignments }
    }

    fn is_gui_type(&self, name: &str) -> bool {
        self.index.is_gui(self.unit, name, self.catalog)
    }

    fn is_widget_type(&self, name: &str) -> bool {
        self.index.is_widget(self.unit, name, self.catalog)
    }

    /// Nearest visible definition of `name` at `offset`: a preceding local or
    /// parameter, else a field of the owner or an enclosing type.
    fn lookup(&self, name: &str, offset: usize, this_qualified: bool) -> Option<NameDef<'_>> {
        if !this_qualified {
            if let Some(l) = self.locals.iter().filter(|l| l.name == name && l.offset <= offset).max_by_key(|l| l.offset) {
                return Some(NameDef::Local(l));
            }
        }
        for t in self.index.enclosing_chain(self.listener.owner_index) {
            if let Some(f) = self.index.entry(t).decl.field(name) {
                return Some(NameDef::Field { declared_type: &f.declared_type, initializer: f.initializer.as_ref(), span: f.span });
            }
        }
        None
    }

    fn is_widget_field(&self, e: &Expr) -> bool {
        let Some(name) = e.simple_name() else { return false };
        let this_q = !matches!(e.kind, ExprKind::Identifier(_));
        matches!(self.lookup(name, e.span.start.offset, this_q), Some(NameDef::Field { declared_type, .. }) if self.is_widget_type(declared_type))
    }

    /// Definitions a name use may take its value from, with the span to
    /// record in the trace.
    fn definitions(&self, name: &str, use_offset: usize, def: &NameDef<'a>) -> Vec<(&'a Expr, Span)> {
        match def {
            NameDef::Local(l) => {
                // Flow-sensitive: nearest preceding definition only.
                let assigned = self
                    .assignments
                    .iter()
                    .filter(|a| !a.this_qualified && a.name == name && a.span.start.offset > l.offset && a.span.end.offset <= use_offset)
                    .max_by_key(|a| a.span.start.offset);
                match (assigned, l.initializer) {
                    (Some(a), _) => vec![(a.value, a.span)],
                    (None, Some(init)) => vec![(init, l.span)],
                    (None, None) => vec![],
                }
            }
            NameDef::Field { initializer, span, .. } => {
                // Flow-insensitive over the method, plus the field initializer.
                let shadowing_local =
                    |a: &Assignment| !a.this_qualified && self.locals.iter().any(|l| l.name == name && l.offset <= a.span.start.offset);
                let mut out: Vec<(&Expr, Span)> = initializer.iter().map(|i| (*i, *span)).collect();
                out.extend(self.assignments.iter().filter(|a| a.name == name && !shadowing_local(a)).map(|a| (a.value, a.span)));
                out
            }
        }
    }

    /// Every piece of GUI evidence in `expr`.
    pub fn collect_evidence(&self, expr: &'a Expr) -> Vec<GuiReferenceEvidence> {
        let mut path = Vec::new();
        let mut out = self.collect(expr, &mut path);
        dedup(&mut out);
        out
    }

    /// The first piece of GUI evidence in `expr`, if any.
    pub fn references_gui_object(&self, expr: &'a Expr) -> Option<GuiReferenceEvidence> {
        self.collect_evidence(expr).into_iter().next()
    }

    fn direct(&self, kind: EvidenceKind, e: &Expr, accessor: Option<&str>, trace: Vec<TraceHop>) -> GuiReferenceEvidence {
        GuiReferenceEvidence {
            kind,
            terminal: kind,
            expression: e.id,
            span: e.span,
            accessor: accessor.map(str::to_string),
            resolution_trace: trace,
        }
    }

    fn collect(&self, e: &'a Expr, path: &mut Vec<TraceHop>) -> Found {
        match &e.kind {
            ExprKind::MethodCall { receiver: Some(r), name, args } => {
                let mut out = Vec::new();
                let accessor_kind = if self.catalog.is_source_accessor(name) {
                    Some(EvidenceKind::EventSourceAccess)
                } else if self.catalog.is_property_accessor(name) || self.catalog.is_state_accessor(name) {
                    Some(EvidenceKind::PropertyAccess)
                } else {
                    None
                };
                if let Some((kind, trace)) = accessor_kind.zip(self.gui_receiver(r, path)) {
                    out.push(self.direct(kind, e, Some(name), trace));
                } else if name == "equals" && args.len() == 1 {
                    return self.comparison(r, &args[0], path);
                } else {
                    out.extend(self.collect(r, path));
                }
                for a in args {
                    out.extend(self.collect(a, path));
                }
                out
            }
            ExprKind::Binary { op, lhs, rhs } if op == "==" || op == "!=" => self.comparison(lhs, rhs, path),
            ExprKind::InstanceOf { operand, type_name, .. } => {
                if self.is_widget_type(type_name) {
                    vec![self.direct(EvidenceKind::InstanceofWidget, e, None, Vec::new())]
                } else {
                    self.collect(operand, path)
                }
            }
            ExprKind::Identifier(_) => self.name_evidence(e, path),
            ExprKind::FieldAccess { receiver, .. } => {
                if e.simple_name().is_some() {
                    self.name_evidence(e, path)
                } else {
                    self.collect(receiver, path)
                }
            }
            ExprKind::Cast { .. } => e.children().into_iter().flat_map(|c| self.collect(c, path)).collect(),
            _ => e.children().into_iter().flat_map(|c| self.collect(c, path)).collect(),
        }
    }

    /// `a == b`, `a != b`, `a.equals(b)`.
    fn comparison(&self, lhs: &'a Expr, rhs: &'a Expr, path: &mut Vec<TraceHop>) -> Found {
        let mut out = Vec::new();
        let (l_field, r_field) = (self.is_widget_field(lhs), self.is_widget_field(rhs));
        if l_field || r_field {
            let (field, other) = if r_field { (rhs, lhs) } else { (lhs, rhs) };
            out.push(self.direct(EvidenceKind::WidgetFieldComparison, field, None, Vec::new()));
            if !(l_field && r_field) {
                out.extend(self.collect(other, path));
            }
            return out;
        }
        let left = self.collect(lhs, path);
        let right = self.collect(rhs, path);
        // The event source compared against some non-literal reference is a
        // widget reference comparison even when the reference's declaration
        // is not visible.
        let is_source = |f: &Found| f.iter().any(|x| x.terminal == EvidenceKind::EventSourceAccess);
        let is_reference = |x: &Expr| matches!(x.kind, ExprKind::Identifier(_) | ExprKind::FieldAccess { .. });
        if is_source(&left) && right.is_empty() && is_reference(rhs) {
            out.push(self.direct(EvidenceKind::WidgetFieldComparison, rhs, None, Vec::new()));
        } else if is_source(&right) && left.is_empty() && is_reference(lhs) {
            out.push(self.direct(EvidenceKind::WidgetFieldComparison, lhs, None, Vec::new()));
        }
        out.extend(left);
        out.extend(right);
        out
    }

    /// Evidence for a name use: GUI-typed declaration, or derived through its
    /// definitions.
    fn name_evidence(&self, e: &'a Expr, path: &mut Vec<TraceHop>) -> Found {
        let Some(name) = e.simple_name() else { return Vec::new() };
        let this_q = !matches!(e.kind, ExprKind::Identifier(_));
        let Some(def) = self.lookup(name, e.span.start.offset, this_q) else { return Vec::new() };
        let declared = match &def {
            NameDef::Local(l) => l.declared_type,
            NameDef::Field { declared_type, .. } => declared_type,
        };
        if self.is_gui_type(declared) {
            return vec![self.direct(EvidenceKind::WidgetTypedName, e, None, Vec::new())];
        }
        let mut out = Vec::new();
        for (value, span) in self.definitions(name, e.span.start.offset, &def) {
            let hop = TraceHop { name: name.to_string(), definition: span };
            if path.len() >= self.max_trace_depth || path.contains(&hop) {
                continue;
            }
            path.push(hop.clone());
            let found = self.collect(value, path);
            path.pop();
            for f in found {
                let mut trace = vec![hop.clone()];
                trace.extend(f.resolution_trace);
                out.push(GuiReferenceEvidence {
                    kind: EvidenceKind::DerivedVariable,
                    terminal: f.terminal,
                    expression: e.id,
                    span: e.span,
                    accessor: f.accessor,
                    resolution_trace: trace,
                });
            }
        }
        out
    }

    /// When `r` denotes a widget or event object, the trace that shows it.
    fn gui_receiver(&self, r: &'a Expr, path: &mut Vec<TraceHop>) -> Option<Vec<TraceHop>> {
        match &r.kind {
            ExprKind::Cast { type_name, operand } => {
                if self.is_gui_type(type_name) {
                    Some(Vec::new())
                } else {
                    self.gui_receiver(operand, path)
                }
            }
            ExprKind::MethodCall { receiver: Some(inner), name, .. } if self.catalog.is_source_accessor(name) => {
                self.gui_receiver(inner, path)
            }
            ExprKind::Identifier(_) | ExprKind::FieldAccess { .. } => {
                let name = r.simple_name()?;
                let this_q = !matches!(r.kind, ExprKind::Identifier(_));
                let def = self.lookup(name, r.span.start.offset, this_q)?;
                let declared = match &def {
                    NameDef::Local(l) => l.declared_type,
                    NameDef::Field { declared_type, .. } => declared_type,
                };
                if self.is_gui_type(declared) {
                    return Some(Vec::new());
                }
                for (value, span) in self.definitions(name, r.span.start.offset, &def) {
                    let hop = TraceHop { name: name.to_string(), definition: span };
                    if path.len() >= self.max_trace_depth || path.contains(&hop) {
                        continue;
                    }
                    path.push(hop.clone());
                    let found = self.gui_receiver(value, path);
                    path.pop();
                    if let Some(t) = found {
                        let mut trace = vec![hop];
                        trace.extend(t);
                        return Some(trace);
                    }
                }
                None
            }
            _ => None,
        }
    }

    fn guard_evidence(&self, s: &'a Stmt) -> Found {
        match &s.kind {
            StmtKind::If { condition, .. } => self.collect_evidence(condition),
            StmtKind::Switch { selector, .. } => self.collect_evidence(selector),
            _ => Vec::new(),
        }
    }
}

fn dedup(v: &mut Vec<GuiReferenceEvidence>) {
    let mut seen = BTreeSet::new();
    v.retain(|e| seen.insert((e.span.start.offset, e.span.end.offset, e.kind, e.terminal, e.resolution_trace.len())));
}

/// `if` statements that continue an else-if chain: the whole `else` branch,
/// or the only statement of an `else` block.
fn chain_continuations(stmts: &[&Stmt]) -> BTreeSet<NodeId> {
    let mut out = BTreeSet::new();
    for s in stmts {
        if let StmtKind::If { else_branch: Some(e), .. } = &s.kind {
            if let Some(next) = else_if(e) {
                out.insert(next.id);
            }
        }
    }
    out
}

fn else_if(e: &Stmt) -> Option<&Stmt> {
    match &e.kind {
        StmtKind::If { .. } => Some(e),
        StmtKind::Block(b) if b.len() == 1 && matches!(b[0].kind, StmtKind::If { .. }) => Some(&b[0]),
        _ => None,
    }
}

/// Candidate commands of a conditional listener, in document order.
pub fn get_potential_commands<'a>(
    listener: &ConditionalListener<'a>,
    cfg: &ControlFlowGraph<'a>,
    ctx: &AnalysisContext<'_, 'a>,
) -> Vec<CommandCandidate<'a>> {
    let l = listener.listener;
    let all: Vec<&'a Stmt> = l.method.statements();
    let continuations = chain_continuations(&all);
    let mut out: Vec<CommandCandidate<'a>> = Vec::new();

    let enclosing = |s: &'a Stmt| -> Found {
        let mut found = Vec::new();
        if let Some(g) = cfg.governing_conditions(s) {
            for c in g.chain {
                let Some(cond) = cfg.node_of(c.conditional).and_then(|n| cfg.statement(n)) else { continue };
                found.extend(ctx.guard_evidence(cond));
            }
        }
        dedup(&mut found);
        found
    };
    let body_statements =
        |body: Span| -> Vec<&'a Stmt> { cfg.statement_nodes().filter(|(_, s)| body.contains(&s.span)).map(|(_, s)| s).collect() };

    for &s in &all {
        match &s.kind {
            StmtKind::If { .. } if !continuations.contains(&s.id) => {
                let mut link = s;
                let mut links: Vec<(&'a Stmt, Found)> = Vec::new();
                let mut trailing: Option<&'a Stmt> = None;
                loop {
                    let StmtKind::If { condition, then_branch, else_branch } = &link.kind else { unreachable!() };
                    links.push((link, ctx.collect_evidence(condition)));
                    let _ = then_branch;
                    match else_branch.as_deref() {
                        Some(e) => match else_if(e) {
                            Some(next) => link = next,
                            None => {
                                trailing = Some(e);
                                break;
                            }
                        },
                        None => break,
                    }
                }
                let all_have = links.iter().all(|(_, ev)| !ev.is_empty());
                let head_enclosing = enclosing(s);
                for (stmt, ev) in &links {
                    if ev.is_empty() {
                        continue;
                    }
                    let StmtKind::If { condition, then_branch, .. } = &stmt.kind else { unreachable!() };
                    out.push(CommandCandidate {
                        listener: l,
                        guard: Guard { conditional: stmt.id, branch: Branch::Then },
                        guard_span: condition.span,
                        body_span: then_branch.span,
                        statements: body_statements(then_branch.span),
                        evidence: ev.clone(),
                        enclosing_evidence: enclosing(stmt),
                        trailing: false,
                        nested_in: None,
                    });
                }
                if let (Some(e), true) = (trailing, all_have) {
                    let (last, _) = links.last().expect("chain has a head");
                    let mut ev: Found = links.iter().flat_map(|(_, ev)| ev.iter().cloned()).collect();
                    dedup(&mut ev);
                    out.push(CommandCandidate {
                        listener: l,
                        guard: Guard { conditional: last.id, branch: Branch::Else },
                        guard_span: e.span,
                        body_span: e.span,
                        statements: body_statements(e.span),
                        evidence: ev,
                        enclosing_evidence: head_enclosing.clone(),
                        trailing: true,
                        nested_in: None,
                    });
                }
            }
            StmtKind::Switch { selector, cases } => {
                let ev = ctx.collect_evidence(selector);
                if ev.is_empty() {
                    continue;
                }
                let enc = enclosing(s);
                for (i, c) in cases.iter().enumerate() {
                    let guard_span = c.labels.iter().map(|x| x.span).reduce(Span::to).unwrap_or(c.span);
                    out.push(CommandCandidate {
                        listener: l,
                        guard: Guard { conditional: s.id, branch: Branch::Case(i) },
                        guard_span,
                        body_span: c.span,
                        statements: body_statements(c.span),
                        evidence: ev.clone(),
                        enclosing_evidence: enc.clone(),
                        trailing: c.is_default,
                        nested_in: None,
                    });
                }
            }
            _ => {}
        }
    }

    out.sort_by(|a, b| {
        a.body_span
            .start
            .offset
            .cmp(&b.body_span.start.offset)
            .then(b.body_span.end.offset.cmp(&a.body_span.end.offset))
            .then(a.guard.cmp(&b.guard))
    });
    link_nesting(&mut out);
    out
}

/// Sets `nested_in` to the smallest candidate strictly containing each one.
pub fn link_nesting(cands: &mut [CommandCandidate<'_>]) {
    let spans: Vec<Span> = cands.iter().map(|c| c.body_span).collect();
    for (i, c) in cands.iter_mut().enumerate() {
        c.nested_in = spans
            .iter()
            .enumerate()
            .filter(|&(j, s)| j != i && s.strictly_contains(&spans[i]))
            .min_by_key(|(_, s)| s.end.offset - s.start.offset)
            .map(|(j, _)| j);
    }
}

/// Indices of candidates surviving one pass of the nesting rules: a
/// candidate with exactly one directly nested candidate drops that one; a
/// candidate with several drops itself.
pub fn prune_indices(nested_in: &[Option<usize>]) -> Vec<usize> {
    let mut removed = vec![false; nested_in.len()];
    for parent in 0..nested_in.len() {
        let children: Vec<usize> = (0..nested_in.len()).filter(|&c| nested_in[c] == Some(parent)).collect();
        match children.len() {
            0 => {}
            1 => removed[children[0]] = true,
            _ => removed[parent] = true,
        }
    }
    (0..nested_in.len()).filter(|&i| !removed[i]).collect()
}

/// Applies the nesting rules and numbers the survivors.
pub fn get_proper_commands<'a>(candidates: &[CommandCandidate<'a>]) -> Vec<GuiCommand<'a>> {
    let nested: Vec<Option<usize>> = candidates.iter().map(|c| c.nested_in).collect();
    prune_indices(&nested)
        .into_iter()
        .enumerate()
        .map(|(k, i)| {
            let c = &candidates[i];
            GuiCommand {
                listener: c.listener,
                guard: c.guard,
                guard_span: c.guard_span,
                body_span: c.body_span,
                statements: c.statements.clone(),
                evidence: c.evidence.clone(),
                enclosing_evidence: c.enclosing_evidence.clone(),
                trailing: c.trailing,
                ordinal: k + 1,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::swing;
    use crate::cfg::build_cfg;
    use crate::java::parse_unit_with;
    use crate::listeners::{find_conditional_listeners, find_listener_methods};
    use std::path::Path;

    struct Outcome {
        candidates: Vec<(u32, Option<usize>, Vec<EvidenceKind>)>,
        commands: Vec<u32>,
    }

    fn analyze(src: &str) -> Vec<Outcome> {
        let cat = swing();
        let units = vec![parse_unit_with(Path::new("T.java"), src, &cat.parse_options())];
        let idx = TypeIndex::new(&units);
        let methods = find_listener_methods(&idx, &cat);
        find_conditional_listeners(&methods)
            .iter()
            .map(|cl| {
                let cfg = build_cfg(cl.listener.method);
                let ctx = AnalysisContext::new(&idx, &cat, cl.listener, DEFAULT_MAX_TRACE_DEPTH);
                let cands = get_potential_commands(cl, &cfg, &ctx);
                let cmds = get_proper_commands(&cands);
                Outcome {
                    candidates: cands
                        .iter()
                        .map(|c| (c.body_span.start.line, c.nested_in, c.evidence.iter().map(|e| e.terminal).collect()))
                        .collect(),
                    commands: cmds.iter().map(|c| c.body_span.start.line).collect(),
                }
            })
            .collect()
    }

    #[test]
    fn plain_boolean_guard_has_no_candidate() {
        let out =
            analyze("class A implements ActionListener { boolean on; public void actionPerformed(ActionEvent e) { if (on) { x(); } } }");
        assert_eq!(out.len(), 1);
        assert!(out[0].candidates.is_empty());
    }

    #[test]
    fn plain_int_local_is_not_gui() {
        let out = analyze(
            "class A implements ActionListener { public void actionPerformed(ActionEvent e) { int count = 4; if (count > 3) { x(); } } }",
        );
        assert!(out[0].candidates.is_empty());
    }

    #[test]
    fn derived_action_command() {
        let src = "class A implements ActionListener {
            public void actionPerformed(ActionEvent e) {
                String actionCmd = ((AbstractButton) e.getSource()).getActionCommand();
                if (\"copy\".equals(actionCmd)) { copy(); }
            }
        }";
        let out = analyze(src);
        assert_eq!(out[0].candidates.len(), 1);
        assert_eq!(out[0].candidates[0].2, vec![EvidenceKind::PropertyAccess]);
    }

    #[test]
    fn trailing_else_needs_evidence_on_all_siblings() {
        let src = "class A implements ActionListener {
            boolean flag;
            public void actionPerformed(ActionEvent e) {
                if (e.getSource() instanceof JButton) { a(); }
                else if (flag) { b(); }
                else { c(); }
            }
        }";
        let out = analyze(src);
        assert_eq!(out[0].candidates.len(), 1);
    }

    #[test]
    fn else_block_with_single_if_continues_chain() {
        let src = "class A implements ActionListener {
            public void actionPerformed(ActionEvent e) {
                String c = e.getActionCommand();
                if (c.equals(\"a\")) { a(); }
                else { if (c.equals(\"b\")) { b(); } }
            }
        }";
        let out = analyze(src);
        assert_eq!(out[0].candidates.len(), 2);
        assert!(out[0].candidates.iter().all(|c| c.1.is_none()), "continuation must not nest");
        assert_eq!(out[0].commands.len(), 2);
    }

    #[test]
    fn switch_on_action_command() {
        let src = "class A implements ActionListener {
            public void actionPerformed(ActionEvent e) {
                switch (e.getActionCommand()) {
                    case \"a\": a(); break;
                    case \"b\": b(); break;
                    default: c();
                }
            }
        }";
        let out = analyze(src);
        assert_eq!(out[0].commands.len(), 3);
    }

    #[test]
    fn early_return_guard_is_enclosing_evidence() {
        let src = "class A implements ActionListener {
            public void actionPerformed(ActionEvent e) {
                if (!(e.getSource() instanceof JButton)) return;
                int n = 0;
                if (n > 1) { a(); }
            }
        }";
        let cat = swing();
        let units = vec![parse_unit_with(Path::new("T.java"), src, &cat.parse_options())];
        let idx = TypeIndex::new(&units);
        let methods = find_listener_methods(&idx, &cat);
        let cl = &find_conditional_listeners(&methods)[0];
        let cfg = build_cfg(cl.listener.method);
        let ctx = AnalysisContext::new(&idx, &cat, cl.listener, DEFAULT_MAX_TRACE_DEPTH);
        let cands = get_potential_commands(cl, &cfg, &ctx);
        // Only the guard itself is a candidate; the second if has no evidence.
        assert_eq!(cands.len(), 1);
        assert_eq!(cands[0].guard.branch, Branch::Then);
    }

    #[test]
    fn cyclic_assignments_terminate() {
        let src = "class A implements ActionListener {
            Object a; Object b;
            public void actionPerformed(ActionEvent e) {
                a = b; b = a;
                if (a == null) { x(); }
            }
        }";
        let out = analyze(src);
        assert!(out[0].candidates.is_empty());
    }

    #[test]
    fn trace_depth_is_bounded() {
        let mut body = String::from("Object v0 = e.getSource();");
        for i in 1..12 {
            body.push_str(&format!(" Object v{i} = v{};", i - 1));
        }
        let src = format!("class A implements ActionListener {{ JButton ok; public void actionPerformed(ActionEvent e) {{ {body} if (v11.getName() == null) {{ }} if (v3.getName() == null) {{ }} }} }}");
        let cat = swing();
        let units = vec![parse_unit_with(Path::new("T.java"), &src, &cat.parse_options())];
        let idx = TypeIndex::new(&units);
        let methods = find_listener_methods(&idx, &cat);
        let cl = &find_conditional_listeners(&methods)[0];
        let ctx = AnalysisContext::new(&idx, &cat, cl.listener, 8);
        let ifs: Vec<_> = cl.conditional_statements.clone();
        let cond = |s: &Stmt| match &s.kind {
            StmtKind::If { condition, .. } => ctx.collect_evidence(condition),
            _ => unreachable!(),
        };
        let deep = cond(ifs[0]);
        let shallow = cond(ifs[1]);
        assert!(deep.is_empty(), "12 hops exceed the bound");
        assert_eq!(shallow.len(), 1);
        assert!(shallow[0].resolution_trace.len() <= 8);
    }

    #[test]
    fn prune_rules() {
        // {0 ⊃ {1}} -> {0}
        assert_eq!(prune_indices(&[None, Some(0)]), vec![0]);
        // {0 ⊃ {1,2,3}} -> {1,2,3}
        assert_eq!(prune_indices(&[None, Some(0), Some(0), Some(0)]), vec![1, 2, 3]);
        // disjoint
        assert_eq!(prune_indices(&[None, None]), vec![0, 1]);
        // chain A ⊃ B ⊃ C -> {A}
        assert_eq!(prune_indices(&[None, Some(0), Some(1)]), vec![0]);
    }
}
