//! Statement-level control-flow graphs and governing-condition chains.
//!
//! Every statement except blocks, `try` wrappers and labels becomes one node.
//! The chain of a statement lists the `if`/`switch` branches that dominate it:
//! each branch edge is split by a virtual node, dominators are computed over
//! the split graph, and the virtual nodes dominating a statement form its
//! chain. Loop conditions never govern.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::java::{MethodDeclaration, NodeId, Stmt, StmtKind};
use crate::span::Span;

pub const ENTRY: usize = 0;
pub const EXIT: usize = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Then,
    Else,
    Case(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeKind {
    Seq,
    True,
    False,
    Case(usize),
    Exception,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CfgNodeKind {
    Entry,
    Exit,
    Statement(NodeId),
}

#[derive(Debug, Clone)]
pub struct CfgNode {
    pub kind: CfgNodeKind,
    pub span: Option<Span>,
    pub label: &'static str,
    pub unreachable: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CfgEdge {
    pub from: usize,
    pub to: usize,
    pub kind: EdgeKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GoverningCondition {
    pub conditional: NodeId,
    pub branch: Branch,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoverningConditions {
    pub statement: NodeId,
    /// Outermost first.
    pub chain: Vec<GoverningCondition>,
}

#[derive(Debug, Clone)]
pub struct ControlFlowGraph<'a> {
    pub method: &'a MethodDeclaration,
    pub nodes: Vec<CfgNode>,
    pub edges: Vec<CfgEdge>,
    index: HashMap<NodeId, usize>,
    stmts: HashMap<NodeId, &'a Stmt>,
    chains: Vec<Vec<GoverningCondition>>,
}

struct JumpTarget {
    label: Option<String>,
    break_to: usize,
    continue_to: Option<usize>,
    /// Loops and switches accept an unlabeled `break`.
    breakable: bool,
}

struct Builder<'a> {
    nodes: Vec<CfgNode>,
    edges: Vec<CfgEdge>,
    index: HashMap<NodeId, usize>,
    stmts: HashMap<NodeId, &'a Stmt>,
    jumps: Vec<JumpTarget>,
    pending_label: Option<String>,
}

fn label_of(s: &Stmt) -> &'static str {
    match &s.kind {
        StmtKind::Block(_) => "block",
        StmtKind::If { .. } => "if",
        StmtKind::Switch { .. } => "switch",
        StmtKind::Loop { .. } => "loop",
        StmtKind::Return(_) => "return",
        StmtKind::Expression(_) => "expr",
        StmtKind::LocalVarDecl { .. } => "local",
        StmtKind::Try { .. } => "try",
        StmtKind::Break(_) => "break",
        StmtKind::Continue(_) => "continue",
        StmtKind::Throw(_) => "throw",
        StmtKind::Labeled { .. } => "labeled",
        StmtKind::LocalType(_) => "class",
        StmtKind::Opaque(_) => "opaque",
    }
}

impl<'a> Builder<'a> {
    fn add_node(&mut self, s: &'a Stmt) -> usize {
        let i = self.nodes.len();
        self.nodes.push(CfgNode { kind: CfgNodeKind::Statement(s.id), span: Some(s.span), label: label_of(s), unreachable: false });
        self.index.insert(s.id, i);
        self.stmts.insert(s.id, s);
        i
    }

    fn edge(&mut self, from: usize, to: usize, kind: EdgeKind) {
        self.edges.push(CfgEdge { from, to, kind });
    }

    fn build_seq(&mut self, stmts: impl DoubleEndedIterator<Item = &'a Stmt>, next: usize) -> usize {
        let mut nxt = next;
        for s in stmts.rev() {
            nxt = self.build(s, nxt);
        }
        nxt
    }

    /// Builds `s` so that normal completion flows to `next`; returns the node
    /// where control enters `s`.
    fn build(&mut self, s: &'a Stmt, next: usize) -> usize {
        let label = if matches!(s.kind, StmtKind::Loop { .. } | StmtKind::Switch { .. }) {
            self.pending_label.take()
        } else {
            self.pending_label = None;
            None
        };
        match &s.kind {
            StmtKind::Block(stmts) => self.build_seq(stmts.iter(), next),
            StmtKind::Labeled { label, body } => {
                if matches!(body.kind, StmtKind::Loop { .. } | StmtKind::Switch { .. }) {
                    self.pending_label = Some(label.clone());
                    self.build(body, next)
                } else {
                    self.jumps.push(JumpTarget { label: Some(label.clone()), break_to: next, continue_to: None, breakable: false });
                    let e = self.build(body, next);
                    self.jumps.pop();
                    e
                }
            }
            StmtKind::If { then_branch, else_branch, .. } => {
                let n = self.add_node(s);
                let t = self.build(then_branch, next);
                let e = match else_branch {
                    Some(e) => self.build(e, next),
                    None => next,
                };
                self.edge(n, t, EdgeKind::True);
                self.edge(n, e, EdgeKind::False);
                n
            }
            StmtKind::Switch { cases, .. } => {
                let n = self.add_node(s);
                self.jumps.push(JumpTarget { label, break_to: next, continue_to: None, breakable: true });
                let mut entries = vec![next; cases.len()];
                let mut nxt = next;
                for (i, c) in cases.iter().enumerate().rev() {
                    nxt = self.build_seq(c.body.iter(), nxt);
                    entries[i] = nxt;
                }
                self.jumps.pop();
                for (i, e) in entries.into_iter().enumerate() {
                    self.edge(n, e, EdgeKind::Case(i));
                }
                if !cases.iter().any(|c| c.is_default) {
                    self.edge(n, next, EdgeKind::False);
                }
                n
            }
            StmtKind::Loop { kind, condition, body } => {
                let n = self.add_node(s);
                self.jumps.push(JumpTarget { label, break_to: next, continue_to: Some(n), breakable: true });
                let b = self.build(body, n);
                self.jumps.pop();
                self.edge(n, b, EdgeKind::True);
                if condition.is_some() || matches!(kind, crate::java::LoopKind::ForEach) {
                    self.edge(n, next, EdgeKind::False);
                }
                if matches!(kind, crate::java::LoopKind::DoWhile) {
                    b
                } else {
                    n
                }
            }
            StmtKind::Try { resources, body, catches, finally } => {
                let f = match finally {
                    Some(f) => self.build(f, next),
                    None => next,
                };
                let handlers: Vec<usize> = catches.iter().map(|c| self.build(&c.body, f)).collect();
                let start = self.nodes.len();
                let entry = self.build_seq(resources.iter().chain(std::iter::once(&**body)), f);
                let end = self.nodes.len();
                for n in start..end {
                    for &h in &handlers {
                        self.edge(n, h, EdgeKind::Exception);
                    }
                }
                entry
            }
            StmtKind::Return(_) | StmtKind::Throw(_) => {
                let n = self.add_node(s);
                self.edge(n, EXIT, EdgeKind::Seq);
                n
            }
            StmtKind::Break(target) => {
                let n = self.add_node(s);
                let to = self
                    .jumps
                    .iter()
                    .rev()
                    .find(|j| match target {
                        Some(l) => j.label.as_deref() == Some(l),
                        None => j.breakable,
                    })
                    .map_or(EXIT, |j| j.break_to);
                self.edge(n, to, EdgeKind::Seq);
                n
            }
            StmtKind::Continue(target) => {
                let n = self.add_node(s);
                let to = self
                    .jumps
                    .iter()
                    .rev()
                    .filter(|j| j.continue_to.is_some())
                    .find(|j| target.as_ref().is_none_or(|l| j.label.as_deref() == Some(l)))
                    .and_then(|j| j.continue_to)
                    .unwrap_or(EXIT);
                self.edge(n, to, EdgeKind::Seq);
                n
            }
            StmtKind::Expression(_) | StmtKind::LocalVarDecl { .. } | StmtKind::LocalType(_) | StmtKind::Opaque(_) => {
                let n = self.add_node(s);
                self.edge(n, next, EdgeKind::Seq);
                n
            }
        }
    }
}

/// Builds the control-flow graph of a method body.
pub fn build_cfg(method: &MethodDeclaration) -> ControlFlowGraph<'_> {
    let mut b = Builder {
        nodes: vec![
            CfgNode { kind: CfgNodeKind::Entry, span: None, label: "entry", unreachable: false },
            CfgNode { kind: CfgNodeKind::Exit, span: None, label: "exit", unreachable: false },
        ],
        edges: Vec::new(),
        index: HashMap::new(),
        stmts: HashMap::new(),
        jumps: Vec::new(),
        pending_label: None,
    };
    let first = match &method.body {
        Some(body) => b.build(body, EXIT),
        None => EXIT,
    };
    b.edge(ENTRY, first, EdgeKind::Seq);

    let mut cfg = ControlFlowGraph { method, nodes: b.nodes, edges: b.edges, index: b.index, stmts: b.stmts, chains: Vec::new() };
    let reachable = cfg.reachable();
    for (i, n) in cfg.nodes.iter_mut().enumerate() {
        n.unreachable = i != ENTRY && !reachable[i];
    }
    cfg.chains = cfg.compute_chains();
    cfg
}

impl<'a> ControlFlowGraph<'a> {
    pub fn node_of(&self, id: NodeId) -> Option<usize> {
        self.index.get(&id).copied()
    }

    pub fn statement(&self, node: usize) -> Option<&'a Stmt> {
        match self.nodes.get(node)?.kind {
            CfgNodeKind::Statement(id) => self.stmts.get(&id).copied(),
            _ => None,
        }
    }

    /// Statement nodes in creation order.
    pub fn statement_nodes(&self) -> impl Iterator<Item = (usize, &'a Stmt)> + '_ {
        (0..self.nodes.len()).filter_map(|i| self.statement(i).map(|s| (i, s)))
    }

    pub fn successors(&self, node: usize) -> impl Iterator<Item = &CfgEdge> {
        self.edges.iter().filter(move |e| e.from == node)
    }

    pub fn predecessors(&self, node: usize) -> impl Iterator<Item = &CfgEdge> {
        self.edges.iter().filter(move |e| e.to == node)
    }

    /// Spans of statements no path from the entry reaches.
    pub fn unreachable_spans(&self) -> Vec<Span> {
        self.nodes.iter().filter(|n| n.unreachable).filter_map(|n| n.span).collect()
    }

    fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![ENTRY];
        seen[ENTRY] = true;
        while let Some(n) = stack.pop() {
            for e in self.successors(n) {
                if !seen[e.to] {
                    seen[e.to] = true;
                    stack.push(e.to);
                }
            }
        }
        seen
    }

    fn is_branching(&self, node: usize) -> Option<NodeId> {
        let s = self.statement(node)?;
        s.is_conditional().then_some(s.id)
    }

    fn compute_chains(&self) -> Vec<Vec<GoverningCondition>> {
        // Split graph: real nodes keep their indices, virtual edge nodes follow.
        let n_real = self.nodes.len();
        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n_real];
        let mut virtual_info: Vec<GoverningCondition> = Vec::new();
        for e in &self.edges {
            let branch = match e.kind {
                EdgeKind::True => Some(Branch::Then),
                EdgeKind::False => Some(Branch::Else),
                EdgeKind::Case(i) => Some(Branch::Case(i)),
                _ => None,
            };
            match (branch, self.is_branching(e.from)) {
                (Some(branch), Some(conditional)) => {
                    let v = n_real + virtual_info.len();
                    virtual_info.push(GoverningCondition { conditional, branch });
                    succ.push(vec![e.to]);
                    succ[e.from].push(v);
                }
                _ => succ[e.from].push(e.to),
            }
        }
        let idom = dominators(&succ, ENTRY);
        (0..n_real)
            .map(|n| {
                if idom[n].is_none() || n == ENTRY {
                    return Vec::new();
                }
                let mut chain = Vec::new();
                let mut cur = n;
                while cur != ENTRY {
                    let Some(d) = idom[cur] else { break };
                    if d >= n_real {
                        chain.push(virtual_info[d - n_real]);
                    }
                    cur = d;
                }
                chain.reverse();
                chain
            })
            .collect()
    }

    /// The `if`/`switch` branches that govern `stmt`, outermost first. `None`
    /// when `stmt` is not a node (blocks, `try` wrappers, labels).
    pub fn governing_conditions(&self, stmt: &Stmt) -> Option<GoverningConditions> {
        let n = self.node_of(stmt.id)?;
        Some(GoverningConditions { statement: stmt.id, chain: self.chains[n].clone() })
    }

    pub fn chain_of_node(&self, node: usize) -> &[GoverningCondition] {
        &self.chains[node]
    }

    /// Graphviz rendering.
    pub fn to_dot(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "digraph \"{}\" {{", self.method.name.replace('"', "\\\""));
        for (i, n) in self.nodes.iter().enumerate() {
            let text = match n.span {
                Some(sp) => format!("{} L{}", n.label, sp.start.line),
                None => n.label.to_string(),
            };
            let style = if n.unreachable { ", style=dashed" } else { "" };
            let _ = writeln!(out, "  n{i} [label=\"{text}\"{style}];");
        }
        for e in &self.edges {
            let label = match e.kind {
                EdgeKind::Seq => String::new(),
                EdgeKind::True => " [label=\"T\"]".into(),
                EdgeKind::False => " [label=\"F\"]".into(),
                EdgeKind::Case(i) => format!(" [label=\"case {i}\"]"),
                EdgeKind::Exception => " [label=\"exc\", style=dotted]".into(),
            };
            let _ = writeln!(out, "  n{} -> n{}{};", e.from, e.to, label);
        }
        out.push_str("}\n");
        out
    }
}

/// Immediate dominators (iterative algorithm over reverse post-order).
/// `None` for nodes unreachable from `entry`; `Some(entry)` for `entry`.
fn dominators(succ: &[Vec<usize>], entry: usize) -> Vec<Option<usize>> {
    let n = succ.len();
    // Iterative DFS post-order.
    let mut order = Vec::with_capacity(n);
    let mut visited = vec![false; n];
    let mut stack = vec![(entry, 0usize)];
    visited[entry] = true;
    while let Some((node, i)) = stack.pop() {
        if i < succ[node].len() {
            stack.push((node, i + 1));
            let s = succ[node][i];
            if !visited[s] {
                visited[s] = true;
                stack.push((s, 0));
            }
        } else {
            order.push(node);
        }
    }
    order.reverse();
    let mut rpo_num = vec![usize::MAX; n];
    for (i, &b) in order.iter().enumerate() {
        rpo_num[b] = i;
    }
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (u, ss) in succ.iter().enumerate() {
        if visited[u] {
            for &v in ss {
                preds[v].push(u);
            }
        }
    }
    let mut idom: Vec<Option<usize>> = vec![None; n];
    idom[entry] = Some(entry);
    let intersect = |idom: &[Option<usize>], mut a: usize, mut b: usize| {
        while a != b {
            while rpo_num[a] > rpo_num[b] {
                a = idom[a].unwrap_or(entry);
            }
            while rpo_num[b] > rpo_num[a] {
                b = idom[b].unwrap_or(entry);
            }
        }
        a
    };
    let mut changed = true;
    while changed {
        changed = false;
        for &b in order.iter().skip(1) {
            let mut new = None;
            for &p in &preds[b] {
                if idom[p].is_some() {
                    new = Some(match new {
                        None => p,
                        Some(cur) => intersect(&idom, p, cur),
                    });
                }
            }
            if new.is_some() && idom[b] != new {
                idom[b] = new;
                changed = true;
            }
        }
    }
    idom
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::java::parse_unit;
    use std::collections::BTreeSet;
    use std::path::Path;

    fn method(body: &str) -> crate::java::CompilationUnit {
        parse_unit(Path::new("T.java"), &format!("class T {{ void m() {{ {body} }} }}"))
    }

    fn with_cfg(body: &str, f: impl FnOnce(&ControlFlowGraph, &str)) {
        let unit = method(body);
        let m = &unit.types[0].methods[0];
        let cfg = build_cfg(m);
        let text = format!("class T {{ void m() {{ {body} }} }}");
        f(&cfg, &text);
    }

    fn node_by_text(cfg: &ControlFlowGraph, text: &str, needle: &str) -> usize {
        cfg.statement_nodes()
            .find(|(_, s)| s.span.slice(text).starts_with(needle))
            .map(|(i, _)| i)
            .unwrap_or_else(|| panic!("no node for {needle}"))
    }

    fn edge_set(cfg: &ControlFlowGraph) -> BTreeSet<(usize, usize, String)> {
        cfg.edges.iter().map(|e| (e.from, e.to, format!("{:?}", e.kind))).collect()
    }

    #[test]
    fn straight_line() {
        with_cfg("a(); b();", |cfg, text| {
            assert_eq!(cfg.nodes.len(), 4);
            let a = node_by_text(cfg, text, "a()");
            let b = node_by_text(cfg, text, "b()");
            let expected: BTreeSet<_> =
                [(ENTRY, a, "Seq"), (a, b, "Seq"), (b, EXIT, "Seq")].into_iter().map(|(x, y, k)| (x, y, k.to_string())).collect();
            assert_eq!(edge_set(cfg), expected);
        });
    }

    #[test]
    fn early_return_guard() {
        with_cfg("if (c) return; x();", |cfg, text| {
            let i = node_by_text(cfg, text, "if");
            let r = node_by_text(cfg, text, "return");
            let x = node_by_text(cfg, text, "x()");
            let expected: BTreeSet<_> = [(ENTRY, i, "Seq"), (i, r, "True"), (i, x, "False"), (r, EXIT, "Seq"), (x, EXIT, "Seq")]
                .into_iter()
                .map(|(a, b, k)| (a, b, k.to_string()))
                .collect();
            assert_eq!(edge_set(cfg), expected);
            let if_id = cfg.statement(i).unwrap().id;
            assert_eq!(cfg.chain_of_node(x), &[GoverningCondition { conditional: if_id, branch: Branch::Else }]);
            assert!(cfg.chain_of_node(i).is_empty());
        });
    }

    #[test]
    fn implicit_else_goes_to_join() {
        with_cfg("if (a) { if (b) { y(); } } z();", |cfg, text| {
            let outer = node_by_text(cfg, text, "if (a)");
            let inner = node_by_text(cfg, text, "if (b)");
            let z = node_by_text(cfg, text, "z()");
            let y = node_by_text(cfg, text, "y()");
            assert!(cfg.edges.contains(&CfgEdge { from: outer, to: inner, kind: EdgeKind::True }));
            assert!(cfg.edges.contains(&CfgEdge { from: outer, to: z, kind: EdgeKind::False }));
            let chain: Vec<_> = cfg.chain_of_node(y).iter().map(|g| g.branch).collect();
            assert_eq!(chain, vec![Branch::Then, Branch::Then]);
            assert!(cfg.chain_of_node(z).is_empty());
        });
    }

    #[test]
    fn loops_have_back_edges_and_do_not_govern() {
        with_cfg("while (k) { if (a) { b(); } } c();", |cfg, text| {
            let w = node_by_text(cfg, text, "while");
            let i = node_by_text(cfg, text, "if");
            let b = node_by_text(cfg, text, "b()");
            assert!(cfg.edges.contains(&CfgEdge { from: i, to: w, kind: EdgeKind::False }));
            assert!(cfg.edges.contains(&CfgEdge { from: b, to: w, kind: EdgeKind::Seq }));
            assert_eq!(cfg.chain_of_node(b).len(), 1);
        });
    }

    #[test]
    fn switch_without_default_has_false_edge() {
        with_cfg("switch (k) { case 1: a(); break; case 2: b(); } c();", |cfg, text| {
            let s = node_by_text(cfg, text, "switch");
            let c = node_by_text(cfg, text, "c()");
            let a = node_by_text(cfg, text, "a()");
            assert!(cfg.edges.contains(&CfgEdge { from: s, to: c, kind: EdgeKind::False }));
            assert!(cfg.edges.contains(&CfgEdge { from: s, to: a, kind: EdgeKind::Case(0) }));
            assert_eq!(cfg.chain_of_node(a)[0].branch, Branch::Case(0));
        });
    }

    #[test]
    fn try_catch_has_exception_edges() {
        with_cfg("try { a(); b(); } catch (Exception e) { h(); } z();", |cfg, text| {
            let a = node_by_text(cfg, text, "a()");
            let b = node_by_text(cfg, text, "b()");
            let h = node_by_text(cfg, text, "h()");
            assert!(cfg.edges.contains(&CfgEdge { from: a, to: h, kind: EdgeKind::Exception }));
            assert!(cfg.edges.contains(&CfgEdge { from: b, to: h, kind: EdgeKind::Exception }));
        });
    }

    #[test]
    fn unreachable_code_is_marked() {
        with_cfg("return; a();", |cfg, text| {
            let a = node_by_text(cfg, text, "a()");
            assert!(cfg.nodes[a].unreachable);
            assert!(cfg.chain_of_node(a).is_empty());
            assert_eq!(cfg.unreachable_spans().len(), 1);
        });
    }

    #[test]
    fn labeled_break_and_continue() {
        with_cfg("outer: for (;;) { for (;;) { if (a) break outer; continue outer; } } z();", |cfg, text| {
            let brk = node_by_text(cfg, text, "break");
            let z = node_by_text(cfg, text, "z()");
            let cont = node_by_text(cfg, text, "continue");
            let outer = node_by_text(cfg, text, "for (;;) { for");
            assert!(cfg.edges.contains(&CfgEdge { from: brk, to: z, kind: EdgeKind::Seq }));
            assert!(cfg.edges.contains(&CfgEdge { from: cont, to: outer, kind: EdgeKind::Seq }));
            assert!(!cfg.nodes[z].unreachable);
        });
    }

    #[test]
    fn every_node_has_successor_and_predecessor() {
        with_cfg("int i = 0; do { i++; if (i > 2) continue; } while (i < 5); switch (i) { default: }", |cfg, _| {
            for i in 0..cfg.nodes.len() {
                if i != EXIT {
                    assert!(cfg.successors(i).next().is_some(), "node {i} has no successor");
                }
                if i != ENTRY && !cfg.nodes[i].unreachable {
                    assert!(cfg.predecessors(i).next().is_some());
                }
            }
        });
    }

    #[test]
    fn dot_dump_mentions_all_nodes() {
        with_cfg("if (a) b();", |cfg, _| {
            let dot = cfg.to_dot();
            assert!(dot.starts_with("digraph \"m\""));
            assert_eq!(dot.matches("[label=").count(), cfg.nodes.len() + 2);
        });
    }
}
