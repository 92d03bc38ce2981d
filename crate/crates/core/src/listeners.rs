//! Finds GUI listener methods and keeps the conditional ones.

use crate::catalog::{simple_name, ToolkitCatalog};
use crate::java::{CompilationUnit, MethodDeclaration, Stmt, TypeDeclaration};
use crate::span::Span;
use crate::types::TypeIndex;

#[derive(Debug, Clone, Copy)]
pub struct ListenerMethod<'a> {
    pub unit: &'a CompilationUnit,
    /// Index of the owner in the [`TypeIndex`] the listener was found with.
    pub owner_index: usize,
    pub owner: &'a TypeDeclaration,
    /// Matched catalog interface, as written in the catalog.
    pub interface: &'a str,
    pub method: &'a MethodDeclaration,
    pub span: Span,
}

impl<'a> ListenerMethod<'a> {
    /// Owner name without its package, e.g. `Outer.Inner` or `Outer$1`.
    pub fn owner_display(&self) -> &'a str {
        match &self.unit.package_name {
            Some(p) => {
                self.owner.qualified_name.strip_prefix(p.as_str()).and_then(|s| s.strip_prefix('.')).unwrap_or(&self.owner.qualified_name)
            }
            None => &self.owner.qualified_name,
        }
    }

    pub fn interface_simple(&self) -> &'a str {
        simple_name(self.interface)
    }

    /// Physical lines spanned by the method.
    pub fn loc(&self) -> u32 {
        self.span.line_count()
    }
}

#[derive(Debug, Clone)]
pub struct ConditionalListener<'a> {
    pub listener: ListenerMethod<'a>,
    /// Every `if`/`switch` statement of the body, in document order.
    pub conditional_statements: Vec<&'a Stmt>,
}

/// Every listener method in `units`, ordered by file path then offset.
pub fn find_listener_methods<'a>(index: &TypeIndex<'a>, catalog: &'a ToolkitCatalog) -> Vec<ListenerMethod<'a>> {
    let mut out = Vec::new();
    for (i, entry) in index.entries().iter().enumerate() {
        let matched = index.listener_interfaces(i, catalog);
        if matched.interfaces.is_empty() {
            continue;
        }
        for m in &entry.decl.methods {
            let [param] = m.parameters.as_slice() else { continue };
            let param_type = simple_name(&param.declared_type);
            let iface = matched.interfaces.iter().find_map(|name| {
                let l = catalog.listener(name)?;
                l.handlers
                    .iter()
                    .any(|h| h.method_name == m.name && simple_name(&h.event_param_type) == param_type)
                    .then_some(l.name.as_str())
            });
            if let Some(interface) = iface {
                out.push(ListenerMethod {
                    unit: &index.units[entry.unit],
                    owner_index: i,
                    owner: entry.decl,
                    interface,
                    method: m,
                    span: m.span,
                });
            }
        }
    }
    out.sort_by(|a, b| a.unit.file.cmp(&b.unit.file).then(a.span.start.offset.cmp(&b.span.start.offset)));
    out
}

/// Listeners whose body holds at least one `if` or `switch`. Bodiless
/// methods are skipped.
pub fn find_conditional_listeners<'a>(methods: &[ListenerMethod<'a>]) -> Vec<ConditionalListener<'a>> {
    methods
        .iter()
        .filter_map(|l| {
            let conds: Vec<&Stmt> = l.method.statements().into_iter().filter(|s| s.is_conditional()).collect();
            (!conds.is_empty()).then_some(ConditionalListener { listener: *l, conditional_statements: conds })
        })
        .collect()
}
