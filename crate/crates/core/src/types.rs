//! Index of every type declared in the analyzed sources, with name resolution
//! against the sources and the toolkit catalog. There is no classpath: a name
//! is either a source type, a catalog type, or unknown.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::catalog::{package_of, simple_name, ToolkitCatalog};
use crate::java::visit::{walk_unit, Visit};
use crate::java::{CompilationUnit, TypeDeclaration, TypeKind};

#[derive(Debug, Clone, Copy)]
pub struct TypeEntry<'a> {
    pub unit: usize,
    pub decl: &'a TypeDeclaration,
    /// Index of the lexically enclosing type.
    pub enclosing: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Resolved {
    /// Index into [`TypeIndex::entries`].
    Source(usize),
    /// Catalog type name as written in the catalog.
    Catalog(String),
    Unknown,
}

/// Result of walking a type's supertypes looking for listener interfaces.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ListenerMatch {
    /// Catalog listener interface names, in discovery order.
    pub interfaces: Vec<String>,
    /// Supertype names that resolved neither to a source nor a catalog type.
    pub unresolved: Vec<String>,
}

pub struct TypeIndex<'a> {
    pub units: &'a [CompilationUnit],
    entries: Vec<TypeEntry<'a>>,
    by_ptr: HashMap<*const TypeDeclaration, usize>,
    by_qualified: HashMap<&'a str, usize>,
    by_simple: HashMap<&'a str, Vec<usize>>,
}

struct Collector<'a> {
    unit: usize,
    stack: Vec<usize>,
    entries: Vec<TypeEntry<'a>>,
}

impl<'a> Visit<'a> for Collector<'a> {
    fn visit_type(&mut self, t: &'a TypeDeclaration) {
        self.entries.push(TypeEntry { unit: self.unit, decl: t, enclosing: self.stack.last().copied() });
        self.stack.push(self.entries.len() - 1);
    }

    fn leave_type(&mut self, _t: &'a TypeDeclaration) {
        self.stack.pop();
    }
}

impl<'a> TypeIndex<'a> {
    pub fn new(units: &'a [CompilationUnit]) -> Self {
        let mut c = Collector { unit: 0, stack: Vec::new(), entries: Vec::new() };
        for (i, u) in units.iter().enumerate() {
            c.unit = i;
            walk_unit(u, &mut c);
        }
        let entries = c.entries;
        let mut by_ptr = HashMap::new();
        let mut by_qualified = HashMap::new();
        let mut by_simple: HashMap<&str, Vec<usize>> = HashMap::new();
        for (i, e) in entries.iter().enumerate() {
            by_ptr.insert(e.decl as *const _, i);
            by_qualified.entry(e.decl.qualified_name.as_str()).or_insert(i);
            if e.decl.kind != TypeKind::Anonymous {
                by_simple.entry(e.decl.name.as_str()).or_default().push(i);
            }
        }
        TypeIndex { units, entries, by_ptr, by_qualified, by_simple }
    }

    pub fn entries(&self) -> &[TypeEntry<'a>] {
        &self.entries
    }

    pub fn entry(&self, idx: usize) -> &TypeEntry<'a> {
        &self.entries[idx]
    }

    /// Index of a declaration that belongs to the indexed units.
    pub fn index_of(&self, t: &TypeDeclaration) -> Option<usize> {
        self.by_ptr.get(&(t as *const _)).copied()
    }

    /// The type and its lexically enclosing types, innermost first.
    pub fn enclosing_chain(&self, idx: usize) -> Vec<usize> {
        let mut out = vec![idx];
        let mut cur = self.entries[idx].enclosing;
        while let Some(c) = cur {
            out.push(c);
            cur = self.entries[c].enclosing;
        }
        out
    }

    /// Resolves a type name as written in `unit`.
    pub fn resolve(&self, unit: usize, name: &str, catalog: &ToolkitCatalog) -> Resolved {
        let name = name.split(['<', '[']).next().unwrap_or(name).trim_end_matches("...");
        if name.is_empty() {
            return Resolved::Unknown;
        }
        let u = &self.units[unit];

        if name.contains('.') {
            if let Some(&i) = self.by_qualified.get(name) {
                return Resolved::Source(i);
            }
            let suffix = format!(".{name}");
            if let Some(e) =
                self.entries.iter().position(|e| e.decl.kind != TypeKind::Anonymous && e.decl.qualified_name.ends_with(&suffix))
            {
                return Resolved::Source(e);
            }
            return self.catalog_exact(name, catalog);
        }

        // Explicit single-type import.
        if let Some(imp) = u.imports.iter().find(|i| !i.wildcard && !i.is_static && simple_name(&i.name) == name) {
            if let Some(&i) = self.by_qualified.get(imp.name.as_str()) {
                return Resolved::Source(i);
            }
            return self.catalog_exact(&imp.name, catalog);
        }

        // Source types in the same unit or package.
        if let Some(cands) = self.by_simple.get(name) {
            if let Some(&i) = cands.iter().find(|&&i| self.entries[i].unit == unit) {
                return Resolved::Source(i);
            }
            if let Some(&i) = cands.iter().find(|&&i| self.units[self.entries[i].unit].package_name == u.package_name) {
                return Resolved::Source(i);
            }
        }

        // Catalog types: wildcard-imported package, else a unique simple name.
        let cands = catalog.names_with_simple(name);
        let imported: Vec<&String> =
            cands.iter().filter(|c| u.imports.iter().any(|i| i.wildcard && Some(i.name.as_str()) == package_of(c))).collect();
        if imported.len() == 1 {
            return Resolved::Catalog(imported[0].clone());
        }
        if cands.len() == 1 {
            return Resolved::Catalog(cands[0].clone());
        }

        // Source types from wildcard-imported packages.
        if let Some(cands) = self.by_simple.get(name) {
            for &i in cands {
                let pkg = self.units[self.entries[i].unit].package_name.as_deref();
                if u.imports.iter().any(|imp| imp.wildcard && Some(imp.name.as_str()) == pkg) {
                    return Resolved::Source(i);
                }
            }
        }
        Resolved::Unknown
    }

    fn catalog_exact(&self, name: &str, catalog: &ToolkitCatalog) -> Resolved {
        if catalog.contains_type(name) {
            return Resolved::Catalog(name.to_string());
        }
        // Simple-only catalog entries match any qualifier.
        let simple = simple_name(name);
        if catalog.names_with_simple(simple).iter().any(|n| n == simple) {
            return Resolved::Catalog(simple.to_string());
        }
        Resolved::Unknown
    }

    /// Catalog types reachable from a source type through extends/implements.
    fn catalog_supertypes(&self, idx: usize, catalog: &ToolkitCatalog) -> (Vec<String>, Vec<String>) {
        let mut found = Vec::new();
        let mut unresolved = Vec::new();
        let mut seen = HashSet::from([idx]);
        let mut queue = VecDeque::from([idx]);
        while let Some(i) = queue.pop_front() {
            let e = self.entries[i];
            for sup in e.decl.supertype_names() {
                match self.resolve(e.unit, sup, catalog) {
                    Resolved::Catalog(c) => {
                        if !found.contains(&c) {
                            found.push(c);
                        }
                    }
                    Resolved::Source(j) => {
                        if seen.insert(j) {
                            queue.push_back(j);
                        }
                    }
                    Resolved::Unknown => unresolved.push(sup.to_string()),
                }
            }
        }
        (found, unresolved)
    }

    /// Listener interfaces the type implements, directly or through
    /// source-declared supertypes.
    pub fn listener_interfaces(&self, idx: usize, catalog: &ToolkitCatalog) -> ListenerMatch {
        let (found, unresolved) = self.catalog_supertypes(idx, catalog);
        let mut interfaces: Vec<String> = Vec::new();
        for c in found {
            if let Some(l) = catalog.listener(&c) {
                if !interfaces.contains(&l.name) {
                    interfaces.push(l.name.clone());
                }
            }
        }
        ListenerMatch { interfaces, unresolved }
    }

    /// Whether a type name written in `unit` denotes a widget type (catalog or
    /// a source class extending one).
    pub fn is_widget(&self, unit: usize, name: &str, catalog: &ToolkitCatalog) -> bool {
        self.classify(unit, name, catalog, |c, n| c.is_widget_type(n))
    }

    /// Whether a type name written in `unit` denotes a widget or event type.
    pub fn is_gui(&self, unit: usize, name: &str, catalog: &ToolkitCatalog) -> bool {
        self.classify(unit, name, catalog, |c, n| c.is_widget_or_event_type(n))
    }

    fn classify(&self, unit: usize, name: &str, catalog: &ToolkitCatalog, pred: impl Fn(&ToolkitCatalog, &str) -> bool) -> bool {
        if name.is_empty() || name.ends_with("[]") || name.ends_with("...") {
            return false;
        }
        match self.resolve(unit, name, catalog) {
            Resolved::Catalog(c) => pred(catalog, &c),
            Resolved::Source(i) => self.catalog_supertypes(i, catalog).0.iter().any(|c| pred(catalog, c)),
            Resolved::Unknown => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::swing;
    use crate::java::parse_unit;
    use std::path::Path;

    fn units(srcs: &[(&str, &str)]) -> Vec<CompilationUnit> {
        srcs.iter().map(|(f, s)| parse_unit(Path::new(f), s)).collect()
    }

    #[test]
    fn direct_and_transitive_listeners() {
        let us = units(&[
            ("A.java", "class A implements ActionListener, CaretListener {}"),
            ("B.java", "class Base implements MouseListener {} class B extends Base {}"),
            ("C.java", "class C implements Runnable {}"),
        ]);
        let idx = TypeIndex::new(&us);
        let cat = swing();
        let find = |n: &str| idx.entries().iter().position(|e| e.decl.name == n).unwrap();
        assert_eq!(
            idx.listener_interfaces(find("A"), &cat).interfaces,
            vec!["java.awt.event.ActionListener", "javax.swing.event.CaretListener"]
        );
        assert_eq!(idx.listener_interfaces(find("B"), &cat).interfaces, vec!["java.awt.event.MouseListener"]);
        let c = idx.listener_interfaces(find("C"), &cat);
        assert!(c.interfaces.is_empty());
        assert_eq!(c.unresolved, vec!["Runnable"]);
    }

    #[test]
    fn source_types_shadow_catalog_names() {
        let us = units(&[("M.java", "class MenuListener implements ActionListener {} class X implements MenuListener {}")]);
        let idx = TypeIndex::new(&us);
        let x = idx.entries().iter().position(|e| e.decl.name == "X").unwrap();
        assert_eq!(idx.listener_interfaces(x, &swing()).interfaces, vec!["java.awt.event.ActionListener"]);
    }

    #[test]
    fn explicit_import_of_foreign_type_blocks_catalog() {
        let us = units(&[("L.java", "import com.acme.JButton; class L { JButton b; }")]);
        let idx = TypeIndex::new(&us);
        assert!(!idx.is_gui(0, "JButton", &swing()));
        let us = units(&[("L.java", "import javax.swing.JButton; class L { }")]);
        let idx = TypeIndex::new(&us);
        assert!(idx.is_gui(0, "JButton", &swing()));
    }

    #[test]
    fn source_widget_subclasses_are_widgets() {
        let us = units(&[("W.java", "class FancyButton extends JButton {} class Plain {}")]);
        let idx = TypeIndex::new(&us);
        let cat = swing();
        assert!(idx.is_widget(0, "FancyButton", &cat));
        assert!(!idx.is_widget(0, "Plain", &cat));
        assert!(!idx.is_widget(0, "JButton[]", &cat));
    }

    #[test]
    fn enclosing_chain_includes_anonymous_owners() {
        let us = units(&[("O.java", "class O { void f() { x(new ActionListener() { }); } }")]);
        let idx = TypeIndex::new(&us);
        assert_eq!(idx.entries().len(), 2);
        assert_eq!(idx.enclosing_chain(1), vec![1, 0]);
        assert_eq!(idx.entry(1).decl.qualified_name, "O$1");
    }
}
