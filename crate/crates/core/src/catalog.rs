//! Declarative GUI toolkit model: listener interfaces and their handlers,
//! widget and event types, and the accessor methods that reveal which widget
//! produced an event.
//!
//! Catalog entries may be written qualified (`javax.swing.JButton`) or simple
//! (`JButton`). A simple query matches an entry when the entry's last segment
//! is equal and unique across the catalog; a qualified query matches the
//! exact entry, or a simple-only entry with the same last segment.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use thiserror::Error;

use crate::java::{LambdaListener, ParseOptions};

const BUNDLED_SWING: &str = include_str!("../catalogs/swing.catalog");

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CatalogError {
    #[error("catalog syntax error at line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("catalog violates invariant `{invariant}`: {detail}")]
    Consistency { invariant: &'static str, detail: String },
    #[error("cannot read catalog {path}: {message}")]
    Io { path: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HandlerSignature {
    pub method_name: String,
    pub event_param_type: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ListenerInterface {
    /// Name as written in the catalog.
    pub name: String,
    pub handlers: Vec<HandlerSignature>,
}

impl ListenerInterface {
    pub fn simple_name(&self) -> &str {
        simple_name(&self.name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToolkitCatalog {
    pub name: String,
    listeners: Vec<ListenerInterface>,
    /// Widget type → declared supertype.
    widgets: BTreeMap<String, Option<String>>,
    events: BTreeSet<String>,
    source_accessors: BTreeSet<String>,
    property_accessors: BTreeSet<String>,
    state_accessors: BTreeSet<String>,
    registration: BTreeMap<String, String>,
    /// Simple name → every distinct catalog type name with that last segment.
    by_simple: HashMap<String, Vec<String>>,
}

/// Last segment of a dotted name, without generics or array suffixes.
pub fn simple_name(name: &str) -> &str {
    let base = name.split(['<', '[']).next().unwrap_or(name);
    base.rsplit('.').next().unwrap_or(base)
}

/// Package part of a dotted name, if any.
pub fn package_of(name: &str) -> Option<&str> {
    name.rfind('.').map(|i| &name[..i])
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_' || c == '$')
        && chars.all(|c| c.is_alphanumeric() || c == '_' || c == '$')
}

fn is_dotted_name(s: &str) -> bool {
    !s.is_empty() && s.split('.').all(is_identifier)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    Toolkit,
    Listeners,
    Widgets,
    Events,
    SourceAccessors,
    PropertyAccessors,
    StateAccessors,
    Registration,
}

impl Section {
    fn parse(s: &str) -> Option<Section> {
        Some(match s {
            "toolkit" => Section::Toolkit,
            "listeners" => Section::Listeners,
            "widgets" => Section::Widgets,
            "events" => Section::Events,
            "source_accessors" => Section::SourceAccessors,
            "property_accessors" => Section::PropertyAccessors,
            "state_accessors" => Section::StateAccessors,
            "registration" => Section::Registration,
            _ => return None,
        })
    }
}

/// Parses and validates a catalog document.
pub fn load_catalog(document: &str) -> Result<ToolkitCatalog, CatalogError> {
    let mut name = String::from("custom");
    let mut listeners: Vec<ListenerInterface> = Vec::new();
    let mut widgets = BTreeMap::new();
    let mut events = BTreeSet::new();
    let mut source_accessors = BTreeSet::new();
    let mut property_accessors = BTreeSet::new();
    let mut state_accessors = BTreeSet::new();
    let mut registration = BTreeMap::new();

    let mut section = None;
    let mut entries = 0usize;

    for (idx, raw) in document.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| CatalogError::Syntax { line: line_no, message };
        if let Some(rest) = line.strip_prefix('[') {
            let header = rest.strip_suffix(']').ok_or_else(|| err("unterminated section header".into()))?;
            section = Some(Section::parse(header.trim()).ok_or_else(|| err(format!("unknown section `{header}`")))?);
            continue;
        }
        let Some(sec) = section else {
            return Err(err("entry outside of any section".into()));
        };
        entries += 1;
        match sec {
            Section::Toolkit => {
                let (key, value) = line.split_once('=').ok_or_else(|| err("expected `key = value`".into()))?;
                match key.trim() {
                    "name" if is_identifier(value.trim()) => name = value.trim().to_string(),
                    "name" => return Err(err(format!("invalid toolkit name `{}`", value.trim()))),
                    other => return Err(err(format!("unknown toolkit key `{other}`"))),
                }
            }
            Section::Listeners => {
                let (head, rest) = line.split_once('(').ok_or_else(|| err("expected `Interface.method(Event)`".into()))?;
                let event = rest.strip_suffix(')').ok_or_else(|| err("missing `)`".into()))?.trim();
                let (iface, method) = head.trim().rsplit_once('.').ok_or_else(|| err("expected `Interface.method(Event)`".into()))?;
                if !is_dotted_name(iface) || !is_identifier(method) || !is_dotted_name(event) {
                    return Err(err(format!("malformed listener entry `{line}`")));
                }
                let handler = HandlerSignature { method_name: method.to_string(), event_param_type: event.to_string() };
                match listeners.iter_mut().find(|l| l.name == iface) {
                    Some(l) => {
                        if !l.handlers.contains(&handler) {
                            l.handlers.push(handler);
                        }
                    }
                    None => listeners.push(ListenerInterface { name: iface.to_string(), handlers: vec![handler] }),
                }
            }
            Section::Widgets => {
                let (ty, sup) = match line.split_once('<') {
                    Some((t, s)) => (t.trim(), Some(s.trim())),
                    None => (line, None),
                };
                if !is_dotted_name(ty) || sup.is_some_and(|s| !is_dotted_name(s)) {
                    return Err(err(format!("malformed widget entry `{line}`")));
                }
                widgets.insert(ty.to_string(), sup.map(str::to_string));
            }
            Section::Events | Section::SourceAccessors | Section::PropertyAccessors | Section::StateAccessors => {
                let ok = if sec == Section::Events { is_dotted_name(line) } else { is_identifier(line) };
                if !ok {
                    return Err(err(format!("malformed entry `{line}`")));
                }
                let set = match sec {
                    Section::Events => &mut events,
                    Section::SourceAccessors => &mut source_accessors,
                    Section::PropertyAccessors => &mut property_accessors,
                    _ => &mut state_accessors,
                };
                set.insert(line.to_string());
            }
            Section::Registration => {
                let (method, iface) = line.split_once("->").ok_or_else(|| err("expected `method -> Interface`".into()))?;
                let (method, iface) = (method.trim(), iface.trim());
                if !is_identifier(method) || !is_dotted_name(iface) {
                    return Err(err(format!("malformed registration entry `{line}`")));
                }
                registration.insert(method.to_string(), iface.to_string());
            }
        }
    }

    if entries == 0 {
        return Err(CatalogError::Syntax { line: 0, message: "catalog has no entries".into() });
    }

    let mut catalog = ToolkitCatalog {
        name,
        listeners,
        widgets,
        events,
        source_accessors,
        property_accessors,
        state_accessors,
        registration,
        by_simple: HashMap::new(),
    };
    catalog.index_names();
    catalog.validate()?;
    Ok(catalog)
}

/// Loads the catalog named by `selector`: a bundled toolkit name or a file path.
pub fn load_toolkit(selector: &str) -> Result<ToolkitCatalog, CatalogError> {
    if let Some(c) = bundled(selector) {
        return c;
    }
    let path = Path::new(selector);
    let text = std::fs::read_to_string(path).map_err(|e| CatalogError::Io { path: selector.to_string(), message: e.to_string() })?;
    load_catalog(&text)
}

/// Bundled catalogs by name.
pub fn bundled(name: &str) -> Option<Result<ToolkitCatalog, CatalogError>> {
    match name {
        "swing" => Some(load_catalog(BUNDLED_SWING)),
        _ => None,
    }
}

/// The bundled Swing catalog.
pub fn swing() -> ToolkitCatalog {
    load_catalog(BUNDLED_SWING).expect("bundled Swing catalog is valid")
}

impl ToolkitCatalog {
    fn index_names(&mut self) {
        let mut all: BTreeSet<&str> = BTreeSet::new();
        all.extend(self.listeners.iter().map(|l| l.name.as_str()));
        for (w, s) in &self.widgets {
            all.insert(w);
            if let Some(s) = s {
                all.insert(s);
            }
        }
        all.extend(self.events.iter().map(String::as_str));
        let mut by_simple: HashMap<String, Vec<String>> = HashMap::new();
        for n in all {
            by_simple.entry(simple_name(n).to_string()).or_default().push(n.to_string());
        }
        self.by_simple = by_simple;
    }

    fn validate(&self) -> Result<(), CatalogError> {
        for l in &self.listeners {
            for h in &l.handlers {
                if self.find_in(self.events.iter().map(String::as_str), &h.event_param_type).is_none() {
                    return Err(CatalogError::Consistency {
                        invariant: "handler-event-declared",
                        detail: format!("{}.{} takes undeclared event type {}", l.name, h.method_name, h.event_param_type),
                    });
                }
            }
        }
        for start in self.widgets.keys() {
            let mut seen = BTreeSet::new();
            let mut cur = Some(start.as_str());
            while let Some(c) = cur {
                if !seen.insert(c) {
                    return Err(CatalogError::Consistency { invariant: "acyclic", detail: format!("widget supertype cycle through {c}") });
                }
                cur = self.widgets.get(c).and_then(|s| s.as_deref());
            }
        }
        if let Some(m) = self.source_accessors.intersection(&self.property_accessors).next() {
            return Err(CatalogError::Consistency {
                invariant: "accessors-disjoint",
                detail: format!("{m} is both a source accessor and a property accessor"),
            });
        }
        for (m, iface) in &self.registration {
            if self.listener(iface).is_none() {
                return Err(CatalogError::Consistency {
                    invariant: "registration-target",
                    detail: format!("{m} registers unknown listener interface {iface}"),
                });
            }
        }
        Ok(())
    }

    /// Matches `query` against `entries` with the catalog's name rules.
    fn find_in<'a>(&self, entries: impl Iterator<Item = &'a str> + Clone, query: &str) -> Option<&'a str> {
        if query.contains('.') {
            let simple = simple_name(query);
            return entries.clone().find(|e| *e == query).or_else(|| entries.clone().find(|e| *e == simple));
        }
        if self.by_simple.get(query).map_or(0, Vec::len) > 1 {
            return None;
        }
        entries.clone().find(|e| simple_name(e) == query)
    }

    /// Every catalog type name (listener, widget or event) whose last segment is `simple`.
    pub fn names_with_simple(&self, simple: &str) -> &[String] {
        self.by_simple.get(simple).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Whether `name` (qualified) is a type known to the catalog.
    pub fn contains_type(&self, name: &str) -> bool {
        self.by_simple.get(simple_name(name)).is_some_and(|v| v.iter().any(|n| n == name))
    }

    pub fn listeners(&self) -> &[ListenerInterface] {
        &self.listeners
    }

    pub fn listener(&self, name: &str) -> Option<&ListenerInterface> {
        let found = self.find_in(self.listeners.iter().map(|l| l.name.as_str()), name)?;
        self.listeners.iter().find(|l| l.name == found)
    }

    fn widget_entry(&self, name: &str) -> Option<&str> {
        let supers = self.widgets.values().filter_map(|s| s.as_deref());
        let all = self.widgets.keys().map(String::as_str).chain(supers);
        self.find_in(all, name)
    }

    /// True for widget types and for the declared supertypes of widgets.
    pub fn is_widget_type(&self, name: &str) -> bool {
        self.widget_entry(name).is_some()
    }

    pub fn is_event_type(&self, name: &str) -> bool {
        self.find_in(self.events.iter().map(String::as_str), name).is_some()
    }

    pub fn is_widget_or_event_type(&self, name: &str) -> bool {
        self.is_widget_type(name) || self.is_event_type(name)
    }

    /// The widget and its declared supertypes, nearest first.
    pub fn widget_ancestors(&self, name: &str) -> Vec<&str> {
        let mut out = Vec::new();
        let mut cur = self.widget_entry(name);
        while let Some(c) = cur {
            if out.contains(&c) {
                break;
            }
            out.push(c);
            cur = self.widgets.get(c).and_then(|s| s.as_deref());
        }
        out
    }

    pub fn widget_types(&self) -> impl Iterator<Item = &str> {
        self.widgets.keys().map(String::as_str)
    }

    pub fn event_types(&self) -> impl Iterator<Item = &str> {
        self.events.iter().map(String::as_str)
    }

    pub fn is_source_accessor(&self, method: &str) -> bool {
        self.source_accessors.contains(method)
    }

    pub fn is_property_accessor(&self, method: &str) -> bool {
        self.property_accessors.contains(method)
    }

    pub fn is_state_accessor(&self, method: &str) -> bool {
        self.state_accessors.contains(method)
    }

    /// Listener interface registered by `method`, e.g. `addActionListener`.
    pub fn registration(&self, method: &str) -> Option<&str> {
        self.registration.get(method).map(String::as_str)
    }

    /// Adds a property accessor. Used to explore evidence monotonicity.
    pub fn with_property_accessor(mut self, method: &str) -> Result<Self, CatalogError> {
        self.property_accessors.insert(method.to_string());
        self.validate()?;
        Ok(self)
    }

    /// Parser options that turn lambdas passed to registration methods into
    /// listener types. Only interfaces with a single handler qualify.
    pub fn parse_options(&self) -> ParseOptions {
        let mut lambda_listeners = HashMap::new();
        for (method, iface) in &self.registration {
            let Some(l) = self.listener(iface) else { continue };
            if let [h] = l.handlers.as_slice() {
                lambda_listeners.insert(
                    method.clone(),
                    LambdaListener { interface: l.name.clone(), method: h.method_name.clone(), event_type: h.event_param_type.clone() },
                );
            }
        }
        ParseOptions { lambda_listeners }
    }
}
