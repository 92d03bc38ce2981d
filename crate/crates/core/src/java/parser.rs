//! Error-tolerant recursive-descent parser for the supported Java subset.
//!
//! Parsing never aborts. A statement or member that cannot be parsed is
//! skipped up to the next synchronization point (`;` or the closing `}` at
//! the same nesting depth) and replaced by an opaque node plus a diagnostic.

use std::collections::HashMap;
use std::path::Path;

use super::ast::*;
use super::lexer::{tokenize, Token, TokenKind};
use crate::span::{LineIndex, Position, Span};

/// Maximum combined nesting of statements, expressions and type bodies.
const MAX_DEPTH: usize = 48;

/// A registration method whose lambda argument should be treated as a
/// listener implementation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LambdaListener {
    pub interface: String,
    pub method: String,
    pub event_type: String,
}

#[derive(Debug, Clone, Default)]
pub struct ParseOptions {
    /// Keyed by registration method name, e.g. `addActionListener`.
    pub lambda_listeners: HashMap<String, LambdaListener>,
}

const KEYWORDS: &[&str] = &[
    "abstract",
    "assert",
    "boolean",
    "break",
    "byte",
    "case",
    "catch",
    "char",
    "class",
    "const",
    "continue",
    "default",
    "do",
    "double",
    "else",
    "enum",
    "extends",
    "final",
    "finally",
    "float",
    "for",
    "goto",
    "if",
    "implements",
    "import",
    "instanceof",
    "int",
    "interface",
    "long",
    "native",
    "new",
    "package",
    "private",
    "protected",
    "public",
    "return",
    "short",
    "static",
    "strictfp",
    "super",
    "switch",
    "synchronized",
    "this",
    "throw",
    "throws",
    "transient",
    "try",
    "void",
    "volatile",
    "while",
    "true",
    "false",
    "null",
];

const PRIMITIVES: &[&str] = &["byte", "short", "char", "int", "long", "float", "double", "boolean", "void"];

const MODIFIERS: &[&str] = &[
    "public",
    "protected",
    "private",
    "static",
    "abstract",
    "final",
    "native",
    "synchronized",
    "transient",
    "volatile",
    "strictfp",
    "sealed",
];

const ASSIGN_OPS: &[&str] = &["=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>=", ">>>="];

pub fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

fn binary_precedence(op: &str) -> Option<u8> {
    Some(match op {
        "||" => 1,
        "&&" => 2,
        "|" => 3,
        "^" => 4,
        "&" => 5,
        "==" | "!=" => 6,
        "<" | ">" | "<=" | ">=" | "instanceof" => 7,
        "<<" | ">>" | ">>>" => 8,
        "+" | "-" => 9,
        "*" | "/" | "%" => 10,
        _ => return None,
    })
}

/// Marker for a failed production. The diagnostic is recorded before it is
/// returned.
#[derive(Debug)]
struct Fail;

type PResult<T> = Result<T, Fail>;

struct Scope {
    display: String,
    anonymous: u32,
    lambdas: u32,
}

pub(crate) struct Parser<'s> {
    text: &'s str,
    tokens: Vec<Token>,
    pos: usize,
    lines: LineIndex,
    next_id: u32,
    diagnostics: Vec<Diagnostic>,
    opaque_regions: usize,
    depth: usize,
    package: Option<String>,
    scopes: Vec<Scope>,
    options: &'s ParseOptions,
    /// Lambdas are not allowed while parsing `case` labels (`->` is the arrow).
    no_lambda: bool,
}

impl<'s> Parser<'s> {
    pub(crate) fn new(text: &'s str, options: &'s ParseOptions) -> Self {
        let lexed = tokenize(text);
        let lines = LineIndex::new(text);
        let diagnostics = lexed
            .diagnostics
            .iter()
            .map(|d| Diagnostic { span: Span::new(lines.position(text, d.start), lines.position(text, d.end)), message: d.message.clone() })
            .collect::<Vec<_>>();
        let opaque_regions = diagnostics.len();
        Parser {
            text,
            tokens: lexed.tokens,
            pos: 0,
            lines,
            next_id: 0,
            diagnostics,
            opaque_regions,
            depth: 0,
            package: None,
            scopes: Vec::new(),
            options,
            no_lambda: false,
        }
    }

    pub(crate) fn parse_unit(mut self, file: &Path) -> CompilationUnit {
        let mut imports = Vec::new();
        let mut types = Vec::new();

        let save = self.pos;
        let _ = self.skip_modifiers();
        if self.is_ident("package") {
            self.bump();
            match self.qualified_name() {
                Ok(name) => self.package = Some(name),
                Err(Fail) => self.recover_member(save),
            }
            self.eat(";");
        } else {
            self.pos = save;
        }

        while self.is_ident("import") {
            let start = self.pos;
            self.bump();
            let is_static = self.eat_ident("static");
            match self.import_name() {
                Ok((name, wildcard)) => {
                    imports.push(Import { name, wildcard, is_static });
                    if self.expect(";").is_err() {
                        self.recover_member(start);
                    }
                }
                Err(Fail) => self.recover_member(start),
            }
        }

        while !self.at_eof() {
            if self.eat(";") {
                continue;
            }
            let start = self.pos;
            match self.type_declaration_with_modifiers() {
                Ok(Some(t)) => types.push(t),
                Ok(None) => {
                    self.error_here("expected a type declaration");
                    self.recover_member(start);
                }
                Err(Fail) => self.recover_member(start),
            }
        }

        CompilationUnit {
            file: file.to_path_buf(),
            package_name: self.package,
            imports,
            types,
            parse_diagnostics: self.diagnostics,
            opaque_regions: self.opaque_regions,
        }
    }

    // ----- token helpers -----

    fn peek(&self) -> Token {
        self.peek_at(0)
    }

    fn peek_at(&self, n: usize) -> Token {
        let last = self.tokens.len() - 1;
        self.tokens[(self.pos + n).min(last)]
    }

    fn tok_text(&self, t: Token) -> &'s str {
        &self.text[t.start..t.end]
    }

    fn text_at(&self, n: usize) -> &'s str {
        self.tok_text(self.peek_at(n))
    }

    fn at_eof(&self) -> bool {
        self.peek().kind == TokenKind::Eof
    }

    fn is(&self, s: &str) -> bool {
        let t = self.peek();
        t.kind == TokenKind::Punct && self.tok_text(t) == s
    }

    fn is_at(&self, n: usize, s: &str) -> bool {
        let t = self.peek_at(n);
        t.kind == TokenKind::Punct && self.tok_text(t) == s
    }

    fn is_ident(&self, s: &str) -> bool {
        let t = self.peek();
        t.kind == TokenKind::Ident && self.tok_text(t) == s
    }

    fn is_ident_at(&self, n: usize, s: &str) -> bool {
        let t = self.peek_at(n);
        t.kind == TokenKind::Ident && self.tok_text(t) == s
    }

    /// A non-keyword identifier at offset `n`.
    fn is_name_at(&self, n: usize) -> bool {
        let t = self.peek_at(n);
        t.kind == TokenKind::Ident && !is_keyword(self.tok_text(t))
    }

    fn bump(&mut self) -> Token {
        let t = self.peek();
        if t.kind != TokenKind::Eof {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, s: &str) -> bool {
        if self.is(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_ident(&mut self, s: &str) -> bool {
        if self.is_ident(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> PResult<Token> {
        if self.is(s) {
            Ok(self.bump())
        } else {
            self.error_here(&format!("expected `{s}`"));
            Err(Fail)
        }
    }

    fn expect_name(&mut self) -> PResult<String> {
        if self.is_name_at(0) {
            let t = self.bump();
            Ok(self.tok_text(t).to_string())
        } else {
            self.error_here("expected an identifier");
            Err(Fail)
        }
    }

    fn position(&self, offset: usize) -> Position {
        self.lines.position(self.text, offset)
    }

    fn prev_end(&self) -> usize {
        if self.pos == 0 {
            0
        } else {
            self.tokens[self.pos - 1].end
        }
    }

    /// Span from the start of token `start_tok` to the end of the last
    /// consumed token.
    fn span_from(&self, start_tok: usize) -> Span {
        let start = self.tokens[start_tok.min(self.tokens.len() - 1)].start;
        let end = self.prev_end().max(start);
        Span::new(self.position(start), self.position(end))
    }

    fn raw_from(&self, start_tok: usize) -> String {
        let span = self.span_from(start_tok);
        span.slice(self.text).to_string()
    }

    fn error_here(&mut self, message: &str) {
        let t = self.peek();
        let found = if t.kind == TokenKind::Eof { "end of file".to_string() } else { format!("`{}`", self.tok_text(t)) };
        self.diagnostics.push(Diagnostic {
            span: Span::new(self.position(t.start), self.position(t.end)),
            message: format!("{message}, found {found}"),
        });
    }

    fn fresh_id(&mut self) -> NodeId {
        let id = NodeId(self.next_id);
        self.next_id += 1;
        id
    }

    fn stmt(&mut self, start_tok: usize, kind: StmtKind) -> Stmt {
        Stmt { id: self.fresh_id(), span: self.span_from(start_tok), kind }
    }

    fn expr(&mut self, start_tok: usize, kind: ExprKind) -> Expr {
        Expr { id: self.fresh_id(), span: self.span_from(start_tok), kind }
    }

    fn enter(&mut self) -> PResult<()> {
        if self.depth >= MAX_DEPTH {
            self.error_here("nesting too deep");
            return Err(Fail);
        }
        self.depth += 1;
        Ok(())
    }

    fn leave(&mut self) {
        self.depth -= 1;
    }

    // ----- recovery -----

    /// Skips to the end of the current statement: past a `;` or up to (not
    /// including) a `}` at the nesting depth where the statement started.
    /// Stops early in front of an `if`/`switch` at that depth.
    fn recover_statement(&mut self, start: usize) -> Stmt {
        let mut depth: i32 = 0;
        loop {
            let t = self.peek();
            if t.kind == TokenKind::Eof {
                break;
            }
            let s = self.tok_text(t);
            if depth == 0 && self.pos > start && t.kind == TokenKind::Ident && (s == "if" || s == "switch") {
                break;
            }
            match (t.kind, s) {
                (TokenKind::Punct, ";") if depth == 0 => {
                    self.bump();
                    break;
                }
                (TokenKind::Punct, "}") if depth == 0 => break,
                (TokenKind::Punct, "(" | "[" | "{") => depth += 1,
                (TokenKind::Punct, ")" | "]" | "}") => depth = (depth - 1).max(0),
                _ => {}
            }
            self.bump();
        }
        if self.pos == start && !self.at_eof() && !self.is("}") {
            self.bump();
        }
        self.opaque_regions += 1;
        let raw = self.raw_from(start);
        self.stmt(start, StmtKind::Opaque(raw))
    }

    /// Skips a broken member or top-level declaration.
    fn recover_member(&mut self, start: usize) {
        let mut depth: i32 = 0;
        loop {
            let t = self.peek();
            if t.kind == TokenKind::Eof {
                break;
            }
            let s = self.tok_text(t);
            match (t.kind, s) {
                (TokenKind::Punct, ";") if depth == 0 => {
                    self.bump();
                    break;
                }
                (TokenKind::Punct, "}") if depth == 0 => {
                    if self.pos == start {
                        self.bump();
                    }
                    break;
                }
                (TokenKind::Punct, "(" | "[" | "{") => depth += 1,
                (TokenKind::Punct, ")" | "]") => depth = (depth - 1).max(0),
                (TokenKind::Punct, "}") => {
                    depth -= 1;
                    if depth == 0 {
                        self.bump();
                        break;
                    }
                }
                _ => {}
            }
            self.bump();
        }
        if self.pos == start && !self.at_eof() {
            self.bump();
        }
        self.opaque_regions += 1;
    }

    // ----- names and types -----

    fn qualified_name(&mut self) -> PResult<String> {
        let mut name = self.expect_name()?;
        while self.is(".") && self.is_name_at(1) {
            self.bump();
            let t = self.bump();
            name.push('.');
            name.push_str(self.tok_text(t));
        }
        Ok(name)
    }

    fn import_name(&mut self) -> PResult<(String, bool)> {
        let mut name = self.expect_name()?;
        loop {
            if self.is(".") && self.is_at(1, "*") {
                self.bump();
                self.bump();
                return Ok((name, true));
            }
            if self.is(".") && self.is_name_at(1) {
                self.bump();
                let t = self.bump();
                name.push('.');
                name.push_str(self.tok_text(t));
            } else {
                return Ok((name, false));
            }
        }
    }

    /// Skips annotations and modifier keywords. Returns whether anything was
    /// consumed.
    fn skip_modifiers(&mut self) -> PResult<bool> {
        let start = self.pos;
        loop {
            if self.is("@") && !self.is_ident_at(1, "interface") {
                self.bump();
                self.qualified_name()?;
                if self.is("(") {
                    self.skip_balanced("(", ")")?;
                }
                continue;
            }
            let t = self.peek();
            if t.kind == TokenKind::Ident {
                let s = self.tok_text(t);
                if MODIFIERS.contains(&s) {
                    self.bump();
                    continue;
                }
                if s == "non" && self.is_at(1, "-") && self.is_ident_at(2, "sealed") {
                    self.bump();
                    self.bump();
                    self.bump();
                    continue;
                }
                // `default` is a modifier only in interface method headers.
                if s == "default" && !self.is_at(1, ":") && !self.is_at(1, "->") {
                    self.bump();
                    continue;
                }
            }
            break;
        }
        Ok(self.pos > start)
    }

    fn skip_balanced(&mut self, open: &str, close: &str) -> PResult<()> {
        self.expect(open)?;
        let mut depth = 1;
        while depth > 0 {
            if self.at_eof() {
                self.error_here(&format!("unclosed `{open}`"));
                return Err(Fail);
            }
            if self.is(open) {
                depth += 1;
            } else if self.is(close) {
                depth -= 1;
            }
            self.bump();
        }
        Ok(())
    }

    /// Skips `<...>` type arguments/parameters. Fails without a diagnostic on
    /// tokens that cannot occur inside them, so it is usable speculatively.
    fn skip_type_args(&mut self) -> PResult<()> {
        if !self.is("<") {
            return Ok(());
        }
        let mut depth = 0;
        loop {
            let t = self.peek();
            let s = self.tok_text(t);
            match (t.kind, s) {
                (TokenKind::Punct, "<") => depth += 1,
                (TokenKind::Punct, ">") => {
                    depth -= 1;
                    if depth == 0 {
                        self.bump();
                        return Ok(());
                    }
                }
                (TokenKind::Punct, "," | "." | "?" | "&" | "[" | "]" | "@") => {}
                (TokenKind::Ident, _) => {}
                _ => return Err(Fail),
            }
            self.bump();
        }
    }

    /// Parses a type as written, discarding generics and annotations.
    /// Records no diagnostics; callers decide whether a miss is an error.
    fn try_type(&mut self) -> Option<String> {
        let save = self.pos;
        let r = self.try_type_inner();
        if r.is_none() {
            self.pos = save;
        }
        r
    }

    fn try_type_inner(&mut self) -> Option<String> {
        while self.is("@") && !self.is_ident_at(1, "interface") {
            self.bump();
            self.qualified_name_quiet()?;
            if self.is("(") {
                self.skip_parens_quiet()?;
            }
        }
        let t = self.peek();
        if t.kind != TokenKind::Ident {
            return None;
        }
        let first = self.tok_text(t);
        if is_keyword(first) && !PRIMITIVES.contains(&first) {
            return None;
        }
        self.bump();
        let mut name = first.to_string();
        if !PRIMITIVES.contains(&first) {
            self.skip_type_args().ok()?;
            while self.is(".") && (self.is_name_at(1) || self.is_at(1, "@")) {
                self.bump();
                while self.is("@") {
                    self.bump();
                    self.qualified_name_quiet()?;
                }
                let t = self.bump();
                if t.kind != TokenKind::Ident {
                    return None;
                }
                name.push('.');
                name.push_str(self.tok_text(t));
                self.skip_type_args().ok()?;
            }
        }
        while self.is("[") && self.is_at(1, "]") {
            self.bump();
            self.bump();
            name.push_str("[]");
        }
        Some(name)
    }

    fn qualified_name_quiet(&mut self) -> Option<()> {
        if !self.is_name_at(0) {
            return None;
        }
        self.bump();
        while self.is(".") && self.is_name_at(1) {
            self.bump();
            self.bump();
        }
        Some(())
    }

    fn skip_parens_quiet(&mut self) -> Option<()> {
        let mut depth = 0;
        loop {
            if self.at_eof() {
                return None;
            }
            if self.is("(") {
                depth += 1;
            } else if self.is(")") {
                depth -= 1;
                if depth == 0 {
                    self.bump();
                    return Some(());
                }
            }
            self.bump();
        }
    }

    fn parse_type(&mut self) -> PResult<String> {
        match self.try_type() {
            Some(t) => Ok(t),
            None => {
                self.error_here("expected a type");
                Err(Fail)
            }
        }
    }

    fn type_list(&mut self) -> PResult<Vec<String>> {
        let mut out = vec![self.parse_type()?];
        while self.eat(",") {
            out.push(self.parse_type()?);
        }
        Ok(out)
    }

    // ----- type declarations -----

    fn type_keyword_ahead(&self) -> bool {
        self.is_ident("class")
            || self.is_ident("interface")
            || self.is_ident("enum")
            || (self.is("@") && self.is_ident_at(1, "interface"))
            || (self.is_ident("record") && self.is_name_at(1) && (self.is_at(2, "(") || self.is_at(2, "<")))
    }

    fn type_declaration_with_modifiers(&mut self) -> PResult<Option<TypeDeclaration>> {
        let start = self.pos;
        self.skip_modifiers()?;
        if !self.type_keyword_ahead() {
            return Ok(None);
        }
        self.type_declaration(start).map(Some)
    }

    fn current_display(&self) -> Option<&str> {
        self.scopes.last().map(|s| s.display.as_str())
    }

    fn qualify(&self, display: &str) -> String {
        match &self.package {
            Some(p) => format!("{p}.{display}"),
            None => display.to_string(),
        }
    }

    /// Parses a named type declaration; the current token is the kind keyword.
    fn type_declaration(&mut self, start: usize) -> PResult<TypeDeclaration> {
        self.enter()?;
        let r = self.type_declaration_inner(start);
        self.leave();
        r
    }

    fn type_declaration_inner(&mut self, start: usize) -> PResult<TypeDeclaration> {
        let kw_tok = self.bump();
        let keyword = self.tok_text(kw_tok);
        let kind = match keyword {
            "class" | "record" => TypeKind::Class,
            "enum" => TypeKind::Enum,
            "@" => {
                self.bump();
                TypeKind::Interface
            }
            _ => TypeKind::Interface,
        };
        let name = self.expect_name()?;
        let display = match self.current_display() {
            Some(outer) => format!("{outer}.{name}"),
            None => name.clone(),
        };
        self.skip_type_args()?;
        if keyword == "record" && self.is("(") {
            self.skip_balanced("(", ")")?;
        }
        let mut extends_names = Vec::new();
        let mut implements_names = Vec::new();
        loop {
            if self.eat_ident("extends") {
                extends_names.extend(self.type_list()?);
            } else if self.eat_ident("implements") {
                implements_names.extend(self.type_list()?);
            } else if self.eat_ident("permits") {
                self.type_list()?;
            } else {
                break;
            }
        }
        let qualified_name = self.qualify(&display);
        self.scopes.push(Scope { display, anonymous: 0, lambdas: 0 });
        let body = self.type_body(kind == TypeKind::Enum, &name);
        self.scopes.pop();
        let (fields, methods, nested_types) = body?;
        Ok(TypeDeclaration {
            name,
            qualified_name,
            kind,
            extends_names,
            implements_names,
            fields,
            methods,
            nested_types,
            span: self.span_from(start),
            from_lambda: false,
        })
    }

    fn anonymous_display(&mut self, lambda: bool) -> String {
        match self.scopes.last_mut() {
            Some(scope) => {
                if lambda {
                    scope.lambdas += 1;
                    format!("{}$lambda${}", scope.display, scope.lambdas)
                } else {
                    scope.anonymous += 1;
                    format!("{}${}", scope.display, scope.anonymous)
                }
            }
            None => {
                if lambda {
                    "$lambda$1".into()
                } else {
                    "$1".into()
                }
            }
        }
    }

    /// Parses an anonymous class body following `new T(args)`.
    fn anonymous_body(&mut self, start: usize, supertype: String) -> PResult<TypeDeclaration> {
        self.enter()?;
        let display = self.anonymous_display(false);
        let qualified_name = self.qualify(&display);
        self.scopes.push(Scope { display: display.clone(), anonymous: 0, lambdas: 0 });
        let body = self.type_body(false, "");
        self.scopes.pop();
        self.leave();
        let (fields, methods, nested_types) = body?;
        Ok(TypeDeclaration {
            name: display,
            qualified_name,
            kind: TypeKind::Anonymous,
            extends_names: vec![supertype],
            implements_names: vec![],
            fields,
            methods,
            nested_types,
            span: self.span_from(start),
            from_lambda: false,
        })
    }

    #[allow(clippy::type_complexity)]
    fn type_body(
        &mut self,
        is_enum: bool,
        type_name: &str,
    ) -> PResult<(Vec<FieldDeclaration>, Vec<MethodDeclaration>, Vec<TypeDeclaration>)> {
        self.expect("{")?;
        let mut fields: Vec<FieldDeclaration> = Vec::new();
        let mut methods = Vec::new();
        let mut nested = Vec::new();

        if is_enum {
            self.enum_constants(type_name, &mut nested)?;
        }

        loop {
            if self.eat("}") {
                break;
            }
            if self.at_eof() {
                self.error_here("unclosed type body");
                self.opaque_regions += 1;
                break;
            }
            if self.eat(";") {
                continue;
            }
            let start = self.pos;
            match self.member(start, type_name) {
                Ok(Member::Fields(fs)) => {
                    for f in fs {
                        if fields.iter().any(|g| g.name == f.name) {
                            self.diagnostics.push(Diagnostic { span: f.span, message: format!("duplicate field `{}`", f.name) });
                            self.opaque_regions += 1;
                        } else {
                            fields.push(f);
                        }
                    }
                }
                Ok(Member::Method(m)) => methods.push(m),
                Ok(Member::Type(t)) => nested.push(t),
                Err(Fail) => self.recover_member(start),
            }
        }
        Ok((fields, methods, nested))
    }

    fn enum_constants(&mut self, enum_name: &str, nested: &mut Vec<TypeDeclaration>) -> PResult<()> {
        loop {
            let start = self.pos;
            while self.is("@") {
                self.bump();
                self.qualified_name()?;
                if self.is("(") {
                    self.skip_balanced("(", ")")?;
                }
            }
            if !self.is_name_at(0) {
                break;
            }
            self.bump();
            if self.is("(") {
                self.arguments()?;
            }
            if self.is("{") {
                let t = self.anonymous_body(start, enum_name.to_string())?;
                nested.push(t);
            }
            if !self.eat(",") {
                break;
            }
        }
        if !self.is("}") {
            self.expect(";")?;
        }
        Ok(())
    }

    fn member(&mut self, start: usize, type_name: &str) -> PResult<Member> {
        // Initializer blocks.
        if self.is("{") || (self.is_ident("static") && self.is_at(1, "{")) {
            let is_static = self.eat_ident("static");
            let body = self.block()?;
            return Ok(Member::Method(MethodDeclaration {
                name: if is_static { "<clinit>".into() } else { "<init>".into() },
                parameters: vec![],
                return_type: String::new(),
                body: Some(body),
                is_lambda: false,
                span: self.span_from(start),
            }));
        }
        self.skip_modifiers()?;
        if self.type_keyword_ahead() {
            return self.type_declaration(start).map(Member::Type);
        }
        if self.is("<") && self.skip_type_args().is_err() {
            self.error_here("malformed type parameters");
            return Err(Fail);
        }
        // Constructor (or compact record constructor).
        if self.is_name_at(0) && (self.is_at(1, "(") || (self.is_at(1, "{") && self.text_at(0) == type_name)) {
            let name = self.expect_name()?;
            let parameters = if self.is("(") { self.parameters()? } else { vec![] };
            return self.method_rest(start, name, parameters, String::new()).map(Member::Method);
        }
        let declared_type = self.parse_type()?;
        let name = self.expect_name()?;
        if self.is("(") {
            let parameters = self.parameters()?;
            return self.method_rest(start, name, parameters, declared_type).map(Member::Method);
        }
        // Fields.
        let mut out = Vec::new();
        let mut field_start = start;
        let mut name = name;
        loop {
            let mut ty = declared_type.clone();
            while self.is("[") && self.is_at(1, "]") {
                self.bump();
                self.bump();
                ty.push_str("[]");
            }
            let initializer = if self.eat("=") { Some(self.variable_initializer()?) } else { None };
            out.push(FieldDeclaration { name, declared_type: ty, initializer, span: self.span_from(field_start) });
            if !self.eat(",") {
                break;
            }
            field_start = self.pos;
            name = self.expect_name()?;
        }
        self.expect(";")?;
        if let Some(first) = out.first_mut() {
            first.span = self.span_from(start);
        }
        Ok(Member::Fields(out))
    }

    fn parameters(&mut self) -> PResult<Vec<Parameter>> {
        self.expect("(")?;
        let mut out = Vec::new();
        if self.eat(")") {
            return Ok(out);
        }
        loop {
            self.skip_modifiers()?;
            let mut declared_type = self.parse_type()?;
            if self.eat("...") {
                declared_type.push_str("...");
            }
            // Receiver parameter `Foo this`.
            let name = if self.eat_ident("this") { "this".to_string() } else { self.expect_name()? };
            while self.is("[") && self.is_at(1, "]") {
                self.bump();
                self.bump();
                declared_type.push_str("[]");
            }
            out.push(Parameter { name, declared_type });
            if !self.eat(",") {
                break;
            }
        }
        self.expect(")")?;
        Ok(out)
    }

    fn method_rest(&mut self, start: usize, name: String, parameters: Vec<Parameter>, return_type: String) -> PResult<MethodDeclaration> {
        let mut return_type = return_type;
        while self.is("[") && self.is_at(1, "]") {
            self.bump();
            self.bump();
            return_type.push_str("[]");
        }
        if self.eat_ident("throws") {
            self.type_list()?;
        }
        let body = if self.is("{") {
            Some(self.block()?)
        } else {
            if self.eat_ident("default") {
                // Annotation element default value.
                self.variable_initializer()?;
            }
            self.expect(";")?;
            None
        };
        Ok(MethodDeclaration { name, parameters, return_type, body, is_lambda: false, span: self.span_from(start) })
    }

    fn variable_initializer(&mut self) -> PResult<Expr> {
        if self.is("{") {
            self.array_initializer(self.pos, String::new())
        } else {
            self.expression()
        }
    }

    fn array_initializer(&mut self, start: usize, type_name: String) -> PResult<Expr> {
        self.enter()?;
        let r = (|| {
            self.expect("{")?;
            let mut elements = Vec::new();
            while !self.is("}") {
                elements.push(self.variable_initializer()?);
                if !self.eat(",") {
                    break;
                }
            }
            self.expect("}")?;
            Ok(self.expr(start, ExprKind::NewArray { type_name, elements }))
        })();
        self.leave();
        r
    }

    // ----- statements -----

    fn block(&mut self) -> PResult<Stmt> {
        let start = self.pos;
        self.expect("{")?;
        self.enter()?;
        let mut stmts = Vec::new();
        loop {
            if self.eat("}") {
                break;
            }
            if self.at_eof() {
                self.error_here("unclosed block");
                self.opaque_regions += 1;
                break;
            }
            stmts.push(self.statement_recovering());
        }
        self.leave();
        Ok(self.stmt(start, StmtKind::Block(stmts)))
    }

    fn statement_recovering(&mut self) -> Stmt {
        let start = self.pos;
        match self.statement() {
            Ok(s) => s,
            Err(Fail) => self.recover_statement(start),
        }
    }

    fn statement(&mut self) -> PResult<Stmt> {
        self.enter()?;
        let r = self.statement_inner();
        self.leave();
        r
    }

    fn statement_inner(&mut self) -> PResult<Stmt> {
        let start = self.pos;
        let t = self.peek();
        let s = self.tok_text(t);
        if t.kind == TokenKind::Punct {
            return match s {
                "{" => self.block(),
                ";" => {
                    self.bump();
                    Ok(self.stmt(start, StmtKind::Block(vec![])))
                }
                "@" => self.declaration_statement(start),
                _ => self.expression_statement(start),
            };
        }
        if t.kind != TokenKind::Ident {
            return self.expression_statement(start);
        }
        match s {
            "if" => {
                self.bump();
                self.expect("(")?;
                let condition = self.expression()?;
                self.expect(")")?;
                let then_branch = Box::new(self.statement_recovering());
                let else_branch = if self.eat_ident("else") { Some(Box::new(self.statement_recovering())) } else { None };
                Ok(self.stmt(start, StmtKind::If { condition, then_branch, else_branch }))
            }
            "switch" => {
                self.bump();
                let (selector, cases) = self.switch_rest()?;
                Ok(self.stmt(start, StmtKind::Switch { selector, cases }))
            }
            "while" => {
                self.bump();
                self.expect("(")?;
                let condition = self.expression()?;
                self.expect(")")?;
                let body = Box::new(self.statement_recovering());
                Ok(self.stmt(start, StmtKind::Loop { kind: LoopKind::While, condition: Some(condition), body }))
            }
            "do" => {
                self.bump();
                let body = Box::new(self.statement_recovering());
                if !self.eat_ident("while") {
                    self.error_here("expected `while`");
                    return Err(Fail);
                }
                self.expect("(")?;
                let condition = self.expression()?;
                self.expect(")")?;
                self.expect(";")?;
                Ok(self.stmt(start, StmtKind::Loop { kind: LoopKind::DoWhile, condition: Some(condition), body }))
            }
            "for" => self.for_statement(start),
            "return" => {
                self.bump();
                let value = if self.is(";") { None } else { Some(self.expression()?) };
                self.expect(";")?;
                Ok(self.stmt(start, StmtKind::Return(value)))
            }
            "break" | "continue" => {
                self.bump();
                let label = if self.is_name_at(0) { Some(self.expect_name()?) } else { None };
                self.expect(";")?;
                let kind = if s == "break" { StmtKind::Break(label) } else { StmtKind::Continue(label) };
                Ok(self.stmt(start, kind))
            }
            "throw" => {
                self.bump();
                let e = self.expression()?;
                self.expect(";")?;
                Ok(self.stmt(start, StmtKind::Throw(e)))
            }
            "try" => self.try_statement(start),
            "synchronized" if self.is_at(1, "(") => {
                self.bump();
                self.expect("(")?;
                self.expression()?;
                self.expect(")")?;
                let body = self.block()?;
                let stmts = match body.kind {
                    StmtKind::Block(stmts) => stmts,
                    other => vec![Stmt { kind: other, ..body }],
                };
                Ok(self.stmt(start, StmtKind::Block(stmts)))
            }
            "assert" => {
                self.bump();
                self.expression()?;
                if self.eat(":") {
                    self.expression()?;
                }
                self.expect(";")?;
                self.opaque_regions += 1;
                let raw = self.raw_from(start);
                Ok(self.stmt(start, StmtKind::Opaque(raw)))
            }
            "yield" if !self.is_at(1, "=") && !self.is_at(1, "(") && !self.is_at(1, ".") => {
                self.bump();
                let e = self.expression()?;
                self.expect(";")?;
                Ok(self.stmt(start, StmtKind::Expression(e)))
            }
            "else" | "case" | "catch" | "finally" => {
                self.error_here("unexpected keyword");
                Err(Fail)
            }
            "default" if self.is_at(1, ":") || self.is_at(1, "->") => {
                self.error_here("unexpected keyword");
                Err(Fail)
            }
            _ => {
                if self.is_name_at(0) && self.is_at(1, ":") && !self.is_at(1, "::") {
                    self.bump();
                    self.bump();
                    let label = s.to_string();
                    let body = Box::new(self.statement_recovering());
                    return Ok(self.stmt(start, StmtKind::Labeled { label, body }));
                }
                if MODIFIERS.contains(&s) || self.type_keyword_ahead() {
                    return self.declaration_statement(start);
                }
                if self.local_var_ahead() {
                    let decls = self.local_var_declarators(start)?;
                    self.expect(";")?;
                    return Ok(self.wrap_decls(start, decls));
                }
                self.expression_statement(start)
            }
        }
    }

    fn declaration_statement(&mut self, start: usize) -> PResult<Stmt> {
        self.skip_modifiers()?;
        if self.type_keyword_ahead() {
            let t = self.type_declaration(start)?;
            return Ok(self.stmt(start, StmtKind::LocalType(Box::new(t))));
        }
        let decls = self.local_var_declarators(start)?;
        self.expect(";")?;
        Ok(self.wrap_decls(start, decls))
    }

    fn wrap_decls(&mut self, start: usize, mut decls: Vec<Stmt>) -> Stmt {
        if decls.len() == 1 {
            let mut d = decls.pop().unwrap_or_else(|| unreachable!());
            d.span = self.span_from(start);
            d
        } else {
            self.stmt(start, StmtKind::Block(decls))
        }
    }

    fn expression_statement(&mut self, start: usize) -> PResult<Stmt> {
        let e = self.expression()?;
        self.expect(";")?;
        Ok(self.stmt(start, StmtKind::Expression(e)))
    }

    /// `Type name` followed by `=`, `;`, `,`, `[` or `:`.
    fn local_var_ahead(&mut self) -> bool {
        let save = self.pos;
        let ok = self.try_type().is_some() && self.is_name_at(0) && ["=", ";", ",", "[", ":", ")"].iter().any(|p| self.is_at(1, p));
        self.pos = save;
        ok
    }

    /// Parses `Type a [= x], b [= y]` without the terminator.
    fn local_var_declarators(&mut self, start: usize) -> PResult<Vec<Stmt>> {
        self.skip_modifiers()?;
        let declared_type = self.parse_type()?;
        let mut out = Vec::new();
        let mut decl_start = start;
        loop {
            let name = self.expect_name()?;
            let mut ty = declared_type.clone();
            while self.is("[") && self.is_at(1, "]") {
                self.bump();
                self.bump();
                ty.push_str("[]");
            }
            let initializer = if self.eat("=") { Some(self.variable_initializer()?) } else { None };
            out.push(self.stmt(decl_start, StmtKind::LocalVarDecl { name, declared_type: ty, initializer }));
            if !self.eat(",") {
                break;
            }
            decl_start = self.pos;
        }
        Ok(out)
    }

    fn for_statement(&mut self, start: usize) -> PResult<Stmt> {
        self.bump();
        self.expect("(")?;
        // Enhanced for.
        let save = self.pos;
        let decl_start = self.pos;
        let _ = self.skip_modifiers();
        if let Some(declared_type) = self.try_type() {
            if self.is_name_at(0) && self.is_at(1, ":") {
                let name = self.expect_name()?;
                self.bump();
                let iterable = self.expression()?;
                self.expect(")")?;
                let var = self.stmt(decl_start, StmtKind::LocalVarDecl { name, declared_type, initializer: None });
                let body = self.statement_recovering();
                let body_span = body.span;
                let body_id = self.fresh_id();
                let body = Box::new(Stmt { id: body_id, span: var.span.to(body_span), kind: StmtKind::Block(vec![var, body]) });
                return Ok(self.stmt(start, StmtKind::Loop { kind: LoopKind::ForEach, condition: Some(iterable), body }));
            }
        }
        self.pos = save;

        let mut init = Vec::new();
        if !self.is(";") {
            if self.local_var_ahead() || self.is_ident("final") || self.is("@") {
                init = self.local_var_declarators(self.pos)?;
            } else {
                loop {
                    let s = self.pos;
                    let e = self.expression()?;
                    init.push(self.stmt(s, StmtKind::Expression(e)));
                    if !self.eat(",") {
                        break;
                    }
                }
            }
        }
        self.expect(";")?;
        let condition = if self.is(";") { None } else { Some(self.expression()?) };
        self.expect(";")?;
        if !self.is(")") {
            loop {
                self.expression()?;
                if !self.eat(",") {
                    break;
                }
            }
        }
        self.expect(")")?;
        let body = Box::new(self.statement_recovering());
        let lp = self.stmt(start, StmtKind::Loop { kind: LoopKind::For, condition, body });
        if init.is_empty() {
            Ok(lp)
        } else {
            init.push(lp);
            Ok(self.stmt(start, StmtKind::Block(init)))
        }
    }

    fn try_statement(&mut self, start: usize) -> PResult<Stmt> {
        self.bump();
        let mut resources = Vec::new();
        if self.eat("(") {
            while !self.is(")") {
                let s = self.pos;
                if self.local_var_ahead() || self.is_ident("final") || self.is("@") {
                    resources.extend(self.local_var_declarators(s)?);
                } else {
                    let e = self.expression()?;
                    resources.push(self.stmt(s, StmtKind::Expression(e)));
                }
                if !self.eat(";") {
                    break;
                }
            }
            self.expect(")")?;
        }
        let body = Box::new(self.block()?);
        let mut catches = Vec::new();
        while self.is_ident("catch") {
            let cstart = self.pos;
            self.bump();
            self.expect("(")?;
            self.skip_modifiers()?;
            let mut declared_type = self.parse_type()?;
            while self.eat("|") {
                let alt = self.parse_type()?;
                declared_type.push('|');
                declared_type.push_str(&alt);
            }
            let name = self.expect_name()?;
            self.expect(")")?;
            let body = Box::new(self.block()?);
            catches.push(CatchClause { parameter: Parameter { name, declared_type }, body, span: self.span_from(cstart) });
        }
        let finally = if self.eat_ident("finally") { Some(Box::new(self.block()?)) } else { None };
        if catches.is_empty() && finally.is_none() && resources.is_empty() {
            self.error_here("expected `catch` or `finally`");
        }
        Ok(self.stmt(start, StmtKind::Try { resources, body, catches, finally }))
    }

    /// Parses `(selector) { cases }` after the `switch` keyword.
    fn switch_rest(&mut self) -> PResult<(Expr, Vec<SwitchCase>)> {
        self.expect("(")?;
        let selector = self.expression()?;
        self.expect(")")?;
        self.expect("{")?;
        let mut cases: Vec<SwitchCase> = Vec::new();
        loop {
            if self.eat("}") {
                break;
            }
            if self.at_eof() {
                self.error_here("unclosed switch");
                self.opaque_regions += 1;
                break;
            }
            let case_start = self.pos;
            if !(self.is_ident("case") || self.is_ident("default")) {
                self.error_here("expected `case` or `default`");
                // Keep statements that precede any label.
                let s = self.statement_recovering();
                if let Some(last) = cases.last_mut() {
                    last.body.push(s);
                }
                continue;
            }
            let mut labels = Vec::new();
            let mut is_default = false;
            let arrow;
            loop {
                if self.eat_ident("default") {
                    is_default = true;
                } else if self.eat_ident("case") {
                    loop {
                        if self.eat_ident("default") {
                            is_default = true;
                        } else {
                            labels.push(self.case_label()?);
                        }
                        if !self.eat(",") {
                            break;
                        }
                    }
                    if self.eat_ident("when") {
                        let was = self.no_lambda;
                        self.no_lambda = true;
                        let r = self.expression();
                        self.no_lambda = was;
                        r?;
                    }
                } else {
                    self.error_here("expected `case` or `default`");
                    return Err(Fail);
                }
                if self.eat("->") {
                    arrow = true;
                    break;
                }
                self.expect(":")?;
                // Consecutive labels form one group.
                if !(self.is_ident("case") || (self.is_ident("default") && (self.is_at(1, ":") || self.is_at(1, "->")))) {
                    arrow = false;
                    break;
                }
            }
            let mut body = Vec::new();
            if arrow {
                body.push(self.statement_recovering());
            } else {
                while !(self.is("}")
                    || self.at_eof()
                    || self.is_ident("case")
                    || (self.is_ident("default") && (self.is_at(1, ":") || self.is_at(1, "->"))))
                {
                    body.push(self.statement_recovering());
                }
            }
            cases.push(SwitchCase { labels, is_default, body, span: self.span_from(case_start) });
        }
        Ok((selector, cases))
    }

    fn case_label(&mut self) -> PResult<Expr> {
        let was = self.no_lambda;
        self.no_lambda = true;
        let r = self.ternary();
        self.no_lambda = was;
        let e = r?;
        // Type pattern binding: `case JButton b`.
        if self.is_name_at(0) && !self.is_ident("when") {
            self.bump();
        }
        Ok(e)
    }

    // ----- expressions -----

    fn expression(&mut self) -> PResult<Expr> {
        self.enter()?;
        let r = self.assignment();
        self.leave();
        r
    }

    /// Operator formed by adjacent `>` / `=` tokens at the cursor, with the
    /// number of tokens it spans.
    fn glued_gt(&self) -> Option<(&'static str, usize)> {
        if !self.is(">") {
            return None;
        }
        let adjacent = |a: usize, s: &str| -> bool { self.is_at(a, s) && self.peek_at(a).start == self.peek_at(a - 1).end };
        Some(if adjacent(1, ">") && adjacent(2, ">") && adjacent(3, "=") {
            (">>>=", 4)
        } else if adjacent(1, ">") && adjacent(2, ">") {
            (">>>", 3)
        } else if adjacent(1, ">") && adjacent(2, "=") {
            (">>=", 3)
        } else if adjacent(1, ">") {
            (">>", 2)
        } else if adjacent(1, "=") {
            (">=", 2)
        } else {
            (">", 1)
        })
    }

    fn peek_operator(&self) -> Option<(String, usize)> {
        if let Some((op, n)) = self.glued_gt() {
            return Some((op.to_string(), n));
        }
        let t = self.peek();
        match t.kind {
            TokenKind::Punct => Some((self.tok_text(t).to_string(), 1)),
            TokenKind::Ident if self.tok_text(t) == "instanceof" => Some(("instanceof".into(), 1)),
            _ => None,
        }
    }

    fn assignment(&mut self) -> PResult<Expr> {
        if self.lambda_ahead() {
            return self.lambda();
        }
        let start = self.pos;
        let lhs = self.ternary()?;
        if let Some((op, n)) = self.peek_operator() {
            if ASSIGN_OPS.contains(&op.as_str()) {
                for _ in 0..n {
                    self.bump();
                }
                let value = self.expression()?;
                return Ok(self.expr(start, ExprKind::Assignment { op, target: Box::new(lhs), value: Box::new(value) }));
            }
        }
        Ok(lhs)
    }

    fn ternary(&mut self) -> PResult<Expr> {
        let start = self.pos;
        let condition = self.binary(1)?;
        if !self.eat("?") {
            return Ok(condition);
        }
        let then_expr = self.expression()?;
        self.expect(":")?;
        let else_expr = if self.lambda_ahead() { self.lambda()? } else { self.ternary_nested()? };
        Ok(self.expr(
            start,
            ExprKind::Conditional { condition: Box::new(condition), then_expr: Box::new(then_expr), else_expr: Box::new(else_expr) },
        ))
    }

    fn ternary_nested(&mut self) -> PResult<Expr> {
        self.enter()?;
        let r = self.ternary();
        self.leave();
        r
    }

    fn binary(&mut self, min_prec: u8) -> PResult<Expr> {
        let start = self.pos;
        let mut lhs = self.unary()?;
        while let Some((op, n)) = self.peek_operator() {
            let Some(prec) = binary_precedence(&op) else { break };
            if prec < min_prec {
                break;
            }
            for _ in 0..n {
                self.bump();
            }
            if op == "instanceof" {
                self.eat_ident("final");
                let type_name = self.parse_type()?;
                let binding = if self.is_name_at(0) { Some(self.expect_name()?) } else { None };
                lhs = self.expr(start, ExprKind::InstanceOf { operand: Box::new(lhs), type_name, binding });
                continue;
            }
            self.enter()?;
            let rhs = self.binary(prec + 1);
            self.leave();
            let rhs = rhs?;
            lhs = self.expr(start, ExprKind::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs) });
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        self.enter()?;
        let r = self.unary_inner();
        self.leave();
        r
    }

    fn unary_inner(&mut self) -> PResult<Expr> {
        let start = self.pos;
        for op in ["+", "-", "!", "~", "++", "--"] {
            if self.is(op) {
                self.bump();
                let operand = self.unary()?;
                return Ok(self.expr(start, ExprKind::Unary { op: op.into(), prefix: true, operand: Box::new(operand) }));
            }
        }
        if self.is("(") {
            if let Some(type_name) = self.cast_ahead() {
                let operand = if self.lambda_ahead() { self.lambda()? } else { self.unary()? };
                return Ok(self.expr(start, ExprKind::Cast { type_name, operand: Box::new(operand) }));
            }
        }
        let primary = self.primary()?;
        self.postfix(start, primary)
    }

    /// If the cursor is at a cast `(Type)`, consumes it and returns the type.
    fn cast_ahead(&mut self) -> Option<String> {
        let save = self.pos;
        self.bump();
        let ty = self.try_type();
        if let Some(mut ty) = ty {
            while self.eat("&") {
                match self.try_type() {
                    Some(t) => {
                        ty.push('&');
                        ty.push_str(&t);
                    }
                    None => {
                        self.pos = save;
                        return None;
                    }
                }
            }
            if self.is(")") {
                let primitive = PRIMITIVES.iter().any(|p| ty == *p || ty.starts_with(&format!("{p}[")));
                let next = self.peek_at(1);
                let next_text = self.tok_text(next);
                let operand_follows = match next.kind {
                    TokenKind::Ident => next_text != "instanceof",
                    TokenKind::Number | TokenKind::Str | TokenKind::Char => true,
                    TokenKind::Punct => matches!(next_text, "(" | "!" | "~"),
                    TokenKind::Eof => false,
                };
                if primitive || operand_follows {
                    self.bump();
                    return Some(ty);
                }
            }
        }
        self.pos = save;
        None
    }

    fn lambda_ahead(&self) -> bool {
        if self.no_lambda {
            return false;
        }
        if self.is_name_at(0) && self.is_at(1, "->") {
            return true;
        }
        if !self.is("(") {
            return false;
        }
        let mut depth = 0;
        let mut i = 0;
        loop {
            let t = self.peek_at(i);
            if t.kind == TokenKind::Eof || i > 256 {
                return false;
            }
            if t.kind == TokenKind::Punct {
                match self.tok_text(t) {
                    "(" => depth += 1,
                    ")" => {
                        depth -= 1;
                        if depth == 0 {
                            return self.is_at(i + 1, "->");
                        }
                    }
                    ";" | "{" | "}" => return false,
                    _ => {}
                }
            }
            i += 1;
        }
    }

    fn lambda(&mut self) -> PResult<Expr> {
        let start = self.pos;
        let mut parameters = Vec::new();
        if self.is_name_at(0) {
            let name = self.expect_name()?;
            parameters.push(Parameter { name, declared_type: String::new() });
        } else {
            self.expect("(")?;
            while !self.is(")") {
                if self.is_name_at(0) && (self.is_at(1, ",") || self.is_at(1, ")")) {
                    let name = self.expect_name()?;
                    parameters.push(Parameter { name, declared_type: String::new() });
                } else {
                    self.skip_modifiers()?;
                    let declared_type = self.parse_type()?;
                    let name = self.expect_name()?;
                    let declared_type = if declared_type == "var" { String::new() } else { declared_type };
                    parameters.push(Parameter { name, declared_type });
                }
                if !self.eat(",") {
                    break;
                }
            }
            self.expect(")")?;
        }
        self.expect("->")?;
        let body = if self.is("{") { LambdaBody::Block(Box::new(self.block()?)) } else { LambdaBody::Expr(Box::new(self.expression()?)) };
        Ok(self.expr(start, ExprKind::Lambda { parameters, body, listener: None }))
    }

    fn arguments(&mut self) -> PResult<Vec<Expr>> {
        self.expect("(")?;
        let mut args = Vec::new();
        if self.eat(")") {
            return Ok(args);
        }
        loop {
            args.push(self.expression()?);
            if !self.eat(",") {
                break;
            }
        }
        self.expect(")")?;
        Ok(args)
    }

    fn call(&mut self, start: usize, receiver: Option<Box<Expr>>, name: String) -> PResult<Expr> {
        let mut args = self.arguments()?;
        if let Some(target) = self.options.lambda_listeners.get(&name).cloned() {
            for arg in &mut args {
                self.materialize_lambda(arg, &target);
            }
        }
        Ok(self.expr(start, ExprKind::MethodCall { receiver, name, args }))
    }

    /// Attaches a synthetic anonymous listener type to a lambda argument of a
    /// registration call.
    fn materialize_lambda(&mut self, arg: &mut Expr, target: &LambdaListener) {
        let span = arg.span;
        let ExprKind::Lambda { parameters, body, listener } = &mut arg.kind else { return };
        if listener.is_some() {
            return;
        }
        let parameters = parameters
            .iter()
            .map(|p| Parameter {
                name: p.name.clone(),
                declared_type: if p.declared_type.is_empty() { target.event_type.clone() } else { p.declared_type.clone() },
            })
            .collect();
        let body = match body {
            LambdaBody::Block(b) => (**b).clone(),
            LambdaBody::Expr(e) => {
                let stmt = Stmt { id: self.fresh_id(), span: e.span, kind: StmtKind::Expression((**e).clone()) };
                Stmt { id: self.fresh_id(), span: e.span, kind: StmtKind::Block(vec![stmt]) }
            }
        };
        let display = self.anonymous_display(true);
        *listener = Some(Box::new(TypeDeclaration {
            name: display.clone(),
            qualified_name: self.qualify(&display),
            kind: TypeKind::Anonymous,
            extends_names: vec![],
            implements_names: vec![target.interface.clone()],
            fields: vec![],
            methods: vec![MethodDeclaration {
                name: target.method.clone(),
                parameters,
                return_type: "void".into(),
                body: Some(body),
                is_lambda: true,
                span,
            }],
            nested_types: vec![],
            span,
            from_lambda: true,
        }));
    }

    fn primary(&mut self) -> PResult<Expr> {
        let start = self.pos;
        let t = self.peek();
        let s = self.tok_text(t);
        match t.kind {
            TokenKind::Number => {
                self.bump();
                let lower = s.to_ascii_lowercase();
                let float = !lower.starts_with("0x")
                    && (lower.contains('.') || lower.contains('e') || lower.ends_with('f') || lower.ends_with('d'));
                let kind = if float { LiteralKind::Float } else { LiteralKind::Int };
                Ok(self.expr(start, ExprKind::Literal { kind, value: s.to_string() }))
            }
            TokenKind::Str => {
                self.bump();
                Ok(self.expr(start, ExprKind::Literal { kind: LiteralKind::String, value: s.to_string() }))
            }
            TokenKind::Char => {
                self.bump();
                Ok(self.expr(start, ExprKind::Literal { kind: LiteralKind::Char, value: s.to_string() }))
            }
            TokenKind::Punct => match s {
                "(" => {
                    self.bump();
                    let e = self.expression()?;
                    self.expect(")")?;
                    Ok(e)
                }
                "{" => self.array_initializer(start, String::new()),
                _ => {
                    self.error_here("expected an expression");
                    Err(Fail)
                }
            },
            TokenKind::Eof => {
                self.error_here("expected an expression");
                Err(Fail)
            }
            TokenKind::Ident => match s {
                "true" | "false" => {
                    self.bump();
                    Ok(self.expr(start, ExprKind::Literal { kind: LiteralKind::Boolean, value: s.to_string() }))
                }
                "null" => {
                    self.bump();
                    Ok(self.expr(start, ExprKind::Literal { kind: LiteralKind::Null, value: s.to_string() }))
                }
                "this" | "super" => {
                    self.bump();
                    if self.is("(") {
                        return self.call(start, None, s.to_string());
                    }
                    Ok(self.expr(start, ExprKind::Identifier(s.to_string())))
                }
                "new" => self.creation(start),
                "switch" => {
                    self.bump();
                    let (selector, cases) = self.switch_rest()?;
                    let stmt = self.stmt(start, StmtKind::Switch { selector, cases });
                    Ok(self.expr(start, ExprKind::SwitchExpr(Box::new(stmt))))
                }
                _ if PRIMITIVES.contains(&s) => {
                    // `int.class`, `int[].class`
                    let ty = self.parse_type()?;
                    if self.eat(".") && self.eat_ident("class") {
                        self.opaque_regions += 1;
                        let raw = self.raw_from(start);
                        return Ok(self.expr(start, ExprKind::Opaque(raw)));
                    }
                    self.error_here(&format!("unexpected type `{ty}` in expression"));
                    Err(Fail)
                }
                _ if is_keyword(s) => {
                    self.error_here("expected an expression");
                    Err(Fail)
                }
                _ => {
                    self.bump();
                    if self.is("(") {
                        return self.call(start, None, s.to_string());
                    }
                    Ok(self.expr(start, ExprKind::Identifier(s.to_string())))
                }
            },
        }
    }

    fn creation(&mut self, start: usize) -> PResult<Expr> {
        self.bump(); // new
        if self.is("<") && self.skip_type_args().is_err() {
            self.error_here("malformed type arguments");
            return Err(Fail);
        }
        // Annotations on the created type.
        while self.is("@") {
            self.bump();
            self.qualified_name()?;
            if self.is("(") {
                self.skip_balanced("(", ")")?;
            }
        }
        // Type name without dims; `<>` is allowed.
        let t = self.peek();
        if t.kind != TokenKind::Ident || (is_keyword(self.tok_text(t)) && !PRIMITIVES.contains(&self.tok_text(t))) {
            self.error_here("expected a type after `new`");
            return Err(Fail);
        }
        self.bump();
        let mut type_name = self.tok_text(t).to_string();
        loop {
            if self.is("<") {
                if self.is_at(1, ">") {
                    self.bump();
                    self.bump();
                } else if self.skip_type_args().is_err() {
                    self.error_here("malformed type arguments");
                    return Err(Fail);
                }
            }
            if self.is(".") && self.is_name_at(1) {
                self.bump();
                let t = self.bump();
                type_name.push('.');
                type_name.push_str(self.tok_text(t));
            } else {
                break;
            }
        }
        if self.is("[") {
            let mut elements = Vec::new();
            while self.eat("[") {
                type_name.push_str("[]");
                if !self.is("]") {
                    elements.push(self.expression()?);
                }
                self.expect("]")?;
            }
            if self.is("{") {
                let init = self.array_initializer(self.pos, type_name.clone())?;
                if let ExprKind::NewArray { elements: e, .. } = init.kind {
                    elements.extend(e);
                }
            }
            return Ok(self.expr(start, ExprKind::NewArray { type_name, elements }));
        }
        let args = self.arguments()?;
        let body = if self.is("{") { Some(Box::new(self.anonymous_body(start, type_name.clone())?)) } else { None };
        Ok(self.expr(start, ExprKind::New { type_name, args, body }))
    }

    fn postfix(&mut self, start: usize, mut e: Expr) -> PResult<Expr> {
        loop {
            if self.is(".") {
                self.bump();
                if self.is("<") && self.skip_type_args().is_err() {
                    self.error_here("malformed type arguments");
                    return Err(Fail);
                }
                if self.is_ident("new") {
                    // Qualified inner class creation `outer.new Inner()`.
                    let inner_start = self.pos;
                    let created = self.creation(inner_start)?;
                    e = Expr { span: self.span_from(start), ..created };
                    continue;
                }
                let t = self.peek();
                if t.kind != TokenKind::Ident {
                    self.error_here("expected a member name");
                    return Err(Fail);
                }
                self.bump();
                let name = self.tok_text(t).to_string();
                if self.is("(") {
                    e = self.call(start, Some(Box::new(e)), name)?;
                } else {
                    e = self.expr(start, ExprKind::FieldAccess { receiver: Box::new(e), name });
                }
            } else if self.is("[") {
                self.bump();
                let index = self.expression()?;
                self.expect("]")?;
                e = self.expr(start, ExprKind::ArrayAccess { array: Box::new(e), index: Box::new(index) });
            } else if self.is("++") || self.is("--") {
                let op_tok = self.bump();
                let op = self.tok_text(op_tok).to_string();
                e = self.expr(start, ExprKind::Unary { op, prefix: false, operand: Box::new(e) });
            } else if self.is("::") {
                self.bump();
                if !self.eat_ident("new") {
                    self.expect_name()?;
                }
                self.opaque_regions += 1;
                let raw = self.raw_from(start);
                e = self.expr(start, ExprKind::Opaque(raw));
            } else {
                return Ok(e);
            }
        }
    }
}

enum Member {
    Fields(Vec<FieldDeclaration>),
    Method(MethodDeclaration),
    Type(TypeDeclaration),
}
