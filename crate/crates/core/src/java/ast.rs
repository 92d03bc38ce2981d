//! Java syntax tree. Covers the subset the detection pipeline reads; every
//! other construct is kept as an opaque node with its raw text.

use std::path::PathBuf;

use crate::span::Span;

/// Identifier of a statement or expression, unique within a [`CompilationUnit`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub u32);

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub span: Span,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Import {
    pub name: String,
    pub wildcard: bool,
    pub is_static: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompilationUnit {
    pub file: PathBuf,
    pub package_name: Option<String>,
    pub imports: Vec<Import>,
    pub types: Vec<TypeDeclaration>,
    pub parse_diagnostics: Vec<Diagnostic>,
    /// Count of opaque nodes and skipped token regions produced during recovery
    /// or for unsupported constructs.
    pub opaque_regions: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TypeKind {
    Class,
    Interface,
    Enum,
    Anonymous,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TypeDeclaration {
    pub name: String,
    pub qualified_name: String,
    pub kind: TypeKind,
    pub extends_names: Vec<String>,
    pub implements_names: Vec<String>,
    pub fields: Vec<FieldDeclaration>,
    pub methods: Vec<MethodDeclaration>,
    pub nested_types: Vec<TypeDeclaration>,
    pub span: Span,
    /// Set when the type was synthesized from a lambda listener.
    pub from_lambda: bool,
}

impl TypeDeclaration {
    pub fn supertype_names(&self) -> impl Iterator<Item = &str> {
        self.extends_names.iter().chain(&self.implements_names).map(String::as_str)
    }

    pub fn field(&self, name: &str) -> Option<&FieldDeclaration> {
        self.fields.iter().find(|f| f.name == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldDeclaration {
    pub name: String,
    pub declared_type: String,
    pub initializer: Option<Expr>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Parameter {
    pub name: String,
    pub declared_type: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodDeclaration {
    pub name: String,
    pub parameters: Vec<Parameter>,
    /// Empty for constructors and initializer blocks.
    pub return_type: String,
    pub body: Option<Stmt>,
    pub is_lambda: bool,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stmt {
    pub id: NodeId,
    pub span: Span,
    pub kind: StmtKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoopKind {
    While,
    DoWhile,
    For,
    ForEach,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwitchCase {
    /// Label expressions; empty for `default`.
    pub labels: Vec<Expr>,
    pub is_default: bool,
    pub body: Vec<Stmt>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatchClause {
    pub parameter: Parameter,
    pub body: Box<Stmt>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StmtKind {
    Block(Vec<Stmt>),
    If { condition: Expr, then_branch: Box<Stmt>, else_branch: Option<Box<Stmt>> },
    Switch { selector: Expr, cases: Vec<SwitchCase> },
    Loop { kind: LoopKind, condition: Option<Expr>, body: Box<Stmt> },
    Return(Option<Expr>),
    Expression(Expr),
    LocalVarDecl { name: String, declared_type: String, initializer: Option<Expr> },
    Try { resources: Vec<Stmt>, body: Box<Stmt>, catches: Vec<CatchClause>, finally: Option<Box<Stmt>> },
    Break(Option<String>),
    Continue(Option<String>),
    Throw(Expr),
    Labeled { label: String, body: Box<Stmt> },
    LocalType(Box<TypeDeclaration>),
    Opaque(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    pub id: NodeId,
    pub span: Span,
    pub kind: ExprKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LiteralKind {
    String,
    Char,
    Int,
    Float,
    Boolean,
    Null,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LambdaBody {
    Expr(Box<Expr>),
    Block(Box<Stmt>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Identifier(String),
    FieldAccess {
        receiver: Box<Expr>,
        name: String,
    },
    MethodCall {
        receiver: Option<Box<Expr>>,
        name: String,
        args: Vec<Expr>,
    },
    InstanceOf {
        operand: Box<Expr>,
        type_name: String,
        binding: Option<String>,
    },
    Binary {
        op: String,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Unary {
        op: String,
        prefix: bool,
        operand: Box<Expr>,
    },
    Literal {
        kind: LiteralKind,
        value: String,
    },
    Cast {
        type_name: String,
        operand: Box<Expr>,
    },
    Conditional {
        condition: Box<Expr>,
        then_expr: Box<Expr>,
        else_expr: Box<Expr>,
    },
    Assignment {
        op: String,
        target: Box<Expr>,
        value: Box<Expr>,
    },
    ArrayAccess {
        array: Box<Expr>,
        index: Box<Expr>,
    },
    /// `new T(args)`, optionally with an anonymous class body.
    New {
        type_name: String,
        args: Vec<Expr>,
        body: Option<Box<TypeDeclaration>>,
    },
    /// `new T[n]` / `new T[]{...}` / bare `{...}` initializers.
    NewArray {
        type_name: String,
        elements: Vec<Expr>,
    },
    Lambda {
        parameters: Vec<Parameter>,
        body: LambdaBody,
        listener: Option<Box<TypeDeclaration>>,
    },
    /// A `switch` used as an expression; holds a `StmtKind::Switch` node.
    SwitchExpr(Box<Stmt>),
    Opaque(String),
}

impl Expr {
    /// Direct sub-expressions, in source order. Does not descend into
    /// anonymous class bodies or lambda block bodies.
    pub fn children(&self) -> Vec<&Expr> {
        match &self.kind {
            ExprKind::Identifier(_) | ExprKind::Literal { .. } | ExprKind::Opaque(_) => vec![],
            ExprKind::FieldAccess { receiver, .. } => vec![receiver],
            ExprKind::MethodCall { receiver, args, .. } => receiver.iter().map(|r| &**r).chain(args.iter()).collect(),
            ExprKind::InstanceOf { operand, .. } => vec![operand],
            ExprKind::Binary { lhs, rhs, .. } => vec![lhs, rhs],
            ExprKind::Unary { operand, .. } => vec![operand],
            ExprKind::Cast { operand, .. } => vec![operand],
            ExprKind::Conditional { condition, then_expr, else_expr } => {
                vec![condition, then_expr, else_expr]
            }
            ExprKind::Assignment { target, value, .. } => vec![target, value],
            ExprKind::ArrayAccess { array, index } => vec![array, index],
            ExprKind::New { args, .. } => args.iter().collect(),
            ExprKind::NewArray { elements, .. } => elements.iter().collect(),
            ExprKind::Lambda { body, .. } => match body {
                LambdaBody::Expr(e) => vec![e],
                LambdaBody::Block(_) => vec![],
            },
            ExprKind::SwitchExpr(s) => s.expressions(),
        }
    }

    /// `Identifier` name, or `this.name` field access.
    pub fn simple_name(&self) -> Option<&str> {
        match &self.kind {
            ExprKind::Identifier(n) => Some(n),
            ExprKind::FieldAccess { receiver, name } => match &receiver.kind {
                ExprKind::Identifier(r) if r == "this" => Some(name),
                _ => None,
            },
            _ => None,
        }
    }

    pub fn is_literal(&self) -> bool {
        matches!(self.kind, ExprKind::Literal { .. })
    }
}

impl Stmt {
    /// Direct child statements, in source order.
    pub fn child_statements(&self) -> Vec<&Stmt> {
        match &self.kind {
            StmtKind::Block(stmts) => stmts.iter().collect(),
            StmtKind::If { then_branch, else_branch, .. } => std::iter::once(&**then_branch).chain(else_branch.as_deref()).collect(),
            StmtKind::Switch { cases, .. } => cases.iter().flat_map(|c| c.body.iter()).collect(),
            StmtKind::Loop { body, .. } => vec![body],
            StmtKind::Try { resources, body, catches, finally } => {
                resources.iter().chain(std::iter::once(&**body)).chain(catches.iter().map(|c| &*c.body)).chain(finally.as_deref()).collect()
            }
            StmtKind::Labeled { body, .. } => vec![body],
            _ => vec![],
        }
    }

    /// Expressions owned directly by this statement (not by child statements).
    pub fn expressions(&self) -> Vec<&Expr> {
        match &self.kind {
            StmtKind::If { condition, .. } => vec![condition],
            StmtKind::Switch { selector, cases } => std::iter::once(selector).chain(cases.iter().flat_map(|c| c.labels.iter())).collect(),
            StmtKind::Loop { condition, .. } => condition.iter().collect(),
            StmtKind::Return(e) => e.iter().collect(),
            StmtKind::Expression(e) | StmtKind::Throw(e) => vec![e],
            StmtKind::LocalVarDecl { initializer, .. } => initializer.iter().collect(),
            _ => vec![],
        }
    }

    pub fn is_conditional(&self) -> bool {
        matches!(self.kind, StmtKind::If { .. } | StmtKind::Switch { .. })
    }

    /// Pre-order walk over this statement and all nested statements of the
    /// same method. Lambda bodies and class bodies are separate code units and
    /// are not entered.
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a Stmt)) {
        f(self);
        for c in self.child_statements() {
            c.walk(f);
        }
    }
}

/// Calls `f` on every expression in `e`'s tree, pre-order.
pub fn walk_expr<'a>(e: &'a Expr, f: &mut dyn FnMut(&'a Expr)) {
    f(e);
    for c in e.children() {
        walk_expr(c, f);
    }
}

impl MethodDeclaration {
    /// All statements of the body in document order (pre-order).
    pub fn statements(&self) -> Vec<&Stmt> {
        let mut out = Vec::new();
        if let Some(body) = &self.body {
            body.walk(&mut |s| out.push(s));
        }
        out
    }
}
