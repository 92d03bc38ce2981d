//! Whole-unit traversal that enters anonymous classes, local classes and
//! lambda bodies, unlike [`Stmt::walk`] which stays within one method.

use super::ast::*;

pub trait Visit<'a> {
    fn visit_type(&mut self, _t: &'a TypeDeclaration) {}
    fn leave_type(&mut self, _t: &'a TypeDeclaration) {}
    fn visit_method(&mut self, _owner: &'a TypeDeclaration, _m: &'a MethodDeclaration) {}
    fn visit_stmt(&mut self, _s: &'a Stmt) {}
    fn visit_expr(&mut self, _e: &'a Expr) {}
}

pub fn walk_unit<'a, V: Visit<'a>>(unit: &'a CompilationUnit, v: &mut V) {
    for t in &unit.types {
        walk_type(t, v);
    }
}

pub fn walk_type<'a, V: Visit<'a>>(t: &'a TypeDeclaration, v: &mut V) {
    v.visit_type(t);
    for f in &t.fields {
        if let Some(init) = &f.initializer {
            walk_expr(init, v);
        }
    }
    for m in &t.methods {
        v.visit_method(t, m);
        if let Some(body) = &m.body {
            walk_stmt(body, v);
        }
    }
    for n in &t.nested_types {
        walk_type(n, v);
    }
    v.leave_type(t);
}

pub fn walk_stmt<'a, V: Visit<'a>>(s: &'a Stmt, v: &mut V) {
    v.visit_stmt(s);
    for e in s.expressions() {
        walk_expr(e, v);
    }
    if let StmtKind::LocalType(t) = &s.kind {
        walk_type(t, v);
    }
    for c in s.child_statements() {
        walk_stmt(c, v);
    }
}

pub fn walk_expr<'a, V: Visit<'a>>(e: &'a Expr, v: &mut V) {
    v.visit_expr(e);
    match &e.kind {
        ExprKind::New { args, body, .. } => {
            for a in args {
                walk_expr(a, v);
            }
            if let Some(t) = body {
                walk_type(t, v);
            }
        }
        // A materialized listener owns a copy of the lambda body; walk it once.
        ExprKind::Lambda { body, listener, .. } => match (listener, body) {
            (Some(t), _) => walk_type(t, v),
            (None, LambdaBody::Expr(b)) => walk_expr(b, v),
            (None, LambdaBody::Block(b)) => walk_stmt(b, v),
        },
        ExprKind::SwitchExpr(s) => walk_stmt(s, v),
        _ => {
            for c in e.children() {
                walk_expr(c, v);
            }
        }
    }
}

/// Every top-level, nested, local, anonymous and lambda-materialized type,
/// in document order.
pub fn all_types(unit: &CompilationUnit) -> Vec<&TypeDeclaration> {
    struct Collect<'a>(Vec<&'a TypeDeclaration>);
    impl<'a> Visit<'a> for Collect<'a> {
        fn visit_type(&mut self, t: &'a TypeDeclaration) {
            self.0.push(t);
        }
    }
    let mut c = Collect(Vec::new());
    walk_unit(unit, &mut c);
    c.0.sort_by_key(|t| t.span.start.offset);
    c.0
}

/// Number of `if` and `switch` nodes anywhere in the unit.
pub fn conditional_count(unit: &CompilationUnit) -> usize {
    struct Count(usize);
    impl<'a> Visit<'a> for Count {
        fn visit_stmt(&mut self, s: &'a Stmt) {
            if s.is_conditional() {
                self.0 += 1;
            }
        }
    }
    let mut c = Count(0);
    walk_unit(unit, &mut c);
    c.0
}
