//! Abstract syntax: source expressions, annotated expressions and plain
//! (ungraded) expressions, with erasure between them.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::hetero::KindedGrade;

pub type Name = Arc<str>;

pub fn name(s: &str) -> Name {
    Arc::from(s)
}

/// A source position. Positions never affect equality, so ASTs compare
/// structurally.
#[derive(Clone, Copy, Debug, Default, Hash)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

impl PartialEq for Span {
    fn eq(&self, _: &Span) -> bool {
        true
    }
}

impl Eq for Span {}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// `C^r`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GradedType {
    pub class: Name,
    pub grade: KindedGrade,
}

impl GradedType {
    pub fn new(class: &str, grade: KindedGrade) -> Self {
        GradedType { class: name(class), grade }
    }
}

impl fmt::Display for GradedType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.class, self.grade)
    }
}

/// A constructor or method argument with an optional explicit annotation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arg {
    pub expr: Expr,
    pub annotation: Option<KindedGrade>,
}

impl Arg {
    pub fn plain(expr: Expr) -> Self {
        Arg {
            expr,
            annotation: None,
        }
    }
}

/// Source expression.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExprKind {
    Var(Name),
    Field {
        recv: Box<Expr>,
        ascription: Option<KindedGrade>,
        field: Name,
    },
    New {
        class: Name,
        args: Vec<Arg>,
    },
    Invk {
        recv: Box<Expr>,
        ascription: Option<KindedGrade>,
        method: Name,
        args: Vec<Arg>,
    },
    Block {
        decl: GradedType,
        var: Name,
        init: Box<Expr>,
        body: Box<Expr>,
    },
}

impl Expr {
    pub fn new(kind: ExprKind, span: Span) -> Self {
        Expr { kind, span }
    }

    pub fn var(x: &str) -> Self {
        Expr::new(ExprKind::Var(name(x)), Span::default())
    }

    /// Free variables, including `this`.
    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.strip().collect_free(&mut Vec::new(), &mut out);
        out
    }

    /// Drops grades, ascriptions and annotations.
    pub fn strip(&self) -> FjExpr {
        match &self.kind {
            ExprKind::Var(x) => FjExpr::Var(x.clone()),
            ExprKind::Field { recv, field, .. } => FjExpr::Field(Box::new(recv.strip()), field.clone()),
            ExprKind::New { class, args } => {
                FjExpr::New(class.clone(), args.iter().map(|a| a.expr.strip()).collect())
            }
            ExprKind::Invk {
                recv, method, args, ..
            } => FjExpr::Invk(
                Box::new(recv.strip()),
                method.clone(),
                args.iter().map(|a| a.expr.strip()).collect(),
            ),
            ExprKind::Block {
                decl,
                var,
                init,
                body,
            } => FjExpr::Block {
                class: decl.class.clone(),
                var: var.clone(),
                init: Box::new(init.strip()),
                body: Box::new(body.strip()),
            },
        }
    }

    /// Renames free occurrences of `from` to `to` (capture is not checked;
    /// callers pick fresh names).
    pub fn rename(&self, from: &str, to: &Name) -> Expr {
        let kind = match &self.kind {
            ExprKind::Var(x) if &**x == from => ExprKind::Var(to.clone()),
            ExprKind::Var(x) => ExprKind::Var(x.clone()),
            ExprKind::Field {
                recv,
                ascription,
                field,
            } => ExprKind::Field {
                recv: Box::new(recv.rename(from, to)),
                ascription: ascription.clone(),
                field: field.clone(),
            },
            ExprKind::New { class, args } => ExprKind::New {
                class: class.clone(),
                args: rename_args(args, from, to),
            },
            ExprKind::Invk {
                recv,
                ascription,
                method,
                args,
            } => ExprKind::Invk {
                recv: Box::new(recv.rename(from, to)),
                ascription: ascription.clone(),
                method: method.clone(),
                args: rename_args(args, from, to),
            },
            ExprKind::Block {
                decl,
                var,
                init,
                body,
            } => ExprKind::Block {
                decl: decl.clone(),
                var: var.clone(),
                init: Box::new(init.rename(from, to)),
                body: Box::new(if &**var == from {
                    (**body).clone()
                } else {
                    body.rename(from, to)
                }),
            },
        };
        Expr::new(kind, self.span)
    }
}

fn rename_args(args: &[Arg], from: &str, to: &Name) -> Vec<Arg> {
    args.iter()
        .map(|a| Arg {
            expr: a.expr.rename(from, to),
            annotation: a.annotation.clone(),
        })
        .collect()
}

/// Annotated expression: every reducible subposition carries the grade at
/// which it is reduced.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum AnnExpr {
    Var(Name),
    Field {
        recv: Box<AnnExpr>,
        grade: KindedGrade,
        field: Name,
    },
    New {
        class: Name,
        args: Vec<(AnnExpr, KindedGrade)>,
    },
    Invk {
        recv: Box<AnnExpr>,
        grade: KindedGrade,
        method: Name,
        args: Vec<(AnnExpr, KindedGrade)>,
    },
    Block {
        class: Name,
        var: Name,
        init: Box<AnnExpr>,
        grade: KindedGrade,
        body: Box<AnnExpr>,
    },
}

impl AnnExpr {
    /// `new C(v1^r1, …)` with value arguments.
    pub fn is_value(&self) -> bool {
        match self {
            AnnExpr::New { args, .. } => args.iter().all(|(a, _)| a.is_value()),
            _ => false,
        }
    }

    pub fn erase(&self) -> FjExpr {
        match self {
            AnnExpr::Var(x) => FjExpr::Var(x.clone()),
            AnnExpr::Field { recv, field, .. } => FjExpr::Field(Box::new(recv.erase()), field.clone()),
            AnnExpr::New { class, args } => {
                FjExpr::New(class.clone(), args.iter().map(|(a, _)| a.erase()).collect())
            }
            AnnExpr::Invk {
                recv, method, args, ..
            } => FjExpr::Invk(
                Box::new(recv.erase()),
                method.clone(),
                args.iter().map(|(a, _)| a.erase()).collect(),
            ),
            AnnExpr::Block {
                class,
                var,
                init,
                body,
                ..
            } => FjExpr::Block {
                class: class.clone(),
                var: var.clone(),
                init: Box::new(init.erase()),
                body: Box::new(body.erase()),
            },
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        self.erase().free_vars()
    }

    /// Simultaneous renaming of free variables, respecting block scopes.
    pub fn subst(&self, map: &HashMap<Name, Name>) -> AnnExpr {
        if map.is_empty() {
            return self.clone();
        }
        match self {
            AnnExpr::Var(x) => AnnExpr::Var(map.get(x).cloned().unwrap_or_else(|| x.clone())),
            AnnExpr::Field { recv, grade, field } => AnnExpr::Field {
                recv: Box::new(recv.subst(map)),
                grade: grade.clone(),
                field: field.clone(),
            },
            AnnExpr::New { class, args } => AnnExpr::New {
                class: class.clone(),
                args: args.iter().map(|(a, g)| (a.subst(map), g.clone())).collect(),
            },
            AnnExpr::Invk {
                recv,
                grade,
                method,
                args,
            } => AnnExpr::Invk {
                recv: Box::new(recv.subst(map)),
                grade: grade.clone(),
                method: method.clone(),
                args: args.iter().map(|(a, g)| (a.subst(map), g.clone())).collect(),
            },
            AnnExpr::Block {
                class,
                var,
                init,
                grade,
                body,
            } => {
                let body = if map.contains_key(var) {
                    let mut inner = map.clone();
                    inner.remove(var);
                    body.subst(&inner)
                } else {
                    body.subst(map)
                };
                AnnExpr::Block {
                    class: class.clone(),
                    var: var.clone(),
                    init: Box::new(init.subst(map)),
                    grade: grade.clone(),
                    body: Box::new(body),
                }
            }
        }
    }

    /// Class of a value.
    pub fn value_class(&self) -> Option<&Name> {
        match self {
            AnnExpr::New { class, .. } if self.is_value() => Some(class),
            _ => None,
        }
    }

    /// Number of nodes, used to bound searches.
    pub fn size(&self) -> usize {
        match self {
            AnnExpr::Var(_) => 1,
            AnnExpr::Field { recv, .. } => 1 + recv.size(),
            AnnExpr::New { args, .. } => 1 + args.iter().map(|(a, _)| a.size()).sum::<usize>(),
            AnnExpr::Invk { recv, args, .. } => {
                1 + recv.size() + args.iter().map(|(a, _)| a.size()).sum::<usize>()
            }
            AnnExpr::Block { init, body, .. } => 1 + init.size() + body.size(),
        }
    }
}

/// Plain expression of the ungraded calculus.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FjExpr {
    Var(Name),
    Field(Box<FjExpr>, Name),
    New(Name, Vec<FjExpr>),
    Invk(Box<FjExpr>, Name, Vec<FjExpr>),
    Block {
        class: Name,
        var: Name,
        init: Box<FjExpr>,
        body: Box<FjExpr>,
    },
}

impl FjExpr {
    pub fn is_value(&self) -> bool {
        match self {
            FjExpr::New(_, args) => args.iter().all(FjExpr::is_value),
            _ => false,
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        match self {
            FjExpr::Var(x) => {
                if !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
            FjExpr::Field(r, _) => r.collect_free(bound, out),
            FjExpr::New(_, args) => args.iter().for_each(|a| a.collect_free(bound, out)),
            FjExpr::Invk(r, _, args) => {
                r.collect_free(bound, out);
                args.iter().for_each(|a| a.collect_free(bound, out));
            }
            FjExpr::Block { var, init, body, .. } => {
                init.collect_free(bound, out);
                bound.push(var.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn subst(&self, map: &HashMap<Name, Name>) -> FjExpr {
        if map.is_empty() {
            return self.clone();
        }
        match self {
            FjExpr::Var(x) => FjExpr::Var(map.get(x).cloned().unwrap_or_else(|| x.clone())),
            FjExpr::Field(r, f) => FjExpr::Field(Box::new(r.subst(map)), f.clone()),
            FjExpr::New(c, args) => FjExpr::New(c.clone(), args.iter().map(|a| a.subst(map)).collect()),
            FjExpr::Invk(r, m, args) => FjExpr::Invk(
                Box::new(r.subst(map)),
                m.clone(),
                args.iter().map(|a| a.subst(map)).collect(),
            ),
            FjExpr::Block {
                class,
                var,
                init,
                body,
            } => {
                let body = if map.contains_key(var) {
                    let mut inner = map.clone();
                    inner.remove(var);
                    body.subst(&inner)
                } else {
                    body.subst(map)
                };
                FjExpr::Block {
                    class: class.clone(),
                    var: var.clone(),
                    init: Box::new(init.subst(map)),
                    body: Box::new(body),
                }
            }
        }
    }
}
