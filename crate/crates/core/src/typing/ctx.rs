//! Coeffect contexts, type environments and diagnostics.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::hetero::{GradeUniverse, HeteroError, KindedGrade};
use crate::lang::{Name, Span, TableError};

/// `x1:C1^r1, …`; absent variables are graded `0`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CoeffectCtx {
    bindings: BTreeMap<Name, (Name, KindedGrade)>,
}

impl CoeffectCtx {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(x: Name, class: Name, grade: KindedGrade) -> Self {
        let mut c = Self::new();
        c.bindings.insert(x, (class, grade));
        c
    }

    pub fn get(&self, x: &str) -> Option<&(Name, KindedGrade)> {
        self.bindings.get(x)
    }

    pub fn grade(&self, x: &str) -> Option<&KindedGrade> {
        self.bindings.get(x).map(|(_, g)| g)
    }

    pub fn insert(&mut self, x: Name, class: Name, grade: KindedGrade) {
        self.bindings.insert(x, (class, grade));
    }

    pub fn remove(&mut self, x: &str) -> Option<(Name, KindedGrade)> {
        self.bindings.remove(x)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &Name, &KindedGrade)> {
        self.bindings.iter().map(|(x, (c, g))| (x, c, g))
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }
}

impl fmt::Display for CoeffectCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (x, (c, g))) in self.bindings.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x}:{c}[{g}]")?;
        }
        f.write_str("}")
    }
}

/// `Γ1 ⪯ Γ2`: every variable of `Γ1` is in `Γ2` with the same class and a
/// smaller grade.
pub fn ctx_leq(u: &GradeUniverse, a: &CoeffectCtx, b: &CoeffectCtx) -> Result<bool, HeteroError> {
    for (x, (c, g)) in &a.bindings {
        match b.bindings.get(x) {
            Some((c2, g2)) if c == c2 => {
                if !u.leq(g, g2)? {
                    return Ok(false);
                }
            }
            _ => return Ok(false),
        }
    }
    Ok(true)
}

/// Pointwise sum; partial when a shared variable has two classes.
pub fn ctx_add(u: &GradeUniverse, a: &CoeffectCtx, b: &CoeffectCtx) -> Result<CoeffectCtx, TypeErrorKind> {
    let mut out = a.clone();
    for (x, (c, g)) in &b.bindings {
        match out.bindings.get_mut(x) {
            Some((c1, g1)) => {
                if c1 != c {
                    return Err(TypeErrorKind::TypeMismatch {
                        var: x.clone(),
                        left: c1.clone(),
                        right: c.clone(),
                    });
                }
                *g1 = u.add(g1, g)?;
            }
            None => {
                out.bindings.insert(x.clone(), (c.clone(), g.clone()));
            }
        }
    }
    Ok(out)
}

/// `r · Γ`.
pub fn ctx_scale(u: &GradeUniverse, r: &KindedGrade, ctx: &CoeffectCtx) -> Result<CoeffectCtx, HeteroError> {
    let mut out = CoeffectCtx::new();
    for (x, (c, g)) in &ctx.bindings {
        out.bindings.insert(x.clone(), (c.clone(), u.mul(r, g)?));
    }
    Ok(out)
}

/// Classes of the variables in scope. A variable may also carry the grade
/// it is available at, which only guides the choice of a nonzero
/// consumption when the expected grade is `0`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TypeEnv {
    vars: BTreeMap<Name, (Name, Option<KindedGrade>)>,
}

impl TypeEnv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, x: Name, class: Name) -> Self {
        self.vars.insert(x, (class, None));
        self
    }

    pub fn with_budget(mut self, x: Name, class: Name, budget: KindedGrade) -> Self {
        self.vars.insert(x, (class, Some(budget)));
        self
    }

    pub fn class_of(&self, x: &str) -> Option<&Name> {
        self.vars.get(x).map(|(c, _)| c)
    }

    pub fn budget(&self, x: &str) -> Option<&KindedGrade> {
        self.vars.get(x).and_then(|(_, b)| b.as_ref())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &Name)> {
        self.vars.iter().map(|(x, (c, _))| (x, c))
    }
}

/// Typing rule a diagnostic is attributed to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Rule {
    #[serde(rename = "t-var")]
    TVar,
    #[serde(rename = "t-field-access")]
    TFieldAccess,
    #[serde(rename = "t-new")]
    TNew,
    #[serde(rename = "t-invk")]
    TInvk,
    #[serde(rename = "t-block")]
    TBlock,
    #[serde(rename = "t-sub")]
    TSub,
    #[serde(rename = "t-meth")]
    TMeth,
    #[serde(rename = "t-env")]
    TEnv,
    #[serde(rename = "t-conf")]
    TConf,
    #[serde(rename = "class-table")]
    Table,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("rule names serialize");
        f.write_str(s.as_str().expect("string"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeErrorKind {
    #[error("unknown variable `{0}`")]
    UnknownVariable(Name),
    #[error("`{var}` is declared with a zero grade {declared} but used at {used}")]
    DiscardedVariable {
        var: Name,
        declared: KindedGrade,
        used: KindedGrade,
    },
    #[error("`{var}` is used at {used}, which exceeds its grade {declared}")]
    UsageExceedsGrade {
        var: Name,
        declared: KindedGrade,
        used: KindedGrade,
    },
    #[error("expected grade {expected} but the expression only provides {best}")]
    GradeTooDemanding {
        expected: KindedGrade,
        best: KindedGrade,
    },
    #[error("class `{found}` is not a subclass of `{expected}`")]
    NotASubclass { found: Name, expected: Name },
    #[error("`{var}` has class `{left}` in one subterm and `{right}` in another")]
    TypeMismatch { var: Name, left: Name, right: Name },
    #[error("{what} expects {expected} arguments, found {found}")]
    ArityMismatch {
        what: String,
        expected: usize,
        found: usize,
    },
    #[error("field `{field}` (grade {field_grade}) cannot provide {expected} from a receiver graded {receiver}; add a receiver ascription")]
    AscriptionNeeded {
        field: Name,
        field_grade: KindedGrade,
        receiver: KindedGrade,
        expected: KindedGrade,
    },
    #[error("annotation {found} disagrees with the declared grade {expected}")]
    AnnotationMismatch {
        expected: KindedGrade,
        found: KindedGrade,
    },
    #[error("stored value for `{0}` is not closed")]
    OpenValue(Name),
    #[error("stored value for `{0}` is not a value")]
    NotAValue(Name),
    #[error("class `{0}` is declared more than once")]
    DuplicateClass(Name),
    #[error("class `{0}` is built in")]
    ReservedClass(Name),
    #[error("class `{class}` declares `{member}` more than once (including inherited fields)")]
    DuplicateMember { class: Name, member: Name },
    #[error("parameter `{param}` of `{method}` is repeated or named `this`")]
    BadParameter { method: Name, param: Name },
    #[error("`{class}.{method}` overrides with a different signature: {detail}")]
    OverrideMismatch {
        class: Name,
        method: Name,
        detail: String,
    },
    #[error(transparent)]
    Table(#[from] TableError),
    #[error(transparent)]
    Grade(#[from] HeteroError),
}

/// A positioned type error attributed to a rule.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{span}: [{rule}] {kind}")]
pub struct Diagnostic {
    pub span: Span,
    pub rule: Rule,
    pub kind: TypeErrorKind,
}

impl Diagnostic {
    pub fn new(span: Span, rule: Rule, kind: impl Into<TypeErrorKind>) -> Self {
        Diagnostic {
            span,
            rule,
            kind: kind.into(),
        }
    }

    /// Short machine-readable name of the error kind.
    pub fn code(&self) -> &'static str {
        match &self.kind {
            TypeErrorKind::UnknownVariable(_) => "UnknownVariable",
            TypeErrorKind::DiscardedVariable { .. } => "DiscardedVariable",
            TypeErrorKind::UsageExceedsGrade { .. } => "UsageExceedsGrade",
            TypeErrorKind::GradeTooDemanding { .. } => "GradeTooDemanding",
            TypeErrorKind::NotASubclass { .. } => "NotASubclass",
            TypeErrorKind::TypeMismatch { .. } => "TypeMismatch",
            TypeErrorKind::ArityMismatch { .. } => "ArityMismatch",
            TypeErrorKind::AscriptionNeeded { .. } => "AscriptionNeeded",
            TypeErrorKind::AnnotationMismatch { .. } => "AnnotationMismatch",
            TypeErrorKind::OpenValue(_) => "OpenValue",
            TypeErrorKind::NotAValue(_) => "NotAValue",
            TypeErrorKind::DuplicateClass(_) => "DuplicateClass",
            TypeErrorKind::ReservedClass(_) => "ReservedClass",
            TypeErrorKind::DuplicateMember { .. } => "DuplicateMember",
            TypeErrorKind::BadParameter { .. } => "BadParameter",
            TypeErrorKind::OverrideMismatch { .. } => "OverrideMismatch",
            TypeErrorKind::Table(TableError::UnknownClass(_)) => "UnknownClass",
            TypeErrorKind::Table(TableError::UnknownMember { .. }) => "UnknownMember",
            TypeErrorKind::Table(TableError::Cyclic(_)) => "CyclicInheritance",
            TypeErrorKind::Grade(_) => "GradeError",
        }
    }
}

#[derive(Serialize)]
struct DiagnosticJson<'a> {
    line: u32,
    col: u32,
    rule: Rule,
    code: &'a str,
    message: String,
}

impl Serialize for Diagnostic {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        DiagnosticJson {
            line: self.span.line,
            col: self.span.col,
            rule: self.rule,
            code: self.code(),
            message: self.kind.to_string(),
        }
        .serialize(s)
    }
}
