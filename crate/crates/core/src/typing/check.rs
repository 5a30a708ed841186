//! Algorithmic graded checking with elaboration, and the checker for
//! annotated expressions.
//!
//! Both work in checking mode: the expected graded type flows down and the
//! least coeffect context flows up. Subsumption is folded into each rule.

use super::ctx::{ctx_add, ctx_leq, CoeffectCtx, Diagnostic, Rule, TypeEnv, TypeErrorKind};
use crate::hetero::{GradeUniverse, HeteroError, KindedGrade};
use crate::lang::{
    gtype_leq, name, AnnExpr, ClassTable, Expr, ExprKind, GradedType, GtypeError, Name, Span,
    TableError,
};

/// `Δ ⊢ e : T ⇝ e′`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypingResult {
    pub ctx: CoeffectCtx,
    pub elaborated: AnnExpr,
}

type Checked<T> = Result<T, Diagnostic>;

fn err(span: Span, rule: Rule, kind: impl Into<TypeErrorKind>) -> Diagnostic {
    Diagnostic::new(span, rule, kind)
}

fn grade_err(span: Span, rule: Rule) -> impl Fn(HeteroError) -> Diagnostic {
    move |e| err(span, rule, e)
}

fn table_err(span: Span, rule: Rule) -> impl Fn(TableError) -> Diagnostic {
    move |e| err(span, rule, e)
}

/// Whether `g` is the zero of its own kind.
pub fn is_kind_zero(u: &GradeUniverse, g: &KindedGrade) -> Result<bool, HeteroError> {
    Ok(u.algebra(&g.kind)?.zero() == g.value)
}

/// The nonzero amount a use demanded at the zero `demand` consumes.
///
/// Candidates are the unit, when `demand ⪯ 1`, then the minimal nonzero
/// elements above `demand` in its own kind (or that kind's unit when the
/// carrier is infinite). The first candidate within `budget` wins; failing
/// that the whole budget is used if it is nonzero and covers the demand.
pub fn zero_use_consumption(
    u: &GradeUniverse,
    demand: &KindedGrade,
    budget: Option<&KindedGrade>,
) -> Result<Option<KindedGrade>, HeteroError> {
    let mut candidates = Vec::new();
    let one = u.one();
    if u.leq(demand, &one)? {
        candidates.push(one);
    }
    match u.kind_elements(&demand.kind)? {
        Some(elems) => {
            let mut above = Vec::new();
            for g in elems {
                if !is_kind_zero(u, &g)? && u.leq(demand, &g)? {
                    above.push(g);
                }
            }
            for g in &above {
                let mut minimal = true;
                for o in &above {
                    if o != g && u.leq(o, g)? {
                        minimal = false;
                    }
                }
                if minimal {
                    candidates.push(g.clone());
                }
            }
        }
        None => {
            let alg = u.algebra(&demand.kind)?;
            candidates.push(KindedGrade::new(demand.kind.clone(), alg.one()));
        }
    }
    let Some(b) = budget else {
        return Ok(candidates.into_iter().next());
    };
    for c in candidates {
        if u.leq(&c, b)? {
            return Ok(Some(c));
        }
    }
    if !is_kind_zero(u, b)? && u.leq(demand, b)? {
        return Ok(Some(b.clone()));
    }
    Ok(None)
}

/// Checks `C ≤ D` for an expression's class against the expected one.
fn subclass(table: &ClassTable, span: Span, found: &Name, expected: &Name) -> Checked<()> {
    match table.is_subclass(found, expected) {
        Ok(true) => Ok(()),
        Ok(false) => Err(err(
            span,
            Rule::TSub,
            TypeErrorKind::NotASubclass {
                found: found.clone(),
                expected: expected.clone(),
            },
        )),
        Err(e) => Err(err(span, Rule::TSub, e)),
    }
}

fn check_known_class(table: &ClassTable, span: Span, rule: Rule, c: &Name) -> Checked<()> {
    if table.has_class(c) {
        table.ancestry(c).map_err(table_err(span, rule))?;
        Ok(())
    } else {
        Err(err(span, rule, TableError::UnknownClass(c.clone())))
    }
}

/// Consumption for a variable occurrence checked at `expected`.
fn var_ctx(
    u: &GradeUniverse,
    table: &ClassTable,
    env: &TypeEnv,
    span: Span,
    x: &Name,
    expected: &GradedType,
) -> Checked<CoeffectCtx> {
    let class = env
        .class_of(x)
        .ok_or_else(|| err(span, Rule::TVar, TypeErrorKind::UnknownVariable(x.clone())))?;
    subclass(table, span, class, &expected.class)?;
    let g = &expected.grade;
    let used = if !is_kind_zero(u, g).map_err(grade_err(span, Rule::TVar))? {
        g.clone()
    } else {
        let budget = env.budget(x);
        zero_use_consumption(u, g, budget)
            .map_err(grade_err(span, Rule::TVar))?
            .ok_or_else(|| {
                err(
                    span,
                    Rule::TVar,
                    TypeErrorKind::DiscardedVariable {
                        var: x.clone(),
                        declared: budget.cloned().unwrap_or_else(|| u.zero()),
                        used: u.one(),
                    },
                )
            })?
    };
    Ok(CoeffectCtx::single(x.clone(), class.clone(), used))
}

/// The class a source expression produces, ignoring grades.
pub fn class_of(u: &GradeUniverse, table: &ClassTable, env: &TypeEnv, e: &Expr) -> Checked<Name> {
    let span = e.span;
    match &e.kind {
        ExprKind::Var(x) => env
            .class_of(x)
            .cloned()
            .ok_or_else(|| err(span, Rule::TVar, TypeErrorKind::UnknownVariable(x.clone()))),
        ExprKind::Field { recv, field, .. } => {
            let c = class_of(u, table, env, recv)?;
            let fields = table.fields(&c).map_err(table_err(span, Rule::TFieldAccess))?;
            fields
                .iter()
                .find(|f| &f.name == field)
                .map(|f| f.ty.class.clone())
                .ok_or_else(|| {
                    err(
                        span,
                        Rule::TFieldAccess,
                        TableError::UnknownMember {
                            class: c,
                            member: field.clone(),
                        },
                    )
                })
        }
        ExprKind::New { class, .. } => {
            check_known_class(table, span, Rule::TNew, class)?;
            Ok(class.clone())
        }
        ExprKind::Invk { recv, method, .. } => {
            let c = class_of(u, table, env, recv)?;
            let mt = table.mtype(&c, method).map_err(table_err(span, Rule::TInvk))?;
            Ok(mt.ret.class)
        }
        ExprKind::Block { decl, var, body, .. } => {
            let inner = env.clone().with(var.clone(), decl.class.clone());
            class_of(u, table, &inner, body)
        }
    }
}

/// Largest natural tried as a receiver grade.
const RECEIVER_NAT_BOUND: u64 = 8;

/// Receiver grades tried for an unascribed field access: the minimal `q`
/// with `expected ⪯ q · field_grade` among the expected grade, the naturals
/// from 1 and the elements of the finite kinds involved.
fn receiver_grades(
    u: &GradeUniverse,
    expected: &KindedGrade,
    field_grade: &KindedGrade,
) -> Result<Vec<KindedGrade>, HeteroError> {
    let mut pool = vec![expected.clone()];
    pool.extend((1..=RECEIVER_NAT_BOUND).map(KindedGrade::nat));
    for k in [&expected.kind, &field_grade.kind] {
        pool.extend(u.kind_elements(k)?.unwrap_or_default());
    }
    let mut fits: Vec<KindedGrade> = Vec::new();
    for q in pool {
        if !fits.contains(&q) && u.leq(expected, &u.mul(&q, field_grade)?)? {
            fits.push(q);
        }
    }
    let mut out = Vec::new();
    for q in &fits {
        let mut dominated = false;
        for o in &fits {
            if o != q && u.leq(o, q)? && !u.leq(q, o)? {
                dominated = true;
            }
        }
        if !dominated {
            out.push(q.clone());
        }
    }
    Ok(out)
}

/// Requires `demand ⪯ have`, reporting `GradeTooDemanding` otherwise.
fn covers(u: &GradeUniverse, span: Span, rule: Rule, demand: &KindedGrade, have: &KindedGrade) -> Checked<()> {
    if u.leq(demand, have).map_err(grade_err(span, rule))? {
        Ok(())
    } else {
        Err(err(
            span,
            rule,
            TypeErrorKind::GradeTooDemanding {
                expected: demand.clone(),
                best: have.clone(),
            },
        ))
    }
}

fn add(u: &GradeUniverse, span: Span, rule: Rule, a: &CoeffectCtx, b: &CoeffectCtx) -> Checked<CoeffectCtx> {
    ctx_add(u, a, b).map_err(|k| err(span, rule, k))
}

/// Removes the block variable from the body context and checks its usage
/// against the declared grade.
fn close_scope(
    u: &GradeUniverse,
    span: Span,
    rule: Rule,
    ctx: &mut CoeffectCtx,
    var: &Name,
    declared: &KindedGrade,
) -> Checked<()> {
    if let Some((_, used)) = ctx.remove(var) {
        check_usage(u, span, rule, var, declared, &used)?;
    }
    Ok(())
}

/// `used ⪯ declared` for a bound variable.
pub(crate) fn check_usage(
    u: &GradeUniverse,
    span: Span,
    rule: Rule,
    var: &Name,
    declared: &KindedGrade,
    used: &KindedGrade,
) -> Checked<()> {
    if u.leq(used, declared).map_err(grade_err(span, rule))? {
        return Ok(());
    }
    let (rule, kind) = if is_kind_zero(u, declared).map_err(grade_err(span, rule))? {
        (
            Rule::TVar,
            TypeErrorKind::DiscardedVariable {
                var: var.clone(),
                declared: declared.clone(),
                used: used.clone(),
            },
        )
    } else {
        (
            rule,
            TypeErrorKind::UsageExceedsGrade {
                var: var.clone(),
                declared: declared.clone(),
                used: used.clone(),
            },
        )
    };
    Err(err(span, rule, kind))
}

fn arity(span: Span, rule: Rule, what: String, expected: usize, found: usize) -> Checked<()> {
    if expected == found {
        Ok(())
    } else {
        Err(err(
            span,
            rule,
            TypeErrorKind::ArityMismatch {
                what,
                expected,
                found,
            },
        ))
    }
}

fn annotation_matches(span: Span, rule: Rule, declared: &KindedGrade, found: Option<&KindedGrade>) -> Checked<()> {
    match found {
        Some(g) if g != declared => Err(err(
            span,
            rule,
            TypeErrorKind::AnnotationMismatch {
                expected: declared.clone(),
                found: g.clone(),
            },
        )),
        _ => Ok(()),
    }
}

/// Checks `e` against `expected`, returning the least context and the
/// elaborated expression.
///
/// Where an unascribed field access admits two receiver grades with
/// incomparable contexts, both are carried up until a later sum settles
/// which is smaller. Of the results still incomparable at the top, the
/// first wins.
pub fn check(
    u: &GradeUniverse,
    table: &ClassTable,
    env: &TypeEnv,
    e: &Expr,
    expected: &GradedType,
) -> Checked<TypingResult> {
    let (ctx, elaborated) = check_all(u, table, env, e, expected)?.swap_remove(0);
    Ok(TypingResult { ctx, elaborated })
}

/// Most alternatives kept per subterm.
const MAX_ALTERNATIVES: usize = 8;

type Alt<T> = (CoeffectCtx, T);

/// Drops alternatives whose context is above another's, keeping order.
fn minimal<T>(u: &GradeUniverse, span: Span, rule: Rule, all: Vec<Alt<T>>) -> Checked<Vec<Alt<T>>> {
    let leq = |a: &CoeffectCtx, b: &CoeffectCtx| ctx_leq(u, a, b).map_err(grade_err(span, rule));
    let mut out: Vec<Alt<T>> = Vec::new();
    'next: for alt in all {
        for o in &out {
            if leq(&o.0, &alt.0)? {
                continue 'next;
            }
        }
        let mut kept = Vec::with_capacity(out.len() + 1);
        for o in out {
            if !leq(&alt.0, &o.0)? {
                kept.push(o);
            }
        }
        kept.push(alt);
        out = kept;
    }
    out.truncate(MAX_ALTERNATIVES);
    Ok(out)
}

/// Extends each partial alternative with each alternative of the next
/// premise, summing contexts.
fn combine<T: Clone>(
    u: &GradeUniverse,
    span: Span,
    rule: Rule,
    acc: Vec<Alt<Vec<T>>>,
    next: Vec<Alt<T>>,
) -> Checked<Vec<Alt<Vec<T>>>> {
    let mut out = Vec::with_capacity(acc.len() * next.len());
    for (ctx, parts) in &acc {
        for (c, p) in &next {
            let mut parts = parts.clone();
            parts.push(p.clone());
            out.push((add(u, span, rule, ctx, c)?, parts));
        }
    }
    minimal(u, span, rule, out)
}

fn check_all(
    u: &GradeUniverse,
    table: &ClassTable,
    env: &TypeEnv,
    e: &Expr,
    expected: &GradedType,
) -> Checked<Vec<Alt<AnnExpr>>> {
    let span = e.span;
    match &e.kind {
        ExprKind::Var(x) => Ok(vec![(var_ctx(u, table, env, span, x, expected)?, AnnExpr::Var(x.clone()))]),
        ExprKind::Field {
            recv,
            ascription,
            field,
        } => {
            let rule = Rule::TFieldAccess;
            let c = class_of(u, table, env, recv)?;
            let fields = table.fields(&c).map_err(table_err(span, rule))?;
            let fd = fields.iter().find(|f| &f.name == field).ok_or_else(|| {
                err(
                    span,
                    rule,
                    TableError::UnknownMember {
                        class: c.clone(),
                        member: field.clone(),
                    },
                )
            })?;
            subclass(table, span, &fd.ty.class, &expected.class)?;
            let r = &expected.grade;
            let qs = match ascription {
                Some(q) => {
                    let have = u.mul(q, &fd.ty.grade).map_err(grade_err(span, rule))?;
                    covers(u, span, Rule::TSub, r, &have)?;
                    vec![q.clone()]
                }
                None => receiver_grades(u, r, &fd.ty.grade).map_err(grade_err(span, rule))?,
            };
            if qs.is_empty() {
                return Err(err(
                    span,
                    rule,
                    TypeErrorKind::AscriptionNeeded {
                        field: field.clone(),
                        field_grade: fd.ty.grade.clone(),
                        receiver: r.clone(),
                        expected: r.clone(),
                    },
                ));
            }
            let mut alts = Vec::new();
            let mut first_err = None;
            for q in qs {
                let ty = GradedType {
                    class: c.clone(),
                    grade: q.clone(),
                };
                match check_all(u, table, env, recv, &ty) {
                    Ok(inner) => alts.extend(inner.into_iter().map(|(ctx, recv)| {
                        let elaborated = AnnExpr::Field {
                            recv: Box::new(recv),
                            grade: q.clone(),
                            field: field.clone(),
                        };
                        (ctx, elaborated)
                    })),
                    Err(d) => {
                        first_err.get_or_insert(d);
                    }
                }
            }
            match first_err {
                Some(d) if alts.is_empty() => Err(d),
                _ => minimal(u, span, rule, alts),
            }
        }
        ExprKind::New { class, args } => {
            let rule = Rule::TNew;
            check_known_class(table, span, rule, class)?;
            subclass(table, span, class, &expected.class)?;
            let fields = table.fields(class).map_err(table_err(span, rule))?;
            arity(span, rule, format!("constructor of `{class}`"), fields.len(), args.len())?;
            let mut acc = vec![(CoeffectCtx::new(), Vec::with_capacity(args.len()))];
            for (a, f) in args.iter().zip(&fields) {
                annotation_matches(a.expr.span, rule, &f.ty.grade, a.annotation.as_ref())?;
                let g = u.mul(&expected.grade, &f.ty.grade).map_err(grade_err(span, rule))?;
                let sub = check_all(u, table, env, &a.expr, &GradedType { class: f.ty.class.clone(), grade: g })?;
                let tagged = sub.into_iter().map(|(c, x)| (c, (x, f.ty.grade.clone()))).collect();
                acc = combine(u, span, rule, acc, tagged)?;
            }
            Ok(acc
                .into_iter()
                .map(|(ctx, args)| {
                    let elaborated = AnnExpr::New {
                        class: class.clone(),
                        args,
                    };
                    (ctx, elaborated)
                })
                .collect())
        }
        ExprKind::Invk {
            recv,
            ascription,
            method,
            args,
        } => {
            let rule = Rule::TInvk;
            let c = class_of(u, table, env, recv)?;
            let mt = table.mtype(&c, method).map_err(table_err(span, rule))?;
            annotation_matches(span, rule, &mt.this_grade, ascription.as_ref())?;
            arity(span, rule, format!("method `{c}.{method}`"), mt.params.len(), args.len())?;
            let r0 = check_all(u, table, env, recv, &GradedType { class: c, grade: mt.this_grade.clone() })?;
            let mut acc: Vec<Alt<Vec<(AnnExpr, KindedGrade)>>> = r0
                .into_iter()
                .map(|(ctx, x)| (ctx, vec![(x, mt.this_grade.clone())]))
                .collect();
            for (a, p) in args.iter().zip(&mt.params) {
                annotation_matches(a.expr.span, rule, &p.grade, a.annotation.as_ref())?;
                let sub = check_all(u, table, env, &a.expr, p)?;
                let tagged = sub.into_iter().map(|(c, x)| (c, (x, p.grade.clone()))).collect();
                acc = combine(u, span, rule, acc, tagged)?;
            }
            subclass(table, span, &mt.ret.class, &expected.class)?;
            covers(u, span, Rule::TSub, &expected.grade, &mt.ret.grade)?;
            Ok(acc
                .into_iter()
                .map(|(ctx, mut parts)| {
                    let (recv, _) = parts.remove(0);
                    let elaborated = AnnExpr::Invk {
                        recv: Box::new(recv),
                        grade: mt.this_grade.clone(),
                        method: method.clone(),
                        args: parts,
                    };
                    (ctx, elaborated)
                })
                .collect())
        }
        ExprKind::Block {
            decl,
            var,
            init,
            body,
        } => {
            let rule = Rule::TBlock;
            check_known_class(table, span, rule, &decl.class)?;
            u.check_grade(&decl.grade).map_err(grade_err(span, rule))?;
            let inits = check_all(u, table, env, init, decl)?;
            let inner = env
                .clone()
                .with_budget(var.clone(), decl.class.clone(), decl.grade.clone());
            let mut bodies = Vec::new();
            let mut first_err = None;
            for (mut ctx, b) in check_all(u, table, &inner, body, expected)? {
                match close_scope(u, span, Rule::TSub, &mut ctx, var, &decl.grade) {
                    Ok(()) => bodies.push((ctx, b)),
                    Err(d) => {
                        first_err.get_or_insert(d);
                    }
                }
            }
            if let (Some(d), true) = (first_err, bodies.is_empty()) {
                return Err(d);
            }
            let acc = inits.into_iter().map(|(c, i)| (c, vec![i])).collect();
            Ok(combine(u, span, rule, acc, bodies)?
                .into_iter()
                .map(|(ctx, mut parts)| {
                    let b = parts.pop().expect("body");
                    let i = parts.pop().expect("init");
                    let elaborated = AnnExpr::Block {
                        class: decl.class.clone(),
                        var: var.clone(),
                        init: Box::new(i),
                        grade: decl.grade.clone(),
                        body: Box::new(b),
                    };
                    (ctx, elaborated)
                })
                .collect())
        }
    }
}

/// Class an annotated expression produces.
pub fn ann_class_of(table: &ClassTable, env: &TypeEnv, e: &AnnExpr) -> Checked<Name> {
    let span = Span::default();
    match e {
        AnnExpr::Var(x) => env
            .class_of(x)
            .cloned()
            .ok_or_else(|| err(span, Rule::TVar, TypeErrorKind::UnknownVariable(x.clone()))),
        AnnExpr::Field { recv, field, .. } => {
            let c = ann_class_of(table, env, recv)?;
            let fields = table.fields(&c).map_err(table_err(span, Rule::TFieldAccess))?;
            fields
                .iter()
                .find(|f| &f.name == field)
                .map(|f| f.ty.class.clone())
                .ok_or_else(|| {
                    err(
                        span,
                        Rule::TFieldAccess,
                        TableError::UnknownMember {
                            class: c,
                            member: field.clone(),
                        },
                    )
                })
        }
        AnnExpr::New { class, .. } => {
            check_known_class(table, span, Rule::TNew, class)?;
            Ok(class.clone())
        }
        AnnExpr::Invk { recv, method, .. } => {
            let c = ann_class_of(table, env, recv)?;
            Ok(table.mtype(&c, method).map_err(table_err(span, Rule::TInvk))?.ret.class)
        }
        AnnExpr::Block { class, var, body, .. } => {
            ann_class_of(table, &env.clone().with(var.clone(), class.clone()), body)
        }
    }
}

/// Checks an annotated expression against `expected`, returning the least
/// context consistent with its annotations.
pub fn check_annotated(
    u: &GradeUniverse,
    table: &ClassTable,
    env: &TypeEnv,
    e: &AnnExpr,
    expected: &GradedType,
) -> Checked<CoeffectCtx> {
    let span = Span::default();
    match e {
        AnnExpr::Var(x) => var_ctx(u, table, env, span, x, expected),
        AnnExpr::Field { recv, grade, field } => {
            let rule = Rule::TFieldAccess;
            let c = ann_class_of(table, env, recv)?;
            let fields = table.fields(&c).map_err(table_err(span, rule))?;
            let fd = fields.iter().find(|f| &f.name == field).ok_or_else(|| {
                err(
                    span,
                    rule,
                    TableError::UnknownMember {
                        class: c.clone(),
                        member: field.clone(),
                    },
                )
            })?;
            subclass(table, span, &fd.ty.class, &expected.class)?;
            let have = u.mul(grade, &fd.ty.grade).map_err(grade_err(span, rule))?;
            covers(u, span, Rule::TSub, &expected.grade, &have)?;
            check_annotated(u, table, env, recv, &GradedType { class: c, grade: grade.clone() })
        }
        AnnExpr::New { class, args } => {
            let rule = Rule::TNew;
            check_known_class(table, span, rule, class)?;
            subclass(table, span, class, &expected.class)?;
            let fields = table.fields(class).map_err(table_err(span, rule))?;
            arity(span, rule, format!("constructor of `{class}`"), fields.len(), args.len())?;
            let mut ctx = CoeffectCtx::new();
            for ((a, ann), f) in args.iter().zip(&fields) {
                annotation_matches(span, rule, &f.ty.grade, Some(ann))?;
                let g = u.mul(&expected.grade, ann).map_err(grade_err(span, rule))?;
                let sub = check_annotated(u, table, env, a, &GradedType { class: f.ty.class.clone(), grade: g })?;
                ctx = add(u, span, rule, &ctx, &sub)?;
            }
            Ok(ctx)
        }
        AnnExpr::Invk {
            recv,
            grade,
            method,
            args,
        } => {
            let rule = Rule::TInvk;
            let c = ann_class_of(table, env, recv)?;
            let mt = table.mtype(&c, method).map_err(table_err(span, rule))?;
            annotation_matches(span, rule, &mt.this_grade, Some(grade))?;
            arity(span, rule, format!("method `{c}.{method}`"), mt.params.len(), args.len())?;
            let mut ctx = check_annotated(u, table, env, recv, &GradedType { class: c, grade: grade.clone() })?;
            for ((a, ann), p) in args.iter().zip(&mt.params) {
                annotation_matches(span, rule, &p.grade, Some(ann))?;
                let sub = check_annotated(u, table, env, a, p)?;
                ctx = add(u, span, rule, &ctx, &sub)?;
            }
            subclass(table, span, &mt.ret.class, &expected.class)?;
            covers(u, span, Rule::TSub, &expected.grade, &mt.ret.grade)?;
            Ok(ctx)
        }
        AnnExpr::Block {
            class,
            var,
            init,
            grade,
            body,
        } => {
            let rule = Rule::TBlock;
            check_known_class(table, span, rule, class)?;
            u.check_grade(grade).map_err(grade_err(span, rule))?;
            let decl = GradedType {
                class: class.clone(),
                grade: grade.clone(),
            };
            let i = check_annotated(u, table, env, init, &decl)?;
            let inner = env.clone().with_budget(var.clone(), class.clone(), grade.clone());
            let mut b = check_annotated(u, table, &inner, body, expected)?;
            close_scope(u, span, Rule::TSub, &mut b, var, grade)?;
            add(u, span, rule, &i, &b)
        }
    }
}

/// Requires `Δ ⪯ Γ`, naming the first offending variable.
pub(crate) fn require_ctx_leq(
    u: &GradeUniverse,
    span: Span,
    rule: Rule,
    delta: &CoeffectCtx,
    gamma: &CoeffectCtx,
) -> Checked<()> {
    if ctx_leq(u, delta, gamma).map_err(grade_err(span, rule))? {
        return Ok(());
    }
    for (x, c, used) in delta.iter() {
        match gamma.get(x) {
            None => {
                return Err(err(
                    span,
                    rule,
                    TypeErrorKind::UsageExceedsGrade {
                        var: x.clone(),
                        declared: u.zero(),
                        used: used.clone(),
                    },
                ))
            }
            Some((c2, _)) if c2 != c => {
                return Err(err(
                    span,
                    rule,
                    TypeErrorKind::TypeMismatch {
                        var: x.clone(),
                        left: c.clone(),
                        right: c2.clone(),
                    },
                ))
            }
            Some((_, declared)) => {
                if !u.leq(used, declared).map_err(grade_err(span, rule))? {
                    return Err(err(
                        span,
                        rule,
                        TypeErrorKind::UsageExceedsGrade {
                            var: x.clone(),
                            declared: declared.clone(),
                            used: used.clone(),
                        },
                    ));
                }
            }
        }
    }
    unreachable!("ctx_leq failed without a witness")
}

impl From<GtypeError> for TypeErrorKind {
    fn from(e: GtypeError) -> Self {
        match e {
            GtypeError::Table(t) => TypeErrorKind::Table(t),
            GtypeError::Grade(g) => TypeErrorKind::Grade(g),
        }
    }
}

/// `C^r ≤ D^s` with a diagnostic-friendly error.
pub(crate) fn gtype_sub(
    u: &GradeUniverse,
    table: &ClassTable,
    span: Span,
    rule: Rule,
    t1: &GradedType,
    t2: &GradedType,
) -> Checked<bool> {
    gtype_leq(u, table, t1, t2).map_err(|e| err(span, rule, TypeErrorKind::from(e)))
}

pub(crate) fn this_name() -> Name {
    name("this")
}
