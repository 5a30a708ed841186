//! Method conformance, class-table well-formedness, whole programs and
//! runtime configurations.

use std::collections::{BTreeSet, HashMap};

use super::check::{ann_class_of, check, check_annotated, check_usage, class_of, gtype_sub, require_ctx_leq, this_name};
use super::ctx::{CoeffectCtx, Diagnostic, Rule, TypeEnv, TypeErrorKind};
use crate::hetero::{GradeUniverse, HeteroError, KindedGrade};
use crate::lang::{
    name, AnnExpr, ClassDecl, ClassTable, Expr, ExprKind, GradedType, MethodDecl, Name, Program,
    Span, TableError, TableResult, OBJECT,
};
use crate::runtime::GradedEnv;

/// A program whose main expression and method bodies carry annotations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElaboratedProgram {
    pub table: ClassTable,
    pub bodies: HashMap<(Name, Name), AnnExpr>,
    pub main: AnnExpr,
    pub main_type: GradedType,
}

impl ElaboratedProgram {
    /// Parameter names and annotated body of `m` as seen from class `c`.
    pub fn body(&self, c: &str, m: &str) -> TableResult<(Vec<Name>, &AnnExpr)> {
        let (owner, md) = self.table.find_method(c, m)?;
        let body = self
            .bodies
            .get(&(owner.name.clone(), md.name.clone()))
            .ok_or_else(|| TableError::UnknownMember {
                class: name(c),
                member: name(m),
            })?;
        Ok((md.params.iter().map(|p| p.name.clone()).collect(), body))
    }

    pub fn grade(&self) -> &KindedGrade {
        &self.main_type.grade
    }
}

/// Checks a method body under `this:C^r0` and the declared parameters, and
/// that each of them is used within its declared grade.
pub fn check_method(
    u: &GradeUniverse,
    table: &ClassTable,
    class: &ClassDecl,
    md: &MethodDecl,
) -> Result<AnnExpr, Diagnostic> {
    let mut env = TypeEnv::new().with_budget(this_name(), class.name.clone(), md.this_grade.clone());
    let mut declared = CoeffectCtx::new();
    declared.insert(this_name(), class.name.clone(), md.this_grade.clone());
    for p in &md.params {
        env = env.with_budget(p.name.clone(), p.ty.class.clone(), p.ty.grade.clone());
        declared.insert(p.name.clone(), p.ty.class.clone(), p.ty.grade.clone());
    }
    let res = check(u, table, &env, &md.body, &md.ret)?;
    for (x, _, used) in res.ctx.iter() {
        let (_, d) = declared.get(x).expect("only this and parameters are in scope");
        check_usage(u, md.span, Rule::TMeth, x, d, used)?;
    }
    Ok(res.elaborated)
}

fn well_formed_type(u: &GradeUniverse, table: &ClassTable, span: Span, t: &GradedType, out: &mut Vec<Diagnostic>) {
    if !table.has_class(&t.class) {
        out.push(Diagnostic::new(span, Rule::Table, TableError::UnknownClass(t.class.clone())));
    }
    if let Err(e) = u.check_grade(&t.grade) {
        out.push(Diagnostic::new(span, Rule::Table, e));
    }
}

fn override_mismatch(class: &Name, method: &Name, detail: String) -> TypeErrorKind {
    TypeErrorKind::OverrideMismatch {
        class: class.clone(),
        method: method.clone(),
        detail,
    }
}

/// Structural checks for one class; `true` when its bodies can be checked.
fn check_class_shape(u: &GradeUniverse, table: &ClassTable, c: &ClassDecl, out: &mut Vec<Diagnostic>) -> bool {
    let before = out.len();
    if let Err(e) = table.ancestry(&c.name) {
        out.push(Diagnostic::new(c.span, Rule::Table, e));
        return false;
    }
    let mut seen = BTreeSet::new();
    for f in table.fields(&c.name).expect("ancestry checked") {
        if !seen.insert(f.name.clone()) {
            out.push(Diagnostic::new(
                f.span,
                Rule::Table,
                TypeErrorKind::DuplicateMember {
                    class: c.name.clone(),
                    member: f.name.clone(),
                },
            ));
        }
    }
    for f in &c.fields {
        well_formed_type(u, table, f.span, &f.ty, out);
    }
    let mut methods = BTreeSet::new();
    for md in &c.methods {
        if !methods.insert(md.name.clone()) {
            out.push(Diagnostic::new(
                md.span,
                Rule::Table,
                TypeErrorKind::DuplicateMember {
                    class: c.name.clone(),
                    member: md.name.clone(),
                },
            ));
        }
        well_formed_type(u, table, md.span, &md.ret, out);
        if let Err(e) = u.check_grade(&md.this_grade) {
            out.push(Diagnostic::new(md.span, Rule::Table, e));
        }
        let mut params = BTreeSet::new();
        for p in &md.params {
            if &*p.name == "this" || !params.insert(p.name.clone()) {
                out.push(Diagnostic::new(
                    md.span,
                    Rule::Table,
                    TypeErrorKind::BadParameter {
                        method: md.name.clone(),
                        param: p.name.clone(),
                    },
                ));
            }
            well_formed_type(u, table, md.span, &p.ty, out);
        }
        if out.len() > before {
            continue;
        }
        if c.superclass.as_ref() == OBJECT {
            continue;
        }
        let Ok((_, sup)) = table.find_method(&c.superclass, &md.name) else {
            continue;
        };
        let (mine, theirs) = (md.mtype(), sup.mtype());
        let mismatch = if mine.this_grade != theirs.this_grade {
            Some(format!(
                "receiver grade {} differs from {}",
                mine.this_grade, theirs.this_grade
            ))
        } else if mine.params != theirs.params {
            Some("parameter types differ".to_string())
        } else {
            match gtype_sub(u, table, md.span, Rule::Table, &mine.ret, &theirs.ret) {
                Ok(true) => None,
                Ok(false) => Some(format!(
                    "return type {} is not a subtype of {}",
                    mine.ret, theirs.ret
                )),
                Err(d) => {
                    out.push(d);
                    None
                }
            }
        };
        if let Some(detail) = mismatch {
            out.push(Diagnostic::new(
                md.span,
                Rule::Table,
                override_mismatch(&c.name, &md.name, detail),
            ));
        }
    }
    out.len() == before
}

/// Checks the whole class table, returning elaborated method bodies or
/// every diagnostic found.
pub fn check_table(
    u: &GradeUniverse,
    table: &ClassTable,
) -> Result<HashMap<(Name, Name), AnnExpr>, Vec<Diagnostic>> {
    let mut out = Vec::new();
    let mut names = BTreeSet::new();
    for c in table.classes() {
        if &*c.name == OBJECT {
            out.push(Diagnostic::new(c.span, Rule::Table, TypeErrorKind::ReservedClass(c.name.clone())));
        } else if !names.insert(c.name.clone()) {
            out.push(Diagnostic::new(c.span, Rule::Table, TypeErrorKind::DuplicateClass(c.name.clone())));
        }
    }
    let mut bodies = HashMap::new();
    if out.is_empty() {
        for c in table.classes() {
            if !check_class_shape(u, table, c, &mut out) {
                continue;
            }
            for md in &c.methods {
                match check_method(u, table, c, md) {
                    Ok(body) => {
                        bodies.insert((c.name.clone(), md.name.clone()), body);
                    }
                    Err(d) => out.push(d),
                }
            }
        }
    }
    if out.is_empty() {
        Ok(bodies)
    } else {
        Err(out)
    }
}

/// Checks the class table and the main expression at its class and the
/// program's grade.
pub fn check_program(u: &GradeUniverse, program: &Program) -> Result<ElaboratedProgram, Vec<Diagnostic>> {
    let bodies = check_table(u, &program.table)?;
    let env = TypeEnv::new();
    let main = (|| {
        u.check_grade(&program.grade)
            .map_err(|e| Diagnostic::new(program.main.span, Rule::TConf, e))?;
        let class = class_of(u, &program.table, &env, &program.main)?;
        let ty = GradedType {
            class,
            grade: program.grade.clone(),
        };
        let res = check(u, &program.table, &env, &program.main, &ty)?;
        Ok((res.elaborated, ty))
    })();
    match main {
        Ok((main, main_type)) => Ok(ElaboratedProgram {
            table: program.table.clone(),
            bodies,
            main,
            main_type,
        }),
        Err(d) => Err(vec![d]),
    }
}

/// `Γ ⊢ ρ` and `Δ ⊢ e : T` with `Δ ⪯ Γ`. Returns `Δ`.
pub fn check_configuration(
    u: &GradeUniverse,
    table: &ClassTable,
    e: &AnnExpr,
    rho: &GradedEnv,
    expected: &GradedType,
) -> Result<CoeffectCtx, Diagnostic> {
    let span = Span::default();
    let mut gamma = CoeffectCtx::new();
    let mut env = TypeEnv::new();
    for (x, v, g) in rho.iter() {
        if !v.is_value() {
            return Err(Diagnostic::new(span, Rule::TEnv, TypeErrorKind::NotAValue(x.clone())));
        }
        if !v.free_vars().is_empty() {
            return Err(Diagnostic::new(span, Rule::TEnv, TypeErrorKind::OpenValue(x.clone())));
        }
        let class = v.value_class().expect("values are constructor calls").clone();
        let ty = GradedType {
            class: class.clone(),
            grade: g.clone(),
        };
        check_annotated(u, table, &TypeEnv::new(), v, &ty).map_err(|mut d| {
            d.rule = Rule::TEnv;
            d
        })?;
        gamma.insert(x.clone(), class.clone(), g.clone());
        env = env.with_budget(x.clone(), class, g.clone());
    }
    let delta = check_annotated(u, table, &env, e, expected)?;
    require_ctx_leq(u, span, Rule::TConf, &delta, &gamma)?;
    Ok(delta)
}

/// Annotates without checking: explicit `@` and `^` are kept, receivers of
/// field accesses default to the reduction grade, and every other position
/// takes its declared grade (the unit when the declaration is unknown).
pub fn annotate_unchecked(u: &GradeUniverse, program: &Program) -> Result<ElaboratedProgram, HeteroError> {
    let table = &program.table;
    let mut bodies = HashMap::new();
    for c in table.classes() {
        for md in &c.methods {
            let mut env = TypeEnv::new().with(this_name(), c.name.clone());
            for p in &md.params {
                env = env.with(p.name.clone(), p.ty.class.clone());
            }
            let body = annotate(u, table, &env, &md.body, &md.ret.grade)?;
            bodies
                .entry((c.name.clone(), md.name.clone()))
                .or_insert(body);
        }
    }
    let env = TypeEnv::new();
    let main = annotate(u, table, &env, &program.main, &program.grade)?;
    let class = ann_class_of(table, &env, &main)
        .ok()
        .unwrap_or_else(|| name(OBJECT));
    Ok(ElaboratedProgram {
        table: table.clone(),
        bodies,
        main,
        main_type: GradedType {
            class,
            grade: program.grade.clone(),
        },
    })
}

fn annotate(
    u: &GradeUniverse,
    table: &ClassTable,
    env: &TypeEnv,
    e: &Expr,
    r: &KindedGrade,
) -> Result<AnnExpr, HeteroError> {
    Ok(match &e.kind {
        ExprKind::Var(x) => AnnExpr::Var(x.clone()),
        ExprKind::Field {
            recv,
            ascription,
            field,
        } => {
            let q = ascription.clone().unwrap_or_else(|| r.clone());
            AnnExpr::Field {
                recv: Box::new(annotate(u, table, env, recv, &q)?),
                grade: q,
                field: field.clone(),
            }
        }
        ExprKind::New { class, args } => {
            let fields = table.fields(class).unwrap_or_default();
            let mut out = Vec::with_capacity(args.len());
            for (i, a) in args.iter().enumerate() {
                let ri = a
                    .annotation
                    .clone()
                    .or_else(|| fields.get(i).map(|f| f.ty.grade.clone()))
                    .unwrap_or_else(|| u.one());
                let g = u.mul(r, &ri)?;
                out.push((annotate(u, table, env, &a.expr, &g)?, ri));
            }
            AnnExpr::New {
                class: class.clone(),
                args: out,
            }
        }
        ExprKind::Invk {
            recv,
            ascription,
            method,
            args,
        } => {
            let mt = class_of(u, table, env, recv)
                .ok()
                .and_then(|c| table.mtype(&c, method).ok());
            let r0 = ascription
                .clone()
                .or_else(|| mt.as_ref().map(|m| m.this_grade.clone()))
                .unwrap_or_else(|| u.one());
            let mut out = Vec::with_capacity(args.len());
            for (i, a) in args.iter().enumerate() {
                let ri = a
                    .annotation
                    .clone()
                    .or_else(|| mt.as_ref().and_then(|m| m.params.get(i)).map(|p| p.grade.clone()))
                    .unwrap_or_else(|| u.one());
                out.push((annotate(u, table, env, &a.expr, &ri)?, ri));
            }
            AnnExpr::Invk {
                recv: Box::new(annotate(u, table, env, recv, &r0)?),
                grade: r0,
                method: method.clone(),
                args: out,
            }
        }
        ExprKind::Block {
            decl,
            var,
            init,
            body,
        } => {
            let inner = env.clone().with(var.clone(), decl.class.clone());
            AnnExpr::Block {
                class: decl.class.clone(),
                var: var.clone(),
                init: Box::new(annotate(u, table, env, init, &decl.grade)?),
                grade: decl.grade.clone(),
                body: Box::new(annotate(u, table, &inner, body, r)?),
            }
        }
    })
}
