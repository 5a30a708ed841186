//! Printing in the concrete syntax. Printed expressions and programs parse
//! back to equal ASTs; annotated expressions print with explicit
//! ascriptions and `^` annotations.

use std::fmt;

use super::syntax::{AnnExpr, Arg, Expr, ExprKind, FjExpr};
use super::table::{ClassDecl, OBJECT};
use super::Program;

fn comma_sep<T>(
    f: &mut fmt::Formatter<'_>,
    items: &[T],
    mut each: impl FnMut(&mut fmt::Formatter<'_>, &T) -> fmt::Result,
) -> fmt::Result {
    for (i, x) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        each(f, x)?;
    }
    Ok(())
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let args = |f: &mut fmt::Formatter<'_>, args: &[Arg]| {
            comma_sep(f, args, |f, a| match &a.annotation {
                Some(g) => write!(f, "{}^{g}", a.expr),
                None => write!(f, "{}", a.expr),
            })
        };
        match &self.kind {
            ExprKind::Var(x) => f.write_str(x),
            ExprKind::Field {
                recv,
                ascription,
                field,
            } => match ascription {
                Some(g) => write!(f, "{recv}@{g}.{field}"),
                None => write!(f, "{recv}.{field}"),
            },
            ExprKind::New { class, args: a } => {
                write!(f, "new {class}(")?;
                args(f, a)?;
                f.write_str(")")
            }
            ExprKind::Invk {
                recv,
                ascription,
                method,
                args: a,
            } => {
                match ascription {
                    Some(g) => write!(f, "{recv}@{g}.{method}(")?,
                    None => write!(f, "{recv}.{method}(")?,
                }
                args(f, a)?;
                f.write_str(")")
            }
            ExprKind::Block {
                decl,
                var,
                init,
                body,
            } => write!(f, "{{{decl} {var} = {init}; {body}}}"),
        }
    }
}

impl fmt::Display for AnnExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let args = |f: &mut fmt::Formatter<'_>, a: &[(AnnExpr, _)]| {
            comma_sep(f, a, |f, (e, g): &(AnnExpr, crate::hetero::KindedGrade)| write!(f, "{e}^{g}"))
        };
        match self {
            AnnExpr::Var(x) => f.write_str(x),
            AnnExpr::Field { recv, grade, field } => write!(f, "{recv}@{grade}.{field}"),
            AnnExpr::New { class, args: a } => {
                write!(f, "new {class}(")?;
                args(f, a)?;
                f.write_str(")")
            }
            AnnExpr::Invk {
                recv,
                grade,
                method,
                args: a,
            } => {
                write!(f, "{recv}@{grade}.{method}(")?;
                args(f, a)?;
                f.write_str(")")
            }
            AnnExpr::Block {
                class,
                var,
                init,
                grade,
                body,
            } => write!(f, "{{{class}[{grade}] {var} = {init}; {body}}}"),
        }
    }
}

impl fmt::Display for FjExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FjExpr::Var(x) => f.write_str(x),
            FjExpr::Field(r, x) => write!(f, "{r}.{x}"),
            FjExpr::New(c, args) => {
                write!(f, "new {c}(")?;
                comma_sep(f, args, |f, a| write!(f, "{a}"))?;
                f.write_str(")")
            }
            FjExpr::Invk(r, m, args) => {
                write!(f, "{r}.{m}(")?;
                comma_sep(f, args, |f, a| write!(f, "{a}"))?;
                f.write_str(")")
            }
            FjExpr::Block {
                class,
                var,
                init,
                body,
            } => write!(f, "{{{class} {var} = {init}; {body}}}"),
        }
    }
}

impl fmt::Display for ClassDecl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "class {}", self.name)?;
        if &*self.superclass != OBJECT {
            write!(f, " extends {}", self.superclass)?;
        }
        if self.fields.is_empty() && self.methods.is_empty() {
            return f.write_str(" {}");
        }
        f.write_str(" {\n")?;
        for fd in &self.fields {
            writeln!(f, "  {} {};", fd.ty, fd.name)?;
        }
        for m in &self.methods {
            write!(f, "  {} {}(", m.ret, m.name)?;
            comma_sep(f, &m.params, |f, p| write!(f, "{} {}", p.ty, p.name))?;
            writeln!(f, ") [{}] {{ {} }}", m.this_grade, m.body)?;
        }
        f.write_str("}")
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in self.table.classes() {
            writeln!(f, "{c}")?;
        }
        write!(f, "run {} at {}", self.main, self.grade)
    }
}
