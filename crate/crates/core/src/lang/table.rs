//! Class table with member lookup through the `extends` chain.

use std::collections::HashMap;

use thiserror::Error;

use super::syntax::{name, Expr, GradedType, Name, Span};
use crate::hetero::{GradeUniverse, KindedGrade};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldDecl {
    pub ty: GradedType,
    pub name: Name,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Param {
    pub ty: GradedType,
    pub name: Name,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MethodDecl {
    pub name: Name,
    pub ret: GradedType,
    pub this_grade: KindedGrade,
    pub params: Vec<Param>,
    pub body: Expr,
    pub span: Span,
}

impl MethodDecl {
    pub fn mtype(&self) -> MethodType {
        MethodType {
            this_grade: self.this_grade.clone(),
            params: self.params.iter().map(|p| p.ty.clone()).collect(),
            ret: self.ret.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassDecl {
    pub name: Name,
    pub superclass: Name,
    pub fields: Vec<FieldDecl>,
    pub methods: Vec<MethodDecl>,
    pub span: Span,
}

/// `r0, C1^r1 … Cn^rn → T`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MethodType {
    pub this_grade: KindedGrade,
    pub params: Vec<GradedType>,
    pub ret: GradedType,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TableError {
    #[error("unknown class `{0}`")]
    UnknownClass(Name),
    #[error("class `{class}` has no member `{member}`")]
    UnknownMember { class: Name, member: Name },
    #[error("cyclic inheritance: {}", .0.join(" extends "))]
    Cyclic(Vec<Name>),
}

pub type TableResult<T> = Result<T, TableError>;

pub const OBJECT: &str = "Object";

/// Declared classes in source order. `Object` is implicit and empty.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ClassTable {
    classes: Vec<ClassDecl>,
    index: HashMap<Name, usize>,
}

impl ClassTable {
    /// Later duplicates are kept for diagnostics but never looked up.
    pub fn new(classes: Vec<ClassDecl>) -> Self {
        let mut index = HashMap::new();
        for (i, c) in classes.iter().enumerate() {
            index.entry(c.name.clone()).or_insert(i);
        }
        ClassTable { classes, index }
    }

    pub fn classes(&self) -> &[ClassDecl] {
        &self.classes
    }

    pub fn get(&self, c: &str) -> Option<&ClassDecl> {
        self.index.get(c).map(|&i| &self.classes[i])
    }

    pub fn has_class(&self, c: &str) -> bool {
        c == OBJECT || self.index.contains_key(c)
    }

    /// `c` and its declared ancestors, nearest first, excluding `Object`.
    pub fn ancestry(&self, c: &str) -> TableResult<Vec<&ClassDecl>> {
        let mut out: Vec<&ClassDecl> = Vec::new();
        let mut cur = c;
        while cur != OBJECT {
            let decl = self.get(cur).ok_or_else(|| TableError::UnknownClass(name(cur)))?;
            if out.iter().any(|d| d.name == decl.name) {
                let mut cycle: Vec<Name> = out.iter().map(|d| d.name.clone()).collect();
                cycle.push(decl.name.clone());
                return Err(TableError::Cyclic(cycle));
            }
            out.push(decl);
            cur = &decl.superclass;
        }
        Ok(out)
    }

    /// Reflexive-transitive closure of `extends`.
    pub fn is_subclass(&self, c: &str, d: &str) -> TableResult<bool> {
        if c == d {
            if !self.has_class(c) {
                return Err(TableError::UnknownClass(name(c)));
            }
            return Ok(true);
        }
        if d == OBJECT {
            self.ancestry(c)?;
            return Ok(true);
        }
        Ok(self.ancestry(c)?.iter().any(|x| &*x.name == d))
    }

    /// Fields, superclass fields first.
    pub fn fields(&self, c: &str) -> TableResult<Vec<&FieldDecl>> {
        let mut chain = self.ancestry(c)?;
        chain.reverse();
        Ok(chain.into_iter().flat_map(|d| d.fields.iter()).collect())
    }

    /// The nearest declaration of `m` and the class declaring it.
    pub fn find_method(&self, c: &str, m: &str) -> TableResult<(&ClassDecl, &MethodDecl)> {
        for d in self.ancestry(c)? {
            if let Some(md) = d.methods.iter().find(|md| &*md.name == m) {
                return Ok((d, md));
            }
        }
        Err(TableError::UnknownMember {
            class: name(c),
            member: name(m),
        })
    }

    pub fn mtype(&self, c: &str, m: &str) -> TableResult<MethodType> {
        Ok(self.find_method(c, m)?.1.mtype())
    }

    /// Parameter names and body.
    pub fn mbody(&self, c: &str, m: &str) -> TableResult<(Vec<Name>, &Expr)> {
        let (_, md) = self.find_method(c, m)?;
        Ok((md.params.iter().map(|p| p.name.clone()).collect(), &md.body))
    }
}

/// `C^r ≤ D^s` iff `C ≤ D` and `s ⪯ r`.
pub fn gtype_leq(
    u: &GradeUniverse,
    table: &ClassTable,
    t1: &GradedType,
    t2: &GradedType,
) -> Result<bool, GtypeError> {
    if !table.is_subclass(&t1.class, &t2.class)? {
        return Ok(false);
    }
    Ok(u.leq(&t2.grade, &t1.grade)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GtypeError {
    #[error(transparent)]
    Table(#[from] TableError),
    #[error(transparent)]
    Grade(#[from] crate::hetero::HeteroError),
}
