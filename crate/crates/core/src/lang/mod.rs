//! Source language: syntax, parser, printer and class table.

mod parser;
mod pretty;
mod syntax;
mod table;

pub use parser::{parse_expr, parse_grade, parse_graded_type, parse_program, ParseError};
pub use syntax::{name, AnnExpr, Arg, Expr, ExprKind, FjExpr, GradedType, Name, Span};
pub use table::{
    gtype_leq, ClassDecl, ClassTable, FieldDecl, GtypeError, MethodDecl, MethodType, Param,
    TableError, TableResult, OBJECT,
};

use crate::hetero::KindedGrade;

/// A class table and a closed main expression reduced at `grade`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Program {
    pub table: ClassTable,
    pub main: Expr,
    pub grade: KindedGrade,
}
