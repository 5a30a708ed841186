//! Graded type checking: coeffect contexts, the elaborating checker, the
//! checker for annotated expressions, and table/configuration checks.

mod check;
mod ctx;
mod program;

pub use check::{ann_class_of, check, check_annotated, class_of, is_kind_zero, zero_use_consumption, TypingResult};
pub use ctx::{ctx_add, ctx_leq, ctx_scale, CoeffectCtx, Diagnostic, Rule, TypeEnv, TypeErrorKind};
pub use program::{
    annotate_unchecked, check_configuration, check_method, check_program, check_table, ElaboratedProgram,
};

#[cfg(test)]
mod tests;
