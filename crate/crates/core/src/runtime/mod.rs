//! Standard and grade-instrumented reduction.

mod env;
mod graded;
mod props;
mod standard;

use std::fmt;

pub use env::{GradedEnv, StdEnv};
pub use graded::{
    graded_run, graded_step, replay_step, ConsumptionPolicy, Consumption, GradedConfig, Outcome, Run,
    RunOptions, Step, StepInfo, StepResult, StepRule, TraceEntry, DEFAULT_FUEL,
};
pub use props::{erase_config, props_step, StepProps};
pub use standard::{std_run, std_step, StdConfig, StdOutcome, StdRun};

use crate::hetero::KindedGrade;
use crate::lang::{name, Name};

/// Why no rule applies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StuckReason {
    ResourceExhausted {
        var: Name,
        available: KindedGrade,
        demanded: KindedGrade,
    },
    FieldExtraction {
        field: Name,
        have: KindedGrade,
        demanded: KindedGrade,
    },
    NoSuchMember {
        class: Name,
        member: Name,
    },
    Arity {
        method: Name,
        expected: usize,
        found: usize,
    },
    UnboundVariable(Name),
    Grade(String),
}

impl StuckReason {
    fn no_member(class: &Name, member: &Name) -> Self {
        StuckReason::NoSuchMember {
            class: class.clone(),
            member: member.clone(),
        }
    }

    pub fn code(&self) -> &'static str {
        match self {
            StuckReason::ResourceExhausted { .. } => "ResourceExhausted",
            StuckReason::FieldExtraction { .. } => "FieldExtraction",
            StuckReason::NoSuchMember { .. } => "NoSuchMember",
            StuckReason::Arity { .. } => "ArityMismatch",
            StuckReason::UnboundVariable(_) => "UnboundVariable",
            StuckReason::Grade(_) => "GradeError",
        }
    }
}

impl fmt::Display for StuckReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StuckReason::ResourceExhausted {
                var,
                available,
                demanded,
            } => write!(f, "resource `{var}` exhausted: {available} left, {demanded} demanded"),
            StuckReason::FieldExtraction { field, have, demanded } => {
                write!(f, "field `{field}` provides {have}, {demanded} demanded")
            }
            StuckReason::NoSuchMember { class, member } => write!(f, "class `{class}` has no member `{member}`"),
            StuckReason::Arity {
                method,
                expected,
                found,
            } => write!(f, "`{method}` expects {expected} arguments, got {found}"),
            StuckReason::UnboundVariable(x) => write!(f, "unbound variable `{x}`"),
            StuckReason::Grade(e) => write!(f, "grade error: {e}"),
        }
    }
}

/// Names not in the environment for each base, in order. A base is reused
/// when free; otherwise it gets a `$n` suffix numbered from the
/// environment size, which only grows, so runs are reproducible.
pub(crate) fn fresh_names<S: AsRef<str>>(bases: &[S], env_len: usize, taken: impl Fn(&str) -> bool) -> Vec<Name> {
    let mut out: Vec<Name> = Vec::with_capacity(bases.len());
    let mut n = env_len;
    for b in bases {
        let base = b.as_ref().split('$').next().unwrap_or("");
        let clash = |s: &str, out: &[Name]| taken(s) || out.iter().any(|o| &**o == s);
        if !clash(base, &out) {
            out.push(name(base));
            continue;
        }
        loop {
            let candidate = format!("{base}${n}");
            n += 1;
            if !clash(&candidate, &out) {
                out.push(name(&candidate));
                break;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests;
