//! Per-step checks: environments only shrink in grade, steps survive a
//! lower reduction grade, and erasure maps them to standard steps.

use super::{replay_step, std_step, GradedConfig, StdConfig, Step};
use crate::hetero::{GradeUniverse, KindedGrade};
use crate::typing::ElaboratedProgram;

/// Violations found for one step, with witnesses.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StepProps {
    pub env_monotone: Vec<String>,
    pub downward_closed: Vec<String>,
    pub erasure: Vec<String>,
}

impl StepProps {
    pub fn ok(&self) -> bool {
        self.env_monotone.is_empty() && self.downward_closed.is_empty() && self.erasure.is_empty()
    }

    pub fn violations(&self) -> impl Iterator<Item = &String> {
        self.env_monotone
            .iter()
            .chain(&self.downward_closed)
            .chain(&self.erasure)
    }
}

pub fn erase_config(cfg: &GradedConfig) -> StdConfig {
    StdConfig {
        expr: cfg.expr.erase(),
        env: cfg.env.erase(),
    }
}

/// Checks the step `before →_r step.config`. `lower` supplies the grades
/// tried for downward closure; those not below `r` are skipped.
pub fn props_step(
    u: &GradeUniverse,
    prog: &ElaboratedProgram,
    before: &GradedConfig,
    r: &KindedGrade,
    step: &Step,
    lower: &[KindedGrade],
) -> StepProps {
    let mut out = StepProps::default();
    let after = &step.config;
    for (x, v, g) in before.env.iter() {
        match after.env.get(x) {
            None => out.env_monotone.push(format!("`{x}` left the environment")),
            Some((v2, _)) if v2 != v => out.env_monotone.push(format!("value of `{x}` changed")),
            Some((_, g2)) => match u.leq(g2, g) {
                Ok(true) => {}
                Ok(false) => out.env_monotone.push(format!("grade of `{x}` grew from {g} to {g2}")),
                Err(e) => out.env_monotone.push(format!("grade of `{x}`: {e}")),
            },
        }
    }
    for s in lower {
        if !matches!(u.leq(s, r), Ok(true)) {
            continue;
        }
        match replay_step(u, prog, before, s, &step.info) {
            Ok(st) if st.config == *after => {}
            Ok(st) => out
                .downward_closed
                .push(format!("at {s} the step reaches {} instead", st.config)),
            Err(reason) => out.downward_closed.push(format!("at {s} the step is stuck: {reason}")),
        }
    }
    match std_step(&prog.table, &erase_config(before)) {
        Ok(Some(next)) if next == erase_config(after) => {}
        Ok(Some(next)) => out
            .erasure
            .push(format!("standard step reaches {} instead", next.expr)),
        Ok(None) => out.erasure.push("erased configuration is already a value".into()),
        Err(reason) => out.erasure.push(format!("standard step is stuck: {reason}")),
    }
    out
}
