//! Executable statements of the soundness results, checked on programs and
//! on configurations reached while running them.

mod corpus;

pub use corpus::{
    assert_round_trip, load_corpus, verify_corpus, CorpusEntry, EntryReport, Expectation, Manifest, RunExpectation,
    CLOSURE_SAMPLES, CORPUS_FUEL,
};

use crate::hetero::{GradeUniverse, KindedGrade};
use crate::lang::{GradedType, Name};
use crate::runtime::{
    erase_config, graded_run, graded_step, props_step, replay_step, std_step, ConsumptionPolicy, GradedConfig,
    Outcome, RunOptions, Step, StepResult, TraceEntry,
};
use crate::typing::{check_configuration, ctx_scale, CoeffectCtx, ElaboratedProgram};

/// Outcome of one property check: empty `failures` means it held.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub checked: usize,
    pub failures: Vec<String>,
}

impl Report {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }

    fn fail(&mut self, msg: impl Into<String>) {
        self.failures.push(msg.into());
    }

    pub fn merge(&mut self, other: Report) {
        self.checked += other.checked;
        self.failures.extend(other.failures);
    }
}

/// `Θ` of the progress statement, initialised to `0 · Δ`. Re-typing each
/// successor makes it unnecessary for the check itself; it is kept so the
/// domain condition `dom Δ ⊆ dom Θ` can be asserted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlackContext(pub CoeffectCtx);

impl SlackContext {
    pub fn initial(u: &GradeUniverse, delta: &CoeffectCtx) -> Self {
        SlackContext(ctx_scale(u, &u.zero(), delta).expect("zero scales any context"))
    }

    pub fn covers(&self, delta: &CoeffectCtx) -> bool {
        delta.iter().all(|(x, _, _)| self.0.get(x).is_some())
    }
}

/// A well-typed configuration is a value or steps to a well-typed one whose
/// environment extends the old one with no grade increase.
pub fn assert_progress(
    u: &GradeUniverse,
    prog: &ElaboratedProgram,
    cfg: &GradedConfig,
    r: &KindedGrade,
    expected: &GradedType,
) -> Report {
    let mut rep = Report {
        checked: 1,
        ..Report::default()
    };
    let delta = match check_configuration(u, &prog.table, &cfg.expr, &cfg.env, expected) {
        Ok(d) => d,
        Err(d) => {
            rep.fail(format!("precondition: configuration is not well typed: {d}"));
            return rep;
        }
    };
    if !SlackContext::initial(u, &delta).covers(&delta) {
        rep.fail("slack context does not cover the used variables");
    }
    let mut candidates = Vec::new();
    for policy in [ConsumptionPolicy::Minimal, ConsumptionPolicy::Enumerate { bound: 4 }] {
        match graded_step(u, prog, cfg, r, policy) {
            StepResult::Value => return rep,
            StepResult::Next(steps) => {
                candidates = steps;
                break;
            }
            StepResult::Stuck(_) => {}
        }
    }
    if candidates.is_empty() {
        rep.fail(format!("no step applies to {cfg}"));
        return rep;
    }
    let mut last_err = String::new();
    for s in &candidates {
        match check_configuration(u, &prog.table, &s.config.expr, &s.config.env, expected) {
            Ok(_) if env_extends(u, &cfg.env.grades(), &s.config) => return rep,
            Ok(_) => last_err = "successor environment does not extend the old one".into(),
            Err(d) => last_err = format!("successor is not well typed: {d}"),
        }
    }
    rep.fail(format!("{last_err} (from {cfg})"));
    rep
}

fn env_extends(u: &GradeUniverse, before: &[(Name, KindedGrade)], after: &GradedConfig) -> bool {
    before.iter().all(|(x, g)| {
        after
            .env
            .grade(x)
            .is_some_and(|g2| u.leq(g2, g).unwrap_or(false))
    })
}

/// Runs the program under the minimal policy: it must reach a well-typed
/// value or run out of fuel.
pub fn assert_soundness_may(u: &GradeUniverse, prog: &ElaboratedProgram, fuel: usize) -> (Report, Outcome) {
    let mut rep = Report {
        checked: 1,
        ..Report::default()
    };
    let opts = RunOptions {
        fuel,
        ..RunOptions::default()
    };
    let run = graded_run(u, prog, GradedConfig::new(prog.main.clone()), prog.grade(), &opts);
    match &run.outcome {
        Outcome::Final => {
            if let Err(d) = check_configuration(u, &prog.table, &run.config.expr, &run.config.env, &prog.main_type) {
                rep.fail(format!("final configuration is not well typed: {d}"));
            }
        }
        Outcome::FuelExhausted => {}
        Outcome::StuckAt(reason) => rep.fail(format!("stuck after {} steps: {reason}", run.steps)),
    }
    (rep, run.outcome)
}

/// Runs the standard and instrumented semantics in lockstep, comparing the
/// erased state and re-typing each instrumented configuration.
pub fn assert_subject_reduction(u: &GradeUniverse, prog: &ElaboratedProgram, fuel: usize) -> Report {
    let mut rep = Report::default();
    let r = prog.grade();
    let mut cfg = GradedConfig::new(prog.main.clone());
    let mut std_cfg = erase_config(&cfg);
    for i in 0..=fuel {
        rep.checked += 1;
        if erase_config(&cfg) != std_cfg {
            rep.fail(format!("step {i}: erased state {} differs from {}", cfg.expr.erase(), std_cfg.expr));
            return rep;
        }
        if let Err(d) = check_configuration(u, &prog.table, &cfg.expr, &cfg.env, &prog.main_type) {
            rep.fail(format!("step {i}: not well typed: {d}"));
            return rep;
        }
        let next = graded_step(u, prog, &cfg, r, ConsumptionPolicy::Minimal);
        let std_next = std_step(&prog.table, &std_cfg);
        match (next, std_next) {
            (StepResult::Value, Ok(None)) => return rep,
            (StepResult::Next(mut s), Ok(Some(n))) => {
                cfg = s.remove(0).config;
                std_cfg = n;
            }
            (g, s) => {
                rep.fail(format!("step {i}: instrumented {g:?} but standard {s:?}"));
                return rep;
            }
        }
    }
    rep
}

/// Step properties along a recorded trace starting from `initial`.
pub fn assert_trace_props(
    u: &GradeUniverse,
    prog: &ElaboratedProgram,
    initial: &GradedConfig,
    trace: &[TraceEntry],
    lower: &[KindedGrade],
) -> Report {
    let mut rep = Report::default();
    let mut before = initial.clone();
    for t in trace {
        rep.checked += 1;
        let step = Step {
            config: t.config.clone(),
            info: t.info.clone(),
        };
        let p = props_step(u, prog, &before, &t.grade, &step, lower);
        for v in p.violations() {
            rep.fail(format!("step {}: {v}", t.index));
        }
        before = t.config.clone();
    }
    rep
}

/// Replays a whole trace at each lower grade: every step must still fire
/// with the same result.
pub fn assert_downward_closure(
    u: &GradeUniverse,
    prog: &ElaboratedProgram,
    initial: &GradedConfig,
    trace: &[TraceEntry],
    lower: &[KindedGrade],
) -> Report {
    let mut rep = Report::default();
    for s in lower {
        rep.checked += 1;
        let mut cur = initial.clone();
        for t in trace {
            match replay_step(u, prog, &cur, s, &t.info) {
                Ok(step) if step.config == t.config => cur = step.config,
                Ok(_) => {
                    rep.fail(format!("at {s}, step {} diverges", t.index));
                    break;
                }
                Err(reason) => {
                    rep.fail(format!("at {s}, step {} is stuck: {reason}", t.index));
                    break;
                }
            }
        }
    }
    rep
}

/// Up to `n` grades of the universe below `r`, always including `r`.
pub fn grades_below(u: &GradeUniverse, r: &KindedGrade, n: usize) -> Vec<KindedGrade> {
    let mut out = vec![r.clone()];
    for g in u.carrier_sample(12, 8) {
        if out.len() >= n {
            break;
        }
        if !out.contains(&g) && u.leq(&g, r).unwrap_or(false) {
            out.push(g);
        }
    }
    out
}

#[cfg(test)]
mod tests;
