//! Grade-instrumented reduction `⟨e | ρ⟩ →_r ⟨e′ | ρ′⟩`.

use std::collections::HashMap;
use std::fmt;

use super::{fresh_names, GradedEnv, StuckReason};
use crate::grades::GradeError;
use crate::hetero::{GradeUniverse, HeteroError, KindedGrade};
use crate::lang::{name, AnnExpr, Name};
use crate::typing::{is_kind_zero, ElaboratedProgram};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedConfig {
    pub expr: AnnExpr,
    pub env: GradedEnv,
}

impl GradedConfig {
    pub fn new(expr: AnnExpr) -> Self {
        GradedConfig {
            expr,
            env: GradedEnv::new(),
        }
    }
}

impl fmt::Display for GradedConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{} | {}>", self.expr, self.env)
    }
}

/// How a `(var)` step chooses the consumed amount `r′` and residual `s′`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ConsumptionPolicy {
    /// `r′` is the reduction grade (a unit when that is zero) and `s′` the
    /// canonical residual.
    #[default]
    Minimal,
    /// Every `r′` among the reduction grade, up to `bound` successive
    /// additions of the unit, and the finite carrier above it, each with its
    /// maximal residuals.
    Enumerate { bound: usize },
}

/// Base rule that fired, below any contextual rules.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StepRule {
    Var,
    FieldAccess,
    Invk,
    Block,
}

impl fmt::Display for StepRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StepRule::Var => "var",
            StepRule::FieldAccess => "field-access",
            StepRule::Invk => "invk",
            StepRule::Block => "block",
        })
    }
}

/// The choice made by a `(var)` step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Consumption {
    pub var: Name,
    pub used: KindedGrade,
    pub residual: KindedGrade,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepInfo {
    pub rule: StepRule,
    pub consumption: Option<Consumption>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub config: GradedConfig,
    pub info: StepInfo,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepResult {
    /// The expression is already a value.
    Value,
    /// Successors; exactly one under the minimal policy.
    Next(Vec<Step>),
    Stuck(StuckReason),
}

/// Changes a step makes to the environment.
#[derive(Clone, Debug, Default)]
struct Delta {
    set: Option<(Name, KindedGrade)>,
    add: Vec<(Name, AnnExpr, KindedGrade)>,
}

impl Delta {
    fn apply(self, env: &mut GradedEnv) {
        if let Some((x, g)) = self.set {
            env.set_grade(&x, g);
        }
        for (x, v, g) in self.add {
            env.insert(x, v, g);
        }
    }
}

#[derive(Clone, Copy)]
enum Choice<'a> {
    Policy(ConsumptionPolicy),
    Replay(&'a Consumption),
}

struct Machine<'a> {
    u: &'a GradeUniverse,
    prog: &'a ElaboratedProgram,
}

type Candidates = Vec<(AnnExpr, Delta, StepInfo)>;

fn grade_stuck(e: HeteroError) -> StuckReason {
    StuckReason::Grade(e.to_string())
}

impl Machine<'_> {
    fn nonzero(&self, g: &KindedGrade) -> Result<bool, StuckReason> {
        Ok(!is_kind_zero(self.u, g).map_err(grade_stuck)?)
    }

    /// Maximal residuals of `available` after consuming `used`.
    fn residuals(&self, available: &KindedGrade, used: &KindedGrade) -> Result<Vec<KindedGrade>, StuckReason> {
        match self.u.residual(available, used) {
            Ok(r) => Ok(r.into_iter().collect()),
            Err(HeteroError::Grade(GradeError::AmbiguousResidual { .. })) => {
                let alg = self.u.algebra(&available.kind).map_err(grade_stuck)?;
                let demand = self.u.inject(used, &available.kind).map_err(grade_stuck)?;
                let all = alg
                    .residual_candidates(&available.value, &demand)
                    .map_err(|e| StuckReason::Grade(e.to_string()))?
                    .unwrap_or_default();
                let mut out = Vec::new();
                for s in &all {
                    let dominated = all
                        .iter()
                        .any(|o| o != s && alg.leq(s, o).unwrap_or(false));
                    if !dominated {
                        out.push(KindedGrade::new(available.kind.clone(), s.clone()));
                    }
                }
                Ok(out)
            }
            Err(e) => Err(grade_stuck(e)),
        }
    }

    /// Candidate amounts `r′` with `r ⪯ r′ ≠ 0`.
    fn amounts(&self, r: &KindedGrade, available: &KindedGrade, bound: usize) -> Result<Vec<KindedGrade>, StuckReason> {
        let u = self.u;
        let mut out: Vec<KindedGrade> = Vec::new();
        let push = |g: KindedGrade, out: &mut Vec<KindedGrade>| -> Result<(), StuckReason> {
            if self.nonzero(&g)? && u.leq(r, &g).map_err(grade_stuck)? && !out.contains(&g) {
                out.push(g);
            }
            Ok(())
        };
        push(r.clone(), &mut out)?;
        let mut cur = r.clone();
        for _ in 0..bound {
            cur = u.add(&cur, &u.one()).map_err(grade_stuck)?;
            push(cur.clone(), &mut out)?;
        }
        push(u.one(), &mut out)?;
        push(available.clone(), &mut out)?;
        if let Some(elems) = u.kind_elements(&available.kind).map_err(grade_stuck)? {
            for g in elems {
                push(g, &mut out)?;
            }
        }
        Ok(out)
    }

    fn var(&self, x: &Name, r: &KindedGrade, env: &GradedEnv, choice: Choice) -> Result<Candidates, StuckReason> {
        let (v, s) = env.get(x).ok_or_else(|| StuckReason::UnboundVariable(x.clone()))?;
        let exhausted = || StuckReason::ResourceExhausted {
            var: x.clone(),
            available: s.clone(),
            demanded: r.clone(),
        };
        let mut pairs: Vec<(KindedGrade, KindedGrade)> = Vec::new();
        match choice {
            Choice::Replay(c) => {
                let u = self.u;
                let ok = &c.var == x
                    && self.nonzero(&c.used)?
                    && u.leq(r, &c.used).map_err(grade_stuck)?
                    && u
                        .leq(&u.add(&c.residual, &c.used).map_err(grade_stuck)?, s)
                        .map_err(grade_stuck)?;
                if ok {
                    pairs.push((c.used.clone(), c.residual.clone()));
                }
            }
            Choice::Policy(ConsumptionPolicy::Minimal) => {
                let tries = if self.nonzero(r)? {
                    vec![r.clone()]
                } else {
                    vec![self.u.one(), s.clone()]
                };
                for used in tries {
                    if !self.nonzero(&used)? || !self.u.leq(r, &used).map_err(grade_stuck)? {
                        continue;
                    }
                    if let Some(res) = self.residuals(s, &used)?.into_iter().next() {
                        pairs.push((used, res));
                        break;
                    }
                }
            }
            Choice::Policy(ConsumptionPolicy::Enumerate { bound }) => {
                for used in self.amounts(r, s, bound)? {
                    for res in self.residuals(s, &used)? {
                        pairs.push((used.clone(), res));
                    }
                }
            }
        }
        if pairs.is_empty() {
            return Err(exhausted());
        }
        Ok(pairs
            .into_iter()
            .map(|(used, residual)| {
                (
                    v.clone(),
                    Delta {
                        set: Some((x.clone(), residual.clone())),
                        add: Vec::new(),
                    },
                    StepInfo {
                        rule: StepRule::Var,
                        consumption: Some(Consumption {
                            var: x.clone(),
                            used,
                            residual,
                        }),
                    },
                )
            })
            .collect())
    }

    fn reduce(&self, e: &AnnExpr, r: &KindedGrade, env: &GradedEnv, choice: Choice) -> Result<Candidates, StuckReason> {
        let u = self.u;
        match e {
            AnnExpr::Var(x) => self.var(x, r, env, choice),
            AnnExpr::Field { recv, grade, field } if !recv.is_value() => {
                let inner = self.reduce(recv, grade, env, choice)?;
                Ok(wrap(inner, |e| AnnExpr::Field {
                    recv: Box::new(e),
                    grade: grade.clone(),
                    field: field.clone(),
                }))
            }
            AnnExpr::Field { recv, grade, field } => {
                let AnnExpr::New { class, args } = &**recv else {
                    unreachable!("values are constructor calls")
                };
                let fields = self
                    .prog
                    .table
                    .fields(class)
                    .map_err(|_| StuckReason::no_member(class, field))?;
                let i = fields
                    .iter()
                    .position(|f| &f.name == field)
                    .filter(|&i| i < args.len())
                    .ok_or_else(|| StuckReason::no_member(class, field))?;
                let (v, ri) = &args[i];
                let have = u.mul(grade, ri).map_err(grade_stuck)?;
                if !u.leq(r, &have).map_err(grade_stuck)? {
                    return Err(StuckReason::FieldExtraction {
                        field: field.clone(),
                        have,
                        demanded: r.clone(),
                    });
                }
                Ok(vec![(
                    v.clone(),
                    Delta::default(),
                    StepInfo {
                        rule: StepRule::FieldAccess,
                        consumption: None,
                    },
                )])
            }
            AnnExpr::New { class, args } => {
                let i = args.iter().position(|(a, _)| !a.is_value()).expect("not a value");
                let (a, ri) = &args[i];
                let g = u.mul(r, ri).map_err(grade_stuck)?;
                let inner = self.reduce(a, &g, env, choice)?;
                Ok(wrap(inner, |e| {
                    let mut args = args.clone();
                    args[i].0 = e;
                    AnnExpr::New {
                        class: class.clone(),
                        args,
                    }
                }))
            }
            AnnExpr::Invk {
                recv,
                grade,
                method,
                args,
            } => {
                if !recv.is_value() {
                    let inner = self.reduce(recv, grade, env, choice)?;
                    return Ok(wrap(inner, |e| AnnExpr::Invk {
                        recv: Box::new(e),
                        grade: grade.clone(),
                        method: method.clone(),
                        args: args.clone(),
                    }));
                }
                if let Some(i) = args.iter().position(|(a, _)| !a.is_value()) {
                    let (a, ri) = &args[i];
                    let inner = self.reduce(a, ri, env, choice)?;
                    return Ok(wrap(inner, |e| {
                        let mut args = args.clone();
                        args[i].0 = e;
                        AnnExpr::Invk {
                            recv: recv.clone(),
                            grade: grade.clone(),
                            method: method.clone(),
                            args,
                        }
                    }));
                }
                let AnnExpr::New { class, .. } = &**recv else {
                    unreachable!("values are constructor calls")
                };
                let (params, body) = self
                    .prog
                    .body(class, method)
                    .map_err(|_| StuckReason::no_member(class, method))?;
                if params.len() != args.len() {
                    return Err(StuckReason::Arity {
                        method: method.clone(),
                        expected: params.len(),
                        found: args.len(),
                    });
                }
                let mut bases: Vec<&str> = vec!["this"];
                bases.extend(params.iter().map(|p| &**p));
                let ys = fresh_names(&bases, env.len(), |n| env.contains(n));
                let mut map = HashMap::new();
                let mut add = Vec::new();
                let vals = std::iter::once((&**recv, grade)).chain(args.iter().map(|(a, g)| (a, g)));
                for ((x, y), (v, g)) in bases.iter().zip(&ys).zip(vals) {
                    map.insert(name(x), y.clone());
                    add.push((y.clone(), v.clone(), g.clone()));
                }
                Ok(vec![(
                    body.subst(&map),
                    Delta { set: None, add },
                    StepInfo {
                        rule: StepRule::Invk,
                        consumption: None,
                    },
                )])
            }
            AnnExpr::Block {
                class,
                var,
                init,
                grade,
                body,
            } => {
                if !init.is_value() {
                    let inner = self.reduce(init, grade, env, choice)?;
                    return Ok(wrap(inner, |e| AnnExpr::Block {
                        class: class.clone(),
                        var: var.clone(),
                        init: Box::new(e),
                        grade: grade.clone(),
                        body: body.clone(),
                    }));
                }
                let y = fresh_names(&[&**var], env.len(), |n| env.contains(n)).remove(0);
                let map = HashMap::from([(var.clone(), y.clone())]);
                Ok(vec![(
                    body.subst(&map),
                    Delta {
                        set: None,
                        add: vec![(y, (**init).clone(), grade.clone())],
                    },
                    StepInfo {
                        rule: StepRule::Block,
                        consumption: None,
                    },
                )])
            }
        }
    }
}

fn wrap(inner: Candidates, f: impl Fn(AnnExpr) -> AnnExpr) -> Candidates {
    inner.into_iter().map(|(e, d, i)| (f(e), d, i)).collect()
}

fn finish(cfg: &GradedConfig, candidates: Candidates) -> Vec<Step> {
    candidates
        .into_iter()
        .map(|(expr, delta, info)| {
            let mut env = cfg.env.clone();
            delta.apply(&mut env);
            Step {
                config: GradedConfig { expr, env },
                info,
            }
        })
        .collect()
}

/// One instrumented step at reduction grade `r`.
pub fn graded_step(
    u: &GradeUniverse,
    prog: &ElaboratedProgram,
    cfg: &GradedConfig,
    r: &KindedGrade,
    policy: ConsumptionPolicy,
) -> StepResult {
    if cfg.expr.is_value() {
        return StepResult::Value;
    }
    let m = Machine { u, prog };
    match m.reduce(&cfg.expr, r, &cfg.env, Choice::Policy(policy)) {
        Ok(c) => StepResult::Next(finish(cfg, c)),
        Err(reason) => StepResult::Stuck(reason),
    }
}

/// Re-executes a step at grade `r`, forcing the `(var)` choice recorded in
/// `info`.
pub fn replay_step(
    u: &GradeUniverse,
    prog: &ElaboratedProgram,
    cfg: &GradedConfig,
    r: &KindedGrade,
    info: &StepInfo,
) -> Result<Step, StuckReason> {
    let m = Machine { u, prog };
    let choice = match &info.consumption {
        Some(c) => Choice::Replay(c),
        None => Choice::Policy(ConsumptionPolicy::Minimal),
    };
    let mut steps = finish(cfg, m.reduce(&cfg.expr, r, &cfg.env, choice)?);
    Ok(steps.remove(0))
}

/// One line of a run's trace: the step taken and the configuration after it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceEntry {
    pub index: usize,
    pub info: StepInfo,
    pub grade: KindedGrade,
    pub config: GradedConfig,
}

impl fmt::Display for TraceEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "#{} [{}] grade={} env={} expr={}",
            self.index, self.info.rule, self.grade, self.config.env, self.config.expr
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Final,
    StuckAt(StuckReason),
    FuelExhausted,
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub policy: ConsumptionPolicy,
    pub fuel: usize,
    /// Keep every intermediate configuration.
    pub record: bool,
}

pub const DEFAULT_FUEL: usize = 100_000;

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            policy: ConsumptionPolicy::Minimal,
            fuel: DEFAULT_FUEL,
            record: false,
        }
    }
}

/// Result of [`graded_run`]. `config` is the last configuration reached;
/// for a search, `trace` is the path to it.
#[derive(Clone, Debug)]
pub struct Run {
    pub outcome: Outcome,
    pub config: GradedConfig,
    pub steps: usize,
    pub trace: Vec<TraceEntry>,
    /// Stuck leaves met by a search before it finished.
    pub stuck_schedules: usize,
}

/// Runs to a value. The minimal policy follows its unique successor; an
/// enumerating policy searches depth-first for a schedule that completes,
/// spending one unit of fuel per expanded configuration.
pub fn graded_run(
    u: &GradeUniverse,
    prog: &ElaboratedProgram,
    cfg: GradedConfig,
    r: &KindedGrade,
    opts: &RunOptions,
) -> Run {
    match opts.policy {
        ConsumptionPolicy::Minimal => run_minimal(u, prog, cfg, r, opts),
        ConsumptionPolicy::Enumerate { .. } => search(u, prog, cfg, r, opts),
    }
}

fn run_minimal(u: &GradeUniverse, prog: &ElaboratedProgram, cfg: GradedConfig, r: &KindedGrade, opts: &RunOptions) -> Run {
    let m = Machine { u, prog };
    let mut cfg = cfg;
    let mut trace = Vec::new();
    let mut steps = 0;
    let outcome = loop {
        if cfg.expr.is_value() {
            break Outcome::Final;
        }
        if steps >= opts.fuel {
            break Outcome::FuelExhausted;
        }
        match m.reduce(&cfg.expr, r, &cfg.env, Choice::Policy(ConsumptionPolicy::Minimal)) {
            Ok(mut c) => {
                let (expr, delta, info) = c.remove(0);
                cfg.expr = expr;
                delta.apply(&mut cfg.env);
                steps += 1;
                if opts.record {
                    trace.push(TraceEntry {
                        index: steps,
                        info,
                        grade: r.clone(),
                        config: cfg.clone(),
                    });
                }
            }
            Err(reason) => break Outcome::StuckAt(reason),
        }
    };
    Run {
        outcome,
        config: cfg,
        steps,
        trace,
        stuck_schedules: 0,
    }
}

fn search(u: &GradeUniverse, prog: &ElaboratedProgram, cfg: GradedConfig, r: &KindedGrade, opts: &RunOptions) -> Run {
    let m = Machine { u, prog };
    // Each frame: configuration, path to it, remaining untried successors.
    let mut stack: Vec<(GradedConfig, Vec<TraceEntry>)> = vec![(cfg.clone(), Vec::new())];
    let mut expanded = 0;
    let mut stuck_schedules = 0;
    let mut first_stuck: Option<(GradedConfig, Vec<TraceEntry>, StuckReason)> = None;
    while let Some((cur, path)) = stack.pop() {
        if cur.expr.is_value() {
            return Run {
                outcome: Outcome::Final,
                config: cur,
                steps: path.len(),
                trace: path,
                stuck_schedules,
            };
        }
        if expanded >= opts.fuel {
            return Run {
                outcome: Outcome::FuelExhausted,
                steps: path.len(),
                config: cur,
                trace: path,
                stuck_schedules,
            };
        }
        expanded += 1;
        match m.reduce(&cur.expr, r, &cur.env, Choice::Policy(opts.policy)) {
            Ok(c) => {
                let next = finish(&cur, c);
                for s in next.into_iter().rev() {
                    let mut p = path.clone();
                    p.push(TraceEntry {
                        index: path.len() + 1,
                        info: s.info,
                        grade: r.clone(),
                        config: s.config.clone(),
                    });
                    stack.push((s.config, p));
                }
            }
            Err(reason) => {
                stuck_schedules += 1;
                if first_stuck.is_none() {
                    first_stuck = Some((cur, path, reason));
                }
            }
        }
    }
    let (config, trace, reason) = first_stuck.expect("a search without a final state met a stuck one");
    Run {
        outcome: Outcome::StuckAt(reason),
        steps: trace.len(),
        config,
        trace,
        stuck_schedules,
    }
}
