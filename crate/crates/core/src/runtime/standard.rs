//! Ungraded small-step reduction on configurations `⟨e | ρ⟩`.

use std::collections::HashMap;

use super::{fresh_names, StdEnv, StuckReason};
use crate::lang::{ClassTable, FjExpr, Name};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StdConfig {
    pub expr: FjExpr,
    pub env: StdEnv,
}

impl StdConfig {
    pub fn new(expr: FjExpr) -> Self {
        StdConfig {
            expr,
            env: StdEnv::new(),
        }
    }
}

/// Environment additions made by one step.
type Added = Vec<(Name, FjExpr)>;

fn reduce(table: &ClassTable, e: &FjExpr, env: &StdEnv) -> Result<(FjExpr, Added), StuckReason> {
    match e {
        FjExpr::Var(x) => env
            .get(x)
            .map(|v| (v.clone(), Vec::new()))
            .ok_or_else(|| StuckReason::UnboundVariable(x.clone())),
        FjExpr::Field(recv, f) if !recv.is_value() => {
            let (r, added) = reduce(table, recv, env)?;
            Ok((FjExpr::Field(Box::new(r), f.clone()), added))
        }
        FjExpr::Field(recv, f) => {
            let FjExpr::New(c, args) = &**recv else {
                unreachable!("values are constructor calls")
            };
            let fields = table.fields(c).map_err(|_| StuckReason::no_member(c, f))?;
            let i = fields
                .iter()
                .position(|fd| &fd.name == f)
                .filter(|&i| i < args.len())
                .ok_or_else(|| StuckReason::no_member(c, f))?;
            Ok((args[i].clone(), Vec::new()))
        }
        FjExpr::New(c, args) => {
            let i = args.iter().position(|a| !a.is_value()).expect("not a value");
            let (a, added) = reduce(table, &args[i], env)?;
            let mut args = args.clone();
            args[i] = a;
            Ok((FjExpr::New(c.clone(), args), added))
        }
        FjExpr::Invk(recv, m, args) => {
            if !recv.is_value() {
                let (r, added) = reduce(table, recv, env)?;
                return Ok((FjExpr::Invk(Box::new(r), m.clone(), args.clone()), added));
            }
            if let Some(i) = args.iter().position(|a| !a.is_value()) {
                let (a, added) = reduce(table, &args[i], env)?;
                let mut args = args.clone();
                args[i] = a;
                return Ok((FjExpr::Invk(recv.clone(), m.clone(), args), added));
            }
            let FjExpr::New(c, _) = &**recv else {
                unreachable!("values are constructor calls")
            };
            let (params, body) = table.mbody(c, m).map_err(|_| StuckReason::no_member(c, m))?;
            if params.len() != args.len() {
                return Err(StuckReason::Arity {
                    method: m.clone(),
                    expected: params.len(),
                    found: args.len(),
                });
            }
            let mut bases: Vec<&str> = vec!["this"];
            bases.extend(params.iter().map(|p| &**p));
            let ys = fresh_names(&bases, env.len(), |n| env.contains(n));
            let mut map = HashMap::new();
            let mut added = Vec::new();
            for ((x, y), v) in bases.iter().zip(&ys).zip(std::iter::once(&**recv).chain(args)) {
                map.insert(crate::lang::name(x), y.clone());
                added.push((y.clone(), v.clone()));
            }
            Ok((body.strip().subst(&map), added))
        }
        FjExpr::Block {
            class,
            var,
            init,
            body,
        } => {
            if !init.is_value() {
                let (i, added) = reduce(table, init, env)?;
                return Ok((
                    FjExpr::Block {
                        class: class.clone(),
                        var: var.clone(),
                        init: Box::new(i),
                        body: body.clone(),
                    },
                    added,
                ));
            }
            let y = fresh_names(&[var], env.len(), |n| env.contains(n)).remove(0);
            let map = HashMap::from([(var.clone(), y.clone())]);
            Ok((body.subst(&map), vec![(y, (**init).clone())]))
        }
    }
}

/// One step of the standard semantics; `Ok(None)` on values.
pub fn std_step(table: &ClassTable, cfg: &StdConfig) -> Result<Option<StdConfig>, StuckReason> {
    if cfg.expr.is_value() {
        return Ok(None);
    }
    let (expr, added) = reduce(table, &cfg.expr, &cfg.env)?;
    let mut env = cfg.env.clone();
    for (x, v) in added {
        env.insert(x, v);
    }
    Ok(Some(StdConfig { expr, env }))
}

/// Outcome of a standard run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StdOutcome {
    Final,
    Stuck(StuckReason),
    FuelExhausted,
}

#[derive(Clone, Debug)]
pub struct StdRun {
    pub outcome: StdOutcome,
    pub config: StdConfig,
    pub steps: usize,
}

/// Iterates [`std_step`] until a value, a stuck state, or `fuel` steps.
pub fn std_run(table: &ClassTable, cfg: StdConfig, fuel: usize) -> StdRun {
    let mut cfg = cfg;
    let mut steps = 0;
    loop {
        if cfg.expr.is_value() {
            return StdRun {
                outcome: StdOutcome::Final,
                config: cfg,
                steps,
            };
        }
        if steps >= fuel {
            return StdRun {
                outcome: StdOutcome::FuelExhausted,
                config: cfg,
                steps,
            };
        }
        match reduce(table, &cfg.expr, &cfg.env) {
            Ok((expr, added)) => {
                cfg.expr = expr;
                for (x, v) in added {
                    cfg.env.insert(x, v);
                }
                steps += 1;
            }
            Err(r) => {
                return StdRun {
                    outcome: StdOutcome::Stuck(r),
                    config: cfg,
                    steps,
                }
            }
        }
    }
}
