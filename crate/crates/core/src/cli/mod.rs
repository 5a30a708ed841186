//! `gradefj check|run|laws`.
//!
//! Exit codes:
//!
//! | code | check | run | laws |
//! |------|-------|-----|------|
//! | 0 | accepted | value or fuel exhausted | all laws hold |
//! | 1 | rejected | rejected by the checker | |
//! | 2 | parse or universe error | parse or universe error | a law fails, or the universe is malformed |
//! | 3 | I/O error | I/O error | I/O error |
//! | 4 | | stuck | |

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::exec::Exec;
use crate::grades::{validate_algebra_with, LawReport};
use crate::hetero::{check_universe_laws_with, parse_declared_algebras, parse_universe, GradeUniverse};
use crate::lang::parse_program;
use crate::runtime::{
    graded_run, std_run, ConsumptionPolicy, GradedConfig, Outcome, RunOptions, StdConfig, StdOutcome,
};
use crate::typing::{annotate_unchecked, check_program};

pub const EXIT_OK: i32 = 0;
pub const EXIT_REJECTED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_STUCK: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "gradefj", version, about = "Graded Featherweight Java: check, run, validate grade universes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Type-check a program.
    Check {
        file: PathBuf,
        #[arg(long)]
        universe: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Check a program, then run it with the instrumented semantics.
    Run {
        file: PathBuf,
        #[arg(long)]
        universe: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Policy::Minimal)]
        policy: Policy,
        #[arg(long, default_value_t = crate::runtime::DEFAULT_FUEL as u64, value_parser = clap::value_parser!(u64).range(1..))]
        fuel: u64,
        /// Print every step.
        #[arg(long)]
        trace: bool,
        /// Run the erased program with the ungraded semantics.
        #[arg(long)]
        standard: bool,
        /// Skip the checker and keep hand-written annotations.
        #[arg(long)]
        unchecked: bool,
        #[arg(long)]
        json: bool,
    },
    /// Validate the laws of every algebra and of the universe.
    Laws {
        /// Universe file; the built-in default when omitted.
        universe: Option<PathBuf>,
        /// Sampled triples for infinite algebras.
        #[arg(long, default_value_t = crate::grades::DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Policy {
    Minimal,
    Search,
}

impl Policy {
    fn consumption(self) -> ConsumptionPolicy {
        match self {
            Policy::Minimal => ConsumptionPolicy::Minimal,
            Policy::Search => ConsumptionPolicy::Enumerate { bound: 4 },
        }
    }
}

/// Runs a parsed command line, writing results to `out` and errors to `err`.
pub fn execute(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let res = match cli.command {
        Command::Check { file, universe, json } => cmd_check(&file, universe.as_deref(), json, out),
        Command::Run {
            file,
            universe,
            policy,
            fuel,
            trace,
            standard,
            unchecked,
            json,
        } => {
            let flags = RunFlags {
                policy,
                fuel: fuel as usize,
                trace,
                standard,
                unchecked,
                json,
            };
            cmd_run(&file, universe.as_deref(), &flags, out)
        }
        Command::Laws { universe, samples, json } => cmd_laws(universe.as_deref(), samples, json, out),
    };
    match res {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            let _ = writeln!(err, "gradefj: {msg}");
            code
        }
    }
}

struct Failure(i32, String);

type CmdResult = Result<i32, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure(EXIT_IO, format!("{}: {e}", path.display())))
}

fn load_universe(path: Option<&Path>) -> Result<GradeUniverse, Failure> {
    match path {
        None => Ok(GradeUniverse::default()),
        Some(p) => parse_universe(&read(p)?).map_err(|e| Failure(EXIT_INPUT, format!("{}: {e}", p.display()))),
    }
}

fn emit(out: &mut dyn Write, text: impl std::fmt::Display) -> Result<(), Failure> {
    writeln!(out, "{text}").map_err(|e| Failure(EXIT_IO, e.to_string()))
}

fn emit_json(out: &mut dyn Write, v: &impl Serialize) -> Result<(), Failure> {
    let s = serde_json::to_string_pretty(v).expect("values serialize");
    emit(out, s)
}

fn load_program(file: &Path, universe: &GradeUniverse) -> Result<crate::lang::Program, Failure> {
    let text = read(file)?;
    parse_program(&text, universe).map_err(|e| Failure(EXIT_INPUT, format!("{}:{e}", file.display())))
}

fn cmd_check(file: &Path, universe: Option<&Path>, json: bool, out: &mut dyn Write) -> CmdResult {
    let u = load_universe(universe)?;
    let program = load_program(file, &u)?;
    match check_program(&u, &program) {
        Ok(ep) => {
            if json {
                emit_json(out, &json!({ "accepted": true, "type": ep.main_type.to_string(), "diagnostics": [] }))?;
            } else {
                emit(out, format!("ok: {}", ep.main_type))?;
            }
            Ok(EXIT_OK)
        }
        Err(diags) => {
            if json {
                emit_json(out, &json!({ "accepted": false, "diagnostics": diags }))?;
            } else {
                for d in &diags {
                    emit(out, format!("{}:{d}", file.display()))?;
                }
            }
            Ok(EXIT_REJECTED)
        }
    }
}

struct RunFlags {
    policy: Policy,
    fuel: usize,
    trace: bool,
    standard: bool,
    unchecked: bool,
    json: bool,
}

fn cmd_run(file: &Path, universe: Option<&Path>, flags: &RunFlags, out: &mut dyn Write) -> CmdResult {
    let u = load_universe(universe)?;
    let program = load_program(file, &u)?;
    let ep = if flags.unchecked {
        annotate_unchecked(&u, &program).map_err(|e| Failure(EXIT_INPUT, e.to_string()))?
    } else {
        match check_program(&u, &program) {
            Ok(ep) => ep,
            Err(diags) => {
                if flags.json {
                    emit_json(out, &json!({ "outcome": "rejected", "diagnostics": diags }))?;
                } else {
                    for d in &diags {
                        emit(out, format!("{}:{d}", file.display()))?;
                    }
                }
                return Ok(EXIT_REJECTED);
            }
        }
    };

    if flags.standard {
        let run = std_run(&ep.table, StdConfig::new(ep.main.erase()), flags.fuel);
        let (outcome, stuck, code) = match &run.outcome {
            StdOutcome::Final => ("final", None, EXIT_OK),
            StdOutcome::FuelExhausted => ("fuel", None, EXIT_OK),
            StdOutcome::Stuck(r) => ("stuck", Some(r), EXIT_STUCK),
        };
        let env: Vec<String> = run.config.env.iter().map(|(x, _)| x.to_string()).collect();
        if flags.json {
            emit_json(
                out,
                &json!({
                    "outcome": outcome,
                    "steps": run.steps,
                    "value": run.config.expr.to_string(),
                    "stuck": stuck.map(|r| json!({ "code": r.code(), "message": r.to_string() })),
                    "env": env,
                }),
            )?;
        } else {
            report_outcome(out, outcome, stuck.map(|r| r.to_string()), run.steps)?;
            emit(out, format!("{}: {}", expr_label(outcome), run.config.expr))?;
            emit(out, format!("env: {}", env.join(" ")))?;
        }
        return Ok(code);
    }

    let opts = RunOptions {
        policy: flags.policy.consumption(),
        fuel: flags.fuel,
        record: flags.trace,
    };
    let run = graded_run(&u, &ep, GradedConfig::new(ep.main.clone()), ep.grade(), &opts);
    let (outcome, stuck, code) = match &run.outcome {
        Outcome::Final => ("final", None, EXIT_OK),
        Outcome::FuelExhausted => ("fuel", None, EXIT_OK),
        Outcome::StuckAt(r) => ("stuck", Some(r), EXIT_STUCK),
    };
    let env: BTreeMap<String, String> = run
        .config
        .env
        .grades()
        .into_iter()
        .map(|(x, g)| (x.to_string(), g.to_string()))
        .collect();
    if flags.json {
        let mut v = json!({
            "outcome": outcome,
            "steps": run.steps,
            "grade": ep.grade().to_string(),
            "value": run.config.expr.erase().to_string(),
            "env": env,
            "stuck": stuck.map(|r| json!({ "code": r.code(), "message": r.to_string() })),
        });
        if matches!(flags.policy, Policy::Search) {
            v["stuckSchedules"] = json!(run.stuck_schedules);
        }
        if flags.trace {
            v["trace"] = json!(run.trace.iter().map(|t| t.to_string()).collect::<Vec<_>>());
        }
        emit_json(out, &v)?;
    } else {
        for t in &run.trace {
            emit(out, t)?;
        }
        report_outcome(out, outcome, stuck.map(|r| r.to_string()), run.steps)?;
        if matches!(flags.policy, Policy::Search) && stuck.is_some() {
            emit(out, format!("stuck schedules: {}", run.stuck_schedules))?;
        }
        emit(out, format!("{}: {}", expr_label(outcome), run.config.expr.erase()))?;
        // names never contain spaces, so this stays parseable
        let env: Vec<String> = run.config.env.grades().iter().map(|(x, g)| format!("{x}:{g}")).collect();
        emit(out, format!("env: {}", env.join(" ")))?;
    }
    Ok(code)
}

fn expr_label(outcome: &str) -> &'static str {
    if outcome == "final" {
        "value"
    } else {
        "expr"
    }
}

fn report_outcome(out: &mut dyn Write, outcome: &str, stuck: Option<String>, steps: usize) -> Result<(), Failure> {
    match outcome {
        "final" => emit(out, format!("final after {steps} steps")),
        "fuel" => emit(out, format!("fuel exhausted after {steps} steps (divergent within fuel)")),
        _ => emit(out, format!("stuck after {steps} steps: {}", stuck.unwrap_or_default())),
    }
}

#[derive(Serialize)]
struct LawsOutput {
    algebras: Vec<(String, LawReport)>,
    universe: Option<LawReport>,
    error: Option<String>,
    passed: bool,
}

fn cmd_laws(universe: Option<&Path>, samples: usize, json: bool, out: &mut dyn Write) -> CmdResult {
    let exec = Exec::default();
    let text = match universe {
        Some(p) => Some(read(p)?),
        None => None,
    };
    let declared = match &text {
        Some(t) => parse_declared_algebras(t).map_err(|e| Failure(EXIT_INPUT, e.to_string()))?,
        None => vec![
            ("A".into(), crate::grades::AlgebraSpec::Affinity),
            ("P".into(), crate::grades::AlgebraSpec::privacy()),
        ],
    };
    let algebras: Vec<(String, LawReport)> = declared
        .iter()
        .map(|(k, spec)| (k.clone(), validate_algebra_with(spec, exec, samples)))
        .collect();
    let (universe_report, error) = match &text {
        None => (Some(check_universe_laws_with(&GradeUniverse::default(), 10, 64, exec)), None),
        Some(t) => match parse_universe(t) {
            Ok(u) => (Some(check_universe_laws_with(&u, 10, 64, exec)), None),
            Err(e) => (None, Some(e.to_string())),
        },
    };
    let passed = error.is_none()
        && algebras.iter().all(|(_, r)| r.passed())
        && universe_report.as_ref().is_some_and(|r| r.passed());
    if json {
        emit_json(
            out,
            &LawsOutput {
                algebras,
                universe: universe_report,
                error,
                passed,
            },
        )?;
    } else {
        for (k, r) in &algebras {
            print_report(out, &format!("kind {k}"), r)?;
        }
        if let Some(r) = &universe_report {
            print_report(out, "universe", r)?;
        }
        if let Some(e) = &error {
            emit(out, format!("universe: invalid: {e}"))?;
        }
        emit(out, if passed { "all laws hold" } else { "law check failed" })?;
    }
    Ok(if passed { EXIT_OK } else { EXIT_INPUT })
}

fn print_report(out: &mut dyn Write, title: &str, r: &LawReport) -> Result<(), Failure> {
    let how = if r.exhaustive { "exhaustive" } else { "sampled" };
    emit(out, format!("{title}: {} cases, {how}", r.cases))?;
    for law in &r.laws {
        match r.violations.iter().find(|v| v.law == *law) {
            None => emit(out, format!("  {law}: pass"))?,
            Some(v) => emit(out, format!("  {law}: FAIL at ({}): {}", v.witness.join(", "), v.detail))?,
        }
    }
    Ok(())
}
