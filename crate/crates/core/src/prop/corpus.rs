//! Corpus of `.gfj` programs, each with a JSON manifest of the same stem.
//!
//! ```json
//! { "expect": "accept",
//!   "diagnostics": [],
//!   "universe": "fig5.json",
//!   "run": { "outcome": "final", "steps": 8, "finalEnvGrades": { "a": "N:0" } } }
//! ```
//!
//! Rejected programs may still be run with `"unchecked": true`; their run
//! then uses `"outcome": "stuck"` and names the reason in `"stuck"`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{
    assert_downward_closure, assert_progress, assert_soundness_may, assert_subject_reduction, assert_trace_props,
    grades_below, Report,
};
use crate::exec::Exec;
use crate::hetero::{load_universe, GradeUniverse};
use crate::lang::{name, parse_program, Program};
use crate::runtime::{graded_run, ConsumptionPolicy, GradedConfig, Outcome, RunOptions};
use crate::typing::{annotate_unchecked, check_annotated, check_program, CoeffectCtx, ElaboratedProgram, TypeEnv};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Expectation {
    Accept,
    Reject,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct RunExpectation {
    /// `final`, `fuel` or `stuck`.
    pub outcome: String,
    #[serde(default)]
    pub steps: Option<usize>,
    #[serde(default)]
    pub final_env_grades: Option<BTreeMap<String, String>>,
    /// Stuck reason code, for `stuck` outcomes.
    #[serde(default)]
    pub stuck: Option<String>,
    /// `minimal` (default) or `search`.
    #[serde(default)]
    pub policy: Option<String>,
    #[serde(default)]
    pub fuel: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub expect: Expectation,
    #[serde(default)]
    pub diagnostics: Vec<String>,
    #[serde(default)]
    pub run: Option<RunExpectation>,
    /// Universe file, relative to the manifest.
    #[serde(default)]
    pub universe: Option<String>,
    /// Run the program through [`annotate_unchecked`] instead of the checker.
    #[serde(default)]
    pub unchecked: bool,
}

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub name: String,
    pub path: PathBuf,
    pub source: String,
    pub manifest: Manifest,
    pub universe: GradeUniverse,
}

/// Loads every `.gfj` file of `dir` with its manifest, sorted by name.
pub fn load_corpus(dir: &Path) -> Result<Vec<CorpusEntry>, String> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| format!("{}: {e}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "gfj"))
        .collect();
    paths.sort();
    let mut out = Vec::with_capacity(paths.len());
    for path in paths {
        let source = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
        let mpath = path.with_extension("json");
        let mtext = std::fs::read_to_string(&mpath).map_err(|e| format!("{}: {e}", mpath.display()))?;
        let manifest: Manifest =
            serde_json::from_str(&mtext).map_err(|e| format!("{}: {e}", mpath.display()))?;
        let universe = match &manifest.universe {
            None => GradeUniverse::default(),
            Some(f) => {
                let upath = dir.join(f);
                load_universe(&upath)
                    .map_err(|e| format!("{}: {e}", upath.display()))?
                    .map_err(|e| format!("{}: {e}", upath.display()))?
            }
        };
        let name = path.file_stem().unwrap_or_default().to_string_lossy().into_owned();
        out.push(CorpusEntry {
            name,
            path,
            source,
            manifest,
            universe,
        });
    }
    Ok(out)
}

/// What verifying one entry found.
#[derive(Clone, Debug, Default)]
pub struct EntryReport {
    pub name: String,
    /// Mismatches against the manifest.
    pub verdict: Vec<String>,
    pub progress: Report,
    pub soundness: Report,
    pub subject_reduction: Report,
    pub step_props: Report,
    pub downward_closure: Report,
    pub round_trip: Report,
}

impl EntryReport {
    pub fn ok(&self) -> bool {
        self.verdict.is_empty()
            && [
                &self.progress,
                &self.soundness,
                &self.subject_reduction,
                &self.step_props,
                &self.downward_closure,
                &self.round_trip,
            ]
            .iter()
            .all(|r| r.ok())
    }
}

/// Default fuel for corpus runs.
pub const CORPUS_FUEL: usize = 10_000;

/// Number of lower grades used for downward closure.
pub const CLOSURE_SAMPLES: usize = 25;

impl CorpusEntry {
    pub fn program(&self) -> Result<Program, String> {
        parse_program(&self.source, &self.universe).map_err(|e| e.to_string())
    }

    /// Checks the manifest and, for accepted programs, every theorem.
    pub fn verify(&self) -> EntryReport {
        let mut rep = EntryReport {
            name: self.name.clone(),
            ..EntryReport::default()
        };
        let u = &self.universe;
        let program = match self.program() {
            Ok(p) => p,
            Err(e) => {
                rep.verdict.push(format!("parse error: {e}"));
                return rep;
            }
        };
        let m = &self.manifest;
        let checked = check_program(u, &program);
        match (&checked, m.expect) {
            (Ok(_), Expectation::Reject) => rep.verdict.push("accepted, expected rejection".into()),
            (Err(d), Expectation::Accept) => rep.verdict.push(format!("rejected: {}", d[0])),
            (Err(d), Expectation::Reject) => {
                let codes: Vec<&str> = d.iter().map(|d| d.code()).collect();
                if !m.diagnostics.is_empty() && codes != m.diagnostics {
                    rep.verdict.push(format!("diagnostics {codes:?}, expected {:?}", m.diagnostics));
                }
            }
            (Ok(_), Expectation::Accept) => {}
        }
        let fuel = m.run.as_ref().and_then(|r| r.fuel).unwrap_or(CORPUS_FUEL);
        if let Ok(ep) = &checked {
            rep.round_trip = assert_round_trip(u, &program, ep);
            rep.soundness = assert_soundness_may(u, ep, fuel).0;
            rep.subject_reduction = assert_subject_reduction(u, ep, fuel);
            let run = graded_run(
                u,
                ep,
                GradedConfig::new(ep.main.clone()),
                ep.grade(),
                &RunOptions {
                    fuel,
                    record: true,
                    ..RunOptions::default()
                },
            );
            let initial = GradedConfig::new(ep.main.clone());
            let mut configs = vec![&initial];
            configs.extend(run.trace.iter().map(|t| &t.config));
            for c in configs {
                rep.progress.merge(assert_progress(u, ep, c, ep.grade(), &ep.main_type));
            }
            let lower = grades_below(u, ep.grade(), CLOSURE_SAMPLES);
            rep.step_props = assert_trace_props(u, ep, &initial, &run.trace, &lower[..lower.len().min(3)]);
            rep.downward_closure = assert_downward_closure(u, ep, &initial, &run.trace, &lower);
        }
        if let Some(expect) = &m.run {
            let ep = if m.unchecked {
                annotate_unchecked(u, &program).map_err(|e| e.to_string())
            } else {
                checked.clone().map_err(|d| d[0].to_string())
            };
            match ep {
                Ok(ep) => rep.verdict.extend(compare_run(u, &ep, expect, fuel)),
                Err(e) => rep.verdict.push(format!("cannot run: {e}")),
            }
        }
        rep
    }
}

fn compare_run(u: &GradeUniverse, ep: &ElaboratedProgram, expect: &RunExpectation, fuel: usize) -> Vec<String> {
    let mut out = Vec::new();
    let policy = match expect.policy.as_deref() {
        Some("search") => ConsumptionPolicy::Enumerate { bound: 4 },
        _ => ConsumptionPolicy::Minimal,
    };
    let run = graded_run(
        u,
        ep,
        GradedConfig::new(ep.main.clone()),
        ep.grade(),
        &RunOptions {
            policy,
            fuel,
            record: false,
        },
    );
    let (outcome, code) = match &run.outcome {
        Outcome::Final => ("final", None),
        Outcome::FuelExhausted => ("fuel", None),
        Outcome::StuckAt(r) => ("stuck", Some(r.code())),
    };
    if outcome != expect.outcome {
        out.push(format!("run outcome {outcome} ({:?}), expected {}", run.outcome, expect.outcome));
    }
    if let (Some(want), Some(got)) = (&expect.stuck, code) {
        if want != got {
            out.push(format!("stuck reason {got}, expected {want}"));
        }
    }
    if let Some(n) = expect.steps {
        if n != run.steps {
            out.push(format!("{} steps, expected {n}", run.steps));
        }
    }
    if let Some(want) = &expect.final_env_grades {
        for (x, g) in want {
            let got = run.config.env.grade(x).map(|g| g.to_string());
            if got.as_deref() != Some(g.as_str()) {
                out.push(format!("final grade of {x} is {got:?}, expected {g}"));
            }
        }
    }
    out
}

/// Elaborate-then-recheck: erasing each elaboration gives back the source,
/// and the annotated checker accepts it within the source typing.
pub fn assert_round_trip(u: &GradeUniverse, program: &Program, ep: &ElaboratedProgram) -> Report {
    let mut rep = Report::default();
    rep.checked += 1;
    if ep.main.erase() != program.main.strip() {
        rep.fail(format!("main erases to {}, source is {}", ep.main.erase(), program.main.strip()));
    }
    match check_annotated(u, &program.table, &TypeEnv::new(), &ep.main, &ep.main_type) {
        Ok(ctx) if ctx.is_empty() => {}
        Ok(ctx) => rep.fail(format!("main recheck uses {ctx}")),
        Err(d) => rep.fail(format!("main recheck fails: {d}")),
    }
    for class in program.table.classes() {
        for md in &class.methods {
            rep.checked += 1;
            let Some(body) = ep.bodies.get(&(class.name.clone(), md.name.clone())) else {
                rep.fail(format!("{}.{} has no elaboration", class.name, md.name));
                continue;
            };
            if body.erase() != md.body.strip() {
                rep.fail(format!("{}.{} does not erase to its source", class.name, md.name));
            }
            let mut env = TypeEnv::new().with_budget(name("this"), class.name.clone(), md.this_grade.clone());
            let mut declared = CoeffectCtx::new();
            declared.insert(name("this"), class.name.clone(), md.this_grade.clone());
            for p in &md.params {
                env = env.with_budget(p.name.clone(), p.ty.class.clone(), p.ty.grade.clone());
                declared.insert(p.name.clone(), p.ty.class.clone(), p.ty.grade.clone());
            }
            match check_annotated(u, &program.table, &env, body, &md.ret) {
                Ok(ctx) => {
                    let within = ctx.iter().all(|(x, _, g)| {
                        declared.grade(x).is_some_and(|d| u.leq(g, d).unwrap_or(false))
                    });
                    if !within {
                        rep.fail(format!("{}.{} recheck uses {ctx}", class.name, md.name));
                    }
                }
                Err(d) => rep.fail(format!("{}.{} recheck fails: {d}", class.name, md.name)),
            }
        }
    }
    rep
}

/// Verifies all entries, in parallel when `exec` allows.
pub fn verify_corpus(entries: &[CorpusEntry], exec: Exec) -> Vec<EntryReport> {
    exec.map(entries, CorpusEntry::verify)
}
