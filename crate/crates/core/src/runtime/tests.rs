use super::*;
use crate::hetero::{GradeUniverse, KindedGrade};
use crate::lang::{name, parse_program, AnnExpr, FjExpr};
use crate::typing::{annotate_unchecked, check_program, ElaboratedProgram};

fn u() -> GradeUniverse {
    GradeUniverse::default()
}

const PAIRS: &str = "class A {} class Pair { A[1] first; A[1] second; }";
const PRIV_PAIRS: &str = "class A {} class Pair { A[P:public] first; A[P:public] second; }";

fn checked(text: &str) -> ElaboratedProgram {
    check_program(&u(), &parse_program(text, &u()).unwrap()).unwrap()
}

fn unchecked(text: &str) -> ElaboratedProgram {
    annotate_unchecked(&u(), &parse_program(text, &u()).unwrap()).unwrap()
}

fn run(p: &ElaboratedProgram, opts: &RunOptions) -> Run {
    graded_run(&u(), p, GradedConfig::new(p.main.clone()), p.grade(), opts)
}

fn recorded() -> RunOptions {
    RunOptions {
        record: true,
        ..RunOptions::default()
    }
}

fn grades(env: &GradedEnv) -> Vec<(String, String)> {
    env.grades().into_iter().map(|(x, g)| (x.to_string(), g.to_string())).collect()
}

fn ex31() -> String {
    format!("{PAIRS} run {{A[4] a = new A(); {{Pair[2] p = new Pair(a, a); new Pair(p.first, p.second)}}}} at 1")
}

#[test]
fn naturals_trace() {
    let p = checked(&ex31());
    let r = run(&p, &recorded());
    assert_eq!(r.outcome, Outcome::Final);
    let rules: Vec<String> = r.trace.iter().map(|t| t.info.rule.to_string()).collect();
    assert_eq!(
        rules,
        ["block", "var", "var", "block", "var", "field-access", "var", "field-access"]
    );
    let a: Vec<String> = r
        .trace
        .iter()
        .map(|t| t.config.env.grade("a").unwrap().to_string())
        .collect();
    assert_eq!(a, ["N:4", "N:2", "N:0", "N:0", "N:0", "N:0", "N:0", "N:0"]);
    let ps: Vec<String> = r.trace[3..]
        .iter()
        .map(|t| t.config.env.grade("p").unwrap().to_string())
        .collect();
    assert_eq!(ps, ["N:2", "N:1", "N:1", "N:0", "N:0"]);
    assert_eq!(grades(&r.config.env), [("a".into(), "N:0".into()), ("p".into(), "N:0".into())]);
    assert_eq!(r.config.expr.erase().to_string(), "new Pair(new A(), new A())");
}

fn ex32(first: &str, a: u64, p: u64) -> String {
    format!("{PAIRS} run {{A[{a}] a = new A(); {{Pair[{p}] p = new Pair(a, a); new Pair({first}, p.second)}}}} at 1")
}

#[test]
fn naturals_stuck_variants() {
    let r = run(&unchecked(&ex32("p@N:1.first^N:2", 4, 2)), &RunOptions::default());
    assert_eq!(
        r.outcome,
        Outcome::StuckAt(StuckReason::FieldExtraction {
            field: name("first"),
            have: KindedGrade::nat(1),
            demanded: KindedGrade::nat(2),
        })
    );
    let r = run(&unchecked(&ex32("p@N:2.first^N:2", 4, 2)), &RunOptions::default());
    assert!(
        matches!(&r.outcome, Outcome::StuckAt(StuckReason::ResourceExhausted { var, .. }) if &**var == "p"),
        "{:?}",
        r.outcome
    );
    let search = RunOptions {
        policy: ConsumptionPolicy::Enumerate { bound: 4 },
        ..RunOptions::default()
    };
    let r = run(&unchecked(&ex32("p@N:2.first^N:2", 4, 2)), &search);
    assert!(matches!(r.outcome, Outcome::StuckAt(_)));
    assert!(r.stuck_schedules > 1);
    let r = run(&unchecked(&ex32("p@N:2.first^N:2", 6, 3)), &RunOptions::default());
    assert_eq!(r.outcome, Outcome::Final);
    assert_eq!(grades(&r.config.env), [("a".into(), "N:0".into()), ("p".into(), "N:0".into())]);
}

fn privacy(main: &str, at: &str) -> Run {
    run(
        &unchecked(&format!("{PRIV_PAIRS} run {main} at {at}")),
        &recorded(),
    )
}

#[test]
fn privacy_runs() {
    let e1 = "{A[P:public] y = new A(); {A[P:private] x = y; x}}";
    assert_eq!(privacy(e1, "P:private").outcome, Outcome::Final);
    assert!(matches!(privacy(e1, "P:public").outcome, Outcome::StuckAt(StuckReason::ResourceExhausted { .. })));
    let e2 = "{A[P:private] y = new A(); {A[P:public] x = y; x}}";
    let r = privacy(e2, "P:private");
    assert!(matches!(r.outcome, Outcome::StuckAt(StuckReason::ResourceExhausted { .. })));
    assert_eq!(r.steps, 1);
    let e3 = "{A[P:public] x = new A(); new Pair(x^P:public, x^P:private)}";
    for (recv, field, at, ok) in [
        ("public", "first", "public", true),
        ("public", "second", "public", false),
        ("private", "first", "public", false),
        ("private", "second", "public", false),
        ("public", "first", "private", true),
        ("public", "second", "private", true),
        ("private", "first", "private", true),
        ("private", "second", "private", true),
    ] {
        let r = privacy(&format!("{e3}@P:{recv}.{field}"), &format!("P:{at}"));
        assert_eq!(r.outcome == Outcome::Final, ok, "{recv} {field} {at}: {:?}", r.outcome);
        if !ok {
            assert!(matches!(r.outcome, Outcome::StuckAt(StuckReason::FieldExtraction { .. })));
        }
    }
}

#[test]
fn every_step_satisfies_the_step_properties() {
    let uu = u();
    let p = checked(&ex31());
    let r = run(&p, &recorded());
    let lower: Vec<KindedGrade> = (0..=1).map(KindedGrade::nat).collect();
    let mut before = GradedConfig::new(p.main.clone());
    for t in &r.trace {
        let step = Step {
            config: t.config.clone(),
            info: t.info.clone(),
        };
        let props = props_step(&uu, &p, &before, p.grade(), &step, &lower);
        assert!(props.ok(), "{:?}", props);
        before = t.config.clone();
    }
}

#[test]
fn fabricated_growth_is_reported() {
    let uu = u();
    let p = checked(&ex31());
    let r = run(&p, &recorded());
    let before = r.trace[0].config.clone();
    let mut after = r.trace[1].clone();
    after.config.env.set_grade("a", KindedGrade::nat(9));
    let step = Step {
        config: after.config,
        info: after.info,
    };
    let props = props_step(&uu, &p, &before, p.grade(), &step, &[]);
    assert_eq!(props.env_monotone.len(), 1);
}

#[test]
fn standard_semantics_agrees_with_erasure() {
    let p = checked(&ex31());
    let graded = run(&p, &RunOptions::default());
    let std = std_run(&p.table, StdConfig::new(p.main.erase()), 100);
    assert_eq!(std.outcome, StdOutcome::Final);
    assert_eq!(std.steps, graded.steps);
    assert_eq!(std.config.expr, graded.config.expr.erase());
    assert_eq!(std.config.env, graded.config.env.erase());
}

#[test]
fn standard_steps() {
    let p = checked(&format!("{PAIRS} run new A() at 1"));
    let v = FjExpr::New(name("A"), vec![]);
    let pair = FjExpr::New(name("Pair"), vec![v.clone(), v.clone()]);
    let cfg = StdConfig::new(FjExpr::Field(Box::new(pair), name("first")));
    assert_eq!(std_step(&p.table, &cfg).unwrap().unwrap().expr, v);
    let cfg = StdConfig::new(FjExpr::Var(name("x")));
    assert_eq!(std_step(&p.table, &cfg), Err(StuckReason::UnboundVariable(name("x"))));
    assert_eq!(std_step(&p.table, &StdConfig::new(v)), Ok(None));
}

#[test]
fn methods_bind_fresh_names() {
    let text = "class A {} class C { A[1] id(A[1] x) [1] { x } }
        run {C[2] c = new C(); new Pair2(c.id(new A()), c.id(new A()))} at 1";
    let text = format!("class Pair2 {{ A[1] l; A[1] r; }} {text}");
    let p = checked(&text);
    let r = run(&p, &recorded());
    assert_eq!(r.outcome, Outcome::Final);
    let names: Vec<String> = r.config.env.names().map(|n| n.to_string()).collect();
    assert_eq!(names, ["c", "this", "x", "this$3", "x$4"]);
}

#[test]
fn divergence_exhausts_fuel() {
    let p = checked("class L { L[1] go() [1] { this.go() } } run new L().go() at 1");
    let r = run(
        &p,
        &RunOptions {
            fuel: 1000,
            ..RunOptions::default()
        },
    );
    assert_eq!(r.outcome, Outcome::FuelExhausted);
    assert_eq!(r.steps, 1000);
}

#[test]
fn zero_demand_burns_a_unit() {
    let p = checked(&format!(
        "{PAIRS} run {{A[4] a = new A(); {{Pair[0] p = new Pair(a, a); new Pair(a, a)}}}} at 1"
    ));
    let r = run(&p, &RunOptions::default());
    assert_eq!(r.outcome, Outcome::Final);
    assert_eq!(r.config.env.grade("a"), Some(&KindedGrade::nat(0)));
}

#[test]
fn fresh_name_policy() {
    let taken = |s: &str| s == "x" || s == "x$2";
    assert_eq!(fresh_names(&["y"], 2, taken), [name("y")]);
    assert_eq!(fresh_names(&["x"], 2, taken), [name("x$3")]);
    assert_eq!(fresh_names(&["x$2", "x"], 2, taken), [name("x$3"), name("x$4")]);
}

#[test]
fn values_do_not_step() {
    let p = checked(&format!("{PAIRS} run new A() at 1"));
    let v = GradedConfig::new(AnnExpr::New { class: name("A"), args: vec![] });
    assert_eq!(graded_step(&u(), &p, &v, &KindedGrade::nat(1), ConsumptionPolicy::Minimal), StepResult::Value);
}
