use super::*;
use crate::lang::parse_program;
use crate::runtime::StepResult;
use crate::typing::check_program;

fn u() -> GradeUniverse {
    GradeUniverse::default()
}

fn checked(text: &str) -> ElaboratedProgram {
    check_program(&u(), &parse_program(text, &u()).unwrap()).unwrap()
}

const PAIRS: &str = "class A {} class Pair { A[1] first; A[1] second; }";

fn ex31() -> ElaboratedProgram {
    checked(&format!(
        "{PAIRS} run {{A[4] a = new A(); {{Pair[2] p = new Pair(a, a); new Pair(p.first, p.second)}}}} at 1"
    ))
}

fn trace(p: &ElaboratedProgram) -> Vec<TraceEntry> {
    let opts = RunOptions {
        record: true,
        ..RunOptions::default()
    };
    graded_run(&u(), p, GradedConfig::new(p.main.clone()), p.grade(), &opts).trace
}

#[test]
fn progress_holds_along_the_naturals_trace() {
    let p = ex31();
    let t = trace(&p);
    let mut rep = assert_progress(&u(), &p, &GradedConfig::new(p.main.clone()), p.grade(), &p.main_type);
    for e in &t {
        rep.merge(assert_progress(&u(), &p, &e.config, p.grade(), &p.main_type));
    }
    assert!(rep.ok(), "{:?}", rep.failures);
    assert_eq!(rep.checked, t.len() + 1);
    let last = &t.last().unwrap().config;
    assert_eq!(graded_step(&u(), &p, last, p.grade(), ConsumptionPolicy::Minimal), StepResult::Value);
}

#[test]
fn progress_reports_an_ill_typed_configuration() {
    let p = ex31();
    let mut cfg = trace(&p)[4].config.clone();
    cfg.env.set_grade("p", KindedGrade::nat(0));
    let rep = assert_progress(&u(), &p, &cfg, p.grade(), &p.main_type);
    assert!(!rep.ok());
    assert!(rep.failures[0].starts_with("precondition"), "{:?}", rep.failures);
}

#[test]
fn soundness_final_and_divergent() {
    let (rep, out) = assert_soundness_may(&u(), &ex31(), 10_000);
    assert!(rep.ok());
    assert_eq!(out, Outcome::Final);
    let l = checked("class L { L[1] go() [1] { this.go() } } run new L().go() at 1");
    let (rep, out) = assert_soundness_may(&u(), &l, 500);
    assert!(rep.ok());
    assert_eq!(out, Outcome::FuelExhausted);
}

#[test]
fn lockstep_agreement() {
    let rep = assert_subject_reduction(&u(), &ex31(), 10_000);
    assert!(rep.ok(), "{:?}", rep.failures);
    assert_eq!(rep.checked, 9);
    let priv_pairs = "class A {} class Pair { A[P:public] first; A[P:public] second; }";
    let e1 = checked(&format!(
        "{priv_pairs} run {{A[P:public] y = new A(); {{A[P:private] x = y; x}}}} at P:private"
    ));
    assert!(assert_subject_reduction(&u(), &e1, 100).ok());
    let v = checked(&format!("{PAIRS} run new A() at 1"));
    assert_eq!(assert_subject_reduction(&u(), &v, 100).checked, 1);
}

#[test]
fn checker_never_emits_the_stuck_annotation() {
    let text = format!(
        "{PAIRS} run {{A[4] a = new A(); {{Pair[2] p = new Pair(a, a); new Pair(p@N:1.first^N:2, p.second)}}}} at 1"
    );
    assert!(check_program(&u(), &parse_program(&text, &u()).unwrap()).is_err());
    let text = text.replace("p@N:1.first^N:2", "p.first");
    let ep = checked(&text);
    assert!(!ep.main.to_string().contains("first^N:2"));
}

#[test]
fn downward_closure_over_lower_grades() {
    let p = ex31();
    let t = trace(&p);
    let lower = grades_below(&u(), p.grade(), 25);
    assert!(lower.contains(&KindedGrade::nat(0)));
    assert!(lower.iter().all(|g| u().leq(g, p.grade()).unwrap()));
    let initial = GradedConfig::new(p.main.clone());
    assert!(assert_downward_closure(&u(), &p, &initial, &t, &lower).ok());
    assert!(assert_trace_props(&u(), &p, &initial, &t, &lower).ok());
}

#[test]
fn slack_context_starts_at_zero() {
    let mut d = CoeffectCtx::new();
    d.insert(crate::lang::name("x"), crate::lang::name("A"), KindedGrade::nat(3));
    let theta = SlackContext::initial(&u(), &d);
    assert!(theta.covers(&d));
    assert_eq!(theta.0.grade("x"), Some(&KindedGrade::nat(0)));
}
