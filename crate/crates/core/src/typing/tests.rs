use super::*;
use crate::hetero::{GradeUniverse, KindedGrade};
use crate::lang::{name, parse_expr, parse_program, AnnExpr, GradedType, Program};
use crate::runtime::GradedEnv;

fn u() -> GradeUniverse {
    GradeUniverse::default()
}

fn g(s: &str) -> KindedGrade {
    u().parse_grade(s).unwrap()
}

fn program(text: &str) -> Program {
    parse_program(text, &u()).unwrap()
}

fn getters(this: &str) -> String {
    format!(
        "class A {{}}
class Pair {{
  A[A:1] first;
  A[A:1] second;
  A[A:0] getFirstZero() [{this}] {{ this.first }}
  A[A:1] getFirstAffine() [{this}] {{ this.first }}
  A[A:w] getFirst() [{this}] {{ new A() }}
}}
"
    )
}

fn client(this: &str, block: &str) -> Result<ElaboratedProgram, Vec<Diagnostic>> {
    let text = format!(
        "{}run {{Pair[A:1] p = new Pair(new A(), new A()); {block}}} at A:1",
        getters(this)
    );
    check_program(&u(), &program(&text))
}

const GOOD: [&str; 3] = [
    "{A[A:0] a = p.getFirstZero(); new Pair(new A(), new A())}",
    "{A[A:1] a = p.getFirstAffine(); new Pair(a, new A())}",
    "{A[A:w] a = p.getFirst(); new Pair(a, a)}",
];

#[test]
fn getters_accept_the_good_clients() {
    for b in GOOD {
        let ep = client("A:1", b).unwrap_or_else(|d| panic!("{b}: {d:?}"));
        assert_eq!(ep.main_type, GradedType::new("Pair", g("A:1")));
    }
}

#[test]
fn getters_reject_the_bad_clients_for_different_reasons() {
    let d = client("A:1", "{A[A:1] a = p.getFirst(); new Pair(a, a)}").unwrap_err();
    assert_eq!(d[0].code(), "UsageExceedsGrade", "{d:?}");
    let d = client("A:1", "{A[A:w] a = p.getFirstAffine(); new Pair(a, a)}").unwrap_err();
    assert_eq!(d[0].code(), "GradeTooDemanding", "{d:?}");
}

#[test]
fn omega_receiver_grade_rejects_every_call() {
    for b in GOOD {
        let d = client("A:w", b).unwrap_err();
        assert!(
            matches!(&d[0].kind, TypeErrorKind::UsageExceedsGrade { var, .. } if &**var == "p"),
            "{b}: {d:?}"
        );
    }
}

#[test]
fn field_getter_at_omega_needs_an_unrestricted_receiver() {
    let text = "class A {} class Pair { A[A:1] first; A[A:w] getFirst() [A:1] { this.first } } run new A() at A:1";
    let d = check_program(&u(), &program(text)).unwrap_err();
    assert_eq!(d[0].rule, Rule::TMeth);
    assert_eq!(d[0].code(), "UsageExceedsGrade");
}

#[test]
fn zero_receiver_grade_discards_this() {
    let text = "class A {} class Pair { A[A:1] first; A[A:1] get() [A:0] { this.first } } run new A() at A:1";
    let d = check_program(&u(), &program(text)).unwrap_err();
    assert_eq!(d[0].code(), "DiscardedVariable", "{d:?}");
}

const B: &str = "class A {} class B { A[P:public] f1; A[P:private] f2; }";

fn privacy(main: &str, at: &str) -> Result<ElaboratedProgram, Vec<Diagnostic>> {
    check_program(&u(), &program(&format!("{B} run {main} at {at}")))
}

#[test]
fn privacy_blocks() {
    let down = "{A[P:public] y = new A(); {A[P:private] x = y; x}}";
    let up = "{A[P:private] y = new A(); {A[P:public] x = y; x}}";
    privacy(down, "P:private").unwrap();
    assert_eq!(privacy(up, "P:private").unwrap_err()[0].code(), "UsageExceedsGrade");
    let e = "{A[P:public] x = new A(); new B(x, x)}";
    privacy(e, "P:public").unwrap();
    privacy(e, "P:private").unwrap();
    let e2 = "{A[P:private] x = new A(); new B(x, x)}";
    privacy(e2, "P:private").unwrap();
    assert!(privacy(e2, "P:public").is_err());
}

#[test]
fn field_access_through_privacy() {
    let e = "{A[P:public] x = new A(); new B(x, x)}";
    privacy(&format!("{e}.f1"), "P:private").unwrap();
    privacy(&format!("{e}.f2"), "P:private").unwrap();
    privacy(&format!("{e}.f1"), "P:public").unwrap();
    let d = privacy(&format!("{e}.f2"), "P:public").unwrap_err();
    assert_eq!(d[0].code(), "AscriptionNeeded");
}

const NAT_PAIRS: &str = "class A {} class Pair { A[1] first; A[1] second; }";

#[test]
fn elaboration_reproduces_the_annotations_of_the_naturals_trace() {
    let p = program(&format!(
        "{NAT_PAIRS} run {{A[4] a = new A(); {{Pair[2] p = new Pair(a, a); new Pair(p.first, p.second)}}}} at 1"
    ));
    let ep = check_program(&u(), &p).unwrap();
    let text = ep.main.to_string();
    assert!(text.contains("p@N:1.first"), "{text}");
    assert!(text.contains("new A()@N:4") || text.contains("{A[N:4] a"), "{text}");
    assert_eq!(ep.main.erase(), p.main.strip());
}

#[test]
fn elaboration_rechecks_at_the_same_context() {
    let uu = u();
    let table = program(&format!("{NAT_PAIRS} run new A() at 1")).table;
    let env = TypeEnv::new().with(name("a"), name("A"));
    let e = parse_expr("new Pair(a, {A[3] b = a; b})", &uu).unwrap();
    let ty = GradedType::new("Pair", KindedGrade::nat(3));
    let r = check(&uu, &table, &env, &e, &ty).unwrap();
    assert_eq!(r.ctx.grade("a"), Some(&KindedGrade::nat(6)));
    assert_eq!(check_annotated(&uu, &table, &env, &r.elaborated, &ty).unwrap(), r.ctx);
}

#[test]
fn zero_demand_consumes_a_unit() {
    let uu = u();
    let table = program(&format!("{NAT_PAIRS} run new A() at 1")).table;
    let env = TypeEnv::new().with(name("a"), name("A"));
    let e = parse_expr("a", &uu).unwrap();
    let r = check(&uu, &table, &env, &e, &GradedType::new("A", KindedGrade::nat(0))).unwrap();
    assert_eq!(r.ctx.grade("a"), Some(&KindedGrade::nat(1)));
    let d = check(&uu, &table, &env, &parse_expr("q", &uu).unwrap(), &GradedType::new("A", KindedGrade::nat(1)))
        .unwrap_err();
    assert_eq!(d.code(), "UnknownVariable");
}

#[test]
fn annotations_must_match_declarations() {
    let uu = u();
    let table = program(&format!("{NAT_PAIRS} run new A() at 1")).table;
    let bad = AnnExpr::New {
        class: name("Pair"),
        args: vec![
            (AnnExpr::New { class: name("A"), args: vec![] }, KindedGrade::nat(2)),
            (AnnExpr::New { class: name("A"), args: vec![] }, KindedGrade::nat(1)),
        ],
    };
    let d = check_annotated(&uu, &table, &TypeEnv::new(), &bad, &GradedType::new("Pair", KindedGrade::nat(1)))
        .unwrap_err();
    assert_eq!(d.code(), "AnnotationMismatch");
    let v = AnnExpr::New { class: name("A"), args: vec![] };
    let ctx = check_annotated(&uu, &table, &TypeEnv::new(), &v, &GradedType::new("A", KindedGrade::nat(2))).unwrap();
    assert!(ctx.is_empty());
}

#[test]
fn configurations() {
    let uu = u();
    let table = program(&format!("{NAT_PAIRS} run new A() at 1")).table;
    let a = AnnExpr::New { class: name("A"), args: vec![] };
    let pair = AnnExpr::New {
        class: name("Pair"),
        args: vec![(a.clone(), KindedGrade::nat(1)), (a.clone(), KindedGrade::nat(1))],
    };
    let mut rho = GradedEnv::new();
    rho.insert(name("a"), a.clone(), KindedGrade::nat(0));
    rho.insert(name("p"), pair, KindedGrade::nat(2));
    let body = AnnExpr::New {
        class: name("Pair"),
        args: vec![
            (
                AnnExpr::Field { recv: Box::new(AnnExpr::Var(name("p"))), grade: KindedGrade::nat(1), field: name("first") },
                KindedGrade::nat(1),
            ),
            (
                AnnExpr::Field { recv: Box::new(AnnExpr::Var(name("p"))), grade: KindedGrade::nat(1), field: name("second") },
                KindedGrade::nat(1),
            ),
        ],
    };
    let ty = GradedType::new("Pair", KindedGrade::nat(1));
    let delta = check_configuration(&uu, &table, &body, &rho, &ty).unwrap();
    assert_eq!(delta.grade("p"), Some(&KindedGrade::nat(2)));
    rho.set_grade("p", KindedGrade::nat(1));
    let d = check_configuration(&uu, &table, &body, &rho, &ty).unwrap_err();
    assert_eq!(d.rule, Rule::TConf);
    let mut open = GradedEnv::new();
    open.insert(name("x"), AnnExpr::Var(name("y")), KindedGrade::nat(1));
    assert!(check_configuration(&uu, &table, &a, &open, &GradedType::new("A", KindedGrade::nat(1))).is_err());
}

#[test]
fn table_diagnostics() {
    let bad = [
        ("class A {} class A {} run new A() at 1", "DuplicateClass"),
        ("class Object {} run new Object() at 1", "ReservedClass"),
        ("class A extends B {} run new A() at 1", "UnknownClass"),
        ("class A extends B {} class B extends A {} run new Object() at 1", "CyclicInheritance"),
        ("class A { A[1] f; } class B extends A { A[1] f; } run new Object() at 1", "DuplicateMember"),
        ("class A { A[1] m(A[1] x, A[1] x) [1] { x } } run new Object() at 1", "BadParameter"),
        (
            "class A { A[1] m(A[1] x) [1] { x } } class B extends A { A[1] m(A[2] x) [1] { x } } run new Object() at 1",
            "OverrideMismatch",
        ),
        (
            "class A { A[2] m() [1] { new A() } } class B extends A { A[1] m() [1] { new A() } } run new Object() at 1",
            "OverrideMismatch",
        ),
    ];
    for (text, code) in bad {
        let d = check_program(&u(), &program(text)).unwrap_err();
        assert_eq!(d[0].code(), code, "{text}: {d:?}");
    }
    let covariant =
        "class A { A[1] m() [1] { new A() } } class B extends A { A[2] m() [1] { new A() } } run new B().m() at 1";
    check_program(&u(), &program(covariant)).unwrap();
}

#[test]
fn unchecked_annotation_keeps_explicit_grades() {
    let p = program(&format!(
        "{NAT_PAIRS} run {{A[4] a = new A(); {{Pair[2] p = new Pair(a, a); new Pair(p@N:1.first^N:2, p.second)}}}} at 1"
    ));
    assert!(check_program(&u(), &p).is_err());
    let ep = annotate_unchecked(&u(), &p).unwrap();
    let text = ep.main.to_string();
    assert!(text.contains("p@N:1.first^N:2"), "{text}");
    assert!(text.contains("p@N:1.second^N:1"), "{text}");
}
