use gradefj::hetero::GradeUniverse;
use gradefj::lang::{gtype_leq, parse_expr, parse_program, GradedType};
use proptest::prelude::*;

const GRADES: [&str; 7] = ["N:0", "N:3", "A:1", "A:w", "P:private", "P:public", "T:inf"];

fn grade() -> impl Strategy<Value = String> {
    prop::sample::select(GRADES.to_vec()).prop_map(str::to_string)
}

fn ident() -> impl Strategy<Value = String> {
    prop::sample::select(vec!["x", "y", "this", "first", "m", "z$2", "runner"]).prop_map(str::to_string)
}

fn class() -> impl Strategy<Value = String> {
    prop::sample::select(vec!["A", "Pair", "C0", "C1"]).prop_map(str::to_string)
}

fn args(e: BoxedStrategy<String>) -> impl Strategy<Value = String> {
    prop::collection::vec((e, prop::option::of(grade())), 0..3).prop_map(|xs| {
        xs.into_iter()
            .map(|(e, g)| match g {
                Some(g) => format!("{e}^{g}"),
                None => e,
            })
            .collect::<Vec<_>>()
            .join(", ")
    })
}

/// Source text of arbitrary, not necessarily well-typed, expressions.
fn expr() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![ident(), class().prop_map(|c| format!("new {c}()"))];
    leaf.prop_recursive(4, 32, 3, |e| {
        let e = e.boxed();
        prop_oneof![
            (e.clone(), prop::option::of(grade()), ident()).prop_map(|(r, g, f)| match g {
                Some(g) => format!("{r}@{g}.{f}"),
                None => format!("{r}.{f}"),
            }),
            (e.clone(), prop::option::of(grade()), ident(), args(e.clone())).prop_map(|(r, g, m, a)| match g {
                Some(g) => format!("{r}@{g}.{m}({a})"),
                None => format!("{r}.{m}({a})"),
            }),
            (class(), args(e.clone())).prop_map(|(c, a)| format!("new {c}({a})")),
            (class(), grade(), ident(), e.clone(), e.clone())
                .prop_map(|(c, g, x, i, b)| format!("{{{c}[{g}] {x} = {i}; {b}}}")),
            e.prop_map(|x| format!("({x})")),
        ]
    })
}

proptest! {
    #[test]
    fn printing_then_parsing_is_the_identity(src in expr()) {
        let u = GradeUniverse::default();
        let e = parse_expr(&src, &u).unwrap();
        let printed = e.to_string();
        let again = parse_expr(&printed, &u).unwrap();
        prop_assert_eq!(&again, &e);
        prop_assert_eq!(again.to_string(), printed);
    }
}

/// A chain `C0 <: C1 <: ... ` of classes each adding fields, with methods.
fn hierarchy() -> impl Strategy<Value = String> {
    let class_body = (
        prop::collection::vec(grade(), 0..3),
        prop::collection::vec((grade(), grade(), expr()), 0..2),
    );
    prop::collection::vec(class_body, 1..4).prop_map(|classes| {
        let mut out = String::from("class A {}\n");
        for (i, (fields, methods)) in classes.iter().enumerate() {
            let sup = if i == 0 { String::new() } else { format!(" extends C{}", i - 1) };
            out.push_str(&format!("class C{i}{sup} {{\n"));
            for (j, g) in fields.iter().enumerate() {
                out.push_str(&format!("  A[{g}] f{i}_{j};\n"));
            }
            for (j, (ret, this, body)) in methods.iter().enumerate() {
                out.push_str(&format!("  A[{ret}] m{i}_{j}(A[{this}] x, C{i}[N:1] y) [{this}] {{ {body} }}\n"));
            }
            out.push_str("}\n");
        }
        out.push_str("run new A() at N:1\n");
        out
    })
}

proptest! {
    #[test]
    fn programs_round_trip(src in hierarchy()) {
        let u = GradeUniverse::default();
        let p = parse_program(&src, &u).unwrap();
        let again = parse_program(&p.to_string(), &u).unwrap();
        prop_assert_eq!(again, p);
    }

    #[test]
    fn subclass_fields_extend_superclass_fields(src in hierarchy()) {
        let u = GradeUniverse::default();
        let p = parse_program(&src, &u).unwrap();
        let classes: Vec<String> = p.table.classes().iter().map(|c| c.name.to_string()).collect();
        for c in &classes {
            for d in &classes {
                if p.table.is_subclass(c, d).unwrap() {
                    let fc = p.table.fields(c).unwrap();
                    let fd = p.table.fields(d).unwrap();
                    prop_assert!(fd.len() <= fc.len());
                    prop_assert!(fd.iter().zip(&fc).all(|(a, b)| a.name == b.name && a.ty == b.ty));
                }
            }
        }
    }

    #[test]
    fn graded_subtyping_is_a_preorder(
        src in hierarchy(),
        picks in prop::collection::vec((0usize..4, 0usize..GRADES.len()), 3),
    ) {
        let u = GradeUniverse::default();
        let p = parse_program(&src, &u).unwrap();
        let classes: Vec<&str> = p.table.classes().iter().map(|c| &*c.name).filter(|c| *c != "A").collect();
        let ts: Vec<GradedType> = picks
            .iter()
            .map(|&(c, g)| GradedType::new(classes[c % classes.len()], u.parse_grade(GRADES[g]).unwrap()))
            .collect();
        let leq = |a: &GradedType, b: &GradedType| gtype_leq(&u, &p.table, a, b).unwrap();
        for t in &ts {
            prop_assert!(leq(t, t));
        }
        if leq(&ts[0], &ts[1]) && leq(&ts[1], &ts[2]) {
            prop_assert!(leq(&ts[0], &ts[2]));
        }
    }
}
