use std::sync::OnceLock;

use gradefj::grades::{iota, AlgebraSpec, ExtReal, GradeValue, Rational};
use gradefj::hetero::{fig5_universe, validate_universe, GradeUniverse, KindId, KindedGrade};
use proptest::prelude::*;

fn finite_algebras() -> Vec<AlgebraSpec> {
    vec![
        AlgebraSpec::Affinity,
        AlgebraSpec::Boolean,
        AlgebraSpec::privacy(),
        AlgebraSpec::pprivacy(),
        AlgebraSpec::product(AlgebraSpec::Affinity, AlgebraSpec::privacy()),
        AlgebraSpec::extend(AlgebraSpec::Boolean),
    ]
}

fn ext_real() -> impl Strategy<Value = GradeValue> {
    prop_oneof![
        9 => (0u64..50, 1u64..12).prop_map(|(n, d)| GradeValue::real(n, d)),
        1 => Just(GradeValue::Real(ExtReal::Inf)),
    ]
}

fn rat(v: &GradeValue) -> Option<Rational> {
    match v {
        GradeValue::Real(ExtReal::Fin(r)) => Some(*r),
        _ => None,
    }
}

proptest! {
    #[test]
    fn nat_matches_machine_arithmetic(a in 0u64..1000, b in 0u64..1000) {
        let n = AlgebraSpec::Nat;
        let (x, y) = (GradeValue::Nat(a), GradeValue::Nat(b));
        prop_assert_eq!(n.add(&x, &y).unwrap(), GradeValue::Nat(a + b));
        prop_assert_eq!(n.mul(&x, &y).unwrap(), GradeValue::Nat(a * b));
        prop_assert_eq!(n.leq(&x, &y).unwrap(), a <= b);
        prop_assert_eq!(n.residual(&x, &y).unwrap(), a.checked_sub(b).map(GradeValue::Nat));
    }

    #[test]
    fn ext_real_matches_rationals(x in ext_real(), y in ext_real()) {
        let r = AlgebraSpec::ExtReal;
        let sum = r.add(&x, &y).unwrap();
        let prod = r.mul(&x, &y).unwrap();
        match (rat(&x), rat(&y)) {
            (Some(a), Some(b)) => {
                prop_assert_eq!(rat(&sum), Some(a + b));
                prop_assert_eq!(rat(&prod), Some(a * b));
                prop_assert_eq!(r.leq(&x, &y).unwrap(), a <= b);
            }
            (a, b) => {
                prop_assert_eq!(sum, GradeValue::Real(ExtReal::Inf));
                let zero = a.is_some_and(|a| a == Rational::from_integer(0))
                    || b.is_some_and(|b| b == Rational::from_integer(0));
                prop_assert_eq!(rat(&prod).is_some(), zero);
            }
        }
    }

    #[test]
    fn ext_real_semiring_laws(x in ext_real(), y in ext_real(), z in ext_real()) {
        let r = AlgebraSpec::ExtReal;
        let add = |a: &GradeValue, b: &GradeValue| r.add(a, b).unwrap();
        let mul = |a: &GradeValue, b: &GradeValue| r.mul(a, b).unwrap();
        prop_assert_eq!(add(&add(&x, &y), &z), add(&x, &add(&y, &z)));
        prop_assert_eq!(mul(&mul(&x, &y), &z), mul(&x, &mul(&y, &z)));
        prop_assert_eq!(mul(&x, &add(&y, &z)), add(&mul(&x, &y), &mul(&x, &z)));
        prop_assert_eq!(mul(&r.zero(), &x), r.zero());
        if r.leq(&x, &y).unwrap() {
            prop_assert!(r.leq(&add(&x, &z), &add(&y, &z)).unwrap());
            prop_assert!(r.leq(&mul(&x, &z), &mul(&y, &z)).unwrap());
        }
    }

    #[test]
    fn ext_real_residual_is_the_difference(a in ext_real(), d in ext_real()) {
        let r = AlgebraSpec::ExtReal;
        let got = r.residual(&a, &d).unwrap();
        match (rat(&a), rat(&d)) {
            (Some(a), Some(d)) if d <= a => prop_assert_eq!(got.as_ref().and_then(rat), Some(a - d)),
            (Some(_), _) => prop_assert!(got.is_none()),
            (None, _) => prop_assert_eq!(got, Some(GradeValue::Real(ExtReal::Inf))),
        }
    }

    #[test]
    fn iota_is_a_monotone_homomorphism(m in 0u64..20, n in 0u64..20, target in 0usize..4) {
        let targets = [AlgebraSpec::Affinity, AlgebraSpec::privacy(), AlgebraSpec::ExtReal, AlgebraSpec::Boolean];
        let t = &targets[target];
        let i = |k: u64| iota(&GradeValue::Nat(k), t).unwrap();
        prop_assert_eq!(i(m + n), t.add(&i(m), &i(n)).unwrap());
        prop_assert_eq!(i(m * n), t.mul(&i(m), &i(n)).unwrap());
        prop_assert_eq!(i(0), t.zero());
        prop_assert_eq!(i(1), t.one());
        if m <= n {
            prop_assert!(t.leq(&i(m), &i(n)).unwrap());
        }
    }
}

/// Every `s` with `d ⊕ s ⪯ a`, by brute force over the carrier.
fn fits(alg: &AlgebraSpec, a: &GradeValue, d: &GradeValue) -> Vec<GradeValue> {
    alg.elements()
        .unwrap()
        .into_iter()
        .filter(|s| alg.leq(&alg.add(d, s).unwrap(), a).unwrap())
        .collect()
}

#[test]
fn finite_residuals_are_maximal_fits() {
    for alg in finite_algebras() {
        let elems = alg.elements().unwrap();
        for a in &elems {
            for d in &elems {
                let all = fits(&alg, a, d);
                let maxima: Vec<&GradeValue> = all
                    .iter()
                    .filter(|s| !all.iter().any(|o| o != *s && alg.leq(s, o).unwrap()))
                    .collect();
                match alg.residual(a, d) {
                    Ok(Some(s)) => {
                        assert_eq!(maxima, vec![&s], "{alg:?}: {a} - {d}");
                    }
                    Ok(None) => assert!(all.is_empty(), "{alg:?}: {a} - {d} has fits {all:?}"),
                    Err(_) => assert!(maxima.len() > 1, "{alg:?}: {a} - {d}"),
                }
                let cands = alg.residual_candidates(a, d).unwrap().unwrap();
                assert_eq!(cands, all);
            }
        }
    }
}

fn fig5() -> &'static (GradeUniverse, Vec<KindedGrade>) {
    static U: OnceLock<(GradeUniverse, Vec<KindedGrade>)> = OnceLock::new();
    U.get_or_init(|| {
        let u = fig5_universe();
        let s = sample(&u);
        (u, s)
    })
}

fn sample(u: &GradeUniverse) -> Vec<KindedGrade> {
    u.carrier_sample(5, 6)
}

fn triple(n: usize) -> impl Strategy<Value = (usize, usize, usize)> {
    (0..n, 0..n, 0..n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn universe_order_is_a_partial_order((i, j, k) in triple(fig5().1.len())) {
        let (u, s) = fig5();
        let (x, y, z) = (&s[i], &s[j], &s[k]);
        let leq = |a: &KindedGrade, b: &KindedGrade| u.leq(a, b).unwrap();
        prop_assert!(leq(x, x));
        if leq(x, y) && leq(y, z) {
            prop_assert!(leq(x, z));
        }
        if leq(x, y) && leq(y, x) {
            prop_assert_eq!(x, y);
        }
        prop_assert!(leq(&u.zero(), x));
    }

    #[test]
    fn universe_operations_form_an_ordered_semiring((i, j, k) in triple(fig5().1.len())) {
        let (u, s) = fig5();
        let (x, y, z) = (&s[i], &s[j], &s[k]);
        let add = |a: &KindedGrade, b: &KindedGrade| u.add(a, b).unwrap();
        let mul = |a: &KindedGrade, b: &KindedGrade| u.mul(a, b).unwrap();
        prop_assert_eq!(add(&add(x, y), z), add(x, &add(y, z)));
        prop_assert_eq!(add(x, y), add(y, x));
        prop_assert_eq!(add(x, &u.zero()), x.clone());
        prop_assert_eq!(mul(&mul(x, y), z), mul(x, &mul(y, z)));
        prop_assert_eq!(mul(x, &u.one()), x.clone());
        prop_assert_eq!(mul(&u.one(), x), x.clone());
        prop_assert_eq!(mul(x, &add(y, z)), add(&mul(x, y), &mul(x, z)));
        prop_assert_eq!(mul(&add(x, y), z), add(&mul(x, z), &mul(y, z)));
        prop_assert_eq!(mul(&u.zero(), x), u.zero());
        prop_assert_eq!(mul(x, &u.zero()), u.zero());
        if u.leq(x, y).unwrap() {
            prop_assert!(u.leq(&add(x, z), &add(y, z)).unwrap());
            prop_assert!(u.leq(&mul(x, z), &mul(y, z)).unwrap());
            prop_assert!(u.leq(&mul(z, x), &mul(z, y)).unwrap());
        }
    }

    #[test]
    fn universe_residual_is_a_fit((i, j) in (0..fig5().1.len(), 0..fig5().1.len())) {
        let (u, s) = fig5();
        let (a, d) = (&s[i], &s[j]);
        if let Ok(Some(r)) = u.residual(a, d) {
            prop_assert!(u.leq(&u.add(d, &r).unwrap(), a).unwrap());
            // nothing in the sample fits strictly better
            for o in s {
                if u.leq(&u.add(d, o).unwrap(), a).unwrap() && u.leq(&r, o).unwrap() {
                    prop_assert!(u.leq(o, &r).unwrap(), "{} beats {}", o, r);
                }
            }
        }
    }
}

#[test]
fn derived_maps_compose() {
    let u = fig5_universe();
    for x in sample(&u) {
        for k in u.kinds() {
            for k2 in u.kinds() {
                if !u.refines(&x.kind, k).unwrap() || !u.refines(k, k2).unwrap() {
                    continue;
                }
                let mid = KindedGrade::new(k.clone(), u.inject(&x, k).unwrap());
                assert_eq!(u.inject(&mid, k2).unwrap(), u.inject(&x, k2).unwrap(), "{x} via {k} to {k2}");
            }
        }
    }
}

#[test]
fn validation_ignores_declaration_order() {
    let kinds = vec![
        (KindId::new("P"), AlgebraSpec::privacy()),
        (KindId::new("A"), AlgebraSpec::Affinity),
    ];
    let mut rev = kinds.clone();
    rev.reverse();
    let a = validate_universe(kinds, vec![]).unwrap();
    let b = validate_universe(rev, vec![]).unwrap();
    assert_eq!(a.kinds(), b.kinds());
    assert_eq!(a.carrier_sample(4, 4), b.carrier_sample(4, 4));
    let d = GradeUniverse::default();
    assert_eq!(a.kinds(), d.kinds());
}
