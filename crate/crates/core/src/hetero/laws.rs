//! Law checks for a whole universe: the semiring axioms over kinded grades,
//! functoriality of derived maps, the injection equations and the join laws.

use crate::exec::Exec;
use crate::grades::laws::{violation, LawReport, LawViolation};
use crate::grades::{all_triples, check_semiring_laws, hom_apply, GradeValue, Law, SEMIRING_LAWS};

use super::{GradeUniverse, KindedGrade};

pub type UniverseLawReport = LawReport;

/// Checks with naturals up to 10 and the default executor.
pub fn check_universe_laws(u: &GradeUniverse) -> LawReport {
    check_universe_laws_with(u, 10, 64, Exec::default())
}

/// `nat_bound` caps the naturals in the carrier sample; `extra` is the
/// number of sampled values for other infinite kinds.
pub fn check_universe_laws_with(
    u: &GradeUniverse,
    nat_bound: u64,
    extra: usize,
    exec: Exec,
) -> LawReport {
    let carrier = u.carrier_sample(nat_bound, extra);
    let triples = all_triples(&carrier);
    let base = check_semiring_laws(u, "universe".into(), false, &triples, exec);

    let n = u.kinds().len();
    let per_kind: Vec<Vec<GradeValue>> = (0..n)
        .map(|i| {
            carrier
                .iter()
                .filter(|g| g.kind == u.kinds()[i])
                .map(|g| g.value.clone())
                .collect()
        })
        .collect();

    let kind_triples = u.kind_triples();
    let findings = exec.filter_map_range(kind_triples.len(), |t| {
        let found = check_kinds(u, kind_triples[t], &per_kind);
        (!found.is_empty()).then_some(found)
    });

    let mut laws = SEMIRING_LAWS.to_vec();
    laws.extend([Law::Functoriality, Law::Injection, Law::JoinLaws]);
    let mut all = vec![base.violations];
    all.extend(findings);
    // the naturals are always sampled, so this is never exhaustive
    LawReport::collect(
        format!("universe of {n} kinds"),
        triples.len() + kind_triples.len(),
        false,
        laws,
        all,
    )
}

/// Applies `D(a,b)`, or `None` when `a ⋢ b` or the map fails.
fn d(u: &GradeUniverse, a: usize, b: usize, x: &GradeValue) -> Option<GradeValue> {
    hom_apply(u.hom_idx(a, b)?, x).ok()
}

fn check_kinds(u: &GradeUniverse, [a, b, c]: [usize; 3], vals: &[Vec<GradeValue>]) -> Vec<LawViolation> {
    let mut out = Vec::new();
    let name = |i: usize| u.kinds()[i].to_string();
    let j = |x: usize, y: usize| u.join_idx(x, y);
    let names = [name(a), name(b), name(c)];
    let wit = |x: &GradeValue, k: usize| KindedGrade::new(u.kinds()[k].clone(), x.clone()).to_string();

    // join laws
    if j(j(a, b), c) != j(a, j(b, c)) {
        out.push(violation(Law::JoinLaws, &names, "⊔ not associative"));
    }
    if j(a, b) != j(b, a) || j(a, a) != a || j(a, 0) != a {
        out.push(violation(Law::JoinLaws, &names[..2], "⊔ not commutative, idempotent or unital"));
    }
    if u.below_idx(a, c) && u.below_idx(b, c) && !u.below_idx(j(a, b), c) {
        out.push(violation(Law::JoinLaws, &names, "join is not least"));
    }
    if u.below_idx(a, b) && !u.below_idx(j(a, c), j(b, c)) {
        out.push(violation(Law::JoinLaws, &names, "⊔ not monotone"));
    }

    // functoriality along a ⊑ b ⊑ c
    if u.below_idx(a, b) && u.below_idx(b, c) {
        for x in &vals[a] {
            let via = d(u, a, b, x).and_then(|y| d(u, b, c, &y));
            let direct = d(u, a, c, x);
            if via.is_none() || via != direct {
                out.push(violation(
                    Law::Functoriality,
                    &[wit(x, a), names[1].clone(), names[2].clone()],
                    format!("{:?} ≠ {:?}", via, direct),
                ));
                break;
            }
        }
    }

    let (ab, bc, abc) = (j(a, b), j(b, c), j(j(a, b), c));
    let mut eq = |label: &str, x: &GradeValue, k: usize, l: Option<GradeValue>, r: Option<GradeValue>| {
        if l.is_none() || l != r {
            out.push(violation(
                Law::Injection,
                &[wit(x, k), names[0].clone(), names[1].clone(), names[2].clone()],
                format!("{label}: {l:?} ≠ {r:?}"),
            ));
            true
        } else {
            false
        }
    };
    for x in &vals[a] {
        // injl(k⊔k′,k″) ∘ injl(k,k′) = injl(k,k′⊔k″)
        let l = d(u, a, ab, x).and_then(|y| d(u, ab, abc, &y));
        if eq("left-left", x, a, l, d(u, a, j(a, bc), x)) {
            break;
        }
        // injl(k,k′) = injr(k′,k)
        if eq("symmetry", x, a, d(u, a, ab, x), d(u, a, j(b, a), x)) {
            break;
        }
        if eq("self", x, a, d(u, a, j(a, a), x), Some(x.clone())) {
            break;
        }
        if eq("unit", x, a, d(u, a, j(a, 0), x), Some(x.clone())) {
            break;
        }
    }
    for x in &vals[b] {
        // injl(k⊔k′,k″) ∘ injr(k,k′) = injr(k,k′⊔k″) ∘ injl(k′,k″)
        let l = d(u, b, ab, x).and_then(|y| d(u, ab, abc, &y));
        let r = d(u, b, bc, x).and_then(|y| d(u, bc, j(a, bc), &y));
        if eq("right-left", x, b, l, r) {
            break;
        }
    }
    for x in &vals[c] {
        // injr(k⊔k′,k″) = injr(k,k′⊔k″) ∘ injr(k′,k″)
        let l = d(u, c, abc, x);
        let r = d(u, c, bc, x).and_then(|y| d(u, bc, j(a, bc), &y));
        if eq("right-right", x, c, l, r) {
            break;
        }
    }
    for x in &vals[0] {
        // injr(k,N) = injz(k)
        if eq("zero", x, 0, d(u, 0, j(a, 0), x), d(u, 0, a, x)) {
            break;
        }
    }
    out
}
