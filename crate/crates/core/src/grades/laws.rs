//! Law validation for grade algebras.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use super::sample::{Sampler, DEFAULT_SAMPLES, SAMPLE_SEED};
use super::{AlgebraSpec, GradeError, GradeValue};
use crate::exec::Exec;

/// A named law. Algebra laws come first, then homomorphism laws.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Law {
    Closure,
    Reflexivity,
    Antisymmetry,
    Transitivity,
    SumAssociativity,
    SumCommutativity,
    SumUnit,
    MulAssociativity,
    MulUnit,
    LeftDistributivity,
    RightDistributivity,
    Annihilation,
    SumMonotonicity,
    MulMonotonicity,
    ZeroLeast,
    Totality,
    PreservesZero,
    PreservesOne,
    PreservesSum,
    PreservesMul,
    Monotonicity,
    /// Heterogeneous laws: functoriality of derived maps and the injection
    /// equations relating `injl`, `injr` and `injz`.
    Functoriality,
    Injection,
    JoinLaws,
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("law names serialize");
        f.write_str(s.as_str().expect("string"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LawViolation {
    pub law: Law,
    pub witness: Vec<String>,
    pub detail: String,
}

impl fmt::Display for LawViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} fails at ({}): {}", self.law, self.witness.join(", "), self.detail)
    }
}

/// Outcome of a law check: the first violation found for each law, in law
/// order, or nothing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LawReport {
    pub subject: String,
    pub cases: usize,
    pub exhaustive: bool,
    pub laws: Vec<Law>,
    pub violations: Vec<LawViolation>,
}

impl LawReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn first(&self) -> Option<&LawViolation> {
        self.violations.first()
    }

    pub fn failed_laws(&self) -> Vec<Law> {
        self.violations.iter().map(|v| v.law).collect()
    }

    /// Builds a report from per-case findings, keeping the first witness
    /// for each law.
    pub(crate) fn collect(
        subject: String,
        cases: usize,
        exhaustive: bool,
        laws: Vec<Law>,
        findings: Vec<Vec<LawViolation>>,
    ) -> Self {
        let mut first: BTreeMap<Law, LawViolation> = BTreeMap::new();
        for v in findings.into_iter().flatten() {
            first.entry(v.law).or_insert(v);
        }
        LawReport {
            subject,
            cases,
            exhaustive,
            laws,
            violations: first.into_values().collect(),
        }
    }
}

pub(crate) fn violation<T: fmt::Display>(
    law: Law,
    witness: &[T],
    detail: impl Into<String>,
) -> LawViolation {
    LawViolation {
        law,
        witness: witness.iter().map(|w| w.to_string()).collect(),
        detail: detail.into(),
    }
}

/// Checks every axiom, exhaustively on finite carriers and on
/// [`DEFAULT_SAMPLES`] deterministic triples otherwise.
pub fn validate_algebra(spec: &AlgebraSpec) -> LawReport {
    validate_algebra_with(spec, Exec::default(), DEFAULT_SAMPLES)
}

pub fn validate_algebra_with(spec: &AlgebraSpec, exec: Exec, samples: usize) -> LawReport {
    let triples: Vec<[GradeValue; 3]> = match spec.elements() {
        Some(xs) => all_triples(&xs),
        None => {
            let mut s = Sampler::new(SAMPLE_SEED);
            (0..samples)
                .map(|_| [s.value(spec), s.value(spec), s.value(spec)])
                .collect()
        }
    };
    check_semiring_laws(spec, spec.to_string(), spec.is_finite(), &triples, exec)
}

/// The operations law checking needs. Implemented by single algebras and by
/// the heterogeneous algebra of kinded grades.
pub trait SemiringOps: Sync {
    type Value: Clone + PartialEq + fmt::Display + Send + Sync;
    type Error: fmt::Display;

    fn contains(&self, v: &Self::Value) -> bool;
    fn leq(&self, a: &Self::Value, b: &Self::Value) -> Result<bool, Self::Error>;
    fn add(&self, a: &Self::Value, b: &Self::Value) -> Result<Self::Value, Self::Error>;
    fn mul(&self, a: &Self::Value, b: &Self::Value) -> Result<Self::Value, Self::Error>;
    fn zero(&self) -> Self::Value;
    fn one(&self) -> Self::Value;
}

impl SemiringOps for AlgebraSpec {
    type Value = GradeValue;
    type Error = GradeError;

    fn contains(&self, v: &GradeValue) -> bool {
        AlgebraSpec::contains(self, v)
    }
    fn leq(&self, a: &GradeValue, b: &GradeValue) -> Result<bool, GradeError> {
        AlgebraSpec::leq(self, a, b)
    }
    fn add(&self, a: &GradeValue, b: &GradeValue) -> Result<GradeValue, GradeError> {
        AlgebraSpec::add(self, a, b)
    }
    fn mul(&self, a: &GradeValue, b: &GradeValue) -> Result<GradeValue, GradeError> {
        AlgebraSpec::mul(self, a, b)
    }
    fn zero(&self) -> GradeValue {
        AlgebraSpec::zero(self)
    }
    fn one(&self) -> GradeValue {
        AlgebraSpec::one(self)
    }
}

/// Every ordered triple over `xs`.
pub fn all_triples<T: Clone>(xs: &[T]) -> Vec<[T; 3]> {
    let mut out = Vec::with_capacity(xs.len().pow(3));
    for a in xs {
        for b in xs {
            for c in xs {
                out.push([a.clone(), b.clone(), c.clone()]);
            }
        }
    }
    out
}

pub const SEMIRING_LAWS: [Law; 15] = [
    Law::Closure,
    Law::Reflexivity,
    Law::Antisymmetry,
    Law::Transitivity,
    Law::SumAssociativity,
    Law::SumCommutativity,
    Law::SumUnit,
    Law::MulAssociativity,
    Law::MulUnit,
    Law::LeftDistributivity,
    Law::RightDistributivity,
    Law::Annihilation,
    Law::SumMonotonicity,
    Law::MulMonotonicity,
    Law::ZeroLeast,
];

/// Runs every ordered-semiring axiom on each triple.
pub fn check_semiring_laws<A: SemiringOps>(
    alg: &A,
    subject: String,
    exhaustive: bool,
    triples: &[[A::Value; 3]],
    exec: Exec,
) -> LawReport {
    let findings = exec.filter_map_range(triples.len(), |i| {
        let [a, b, c] = &triples[i];
        let found = match check_triple(alg, a, b, c) {
            Ok(v) => v,
            Err(e) => vec![violation(Law::Closure, &[a, b, c], e.to_string())],
        };
        (!found.is_empty()).then_some(found)
    });
    LawReport::collect(subject, triples.len(), exhaustive, SEMIRING_LAWS.to_vec(), findings)
}

fn check_triple<A: SemiringOps>(
    alg: &A,
    a: &A::Value,
    b: &A::Value,
    c: &A::Value,
) -> Result<Vec<LawViolation>, A::Error> {
    let mut out = Vec::new();
    let leq = |x: &A::Value, y: &A::Value| alg.leq(x, y);
    let add = |x: &A::Value, y: &A::Value| alg.add(x, y);
    let mul = |x: &A::Value, y: &A::Value| alg.mul(x, y);
    let (zero, one) = (alg.zero(), alg.one());

    for (x, y) in [(a, b), (b, c)] {
        for r in [add(x, y)?, mul(x, y)?] {
            if !alg.contains(&r) {
                out.push(violation(Law::Closure, &[x, y], format!("result {r} outside carrier")));
            }
        }
    }
    if !leq(a, a)? {
        out.push(violation(Law::Reflexivity, &[a], "a ⋠ a"));
    }
    if a != b && leq(a, b)? && leq(b, a)? {
        out.push(violation(Law::Antisymmetry, &[a, b], "a ⪯ b and b ⪯ a but a ≠ b"));
    }
    if leq(a, b)? && leq(b, c)? && !leq(a, c)? {
        out.push(violation(Law::Transitivity, &[a, b, c], "a ⪯ b ⪯ c but a ⋠ c"));
    }
    let l = add(&add(a, b)?, c)?;
    let r = add(a, &add(b, c)?)?;
    if l != r {
        out.push(violation(Law::SumAssociativity, &[a, b, c], format!("{l} ≠ {r}")));
    }
    let (ab, ba) = (add(a, b)?, add(b, a)?);
    if ab != ba {
        out.push(violation(Law::SumCommutativity, &[a, b], format!("{ab} ≠ {ba}")));
    }
    if add(a, &zero)? != *a || add(&zero, a)? != *a {
        out.push(violation(Law::SumUnit, &[a], "a ⊕ 0 ≠ a"));
    }
    let l = mul(&mul(a, b)?, c)?;
    let r = mul(a, &mul(b, c)?)?;
    if l != r {
        out.push(violation(Law::MulAssociativity, &[a, b, c], format!("{l} ≠ {r}")));
    }
    if mul(a, &one)? != *a || mul(&one, a)? != *a {
        out.push(violation(Law::MulUnit, &[a], "a · 1 ≠ a"));
    }
    let l = mul(a, &add(b, c)?)?;
    let r = add(&mul(a, b)?, &mul(a, c)?)?;
    if l != r {
        out.push(violation(Law::LeftDistributivity, &[a, b, c], format!("{l} ≠ {r}")));
    }
    let l = mul(&add(b, c)?, a)?;
    let r = add(&mul(b, a)?, &mul(c, a)?)?;
    if l != r {
        out.push(violation(Law::RightDistributivity, &[a, b, c], format!("{l} ≠ {r}")));
    }
    if mul(a, &zero)? != zero || mul(&zero, a)? != zero {
        out.push(violation(Law::Annihilation, &[a], "a · 0 ≠ 0"));
    }
    if leq(a, b)? {
        if !leq(&add(a, c)?, &add(b, c)?)? || !leq(&add(c, a)?, &add(c, b)?)? {
            out.push(violation(Law::SumMonotonicity, &[a, b, c], "a ⪯ b but a ⊕ c ⋠ b ⊕ c"));
        }
        if !leq(&mul(a, c)?, &mul(b, c)?)? || !leq(&mul(c, a)?, &mul(c, b)?)? {
            out.push(violation(Law::MulMonotonicity, &[a, b, c], "a ⪯ b but a · c ⋠ b · c"));
        }
    }
    if !leq(&zero, a)? {
        out.push(violation(Law::ZeroLeast, &[a], "0 ⋠ a"));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grades::FiniteTable;
    use std::sync::Arc;

    #[test]
    fn builtin_finite_algebras_pass() {
        for spec in [
            AlgebraSpec::Affinity,
            AlgebraSpec::Boolean,
            AlgebraSpec::Trivial,
            AlgebraSpec::privacy(),
            AlgebraSpec::pprivacy(),
            AlgebraSpec::product(AlgebraSpec::Affinity, AlgebraSpec::privacy()),
            AlgebraSpec::extend(AlgebraSpec::Affinity),
        ] {
            let r = validate_algebra(&spec);
            assert!(r.passed(), "{spec}: {:?}", r.violations);
            assert!(r.exhaustive);
        }
    }

    #[test]
    fn infinite_algebras_pass_on_samples() {
        for spec in [AlgebraSpec::Nat, AlgebraSpec::ExtReal, AlgebraSpec::extend(AlgebraSpec::Nat)] {
            let r = validate_algebra(&spec);
            assert!(r.passed(), "{spec}: {:?}", r.violations);
            assert!(r.cases >= 1000);
        }
    }

    #[test]
    fn non_commutative_sum_is_caught() {
        // 0 ⊕ 1 = 1 but 1 ⊕ 0 = 0
        let t = FiniteTable::from_fns(
            &["0", "1"],
            |a, b| a <= b,
            |a, b| if a == 1 && b == 0 { 0 } else { a | b },
            |a, b| a & b,
            0,
            1,
        );
        let r = validate_algebra(&AlgebraSpec::Table(Arc::new(t)));
        assert!(r.failed_laws().contains(&Law::SumCommutativity));
        let v = r.violations.iter().find(|v| v.law == Law::SumCommutativity).unwrap();
        assert_eq!(v.witness.len(), 2);
    }

    #[test]
    fn missing_reflexive_pair_is_not_repaired() {
        let t = FiniteTable::from_fns(&["0", "1"], |a, b| a < b, |a, b| a | b, |a, b| a & b, 0, 1);
        let r = validate_algebra(&AlgebraSpec::Table(Arc::new(t)));
        assert!(r.failed_laws().contains(&Law::Reflexivity));
    }

    #[test]
    fn sequential_and_parallel_reports_agree() {
        let t = FiniteTable::from_fns(
            &["0", "1", "w"],
            |a, b| a <= b,
            |a, b| (a + b).min(2),
            // ω·ω = 1 breaks associativity and monotonicity
            |a, b| if a == 0 || b == 0 { 0 } else if a == 2 && b == 2 { 1 } else { a.max(b) },
            0,
            1,
        );
        let spec = AlgebraSpec::Table(Arc::new(t));
        let a = validate_algebra_with(&spec, Exec::Sequential, 0);
        let b = validate_algebra_with(&spec, Exec::Parallel, 0);
        assert!(!a.passed());
        assert_eq!(a, b);
    }
}
