//! Grade homomorphisms: monotone maps preserving `0`, `1`, `⊕` and `·`.

use std::fmt;

use super::laws::{violation, Law, LawReport, LawViolation};
use super::sample::{sample_values, SAMPLE_SEED};
use super::{AlgebraSpec, GradeError, GradeResult, GradeValue};
use crate::exec::Exec;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HomSpec {
    Identity,
    /// The map from naturals sending `n` to the sum of `n` copies of one.
    IotaFromNat(AlgebraSpec),
    /// The constant map into the trivial algebra.
    ZetaToTriv,
    ProjLeft,
    ProjRight,
    /// An explicit table from source elements to target elements.
    FiniteMap(Vec<(GradeValue, GradeValue)>),
    /// Applies the first map, then the second.
    Compose(Box<HomSpec>, Box<HomSpec>),
}

impl HomSpec {
    pub fn then(self, next: HomSpec) -> HomSpec {
        match (self, next) {
            (HomSpec::Identity, h) | (h, HomSpec::Identity) => h,
            (a, b) => HomSpec::Compose(Box::new(a), Box::new(b)),
        }
    }
}

impl fmt::Display for HomSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HomSpec::Identity => f.write_str("id"),
            HomSpec::IotaFromNat(t) => write!(f, "iota[{t}]"),
            HomSpec::ZetaToTriv => f.write_str("zeta"),
            HomSpec::ProjLeft => f.write_str("proj-left"),
            HomSpec::ProjRight => f.write_str("proj-right"),
            HomSpec::FiniteMap(m) => {
                let parts: Vec<String> = m.iter().map(|(a, b)| format!("{a}->{b}")).collect();
                write!(f, "map{{{}}}", parts.join(","))
            }
            HomSpec::Compose(a, b) => write!(f, "{b} . {a}"),
        }
    }
}

/// `ι(n)`, computed by doubling: `ι(2k) = ι(k) ⊕ ι(k)`, `ι(2k+1) = ι(2k) ⊕ 1`.
pub fn iota(n: &GradeValue, target: &AlgebraSpec) -> GradeResult<GradeValue> {
    let GradeValue::Nat(mut n) = *n else {
        return Err(GradeError::CarrierMismatch {
            value: n.to_string(),
            algebra: AlgebraSpec::Nat.to_string(),
        });
    };
    let mut acc = target.zero();
    let mut base = target.one();
    while n > 0 {
        if n & 1 == 1 {
            acc = target.add(&acc, &base)?;
        }
        n >>= 1;
        if n > 0 {
            base = target.add(&base, &base)?;
        }
    }
    Ok(acc)
}

/// `ζ(a) = ∞` for every `a` of the source.
pub fn zeta(_a: &GradeValue, _source: &AlgebraSpec) -> GradeValue {
    GradeValue::Triv
}

pub fn hom_apply(h: &HomSpec, a: &GradeValue) -> GradeResult<GradeValue> {
    match h {
        HomSpec::Identity => Ok(a.clone()),
        HomSpec::IotaFromNat(t) => iota(a, t),
        HomSpec::ZetaToTriv => Ok(GradeValue::Triv),
        HomSpec::ProjLeft | HomSpec::ProjRight => match a {
            GradeValue::Pair(x, y) => Ok(if matches!(h, HomSpec::ProjLeft) { x } else { y }
                .as_ref()
                .clone()),
            _ => Err(GradeError::CarrierMismatch {
                value: a.to_string(),
                algebra: "a product".into(),
            }),
        },
        HomSpec::FiniteMap(m) => m
            .iter()
            .find(|(k, _)| k == a)
            .map(|(_, v)| v.clone())
            .ok_or_else(|| GradeError::PartialMap(a.to_string())),
        HomSpec::Compose(f, g) => hom_apply(g, &hom_apply(f, a)?),
    }
}

/// Checks the homomorphism laws, exhaustively over finite sources and on a
/// deterministic sample otherwise.
pub fn validate_hom(h: &HomSpec, source: &AlgebraSpec, target: &AlgebraSpec) -> LawReport {
    validate_hom_with(h, source, target, Exec::default(), 64)
}

pub fn validate_hom_with(
    h: &HomSpec,
    source: &AlgebraSpec,
    target: &AlgebraSpec,
    exec: Exec,
    samples: usize,
) -> LawReport {
    let xs = sample_values(source, samples, SAMPLE_SEED);
    let n = xs.len();
    let subject = format!("{h}: {source} -> {target}");
    let laws = vec![
        Law::Totality,
        Law::Closure,
        Law::PreservesZero,
        Law::PreservesOne,
        Law::PreservesSum,
        Law::PreservesMul,
        Law::Monotonicity,
    ];
    let mut head = Vec::new();
    for (law, x, want) in [
        (Law::PreservesZero, source.zero(), target.zero()),
        (Law::PreservesOne, source.one(), target.one()),
    ] {
        match hom_apply(h, &x) {
            Ok(fx) if fx == want => {}
            Ok(fx) => head.push(violation(law, &[&x], format!("maps to {fx}, expected {want}"))),
            Err(e) => head.push(violation(Law::Totality, &[&x], e.to_string())),
        }
    }
    let mut findings = vec![head];
    findings.extend(exec.filter_map_range(n * n, |i| {
        let (a, b) = (&xs[i / n], &xs[i % n]);
        let found = match check_pair(h, source, target, a, b) {
            Ok(v) => v,
            Err(e) => vec![violation(
                match e {
                    GradeError::PartialMap(_) => Law::Totality,
                    _ => Law::Closure,
                },
                &[a, b],
                e.to_string(),
            )],
        };
        (!found.is_empty()).then_some(found)
    }));
    LawReport::collect(subject, n * n, source.is_finite(), laws, findings)
}

fn check_pair(
    h: &HomSpec,
    source: &AlgebraSpec,
    target: &AlgebraSpec,
    a: &GradeValue,
    b: &GradeValue,
) -> GradeResult<Vec<LawViolation>> {
    let mut out = Vec::new();
    let f = |x: &GradeValue| hom_apply(h, x);
    let (fa, fb) = (f(a)?, f(b)?);
    for (x, fx) in [(a, &fa), (b, &fb)] {
        if !target.contains(fx) {
            out.push(violation(Law::Closure, &[x], format!("image {fx} outside {target}")));
            return Ok(out);
        }
    }
    let l = f(&source.add(a, b)?)?;
    let r = target.add(&fa, &fb)?;
    if l != r {
        out.push(violation(Law::PreservesSum, &[a, b], format!("f(a ⊕ b) = {l} but f(a) ⊕ f(b) = {r}")));
    }
    let l = f(&source.mul(a, b)?)?;
    let r = target.mul(&fa, &fb)?;
    if l != r {
        out.push(violation(Law::PreservesMul, &[a, b], format!("f(a · b) = {l} but f(a) · f(b) = {r}")));
    }
    if source.leq(a, b)? && !target.leq(&fa, &fb)? {
        out.push(violation(Law::Monotonicity, &[a, b], format!("a ⪯ b but {fa} ⋠ {fb}")));
    }
    Ok(out)
}
