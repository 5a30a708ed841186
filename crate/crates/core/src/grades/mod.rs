//! Grade algebras.
//!
//! A grade algebra is an ordered semiring `(R, ⪯, ⊕, ·, 0, 1)` in which both
//! operations are monotone and `0` is the least element. [`AlgebraSpec`]
//! describes one algebra and [`GradeValue`] is an element of one. Operations
//! check that their operands belong to the carrier and report
//! [`GradeError::CarrierMismatch`] otherwise.

mod hom;
pub(crate) mod laws;
mod sample;
mod table;

use std::fmt;
use std::sync::Arc;

use num_rational::Ratio;
use num_traits::{One, Zero};
use once_cell::sync::Lazy;
use thiserror::Error;

pub use hom::{hom_apply, iota, validate_hom, validate_hom_with, zeta, HomSpec};
pub use laws::{
    all_triples, check_semiring_laws, validate_algebra, validate_algebra_with, Law, LawReport,
    LawViolation, SemiringOps, SEMIRING_LAWS,
};
pub use sample::{sample_values, Sampler, DEFAULT_SAMPLES, SAMPLE_SEED};
pub use table::FiniteTable;

/// Exact non-negative rationals.
pub type Rational = Ratio<u64>;

/// An extended non-negative rational.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExtReal {
    Fin(Rational),
    Inf,
}

/// An element of some grade algebra.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GradeValue {
    Nat(u64),
    /// The single element `∞` of the trivial algebra.
    Triv,
    Real(ExtReal),
    /// An element of a finite table (also used by affinity and boolean).
    Elem(Arc<str>),
    Pair(Box<GradeValue>, Box<GradeValue>),
    /// A finite element of an `Extend` algebra.
    ExtFin(Box<GradeValue>),
    /// The added top of an `Extend` algebra.
    ExtInf,
}

impl GradeValue {
    pub fn elem(name: &str) -> Self {
        GradeValue::Elem(Arc::from(name))
    }

    pub fn pair(a: GradeValue, b: GradeValue) -> Self {
        GradeValue::Pair(Box::new(a), Box::new(b))
    }

    pub fn real(num: u64, den: u64) -> Self {
        GradeValue::Real(ExtReal::Fin(Rational::new(num, den)))
    }

    pub fn ext(v: GradeValue) -> Self {
        GradeValue::ExtFin(Box::new(v))
    }
}

impl fmt::Display for GradeValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GradeValue::Nat(n) => write!(f, "{n}"),
            GradeValue::Triv | GradeValue::ExtInf | GradeValue::Real(ExtReal::Inf) => {
                f.write_str("inf")
            }
            GradeValue::Real(ExtReal::Fin(q)) => {
                if *q.denom() == 1 {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
            GradeValue::Elem(e) => f.write_str(e),
            GradeValue::Pair(a, b) => write!(f, "({a},{b})"),
            GradeValue::ExtFin(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GradeError {
    #[error("value `{value}` is not in the carrier of {algebra}")]
    CarrierMismatch { value: String, algebra: String },
    #[error("residual of {demand} from {available} has several maximal candidates: {candidates}")]
    AmbiguousResidual {
        available: String,
        demand: String,
        candidates: String,
    },
    #[error("map is undefined on `{0}`")]
    PartialMap(String),
    #[error("malformed table: {0}")]
    BadTable(String),
    #[error("`{text}` is not an element of {algebra}")]
    UnknownElement { text: String, algebra: String },
}

pub type GradeResult<T> = Result<T, GradeError>;

/// Description of a grade algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AlgebraSpec {
    Nat,
    Trivial,
    /// `{0, 1, ω}`: naturals with everything above 1 identified.
    Affinity,
    /// `{0, 1}` with `∨` and `∧`.
    Boolean,
    /// Non-negative rationals plus `∞`, with `0 · ∞ = 0`.
    ExtReal,
    Table(Arc<FiniteTable>),
    Product(Box<AlgebraSpec>, Box<AlgebraSpec>),
    /// Adds a top `∞` that absorbs `⊕`, and `·` except against zero.
    Extend(Box<AlgebraSpec>),
}

static AFFINITY: Lazy<FiniteTable> = Lazy::new(|| {
    // 0 = 0, 1 = 1, 2 = ω
    FiniteTable::from_fns(
        &["0", "1", "w"],
        |a, b| a <= b,
        |a, b| (a + b).min(2),
        |a, b| if a == 0 || b == 0 { 0 } else { a.max(b) },
        0,
        1,
    )
});

static BOOLEAN: Lazy<FiniteTable> = Lazy::new(|| {
    FiniteTable::from_fns(&["0", "1"], |a, b| a <= b, |a, b| a | b, |a, b| a & b, 0, 1)
});

static PRIVACY: Lazy<Arc<FiniteTable>> = Lazy::new(|| {
    Arc::new(
        FiniteTable::lattice_with_zero(&["private", "public"], &[("private", "public")])
            .expect("two-level privacy is a lattice"),
    )
});

static PPRIVACY: Lazy<Arc<FiniteTable>> = Lazy::new(|| {
    Arc::new(
        FiniteTable::lattice_with_zero(
            &["a", "b", "c", "d"],
            &[("a", "b"), ("a", "c"), ("b", "d"), ("c", "d")],
        )
        .expect("four-level privacy is a lattice"),
    )
});

impl AlgebraSpec {
    /// Two privacy levels `0 ⪯ private ⪯ public`; sum is join, product is meet.
    pub fn privacy() -> Self {
        AlgebraSpec::Table(PRIVACY.clone())
    }

    /// Four privacy levels `a ⪯ b, c ⪯ d` below a fresh zero.
    pub fn pprivacy() -> Self {
        AlgebraSpec::Table(PPRIVACY.clone())
    }

    pub fn product(a: AlgebraSpec, b: AlgebraSpec) -> Self {
        AlgebraSpec::Product(Box::new(a), Box::new(b))
    }

    pub fn extend(a: AlgebraSpec) -> Self {
        AlgebraSpec::Extend(Box::new(a))
    }

    /// The table backing a finite algebra, built-in or user-defined.
    pub fn table(&self) -> Option<&FiniteTable> {
        match self {
            AlgebraSpec::Affinity => Some(&AFFINITY),
            AlgebraSpec::Boolean => Some(&BOOLEAN),
            AlgebraSpec::Table(t) => Some(t),
            _ => None,
        }
    }

    pub fn contains(&self, v: &GradeValue) -> bool {
        match (self, v) {
            (AlgebraSpec::Nat, GradeValue::Nat(_)) => true,
            (AlgebraSpec::Trivial, GradeValue::Triv) => true,
            (AlgebraSpec::ExtReal, GradeValue::Real(_)) => true,
            (AlgebraSpec::Product(a, b), GradeValue::Pair(x, y)) => a.contains(x) && b.contains(y),
            (AlgebraSpec::Extend(_), GradeValue::ExtInf) => true,
            (AlgebraSpec::Extend(a), GradeValue::ExtFin(x)) => a.contains(x),
            (_, GradeValue::Elem(e)) => self.table().is_some_and(|t| t.index_of(e).is_some()),
            _ => false,
        }
    }

    fn mismatch(&self, v: &GradeValue) -> GradeError {
        GradeError::CarrierMismatch {
            value: v.to_string(),
            algebra: self.to_string(),
        }
    }

    fn index(&self, t: &FiniteTable, v: &GradeValue) -> GradeResult<usize> {
        match v {
            GradeValue::Elem(e) => t.index_of(e).ok_or_else(|| self.mismatch(v)),
            _ => Err(self.mismatch(v)),
        }
    }

    pub fn zero(&self) -> GradeValue {
        match self {
            AlgebraSpec::Nat => GradeValue::Nat(0),
            AlgebraSpec::Trivial => GradeValue::Triv,
            AlgebraSpec::ExtReal => GradeValue::Real(ExtReal::Fin(Rational::zero())),
            AlgebraSpec::Product(a, b) => GradeValue::pair(a.zero(), b.zero()),
            AlgebraSpec::Extend(a) => GradeValue::ext(a.zero()),
            _ => {
                let t = self.table().expect("finite algebra");
                GradeValue::Elem(t.element(t.zero_index()).clone())
            }
        }
    }

    pub fn one(&self) -> GradeValue {
        match self {
            AlgebraSpec::Nat => GradeValue::Nat(1),
            AlgebraSpec::Trivial => GradeValue::Triv,
            AlgebraSpec::ExtReal => GradeValue::Real(ExtReal::Fin(Rational::one())),
            AlgebraSpec::Product(a, b) => GradeValue::pair(a.one(), b.one()),
            AlgebraSpec::Extend(a) => GradeValue::ext(a.one()),
            _ => {
                let t = self.table().expect("finite algebra");
                GradeValue::Elem(t.element(t.one_index()).clone())
            }
        }
    }

    pub fn leq(&self, a: &GradeValue, b: &GradeValue) -> GradeResult<bool> {
        use GradeValue as V;
        match (self, a, b) {
            (AlgebraSpec::Nat, V::Nat(x), V::Nat(y)) => Ok(x <= y),
            (AlgebraSpec::Trivial, V::Triv, V::Triv) => Ok(true),
            (AlgebraSpec::ExtReal, V::Real(x), V::Real(y)) => Ok(match (x, y) {
                (_, ExtReal::Inf) => true,
                (ExtReal::Inf, ExtReal::Fin(_)) => false,
                (ExtReal::Fin(p), ExtReal::Fin(q)) => p <= q,
            }),
            (AlgebraSpec::Product(l, r), V::Pair(x1, y1), V::Pair(x2, y2)) => {
                Ok(l.leq(x1, x2)? && r.leq(y1, y2)?)
            }
            (AlgebraSpec::Extend(_), _, V::ExtInf) => {
                self.expect(a)?;
                Ok(true)
            }
            (AlgebraSpec::Extend(inner), V::ExtInf, V::ExtFin(y)) => {
                inner.expect(y)?;
                Ok(false)
            }
            (AlgebraSpec::Extend(inner), V::ExtFin(x), V::ExtFin(y)) => inner.leq(x, y),
            _ => match self.table() {
                Some(t) => Ok(t.leq(self.index(t, a)?, self.index(t, b)?)),
                None => Err(self.mismatch(if self.contains(a) { b } else { a })),
            },
        }
    }

    pub fn add(&self, a: &GradeValue, b: &GradeValue) -> GradeResult<GradeValue> {
        use GradeValue as V;
        match (self, a, b) {
            (AlgebraSpec::Nat, V::Nat(x), V::Nat(y)) => Ok(V::Nat(x.saturating_add(*y))),
            (AlgebraSpec::Trivial, V::Triv, V::Triv) => Ok(V::Triv),
            (AlgebraSpec::ExtReal, V::Real(x), V::Real(y)) => Ok(V::Real(match (x, y) {
                (ExtReal::Fin(p), ExtReal::Fin(q)) => ExtReal::Fin(p + q),
                _ => ExtReal::Inf,
            })),
            (AlgebraSpec::Product(l, r), V::Pair(x1, y1), V::Pair(x2, y2)) => {
                Ok(V::pair(l.add(x1, x2)?, r.add(y1, y2)?))
            }
            (AlgebraSpec::Extend(inner), V::ExtFin(x), V::ExtFin(y)) => {
                Ok(V::ext(inner.add(x, y)?))
            }
            (AlgebraSpec::Extend(_), V::ExtInf, _) | (AlgebraSpec::Extend(_), _, V::ExtInf) => {
                self.expect(a)?;
                self.expect(b)?;
                Ok(V::ExtInf)
            }
            _ => match self.table() {
                Some(t) => Ok(V::Elem(
                    t.element(t.sum(self.index(t, a)?, self.index(t, b)?)).clone(),
                )),
                None => Err(self.mismatch(if self.contains(a) { b } else { a })),
            },
        }
    }

    pub fn mul(&self, a: &GradeValue, b: &GradeValue) -> GradeResult<GradeValue> {
        use GradeValue as V;
        match (self, a, b) {
            (AlgebraSpec::Nat, V::Nat(x), V::Nat(y)) => Ok(V::Nat(x.saturating_mul(*y))),
            (AlgebraSpec::Trivial, V::Triv, V::Triv) => Ok(V::Triv),
            (AlgebraSpec::ExtReal, V::Real(x), V::Real(y)) => Ok(V::Real(match (x, y) {
                (ExtReal::Fin(p), ExtReal::Fin(q)) => ExtReal::Fin(p * q),
                (ExtReal::Fin(p), ExtReal::Inf) | (ExtReal::Inf, ExtReal::Fin(p))
                    if p.is_zero() =>
                {
                    ExtReal::Fin(Rational::zero())
                }
                _ => ExtReal::Inf,
            })),
            (AlgebraSpec::Product(l, r), V::Pair(x1, y1), V::Pair(x2, y2)) => {
                Ok(V::pair(l.mul(x1, x2)?, r.mul(y1, y2)?))
            }
            (AlgebraSpec::Extend(inner), V::ExtFin(x), V::ExtFin(y)) => {
                Ok(V::ext(inner.mul(x, y)?))
            }
            (AlgebraSpec::Extend(inner), V::ExtInf, other)
            | (AlgebraSpec::Extend(inner), other, V::ExtInf) => {
                self.expect(other)?;
                let zero = V::ext(inner.zero());
                Ok(if *other == zero { zero } else { V::ExtInf })
            }
            _ => match self.table() {
                Some(t) => Ok(V::Elem(
                    t.element(t.mul(self.index(t, a)?, self.index(t, b)?)).clone(),
                )),
                None => Err(self.mismatch(if self.contains(a) { b } else { a })),
            },
        }
    }

    fn expect(&self, v: &GradeValue) -> GradeResult<()> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(self.mismatch(v))
        }
    }

    /// A maximal `s′` with `demand ⊕ s′ ⪯ available`, under a fixed policy per
    /// algebra. `Ok(None)` means no such `s′` exists.
    pub fn residual(
        &self,
        available: &GradeValue,
        demand: &GradeValue,
    ) -> GradeResult<Option<GradeValue>> {
        use GradeValue as V;
        self.expect(available)?;
        self.expect(demand)?;
        match (self, available, demand) {
            (AlgebraSpec::Nat, V::Nat(a), V::Nat(d)) => Ok(a.checked_sub(*d).map(V::Nat)),
            (AlgebraSpec::Trivial, _, _) => Ok(Some(V::Triv)),
            (AlgebraSpec::ExtReal, V::Real(a), V::Real(d)) => Ok(match (a, d) {
                (ExtReal::Inf, _) => Some(V::Real(ExtReal::Inf)),
                (ExtReal::Fin(_), ExtReal::Inf) => None,
                (ExtReal::Fin(a), ExtReal::Fin(d)) => {
                    (d <= a).then(|| V::Real(ExtReal::Fin(a - d)))
                }
            }),
            (AlgebraSpec::Product(l, r), V::Pair(a1, a2), V::Pair(d1, d2)) => {
                match (l.residual(a1, d1)?, r.residual(a2, d2)?) {
                    (Some(x), Some(y)) => Ok(Some(V::pair(x, y))),
                    _ => Ok(None),
                }
            }
            (AlgebraSpec::Extend(_), V::ExtInf, _) => Ok(Some(V::ExtInf)),
            (AlgebraSpec::Extend(_), V::ExtFin(_), V::ExtInf) => Ok(None),
            (AlgebraSpec::Extend(inner), V::ExtFin(a), V::ExtFin(d)) => {
                Ok(inner.residual(a, d)?.map(V::ext))
            }
            _ => {
                let t = self.table().expect("remaining algebras are finite");
                let (a, d) = (self.index(t, available)?, self.index(t, demand)?);
                let fits: Vec<usize> = (0..t.len()).filter(|&s| t.leq(t.sum(d, s), a)).collect();
                let maxima: Vec<usize> = fits
                    .iter()
                    .copied()
                    .filter(|&s| !fits.iter().any(|&o| o != s && t.leq(s, o)))
                    .collect();
                match maxima.as_slice() {
                    [] => Ok(None),
                    [s] => Ok(Some(V::Elem(t.element(*s).clone()))),
                    many => Err(GradeError::AmbiguousResidual {
                        available: available.to_string(),
                        demand: demand.to_string(),
                        candidates: many
                            .iter()
                            .map(|&s| t.element(s).to_string())
                            .collect::<Vec<_>>()
                            .join(", "),
                    }),
                }
            }
        }
    }

    /// All residual candidates `s′` with `demand ⊕ s′ ⪯ available`, for
    /// finite carriers. `None` when the carrier is infinite.
    pub fn residual_candidates(
        &self,
        available: &GradeValue,
        demand: &GradeValue,
    ) -> GradeResult<Option<Vec<GradeValue>>> {
        let Some(elems) = self.elements() else {
            return Ok(None);
        };
        let mut out = Vec::new();
        for s in elems {
            if self.leq(&self.add(demand, &s)?, available)? {
                out.push(s);
            }
        }
        Ok(Some(out))
    }

    /// The carrier, when finite.
    pub fn elements(&self) -> Option<Vec<GradeValue>> {
        match self {
            AlgebraSpec::Nat | AlgebraSpec::ExtReal => None,
            AlgebraSpec::Trivial => Some(vec![GradeValue::Triv]),
            AlgebraSpec::Product(a, b) => {
                let (xs, ys) = (a.elements()?, b.elements()?);
                Some(
                    xs.iter()
                        .flat_map(|x| ys.iter().map(move |y| GradeValue::pair(x.clone(), y.clone())))
                        .collect(),
                )
            }
            AlgebraSpec::Extend(a) => {
                let mut xs: Vec<GradeValue> = a.elements()?.into_iter().map(GradeValue::ext).collect();
                xs.push(GradeValue::ExtInf);
                Some(xs)
            }
            _ => {
                let t = self.table()?;
                Some((0..t.len()).map(|i| GradeValue::Elem(t.element(i).clone())).collect())
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            AlgebraSpec::Nat | AlgebraSpec::ExtReal => false,
            AlgebraSpec::Product(a, b) => a.is_finite() && b.is_finite(),
            AlgebraSpec::Extend(a) => a.is_finite(),
            _ => true,
        }
    }

    /// Reads a literal such as `3`, `3/2`, `inf`, `w`, `private` or `(w,private)`.
    pub fn parse_value(&self, text: &str) -> GradeResult<GradeValue> {
        let text = text.trim();
        let unknown = || GradeError::UnknownElement {
            text: text.to_string(),
            algebra: self.to_string(),
        };
        let is_inf = matches!(text, "inf" | "∞");
        match self {
            AlgebraSpec::Nat => text.parse().map(GradeValue::Nat).map_err(|_| unknown()),
            AlgebraSpec::Trivial => is_inf.then_some(GradeValue::Triv).ok_or_else(unknown),
            AlgebraSpec::ExtReal => {
                if is_inf {
                    return Ok(GradeValue::Real(ExtReal::Inf));
                }
                let (n, d) = match text.split_once('/') {
                    Some((n, d)) => (n.trim(), d.trim()),
                    None => (text, "1"),
                };
                let n: u64 = n.parse().map_err(|_| unknown())?;
                let d: u64 = d.parse().map_err(|_| unknown())?;
                if d == 0 {
                    return Err(unknown());
                }
                Ok(GradeValue::real(n, d))
            }
            AlgebraSpec::Product(a, b) => {
                let inner = text
                    .strip_prefix('(')
                    .and_then(|t| t.strip_suffix(')'))
                    .ok_or_else(unknown)?;
                let split = top_level_comma(inner).ok_or_else(unknown)?;
                Ok(GradeValue::pair(
                    a.parse_value(&inner[..split])?,
                    b.parse_value(&inner[split + 1..])?,
                ))
            }
            AlgebraSpec::Extend(a) => {
                if is_inf {
                    Ok(GradeValue::ExtInf)
                } else {
                    Ok(GradeValue::ext(a.parse_value(text)?))
                }
            }
            _ => {
                let t = self.table().expect("finite algebra");
                let name = if matches!(self, AlgebraSpec::Affinity) && text == "ω" {
                    "w"
                } else {
                    text
                };
                t.index_of(name)
                    .map(|i| GradeValue::Elem(t.element(i).clone()))
                    .ok_or_else(unknown)
            }
        }
    }
}

fn top_level_comma(s: &str) -> Option<usize> {
    let mut depth = 0usize;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.checked_sub(1)?,
            ',' if depth == 0 => return Some(i),
            _ => {}
        }
    }
    None
}

impl fmt::Display for AlgebraSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgebraSpec::Nat => f.write_str("nat"),
            AlgebraSpec::Trivial => f.write_str("trivial"),
            AlgebraSpec::Affinity => f.write_str("affinity"),
            AlgebraSpec::Boolean => f.write_str("boolean"),
            AlgebraSpec::ExtReal => f.write_str("extreal"),
            AlgebraSpec::Table(t) => write!(f, "table{{{}}}", t.elements().join(",")),
            AlgebraSpec::Product(a, b) => write!(f, "product({a},{b})"),
            AlgebraSpec::Extend(a) => write!(f, "extend({a})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(s: &str) -> GradeValue {
        GradeValue::elem(s)
    }

    #[test]
    fn nat_basics() {
        let n = AlgebraSpec::Nat;
        assert!(n.leq(&GradeValue::Nat(0), &GradeValue::Nat(5)).unwrap());
        assert_eq!(n.add(&GradeValue::Nat(2), &GradeValue::Nat(2)).unwrap(), GradeValue::Nat(4));
        assert_eq!(n.zero(), GradeValue::Nat(0));
        assert_eq!(n.one(), GradeValue::Nat(1));
    }

    #[test]
    fn affinity_order_and_ops() {
        let a = AlgebraSpec::Affinity;
        assert!(a.leq(&e("1"), &e("w")).unwrap());
        assert!(!a.leq(&e("w"), &e("1")).unwrap());
        assert_eq!(a.add(&e("1"), &e("1")).unwrap(), e("w"));
        assert_eq!(a.mul(&e("w"), &e("0")).unwrap(), e("0"));
        assert_eq!(a.parse_value("ω").unwrap(), e("w"));
    }

    #[test]
    fn privacy_ops() {
        let p = AlgebraSpec::privacy();
        assert!(!p.leq(&e("public"), &e("private")).unwrap());
        assert_eq!(p.add(&e("private"), &e("public")).unwrap(), e("public"));
        assert_eq!(p.mul(&e("private"), &e("public")).unwrap(), e("private"));
        assert_eq!(p.zero(), e("0"));
        assert_eq!(p.one(), e("public"));
    }

    #[test]
    fn extend_absorption() {
        let x = AlgebraSpec::extend(AlgebraSpec::Nat);
        let zero = GradeValue::ext(GradeValue::Nat(0));
        let three = GradeValue::ext(GradeValue::Nat(3));
        assert_eq!(x.mul(&zero, &GradeValue::ExtInf).unwrap(), zero);
        assert_eq!(x.mul(&GradeValue::ExtInf, &zero).unwrap(), zero);
        assert_eq!(x.mul(&three, &GradeValue::ExtInf).unwrap(), GradeValue::ExtInf);
        assert_eq!(x.add(&three, &GradeValue::ExtInf).unwrap(), GradeValue::ExtInf);
        assert!(x.leq(&three, &GradeValue::ExtInf).unwrap());
        assert!(!x.leq(&GradeValue::ExtInf, &three).unwrap());
    }

    #[test]
    fn extreal_zero_times_inf() {
        let r = AlgebraSpec::ExtReal;
        let inf = GradeValue::Real(ExtReal::Inf);
        assert_eq!(r.mul(&r.zero(), &inf).unwrap(), r.zero());
        assert_eq!(r.mul(&GradeValue::real(1, 3), &inf).unwrap(), inf);
        assert_eq!(
            r.add(&GradeValue::real(1, 3), &GradeValue::real(1, 6)).unwrap(),
            GradeValue::real(1, 2)
        );
    }

    #[test]
    fn product_constants() {
        let ap = AlgebraSpec::product(AlgebraSpec::Affinity, AlgebraSpec::privacy());
        assert_eq!(ap.zero(), GradeValue::pair(e("0"), e("0")));
        assert_eq!(ap.one(), GradeValue::pair(e("1"), e("public")));
        assert_eq!(ap.parse_value("(w,private)").unwrap(), GradeValue::pair(e("w"), e("private")));
    }

    #[test]
    fn trivial_constants() {
        assert_eq!(AlgebraSpec::Trivial.zero(), GradeValue::Triv);
        assert_eq!(AlgebraSpec::Trivial.one(), GradeValue::Triv);
    }

    #[test]
    fn residual_examples() {
        let n = AlgebraSpec::Nat;
        assert_eq!(
            n.residual(&GradeValue::Nat(4), &GradeValue::Nat(2)).unwrap(),
            Some(GradeValue::Nat(2))
        );
        assert_eq!(n.residual(&GradeValue::Nat(1), &GradeValue::Nat(2)).unwrap(), None);
        let p = AlgebraSpec::privacy();
        assert_eq!(p.residual(&e("public"), &e("private")).unwrap(), Some(e("public")));
        let a = AlgebraSpec::Affinity;
        assert_eq!(a.residual(&e("w"), &e("w")).unwrap(), Some(e("w")));
        assert_eq!(a.residual(&e("1"), &e("1")).unwrap(), Some(e("0")));
        assert_eq!(a.residual(&e("1"), &e("w")).unwrap(), None);
    }

    #[test]
    fn carrier_mismatch_is_reported() {
        let err = AlgebraSpec::Nat.add(&GradeValue::Nat(1), &e("w")).unwrap_err();
        assert!(matches!(err, GradeError::CarrierMismatch { .. }));
        assert!(AlgebraSpec::Affinity.leq(&e("private"), &e("1")).is_err());
    }

    #[test]
    fn display_round_trips_through_parse() {
        let specs = [
            AlgebraSpec::Nat,
            AlgebraSpec::ExtReal,
            AlgebraSpec::extend(AlgebraSpec::Affinity),
            AlgebraSpec::product(AlgebraSpec::Affinity, AlgebraSpec::pprivacy()),
        ];
        for spec in specs {
            for v in sample_values(&spec, 30, 7) {
                assert_eq!(spec.parse_value(&v.to_string()).unwrap(), v, "{spec}");
            }
        }
    }
}
