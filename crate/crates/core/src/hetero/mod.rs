//! Heterogeneous grades.
//!
//! A [`GradeUniverse`] is a family of grade algebras indexed by kinds, with a
//! refinement homomorphism `D(k,k′)` for every `k ⊑ k′`. Kinds `N` (naturals)
//! and `T` (trivial) are always present, `N` below and `T` above every kind.
//! The user supplies direct refinement edges; the order, joins and derived
//! homomorphisms are computed once by [`validate_universe`]. Kinded grades
//! `⟨k,r⟩` form a single grade algebra whose operations first move both
//! operands into the join kind.

mod config;
mod laws;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::grades::{
    hom_apply, sample_values, validate_algebra, validate_hom, AlgebraSpec, GradeError,
    GradeValue, HomSpec, SemiringOps, SAMPLE_SEED,
};

pub use config::{load_universe, parse_declared_algebras, parse_universe};
pub use laws::{check_universe_laws, check_universe_laws_with, UniverseLawReport};

/// A kind name.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KindId(Arc<str>);

impl KindId {
    pub fn new(name: &str) -> Self {
        KindId(Arc::from(name))
    }

    pub fn nat() -> Self {
        KindId::new("N")
    }

    pub fn triv() -> Self {
        KindId::new("T")
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_reserved(&self) -> bool {
        matches!(self.as_str(), "N" | "T")
    }
}

impl fmt::Display for KindId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A grade tagged with its kind, written `K:v`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KindedGrade {
    pub kind: KindId,
    pub value: GradeValue,
}

impl KindedGrade {
    pub fn new(kind: KindId, value: GradeValue) -> Self {
        KindedGrade { kind, value }
    }

    pub fn nat(n: u64) -> Self {
        KindedGrade::new(KindId::nat(), GradeValue::Nat(n))
    }

    /// Shorthand for a finite-table element of the named kind.
    pub fn elem(kind: &str, name: &str) -> Self {
        KindedGrade::new(KindId::new(kind), GradeValue::elem(name))
    }

    /// The canonical zero `⟨N,0⟩`.
    pub fn is_zero(&self) -> bool {
        self.kind.as_str() == "N" && self.value == GradeValue::Nat(0)
    }
}

impl fmt::Display for KindedGrade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.kind, self.value)
    }
}

/// A user-declared direct refinement `sub ⊏¹ super`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RefinementEdge {
    pub sub: KindId,
    pub sup: KindId,
    pub hom: HomSpec,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HeteroError {
    #[error("unknown kind `{0}`")]
    UnknownKind(String),
    #[error("kind `{0}` is built in and cannot be declared or refined")]
    ReservedKind(String),
    #[error("kind `{0}` is declared twice")]
    DuplicateKind(String),
    #[error("algebra of kind `{kind}` is invalid: {violation}")]
    InvalidAlgebra { kind: String, violation: String },
    #[error("refinement {sub} -> {sup} is not a homomorphism: {violation}")]
    InvalidHom {
        sub: String,
        sup: String,
        violation: String,
    },
    #[error("refinement edge {0} -> {0} relates a kind to itself")]
    SelfEdge(String),
    #[error("refinement cycle: {}", .0.join(" -> "))]
    CycleDetected(Vec<String>),
    #[error("two refinement paths from {from} to {to}: {} and {}", .first.join(" -> "), .second.join(" -> "))]
    DuplicatePath {
        from: String,
        to: String,
        first: Vec<String>,
        second: Vec<String>,
    },
    #[error("{left} and {right} have common ancestors but no least one; minimal common ancestors: {}", .minimal.join(", "))]
    NoLeastAncestor {
        left: String,
        right: String,
        minimal: Vec<String>,
    },
    #[error("{from} does not refine {to}")]
    NotRefinement { from: String, to: String },
    #[error("derived join violates {0}")]
    SignatureLaw(String),
    #[error("{0}")]
    Grade(#[from] GradeError),
    #[error("malformed universe: {0}")]
    Config(String),
}

pub type HeteroResult<T> = Result<T, HeteroError>;

/// A validated family of grade algebras with derived order, joins and maps.
#[derive(Clone, Debug)]
pub struct GradeUniverse {
    kinds: Vec<KindId>,
    algebras: Vec<AlgebraSpec>,
    edges: Vec<RefinementEdge>,
    below: Vec<Vec<bool>>,
    join: Vec<Vec<usize>>,
    homs: Vec<Vec<Option<HomSpec>>>,
}

impl Default for GradeUniverse {
    /// `N`, `T`, affinity `A` and two-level privacy `P`, with no edges.
    fn default() -> Self {
        validate_universe(
            vec![
                (KindId::new("A"), AlgebraSpec::Affinity),
                (KindId::new("P"), AlgebraSpec::privacy()),
            ],
            vec![],
        )
        .expect("default universe is valid")
    }
}

/// Validates user kinds and edges and derives the signature.
///
/// Kinds are ordered `N`, then user kinds by name, then `T`, so derived
/// tables do not depend on declaration order.
pub fn validate_universe(
    kinds: Vec<(KindId, AlgebraSpec)>,
    edges: Vec<RefinementEdge>,
) -> HeteroResult<GradeUniverse> {
    let mut declared: BTreeMap<KindId, AlgebraSpec> = BTreeMap::new();
    for (k, spec) in kinds {
        if k.is_reserved() {
            return Err(HeteroError::ReservedKind(k.to_string()));
        }
        if declared.contains_key(&k) {
            return Err(HeteroError::DuplicateKind(k.to_string()));
        }
        declared.insert(k, spec);
    }
    for (k, spec) in &declared {
        let report = validate_algebra(spec);
        if let Some(v) = report.first() {
            return Err(HeteroError::InvalidAlgebra {
                kind: k.to_string(),
                violation: v.to_string(),
            });
        }
    }

    let mut names = vec![KindId::nat()];
    names.extend(declared.keys().cloned());
    names.push(KindId::triv());
    let mut algebras = vec![AlgebraSpec::Nat];
    algebras.extend(declared.values().cloned());
    algebras.push(AlgebraSpec::Trivial);
    let n = names.len();
    let idx = |k: &KindId| names.iter().position(|x| x == k);

    // adjacency among user kinds, in declaration order of edges
    let mut succ: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (e_i, e) in edges.iter().enumerate() {
        for k in [&e.sub, &e.sup] {
            if k.is_reserved() {
                return Err(HeteroError::ReservedKind(k.to_string()));
            }
        }
        let s = idx(&e.sub).ok_or_else(|| HeteroError::UnknownKind(e.sub.to_string()))?;
        let t = idx(&e.sup).ok_or_else(|| HeteroError::UnknownKind(e.sup.to_string()))?;
        if s == t {
            return Err(HeteroError::SelfEdge(e.sub.to_string()));
        }
        let report = validate_hom(&e.hom, &algebras[s], &algebras[t]);
        if let Some(v) = report.first() {
            return Err(HeteroError::InvalidHom {
                sub: e.sub.to_string(),
                sup: e.sup.to_string(),
                violation: v.to_string(),
            });
        }
        succ[s].push((t, e_i));
    }

    if let Some(cycle) = find_cycle(&succ) {
        return Err(HeteroError::CycleDetected(
            cycle.iter().map(|&i| names[i].to_string()).collect(),
        ));
    }

    // all paths from each kind (the graph is acyclic, so this terminates)
    let mut paths: Vec<Vec<Vec<Vec<usize>>>> = vec![vec![Vec::new(); n]; n];
    for s in 1..n - 1 {
        let mut stack = vec![(s, vec![s], Vec::<usize>::new())];
        while let Some((v, nodes, via)) = stack.pop() {
            paths[s][v].push(via.clone());
            if paths[s][v].len() > 1 {
                let show = |via: &[usize]| -> Vec<String> {
                    let mut out = vec![names[s].to_string()];
                    out.extend(via.iter().map(|&e| edges[e].sup.to_string()));
                    out
                };
                let mut found = paths[s][v].clone();
                found.sort();
                return Err(HeteroError::DuplicatePath {
                    from: names[s].to_string(),
                    to: names[v].to_string(),
                    first: show(&found[0]),
                    second: show(&found[1]),
                });
            }
            for &(t, e) in succ[v].iter().rev() {
                let mut nodes2 = nodes.clone();
                nodes2.push(t);
                let mut via2 = via.clone();
                via2.push(e);
                stack.push((t, nodes2, via2));
            }
        }
    }

    let mut below = vec![vec![false; n]; n];
    for i in 0..n {
        below[0][i] = true;
        below[i][n - 1] = true;
        for j in 0..n {
            if !paths[i][j].is_empty() {
                below[i][j] = true;
            }
        }
    }

    // joins: least common ancestor, T when there is none
    let mut join = vec![vec![n - 1; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i == 0 {
                join[i][j] = j;
                continue;
            }
            if j == 0 {
                join[i][j] = i;
                continue;
            }
            if i == n - 1 || j == n - 1 {
                continue;
            }
            let common: Vec<usize> = (1..n - 1).filter(|&c| below[i][c] && below[j][c]).collect();
            if common.is_empty() {
                continue;
            }
            match common.iter().find(|&&c| common.iter().all(|&d| below[c][d])) {
                Some(&c) => join[i][j] = c,
                None => {
                    let minimal: Vec<String> = common
                        .iter()
                        .filter(|&&c| !common.iter().any(|&d| d != c && below[d][c]))
                        .map(|&c| names[c].to_string())
                        .collect();
                    return Err(HeteroError::NoLeastAncestor {
                        left: names[i].to_string(),
                        right: names[j].to_string(),
                        minimal,
                    });
                }
            }
        }
    }

    let mut homs = vec![vec![None; n]; n];
    for i in 0..n {
        for j in 0..n {
            if !below[i][j] {
                continue;
            }
            homs[i][j] = Some(if i == j {
                HomSpec::Identity
            } else if i == 0 {
                HomSpec::IotaFromNat(algebras[j].clone())
            } else if j == n - 1 {
                HomSpec::ZetaToTriv
            } else {
                paths[i][j][0]
                    .iter()
                    .fold(HomSpec::Identity, |h, &e| h.then(edges[e].hom.clone()))
            });
        }
    }

    let u = GradeUniverse {
        kinds: names,
        algebras,
        edges,
        below,
        join,
        homs,
    };
    u.check_signature()?;
    Ok(u)
}

fn find_cycle(succ: &[Vec<(usize, usize)>]) -> Option<Vec<usize>> {
    // 0 = unvisited, 1 = on stack, 2 = done
    fn dfs(v: usize, succ: &[Vec<(usize, usize)>], state: &mut [u8], stack: &mut Vec<usize>) -> Option<Vec<usize>> {
        state[v] = 1;
        stack.push(v);
        for &(t, _) in &succ[v] {
            if state[t] == 1 {
                let start = stack.iter().position(|&x| x == t).expect("on stack");
                let mut cycle = stack[start..].to_vec();
                cycle.push(t);
                return Some(cycle);
            }
            if state[t] == 0 {
                if let Some(c) = dfs(t, succ, state, stack) {
                    return Some(c);
                }
            }
        }
        stack.pop();
        state[v] = 2;
        None
    }
    let mut state = vec![0u8; succ.len()];
    for v in 0..succ.len() {
        if state[v] == 0 {
            if let Some(c) = dfs(v, succ, &mut state, &mut Vec::new()) {
                return Some(c);
            }
        }
    }
    None
}

impl GradeUniverse {
    fn check_signature(&self) -> HeteroResult<()> {
        let n = self.kinds.len();
        let name = |i: usize| self.kinds[i].to_string();
        for a in 0..n {
            if self.join[a][a] != a {
                return Err(HeteroError::SignatureLaw(format!("idempotence at {}", name(a))));
            }
            if self.join[a][0] != a {
                return Err(HeteroError::SignatureLaw(format!("unit N at {}", name(a))));
            }
            for b in 0..n {
                if self.join[a][b] != self.join[b][a] {
                    return Err(HeteroError::SignatureLaw(format!("commutativity at {}, {}", name(a), name(b))));
                }
                if !self.below[a][self.join[a][b]] || !self.below[b][self.join[a][b]] {
                    return Err(HeteroError::SignatureLaw(format!("upper bound at {}, {}", name(a), name(b))));
                }
                for c in 0..n {
                    if self.join[self.join[a][b]][c] != self.join[a][self.join[b][c]] {
                        return Err(HeteroError::SignatureLaw(format!(
                            "associativity at {}, {}, {}",
                            name(a),
                            name(b),
                            name(c)
                        )));
                    }
                    if self.below[a][b] && !self.below[self.join[a][c]][self.join[b][c]] {
                        return Err(HeteroError::SignatureLaw(format!(
                            "monotonicity at {}, {}, {}",
                            name(a),
                            name(b),
                            name(c)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// All kinds: `N`, user kinds by name, `T`.
    pub fn kinds(&self) -> &[KindId] {
        &self.kinds
    }

    pub fn edges(&self) -> &[RefinementEdge] {
        &self.edges
    }

    fn index(&self, k: &KindId) -> HeteroResult<usize> {
        self.kinds
            .iter()
            .position(|x| x == k)
            .ok_or_else(|| HeteroError::UnknownKind(k.to_string()))
    }

    pub fn has_kind(&self, k: &KindId) -> bool {
        self.kinds.contains(k)
    }

    pub fn algebra(&self, k: &KindId) -> HeteroResult<&AlgebraSpec> {
        Ok(&self.algebras[self.index(k)?])
    }

    /// `k ⊑ k′`.
    pub fn refines(&self, k: &KindId, k2: &KindId) -> HeteroResult<bool> {
        Ok(self.below[self.index(k)?][self.index(k2)?])
    }

    /// `k ⊔ k′`.
    pub fn join(&self, k: &KindId, k2: &KindId) -> HeteroResult<KindId> {
        Ok(self.kinds[self.join[self.index(k)?][self.index(k2)?]].clone())
    }

    /// The derived map `D(k,k′)` for `k ⊑ k′`.
    pub fn derived_hom(&self, k: &KindId, k2: &KindId) -> HeteroResult<&HomSpec> {
        self.homs[self.index(k)?][self.index(k2)?]
            .as_ref()
            .ok_or_else(|| HeteroError::NotRefinement {
                from: k.to_string(),
                to: k2.to_string(),
            })
    }

    /// Moves a grade into a kind above its own.
    pub fn inject(&self, x: &KindedGrade, to: &KindId) -> HeteroResult<GradeValue> {
        Ok(hom_apply(self.derived_hom(&x.kind, to)?, &x.value)?)
    }

    /// Checks that the value belongs to its kind's algebra.
    pub fn check_grade(&self, x: &KindedGrade) -> HeteroResult<()> {
        let alg = self.algebra(&x.kind)?;
        if alg.contains(&x.value) {
            Ok(())
        } else {
            Err(GradeError::CarrierMismatch {
                value: x.value.to_string(),
                algebra: format!("kind {} ({alg})", x.kind),
            }
            .into())
        }
    }

    pub fn zero(&self) -> KindedGrade {
        KindedGrade::nat(0)
    }

    pub fn one(&self) -> KindedGrade {
        KindedGrade::nat(1)
    }

    /// `⟨k,r⟩ ⪯ ⟨k′,s⟩` iff `k ⊑ k′` and `D(k,k′)(r) ⪯ s`.
    pub fn leq(&self, x: &KindedGrade, y: &KindedGrade) -> HeteroResult<bool> {
        let (i, j) = (self.index(&x.kind)?, self.index(&y.kind)?);
        if !self.below[i][j] {
            return Ok(false);
        }
        let mapped = hom_apply(self.homs[i][j].as_ref().expect("refinement"), &x.value)?;
        Ok(self.algebras[j].leq(&mapped, &y.value)?)
    }

    fn lift2(
        &self,
        x: &KindedGrade,
        y: &KindedGrade,
    ) -> HeteroResult<(usize, GradeValue, GradeValue)> {
        let (i, j) = (self.index(&x.kind)?, self.index(&y.kind)?);
        let k = self.join[i][j];
        let a = hom_apply(self.homs[i][k].as_ref().expect("join is above"), &x.value)?;
        let b = hom_apply(self.homs[j][k].as_ref().expect("join is above"), &y.value)?;
        Ok((k, a, b))
    }

    pub fn add(&self, x: &KindedGrade, y: &KindedGrade) -> HeteroResult<KindedGrade> {
        let (k, a, b) = self.lift2(x, y)?;
        Ok(KindedGrade::new(self.kinds[k].clone(), self.algebras[k].add(&a, &b)?))
    }

    /// Product in the join kind, except that `⟨N,0⟩` on either side gives
    /// `⟨N,0⟩` exactly.
    pub fn mul(&self, x: &KindedGrade, y: &KindedGrade) -> HeteroResult<KindedGrade> {
        if x.is_zero() || y.is_zero() {
            self.check_grade(x)?;
            self.check_grade(y)?;
            return Ok(self.zero());
        }
        let (k, a, b) = self.lift2(x, y)?;
        Ok(KindedGrade::new(self.kinds[k].clone(), self.algebras[k].mul(&a, &b)?))
    }

    /// A maximal `s′` with `demand ⊕ s′ ⪯ available`. The demand is moved
    /// into the available grade's kind and the residual taken there; no
    /// other kind can do better.
    pub fn residual(
        &self,
        available: &KindedGrade,
        demand: &KindedGrade,
    ) -> HeteroResult<Option<KindedGrade>> {
        if !self.refines(&demand.kind, &available.kind)? {
            return Ok(None);
        }
        let d = self.inject(demand, &available.kind)?;
        let alg = self.algebra(&available.kind)?;
        Ok(alg
            .residual(&available.value, &d)?
            .map(|s| KindedGrade::new(available.kind.clone(), s)))
    }

    /// Every element of a finite kind, or `None` for infinite ones.
    pub fn kind_elements(&self, k: &KindId) -> HeteroResult<Option<Vec<KindedGrade>>> {
        Ok(self.algebra(k)?.elements().map(|xs| {
            xs.into_iter()
                .map(|v| KindedGrade::new(k.clone(), v))
                .collect()
        }))
    }

    /// A carrier sample: every element of finite kinds, naturals `0..=nat_bound`
    /// and `extra` sampled values of other infinite kinds.
    pub fn carrier_sample(&self, nat_bound: u64, extra: usize) -> Vec<KindedGrade> {
        let mut out = Vec::new();
        for (k, alg) in self.kinds.iter().zip(&self.algebras) {
            let values: Vec<GradeValue> = match alg {
                AlgebraSpec::Nat => (0..=nat_bound).map(GradeValue::Nat).collect(),
                _ => sample_values(alg, extra, SAMPLE_SEED),
            };
            out.extend(values.into_iter().map(|v| KindedGrade::new(k.clone(), v)));
        }
        out
    }

    /// Reads `K:v`, or a bare natural for kind `N`.
    pub fn parse_grade(&self, text: &str) -> HeteroResult<KindedGrade> {
        let text = text.trim();
        let (kind, value) = match text.split_once(':') {
            Some((k, v)) => (KindId::new(k.trim()), v),
            None => (KindId::nat(), text),
        };
        let alg = self.algebra(&kind)?;
        Ok(KindedGrade::new(kind, alg.parse_value(value)?))
    }

    /// All `(k, k′, k″)` name triples, for law checks.
    pub(crate) fn kind_triples(&self) -> Vec<[usize; 3]> {
        let n = self.kinds.len();
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    out.push([a, b, c]);
                }
            }
        }
        out
    }

    pub(crate) fn join_idx(&self, a: usize, b: usize) -> usize {
        self.join[a][b]
    }

    pub(crate) fn below_idx(&self, a: usize, b: usize) -> bool {
        self.below[a][b]
    }

    pub(crate) fn hom_idx(&self, a: usize, b: usize) -> Option<&HomSpec> {
        self.homs[a][b].as_ref()
    }

    /// Minimal kinds above both, used in error messages.
    pub fn common_ancestors(&self, k: &KindId, k2: &KindId) -> HeteroResult<BTreeSet<KindId>> {
        let (i, j) = (self.index(k)?, self.index(k2)?);
        Ok((0..self.kinds.len())
            .filter(|&c| self.below[i][c] && self.below[j][c])
            .map(|c| self.kinds[c].clone())
            .collect())
    }
}

impl SemiringOps for GradeUniverse {
    type Value = KindedGrade;
    type Error = HeteroError;

    fn contains(&self, v: &KindedGrade) -> bool {
        self.check_grade(v).is_ok()
    }
    fn leq(&self, a: &KindedGrade, b: &KindedGrade) -> HeteroResult<bool> {
        GradeUniverse::leq(self, a, b)
    }
    fn add(&self, a: &KindedGrade, b: &KindedGrade) -> HeteroResult<KindedGrade> {
        GradeUniverse::add(self, a, b)
    }
    fn mul(&self, a: &KindedGrade, b: &KindedGrade) -> HeteroResult<KindedGrade> {
        GradeUniverse::mul(self, a, b)
    }
    fn zero(&self) -> KindedGrade {
        GradeUniverse::zero(self)
    }
    fn one(&self) -> KindedGrade {
        GradeUniverse::one(self)
    }
}

/// The example universe with kinds `A`, `P`, `PP` and `AP = A × P`, where `AP`
/// refines `A` and `P` by projection and `PP` refines `P`.
pub fn fig5_universe() -> GradeUniverse {
    let e = GradeValue::elem;
    validate_universe(
        vec![
            (KindId::new("A"), AlgebraSpec::Affinity),
            (KindId::new("P"), AlgebraSpec::privacy()),
            (KindId::new("PP"), AlgebraSpec::pprivacy()),
            (
                KindId::new("AP"),
                AlgebraSpec::product(AlgebraSpec::Affinity, AlgebraSpec::privacy()),
            ),
        ],
        vec![
            RefinementEdge {
                sub: KindId::new("AP"),
                sup: KindId::new("A"),
                hom: HomSpec::ProjLeft,
            },
            RefinementEdge {
                sub: KindId::new("AP"),
                sup: KindId::new("P"),
                hom: HomSpec::ProjRight,
            },
            RefinementEdge {
                sub: KindId::new("PP"),
                sup: KindId::new("P"),
                hom: HomSpec::FiniteMap(vec![
                    (e("0"), e("0")),
                    (e("a"), e("private")),
                    (e("b"), e("private")),
                    (e("c"), e("public")),
                    (e("d"), e("public")),
                ]),
            },
        ],
    )
    .expect("example universe is valid")
}
