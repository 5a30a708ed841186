//! Environments of the standard and instrumented semantics.

use std::fmt;

use indexmap::IndexMap;

use crate::hetero::KindedGrade;
use crate::lang::{AnnExpr, FjExpr, Name};

/// `x ↦ ⟨v, r⟩`, in insertion order. Equality ignores order.
#[derive(Clone, Debug, Default)]
pub struct GradedEnv {
    map: IndexMap<Name, (AnnExpr, KindedGrade)>,
}

impl PartialEq for GradedEnv {
    fn eq(&self, other: &Self) -> bool {
        self.map.len() == other.map.len()
            && self.map.iter().all(|(k, v)| other.map.get(k) == Some(v))
    }
}

impl Eq for GradedEnv {}

impl GradedEnv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, x: &str) -> Option<&(AnnExpr, KindedGrade)> {
        self.map.get(x)
    }

    pub fn grade(&self, x: &str) -> Option<&KindedGrade> {
        self.map.get(x).map(|(_, g)| g)
    }

    pub fn contains(&self, x: &str) -> bool {
        self.map.contains_key(x)
    }

    pub fn insert(&mut self, x: Name, v: AnnExpr, g: KindedGrade) {
        self.map.insert(x, (v, g));
    }

    /// Updates the grade of a bound variable.
    pub fn set_grade(&mut self, x: &str, g: KindedGrade) {
        if let Some(slot) = self.map.get_mut(x) {
            slot.1 = g;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &AnnExpr, &KindedGrade)> {
        self.map.iter().map(|(k, (v, g))| (k, v, g))
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &Name> {
        self.map.keys()
    }

    pub fn erase(&self) -> StdEnv {
        StdEnv {
            map: self.map.iter().map(|(k, (v, _))| (k.clone(), v.erase())).collect(),
        }
    }

    /// `x:g` pairs in insertion order.
    pub fn grades(&self) -> Vec<(Name, KindedGrade)> {
        self.map.iter().map(|(k, (_, g))| (k.clone(), g.clone())).collect()
    }
}

impl fmt::Display for GradedEnv {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, (_, g))) in self.map.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{k}:{g}")?;
        }
        f.write_str("}")
    }
}

/// `x ↦ v` of the standard semantics.
#[derive(Clone, Debug, Default)]
pub struct StdEnv {
    map: IndexMap<Name, FjExpr>,
}

impl PartialEq for StdEnv {
    fn eq(&self, other: &Self) -> bool {
        self.map.len() == other.map.len()
            && self.map.iter().all(|(k, v)| other.map.get(k) == Some(v))
    }
}

impl Eq for StdEnv {}

impl StdEnv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, x: &str) -> Option<&FjExpr> {
        self.map.get(x)
    }

    pub fn contains(&self, x: &str) -> bool {
        self.map.contains_key(x)
    }

    pub fn insert(&mut self, x: Name, v: FjExpr) {
        self.map.insert(x, v);
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &FjExpr)> {
        self.map.iter()
    }
}
