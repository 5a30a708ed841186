//! User-defined finite grade algebras given by explicit tables.

use std::sync::Arc;

use super::GradeError;

/// A finite carrier with its order and operation tables, stored by index.
///
/// The order is taken as given: it is not closed under reflexivity or
/// transitivity, so a table that is not a poset fails validation instead of
/// being silently repaired.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteTable {
    elements: Vec<Arc<str>>,
    leq: Vec<Vec<bool>>,
    sum: Vec<Vec<usize>>,
    mul: Vec<Vec<usize>>,
    zero: usize,
    one: usize,
}

impl FiniteTable {
    /// Builds a table from names. Checks shape and that every entry names an
    /// element; algebraic laws are left to `validate_algebra`.
    pub fn new(
        elements: &[String],
        leq: &[(String, String)],
        sum: &[Vec<String>],
        mul: &[Vec<String>],
        zero: &str,
        one: &str,
    ) -> Result<Self, GradeError> {
        let n = elements.len();
        if n == 0 {
            return Err(GradeError::BadTable("no elements".into()));
        }
        for (i, e) in elements.iter().enumerate() {
            if elements[..i].contains(e) {
                return Err(GradeError::BadTable(format!("duplicate element `{e}`")));
            }
        }
        let idx = |name: &str| {
            elements
                .iter()
                .position(|e| e == name)
                .ok_or_else(|| GradeError::BadTable(format!("unknown element `{name}`")))
        };
        let mut order = vec![vec![false; n]; n];
        for (a, b) in leq {
            order[idx(a)?][idx(b)?] = true;
        }
        let table = |rows: &[Vec<String>], what: &str| -> Result<Vec<Vec<usize>>, GradeError> {
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                return Err(GradeError::BadTable(format!("{what} table must be {n}x{n}")));
            }
            rows.iter()
                .map(|r| r.iter().map(|x| idx(x)).collect())
                .collect()
        };
        Ok(FiniteTable {
            elements: elements.iter().map(|e| Arc::from(e.as_str())).collect(),
            leq: order,
            sum: table(sum, "sum")?,
            mul: table(mul, "mul")?,
            zero: idx(zero)?,
            one: idx(one)?,
        })
    }

    /// Builds a table from index functions. Used for the built-in tables.
    pub fn from_fns(
        elements: &[&str],
        leq: impl Fn(usize, usize) -> bool,
        sum: impl Fn(usize, usize) -> usize,
        mul: impl Fn(usize, usize) -> usize,
        zero: usize,
        one: usize,
    ) -> Self {
        let n = elements.len();
        let grid = |f: &dyn Fn(usize, usize) -> usize| -> Vec<Vec<usize>> {
            (0..n).map(|i| (0..n).map(|j| f(i, j)).collect()).collect()
        };
        FiniteTable {
            elements: elements.iter().map(|e| Arc::from(*e)).collect(),
            leq: (0..n).map(|i| (0..n).map(|j| leq(i, j)).collect()).collect(),
            sum: grid(&sum),
            mul: grid(&mul),
            zero,
            one,
        }
    }

    /// The privacy-style algebra over a lattice: a fresh `0` is added below
    /// `levels`, sum is join, product is meet and one is the top level.
    /// `covers` lists pairs `x ≤ y` generating the order on `levels`.
    pub fn lattice_with_zero(levels: &[&str], covers: &[(&str, &str)]) -> Result<Self, GradeError> {
        let mut names = vec!["0"];
        names.extend_from_slice(levels);
        let n = names.len();
        let pos = |x: &str| {
            names
                .iter()
                .position(|e| *e == x)
                .ok_or_else(|| GradeError::BadTable(format!("unknown level `{x}`")))
        };
        let mut le = vec![vec![false; n]; n];
        for i in 0..n {
            le[i][i] = true;
            le[0][i] = true;
        }
        for (a, b) in covers {
            le[pos(a)?][pos(b)?] = true;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if le[i][k] && le[k][j] {
                        le[i][j] = true;
                    }
                }
            }
        }
        let bound = |i: usize, j: usize, upper: bool| -> Option<usize> {
            let ok = |z: usize| if upper { le[i][z] && le[j][z] } else { le[z][i] && le[z][j] };
            let cands: Vec<usize> = (0..n).filter(|&z| ok(z)).collect();
            cands
                .iter()
                .copied()
                .find(|&z| cands.iter().all(|&w| if upper { le[z][w] } else { le[w][z] }))
        };
        let mut join = vec![vec![0; n]; n];
        let mut meet = vec![vec![0; n]; n];
        for i in 0..n {
            for j in 0..n {
                join[i][j] = bound(i, j, true)
                    .ok_or_else(|| GradeError::BadTable(format!("no join of {} and {}", names[i], names[j])))?;
                meet[i][j] = bound(i, j, false)
                    .ok_or_else(|| GradeError::BadTable(format!("no meet of {} and {}", names[i], names[j])))?;
            }
        }
        let top = (0..n)
            .find(|&t| (0..n).all(|x| le[x][t]))
            .ok_or_else(|| GradeError::BadTable("no top level".into()))?;
        Ok(FiniteTable::from_fns(
            &names,
            |i, j| le[i][j],
            |i, j| join[i][j],
            |i, j| meet[i][j],
            0,
            top,
        ))
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> Vec<&str> {
        self.elements.iter().map(|e| &**e).collect()
    }

    pub fn element(&self, i: usize) -> &Arc<str> {
        &self.elements[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.elements.iter().position(|e| &**e == name)
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.leq[i][j]
    }

    pub fn sum(&self, i: usize, j: usize) -> usize {
        self.sum[i][j]
    }

    pub fn mul(&self, i: usize, j: usize) -> usize {
        self.mul[i][j]
    }

    pub fn zero_index(&self) -> usize {
        self.zero
    }

    pub fn one_index(&self) -> usize {
        self.one
    }

    /// The order as explicit name pairs.
    pub fn leq_pairs(&self) -> Vec<(String, String)> {
        let n = self.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if self.leq[i][j] {
                    out.push((self.elements[i].to_string(), self.elements[j].to_string()));
                }
            }
        }
        out
    }

    /// An operation table as rows of names.
    pub fn rows(&self, mul: bool) -> Vec<Vec<String>> {
        let t = if mul { &self.mul } else { &self.sum };
        t.iter()
            .map(|r| r.iter().map(|&k| self.elements[k].to_string()).collect())
            .collect()
    }
}
