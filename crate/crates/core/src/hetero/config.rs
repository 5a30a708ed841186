//! JSON description of a universe.
//!
//! ```json
//! {
//!   "kinds": {
//!     "A": { "builtin": "affinity" },
//!     "AP": { "product": [{ "builtin": "affinity" }, { "builtin": "privacy" }] },
//!     "Q": { "table": { "elements": ["0", "lo", "hi"],
//!                       "leq": [["0","lo"], ...],
//!                       "sum": [[...]], "mul": [[...]],
//!                       "zero": "0", "one": "hi" } }
//!   },
//!   "edges": [ { "sub": "AP", "super": "A", "hom": { "proj": "left" } } ]
//! }
//! ```
//!
//! Builtins are `nat`, `trivial`, `affinity`, `boolean`, `extreal`, and the
//! two privacy lattices `privacy` and `pprivacy`. Homomorphisms are
//! `{"proj": "left"|"right"}`, `{"map": {"src": "dst", ...}}` or
//! `{"compose": [h1, h2]}`; a composite whose middle algebra is not
//! determined by a projection needs a sibling `"via": <algebra>`.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::Deserialize;

use super::{validate_universe, GradeUniverse, HeteroError, HeteroResult, KindId, RefinementEdge};
use crate::grades::{AlgebraSpec, FiniteTable, HomSpec};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct UniverseJson {
    #[serde(default)]
    kinds: BTreeMap<String, AlgebraJson>,
    #[serde(default)]
    edges: Vec<EdgeJson>,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "lowercase")]
enum AlgebraJson {
    Builtin(String),
    Table(TableJson),
    Product(Box<AlgebraJson>, Box<AlgebraJson>),
    Extend(Box<AlgebraJson>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableJson {
    elements: Vec<String>,
    leq: Vec<(String, String)>,
    sum: Vec<Vec<String>>,
    mul: Vec<Vec<String>>,
    zero: String,
    one: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeJson {
    sub: String,
    #[serde(rename = "super")]
    sup: String,
    hom: HomJson,
}

#[derive(Debug, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
enum HomJson {
    Proj { proj: String },
    Map { map: BTreeMap<String, String> },
    Compose {
        compose: (Box<HomJson>, Box<HomJson>),
        via: Option<AlgebraJson>,
    },
}

fn algebra(j: &AlgebraJson) -> HeteroResult<AlgebraSpec> {
    match j {
        AlgebraJson::Builtin(name) => match name.as_str() {
            "nat" => Ok(AlgebraSpec::Nat),
            "trivial" => Ok(AlgebraSpec::Trivial),
            "affinity" => Ok(AlgebraSpec::Affinity),
            "boolean" => Ok(AlgebraSpec::Boolean),
            "extreal" => Ok(AlgebraSpec::ExtReal),
            "privacy" => Ok(AlgebraSpec::privacy()),
            "pprivacy" => Ok(AlgebraSpec::pprivacy()),
            other => Err(HeteroError::Config(format!("unknown algebra `{other}`"))),
        },
        AlgebraJson::Table(t) => Ok(AlgebraSpec::Table(Arc::new(
            FiniteTable::new(&t.elements, &t.leq, &t.sum, &t.mul, &t.zero, &t.one)?,
        ))),
        AlgebraJson::Product(a, b) => {
            Ok(AlgebraSpec::product(algebra(a)?, algebra(b)?))
        }
        AlgebraJson::Extend(a) => Ok(AlgebraSpec::extend(algebra(a)?)),
    }
}

/// The algebra a map lands in, when it is determined by the source.
fn codomain(h: &HomJson, src: &AlgebraSpec) -> Option<AlgebraSpec> {
    match (h, src) {
        (HomJson::Proj { proj }, AlgebraSpec::Product(a, _)) if proj == "left" => Some((**a).clone()),
        (HomJson::Proj { proj }, AlgebraSpec::Product(_, b)) if proj == "right" => Some((**b).clone()),
        (HomJson::Compose { compose: (f, g), via }, _) => {
            let mid = match via {
                Some(v) => algebra(v).ok()?,
                None => codomain(f, src)?,
            };
            codomain(g, &mid)
        }
        _ => None,
    }
}

fn hom(h: &HomJson, src: &AlgebraSpec, tgt: &AlgebraSpec) -> HeteroResult<HomSpec> {
    match h {
        HomJson::Proj { proj } => match proj.as_str() {
            "left" => Ok(HomSpec::ProjLeft),
            "right" => Ok(HomSpec::ProjRight),
            other => Err(HeteroError::Config(format!("unknown projection `{other}`"))),
        },
        HomJson::Map { map } => {
            let mut pairs = Vec::with_capacity(map.len());
            for (a, b) in map {
                pairs.push((src.parse_value(a)?, tgt.parse_value(b)?));
            }
            Ok(HomSpec::FiniteMap(pairs))
        }
        HomJson::Compose { compose: (f, g), via } => {
            let mid = match via {
                Some(v) => algebra(v)?,
                None => codomain(f, src).ok_or_else(|| {
                    HeteroError::Config("cannot infer the middle algebra of a composite; add \"via\"".into())
                })?,
            };
            Ok(HomSpec::Compose(Box::new(hom(f, src, &mid)?), Box::new(hom(g, &mid, tgt)?)))
        }
    }
}

/// Parses and validates a universe from JSON text.
pub fn parse_universe(text: &str) -> HeteroResult<GradeUniverse> {
    let j: UniverseJson =
        serde_json::from_str(text).map_err(|e| HeteroError::Config(e.to_string()))?;
    let mut kinds = Vec::new();
    let mut specs = BTreeMap::new();
    for (name, a) in &j.kinds {
        let k = KindId::new(name);
        if k.is_reserved() {
            return Err(HeteroError::ReservedKind(name.clone()));
        }
        let spec = algebra(a)?;
        specs.insert(name.clone(), spec.clone());
        kinds.push((k, spec));
    }
    let lookup = |name: &str| -> HeteroResult<&AlgebraSpec> {
        if name == "N" || name == "T" {
            return Err(HeteroError::ReservedKind(name.into()));
        }
        specs.get(name).ok_or_else(|| HeteroError::UnknownKind(name.into()))
    };
    let mut edges = Vec::new();
    for e in &j.edges {
        let (src, tgt) = (lookup(&e.sub)?, lookup(&e.sup)?);
        edges.push(RefinementEdge {
            sub: KindId::new(&e.sub),
            sup: KindId::new(&e.sup),
            hom: hom(&e.hom, src, tgt)?,
        });
    }
    validate_universe(kinds, edges)
}

/// The declared algebras of a universe description, without validating
/// them or the refinement edges.
pub fn parse_declared_algebras(text: &str) -> HeteroResult<Vec<(String, AlgebraSpec)>> {
    let j: UniverseJson =
        serde_json::from_str(text).map_err(|e| HeteroError::Config(e.to_string()))?;
    j.kinds.iter().map(|(k, a)| Ok((k.clone(), algebra(a)?))).collect()
}

/// Reads a universe file. I/O failures surface as `std::io::Error`.
pub fn load_universe(path: &Path) -> std::io::Result<HeteroResult<GradeUniverse>> {
    Ok(parse_universe(&std::fs::read_to_string(path)?))
}
