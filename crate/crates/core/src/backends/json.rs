//! The causal-set JSON document format.
//!
//! ```json
//! {"points": [{"id": "a", "coords": [0, 0]}, ...],
//!  "metric": "euclidean" | {"pairs": [[i, j, d], ...]},
//!  "relations": {"mode": "from_coords_minkowski" | "explicit",
//!                "le": [[i, j], ...], "ll": [[i, j], ...]},
//!  "tau": {"mode": "from_coords" | "longest_path" | "explicit",
//!          "links": [[i, j, w], ...], "pairs": [[i, j, t], ...]}}
//! ```
//!
//! Point references `i, j` are either indices into `points` or ids. Values
//! `d`, `w`, `t` may be the string `"inf"`.

use crate::backends::causal_set::CausalSet;
use crate::backends::longest_path::{longest_path_tau, Link};
use crate::backends::minkowski::{euclidean, interval};
use crate::error::{input, Result};
use crate::ext_real::ExtReal;
use crate::relation::BitMatrix;
use crate::space::PointRef;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointKey {
    Index(usize),
    Id(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MetricSpec {
    Named(String),
    Pairs { pairs: Vec<(PointKey, PointKey, ExtReal)> },
}

impl Default for MetricSpec {
    fn default() -> Self {
        MetricSpec::Named("euclidean".into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationMode {
    FromCoordsMinkowski,
    Explicit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationSpec {
    pub mode: RelationMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub le: Option<Vec<(PointKey, PointKey)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ll: Option<Vec<(PointKey, PointKey)>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TauMode {
    FromCoords,
    LongestPath,
    Explicit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TauSpec {
    pub mode: TauMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub links: Option<Vec<(PointKey, PointKey, ExtReal)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairs: Option<Vec<(PointKey, PointKey, ExtReal)>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceDocument {
    pub points: Vec<PointRef>,
    #[serde(default)]
    pub metric: MetricSpec,
    pub relations: RelationSpec,
    pub tau: TauSpec,
}

struct Resolver(HashMap<String, usize>, usize);

impl Resolver {
    fn get(&self, k: &PointKey) -> Result<usize> {
        match k {
            PointKey::Index(i) if *i < self.1 => Ok(*i),
            PointKey::Index(i) => Err(input(format!("point index {i} out of range"))),
            PointKey::Id(s) => self
                .0
                .get(s)
                .copied()
                .ok_or_else(|| input(format!("unknown point id `{s}`"))),
        }
    }
}

fn coords_of(points: &[PointRef]) -> Result<Vec<&[f64]>> {
    points
        .iter()
        .map(|p| {
            p.coords
                .as_deref()
                .ok_or_else(|| input(format!("point `{}` needs coordinates", p.id)))
        })
        .collect()
}

/// Builds the space described by `doc`: transitively closes `<=`, then
/// verifies every axiom and rejects the document on the first failure.
pub fn build_space(doc: &SpaceDocument) -> Result<CausalSet> {
    assemble_space(doc)?.validated()
}

/// As [`build_space`] without the axiom check, for reporting on documents
/// that may violate it.
pub fn assemble_space(doc: &SpaceDocument) -> Result<CausalSet> {
    let points = doc.points.clone();
    let n = points.len();
    let mut ids = HashMap::with_capacity(n);
    for (i, p) in points.iter().enumerate() {
        if ids.insert(p.id.clone(), i).is_some() {
            return Err(input(format!("duplicate point id `{}`", p.id)));
        }
    }
    let res = Resolver(ids, n);

    let mut dist = vec![0.0; n * n];
    match &doc.metric {
        MetricSpec::Named(name) if name == "euclidean" => {
            let c = coords_of(&points)?;
            for i in 0..n {
                for j in 0..n {
                    dist[i * n + j] = euclidean(c[i], c[j]);
                }
            }
        }
        MetricSpec::Named(other) => return Err(input(format!("unknown metric `{other}`"))),
        MetricSpec::Pairs { pairs } => {
            let mut seen = BitMatrix::identity(n);
            for (a, b, d) in pairs {
                let (i, j) = (res.get(a)?, res.get(b)?);
                dist[i * n + j] = d.0;
                dist[j * n + i] = d.0;
                seen.set(i, j, true);
                seen.set(j, i, true);
            }
            for i in 0..n {
                for j in 0..n {
                    if !seen.get(i, j) {
                        return Err(input(format!(
                            "metric pairs miss ({}, {})",
                            points[i].id, points[j].id
                        )));
                    }
                }
            }
        }
    }

    let mut le = BitMatrix::identity(n);
    let mut ll = BitMatrix::new(n);
    let explicit_ll = doc.relations.ll.is_some();
    match doc.relations.mode {
        RelationMode::FromCoordsMinkowski => {
            let c = coords_of(&points)?;
            for i in 0..n {
                for j in 0..n {
                    let (dt, q) = interval(c[i], c[j]);
                    if i != j && dt >= 0.0 && q >= 0.0 {
                        le.set(i, j, true);
                        if dt > 0.0 && q > 0.0 {
                            ll.set(i, j, true);
                        }
                    }
                }
            }
        }
        RelationMode::Explicit => {
            for (a, b) in doc.relations.le.iter().flatten() {
                le.set(res.get(a)?, res.get(b)?, true);
            }
            for (a, b) in doc.relations.ll.iter().flatten() {
                let (i, j) = (res.get(a)?, res.get(b)?);
                ll.set(i, j, true);
                le.set(i, j, true);
            }
        }
    }

    let mut tau = vec![0.0; n * n];
    match doc.tau.mode {
        TauMode::FromCoords => {
            let c = coords_of(&points)?;
            for i in 0..n {
                for j in 0..n {
                    let (dt, q) = interval(c[i], c[j]);
                    if dt >= 0.0 && q > 0.0 {
                        tau[i * n + j] = q.sqrt();
                    }
                }
            }
        }
        TauMode::Explicit => {
            for (a, b, t) in doc.tau.pairs.iter().flatten() {
                tau[res.get(a)? * n + res.get(b)?] = t.0;
            }
        }
        TauMode::LongestPath => {
            let raw = doc
                .tau
                .links
                .as_ref()
                .ok_or_else(|| input("longest_path mode needs `links`"))?;
            let coords_mode = doc.relations.mode == RelationMode::FromCoordsMinkowski;
            let mut links = Vec::with_capacity(raw.len());
            for (a, b, w) in raw {
                let (i, j) = (res.get(a)?, res.get(b)?);
                let chronological = if coords_mode || explicit_ll {
                    ll.get(i, j)
                } else {
                    w.0 > 0.0
                };
                links.push(Link {
                    from: i,
                    to: j,
                    weight: w.0,
                    chronological,
                });
            }
            let ids: Vec<String> = points.iter().map(|p| p.id.clone()).collect();
            let lp = longest_path_tau(&ids, &links)?;
            tau = lp.tau;
            for i in 0..n {
                for j in lp.reach.successors(i) {
                    le.set(i, j, true);
                }
            }
            // push-up: positive separation forces the chronological relation
            for i in 0..n {
                for j in 0..n {
                    if tau[i * n + j] > 0.0 {
                        ll.set(i, j, true);
                    }
                }
            }
        }
    }
    le.transitive_closure();
    if doc.relations.mode == RelationMode::Explicit {
        ll.transitive_closure();
    }

    CausalSet::from_parts(points, le, ll, tau, dist)
}

pub fn parse_space(document: &str) -> Result<CausalSet> {
    let doc: SpaceDocument = serde_json::from_str(document)?;
    build_space(&doc)
}

impl CausalSet {
    /// Document for a coordinate-induced Minkowski set.
    pub fn to_coords_document(&self) -> Result<SpaceDocument> {
        if !self.has_coords() {
            return Err(input("space has no coordinates"));
        }
        Ok(SpaceDocument {
            points: self.points().to_vec(),
            metric: MetricSpec::default(),
            relations: RelationSpec {
                mode: RelationMode::FromCoordsMinkowski,
                le: None,
                ll: None,
            },
            tau: TauSpec {
                mode: TauMode::FromCoords,
                links: None,
                pairs: None,
            },
        })
    }

    /// Fully explicit document listing every table entry.
    pub fn to_explicit_document(&self) -> SpaceDocument {
        let n = self.len();
        let mut metric = Vec::new();
        let mut le = Vec::new();
        let mut ll = Vec::new();
        let mut tau = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i < j {
                    metric.push((PointKey::Index(i), PointKey::Index(j), ExtReal(self.dist(i, j))));
                }
                if i != j && self.le(i, j) {
                    le.push((PointKey::Index(i), PointKey::Index(j)));
                }
                if self.ll(i, j) {
                    ll.push((PointKey::Index(i), PointKey::Index(j)));
                }
                if self.tau(i, j) != 0.0 {
                    tau.push((PointKey::Index(i), PointKey::Index(j), ExtReal(self.tau(i, j))));
                }
            }
        }
        SpaceDocument {
            points: self.points().to_vec(),
            metric: MetricSpec::Pairs { pairs: metric },
            relations: RelationSpec {
                mode: RelationMode::Explicit,
                le: Some(le),
                ll: Some(ll),
            },
            tau: TauSpec {
                mode: TauMode::Explicit,
                links: None,
                pairs: Some(tau),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backends::minkowski::minkowski_tau;
    use crate::error::Error;

    const CHAIN: &str = r#"{
        "points": [{"id": "a", "coords": [0, 0]}, {"id": "b", "coords": [1, 0]}, {"id": "c", "coords": [2, 0]}],
        "metric": "euclidean",
        "relations": {"mode": "from_coords_minkowski"},
        "tau": {"mode": "from_coords"}
    }"#;

    #[test]
    fn parses_coordinate_chain() {
        let cs = parse_space(CHAIN).unwrap();
        assert_eq!(cs.len(), 3);
        assert_eq!(cs.tau(0, 2), 2.0);
        assert!(cs.ll(0, 1));
        assert_eq!(cs.diamond_members(0, 2).members, vec![0, 1, 2]);
    }

    #[test]
    fn explicit_violation_is_rejected_with_witness() {
        let doc = r#"{
            "points": [{"id": "a"}, {"id": "b"}, {"id": "c"}],
            "metric": {"pairs": [["a","b",1], ["b","c",1], ["a","c",2]]},
            "relations": {"mode": "explicit", "le": [["a","b"],["b","c"]], "ll": [["a","b"],["b","c"],["a","c"]]},
            "tau": {"mode": "explicit", "pairs": [["a","b",0.5], ["b","c",0.5], ["a","c",0.9]]}
        }"#;
        match parse_space(doc).unwrap_err() {
            Error::AxiomViolation { axiom, witness } => {
                assert_eq!(axiom, "reverse_triangle");
                assert_eq!(witness, "a, b, c");
            }
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn longest_path_document() {
        let doc = r#"{
            "points": [{"id": "a"}, {"id": "b"}, {"id": "c"}],
            "metric": {"pairs": [[0,1,1], [1,2,1], [0,2,2]]},
            "relations": {"mode": "explicit"},
            "tau": {"mode": "longest_path", "links": [[0,1,0.5], [1,2,0.7], [0,2,1.0]]}
        }"#;
        let cs = parse_space(doc).unwrap();
        assert!((cs.tau(0, 2) - 1.2).abs() < 1e-15);
        assert!(cs.ll(0, 2));
    }

    #[test]
    fn null_link_in_document() {
        let doc = r#"{
            "points": [{"id": "a"}, {"id": "b"}],
            "metric": {"pairs": [[0,1,1]]},
            "relations": {"mode": "explicit", "le": [["a","b"]], "ll": []},
            "tau": {"mode": "longest_path", "links": [["a","b",0]]}
        }"#;
        let cs = parse_space(doc).unwrap();
        assert!(cs.le(0, 1));
        assert!(!cs.ll(0, 1));
        assert_eq!(cs.tau(0, 1), 0.0);
    }

    #[test]
    fn weighted_link_not_declared_chronological_is_rejected() {
        let doc = r#"{
            "points": [{"id": "a"}, {"id": "b"}],
            "metric": {"pairs": [[0,1,1]]},
            "relations": {"mode": "explicit", "le": [["a","b"]], "ll": []},
            "tau": {"mode": "longest_path", "links": [["a","b",1.5]]}
        }"#;
        assert!(matches!(parse_space(doc), Err(Error::Input(_))));
    }

    #[test]
    fn cyclic_links_are_rejected() {
        let doc = r#"{
            "points": [{"id": "a"}, {"id": "b"}],
            "metric": {"pairs": [[0,1,1]]},
            "relations": {"mode": "explicit"},
            "tau": {"mode": "longest_path", "links": [["a","b",1], ["b","a",1]]}
        }"#;
        assert!(matches!(parse_space(doc), Err(Error::Cycle(_))));
    }

    #[test]
    fn schema_violations_are_reported() {
        assert!(matches!(parse_space("{\"points\": 3}"), Err(Error::Json(_))));
        let missing_metric = r#"{
            "points": [{"id": "a"}, {"id": "b"}],
            "metric": {"pairs": []},
            "relations": {"mode": "explicit"},
            "tau": {"mode": "explicit", "pairs": []}
        }"#;
        assert!(matches!(parse_space(missing_metric), Err(Error::Input(_))));
    }

    #[test]
    fn coordinate_relations_match_direct_tau() {
        use crate::backends::sprinkle::{sprinkle, SprinkleConfig};
        let cs = sprinkle(&SprinkleConfig::unit_diamond(2, 80.0, 9)).unwrap();
        let text = serde_json::to_string(&cs.to_coords_document().unwrap()).unwrap();
        let back = parse_space(&text).unwrap();
        for i in 0..back.len() {
            for j in 0..back.len() {
                let t = minkowski_tau(back.coords(i).unwrap(), back.coords(j).unwrap()).unwrap();
                assert_eq!(back.ll(i, j), t > 0.0);
                assert_eq!(back.tau(i, j), t);
            }
        }
    }

    #[test]
    fn explicit_document_round_trip_preserves_tables() {
        let cs = parse_space(CHAIN).unwrap();
        let text = serde_json::to_string(&cs.to_explicit_document()).unwrap();
        let back = parse_space(&text).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(back.tau(i, j), cs.tau(i, j));
                assert_eq!(back.le(i, j), cs.le(i, j));
                assert_eq!(back.dist(i, j), cs.dist(i, j));
            }
        }
    }

    #[test]
    fn infinite_tau_is_accepted() {
        let doc = r#"{
            "points": [{"id": "a"}, {"id": "b"}],
            "metric": {"pairs": [[0,1,1]]},
            "relations": {"mode": "explicit", "ll": [["a","b"]]},
            "tau": {"mode": "explicit", "pairs": [["a","b","inf"]]}
        }"#;
        let cs = parse_space(doc).unwrap();
        assert!(cs.tau(0, 1).is_infinite());
    }
}
