use crate::backends::minkowski::{euclidean, interval};
use crate::error::{input, Error, Result};
use crate::relation::BitMatrix;
use crate::space::{verify_axioms, CausalityClass, PointRef, PreLengthSpace, Sample};
use serde::Serialize;
use std::collections::HashMap;

/// A finite pre-length space given by explicit tables.
///
/// Immutable after construction. Indices `0..len()` are the point handles
/// used throughout the crate.
#[derive(Debug, Clone)]
pub struct CausalSet {
    points: Vec<PointRef>,
    index: HashMap<String, usize>,
    le: BitMatrix,
    ll: BitMatrix,
    tau: Vec<f64>,
    dist: Vec<f64>,
}

/// `J(p, q)` (or `I(p, q)`) of a finite space with its cached descriptors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diamond {
    pub p: usize,
    pub q: usize,
    #[serde(with = "crate::ext_real")]
    pub tau: f64,
    /// Diameter of the member set.
    pub diam: f64,
    /// Sorted member indices.
    pub members: Vec<usize>,
}

impl Diamond {
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.members.binary_search(&x).is_ok()
    }

    pub fn is_degenerate(&self) -> bool {
        self.p == self.q
    }
}

impl CausalSet {
    /// Assembles a space from raw tables without checking the axioms.
    pub fn from_parts(
        points: Vec<PointRef>,
        le: BitMatrix,
        ll: BitMatrix,
        tau: Vec<f64>,
        dist: Vec<f64>,
    ) -> Result<Self> {
        let n = points.len();
        if le.len() != n || ll.len() != n || tau.len() != n * n || dist.len() != n * n {
            return Err(input("table sizes do not match the point count"));
        }
        let mut index = HashMap::with_capacity(n);
        for (i, p) in points.iter().enumerate() {
            if index.insert(p.id.clone(), i).is_some() {
                return Err(input(format!("duplicate point id `{}`", p.id)));
            }
        }
        if let Some(d) = points.first().and_then(|p| p.coords.as_ref()).map(Vec::len) {
            if points.iter().any(|p| p.coords.as_ref().is_some_and(|c| c.len() != d)) {
                return Err(input("points carry coordinates of different lengths"));
            }
        }
        Ok(Self {
            points,
            index,
            le,
            ll,
            tau,
            dist,
        })
    }

    /// Points of Minkowski space with relations, `tau` and the Euclidean
    /// metric induced from coordinates.
    pub fn from_minkowski(points: Vec<PointRef>) -> Result<Self> {
        let n = points.len();
        let coords: Vec<&[f64]> = points
            .iter()
            .map(|p| {
                p.coords
                    .as_deref()
                    .ok_or_else(|| input(format!("point `{}` has no coordinates", p.id)))
            })
            .collect::<Result<_>>()?;
        let dim = coords.first().map_or(1, |c| c.len());
        if dim == 0 || coords.iter().any(|c| c.len() != dim) {
            return Err(input("inconsistent coordinate lengths"));
        }
        if coords.iter().any(|c| c.iter().any(|v| !v.is_finite())) {
            return Err(input("non-finite coordinates"));
        }
        let mut le = BitMatrix::new(n);
        let mut ll = BitMatrix::new(n);
        let mut tau = vec![0.0; n * n];
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                dist[i * n + j] = euclidean(coords[i], coords[j]);
                if i == j {
                    le.set(i, i, true);
                    continue;
                }
                let (dt, q) = interval(coords[i], coords[j]);
                if dt >= 0.0 && q >= 0.0 {
                    le.set(i, j, true);
                    if dt > 0.0 && q > 0.0 {
                        ll.set(i, j, true);
                        tau[i * n + j] = q.sqrt();
                    }
                }
            }
        }
        Self::from_parts(points, le, ll, tau, dist)
    }

    /// Convenience constructor from `(id, coords)` pairs.
    pub fn from_coords<S: Into<String>>(pts: impl IntoIterator<Item = (S, Vec<f64>)>) -> Result<Self> {
        Self::from_minkowski(
            pts.into_iter()
                .map(|(id, c)| PointRef::with_coords(id, c))
                .collect(),
        )
    }

    /// Runs the full axiom check and rejects failures and non-causal
    /// spaces.
    pub fn validated(self) -> Result<Self> {
        let report = verify_axioms(&self, Sample::All)?;
        if let Some(f) = report.first_failure() {
            return Err(Error::AxiomViolation {
                axiom: f.axiom.clone(),
                witness: f.witness.clone().unwrap_or_default().join(", "),
            });
        }
        if report.causality_class != CausalityClass::Causal {
            return Err(Error::AxiomViolation {
                axiom: "causal".into(),
                witness: "causal relation is not antisymmetric".into(),
            });
        }
        Ok(self)
    }

    /// A copy with extra coordinate points appended; only for spaces whose
    /// structure is induced from Minkowski coordinates.
    pub fn with_extra_points(&self, extra: Vec<PointRef>) -> Result<Self> {
        let mut pts = self.points.clone();
        pts.extend(extra);
        Self::from_minkowski(pts)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[PointRef] {
        &self.points
    }

    pub fn id(&self, i: usize) -> &str {
        &self.points[i].id
    }

    pub fn coords(&self, i: usize) -> Option<&[f64]> {
        self.points[i].coords.as_deref()
    }

    pub fn has_coords(&self) -> bool {
        !self.points.is_empty() && self.points.iter().all(|p| p.coords.is_some())
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| input(format!("unknown point id `{id}`")))
    }

    pub fn indices_of<S: AsRef<str>>(&self, ids: &[S]) -> Result<Vec<usize>> {
        ids.iter().map(|s| self.index_of(s.as_ref())).collect()
    }

    #[inline]
    pub fn le(&self, i: usize, j: usize) -> bool {
        self.le.get(i, j)
    }

    /// `i <= j` and `i != j`.
    #[inline]
    pub fn lt(&self, i: usize, j: usize) -> bool {
        i != j && self.le.get(i, j)
    }

    #[inline]
    pub fn ll(&self, i: usize, j: usize) -> bool {
        self.ll.get(i, j)
    }

    #[inline]
    pub fn tau(&self, i: usize, j: usize) -> f64 {
        self.tau[i * self.len() + j]
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.len() + j]
    }

    pub fn le_matrix(&self) -> &BitMatrix {
        &self.le
    }

    pub fn ll_matrix(&self) -> &BitMatrix {
        &self.ll
    }

    pub fn set_diameter(&self, members: &[usize]) -> f64 {
        let mut d = 0.0f64;
        for (k, &a) in members.iter().enumerate() {
            for &b in &members[k + 1..] {
                d = d.max(self.dist(a, b));
            }
        }
        d
    }

    /// `J(p, q) = J+(p) ∩ J-(q)`; empty unless `p <= q`.
    pub fn diamond_members(&self, p: usize, q: usize) -> Diamond {
        let members: Vec<usize> = if self.le(p, q) {
            (0..self.len())
                .filter(|&x| self.le(p, x) && self.le(x, q))
                .collect()
        } else {
            Vec::new()
        };
        self.make_diamond(p, q, members)
    }

    /// `I(p, q) = I+(p) ∩ I-(q)`.
    pub fn chronological_members(&self, p: usize, q: usize) -> Diamond {
        let members: Vec<usize> = if self.ll(p, q) {
            (0..self.len())
                .filter(|&x| self.ll(p, x) && self.ll(x, q))
                .collect()
        } else {
            Vec::new()
        };
        self.make_diamond(p, q, members)
    }

    fn make_diamond(&self, p: usize, q: usize, members: Vec<usize>) -> Diamond {
        let (tau, diam) = if members.is_empty() && !self.le(p, q) {
            (0.0, 0.0)
        } else {
            (self.tau(p, q), self.set_diameter(&members))
        };
        Diamond {
            p,
            q,
            tau,
            diam,
            members,
        }
    }
}

impl PreLengthSpace for CausalSet {
    type Point = usize;

    fn distance(&self, x: &usize, y: &usize) -> f64 {
        self.dist(*x, *y)
    }

    fn le(&self, x: &usize, y: &usize) -> bool {
        CausalSet::le(self, *x, *y)
    }

    fn ll(&self, x: &usize, y: &usize) -> bool {
        CausalSet::ll(self, *x, *y)
    }

    fn tau(&self, x: &usize, y: &usize) -> f64 {
        CausalSet::tau(self, *x, *y)
    }

    fn check_point(&self, x: &usize) -> Result<()> {
        if *x < self.len() {
            Ok(())
        } else {
            Err(input(format!("point index {x} not in universe of size {}", self.len())))
        }
    }

    fn describe(&self, x: &usize) -> String {
        self.id(*x).to_string()
    }

    fn all_points(&self) -> Option<Vec<usize>> {
        Some((0..self.len()).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::axiom;

    pub(crate) fn chain3() -> CausalSet {
        CausalSet::from_coords([
            ("a", vec![0.0, 0.0]),
            ("b", vec![1.0, 0.0]),
            ("c", vec![2.0, 0.0]),
        ])
        .unwrap()
    }

    #[test]
    fn straight_chain_is_causal() {
        let cs = chain3();
        let rep = verify_axioms(&cs, Sample::All).unwrap();
        assert!(rep.all_passed());
        assert_eq!(rep.causality_class, CausalityClass::Causal);
    }

    #[test]
    fn explicit_reverse_triangle_violation_has_witness() {
        let pts = vec![PointRef::new("a"), PointRef::new("b"), PointRef::new("c")];
        let mut le = BitMatrix::identity(3);
        let mut ll = BitMatrix::new(3);
        for (i, j) in [(0, 1), (1, 2), (0, 2)] {
            le.set(i, j, true);
            ll.set(i, j, true);
        }
        let mut tau = vec![0.0; 9];
        tau[1] = 0.5;
        tau[5] = 0.5;
        tau[2] = 0.9;
        let mut dist = vec![1.0; 9];
        for i in 0..3 {
            dist[i * 3 + i] = 0.0;
        }
        let cs = CausalSet::from_parts(pts, le, ll, tau, dist).unwrap();
        let rep = verify_axioms(&cs, Sample::All).unwrap();
        let rt = rep.check(axiom::REVERSE_TRIANGLE).unwrap();
        assert!(!rt.passed);
        assert_eq!(rt.witness.as_ref().unwrap(), &["a", "b", "c"]);
        assert!(matches!(cs.validated(), Err(Error::AxiomViolation { .. })));
    }

    #[test]
    fn reflexive_ll_breaks_chronology() {
        let pts = vec![PointRef::new("a")];
        let le = BitMatrix::identity(1);
        let ll = BitMatrix::identity(1);
        let cs = CausalSet::from_parts(pts, le, ll, vec![1.0], vec![0.0]).unwrap();
        let rep = verify_axioms(&cs, Sample::All).unwrap();
        assert_eq!(rep.causality_class, CausalityClass::None);
        assert!(!rep.check(axiom::LL_IRREFLEXIVE).unwrap().passed);
    }

    #[test]
    fn report_is_deterministic() {
        let cs = chain3();
        let a = verify_axioms(&cs, Sample::All).unwrap();
        let b = verify_axioms(&cs, Sample::All).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn diamond_of_collinear_chain() {
        let cs = chain3();
        let j = cs.diamond_members(0, 2);
        assert_eq!(j.members, vec![0, 1, 2]);
        assert_eq!(j.tau, 2.0);
        assert_eq!(j.diam, 2.0);
        let back = cs.diamond_members(2, 0);
        assert!(back.is_empty());
    }

    #[test]
    fn null_pair_gives_degenerate_diamond() {
        let cs = CausalSet::from_coords([("p", vec![0.0, 0.0]), ("q", vec![1.0, 1.0])]).unwrap();
        let j = cs.diamond_members(0, 1);
        assert_eq!(j.tau, 0.0);
        assert_eq!(j.members, vec![0, 1]);
        assert!(cs.chronological_members(0, 1).is_empty());
    }

    #[test]
    fn past_vertex_gives_empty_diamond() {
        let cs = CausalSet::from_coords([("p", vec![0.0, 0.0]), ("q", vec![-1.0, 0.0])]).unwrap();
        assert!(cs.diamond_members(0, 1).is_empty());
    }

    #[test]
    fn chronological_diamond_excludes_vertices() {
        let cs = chain3();
        let i = cs.chronological_members(0, 2);
        assert_eq!(i.members, vec![1]);
    }

    #[test]
    fn sample_outside_universe_is_input_error() {
        let cs = chain3();
        assert!(matches!(
            verify_axioms(&cs, Sample::Points(&[0, 7])),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn duplicate_ids_are_rejected() {
        assert!(CausalSet::from_coords([("a", vec![0.0, 0.0]), ("a", vec![1.0, 0.0])]).is_err());
    }
}
