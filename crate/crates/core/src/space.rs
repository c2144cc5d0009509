//! The pre-length space abstraction and its axiom checker.
//!
//! A space answers four queries about ordered point pairs: the background
//! metric `d`, the causal relation `<=`, the chronological relation `<<`
//! and the time separation `tau` (valued in `[0, +inf]`). Lower
//! semicontinuity of `tau` is not checked: it is automatic on finite spaces
//! and holds in closed form for the Minkowski backend.

use crate::error::{input, Result};
use serde::{Deserialize, Serialize};

/// Relative slack used when comparing sums of time separations.
pub const REVERSE_TRIANGLE_RTOL: f64 = 1e-12;

/// A point of a space: a unique id and, for coordinate backends, its
/// time-first coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRef {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<f64>>,
}

impl PointRef {
    pub fn new(id: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            coords: None,
        }
    }

    pub fn with_coords(id: impl Into<String>, coords: Vec<f64>) -> Self {
        Self {
            id: id.into(),
            coords: Some(coords),
        }
    }
}

pub trait PreLengthSpace {
    type Point: Clone + PartialEq;

    fn distance(&self, x: &Self::Point, y: &Self::Point) -> f64;
    /// Causal relation `x <= y`.
    fn le(&self, x: &Self::Point, y: &Self::Point) -> bool;
    /// Chronological relation `x << y`.
    fn ll(&self, x: &Self::Point, y: &Self::Point) -> bool;
    fn tau(&self, x: &Self::Point, y: &Self::Point) -> f64;
    /// Rejects points outside the universe.
    fn check_point(&self, x: &Self::Point) -> Result<()>;
    fn describe(&self, x: &Self::Point) -> String;
    /// The whole universe when it is finite.
    fn all_points(&self) -> Option<Vec<Self::Point>>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CausalityClass {
    None,
    Chronological,
    Causal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomCheck {
    pub axiom: String,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub checks: Vec<AxiomCheck>,
    pub causality_class: CausalityClass,
}

impl AxiomReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| !c.passed)
    }

    pub fn check(&self, axiom: &str) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.axiom == axiom)
    }
}

/// Which points to test.
pub enum Sample<'a, P> {
    /// Every point of a finite universe.
    All,
    Points(&'a [P]),
}

pub mod axiom {
    pub const LE_REFLEXIVE: &str = "le_reflexive";
    pub const LE_TRANSITIVE: &str = "le_transitive";
    pub const LL_TRANSITIVE: &str = "ll_transitive";
    pub const LL_WITHIN_LE: &str = "ll_within_le";
    pub const TAU_NONNEGATIVE: &str = "tau_nonnegative";
    pub const TAU_POSITIVE_IFF_LL: &str = "tau_positive_iff_ll";
    pub const TAU_ZERO_OFF_LE: &str = "tau_zero_off_le";
    pub const REVERSE_TRIANGLE: &str = "reverse_triangle";
    pub const METRIC_NONNEGATIVE: &str = "metric_nonnegative";
    pub const METRIC_IDENTITY: &str = "metric_identity";
    pub const METRIC_SYMMETRY: &str = "metric_symmetry";
    pub const METRIC_TRIANGLE: &str = "metric_triangle";
    pub const LL_IRREFLEXIVE: &str = "ll_irreflexive";
    pub const LE_ANTISYMMETRIC: &str = "le_antisymmetric";
}

struct Recorder<'s, S: PreLengthSpace> {
    space: &'s S,
    checks: Vec<AxiomCheck>,
}

impl<S: PreLengthSpace> Recorder<'_, S> {
    fn record(&mut self, axiom: &str, witness: Option<Vec<&S::Point>>) {
        let witness = witness.map(|w| w.into_iter().map(|p| self.space.describe(p)).collect());
        self.checks.push(AxiomCheck {
            axiom: axiom.to_string(),
            passed: witness.is_none(),
            witness,
        });
    }
}

fn find_pair<P>(pts: &[P], mut bad: impl FnMut(&P, &P) -> bool) -> Option<Vec<&P>> {
    for x in pts {
        for y in pts {
            if bad(x, y) {
                return Some(vec![x, y]);
            }
        }
    }
    None
}

/// Checks every pre-length axiom plus the chronological and causal
/// conditions on all pairs and triples of the sample. Deterministic: the
/// witness reported for a failed check is the first one in sample order.
pub fn verify_axioms<S: PreLengthSpace>(space: &S, sample: Sample<'_, S::Point>) -> Result<AxiomReport> {
    let owned;
    let pts: &[S::Point] = match sample {
        Sample::All => {
            owned = space
                .all_points()
                .ok_or_else(|| input("sample ALL requires a finite universe"))?;
            &owned
        }
        Sample::Points(p) => {
            for x in p {
                space.check_point(x)?;
            }
            p
        }
    };

    let mut rec = Recorder {
        space,
        checks: Vec::with_capacity(14),
    };
    use axiom::*;

    let w = pts.iter().find(|x| !space.le(x, x)).map(|x| vec![x]);
    rec.record(LE_REFLEXIVE, w);

    let w = find_triple(pts, |x, y| space.le(x, y), |x, z| space.le(x, z));
    rec.record(LE_TRANSITIVE, w);

    let w = find_triple(pts, |x, y| space.ll(x, y), |x, z| space.ll(x, z));
    rec.record(LL_TRANSITIVE, w);

    let w = find_pair(pts, |x, y| space.ll(x, y) && !space.le(x, y));
    rec.record(LL_WITHIN_LE, w);

    let w = find_pair(pts, |x, y| {
        let t = space.tau(x, y);
        t.is_nan() || t < 0.0
    });
    rec.record(TAU_NONNEGATIVE, w);

    let w = find_pair(pts, |x, y| (space.tau(x, y) > 0.0) != space.ll(x, y));
    rec.record(TAU_POSITIVE_IFF_LL, w);

    let w = find_pair(pts, |x, y| !space.le(x, y) && space.tau(x, y) != 0.0);
    rec.record(TAU_ZERO_OFF_LE, w);

    let mut rt = None;
    'outer: for x in pts {
        for y in pts.iter().filter(|y| space.le(x, y)) {
            let txy = space.tau(x, y);
            for z in pts.iter().filter(|z| space.le(y, z)) {
                let lhs = space.tau(x, z);
                let rhs = txy + space.tau(y, z);
                if lhs < rhs && !(rhs - lhs <= REVERSE_TRIANGLE_RTOL * lhs.abs().max(1.0)) {
                    rt = Some(vec![x, y, z]);
                    break 'outer;
                }
            }
        }
    }
    rec.record(REVERSE_TRIANGLE, rt);

    let w = find_pair(pts, |x, y| {
        let d = space.distance(x, y);
        d.is_nan() || d < 0.0
    });
    rec.record(METRIC_NONNEGATIVE, w);

    let w = find_pair(pts, |x, y| (space.distance(x, y) == 0.0) != (x == y));
    rec.record(METRIC_IDENTITY, w);

    let w = find_pair(pts, |x, y| space.distance(x, y) != space.distance(y, x));
    rec.record(METRIC_SYMMETRY, w);

    let mut mt = None;
    'outer2: for x in pts {
        for y in pts {
            let dxy = space.distance(x, y);
            for z in pts {
                let dxz = space.distance(x, z);
                let via = dxy + space.distance(y, z);
                if dxz > via && dxz - via > REVERSE_TRIANGLE_RTOL * dxz.max(1.0) {
                    mt = Some(vec![x, y, z]);
                    break 'outer2;
                }
            }
        }
    }
    rec.record(METRIC_TRIANGLE, mt);

    let irreflexive = pts.iter().find(|x| space.ll(x, x)).map(|x| vec![x]);
    let chronological = irreflexive.is_none();
    rec.record(LL_IRREFLEXIVE, irreflexive);

    let anti = find_pair(pts, |x, y| x != y && space.le(x, y) && space.le(y, x));
    let antisymmetric = anti.is_none();
    rec.record(LE_ANTISYMMETRIC, anti);

    let causality_class = match (chronological, antisymmetric) {
        (true, true) => CausalityClass::Causal,
        (true, false) => CausalityClass::Chronological,
        _ => CausalityClass::None,
    };
    Ok(AxiomReport {
        checks: rec.checks,
        causality_class,
    })
}

fn find_triple<P>(
    pts: &[P],
    rel: impl Fn(&P, &P) -> bool,
    rel_xz: impl Fn(&P, &P) -> bool,
) -> Option<Vec<&P>> {
    for x in pts {
        for y in pts.iter().filter(|y| rel(x, y)) {
            for z in pts.iter().filter(|z| rel(y, z)) {
                if !rel_xz(x, z) {
                    return Some(vec![x, y, z]);
                }
            }
        }
    }
    None
}
