//! Analytic Minkowski space `R^{1,n}` with the Euclidean background metric.
//!
//! Points are time-first coordinate vectors. For `x <= y` the causal diamond
//! `J(x, y)` is convex and its Euclidean diameter is `|y - x|`: in `R^{1,1}`
//! it is a rectangle in null coordinates whose two diagonals have equal
//! length, and in higher dimension the transverse chords of the edge sphere
//! are never longer than that.

use crate::error::{input, Error, Result};
use crate::measure::omega;
use crate::space::PreLengthSpace;
use rand::Rng;
use serde::{Deserialize, Serialize};

pub(crate) fn check_dims(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(input(format!(
            "coordinate length mismatch: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    if x.is_empty() {
        return Err(input("points need at least a time coordinate"));
    }
    Ok(())
}

/// `(dt, dt^2 - |dx|^2)` for the displacement from `x` to `y`.
#[inline]
pub(crate) fn interval(x: &[f64], y: &[f64]) -> (f64, f64) {
    let dt = y[0] - x[0];
    let dx2: f64 = x[1..].iter().zip(&y[1..]).map(|(a, b)| (b - a) * (b - a)).sum();
    (dt, dt * dt - dx2)
}

#[inline]
pub(crate) fn le_unchecked(x: &[f64], y: &[f64]) -> bool {
    let (dt, q) = interval(x, y);
    dt >= 0.0 && q >= 0.0
}

#[inline]
pub(crate) fn ll_unchecked(x: &[f64], y: &[f64]) -> bool {
    let (dt, q) = interval(x, y);
    dt > 0.0 && q > 0.0
}

#[inline]
pub(crate) fn tau_unchecked(x: &[f64], y: &[f64]) -> f64 {
    let (dt, q) = interval(x, y);
    if dt >= 0.0 && q > 0.0 {
        q.sqrt()
    } else {
        0.0
    }
}

#[inline]
pub fn euclidean(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| (b - a) * (b - a))
        .sum::<f64>()
        .sqrt()
}

/// Time separation in Minkowski space: `sqrt(dt^2 - |dx|^2)` when `y` lies
/// in the causal future of `x`, zero otherwise.
pub fn minkowski_tau(x: &[f64], y: &[f64]) -> Result<f64> {
    check_dims(x, y)?;
    Ok(tau_unchecked(x, y))
}

pub fn minkowski_le(x: &[f64], y: &[f64]) -> Result<bool> {
    check_dims(x, y)?;
    Ok(le_unchecked(x, y))
}

pub fn minkowski_ll(x: &[f64], y: &[f64]) -> Result<bool> {
    check_dims(x, y)?;
    Ok(ll_unchecked(x, y))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region {
    /// The causal diamond `J(p, q)`.
    Diamond { p: Vec<f64>, q: Vec<f64> },
    /// Axis-aligned box `[lo, hi]`.
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Whole,
}

impl Region {
    /// The diamond `J((0,..,0), (tau,0,..,0))` in `R^{1,n}`.
    pub fn rest_diamond(n: usize, tau: f64) -> Self {
        let p = vec![0.0; n + 1];
        let mut q = vec![0.0; n + 1];
        q[0] = tau;
        Region::Diamond { p, q }
    }

    pub fn dimension(&self) -> Option<usize> {
        match self {
            Region::Diamond { p, .. } => Some(p.len()),
            Region::Box { lo, .. } => Some(lo.len()),
            Region::Whole => None,
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            Region::Diamond { p, q } => le_unchecked(p, x) && le_unchecked(x, q),
            Region::Box { lo, hi } => x
                .iter()
                .zip(lo.iter().zip(hi))
                .all(|(v, (l, h))| *l <= *v && *v <= *h),
            Region::Whole => true,
        }
    }

    /// Lebesgue volume. A diamond with proper time `tau` in `N` dimensions
    /// has volume `omega_N tau^N`.
    pub fn volume(&self) -> Result<f64> {
        match self {
            Region::Diamond { p, q } => {
                check_dims(p, q)?;
                let t = tau_unchecked(p, q);
                Ok(omega(p.len() as f64)? * t.powi(p.len() as i32))
            }
            Region::Box { lo, hi } => {
                check_dims(lo, hi)?;
                Ok(lo.iter().zip(hi).map(|(l, h)| (h - l).max(0.0)).product())
            }
            Region::Whole => Ok(f64::INFINITY),
        }
    }

    /// Bounding box `(lo, hi)` used for rejection sampling.
    pub(crate) fn bounding_box(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        match self {
            Region::Diamond { p, q } => {
                check_dims(p, q)?;
                let dt = q[0] - p[0];
                let mut lo = vec![p[0]];
                let mut hi = vec![q[0]];
                // |x - c| <= dt/2 for every x in J(p, q), c the spatial midpoint
                for i in 1..p.len() {
                    let c = 0.5 * (p[i] + q[i]);
                    lo.push(c - 0.5 * dt);
                    hi.push(c + 0.5 * dt);
                }
                Ok((lo, hi))
            }
            Region::Box { lo, hi } => Ok((lo.clone(), hi.clone())),
            Region::Whole => Err(input("unbounded region")),
        }
    }
}

/// `R^{1,n}` restricted to a region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinkowskiSpace {
    pub n: usize,
    pub region: Region,
}

impl MinkowskiSpace {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            region: Region::Whole,
        }
    }

    pub fn with_region(n: usize, region: Region) -> Result<Self> {
        if let Some(d) = region.dimension() {
            if d != n + 1 {
                return Err(input(format!(
                    "region has dimension {d}, space has {}",
                    n + 1
                )));
            }
        }
        Ok(Self { n, region })
    }

    pub fn diamond(&self, p: &[f64], q: &[f64]) -> Result<MinkowskiDiamond> {
        self.check_point(&p.to_vec())?;
        self.check_point(&q.to_vec())?;
        MinkowskiDiamond::new(p.to_vec(), q.to_vec())
    }
}

impl PreLengthSpace for MinkowskiSpace {
    type Point = Vec<f64>;

    fn distance(&self, x: &Vec<f64>, y: &Vec<f64>) -> f64 {
        euclidean(x, y)
    }

    fn le(&self, x: &Vec<f64>, y: &Vec<f64>) -> bool {
        le_unchecked(x, y)
    }

    fn ll(&self, x: &Vec<f64>, y: &Vec<f64>) -> bool {
        ll_unchecked(x, y)
    }

    fn tau(&self, x: &Vec<f64>, y: &Vec<f64>) -> f64 {
        tau_unchecked(x, y)
    }

    fn check_point(&self, x: &Vec<f64>) -> Result<()> {
        if x.len() != self.n + 1 {
            return Err(input(format!(
                "point {x:?} has {} coordinates, expected {}",
                x.len(),
                self.n + 1
            )));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(input(format!("point {x:?} has non-finite coordinates")));
        }
        if !self.region.contains(x) {
            return Err(input(format!("point {x:?} lies outside the region")));
        }
        Ok(())
    }

    fn describe(&self, x: &Vec<f64>) -> String {
        format!("{x:?}")
    }

    fn all_points(&self) -> Option<Vec<Vec<f64>>> {
        None
    }
}

/// Analytic causal diamond `J(p, q)` in Minkowski space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinkowskiDiamond {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
}

impl MinkowskiDiamond {
    pub fn new(p: Vec<f64>, q: Vec<f64>) -> Result<Self> {
        check_dims(&p, &q)?;
        Ok(Self { p, q })
    }

    pub fn dimension(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        !le_unchecked(&self.p, &self.q)
    }

    pub fn is_timelike(&self) -> bool {
        ll_unchecked(&self.p, &self.q)
    }

    pub fn tau(&self) -> f64 {
        tau_unchecked(&self.p, &self.q)
    }

    /// Euclidean diameter; zero for the empty diamond.
    pub fn diam(&self) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            euclidean(&self.p, &self.q)
        }
    }

    /// `diam / tau`, infinite for null diamonds.
    pub fn eccentricity(&self) -> f64 {
        let t = self.tau();
        if t > 0.0 {
            self.diam() / t
        } else {
            f64::INFINITY
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        le_unchecked(&self.p, x) && le_unchecked(x, &self.q)
    }

    /// Exact inclusion `other ⊆ self` (transitivity of the causal order).
    pub fn contains_diamond(&self, other: &MinkowskiDiamond) -> bool {
        other.is_empty() || (le_unchecked(&self.p, &other.p) && le_unchecked(&other.q, &self.q))
    }

    /// Null coordinates `(u, v) = (t - x, t + x)` of the vertices; 1+1 only.
    fn null_box(&self) -> Result<[f64; 4]> {
        if self.dimension() != 2 {
            return Err(Error::Unsupported(format!(
                "null-coordinate geometry needs R^(1,1), got dimension {}",
                self.dimension()
            )));
        }
        let (p, q) = (&self.p, &self.q);
        Ok([p[0] - p[1], q[0] - q[1], p[0] + p[1], q[0] + q[1]])
    }

    /// Exact intersection test in `R^{1,1}`, where diamonds are rectangles
    /// in null coordinates.
    pub fn intersects(&self, other: &MinkowskiDiamond) -> Result<bool> {
        if self.is_empty() || other.is_empty() {
            return Ok(false);
        }
        let [u0, u1, v0, v1] = self.null_box()?;
        let [a0, a1, b0, b1] = other.null_box()?;
        Ok(u0.max(a0) <= u1.min(a1) && v0.max(b0) <= v1.min(b1))
    }

    /// Uniform point of a nonempty `R^{1,1}` diamond.
    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<f64>> {
        if self.is_empty() {
            return Err(input("cannot sample an empty diamond"));
        }
        let [u0, u1, v0, v1] = self.null_box()?;
        let u = u0 + (u1 - u0) * rng.random::<f64>();
        let v = v0 + (v1 - v0) * rng.random::<f64>();
        Ok(vec![0.5 * (u + v), 0.5 * (v - u)])
    }
}
