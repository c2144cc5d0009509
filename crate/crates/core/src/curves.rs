//! Causal curves, their τ-length and the one-dimensional measure of their
//! images.
//!
//! A [`Polyline`] is a continuous curve in Minkowski space interpolated
//! linearly between samples; a [`Chain`] is a discrete curve through points
//! of a finite space. For both, `J(γ_i, γ_m)` meets the curve exactly in
//! the piece from `γ_i` to `γ_m` (causality makes the order antisymmetric),
//! so covers by diamonds with sample vertices are interval covers and the
//! optimum is a dynamic program over sample indices.

use crate::backends::causal_set::CausalSet;
use crate::backends::minkowski::{check_dims, euclidean, le_unchecked, tau_unchecked};
use crate::error::{input, Result};
use crate::measure::{Certificate, CoverItem, CoverSolution};
use crate::space::PointRef;
use serde::Serialize;

pub trait CausalCurve {
    fn len(&self) -> usize;
    fn tau(&self, i: usize, j: usize) -> f64;
    /// Diameter of `J(γ_i, γ_j)`.
    fn diam(&self, i: usize, j: usize) -> f64;
    /// Whether the image is a continuum (versus the samples alone).
    fn is_continuum(&self) -> bool;
    fn item(&self, i: usize, j: usize) -> CoverItem;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Polyline {
    samples: Vec<Vec<f64>>,
}

impl Polyline {
    pub fn new(samples: Vec<Vec<f64>>) -> Result<Self> {
        if samples.is_empty() {
            return Err(input("a curve needs at least one sample"));
        }
        for w in samples.windows(2) {
            check_dims(&w[0], &w[1])?;
            if !le_unchecked(&w[0], &w[1]) {
                return Err(input(format!("samples {:?} and {:?} are not causally related", w[0], w[1])));
            }
        }
        Ok(Self { samples })
    }

    /// `n` equally spaced samples from `a` to `b`.
    pub fn straight(a: &[f64], b: &[f64], n: usize) -> Result<Self> {
        if n < 2 {
            return Err(input("a straight segment needs two samples"));
        }
        let s = (0..n)
            .map(|k| {
                let f = k as f64 / (n - 1) as f64;
                a.iter().zip(b).map(|(x, y)| x + f * (y - x)).collect()
            })
            .collect();
        Self::new(s)
    }

    pub fn samples(&self) -> &[Vec<f64>] {
        &self.samples
    }
}

impl CausalCurve for Polyline {
    fn len(&self) -> usize {
        self.samples.len()
    }

    fn tau(&self, i: usize, j: usize) -> f64 {
        tau_unchecked(&self.samples[i], &self.samples[j])
    }

    fn diam(&self, i: usize, j: usize) -> f64 {
        euclidean(&self.samples[i], &self.samples[j])
    }

    fn is_continuum(&self) -> bool {
        true
    }

    fn item(&self, i: usize, j: usize) -> CoverItem {
        CoverItem {
            weight: 1.0,
            p: PointRef::with_coords(format!("gamma{i}"), self.samples[i].clone()),
            q: PointRef::with_coords(format!("gamma{j}"), self.samples[j].clone()),
            tau: self.tau(i, j),
            diam: self.diam(i, j),
            rho: self.tau(i, j),
            members: Vec::new(),
            vertices: Some((i, j)),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Chain<'a> {
    space: &'a CausalSet,
    samples: Vec<usize>,
}

impl<'a> Chain<'a> {
    pub fn new(space: &'a CausalSet, samples: Vec<usize>) -> Result<Self> {
        if samples.is_empty() {
            return Err(input("a curve needs at least one sample"));
        }
        if let Some(&bad) = samples.iter().find(|&&i| i >= space.len()) {
            return Err(input(format!("sample {bad} not in the space")));
        }
        for w in samples.windows(2) {
            if !space.le(w[0], w[1]) {
                return Err(input(format!(
                    "samples `{}` and `{}` are not causally related",
                    space.id(w[0]),
                    space.id(w[1])
                )));
            }
        }
        Ok(Self { space, samples })
    }

    pub fn samples(&self) -> &[usize] {
        &self.samples
    }
}

impl CausalCurve for Chain<'_> {
    fn len(&self) -> usize {
        self.samples.len()
    }

    fn tau(&self, i: usize, j: usize) -> f64 {
        self.space.tau(self.samples[i], self.samples[j])
    }

    fn diam(&self, i: usize, j: usize) -> f64 {
        self.space.diamond_members(self.samples[i], self.samples[j]).diam
    }

    fn is_continuum(&self) -> bool {
        false
    }

    fn item(&self, i: usize, j: usize) -> CoverItem {
        let d = self.space.diamond_members(self.samples[i], self.samples[j]);
        CoverItem::from_diamond(self.space, &d, 1.0, d.tau)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TauLength {
    pub value: f64,
    /// Partition sums from the coarsest level to the finest.
    pub per_level: Vec<f64>,
}

/// τ-length of a polyline over dyadic refinements of the sample
/// partition: level `l` splits every segment into `2^l` pieces.
pub fn tau_length_polyline(curve: &Polyline, levels: u32) -> TauLength {
    let s = &curve.samples;
    let mut per_level = Vec::with_capacity(levels as usize + 1);
    for l in 0..=levels {
        let parts = 1usize << l.min(20);
        let mut sum = 0.0;
        for w in s.windows(2) {
            let at = |k: usize| -> Vec<f64> {
                let f = k as f64 / parts as f64;
                w[0].iter().zip(&w[1]).map(|(a, b)| a + f * (b - a)).collect()
            };
            let mut prev = at(0);
            for k in 1..=parts {
                let next = at(k);
                sum += tau_unchecked(&prev, &next);
                prev = next;
            }
        }
        per_level.push(sum);
    }
    let value = per_level.iter().copied().fold(f64::INFINITY, f64::min);
    TauLength { value, per_level }
}

/// τ-length of a discrete chain: the minimum over partitions anchored at
/// the endpoints and drawn from the samples, by dynamic programming.
/// `per_level` lists the dyadic sub-partitions with stride `2^(L - l)`.
pub fn tau_length_chain(curve: &Chain<'_>, levels: u32) -> TauLength {
    let n = curve.len();
    if n < 2 {
        return TauLength {
            value: 0.0,
            per_level: vec![0.0],
        };
    }
    let mut best = vec![f64::INFINITY; n];
    best[0] = 0.0;
    for j in 1..n {
        for i in 0..j {
            best[j] = best[j].min(best[i] + curve.tau(i, j));
        }
    }
    let top = (usize::BITS - (n - 2).leading_zeros()).min(levels);
    let mut per_level = Vec::new();
    for l in 0..=top {
        let stride = (n - 2 + (1 << l)) >> l;
        let mut idx: Vec<usize> = (0..n).step_by(stride).collect();
        if *idx.last().unwrap() != n - 1 {
            idx.push(n - 1);
        }
        per_level.push(idx.windows(2).map(|w| curve.tau(w[0], w[1])).sum());
    }
    TauLength {
        value: best[n - 1],
        per_level,
    }
}

/// `V^1_delta` of the curve image using diamonds with sample vertices of
/// diameter `< delta`.
pub fn v1_of_curve<C: CausalCurve>(curve: &C, delta: f64) -> Result<CoverSolution> {
    if !(delta > 0.0) {
        return Err(input("delta must be positive"));
    }
    let n = curve.len();
    // state c: samples 0..=c covered (continuum) or 0..c covered (points)
    let (start, end) = if curve.is_continuum() { (0, n - 1) } else { (0, n) };
    let mut best = vec![f64::INFINITY; end + 1];
    let mut back: Vec<Option<(usize, usize, usize)>> = vec![None; end + 1];
    best[start] = 0.0;
    for c in start..end {
        if !best[c].is_finite() {
            continue;
        }
        for i in 0..=c.min(n - 1) {
            let lo = if curve.is_continuum() { c + 1 } else { c.max(i + 1) };
            for m in lo..n {
                if m <= i || !(curve.diam(i, m) < delta) {
                    continue;
                }
                let next = if curve.is_continuum() { m } else { m + 1 };
                let cost = best[c] + curve.tau(i, m);
                if cost < best[next] {
                    best[next] = cost;
                    back[next] = Some((c, i, m));
                }
            }
        }
    }
    // a lone sample spans no diamond J(p, q) with p < q
    if n == 1 || !best[end].is_finite() {
        return Ok(CoverSolution {
            items: Vec::new(),
            cost: f64::INFINITY,
            delta,
            s: 1.0,
            certificate: Certificate::Exact,
        });
    }
    let mut items = Vec::new();
    let mut at = end;
    while let Some((c, i, m)) = back[at] {
        items.push(curve.item(i, m));
        at = c;
    }
    items.reverse();
    Ok(CoverSolution {
        items,
        cost: best[end],
        delta,
        s: 1.0,
        certificate: Certificate::Exact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn straight_segment_length() {
        let c = Polyline::straight(&[0.0, 0.0], &[3.0, 0.0], 4).unwrap();
        let l = tau_length_polyline(&c, 4);
        assert!(l.per_level.iter().all(|v| (v - 3.0).abs() < 1e-12));
    }

    #[test]
    fn bent_polyline_length() {
        let c = Polyline::new(vec![vec![0.0, 0.0], vec![1.0, 0.9], vec![2.0, 0.0]]).unwrap();
        let l = tau_length_polyline(&c, 3);
        assert!((l.value - 2.0 * 0.19f64.sqrt()).abs() < 1e-12);
        assert!((l.value - 0.8718).abs() < 1e-4);
    }

    #[test]
    fn discrete_chain_length() {
        let cs = CausalSet::from_coords([("a", vec![0.0, 0.0]), ("b", vec![1.0, 0.0]), ("c", vec![2.0, 0.0])]).unwrap();
        let ch = Chain::new(&cs, vec![0, 1, 2]).unwrap();
        let l = tau_length_chain(&ch, 5);
        assert_eq!(l.value, 2.0);
        assert_eq!(l.per_level, vec![2.0, 2.0]);
    }

    #[test]
    fn non_causal_samples_rejected() {
        assert!(Polyline::new(vec![vec![0.0, 0.0], vec![1.0, 2.0]]).is_err());
        let cs = CausalSet::from_coords([("a", vec![0.0, 0.0]), ("b", vec![1.0, 0.0])]).unwrap();
        assert!(Chain::new(&cs, vec![1, 0]).is_err());
    }

    #[test]
    fn five_point_chain_measure() {
        let c = Polyline::straight(&[0.0, 0.0], &[4.0, 0.0], 5).unwrap();
        let fine = v1_of_curve(&c, 1.5).unwrap();
        assert!((fine.cost - 4.0).abs() < 1e-12);
        assert_eq!(fine.items.len(), 4);
        let coarse = v1_of_curve(&c, 10.0).unwrap();
        assert!((coarse.cost - 4.0).abs() < 1e-12);
        assert_eq!(coarse.items.len(), 1);
    }

    #[test]
    fn single_point_is_uncoverable() {
        let c = Polyline::new(vec![vec![0.0, 0.0]]).unwrap();
        assert!(v1_of_curve(&c, 1.0).unwrap().cost.is_infinite());
        let cs = CausalSet::from_coords([("a", vec![0.0, 0.0])]).unwrap();
        let ch = Chain::new(&cs, vec![0]).unwrap();
        assert!(v1_of_curve(&ch, 1.0).unwrap().cost.is_infinite());
    }

    #[test]
    fn discrete_chain_may_skip_gaps() {
        let pts: Vec<_> = (0..5).map(|k| (format!("x{k}"), vec![k as f64, 0.0])).collect();
        let cs = CausalSet::from_coords(pts).unwrap();
        let ch = Chain::new(&cs, (0..5).collect()).unwrap();
        // {x0,x1}, {x2,x3}, {x3,x4}: the point semantics drops the gap x1..x2
        assert!((v1_of_curve(&ch, 1.5).unwrap().cost - 3.0).abs() < 1e-12);
    }
}
