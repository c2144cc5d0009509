//! Diamond volumes, candidate families and the fixed-scale pre-measures.
//!
//! `V^s_delta(A)` is the cheapest cover of `A` by causal diamonds of
//! diameter `< delta`, each costing `rho_s(J(p, q)) = omega_s tau(p, q)^s`.
//! The strong variant `M^s_delta` uses chronological diamonds `I(p, q)`.

use crate::backends::causal_set::{CausalSet, Diamond};
use crate::backends::minkowski::MinkowskiDiamond;
use crate::error::{input, Error, Result};
use crate::setcover::{exact_cover, greedy_cover, ExactLimits, Selection};
use crate::space::PointRef;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::str::FromStr;

/// `omega_N = pi^((N-1)/2) / (N Gamma((N+1)/2) 2^(N-1))`, the volume of a
/// diamond of unit proper time in `N`-dimensional Minkowski space.
/// `omega_0 = 1` by convention.
pub fn omega(n: f64) -> Result<f64> {
    if !(n >= 0.0) || !n.is_finite() {
        return Err(input(format!("omega needs a finite N >= 0, got {n}")));
    }
    Ok(omega_unchecked(n))
}

pub(crate) fn omega_unchecked(n: f64) -> f64 {
    if n == 0.0 || n == 1.0 {
        return 1.0;
    }
    if n == 2.0 {
        return 0.5;
    }
    let ln = 0.5 * (n - 1.0) * PI.ln() - n.ln() - ln_gamma(0.5 * (n + 1.0)) - (n - 1.0) * 2f64.ln();
    ln.exp()
}

/// `rho_s` of a nonempty diamond with proper time `tau`; `0^0 = 1`.
pub fn rho(s: f64, tau: f64) -> Result<f64> {
    let w = omega(s)?;
    if tau.is_nan() || tau < 0.0 {
        return Err(input(format!("tau must be in [0, inf], got {tau}")));
    }
    Ok(rho_with(w, s, tau))
}

pub(crate) fn rho_with(w: f64, s: f64, tau: f64) -> f64 {
    if tau.is_infinite() {
        f64::INFINITY
    } else if s == 0.0 {
        w
    } else {
        w * tau.powf(s)
    }
}

/// `rho_s` of a finite-space diamond; the empty diamond has `rho = 0`.
pub fn rho_diamond(s: f64, d: &Diamond) -> Result<f64> {
    if d.is_empty() {
        omega(s)?;
        return Ok(0.0);
    }
    rho(s, d.tau)
}

/// Whether diameters must stay strictly below the scale or may reach it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiamBound {
    Strict,
    Closed,
}

impl DiamBound {
    pub fn admits(self, diam: f64, delta: f64) -> bool {
        match self {
            DiamBound::Strict => diam < delta,
            DiamBound::Closed => diam <= delta,
        }
    }
}

/// All `J(p, q)` with `p < q` drawn from `pool` whose diameter fits the
/// scale; with `require_timelike` only pairs `p << q`.
pub fn candidate_diamonds(
    space: &CausalSet,
    delta: f64,
    pool: &[usize],
    bound: DiamBound,
    require_timelike: bool,
) -> Result<Vec<Diamond>> {
    let pool = checked_set(space, pool)?;
    let mut out = Vec::new();
    for &p in &pool {
        for &q in &pool {
            if p == q || !space.le(p, q) || (require_timelike && !space.ll(p, q)) {
                continue;
            }
            let d = space.diamond_members(p, q);
            if bound.admits(d.diam, delta) {
                out.push(d);
            }
        }
    }
    Ok(out)
}

/// Chronological diamonds `I(p, q)`, `p << q`, filtered by the diameter of
/// the causal diamond `J(p, q)` with the strict bound.
pub fn chronological_candidates(space: &CausalSet, delta: f64, pool: &[usize]) -> Result<Vec<Diamond>> {
    let pool = checked_set(space, pool)?;
    let mut out = Vec::new();
    for &p in &pool {
        for &q in &pool {
            if !space.ll(p, q) {
                continue;
            }
            let j = space.diamond_members(p, q);
            if j.diam < delta {
                let mut i = space.chronological_members(p, q);
                i.diam = j.diam;
                out.push(i);
            }
        }
    }
    Ok(out)
}

pub(crate) fn checked_set(space: &CausalSet, pts: &[usize]) -> Result<Vec<usize>> {
    let mut v = pts.to_vec();
    v.sort_unstable();
    v.dedup();
    if let Some(&bad) = v.iter().find(|&&i| i >= space.len()) {
        return Err(input(format!("point index {bad} not in universe of size {}", space.len())));
    }
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Certificate {
    Exact,
    Greedy,
    Structured,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    Greedy,
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Method::Exact),
            "greedy" => Ok(Method::Greedy),
            _ => Err(input(format!("unknown method `{s}`"))),
        }
    }
}

/// One weighted diamond of a cover.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverItem {
    #[serde(with = "crate::ext_real")]
    pub weight: f64,
    pub p: PointRef,
    pub q: PointRef,
    #[serde(with = "crate::ext_real")]
    pub tau: f64,
    pub diam: f64,
    /// Cost of the diamond before weighting.
    #[serde(with = "crate::ext_real")]
    pub rho: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub members: Vec<String>,
    /// Vertex indices when the diamond lives in a finite space.
    #[serde(skip)]
    pub vertices: Option<(usize, usize)>,
}

impl CoverItem {
    pub(crate) fn from_diamond(space: &CausalSet, d: &Diamond, weight: f64, rho: f64) -> Self {
        Self {
            weight,
            p: space.points()[d.p].clone(),
            q: space.points()[d.q].clone(),
            tau: d.tau,
            diam: d.diam,
            rho,
            members: d.members.iter().map(|&m| space.id(m).to_string()).collect(),
            vertices: Some((d.p, d.q)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverSolution {
    pub items: Vec<CoverItem>,
    #[serde(with = "crate::ext_real")]
    pub cost: f64,
    #[serde(with = "crate::ext_real")]
    pub delta: f64,
    pub s: f64,
    pub certificate: Certificate,
}

impl CoverSolution {
    pub(crate) fn infeasible(s: f64, delta: f64, certificate: Certificate) -> Self {
        Self {
            items: Vec::new(),
            cost: f64::INFINITY,
            delta,
            s,
            certificate,
        }
    }

    /// Whether the items cover every listed point id.
    pub fn covers(&self, ids: &[&str]) -> bool {
        ids.iter()
            .all(|x| self.items.iter().any(|it| it.members.iter().any(|m| m == x)))
    }
}

/// Reduced cover instance: one set per distinct member mask meeting the
/// target, cheapest first. `index` maps sets back to candidates.
pub(crate) struct Instance {
    pub masks: Vec<u64>,
    pub costs: Vec<f64>,
    pub index: Vec<usize>,
}

pub(crate) fn target_mask(pos: &HashMap<usize, usize>, d: &Diamond) -> u64 {
    d.members
        .iter()
        .filter_map(|m| pos.get(m))
        .fold(0u64, |acc, &k| acc | 1 << k)
}

/// `costs[i]` is the price of `candidates[i]`.
pub(crate) fn build_instance(
    space: &CausalSet,
    target: &[usize],
    candidates: &[Diamond],
    costs: &[f64],
    limits: Option<&ExactLimits>,
) -> Result<Instance> {
    let pos: HashMap<usize, usize> = target.iter().enumerate().map(|(k, &x)| (x, k)).collect();
    let mut best: HashMap<u64, usize> = HashMap::new();
    let mut order: Vec<u64> = Vec::new();
    for (i, d) in candidates.iter().enumerate() {
        let mask = target_mask(&pos, d);
        if mask == 0 || !costs[i].is_finite() {
            continue;
        }
        match best.get(&mask) {
            None => {
                best.insert(mask, i);
                order.push(mask);
            }
            Some(&j) => {
                if rank_key(space, costs[i], &candidates[i]) < rank_key(space, costs[j], &candidates[j]) {
                    best.insert(mask, i);
                }
            }
        }
    }
    if let Some(l) = limits {
        l.check(target.len(), order.len())?;
    }
    let mut index: Vec<usize> = order.iter().map(|m| best[m]).collect();
    index.sort_by(|&a, &b| {
        rank_key(space, costs[a], &candidates[a])
            .partial_cmp(&rank_key(space, costs[b], &candidates[b]))
            .unwrap()
    });
    Ok(Instance {
        masks: index.iter().map(|&i| target_mask(&pos, &candidates[i])).collect(),
        costs: index.iter().map(|&i| costs[i]).collect(),
        index,
    })
}

fn rank_key<'a>(space: &'a CausalSet, cost: f64, d: &Diamond) -> (f64, f64, &'a str, &'a str) {
    (cost, d.diam, space.id(d.p), space.id(d.q))
}

pub(crate) fn rho_costs(s: f64, candidates: &[Diamond]) -> Result<Vec<f64>> {
    let w = omega(s)?;
    Ok(candidates
        .iter()
        .map(|d| if d.is_empty() { 0.0 } else { rho_with(w, s, d.tau) })
        .collect())
}

/// Exact cover with caller-supplied prices; chosen entries index
/// `candidates`.
pub(crate) fn exact_with_costs(
    space: &CausalSet,
    target: &[usize],
    candidates: &[Diamond],
    costs: &[f64],
    limits: &ExactLimits,
) -> Result<Option<Selection>> {
    let target = checked_set(space, target)?;
    let inst = build_instance(space, &target, candidates, costs, Some(limits))?;
    Ok(exact_cover(target.len(), &inst.masks, &inst.costs).map(|sel| {
        let mut chosen: Vec<usize> = sel.chosen.iter().map(|&i| inst.index[i]).collect();
        chosen.sort_unstable();
        Selection { cost: sel.cost, chosen }
    }))
}

fn finish(
    space: &CausalSet,
    candidates: &[Diamond],
    costs: &[f64],
    sel: Option<Selection>,
    s: f64,
    certificate: Certificate,
) -> CoverSolution {
    let Some(sel) = sel else {
        return CoverSolution::infeasible(s, f64::INFINITY, certificate);
    };
    let items: Vec<CoverItem> = sel
        .chosen
        .iter()
        .map(|&i| CoverItem::from_diamond(space, &candidates[i], 1.0, costs[i]))
        .collect();
    CoverSolution {
        items,
        cost: sel.cost,
        delta: f64::INFINITY,
        s,
        certificate,
    }
}

/// Minimum `sum rho_s(J_i)` over subfamilies of `candidates` covering
/// `target`; `+inf` with no items when none does.
pub fn cover_value_exact(space: &CausalSet, target: &[usize], candidates: &[Diamond], s: f64) -> Result<CoverSolution> {
    cover_value_exact_with(space, target, candidates, s, &ExactLimits::default())
}

pub fn cover_value_exact_with(
    space: &CausalSet,
    target: &[usize],
    candidates: &[Diamond],
    s: f64,
    limits: &ExactLimits,
) -> Result<CoverSolution> {
    let costs = rho_costs(s, candidates)?;
    let sel = exact_with_costs(space, target, candidates, &costs, limits)?;
    Ok(finish(space, candidates, &costs, sel, s, Certificate::Exact))
}

/// Greedy upper bound: cost per newly covered point, then smaller diameter,
/// then vertex ids.
pub fn cover_value_greedy(space: &CausalSet, target: &[usize], candidates: &[Diamond], s: f64) -> Result<CoverSolution> {
    let target = checked_set(space, target)?;
    if target.len() > 64 {
        return Err(Error::Unsupported("more than 64 target points".into()));
    }
    let costs = rho_costs(s, candidates)?;
    let inst = build_instance(space, &target, candidates, &costs, None)?;
    let mut order: Vec<usize> = (0..inst.index.len()).collect();
    order.sort_by(|&a, &b| {
        let (da, db) = (&candidates[inst.index[a]], &candidates[inst.index[b]]);
        da.diam
            .total_cmp(&db.diam)
            .then_with(|| (space.id(da.p), space.id(da.q)).cmp(&(space.id(db.p), space.id(db.q))))
    });
    let mut rank = vec![0; order.len()];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r;
    }
    let sel = greedy_cover(target.len(), &inst.masks, &inst.costs, &rank).map(|sel| Selection {
        cost: sel.cost,
        chosen: sel.chosen.iter().map(|&i| inst.index[i]).collect(),
    });
    Ok(finish(space, candidates, &costs, sel, s, Certificate::Greedy))
}

/// Cover value at one scale with the strict diameter bound.
pub fn cover_at_scale(
    space: &CausalSet,
    target: &[usize],
    pool: &[usize],
    s: f64,
    delta: f64,
    method: Method,
    limits: &ExactLimits,
) -> Result<CoverSolution> {
    let cands = candidate_diamonds(space, delta, pool, DiamBound::Strict, false)?;
    let mut sol = match method {
        Method::Exact => cover_value_exact_with(space, target, &cands, s, limits)?,
        Method::Greedy => cover_value_greedy(space, target, &cands, s)?,
    };
    sol.delta = delta;
    Ok(sol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitFlag {
    Converged,
    NotConverged,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureEstimate {
    pub s: f64,
    pub delta_schedule: Vec<f64>,
    #[serde(with = "crate::ext_real::vec")]
    pub values: Vec<f64>,
    pub limit_flag: LimitFlag,
    pub tolerance: f64,
    pub certificate: Certificate,
}

impl MeasureEstimate {
    pub(crate) fn from_values(
        s: f64,
        schedule: Vec<f64>,
        values: Vec<f64>,
        tolerance: f64,
        certificate: Certificate,
    ) -> Result<Self> {
        let drops = |a: f64, b: f64| b < a && (a.is_infinite() || a - b > 1e-12 * a.abs());
        if values.windows(2).any(|w| drops(w[0], w[1])) {
            return Err(Error::Internal(format!(
                "cover values {values:?} decrease as the scale shrinks"
            )));
        }
        let converged = match values.as_slice() {
            [.., a, b] => a == b || (b - a).abs() <= tolerance,
            _ => false,
        };
        Ok(Self {
            s,
            delta_schedule: schedule,
            values,
            limit_flag: if converged {
                LimitFlag::Converged
            } else {
                LimitFlag::NotConverged
            },
            tolerance,
            certificate,
        })
    }
}

pub(crate) fn check_schedule(schedule: &[f64]) -> Result<()> {
    if schedule.is_empty() {
        return Err(input("empty delta schedule"));
    }
    if schedule.iter().any(|d| !(*d > 0.0)) {
        return Err(input("scales must be positive"));
    }
    if schedule.windows(2).any(|w| w[1] >= w[0]) {
        return Err(input("delta schedule must be strictly decreasing"));
    }
    Ok(())
}

/// `V^s_delta(target)` along a decreasing schedule. The vertex pool
/// defaults to the target itself.
#[allow(clippy::too_many_arguments)]
pub fn estimate_measure(
    space: &CausalSet,
    target: &[usize],
    s: f64,
    schedule: &[f64],
    method: Method,
    pool: Option<&[usize]>,
    limits: &ExactLimits,
    tolerance: f64,
) -> Result<MeasureEstimate> {
    check_schedule(schedule)?;
    let pool = pool.unwrap_or(target);
    let mut values = Vec::with_capacity(schedule.len());
    for &delta in schedule {
        values.push(cover_at_scale(space, target, pool, s, delta, method, limits)?.cost);
    }
    if method == Method::Greedy {
        // a cover found at a finer scale is admissible at every coarser one
        for i in (0..values.len().saturating_sub(1)).rev() {
            values[i] = values[i].min(values[i + 1]);
        }
    }
    let cert = match method {
        Method::Exact => Certificate::Exact,
        Method::Greedy => Certificate::Greedy,
    };
    MeasureEstimate::from_values(s, schedule.to_vec(), values, tolerance, cert)
}

/// Tiles a diamond of `R^{1,1}` into `k^2` sub-diamonds along null
/// coordinates `u = t - x`, `v = t + x`. Each tile has proper time
/// `tau / k`, so the total `s = 2` cost is `omega_2 tau^2`.
pub fn minkowski_null_tiling(d: &MinkowskiDiamond, k: usize) -> Result<CoverSolution> {
    if d.dimension() != 2 {
        return Err(Error::Unsupported("null tiling needs R^{1,1}".into()));
    }
    if k == 0 {
        return Err(input("k must be positive"));
    }
    if d.is_empty() {
        return Ok(CoverSolution {
            items: Vec::new(),
            cost: 0.0,
            delta: f64::INFINITY,
            s: 2.0,
            certificate: Certificate::Structured,
        });
    }
    let (p, q) = (&d.p, &d.q);
    let (u0, v0) = (p[0] - p[1], p[0] + p[1]);
    let du = (q[0] - q[1] - u0) / k as f64;
    let dv = (q[0] + q[1] - v0) / k as f64;
    let tile_tau = (du * dv).sqrt();
    let tile_diam = (0.5 * (du * du + dv * dv)).sqrt();
    let tile_rho = 0.5 * tile_tau * tile_tau;
    let point = |u: f64, v: f64| vec![0.5 * (u + v), 0.5 * (v - u)];
    let mut items = Vec::with_capacity(k * k);
    for i in 0..k {
        for j in 0..k {
            let (u, v) = (u0 + i as f64 * du, v0 + j as f64 * dv);
            items.push(CoverItem {
                weight: 1.0,
                p: PointRef::with_coords(format!("tile{i}_{j}.p"), point(u, v)),
                q: PointRef::with_coords(format!("tile{i}_{j}.q"), point(u + du, v + dv)),
                tau: tile_tau,
                diam: tile_diam,
                rho: tile_rho,
                members: Vec::new(),
                vertices: None,
            });
        }
    }
    Ok(CoverSolution {
        items,
        cost: (k * k) as f64 * tile_rho,
        delta: f64::INFINITY,
        s: 2.0,
        certificate: Certificate::Structured,
    })
}

/// The coarsest null tiling whose tiles have diameter `< delta`.
pub fn null_tiling_at(d: &MinkowskiDiamond, delta: f64) -> Result<CoverSolution> {
    if !(delta > 0.0) {
        return Err(input("delta must be positive"));
    }
    let diam = d.diam();
    let mut k = ((diam / delta).floor() as usize).saturating_add(1);
    let mut sol = minkowski_null_tiling(d, k)?;
    while sol.items.first().is_some_and(|t| t.diam >= delta) {
        k += 1;
        sol = minkowski_null_tiling(d, k)?;
    }
    sol.delta = delta;
    Ok(sol)
}

/// `M^s_delta(target)`: exact cover by chronological diamonds with
/// vertices in `pool`.
pub fn strong_measure_value(
    space: &CausalSet,
    target: &[usize],
    delta: f64,
    pool: &[usize],
    s: f64,
    limits: &ExactLimits,
) -> Result<CoverSolution> {
    let cands = chronological_candidates(space, delta, pool)?;
    let mut sol = cover_value_exact_with(space, target, &cands, s, limits)?;
    sol.delta = delta;
    Ok(sol)
}
