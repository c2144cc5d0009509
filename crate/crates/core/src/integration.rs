//! Upper integrals, causal weighted integrals and the fixed-scale coarea
//! chain.
//!
//! The weighted integral of `f` at scale `delta` is the covering program
//! `min sum a_i rho_s(J_i)` over weights `a >= 0` with
//! `sum_{i: x in J_i} a_i >= f(x)`, diamonds of diameter `<= delta`. It is
//! solved through its dual with an exact rational simplex (or in floating
//! point on request) and the primal optimum is read off the final tableau.

use crate::backends::causal_set::{CausalSet, Diamond};
use crate::error::{input, Error, Result};
use crate::lp::{solve_covering, LpScalar};
use crate::maps::{check_causality_preserving, image_diameters, tlip_estimate, CausalMap, TlipVerdict};
use crate::measure::{
    candidate_diamonds, checked_set, cover_value_exact_with, exact_with_costs, omega, rho_costs, rho_with, CoverItem,
    CoverSolution, DiamBound,
};
use crate::setcover::ExactLimits;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::str::FromStr;

/// Largest covering program handed to the simplex.
pub const LP_MAX_POINTS: usize = 64;
pub const LP_MAX_CANDIDATES: usize = 500;

/// Point masses on a finite set of atoms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteMeasure {
    #[serde(with = "crate::ext_real::map")]
    pub atoms: BTreeMap<String, f64>,
}

impl FiniteMeasure {
    pub fn new(atoms: BTreeMap<String, f64>) -> Result<Self> {
        if let Some((k, v)) = atoms.iter().find(|(_, v)| !(**v >= 0.0)) {
            return Err(input(format!("mass of `{k}` is {v}")));
        }
        Ok(Self { atoms })
    }
}

fn mul_ext(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        0.0
    } else {
        a * b
    }
}

/// `sum f(x) mu(x)` with `0 * inf = 0`. On a finite space every function is
/// measurable, so `f` is its own smallest majorant.
pub fn upper_integral_finite(f: &BTreeMap<String, f64>, mu: &FiniteMeasure) -> Result<f64> {
    let mut total = 0.0;
    for (x, &m) in &mu.atoms {
        if m == 0.0 {
            continue;
        }
        let fx = *f
            .get(x)
            .ok_or_else(|| input(format!("f is undefined at atom `{x}`")))?;
        if !(fx >= 0.0) {
            return Err(input(format!("f({x}) = {fx} is not in [0, inf]")));
        }
        total += mul_ext(fx, m);
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntegralMethod {
    /// Floating-point simplex.
    Lp,
    /// Rational simplex.
    Exact,
}

impl FromStr for IntegralMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lp" => Ok(Self::Lp),
            "exact" => Ok(Self::Exact),
            _ => Err(input(format!("unknown integration method `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightedCover {
    pub items: Vec<CoverItem>,
    #[serde(with = "crate::ext_real")]
    pub value: f64,
    #[serde(with = "crate::ext_real")]
    pub delta: f64,
    pub s: f64,
    pub method: IntegralMethod,
}

/// Causal weighted integral of `f` (indexed by point) at scale `delta`
/// with vertices from `pool`.
pub fn weighted_causal_integral_delta(
    space: &CausalSet,
    f: &[f64],
    s: f64,
    delta: f64,
    pool: &[usize],
    method: IntegralMethod,
) -> Result<WeightedCover> {
    let cands = candidate_diamonds(space, delta, pool, DiamBound::Closed, false)?;
    let mut out = weighted_integral_over(space, f, s, &cands, method)?;
    out.delta = delta;
    Ok(out)
}

/// The covering program over an explicit candidate family.
pub fn weighted_integral_over(
    space: &CausalSet,
    f: &[f64],
    s: f64,
    candidates: &[Diamond],
    method: IntegralMethod,
) -> Result<WeightedCover> {
    if f.len() != space.len() {
        return Err(input(format!("f has {} values for {} points", f.len(), space.len())));
    }
    if let Some(v) = f.iter().find(|v| !(**v >= 0.0)) {
        return Err(input(format!("f takes the value {v} outside [0, inf]")));
    }
    let costs = rho_costs(s, candidates)?;
    let done = |items: Vec<CoverItem>, value: f64| WeightedCover {
        items,
        value,
        delta: f64::INFINITY,
        s,
        method,
    };
    let support: Vec<usize> = (0..f.len()).filter(|&x| f[x] > 0.0).collect();
    let mut free_items = Vec::new();
    let mut settled = vec![false; f.len()];
    for (i, d) in candidates.iter().enumerate() {
        if costs[i] != 0.0 {
            continue;
        }
        let w = d
            .members
            .iter()
            .filter(|&&m| f[m] > 0.0 && !settled[m])
            .map(|&m| f[m])
            .fold(0.0, f64::max);
        if w > 0.0 {
            for &m in &d.members {
                settled[m] = true;
            }
            free_items.push(CoverItem::from_diamond(space, d, w, 0.0));
        }
    }
    let rest: Vec<usize> = support.iter().copied().filter(|&x| !settled[x]).collect();
    if rest.iter().any(|&x| f[x].is_infinite()) {
        return Ok(done(Vec::new(), f64::INFINITY));
    }
    let col: BTreeMap<usize, usize> = rest.iter().enumerate().map(|(k, &x)| (x, k)).collect();
    let mut sets: Vec<Vec<usize>> = Vec::new();
    let mut set_cost = Vec::new();
    let mut set_idx = Vec::new();
    let mut seen: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    for (i, d) in candidates.iter().enumerate() {
        if !(costs[i] > 0.0) || !costs[i].is_finite() {
            continue;
        }
        let cols: Vec<usize> = d.members.iter().filter_map(|m| col.get(m).copied()).collect();
        if cols.is_empty() {
            continue;
        }
        match seen.get(&cols) {
            Some(&k) if set_cost[k] <= costs[i] => {}
            Some(&k) => {
                set_cost[k] = costs[i];
                set_idx[k] = i;
            }
            None => {
                seen.insert(cols.clone(), sets.len());
                sets.push(cols);
                set_cost.push(costs[i]);
                set_idx.push(i);
            }
        }
    }
    let mut covered = vec![false; rest.len()];
    for s in &sets {
        for &c in s {
            covered[c] = true;
        }
    }
    if covered.iter().any(|c| !c) {
        return Ok(done(Vec::new(), f64::INFINITY));
    }
    if rest.len() > LP_MAX_POINTS {
        return Err(Error::Size {
            what: "integrand support points",
            actual: rest.len(),
            limit: LP_MAX_POINTS,
        });
    }
    if sets.len() > LP_MAX_CANDIDATES {
        return Err(Error::Size {
            what: "integration candidates",
            actual: sets.len(),
            limit: LP_MAX_CANDIDATES,
        });
    }
    let fv: Vec<f64> = rest.iter().map(|&x| f[x]).collect();
    let (value, weights) = match method {
        IntegralMethod::Exact => solve_checked::<BigRational>(&fv, &sets, &set_cost, 0.0)?,
        IntegralMethod::Lp => solve_checked::<f64>(&fv, &sets, &set_cost, 1e-9)?,
    };
    let mut items = free_items;
    for (k, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            let i = set_idx[k];
            items.push(CoverItem::from_diamond(space, &candidates[i], w, costs[i]));
        }
    }
    Ok(done(items, value))
}

/// Solves the program and verifies primal feasibility, nonnegativity and a
/// zero duality gap within `tol` (relative).
fn solve_checked<T: LpScalar>(f: &[f64], sets: &[Vec<usize>], c: &[f64], tol: f64) -> Result<(f64, Vec<f64>)> {
    let conv = |v: f64| T::from_f64(v).ok_or_else(|| Error::Internal(format!("{v} is not representable")));
    let ft: Vec<T> = f.iter().map(|&v| conv(v)).collect::<Result<_>>()?;
    let ct: Vec<T> = c.iter().map(|&v| conv(v)).collect::<Result<_>>()?;
    let sol = solve_covering(&ft, sets, &ct)?;
    let slack = |v: &T| T::from_f64(tol * v.to_f64().abs().max(1.0)).unwrap_or_else(T::zero);
    let neg_tol = T::from_f64(tol).unwrap_or_else(T::zero);
    if sol.a.iter().any(|a| *a < T::zero() - neg_tol.clone()) {
        return Err(Error::Internal("negative weight in covering optimum".into()));
    }
    let mut load = vec![T::zero(); f.len()];
    for (s, a) in sets.iter().zip(&sol.a) {
        for &x in s {
            load[x] = load[x].clone() + a.clone();
        }
    }
    for (l, fx) in load.iter().zip(&ft) {
        if l.clone() + slack(fx) < *fx {
            return Err(Error::Internal("covering optimum is not feasible".into()));
        }
    }
    let primal = sol
        .a
        .iter()
        .zip(&ct)
        .fold(T::zero(), |acc, (a, c)| acc + a.clone() * c.clone());
    let gap = if primal > sol.value {
        primal.clone() - sol.value.clone()
    } else {
        sol.value.clone() - primal.clone()
    };
    if gap > slack(&sol.value) {
        return Err(Error::Internal("nonzero duality gap".into()));
    }
    Ok((primal.to_f64(), sol.a.iter().map(|a| a.to_f64().max(0.0)).collect()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhiItem {
    pub a: String,
    pub b: String,
    pub image_a: String,
    pub image_b: String,
    /// `rho_s(J(U a, U b))`.
    #[serde(with = "crate::ext_real")]
    pub image_rho: f64,
    /// `rho_t(J(a, b))`.
    #[serde(with = "crate::ext_real")]
    pub source_rho: f64,
    #[serde(with = "crate::ext_real")]
    pub cost: f64,
    #[serde(skip)]
    pub vertices: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhiValue {
    pub s: f64,
    pub t: f64,
    pub delta: f64,
    #[serde(with = "crate::ext_real")]
    pub value: f64,
    pub witness: Vec<PhiItem>,
}

/// `rho_s` of the image diamond `J(y1, y2)`; `J(y, y) = {y}` has `tau = 0`.
fn image_rho(y: &CausalSet, w: f64, s: f64, y1: usize, y2: usize) -> f64 {
    if y1 == y2 {
        rho_with(w, s, 0.0)
    } else if y.le(y1, y2) {
        rho_with(w, s, y.tau(y1, y2))
    } else {
        0.0
    }
}

/// `Phi^{s,t}_delta(U, E)`: minimum of
/// `sum rho_s(J(U a_i, U b_i)) rho_t(J(a_i, b_i))` over causal covers of
/// `E` by diamonds `J(a_i, b_i)` with vertices in `pool` and diameter
/// `< delta`.
#[allow(clippy::too_many_arguments)]
pub fn phi_delta(
    x: &CausalSet,
    y: &CausalSet,
    u: &CausalMap,
    e: &[usize],
    s: f64,
    t: f64,
    delta: f64,
    pool: &[usize],
    limits: &ExactLimits,
) -> Result<PhiValue> {
    let (ws, wt) = (omega(s)?, omega(t)?);
    let cands = candidate_diamonds(x, delta, pool, DiamBound::Strict, false)?;
    let parts: Vec<(f64, f64)> = cands
        .iter()
        .map(|d| {
            let src = if d.is_empty() { 0.0 } else { rho_with(wt, t, d.tau) };
            (image_rho(y, ws, s, u.apply(d.p), u.apply(d.q)), src)
        })
        .collect();
    let costs: Vec<f64> = parts.iter().map(|&(a, b)| mul_ext(a, b)).collect();
    let sel = exact_with_costs(x, e, &cands, &costs, limits)?;
    let (value, witness) = match sel {
        None => (f64::INFINITY, Vec::new()),
        Some(sel) => {
            let items = sel
                .chosen
                .iter()
                .map(|&i| {
                    let d = &cands[i];
                    PhiItem {
                        a: x.id(d.p).into(),
                        b: x.id(d.q).into(),
                        image_a: y.id(u.apply(d.p)).into(),
                        image_b: y.id(u.apply(d.q)).into(),
                        image_rho: parts[i].0,
                        source_rho: parts[i].1,
                        cost: costs[i],
                        vertices: (d.p, d.q),
                    }
                })
                .collect();
            (sel.cost, items)
        }
    };
    Ok(PhiValue {
        s,
        t,
        delta,
        value,
        witness,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InequalityCheck {
    #[serde(with = "crate::ext_real")]
    pub lhs: f64,
    #[serde(with = "crate::ext_real")]
    pub rhs: f64,
    #[serde(with = "crate::ext_real")]
    pub slack: f64,
    pub holds: bool,
}

impl InequalityCheck {
    pub fn new(lhs: f64, rhs: f64, tol: f64) -> Self {
        let slack = if rhs.is_infinite() {
            if lhs.is_infinite() {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            rhs - lhs
        };
        Self {
            lhs,
            rhs,
            slack,
            holds: rhs.is_infinite() || lhs <= rhs + tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FiberEntry {
    pub y: String,
    pub fiber: Vec<String>,
    /// `V^{s-t}_{delta0}(U^{-1}(y) ∩ E)`.
    #[serde(with = "crate::ext_real")]
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChainOptions {
    pub tolerance: f64,
    pub method: IntegralMethod,
    #[serde(skip)]
    pub limits: ExactLimits,
}

impl Default for ChainOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-9,
            method: IntegralMethod::Exact,
            limits: ExactLimits::default(),
        }
    }
}

/// All quantities of the fixed-scale coarea chain
///
/// ```text
/// ∫•_{eta(delta)} V^{s-t}_{delta0}(U^{-1}(y) ∩ E) dV^t
///     <= Phi^{t,s-t}_delta(U, E)
///     <= TLip(U)^t omega_t omega_{s-t} / omega_s * V^s_delta(E)
/// ```
///
/// with every vertex pool equal to the whole space.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainReport {
    pub s: f64,
    pub t: f64,
    pub delta: f64,
    pub delta0: f64,
    pub tolerance: f64,
    pub tlip: f64,
    pub tlip_witness: Option<(String, String)>,
    pub constant: f64,
    pub eta: f64,
    pub measure: CoverSolution,
    pub phi: PhiValue,
    pub fibers: Vec<FiberEntry>,
    pub integral: WeightedCover,
    pub phi_bound: InequalityCheck,
    pub integral_bound: InequalityCheck,
    pub coarea: InequalityCheck,
    pub passed: bool,
}

/// `TLip^t omega_t omega_{s-t} / omega_s`.
pub fn coarea_constant(tlip: f64, s: f64, t: f64) -> Result<f64> {
    Ok(tlip.powf(t) * omega(t)? * omega(s - t)? / omega(s)?)
}

/// Computes every term of the chain without judging it.
#[allow(clippy::too_many_arguments)]
pub fn evaluate_coarea_chain(
    x: &CausalSet,
    y: &CausalSet,
    u: &CausalMap,
    e: &[usize],
    s: f64,
    t: f64,
    delta: f64,
    delta0: f64,
    opts: &ChainOptions,
) -> Result<ChainReport> {
    if !(0.0 <= t && t <= s) {
        return Err(input(format!("need 0 <= t <= s, got s = {s}, t = {t}")));
    }
    if !(delta > 0.0) || !(delta <= delta0) {
        return Err(input(format!("need 0 < delta <= delta0, got {delta}, {delta0}")));
    }
    if u.table.len() != x.len() || u.table.iter().any(|&v| v >= y.len()) {
        return Err(input("map table does not match the spaces"));
    }
    let e = checked_set(x, e)?;
    let causal = check_causality_preserving(x, y, u);
    if !causal.preserving {
        return Err(input(format!("map `{}` is not causality preserving: {causal:?}", u.name)));
    }
    let (tlip, tlip_witness) = match tlip_estimate(x, y, u) {
        TlipVerdict::Lipschitz { lambda, witness } => (lambda, witness),
        TlipVerdict::NotTimelikeLipschitz { witness } => {
            return Err(input(format!(
                "map `{}` is not timelike Lipschitz: witness {witness:?}",
                u.name
            )))
        }
    };
    let constant = coarea_constant(tlip, s, t)?;
    let all_x: Vec<usize> = (0..x.len()).collect();
    let all_y: Vec<usize> = (0..y.len()).collect();

    let cands = candidate_diamonds(x, delta, &all_x, DiamBound::Strict, false)?;
    let mut measure = cover_value_exact_with(x, &e, &cands, s, &opts.limits)?;
    measure.delta = delta;
    let phi = phi_delta(x, y, u, &e, t, s - t, delta, &all_x, &opts.limits)?;

    let eta = image_diameters(x, y, u)
        .into_iter()
        .filter(|(dx, _)| *dx < delta)
        .map(|(_, dy)| dy)
        .fold(0.0, f64::max);

    let fiber_cands = candidate_diamonds(x, delta0, &all_x, DiamBound::Strict, false)?;
    let mut g = vec![0.0; y.len()];
    let mut fibers = Vec::with_capacity(y.len());
    for (yi, gy) in g.iter_mut().enumerate() {
        let fiber: Vec<usize> = e.iter().copied().filter(|&xi| u.apply(xi) == yi).collect();
        if !fiber.is_empty() {
            *gy = cover_value_exact_with(x, &fiber, &fiber_cands, s - t, &opts.limits)?.cost;
        }
        fibers.push(FiberEntry {
            y: y.id(yi).into(),
            fiber: fiber.iter().map(|&xi| x.id(xi).to_string()).collect(),
            value: *gy,
        });
    }
    let mut y_cands = candidate_diamonds(y, eta, &all_y, DiamBound::Closed, false)?;
    // J(y, y) = {y}: images of diamonds collapsed by U
    y_cands.extend((0..y.len()).map(|yi| Diamond {
        p: yi,
        q: yi,
        tau: 0.0,
        diam: 0.0,
        members: vec![yi],
    }));
    let mut integral = weighted_integral_over(y, &g, t, &y_cands, opts.method)?;
    integral.delta = eta;

    let tol = opts.tolerance;
    let rhs = if measure.cost.is_infinite() {
        f64::INFINITY
    } else {
        constant * measure.cost
    };
    let phi_bound = InequalityCheck::new(phi.value, rhs, tol);
    let integral_bound = InequalityCheck::new(integral.value, phi.value, tol);
    let coarea = InequalityCheck::new(integral.value, rhs, tol);
    let passed = phi_bound.holds && integral_bound.holds && coarea.holds;
    Ok(ChainReport {
        s,
        t,
        delta,
        delta0,
        tolerance: tol,
        tlip,
        tlip_witness,
        constant,
        eta,
        measure,
        phi,
        fibers,
        integral,
        phi_bound,
        integral_bound,
        coarea,
        passed,
    })
}

/// As [`evaluate_coarea_chain`], failing with the full report when an
/// inequality is violated beyond tolerance.
#[allow(clippy::too_many_arguments)]
pub fn check_coarea_chain(
    x: &CausalSet,
    y: &CausalSet,
    u: &CausalMap,
    e: &[usize],
    s: f64,
    t: f64,
    delta: f64,
    delta0: f64,
    opts: &ChainOptions,
) -> Result<ChainReport> {
    let report = evaluate_coarea_chain(x, y, u, e, s, t, delta, delta0, opts)?;
    if report.passed {
        return Ok(report);
    }
    let which: Vec<&str> = [
        ("phi bound", report.phi_bound.holds),
        ("integral bound", report.integral_bound.holds),
        ("coarea", report.coarea.holds),
    ]
    .iter()
    .filter(|(_, ok)| !ok)
    .map(|(n, _)| *n)
    .collect();
    let value = serde_json::to_value(&report)?;
    Err(Error::PropertyFailure(which.join(", "), Box::new(value)))
}
