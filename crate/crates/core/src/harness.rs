//! End-to-end experiments: coarea runs from config files, seeded random
//! suites, the Minkowski volume experiment, the density diagnostic and the
//! strong-vs-causal comparison.

use crate::backends::{build_space, sprinkle, CausalSet, MinkowskiDiamond, SpaceDocument, SprinkleConfig};
use crate::covering::chronological_estimation;
use crate::error::{input, Error, Result};
use crate::integration::{evaluate_coarea_chain, ChainOptions, ChainReport, IntegralMethod};
use crate::maps::{AnalyticRule, CausalMap};
use crate::measure::{
    candidate_diamonds, cover_at_scale, cover_value_exact_with, cover_value_greedy, null_tiling_at,
    omega, rho, strong_measure_value, Certificate, CoverSolution, DiamBound, MeasureEstimate, Method,
};
use crate::setcover::ExactLimits;
use crate::space::PointRef;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;
pub const LP_TOLERANCE: f64 = 1e-6;

/// Where a finite space comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpaceSource {
    /// JSON document, relative paths resolved against the config directory.
    Path(PathBuf),
    Inline(SpaceDocument),
    Sprinkle(SprinkleConfig),
}

impl SpaceSource {
    pub fn load(&self, base_dir: &Path) -> Result<CausalSet> {
        match self {
            Self::Path(p) => {
                let text = std::fs::read_to_string(base_dir.join(p))?;
                let doc: SpaceDocument = serde_json::from_str(&text)?;
                build_space(&doc)
            }
            Self::Inline(doc) => build_space(doc),
            Self::Sprinkle(cfg) => sprinkle(cfg),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapSpec {
    Identity,
    /// Table `x id -> y id`; needs an explicit `y`.
    Table(BTreeMap<String, String>),
    /// Analytic rule such as `scale:2`; `Y` is the image of `X`.
    Rule(String),
}

fn default_tolerance() -> f64 {
    DEFAULT_TOLERANCE
}

fn default_method() -> IntegralMethod {
    IntegralMethod::Exact
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub x: SpaceSource,
    #[serde(default)]
    pub y: Option<SpaceSource>,
    pub map: MapSpec,
    /// Ids of `E`; all of `X` when absent.
    #[serde(default)]
    pub e: Option<Vec<String>>,
    pub s: f64,
    pub t: f64,
    pub delta: f64,
    /// Fiber scale, defaults to `delta`.
    #[serde(default)]
    pub delta0: Option<f64>,
    #[serde(default = "default_method")]
    pub method: IntegralMethod,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0 <= self.t && self.t <= self.s) {
            return Err(input(format!("need 0 <= t <= s, got s = {}, t = {}", self.s, self.t)));
        }
        if !(self.delta > 0.0) {
            return Err(input(format!("delta must be positive, got {}", self.delta)));
        }
        if self.delta0.is_some_and(|d0| !(d0 >= self.delta)) {
            return Err(input("delta0 must be at least delta"));
        }
        if !(self.tolerance >= 0.0) {
            return Err(input("tolerance must be nonnegative"));
        }
        Ok(())
    }
}

/// Facts about the instance that hold by construction on finite spaces.
pub const HYPOTHESES: [&str; 4] = [
    "finite spaces: every function on Y is measurable",
    "finite spaces: measures are sigma-finite and regular",
    "singleton and null diamonds carry zero s-volume for s > 0",
    "U is checked to be causality preserving and timelike Lipschitz before evaluation",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoareaReport {
    pub hypotheses: Vec<String>,
    pub map: String,
    pub s: f64,
    pub t: f64,
    pub delta: f64,
    pub delta0: f64,
    #[serde(with = "crate::ext_real")]
    pub lhs: f64,
    #[serde(with = "crate::ext_real")]
    pub rhs: f64,
    pub constant: f64,
    #[serde(with = "crate::ext_real")]
    pub slack: f64,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(with = "crate::ext_real::map")]
    pub fibers: BTreeMap<String, f64>,
    pub chain: ChainReport,
}

impl CoareaReport {
    pub fn from_chain(map: &str, chain: ChainReport) -> Self {
        Self {
            hypotheses: HYPOTHESES.iter().map(|h| h.to_string()).collect(),
            map: map.to_string(),
            s: chain.s,
            t: chain.t,
            delta: chain.delta,
            delta0: chain.delta0,
            lhs: chain.coarea.lhs,
            rhs: chain.coarea.rhs,
            constant: chain.constant,
            slack: chain.coarea.slack,
            tolerance: chain.tolerance,
            passed: chain.passed,
            fibers: chain.fibers.iter().map(|f| (f.y.clone(), f.value)).collect(),
            chain,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn csv_rows(&self) -> Vec<CsvRow> {
        let row = |q: &str, v: f64| CsvRow::new(q, self.s, Some(self.t), self.delta, v);
        let c = &self.chain;
        let mut rows = vec![
            row("lhs", self.lhs),
            row("rhs", self.rhs),
            row("slack", self.slack),
            row("constant", self.constant),
            row("tlip", c.tlip),
            row("eta", c.eta),
            row("measure", c.measure.cost),
            row("phi", c.phi.value),
            row("integral", c.integral.value),
        ];
        rows.extend(self.fibers.iter().map(|(y, v)| row(&format!("fiber:{y}"), *v)));
        rows
    }
}

/// Loads spaces and map, evaluates the chain and packages the report.
/// Relative paths resolve against `base_dir`.
pub fn run_coarea_experiment(cfg: &ExperimentConfig, base_dir: &Path) -> Result<CoareaReport> {
    cfg.validate()?;
    let x = cfg.x.load(base_dir)?;
    let (y, u) = match &cfg.map {
        MapSpec::Identity => {
            if cfg.y.is_some() {
                return Err(input("the identity map takes no `y`"));
            }
            (x.clone(), CausalMap::identity(&x))
        }
        MapSpec::Table(table) => {
            let y = cfg
                .y
                .as_ref()
                .ok_or_else(|| input("a table map needs `y`"))?
                .load(base_dir)?;
            let u = CausalMap::from_ids("table", table, &x, &y)?;
            (y, u)
        }
        MapSpec::Rule(rule) => {
            if cfg.y.is_some() {
                return Err(input("an analytic rule induces `y`; do not give one"));
            }
            rule.parse::<AnalyticRule>()?.induce(&x)?
        }
    };
    let e = match &cfg.e {
        Some(ids) => x.indices_of(ids)?,
        None => (0..x.len()).collect(),
    };
    let opts = ChainOptions {
        tolerance: cfg.tolerance,
        method: cfg.method,
        limits: ExactLimits::default(),
    };
    let delta0 = cfg.delta0.unwrap_or(cfg.delta);
    let chain = evaluate_coarea_chain(&x, &y, &u, &e, cfg.s, cfg.t, cfg.delta, delta0, &opts)?;
    Ok(CoareaReport::from_chain(&u.name, chain))
}

/// One line of a CSV summary.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub quantity: String,
    pub s: f64,
    pub t: Option<f64>,
    pub delta: f64,
    pub value: f64,
}

impl CsvRow {
    pub fn new(quantity: &str, s: f64, t: Option<f64>, delta: f64, value: f64) -> Self {
        Self {
            quantity: quantity.to_string(),
            s,
            t,
            delta,
            value,
        }
    }
}

fn csv_number(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v}")
    }
}

pub fn to_csv(rows: &[CsvRow]) -> String {
    let mut out = String::from("quantity,s,t,delta,value\n");
    for r in rows {
        let t = r.t.map(csv_number).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.quantity,
            csv_number(r.s),
            t,
            csv_number(r.delta),
            csv_number(r.value)
        );
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapKind {
    Quotient,
    Identity,
    Scale,
}

/// A generated coarea instance.
#[derive(Debug, Clone)]
pub struct RandomInstance {
    pub seed: u64,
    pub kind: MapKind,
    pub x: CausalSet,
    pub y: CausalSet,
    pub map: CausalMap,
    pub e: Vec<usize>,
    pub s: f64,
    pub t: f64,
    pub delta: f64,
    pub delta0: f64,
}

/// Shape of the random instances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomShape {
    pub max_x: usize,
    pub max_y: usize,
    pub ecc_max: f64,
}

impl Default for RandomShape {
    fn default() -> Self {
        Self {
            max_x: 10,
            max_y: 4,
            ecc_max: 3.0,
        }
    }
}

/// Points of the unit `R^{1,1}` diamond whose causal pairs are all
/// timelike with eccentricity at most `ecc_max`.
fn capped_points(rng: &mut ChaCha8Rng, n: usize, ecc_max: f64) -> Result<Vec<Vec<f64>>> {
    let mut pts: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut attempts = 0usize;
    while pts.len() < n {
        attempts += 1;
        if attempts > 100_000 {
            return Err(Error::Infeasible(format!(
                "could not place {n} points with eccentricity <= {ecc_max}"
            )));
        }
        let (u, v): (f64, f64) = (rng.random(), rng.random());
        let c = vec![0.5 * (u + v), 0.5 * (v - u)];
        let ok = pts.iter().all(|p| {
            let (a, b) = if p[0] <= c[0] { (p, &c) } else { (&c, p) };
            let dt = b[0] - a[0];
            let dx = (b[1] - a[1]).abs();
            if dt < dx {
                return true;
            }
            MinkowskiDiamond::new(a.clone(), b.clone()).is_ok_and(|d| d.is_timelike() && d.eccentricity() <= ecc_max)
        });
        if ok {
            pts.push(c);
        }
    }
    Ok(pts)
}

/// Seeded instance: `X` in the unit diamond, the map one of a time-bucket
/// quotient onto a chain, the identity or a scaling, `s, t` in `{0, 1, 2}`.
pub fn random_coarea_instance(seed: u64, shape: &RandomShape) -> Result<RandomInstance> {
    if shape.max_x < 1 || shape.max_y < 1 {
        return Err(input("spaces need at least one point"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kind = match rng.random_range(0..3) {
        0 => MapKind::Quotient,
        1 => MapKind::Identity,
        _ => MapKind::Scale,
    };
    let n_max = match kind {
        MapKind::Quotient => shape.max_x,
        _ => shape.max_x.min(shape.max_y),
    };
    let n = rng.random_range(n_max.min(2)..=n_max);
    let coords = capped_points(&mut rng, n, shape.ecc_max)?;
    let x = CausalSet::from_coords(coords.iter().enumerate().map(|(i, c)| (format!("x{i}"), c.clone())))?;
    let (y, map) = match kind {
        MapKind::Identity => (x.clone(), CausalMap::identity(&x)),
        MapKind::Scale => {
            let lambda = rng.random_range(0.5..3.0);
            AnalyticRule::Scale(lambda).induce(&x)?
        }
        MapKind::Quotient => {
            let m = rng.random_range(1..=shape.max_y);
            let step = rng.random_range(0.2..1.0);
            let y = CausalSet::from_coords((0..m).map(|k| (format!("y{k}"), vec![k as f64 * step, 0.0])))?;
            let table = coords
                .iter()
                .map(|c| ((c[0] * m as f64).floor() as usize).min(m - 1))
                .collect();
            let u = CausalMap::new("time_bucket", table, &x, &y)?;
            (y, u)
        }
    };
    let s = rng.random_range(0..=2) as f64;
    let t = rng.random_range(0..=s as u32) as f64;
    let delta = rng.random_range(0.2..1.5);
    let delta0 = delta + rng.random_range(0.0..0.5);
    let mut e: Vec<usize> = (0..n).filter(|_| rng.random_bool(0.6)).collect();
    if e.is_empty() {
        e.push(rng.random_range(0..n));
    }
    Ok(RandomInstance {
        seed,
        kind,
        x,
        y,
        map,
        e,
        s,
        t,
        delta,
        delta0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteRow {
    pub seed: u64,
    pub kind: MapKind,
    pub n_x: usize,
    pub n_y: usize,
    pub s: f64,
    pub t: f64,
    pub delta: f64,
    pub delta0: f64,
    pub passed: bool,
    /// Slacks of `Phi <= C V`, `integral <= Phi` and `integral <= C V`.
    #[serde(with = "crate::ext_real::vec")]
    pub slacks: Vec<f64>,
    pub error: Option<String>,
    #[serde(skip)]
    pub report: Option<ChainReport>,
}

pub fn run_random_instance(seed: u64, shape: &RandomShape, opts: &ChainOptions) -> SuiteRow {
    let inst = match random_coarea_instance(seed, shape) {
        Ok(i) => i,
        Err(err) => {
            return SuiteRow {
                seed,
                kind: MapKind::Identity,
                n_x: 0,
                n_y: 0,
                s: 0.0,
                t: 0.0,
                delta: 0.0,
                delta0: 0.0,
                passed: false,
                slacks: Vec::new(),
                error: Some(err.to_string()),
                report: None,
            }
        }
    };
    let res = evaluate_coarea_chain(
        &inst.x, &inst.y, &inst.map, &inst.e, inst.s, inst.t, inst.delta, inst.delta0, opts,
    );
    let (passed, slacks, error, report) = match res {
        Ok(r) => (
            r.passed,
            vec![r.phi_bound.slack, r.integral_bound.slack, r.coarea.slack],
            None,
            Some(r),
        ),
        Err(err) => (false, Vec::new(), Some(err.to_string()), None),
    };
    SuiteRow {
        seed,
        kind: inst.kind,
        n_x: inst.x.len(),
        n_y: inst.y.len(),
        s: inst.s,
        t: inst.t,
        delta: inst.delta,
        delta0: inst.delta0,
        passed,
        slacks,
        error,
        report,
    }
}

/// Runs the seeds in parallel; rows come back in seed order.
pub fn run_random_suite(seeds: &[u64], shape: &RandomShape, opts: &ChainOptions) -> Vec<SuiteRow> {
    seeds.par_iter().map(|&s| run_random_instance(s, shape, opts)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VolumeExperiment {
    pub tau: f64,
    /// `omega_2 tau^2`.
    pub expected: f64,
    pub tiles_per_side: Vec<usize>,
    pub estimate: MeasureEstimate,
}

/// Null-tiling cover values of an `R^{1,1}` diamond along a decreasing
/// schedule, next to `omega_2 tau^2`.
pub fn run_minkowski_volume_experiment(d: &MinkowskiDiamond, schedule: &[f64]) -> Result<VolumeExperiment> {
    if schedule.is_empty() || schedule.windows(2).any(|w| w[1] >= w[0]) {
        return Err(input("schedule must be nonempty and strictly decreasing"));
    }
    let tau = if d.is_empty() { 0.0 } else { d.tau() };
    let mut values = Vec::with_capacity(schedule.len());
    let mut tiles = Vec::with_capacity(schedule.len());
    for &delta in schedule {
        let sol = null_tiling_at(d, delta)?;
        tiles.push((sol.items.len() as f64).sqrt().round() as usize);
        values.push(sol.cost);
    }
    let estimate = MeasureEstimate::from_values(2.0, schedule.to_vec(), values, 1e-12, Certificate::Structured)?;
    Ok(VolumeExperiment {
        tau,
        expected: omega(2.0)? * tau * tau,
        tiles_per_side: tiles,
        estimate,
    })
}

/// Volume experiment for the rest-frame diamond `J((0, 0), (tau, 0))`.
pub fn volume_of_rest_diamond(tau: f64, schedule: &[f64]) -> Result<VolumeExperiment> {
    let d = MinkowskiDiamond::new(vec![0.0, 0.0], vec![tau, 0.0])?;
    run_minkowski_volume_experiment(&d, schedule)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensitySample {
    pub x: String,
    pub p: String,
    pub q: String,
    pub members: usize,
    pub delta: f64,
    #[serde(with = "crate::ext_real")]
    pub value: f64,
    #[serde(with = "crate::ext_real")]
    pub bound: f64,
    pub violated: bool,
    pub certificate: Certificate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityStatistic {
    pub s: f64,
    #[serde(with = "crate::ext_real")]
    pub epsilon: f64,
    pub sampled_points: usize,
    pub checked: usize,
    pub violations: usize,
    pub fraction: f64,
    /// Checks decided by a greedy cover because the exact solver was over
    /// its limits; these can only overcount violations.
    pub greedy_fallbacks: usize,
    /// Diamonds meeting `E` in a single point; a point carries no
    /// s-volume for `s > 0` and the bound is trivial for `s = 0`.
    pub excluded: usize,
    pub samples: Vec<DensitySample>,
}

/// For sampled `x` in `E` and the `per_point` smallest diamonds `J ∋ x`
/// of the space, tests `V^s_delta(E ∩ J) <= (1 + eps) rho_s(J)` at the
/// smallest `delta` for which `E ∩ J` has any cover.
#[allow(clippy::too_many_arguments)]
pub fn density_diagnostic(
    space: &CausalSet,
    e: &[usize],
    s: f64,
    epsilon: f64,
    samples: usize,
    per_point: usize,
    seed: u64,
    limits: &ExactLimits,
) -> Result<DensityStatistic> {
    if !(epsilon >= 0.0) {
        return Err(input("epsilon must be nonnegative"));
    }
    let n = space.len();
    if e.iter().any(|&i| i >= n) {
        return Err(input("E refers to a point outside the space"));
    }
    let mut in_e = vec![false; n];
    for &i in e {
        in_e[i] = true;
    }
    let mut diamonds = Vec::new();
    for p in 0..n {
        for q in 0..n {
            if p != q && space.le(p, q) {
                diamonds.push(space.diamond_members(p, q));
            }
        }
    }
    diamonds.sort_by(|a, b| {
        a.diam
            .total_cmp(&b.diam)
            .then_with(|| space.id(a.p).cmp(space.id(b.p)))
            .then_with(|| space.id(a.q).cmp(space.id(b.q)))
    });
    // smallest diameter of a nondegenerate diamond through each point
    let mut reach = vec![f64::INFINITY; n];
    for d in diamonds.iter().rev() {
        for &m in &d.members {
            reach[m] = reach[m].min(d.diam);
        }
    }
    let all: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picked: Vec<usize> = sample(&mut rng, e.len(), samples.min(e.len()))
        .into_iter()
        .map(|k| e[k])
        .collect();

    let mut out = Vec::new();
    let mut fallbacks = 0;
    let mut excluded = 0;
    for &x in &picked {
        for j in diamonds.iter().filter(|d| d.contains(x)).take(per_point) {
            let sub: Vec<usize> = j.members.iter().copied().filter(|&m| in_e[m]).collect();
            if sub.len() < 2 {
                excluded += 1;
                continue;
            }
            let delta = sub.iter().map(|&m| reach[m]).fold(0.0, f64::max);
            let bound = (1.0 + epsilon) * rho(s, j.tau)?;
            let cands = candidate_diamonds(space, delta, &all, DiamBound::Closed, false)?;
            let sol = match cover_value_exact_with(space, &sub, &cands, s, limits) {
                Ok(sol) => sol,
                Err(Error::Size { .. }) => {
                    fallbacks += 1;
                    cover_value_greedy(space, &sub, &cands, s)?
                }
                Err(err) => return Err(err),
            };
            let violated = !bound.is_infinite() && sol.cost > bound + DEFAULT_TOLERANCE;
            out.push(DensitySample {
                x: space.id(x).into(),
                p: space.id(j.p).into(),
                q: space.id(j.q).into(),
                members: sub.len(),
                delta,
                value: sol.cost,
                bound,
                violated,
                certificate: sol.certificate,
            });
        }
    }
    let violations = out.iter().filter(|d| d.violated).count();
    Ok(DensityStatistic {
        s,
        epsilon,
        sampled_points: picked.len(),
        checked: out.len(),
        violations,
        fraction: if out.is_empty() { 0.0 } else { violations as f64 / out.len() as f64 },
        greedy_fallbacks: fallbacks,
        excluded,
        samples: out,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpsilonBound {
    pub epsilon: f64,
    /// `M^s_{eps delta}` with the pushed vertices added to the pool.
    #[serde(with = "crate::ext_real")]
    pub m_eps: f64,
    /// `(eps - 1) + V^s_delta`.
    #[serde(with = "crate::ext_real")]
    pub bound: f64,
    /// Cost of the chronological cover built from the optimal causal one.
    #[serde(with = "crate::ext_real")]
    pub constructed: f64,
    pub holds: bool,
    /// Diamonds of the causal cover whose push failed, with the reason.
    pub infeasible: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrongVsCausal {
    pub s: f64,
    pub delta: f64,
    #[serde(with = "crate::ext_real")]
    pub v: f64,
    #[serde(with = "crate::ext_real")]
    pub m: f64,
    pub m_ge_v: bool,
    pub bounds: Vec<EpsilonBound>,
    pub v_cover: CoverSolution,
    pub m_cover: CoverSolution,
}

/// `eps2` with `omega_s ((tau + eps2)^s - tau^s) <= slack`.
fn tau_allowance(s: f64, tau: f64, slack: f64) -> Result<f64> {
    if s == 0.0 {
        return Ok(1.0);
    }
    let w = omega(s)?;
    Ok(((tau.powf(s) + slack / w).powf(1.0 / s) - tau) * (1.0 - 1e-9))
}

/// Compares `M^s_delta` with `V^s_delta` on a coordinate space and checks
/// `M^s_{eps delta} <= (eps - 1) + V^s_delta` by pushing every diamond of
/// an optimal causal cover to a chronological one and adding the pushed
/// vertices to the pool. `pool` is the ambient vertex pool for both sides.
pub fn strong_vs_causal_test(
    space: &CausalSet,
    target: &[usize],
    pool: &[usize],
    delta: f64,
    s: f64,
    eps_list: &[f64],
    limits: &ExactLimits,
) -> Result<StrongVsCausal> {
    if !space.has_coords() {
        return Err(input("the strong-vs-causal test needs coordinates"));
    }
    let v_cover = cover_at_scale(space, target, pool, s, delta, Method::Exact, limits)?;
    let m_cover = strong_measure_value(space, target, delta, pool, s, limits)?;
    let (v, m) = (v_cover.cost, m_cover.cost);
    let mut bounds = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        if !(eps > 1.0) || !eps.is_finite() {
            return Err(input(format!("epsilon must exceed 1, got {eps}")));
        }
        let bound = (eps - 1.0) + v;
        let k = v_cover.items.len().max(1) as f64;
        let mut extra = Vec::new();
        let mut constructed = 0.0;
        let mut infeasible = Vec::new();
        for (i, it) in v_cover.items.iter().enumerate() {
            let (p, q) = match (&it.p.coords, &it.q.coords) {
                (Some(p), Some(q)) => (p.clone(), q.clone()),
                _ => return Err(Error::Internal("cover vertex without coordinates".into())),
            };
            let d = MinkowskiDiamond::new(p, q)?;
            let label = format!("J({}, {})", it.p.id, it.q.id);
            let est = tau_allowance(s, d.tau(), (eps - 1.0) / k)
                .and_then(|e2| chronological_estimation(&d, eps, e2));
            match est {
                Ok(est) => {
                    constructed += rho(s, est.tau)?;
                    extra.push(PointRef::with_coords(format!("~p{i}"), est.p));
                    extra.push(PointRef::with_coords(format!("~q{i}"), est.q));
                }
                Err(err) => {
                    constructed = f64::INFINITY;
                    infeasible.push(format!("{label}: {err}"));
                }
            }
        }
        let ext = space.with_extra_points(extra)?;
        let mut ext_pool = pool.to_vec();
        ext_pool.extend(space.len()..ext.len());
        let m_eps = strong_measure_value(&ext, target, eps * delta, &ext_pool, s, limits)?.cost;
        let holds = bound.is_infinite() || m_eps <= bound + DEFAULT_TOLERANCE;
        bounds.push(EpsilonBound {
            epsilon: eps,
            m_eps,
            bound,
            constructed: if v_cover.items.is_empty() && v.is_finite() { 0.0 } else { constructed },
            holds,
            infeasible,
        });
    }
    Ok(StrongVsCausal {
        s,
        delta,
        v,
        m,
        m_ge_v: m >= v - DEFAULT_TOLERANCE,
        bounds,
        v_cover,
        m_cover,
    })
}
