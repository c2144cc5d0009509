//! Causal enlargements, chronological estimations and the Vitali-type
//! selection of disjoint diamonds in Minkowski space.

use crate::backends::minkowski::{euclidean, MinkowskiDiamond};
use crate::error::{input, Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub const DEFAULT_MARGIN: f64 = 3.0;

/// `J(p~, q~)` obtained by pushing the vertices of `J(p, q)` along the time
/// axis by `margin * diam J(p, q)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Enlargement {
    pub original: MinkowskiDiamond,
    pub enlarged: MinkowskiDiamond,
    pub margin: f64,
    /// `diam J(p~, q~) / diam J(p, q)`.
    pub achieved_c1: f64,
    /// `tau(p~, q~) / tau(p, q)`.
    pub achieved_c2: f64,
}

/// With `margin >= 3` every point within Euclidean distance `2 D` of
/// `J(p, q)` lies in the enlargement: a displacement `w` with `|w| <= 2D`
/// has `|w_t| + |w_x| <= 2 sqrt(2) D < 3D`.
pub fn enlarge_minkowski(d: &MinkowskiDiamond, margin: f64) -> Result<Enlargement> {
    if !(margin >= DEFAULT_MARGIN) {
        return Err(input(format!("margin must be at least 3, got {margin}")));
    }
    if !d.is_timelike() {
        return Err(Error::Unsupported("enlargement of a diamond with tau = 0".into()));
    }
    let big_d = d.diam();
    let mut p = d.p.clone();
    let mut q = d.q.clone();
    p[0] -= margin * big_d;
    q[0] += margin * big_d;
    let enlarged = MinkowskiDiamond::new(p, q)?;
    Ok(Enlargement {
        achieved_c1: enlarged.diam() / big_d,
        achieved_c2: enlarged.tau() / d.tau(),
        original: d.clone(),
        enlarged,
        margin,
    })
}

/// Random diamond of diameter at most `2 D` through a random point of
/// `d`, for containment checks of its enlargement. 1+1 only.
pub fn witness_diamond<R: Rng + ?Sized>(d: &MinkowskiDiamond, rng: &mut R) -> Result<MinkowskiDiamond> {
    let w = d.sample_point(rng)?;
    let r = 2.0 * d.diam() * rng.random::<f64>();
    let beta: f64 = rng.random_range(-1.0..=1.0);
    let scale = r / (1.0 + beta * beta).sqrt();
    let v = [scale, scale * beta];
    let f: f64 = rng.random();
    let a = vec![w[0] - f * v[0], w[1] - f * v[1]];
    let b = vec![w[0] + (1.0 - f) * v[0], w[1] + (1.0 - f) * v[1]];
    MinkowskiDiamond::new(a, b)
}

/// Chronological diamond `I(p~, q~)` with `p~ = p - h e_0`, `q~ = q + h e_0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChronologicalEstimate {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub h: f64,
    pub tau: f64,
    pub diam: f64,
}

/// Largest time push `h` with `diam I(p~, q~) <= eps1 diam J(p, q)` and
/// `tau(p~, q~) <= tau(p, q) + eps2`; `eps2` may be infinite.
pub fn chronological_estimation(d: &MinkowskiDiamond, eps1: f64, eps2: f64) -> Result<ChronologicalEstimate> {
    if !(eps1 > 1.0) || !eps1.is_finite() {
        return Err(input(format!("eps1 must exceed 1, got {eps1}")));
    }
    if !(eps2 > 0.0) {
        return Err(input(format!("eps2 must be positive, got {eps2}")));
    }
    if d.is_empty() {
        return Err(input("cannot estimate an empty diamond"));
    }
    let dt = d.q[0] - d.p[0];
    let dx2: f64 = d.p[1..].iter().zip(&d.q[1..]).map(|(a, b)| (b - a) * (b - a)).sum();
    let big_d = d.diam();
    let tau = d.tau();
    let a = eps1 * eps1 * big_d * big_d - dx2;
    let b = if eps2.is_infinite() {
        f64::INFINITY
    } else {
        (tau + eps2) * (tau + eps2) + dx2
    };
    if !(a > 0.0) {
        return Err(Error::Infeasible("diameter bound leaves no room".into()));
    }
    let mut h = 0.5 * (a.sqrt().min(b.sqrt()) - dt);
    for _ in 0..64 {
        if !(h > 0.0) {
            break;
        }
        let mut p = d.p.clone();
        let mut q = d.q.clone();
        p[0] -= h;
        q[0] += h;
        if p[0] == d.p[0] || q[0] == d.q[0] {
            break;
        }
        let est = MinkowskiDiamond::new(p, q)?;
        let (diam, t) = (euclidean(&est.p, &est.q), est.tau());
        if diam <= eps1 * big_d && t <= tau + eps2 {
            return Ok(ChronologicalEstimate {
                p: est.p,
                q: est.q,
                h,
                tau: t,
                diam,
            });
        }
        h *= 1.0 - 1e-9;
    }
    Err(Error::Infeasible(format!(
        "no admissible push for eps1 = {eps1}, eps2 = {eps2} at floating resolution"
    )))
}

/// Output of [`vitali_select`]. Indices refer to `family`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VitaliCertificate {
    pub family: Vec<MinkowskiDiamond>,
    /// Largest diameter `R` in the family.
    pub r_sup: f64,
    /// Dyadic class `j >= 1` of each member: `R / 2^j < diam <= R / 2^(j-1)`.
    pub classes: Vec<u32>,
    /// Selected members in selection order.
    pub selected: Vec<usize>,
    /// For each member the selected member it is charged to.
    pub assignment: Vec<usize>,
    /// Enlargement of each selected member, aligned with `selected`.
    pub enlargements: Vec<Enlargement>,
}

impl VitaliCertificate {
    pub fn enlargement_of(&self, member: usize) -> Option<&Enlargement> {
        self.selected
            .iter()
            .position(|&s| s == member)
            .map(|k| &self.enlargements[k])
    }
}

fn dyadic_class(diam: f64, r: f64) -> u32 {
    let mut j = 1;
    let mut lower = r / 2.0;
    while diam <= lower && j < 1000 {
        j += 1;
        lower /= 2.0;
    }
    j
}

/// Greedy maximal disjoint selection by dyadic diameter classes. Within a
/// class members are tried by descending diameter, then index, and kept
/// when disjoint from everything selected so far. Requires every member to
/// be timelike, to meet `e`, `e` to lie in the union, and (when given)
/// every diameter to stay below `c_bound`. 1+1 only.
pub fn vitali_select(
    e: &[Vec<f64>],
    kappa: &[MinkowskiDiamond],
    margin: f64,
    c_bound: Option<f64>,
) -> Result<VitaliCertificate> {
    if let Some(k) = kappa.iter().position(|d| d.dimension() != 2) {
        return Err(Error::Unsupported(format!("member {k} is not a diamond of R^(1,1)")));
    }
    if let Some(k) = kappa.iter().position(|d| !d.is_timelike()) {
        return Err(input(format!("clause (1) fails: member {k} has p not << q")));
    }
    if let Some(k) = kappa.iter().position(|d| !e.iter().any(|x| d.contains(x))) {
        return Err(input(format!("member {k} does not meet E")));
    }
    if let Some(k) = e.iter().position(|x| !kappa.iter().any(|d| d.contains(x))) {
        return Err(input(format!("E is not covered: point {k} lies in no member")));
    }
    let r_sup = kappa.iter().map(|d| d.diam()).fold(0.0, f64::max);
    if let Some(c) = c_bound {
        if !(r_sup < c) {
            return Err(input(format!("sup diam {r_sup} is not below the bound {c}")));
        }
    }
    let classes: Vec<u32> = kappa.iter().map(|d| dyadic_class(d.diam(), r_sup)).collect();
    let mut order: Vec<usize> = (0..kappa.len()).collect();
    order.sort_by(|&a, &b| {
        classes[a]
            .cmp(&classes[b])
            .then(kappa[b].diam().total_cmp(&kappa[a].diam()))
            .then(a.cmp(&b))
    });
    let mut selected: Vec<usize> = Vec::new();
    for &k in &order {
        let mut free = true;
        for &s in &selected {
            if kappa[k].intersects(&kappa[s])? {
                free = false;
                break;
            }
        }
        if free {
            selected.push(k);
        }
    }
    let mut assignment = Vec::with_capacity(kappa.len());
    for (k, d) in kappa.iter().enumerate() {
        let mut found = None;
        for &s in &selected {
            if d.intersects(&kappa[s])? && d.diam() <= 2.0 * kappa[s].diam() {
                found = Some(s);
                break;
            }
        }
        assignment.push(found.ok_or_else(|| Error::Internal(format!("member {k} has no admissible selected partner")))?);
    }
    let enlargements = selected
        .iter()
        .map(|&s| enlarge_minkowski(&kappa[s], margin))
        .collect::<Result<Vec<_>>>()?;
    let cert = VitaliCertificate {
        family: kappa.to_vec(),
        r_sup,
        classes,
        selected,
        assignment,
        enlargements,
    };
    if let Some(k) = e
        .iter()
        .position(|x| !cert.enlargements.iter().any(|en| en.enlarged.contains(x)))
    {
        return Err(Error::Internal(format!("point {k} of E escapes every enlargement")));
    }
    Ok(cert)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct VitaliVerification {
    /// Selected pairs meeting each other by the exact test.
    pub overlapping_pairs: usize,
    pub disjointness_samples: usize,
    /// Sampled points of one selected member found in another.
    pub disjointness_failures: usize,
    /// Points of `E` outside every enlargement.
    pub coverage_failures: usize,
    /// Members whose partner misses them or is too small.
    pub assignment_failures: usize,
    pub containment_samples: usize,
    /// Sampled points of a member outside its partner's enlargement.
    pub containment_failures: usize,
    pub witness_samples: usize,
    /// Witness diamonds escaping the enlargement of the member they meet.
    pub witness_failures: usize,
}

impl VitaliVerification {
    pub fn passed(&self) -> bool {
        self.overlapping_pairs == 0
            && self.disjointness_failures == 0
            && self.coverage_failures == 0
            && self.assignment_failures == 0
            && self.containment_failures == 0
            && self.witness_failures == 0
    }
}

/// Re-checks a certificate independently of the selection: exact pairwise
/// disjointness, `samples` points for sampled disjointness, `samples`
/// points for member-in-enlargement containment and `samples` witness
/// diamonds against the enlargements.
pub fn verify_vitali(cert: &VitaliCertificate, e: &[Vec<f64>], samples: usize, seed: u64) -> Result<VitaliVerification> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fam = &cert.family;
    let sel = &cert.selected;
    let mut out = VitaliVerification::default();
    for (i, &a) in sel.iter().enumerate() {
        for &b in &sel[i + 1..] {
            if fam[a].intersects(&fam[b])? {
                out.overlapping_pairs += 1;
            }
        }
    }
    if !sel.is_empty() {
        for k in 0..samples {
            let a = sel[k % sel.len()];
            let z = fam[a].sample_point(&mut rng)?;
            out.disjointness_samples += 1;
            if sel.iter().any(|&b| b != a && fam[b].contains(&z)) {
                out.disjointness_failures += 1;
            }
        }
    }
    out.coverage_failures = e
        .iter()
        .filter(|x| !cert.enlargements.iter().any(|en| en.enlarged.contains(x)))
        .count();
    for (k, d) in fam.iter().enumerate() {
        let s = cert.assignment[k];
        if !sel.contains(&s) || !d.intersects(&fam[s])? || d.diam() > 2.0 * fam[s].diam() {
            out.assignment_failures += 1;
        }
    }
    if !fam.is_empty() {
        for k in 0..samples {
            let j = k % fam.len();
            let Some(en) = cert.enlargement_of(cert.assignment[j]) else {
                continue;
            };
            let z = fam[j].sample_point(&mut rng)?;
            out.containment_samples += 1;
            if !en.enlarged.contains(&z) {
                out.containment_failures += 1;
            }
        }
    }
    if !cert.enlargements.is_empty() {
        for k in 0..samples {
            let en = &cert.enlargements[k % cert.enlargements.len()];
            let w = witness_diamond(&en.original, &mut rng)?;
            out.witness_samples += 1;
            if !en.enlarged.contains_diamond(&w) {
                out.witness_failures += 1;
            }
        }
    }
    Ok(out)
}

/// Points of `E` outside `(∪ K) ∪ (∪ enlargements of selected ∖ K)`, where
/// `k` lists selected members by family index.
pub fn finite_exclusion_uncovered(cert: &VitaliCertificate, e: &[Vec<f64>], k: &[usize]) -> Vec<usize> {
    (0..e.len())
        .filter(|&i| {
            let x = &e[i];
            let in_k = k.iter().any(|&m| cert.family[m].contains(x));
            let in_rest = cert
                .selected
                .iter()
                .zip(&cert.enlargements)
                .any(|(s, en)| !k.contains(s) && en.enlarged.contains(x));
            !(in_k || in_rest)
        })
        .collect()
}

/// A covering family for the demo: `ceil(n / 2)` points uniform in the
/// unit diamond of `R^{1,1}` and `n` timelike diamonds of eccentricity at
/// most `ecc_max`, each through one of the points, every point used.
pub fn random_family(seed: u64, n: usize, ecc_max: f64) -> Result<(Vec<Vec<f64>>, Vec<MinkowskiDiamond>)> {
    if n == 0 {
        return Err(input("family must be nonempty"));
    }
    if !(ecc_max > 1.0) {
        return Err(input("eccentricity cap must exceed 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unit = MinkowskiDiamond::new(vec![0.0, 0.0], vec![1.0, 0.0])?;
    let m = n.div_ceil(2);
    let e: Vec<Vec<f64>> = (0..m).map(|_| unit.sample_point(&mut rng)).collect::<Result<_>>()?;
    let beta_max = ((ecc_max * ecc_max - 1.0) / (ecc_max * ecc_max + 1.0)).sqrt();
    let mut fam = Vec::with_capacity(n);
    for i in 0..n {
        let x = &e[i % m];
        let tau = rng.random_range(0.02..0.3);
        let beta = rng.random_range(-beta_max..=beta_max) * (1.0 - 1e-9);
        let dt = tau / (1.0 - beta * beta).sqrt();
        let dx = beta * dt;
        let f: f64 = rng.random_range(0.05..0.95);
        let p = vec![x[0] - f * dt, x[1] - f * dx];
        let q = vec![x[0] + (1.0 - f) * dt, x[1] + (1.0 - f) * dx];
        fam.push(MinkowskiDiamond::new(p, q)?);
    }
    Ok((e, fam))
}
