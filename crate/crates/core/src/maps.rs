//! Causal maps between spaces: timelike Lipschitz constants, controlling
//! moduli and causality preservation.

use crate::backends::causal_set::CausalSet;
use crate::error::{input, Result};
use crate::space::PointRef;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::str::FromStr;

/// A map between finite spaces given by its table `x -> U(x)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CausalMap {
    pub name: String,
    pub table: Vec<usize>,
}

impl CausalMap {
    pub fn new(name: impl Into<String>, table: Vec<usize>, x: &CausalSet, y: &CausalSet) -> Result<Self> {
        if table.len() != x.len() {
            return Err(input(format!("map table has {} entries for {} points", table.len(), x.len())));
        }
        if let Some(&bad) = table.iter().find(|&&v| v >= y.len()) {
            return Err(input(format!("map image {bad} outside the target space")));
        }
        Ok(Self {
            name: name.into(),
            table,
        })
    }

    pub fn identity(x: &CausalSet) -> Self {
        Self {
            name: "identity".into(),
            table: (0..x.len()).collect(),
        }
    }

    /// Builds the table from an id-to-id map.
    pub fn from_ids(name: impl Into<String>, ids: &BTreeMap<String, String>, x: &CausalSet, y: &CausalSet) -> Result<Self> {
        let mut table = Vec::with_capacity(x.len());
        for i in 0..x.len() {
            let target = ids
                .get(x.id(i))
                .ok_or_else(|| input(format!("map is undefined at `{}`", x.id(i))))?;
            table.push(y.index_of(target)?);
        }
        Self::new(name, table, x, y)
    }

    pub fn apply(&self, x: usize) -> usize {
        self.table[x]
    }

    /// `self` after `first`.
    pub fn after(&self, first: &CausalMap) -> CausalMap {
        CausalMap {
            name: format!("{}∘{}", self.name, first.name),
            table: first.table.iter().map(|&v| self.table[v]).collect(),
        }
    }

    /// The preimage `U^{-1}(y)`.
    pub fn fiber(&self, y: usize) -> Vec<usize> {
        (0..self.table.len()).filter(|&x| self.table[x] == y).collect()
    }
}

/// Coordinate rules acting on Minkowski points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AnalyticRule {
    /// `x -> lambda x`.
    Scale(f64),
    /// `R^{1,n} -> R^{1,n+1}` appending a zero spatial coordinate.
    PadZero,
    /// `(t, x) -> t` onto the line `R^{1,0}`.
    DropTimeToLine,
}

impl FromStr for AnalyticRule {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pad_zero" => Ok(Self::PadZero),
            "drop_time_to_line" => Ok(Self::DropTimeToLine),
            _ => {
                let lambda: f64 = s
                    .strip_prefix("scale:")
                    .and_then(|v| v.parse().ok())
                    .ok_or_else(|| input(format!("unknown map rule `{s}`")))?;
                if !(lambda > 0.0) || !lambda.is_finite() {
                    return Err(input("scale factor must be positive and finite"));
                }
                Ok(Self::Scale(lambda))
            }
        }
    }
}

impl AnalyticRule {
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        match *self {
            Self::Scale(l) => x.iter().map(|v| l * v).collect(),
            Self::PadZero => {
                let mut v = x.to_vec();
                v.push(0.0);
                v
            }
            Self::DropTimeToLine => vec![x[0]],
        }
    }

    /// Closed-form verdict.
    pub fn tlip(&self) -> TlipVerdict {
        match *self {
            Self::Scale(l) => TlipVerdict::Lipschitz { lambda: l, witness: None },
            Self::PadZero => TlipVerdict::Lipschitz {
                lambda: 1.0,
                witness: None,
            },
            Self::DropTimeToLine => TlipVerdict::NotTimelikeLipschitz {
                witness: ("(0, 0)".into(), "(1, 1)".into()),
            },
        }
    }

    /// Image space of a coordinate set together with the induced table.
    /// Points with identical images are merged.
    pub fn induce(&self, x: &CausalSet) -> Result<(CausalSet, CausalMap)> {
        let mut points: Vec<PointRef> = Vec::new();
        let mut seen: HashMap<Vec<u64>, usize> = HashMap::new();
        let mut table = Vec::with_capacity(x.len());
        for i in 0..x.len() {
            let c = x
                .coords(i)
                .ok_or_else(|| input("analytic maps need coordinates"))?;
            let img = self.apply(c);
            let key: Vec<u64> = img.iter().map(|v| (v + 0.0).to_bits()).collect();
            let k = *seen.entry(key).or_insert_with(|| {
                points.push(PointRef::with_coords(format!("U({})", x.id(i)), img));
                points.len() - 1
            });
            table.push(k);
        }
        let y = CausalSet::from_minkowski(points)?;
        let name = match self {
            Self::Scale(l) => format!("scale:{l}"),
            Self::PadZero => "pad_zero".into(),
            Self::DropTimeToLine => "drop_time_to_line".into(),
        };
        Ok((y, CausalMap { name, table }))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum TlipVerdict {
    /// `tau_Y(U p, U q) <= lambda tau_X(p, q)` on every causal pair; the
    /// witness attains the supremum.
    Lipschitz {
        lambda: f64,
        witness: Option<(String, String)>,
    },
    /// A pair `p <= q` with `tau_X = 0` but `tau_Y > 0`, or with
    /// `tau_X` finite and `tau_Y` infinite.
    NotTimelikeLipschitz { witness: (String, String) },
}

impl TlipVerdict {
    pub fn lambda(&self) -> Option<f64> {
        match self {
            Self::Lipschitz { lambda, .. } => Some(*lambda),
            Self::NotTimelikeLipschitz { .. } => None,
        }
    }
}

/// Exact supremum of `tau_Y(U p, U q) / tau_X(p, q)` over causal pairs of
/// a finite `X`.
pub fn tlip_estimate(x: &CausalSet, y: &CausalSet, u: &CausalMap) -> TlipVerdict {
    let n = x.len();
    let mut best = 0.0;
    let mut arg = None;
    for p in 0..n {
        for q in 0..n {
            if p == q || !x.le(p, q) {
                continue;
            }
            let tx = x.tau(p, q);
            let ty = y.tau(u.apply(p), u.apply(q));
            let pair = || (x.id(p).to_string(), x.id(q).to_string());
            if tx == 0.0 {
                if ty > 0.0 {
                    return TlipVerdict::NotTimelikeLipschitz { witness: pair() };
                }
                continue;
            }
            if tx.is_infinite() {
                continue;
            }
            if ty.is_infinite() {
                return TlipVerdict::NotTimelikeLipschitz { witness: pair() };
            }
            let r = ty / tx;
            if r > best {
                best = r;
                arg = Some(pair());
            }
        }
    }
    TlipVerdict::Lipschitz {
        lambda: best,
        witness: arg,
    }
}

/// `eta(delta) = max diam_Y J(U p, U q)` over pairs with
/// `diam_X J(p, q) < delta`.
pub fn controlling_modulus(x: &CausalSet, y: &CausalSet, u: &CausalMap, delta_grid: &[f64]) -> Vec<(f64, f64)> {
    let pairs = image_diameters(x, y, u);
    delta_grid
        .iter()
        .map(|&d| {
            let eta = pairs
                .iter()
                .filter(|(dx, _)| *dx < d)
                .map(|(_, dy)| *dy)
                .fold(0.0, f64::max);
            (d, eta)
        })
        .collect()
}

/// `(diam_X J(p, q), diam_Y J(U p, U q))` for all `p < q`.
pub(crate) fn image_diameters(x: &CausalSet, y: &CausalSet, u: &CausalMap) -> Vec<(f64, f64)> {
    (0..x.len())
        .into_par_iter()
        .flat_map_iter(|p| {
            (0..x.len())
                .filter(move |&q| q != p && x.le(p, q))
                .map(move |q| {
                    let dx = x.diamond_members(p, q).diam;
                    let dy = y.diamond_members(u.apply(p), u.apply(q)).diam;
                    (dx, dy)
                })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CausalityVerdict {
    pub preserving: bool,
    /// `p <= q` with `U p` not `<= U q`.
    pub order_witness: Option<(String, String)>,
    /// `(p, q, x)` with `x` in `J(p, q)` but `U x` outside `J(U p, U q)`.
    pub inclusion_witness: Option<(String, String, String)>,
}

pub fn check_causality_preserving(x: &CausalSet, y: &CausalSet, u: &CausalMap) -> CausalityVerdict {
    let n = x.len();
    let id = |i: usize| x.id(i).to_string();
    let mut order_witness = None;
    let mut inclusion_witness = None;
    'outer: for p in 0..n {
        for q in 0..n {
            if !x.le(p, q) {
                continue;
            }
            let (up, uq) = (u.apply(p), u.apply(q));
            if order_witness.is_none() && !y.le(up, uq) {
                order_witness = Some((id(p), id(q)));
            }
            if inclusion_witness.is_none() {
                for m in x.diamond_members(p, q).members {
                    let um = u.apply(m);
                    if !(y.le(up, um) && y.le(um, uq)) {
                        inclusion_witness = Some((id(p), id(q), id(m)));
                        break;
                    }
                }
            }
            if order_witness.is_some() && inclusion_witness.is_some() {
                break 'outer;
            }
        }
    }
    CausalityVerdict {
        preserving: order_witness.is_none() && inclusion_witness.is_none(),
        order_witness,
        inclusion_witness,
    }
}

/// Sampled lower estimate of the timelike Lipschitz constant of a rule on
/// random causal pairs in the box `[lo, hi]`.
pub fn tlip_sampled(rule: &AnalyticRule, lo: &[f64], hi: &[f64], samples: usize, seed: u64) -> TlipVerdict {
    use crate::backends::minkowski::{le_unchecked, tau_unchecked};
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<f64> {
        lo.iter().zip(hi).map(|(a, b)| a + (b - a) * rng.random::<f64>()).collect()
    };
    let fmt = |v: &[f64]| format!("{v:?}");
    let mut best = 0.0;
    let mut arg = None;
    for _ in 0..samples {
        let (a, b) = (draw(&mut rng), draw(&mut rng));
        let (p, q) = if a[0] <= b[0] { (a, b) } else { (b, a) };
        if !le_unchecked(&p, &q) {
            continue;
        }
        let tx = tau_unchecked(&p, &q);
        let ty = tau_unchecked(&rule.apply(&p), &rule.apply(&q));
        if tx == 0.0 {
            if ty > 0.0 {
                return TlipVerdict::NotTimelikeLipschitz {
                    witness: (fmt(&p), fmt(&q)),
                };
            }
            continue;
        }
        if ty / tx > best {
            best = ty / tx;
            arg = Some((fmt(&p), fmt(&q)));
        }
    }
    TlipVerdict::Lipschitz {
        lambda: best,
        witness: arg,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> CausalSet {
        CausalSet::from_coords([
            ("g00", vec![0.0, 0.0]),
            ("g01", vec![0.0, 0.5]),
            ("g10", vec![1.0, 0.0]),
            ("g11", vec![1.0, 0.5]),
        ])
        .unwrap()
    }

    fn chain2() -> CausalSet {
        CausalSet::from_coords([("y0", vec![0.0, 0.0]), ("y1", vec![1.0, 0.0])]).unwrap()
    }

    #[test]
    fn scaling_rule() {
        let x = grid();
        let rule: AnalyticRule = "scale:2.5".parse().unwrap();
        let (y, u) = rule.induce(&x).unwrap();
        match tlip_estimate(&x, &y, &u) {
            TlipVerdict::Lipschitz { lambda, .. } => assert!((lambda - 2.5).abs() < 1e-12),
            v => panic!("{v:?}"),
        }
        let eta = controlling_modulus(&x, &y, &u, &[0.6, 2.0]);
        assert_eq!(eta[0].1, 0.0);
        assert!((eta[1].1 - 2.5 * 1.25f64.sqrt()).abs() < 1e-12);
        assert_eq!(rule.tlip().lambda(), Some(2.5));
    }

    #[test]
    fn pad_zero_is_isometric() {
        let x = grid();
        let (y, u) = AnalyticRule::PadZero.induce(&x).unwrap();
        assert_eq!(tlip_estimate(&x, &y, &u).lambda(), Some(1.0));
        assert!(check_causality_preserving(&x, &y, &u).preserving);
        let v = tlip_sampled(&AnalyticRule::PadZero, &[0.0, 0.0], &[1.0, 1.0], 2000, 1);
        assert!((v.lambda().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn time_projection_is_not_timelike_lipschitz() {
        let x = CausalSet::from_coords([("o", vec![0.0, 0.0]), ("n", vec![1.0, 1.0])]).unwrap();
        let (y, u) = AnalyticRule::DropTimeToLine.induce(&x).unwrap();
        assert_eq!(y.tau(0, 1), 1.0);
        match tlip_estimate(&x, &y, &u) {
            TlipVerdict::NotTimelikeLipschitz { witness } => assert_eq!(witness, ("o".into(), "n".into())),
            v => panic!("{v:?}"),
        }
        assert!(AnalyticRule::DropTimeToLine.tlip().lambda().is_none());
    }

    #[test]
    fn grid_quotient() {
        let x = grid();
        let y = chain2();
        let u = CausalMap::new("quotient", vec![0, 0, 1, 1], &x, &y).unwrap();
        assert!(check_causality_preserving(&x, &y, &u).preserving);
        // causal pairs: g00 <= g10, g00 <= g11, g01 <= g11, g01 <= g10
        let eta = controlling_modulus(&x, &y, &u, &[0.9, 1.05, 3.0]);
        assert_eq!(eta[0].1, 0.0);
        assert_eq!(eta[1].1, 1.0);
        assert_eq!(eta[2].1, 1.0);
        let lambda = tlip_estimate(&x, &y, &u).lambda().unwrap();
        assert!((lambda - 1.0 / 0.75f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn reversal_is_detected() {
        let y = chain2();
        let u = CausalMap::new("flip", vec![1, 0], &y, &y).unwrap();
        let v = check_causality_preserving(&y, &y, &u);
        assert!(!v.preserving);
        assert_eq!(v.order_witness, Some(("y0".into(), "y1".into())));
        assert!(check_causality_preserving(&y, &y, &CausalMap::identity(&y)).preserving);
    }

    #[test]
    fn composition_bound() {
        let x = grid();
        let (y, u) = AnalyticRule::Scale(2.0).induce(&x).unwrap();
        let (z, v) = AnalyticRule::Scale(3.0).induce(&y).unwrap();
        let w = v.after(&u);
        let l = tlip_estimate(&x, &z, &w).lambda().unwrap();
        let lu = tlip_estimate(&x, &y, &u).lambda().unwrap();
        let lv = tlip_estimate(&y, &z, &v).lambda().unwrap();
        assert!(l <= lu * lv * (1.0 + 1e-12));
    }

    #[test]
    fn table_validation() {
        let x = grid();
        let y = chain2();
        assert!(CausalMap::new("bad", vec![0, 0, 1], &x, &y).is_err());
        assert!(CausalMap::new("bad", vec![0, 0, 1, 5], &x, &y).is_err());
        let mut ids = BTreeMap::new();
        for (a, b) in [("g00", "y0"), ("g01", "y0"), ("g10", "y1"), ("g11", "y1")] {
            ids.insert(a.to_string(), b.to_string());
        }
        assert_eq!(CausalMap::from_ids("q", &ids, &x, &y).unwrap().table, vec![0, 0, 1, 1]);
        ids.remove("g11");
        assert!(CausalMap::from_ids("q", &ids, &x, &y).is_err());
    }
}
