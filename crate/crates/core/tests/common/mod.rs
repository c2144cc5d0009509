#![allow(dead_code)]

use lcoarea::backends::{CausalSet, Diamond};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` uniform points of the square `[0, 1]^2` as a coordinate set of
/// `R^{1,1}`.
pub fn random_set(r: &mut ChaCha8Rng, n: usize) -> CausalSet {
    CausalSet::from_coords((0..n).map(|i| (format!("p{i}"), vec![r.random::<f64>(), r.random::<f64>()]))).unwrap()
}

pub fn scaled(set: &CausalSet, lambda: f64) -> CausalSet {
    CausalSet::from_coords((0..set.len()).map(|i| {
        let c: Vec<f64> = set.coords(i).unwrap().iter().map(|v| v * lambda).collect();
        (set.id(i).to_string(), c)
    }))
    .unwrap()
}

pub fn omega(n: f64) -> f64 {
    // closed forms for the integer dimensions the tests use
    match n as u32 {
        0 => 1.0,
        1 => 1.0,
        2 => 0.5,
        3 => std::f64::consts::PI / 12.0,
        _ => unreachable!(),
    }
}

pub fn rho(s: f64, tau: f64) -> f64 {
    if s == 0.0 {
        1.0
    } else {
        omega(s) * tau.powf(s)
    }
}

/// Minimum over all subsets of `sets` covering `target`, by enumeration.
pub fn brute_cover(target: &[usize], sets: &[Vec<usize>], costs: &[f64]) -> f64 {
    assert!(sets.len() <= 20);
    let mut best = f64::INFINITY;
    for mask in 0u32..(1 << sets.len()) {
        let chosen: Vec<usize> = (0..sets.len()).filter(|&i| mask >> i & 1 == 1).collect();
        if target.iter().all(|x| chosen.iter().any(|&i| sets[i].contains(x))) {
            let c: f64 = chosen.iter().map(|&i| costs[i]).sum();
            best = best.min(c);
        }
    }
    best
}

pub fn diamond_costs(s: f64, ds: &[Diamond]) -> Vec<f64> {
    ds.iter().map(|d| rho(s, d.tau)).collect()
}

pub fn members(ds: &[Diamond]) -> Vec<Vec<usize>> {
    ds.iter().map(|d| d.members.clone()).collect()
}

fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in 0..n {
            if r != col {
                let k = a[r][col] / a[col][col];
                let pivot_row = a[col].clone();
                for (x, p) in a[r].iter_mut().zip(&pivot_row).skip(col) {
                    *x -= k * p;
                }
                b[r] -= k * b[col];
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

/// Optimum of `max f.y` subject to `sum_{x in S_i} y_x <= c_i`, `y >= 0`
/// by enumerating every vertex: each choice of `n` tight constraints among
/// the `m + n` is solved and kept when feasible. Equals the covering
/// optimum by duality. Unbounded (some `f_x > 0` in no set) gives `inf`.
pub fn lp_by_vertices(f: &[f64], sets: &[Vec<usize>], c: &[f64]) -> f64 {
    let n = f.len();
    if (0..n).any(|x| f[x] > 0.0 && !sets.iter().any(|s| s.contains(&x))) {
        return f64::INFINITY;
    }
    let mut rows: Vec<(Vec<f64>, f64)> = sets
        .iter()
        .zip(c)
        .map(|(s, &ci)| ((0..n).map(|x| if s.contains(&x) { 1.0 } else { 0.0 }).collect(), ci))
        .collect();
    for x in 0..n {
        let mut e = vec![0.0; n];
        e[x] = -1.0;
        rows.push((e, 0.0));
    }
    let total = rows.len();
    let mut best = f64::NEG_INFINITY;
    let mut pick = Vec::with_capacity(n);
    fn rec(
        start: usize,
        total: usize,
        n: usize,
        pick: &mut Vec<usize>,
        rows: &[(Vec<f64>, f64)],
        f: &[f64],
        best: &mut f64,
    ) {
        if pick.len() == n {
            let a = pick.iter().map(|&i| rows[i].0.clone()).collect();
            let b = pick.iter().map(|&i| rows[i].1).collect();
            if let Some(y) = solve(a, b) {
                let ok = rows
                    .iter()
                    .all(|(r, rhs)| r.iter().zip(&y).map(|(u, v)| u * v).sum::<f64>() <= rhs + 1e-9);
                if ok {
                    *best = best.max(f.iter().zip(&y).map(|(u, v)| u * v).sum());
                }
            }
            return;
        }
        for i in start..total {
            pick.push(i);
            rec(i + 1, total, n, pick, rows, f, best);
            pick.pop();
        }
    }
    if n == 0 {
        return 0.0;
    }
    rec(0, total, n, &mut pick, &rows, f, &mut best);
    best
}
