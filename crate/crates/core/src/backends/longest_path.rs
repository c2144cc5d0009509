//! Time separation of a weighted DAG as the heaviest directed path.
//!
//! Taking maxima over paths makes `tau` superadditive along every chain, so
//! the reverse triangle inequality holds by construction.

use crate::error::{input, Error, Result};
use crate::relation::BitMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Link {
    pub from: usize,
    pub to: usize,
    pub weight: f64,
    /// Chronological links may carry positive weight; causal-only links
    /// model null relations and must have weight zero.
    pub chronological: bool,
}

impl Link {
    pub fn chronological(from: usize, to: usize, weight: f64) -> Self {
        Self {
            from,
            to,
            weight,
            chronological: true,
        }
    }

    pub fn null(from: usize, to: usize) -> Self {
        Self {
            from,
            to,
            weight: 0.0,
            chronological: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LongestPaths {
    /// Row-major `n x n` table.
    pub tau: Vec<f64>,
    /// Reflexive-transitive closure of the link relation.
    pub reach: BitMatrix,
}

impl LongestPaths {
    pub fn tau(&self, i: usize, j: usize) -> f64 {
        self.tau[i * self.reach.len() + j]
    }
}

pub fn longest_path_tau(ids: &[String], links: &[Link]) -> Result<LongestPaths> {
    let n = ids.len();
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for l in links {
        if l.from >= n || l.to >= n {
            return Err(input(format!("link {}->{} out of range", l.from, l.to)));
        }
        if l.weight.is_nan() || l.weight < 0.0 {
            return Err(input(format!(
                "link {}->{} has invalid weight {}",
                ids[l.from], ids[l.to], l.weight
            )));
        }
        if l.weight > 0.0 && !l.chronological {
            return Err(input(format!(
                "link {}->{} is causal-only but carries weight {}",
                ids[l.from], ids[l.to], l.weight
            )));
        }
        adj[l.from].push((l.to, l.weight));
    }

    let order = topological_order(&adj).map_err(|cycle| {
        Error::Cycle(cycle.into_iter().map(|i| ids[i].clone()).collect())
    })?;

    let mut tau = vec![0.0; n * n];
    let mut reach = BitMatrix::identity(n);
    let mut best = vec![f64::NEG_INFINITY; n];
    for (pos, &src) in order.iter().enumerate() {
        best.iter_mut().for_each(|b| *b = f64::NEG_INFINITY);
        best[src] = 0.0;
        for &u in &order[pos..] {
            if best[u] == f64::NEG_INFINITY {
                continue;
            }
            for &(v, w) in &adj[u] {
                let cand = best[u] + w;
                if cand > best[v] {
                    best[v] = cand;
                }
            }
        }
        for v in 0..n {
            if v != src && best[v] > f64::NEG_INFINITY {
                reach.set(src, v, true);
                tau[src * n + v] = best[v];
            }
        }
    }
    Ok(LongestPaths { tau, reach })
}

/// Kahn ordering; on failure returns one directed cycle.
fn topological_order(adj: &[Vec<(usize, f64)>]) -> Result<Vec<usize>, Vec<usize>> {
    let n = adj.len();
    let mut indeg = vec![0usize; n];
    for edges in adj {
        for &(v, _) in edges {
            indeg[v] += 1;
        }
    }
    let mut stack: Vec<usize> = (0..n).rev().filter(|&i| indeg[i] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(u) = stack.pop() {
        order.push(u);
        for &(v, _) in adj[u].iter().rev() {
            indeg[v] -= 1;
            if indeg[v] == 0 {
                stack.push(v);
            }
        }
    }
    if order.len() == n {
        return Ok(order);
    }
    // every leftover vertex has a leftover predecessor; walk backwards
    let leftover: Vec<bool> = indeg.iter().map(|&d| d > 0).collect();
    let mut pred = vec![usize::MAX; n];
    for (u, edges) in adj.iter().enumerate() {
        if !leftover[u] {
            continue;
        }
        for &(v, _) in edges {
            if leftover[v] && pred[v] == usize::MAX {
                pred[v] = u;
            }
        }
    }
    let start = (0..n).find(|&i| leftover[i]).expect("cycle exists");
    let mut seen = vec![usize::MAX; n];
    let mut walk = Vec::new();
    let mut cur = start;
    while seen[cur] == usize::MAX {
        seen[cur] = walk.len();
        walk.push(cur);
        cur = pred[cur];
    }
    let mut cycle: Vec<usize> = walk[seen[cur]..].to_vec();
    cycle.reverse();
    cycle.push(cycle[0]);
    Err(cycle)
}
