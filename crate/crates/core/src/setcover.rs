//! Weighted set cover over at most 64 target points.
//!
//! Sets are bitmasks over target indices. The exact solver is a depth-first
//! branch-and-bound that branches on the uncovered point with the fewest
//! covering sets and prunes with the admissible per-point cost-share bound
//! `sum_x min_{S ∋ x} cost(S) / |S ∩ uncovered|`.

use crate::error::{Error, Result};
use std::collections::HashMap;

/// Size limits for the exact solvers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactLimits {
    pub max_targets: usize,
    pub max_candidates: usize,
}

impl Default for ExactLimits {
    fn default() -> Self {
        Self {
            max_targets: 20,
            max_candidates: 200,
        }
    }
}

impl ExactLimits {
    pub(crate) fn check(&self, targets: usize, candidates: usize) -> Result<()> {
        if targets > self.max_targets.min(64) {
            return Err(Error::Size {
                what: "target points",
                actual: targets,
                limit: self.max_targets.min(64),
            });
        }
        if candidates > self.max_candidates {
            return Err(Error::Size {
                what: "candidate diamonds",
                actual: candidates,
                limit: self.max_candidates,
            });
        }
        Ok(())
    }
}

/// An optimal (or greedy) selection: total cost and chosen set indices in
/// increasing order.
#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub cost: f64,
    pub chosen: Vec<usize>,
}

fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn total(costs: &[f64], chosen: &[usize]) -> f64 {
    chosen.iter().map(|&i| costs[i]).sum()
}

/// Minimum-cost cover of `0..n` by `masks` with nonnegative `costs`.
/// Sets of infinite cost are never used. `None` when no finite cover exists.
pub fn exact_cover(n: usize, masks: &[u64], costs: &[f64]) -> Option<Selection> {
    assert!(n <= 64 && masks.len() == costs.len());
    let full = full_mask(n);
    let usable: Vec<usize> = (0..masks.len())
        .filter(|&i| costs[i].is_finite() && masks[i] & full != 0)
        .collect();

    // free sets are taken up front
    let mut chosen = Vec::new();
    let mut uncovered = full;
    for &i in &usable {
        if costs[i] == 0.0 && masks[i] & uncovered != 0 {
            uncovered &= !masks[i];
            chosen.push(i);
        }
    }
    let paid: Vec<usize> = usable.iter().copied().filter(|&i| costs[i] > 0.0).collect();

    let mut covering: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &i in &paid {
        for (x, list) in covering.iter_mut().enumerate() {
            if masks[i] >> x & 1 == 1 {
                list.push(i);
            }
        }
    }
    for list in &mut covering {
        list.sort_by(|&a, &b| costs[a].total_cmp(&costs[b]).then(a.cmp(&b)));
    }
    if (0..n).any(|x| uncovered >> x & 1 == 1 && covering[x].is_empty()) {
        return None;
    }

    let mut search = Search {
        masks,
        costs,
        covering: &covering,
        best_cost: f64::INFINITY,
        best: Vec::new(),
        seen: HashMap::new(),
        stack: Vec::new(),
    };
    if let Some(g) = greedy_cover(n, masks, costs, &(0..masks.len()).collect::<Vec<_>>()) {
        let part: Vec<usize> = g.chosen.into_iter().filter(|&i| costs[i] > 0.0).collect();
        search.best_cost = total(costs, &part);
        search.best = part;
    }
    search.run(uncovered, 0.0);
    if !search.best_cost.is_finite() && uncovered != 0 {
        return None;
    }
    chosen.extend(search.best);
    chosen.sort_unstable();
    chosen.dedup();
    Some(Selection {
        cost: total(costs, &chosen),
        chosen,
    })
}

struct Search<'a> {
    masks: &'a [u64],
    costs: &'a [f64],
    covering: &'a [Vec<usize>],
    best_cost: f64,
    best: Vec<usize>,
    seen: HashMap<u64, f64>,
    stack: Vec<usize>,
}

impl Search<'_> {
    fn lower_bound(&self, uncovered: u64) -> f64 {
        let mut lb = 0.0;
        let mut rest = uncovered;
        while rest != 0 {
            let x = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let share = self.covering[x]
                .iter()
                .map(|&i| self.costs[i] / (self.masks[i] & uncovered).count_ones() as f64)
                .fold(f64::INFINITY, f64::min);
            lb += share;
        }
        lb
    }

    fn run(&mut self, uncovered: u64, g: f64) {
        if uncovered == 0 {
            if g < self.best_cost {
                self.best_cost = g;
                self.best = self.stack.clone();
            }
            return;
        }
        if let Some(&prev) = self.seen.get(&uncovered) {
            if g >= prev {
                return;
            }
        }
        self.seen.insert(uncovered, g);
        let slack = 1e-12 * self.best_cost.abs();
        if g + self.lower_bound(uncovered) > self.best_cost + slack {
            return;
        }
        let mut rest = uncovered;
        let mut pivot = usize::MAX;
        let mut fewest = usize::MAX;
        while rest != 0 {
            let x = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if self.covering[x].len() < fewest {
                fewest = self.covering[x].len();
                pivot = x;
            }
        }
        for k in 0..self.covering[pivot].len() {
            let i = self.covering[pivot][k];
            self.stack.push(i);
            self.run(uncovered & !self.masks[i], g + self.costs[i]);
            self.stack.pop();
        }
    }
}

/// Greedy cover: repeatedly takes the set with the smallest cost per newly
/// covered point; exact ratio ties go to the smaller `rank`.
pub fn greedy_cover(n: usize, masks: &[u64], costs: &[f64], rank: &[usize]) -> Option<Selection> {
    let full = full_mask(n);
    let mut uncovered = full;
    let mut chosen = Vec::new();
    while uncovered != 0 {
        let mut pick: Option<(f64, usize, usize)> = None;
        for i in 0..masks.len() {
            let new = (masks[i] & uncovered).count_ones();
            if new == 0 || !costs[i].is_finite() {
                continue;
            }
            let ratio = costs[i] / new as f64;
            let better = match pick {
                None => true,
                Some((r, k, _)) => ratio < r || (ratio == r && rank[i] < k),
            };
            if better {
                pick = Some((ratio, rank[i], i));
            }
        }
        let (_, _, i) = pick?;
        uncovered &= !masks[i];
        chosen.push(i);
    }
    Some(Selection {
        cost: total(costs, &chosen),
        chosen,
    })
}
