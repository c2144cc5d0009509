//! Dense primal simplex with Bland's rule for the covering dual
//!
//! ```text
//! maximize  sum_x f_x y_x   subject to  sum_{x in S_i} y_x <= c_i,  y >= 0
//! ```
//!
//! with `c >= 0`, so the slack basis is feasible. At optimality the
//! objective-row entries of the slack columns are an optimal solution `a`
//! of the covering primal `min c.a, sum_{i: x in S_i} a_i >= f_x, a >= 0`.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use std::ops::{Add, Div, Mul, Sub};

/// Arithmetic needed by the tableau.
pub trait LpScalar:
    Clone + PartialOrd + Zero + One + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self>
{
    fn from_f64(v: f64) -> Option<Self>;
    fn to_f64(&self) -> f64;
    fn is_pos(&self) -> bool;
    fn is_neg(&self) -> bool;
}

const F64_EPS: f64 = 1e-12;

impl LpScalar for f64 {
    fn from_f64(v: f64) -> Option<Self> {
        v.is_finite().then_some(v)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn is_pos(&self) -> bool {
        *self > F64_EPS
    }

    fn is_neg(&self) -> bool {
        *self < -F64_EPS
    }
}

impl LpScalar for BigRational {
    fn from_f64(v: f64) -> Option<Self> {
        BigRational::from_float(v)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or_else(|| {
            if self.numer() > &BigInt::zero() {
                f64::INFINITY
            } else {
                f64::NEG_INFINITY
            }
        })
    }

    fn is_pos(&self) -> bool {
        self > &BigRational::zero()
    }

    fn is_neg(&self) -> bool {
        self < &BigRational::zero()
    }
}

#[derive(Debug, Clone)]
pub struct LpSolution<T> {
    pub value: T,
    /// Dual point weights.
    pub y: Vec<T>,
    /// Primal set weights.
    pub a: Vec<T>,
    pub pivots: usize,
}

/// Solves the covering pair for `f` over points `0..f.len()` and sets
/// `sets[i]` with costs `c[i]`.
pub fn solve_covering<T: LpScalar>(f: &[T], sets: &[Vec<usize>], c: &[T]) -> Result<LpSolution<T>> {
    let n = f.len();
    let m = sets.len();
    assert_eq!(c.len(), m);
    if c.iter().any(|v| v.is_neg()) {
        return Err(Error::Internal("negative cost in covering program".into()));
    }
    let width = n + m + 1;
    let rhs = n + m;
    let mut rows: Vec<Vec<T>> = Vec::with_capacity(m);
    for (i, s) in sets.iter().enumerate() {
        let mut r = vec![T::zero(); width];
        for &x in s {
            r[x] = T::one();
        }
        r[n + i] = T::one();
        r[rhs] = c[i].clone();
        rows.push(r);
    }
    let mut obj = vec![T::zero(); width];
    for (x, fx) in f.iter().enumerate() {
        obj[x] = T::zero() - fx.clone();
    }
    let mut basis: Vec<usize> = (n..n + m).collect();
    let mut pivots = 0;
    while let Some(enter) = (0..rhs).find(|&j| obj[j].is_neg()) {
        let mut leave: Option<(usize, T)> = None;
        for (r, row) in rows.iter().enumerate() {
            if !row[enter].is_pos() {
                continue;
            }
            let ratio = row[rhs].clone() / row[enter].clone();
            let better = match &leave {
                None => true,
                Some((k, best)) => ratio < *best || (ratio == *best && basis[r] < basis[*k]),
            };
            if better {
                leave = Some((r, ratio));
            }
        }
        let Some((r, _)) = leave else {
            return Err(Error::Internal("covering program is infeasible".into()));
        };
        let piv = rows[r][enter].clone();
        for v in rows[r].iter_mut() {
            *v = v.clone() / piv.clone();
        }
        let prow = rows[r].clone();
        for (k, row) in rows.iter_mut().enumerate() {
            if k == r || row[enter].is_zero() {
                continue;
            }
            let factor = row[enter].clone();
            for (v, p) in row.iter_mut().zip(&prow) {
                *v = v.clone() - factor.clone() * p.clone();
            }
        }
        if !obj[enter].is_zero() {
            let factor = obj[enter].clone();
            for (v, p) in obj.iter_mut().zip(&prow) {
                *v = v.clone() - factor.clone() * p.clone();
            }
        }
        basis[r] = enter;
        pivots += 1;
    }
    let mut y = vec![T::zero(); n];
    for (r, &b) in basis.iter().enumerate() {
        if b < n {
            y[b] = rows[r][rhs].clone();
        }
    }
    let a: Vec<T> = (0..m).map(|i| obj[n + i].clone()).collect();
    Ok(LpSolution {
        value: obj[rhs].clone(),
        y,
        a,
        pivots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: i64) -> BigRational {
        BigRational::from_integer(v.into())
    }

    #[test]
    fn chain_program() {
        // points a, b, c; sets {a,b} {b,c} {a,b,c} with costs 1 1 2
        let sets = vec![vec![0, 1], vec![1, 2], vec![0, 1, 2]];
        let sol = solve_covering(&[q(1), q(1), q(1)], &sets, &[q(1), q(1), q(2)]).unwrap();
        assert_eq!(sol.value, q(2));
        let f = solve_covering(&[1.0, 1.0, 1.0], &sets, &[1.0, 1.0, 2.0]).unwrap();
        assert!((f.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn fractional_optimum() {
        // triangle: every pair costs 1, optimum puts 1/2 on each pair
        let sets = vec![vec![0, 1], vec![1, 2], vec![0, 2]];
        let sol = solve_covering(&[q(1), q(1), q(1)], &sets, &[q(1), q(1), q(1)]).unwrap();
        assert_eq!(sol.value, BigRational::new(3.into(), 2.into()));
        for ai in &sol.a {
            assert_eq!(*ai, BigRational::new(1.into(), 2.into()));
        }
    }

    #[test]
    fn primal_is_feasible_and_tight() {
        let sets = vec![vec![0], vec![0, 1], vec![1, 2], vec![2]];
        let f = [q(2), q(1), q(3)];
        let c = [q(1), q(3), q(2), q(1)];
        let sol = solve_covering(&f, &sets, &c).unwrap();
        let primal: BigRational = sol.a.iter().zip(&c).map(|(a, c)| a.clone() * c.clone()).sum();
        assert_eq!(primal, sol.value);
        for (x, fx) in f.iter().enumerate() {
            let lhs: BigRational = sets
                .iter()
                .zip(&sol.a)
                .filter(|(s, _)| s.contains(&x))
                .map(|(_, a)| a.clone())
                .sum();
            assert!(lhs >= *fx);
        }
        assert_eq!(sol.value, q(6));
    }
}
