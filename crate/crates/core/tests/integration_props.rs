mod common;

use common::{diamond_costs, lp_by_vertices, members, random_set, rng};
use lcoarea::backends::CausalSet;
use lcoarea::harness::{run_random_suite, RandomShape};
use lcoarea::integration::{weighted_causal_integral_delta, weighted_integral_over, ChainOptions, IntegralMethod};
use lcoarea::lp::solve_covering;
use lcoarea::measure::{candidate_diamonds, cover_value_exact, DiamBound};
use num_rational::BigRational;
use proptest::prelude::*;
use rand::Rng;

fn all(n: usize) -> Vec<usize> {
    (0..n).collect()
}

fn random_f(r: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| if r.random_bool(0.2) { 0.0 } else { r.random_range(0.0..3.0) })
        .collect()
}

fn both(set: &CausalSet, f: &[f64], s: f64, delta: f64) -> (f64, f64) {
    let e = weighted_causal_integral_delta(set, f, s, delta, &all(set.len()), IntegralMethod::Exact).unwrap();
    let l = weighted_causal_integral_delta(set, f, s, delta, &all(set.len()), IntegralMethod::Lp).unwrap();
    (e.value, l.value)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lp_solvers_match_vertex_enumeration(seed in 0u64..10_000, n in 1usize..=5, m in 1usize..=7) {
        let mut r = rng(seed);
        let mut sets: Vec<Vec<usize>> = (0..m)
            .map(|_| (0..n).filter(|_| r.random_bool(0.5)).collect())
            .collect();
        sets.push(all(n));
        let c: Vec<f64> = (0..=m).map(|_| r.random_range(0.0..4.0)).collect();
        let f = random_f(&mut r, n);
        let want = lp_by_vertices(&f, &sets, &c);
        let got = solve_covering(&f, &sets, &c).unwrap().value;
        prop_assert!((got - want).abs() <= 1e-9, "{} vs {}", got, want);
        let q = |v: &f64| BigRational::from_float(*v).unwrap();
        let fq: Vec<BigRational> = f.iter().map(q).collect();
        let cq: Vec<BigRational> = c.iter().map(q).collect();
        let exact = solve_covering(&fq, &sets, &cq).unwrap();
        prop_assert!((lcoarea::lp::LpScalar::to_f64(&exact.value) - want).abs() <= 1e-9);
    }

    #[test]
    fn weighted_integral_matches_vertex_enumeration(seed in 0u64..10_000, n in 1usize..=5, s in 1u32..=2) {
        let mut r = rng(seed);
        let set = random_set(&mut r, n);
        let f = random_f(&mut r, n);
        let s = s as f64;
        let cands = candidate_diamonds(&set, 2.0, &all(n), DiamBound::Closed, false).unwrap();
        let (e, l) = both(&set, &f, s, 2.0);
        let want = lp_by_vertices(&f, &members(&cands), &diamond_costs(s, &cands));
        if want.is_infinite() {
            prop_assert!(e.is_infinite() && l.is_infinite());
        } else {
            prop_assert!((e - want).abs() <= 1e-9 && (l - want).abs() <= 1e-9, "{} {} {}", e, l, want);
        }
    }

    #[test]
    fn integral_is_monotone_in_f(seed in 0u64..10_000, n in 1usize..=8, s in 0u32..=2) {
        let mut r = rng(seed);
        let set = random_set(&mut r, n);
        let f = random_f(&mut r, n);
        let g: Vec<f64> = f.iter().map(|v| v + r.random_range(0.0..1.0)).collect();
        let (a, _) = both(&set, &f, s as f64, 1.0);
        let (b, _) = both(&set, &g, s as f64, 1.0);
        prop_assert!(a <= b + 1e-9);
    }

    #[test]
    fn zero_integral_iff_support_is_null(seed in 0u64..10_000, n in 1usize..=8, s in 1u32..=2) {
        let mut r = rng(seed);
        let set = random_set(&mut r, n);
        let f = random_f(&mut r, n);
        let cands = candidate_diamonds(&set, 1.0, &all(n), DiamBound::Closed, false).unwrap();
        let (v, _) = both(&set, &f, s as f64, 1.0);
        let null = (0..n)
            .filter(|&x| f[x] > 0.0)
            .all(|x| cands.iter().any(|d| d.tau == 0.0 && d.contains(x)));
        prop_assert_eq!(v == 0.0, null, "value {}", v);
    }

    #[test]
    fn monotone_sequence_converges(seed in 0u64..10_000, n in 1usize..=7, s in 0u32..=2) {
        let mut r = rng(seed);
        let set = random_set(&mut r, n);
        let f = random_f(&mut r, n);
        let (limit, _) = both(&set, &f, s as f64, 1.2);
        let mut prev = 0.0;
        for k in 1..=12 {
            let scale = 1.0 - 0.5f64.powi(k);
            let fk: Vec<f64> = f.iter().map(|v| v * scale).collect();
            let (vk, _) = both(&set, &fk, s as f64, 1.2);
            prop_assert!(vk >= prev - 1e-9);
            prop_assert!(vk <= limit + 1e-9);
            if limit.is_finite() {
                prop_assert!(limit - vk <= 0.5f64.powi(k) * limit + 1e-9);
            }
            prev = vk;
        }
    }

    #[test]
    fn step_function_bounded_by_weighted_measures(seed in 0u64..10_000, n in 1usize..=8, s in 0u32..=2) {
        let mut r = rng(seed);
        let set = random_set(&mut r, n);
        let s = s as f64;
        let cands = candidate_diamonds(&set, 1.0, &all(n), DiamBound::Closed, false).unwrap();
        let k = r.random_range(1..=3);
        let mut f = vec![0.0; n];
        let mut bound = 0.0;
        for _ in 0..k {
            let a: Vec<usize> = (0..n).filter(|_| r.random_bool(0.5)).collect();
            let c = r.random_range(0.1..2.0);
            for &x in &a {
                f[x] += c;
            }
            bound += c * cover_value_exact(&set, &a, &cands, s).unwrap().cost;
        }
        let w = weighted_integral_over(&set, &f, s, &cands, IntegralMethod::Exact).unwrap();
        prop_assert!(w.value <= bound + 1e-9, "{} > {}", w.value, bound);
    }
}

#[test]
fn random_coarea_chains_hold() {
    let seeds: Vec<u64> = (1000..1030).collect();
    let rows = run_random_suite(&seeds, &RandomShape::default(), &ChainOptions::default());
    for r in &rows {
        assert!(r.passed, "{r:?}");
        assert!(r.slacks.iter().all(|&s| s >= -1e-9));
    }
}
