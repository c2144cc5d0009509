mod common;

use lcoarea::backends::{CausalSet, MinkowskiDiamond};
use lcoarea::covering::{finite_exclusion_uncovered, random_family, verify_vitali, vitali_select, DEFAULT_MARGIN};
use lcoarea::harness::{random_coarea_instance, RandomShape};
use lcoarea::maps::{tlip_estimate, AnalyticRule, CausalMap, TlipVerdict};
use proptest::prelude::*;
use rand::Rng;

/// Diamonds of proper time `tau` centred on `x` in the rest frame.
fn around(x: &[f64], tau: f64) -> MinkowskiDiamond {
    MinkowskiDiamond::new(vec![x[0] - tau / 2.0, x[1]], vec![x[0] + tau / 2.0, x[1]]).unwrap()
}

#[test]
fn finite_exclusion_with_nested_tiny_diamonds() {
    for seed in 0..10 {
        let (e, mut fam) = random_family(seed, 16, 3.0).unwrap();
        for x in &e {
            for tau in [1e-2, 1e-3, 1e-4] {
                fam.push(around(x, tau));
            }
        }
        let cert = vitali_select(&e, &fam, DEFAULT_MARGIN, None).unwrap();
        assert!(verify_vitali(&cert, &e, 2000, seed).unwrap().passed());
        let sel = &cert.selected;
        let mut r = common::rng(seed);
        for _ in 0..64 {
            let k: Vec<usize> = sel.iter().copied().filter(|_| r.random_bool(0.4)).collect();
            for x in finite_exclusion_uncovered(&cert, &e, &k) {
                // allowed only when every member through x meets the excluded part
                let through: Vec<&MinkowskiDiamond> = fam.iter().filter(|d| d.contains(&e[x])).collect();
                assert!(through
                    .iter()
                    .all(|d| k.iter().any(|&m| fam[m].intersects(d).unwrap())));
            }
        }
    }
}

fn composed_lipschitz(x: &CausalSet, rules: (f64, f64)) -> (f64, f64, f64) {
    let (y, u) = AnalyticRule::Scale(rules.0).induce(x).unwrap();
    let (z, v) = AnalyticRule::Scale(rules.1).induce(&y).unwrap();
    let vu: CausalMap = v.after(&u);
    let l = |a: &CausalSet, b: &CausalSet, m: &CausalMap| match tlip_estimate(a, b, m) {
        TlipVerdict::Lipschitz { lambda, .. } => lambda,
        other => panic!("{other:?}"),
    };
    (l(x, &y, &u), l(&y, &z, &v), l(x, &z, &vu))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn tlip_of_composition_is_submultiplicative(seed in 0u64..10_000, a in 0.2f64..5.0, b in 0.2f64..5.0) {
        let inst = random_coarea_instance(seed, &RandomShape::default()).unwrap();
        let (lu, lv, lvu) = composed_lipschitz(&inst.x, (a, b));
        prop_assert!(lvu <= lu * lv * (1.0 + 1e-12) + 1e-15);
    }

    #[test]
    fn quotient_then_identity_keeps_tlip(seed in 0u64..10_000) {
        let inst = random_coarea_instance(seed, &RandomShape::default()).unwrap();
        let id = CausalMap::identity(&inst.y);
        let both = id.after(&inst.map);
        prop_assert_eq!(&both.table, &inst.map.table);
        let l1 = tlip_estimate(&inst.x, &inst.y, &inst.map).lambda();
        let l2 = tlip_estimate(&inst.x, &inst.y, &both).lambda();
        prop_assert_eq!(l1, l2);
    }
}
