//! Invariants over random instances.

mod common;

use proptest::prelude::*;
use rosom::cutplane::{self, CutPlaneConfig};
use rosom::model::{parse_problem, serialize_problem};
use rosom::oracle::{true_value, OracleKind, OracleOptions};
use rosom::problems::{random_instance, Dims, SetKind};
use rosom::reformulate::sum_split;
use rosom::rng;
use rosom::robust_lp;
use rosom::{BiaffineForm, Method, SumOfMaxProblem};

fn small(kind: SetKind, seed: u64) -> SumOfMaxProblem {
    let dims = Dims { n_x: 2, terms: 2 + (seed % 2) as usize, pieces: 2, dim_zeta: 2 };
    random_instance(dims, kind, seed)
}

fn polytope() -> impl Strategy<Value = SetKind> {
    prop_oneof![
        Just(SetKind::Box),
        Just(SetKind::Budgeted),
        Just(SetKind::VPolytope),
        Just(SetKind::HPolytope),
        Just(SetKind::SimplexProduct),
    ]
}

fn finite_vertices() -> impl Strategy<Value = SetKind> {
    prop_oneof![Just(SetKind::Box), Just(SetKind::VPolytope), Just(SetKind::SimplexProduct)]
}

fn any_set() -> impl Strategy<Value = SetKind> {
    prop_oneof![polytope(), Just(SetKind::Ellipsoid), Just(SetKind::TruncatedEllipsoid)]
}

fn tol(v: f64) -> f64 {
    1e-5 * (1.0 + v.abs())
}

fn groups_value(p: &SumOfMaxProblem, groups: &[Vec<usize>]) -> f64 {
    robust_lp::solve(&sum_split(p, groups, false).unwrap()).unwrap().value
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn conservative_methods_bound_the_exact_value(kind in any_set(), seed in 0u64..10_000) {
        let p = small(kind, seed);
        let rcr = common::value(&p, Method::Rcr);
        let aarcr = common::value(&p, Method::Aarcr);
        let exact = common::value(&p, Method::Eorlc);
        prop_assert!(rcr >= aarcr - tol(rcr), "rcr {rcr} < aarcr {aarcr}");
        prop_assert!(aarcr >= exact - tol(aarcr), "aarcr {aarcr} < exact {exact}");
        prop_assert!(common::value(&p, Method::Nominal) <= exact + tol(exact));
    }

    #[test]
    fn vertex_enumeration_matches_eorlc(kind in finite_vertices(), seed in 0u64..10_000) {
        let p = small(kind, seed);
        let a = common::value(&p, Method::Eorlc);
        let b = common::value(&p, Method::Vertex);
        prop_assert!((a - b).abs() < tol(a), "eorlc {a} vertex {b}");
    }

    #[test]
    fn true_value_dominates_samples(kind in any_set(), seed in 0u64..10_000) {
        let p = small(kind, seed);
        let mut r = rng::seeded(seed);
        let x: Vec<f64> = (0..p.n_x).map(|_| rng::uniform(&mut r, -1.0, 1.0)).collect();
        let wc = true_value(&p, &x, &OracleOptions::default(), None).unwrap();
        prop_assert!(p.set.contains(&wc.zeta, 1e-6));
        let at = p.evaluate_lhs(&wc.zeta, &x).unwrap();
        prop_assert!((at - wc.value).abs() < tol(at), "reported {} attained {at}", wc.value);
        for _ in 0..50 {
            let z = p.set.sample(&mut r);
            prop_assert!(p.evaluate_lhs(&z, &x).unwrap() <= wc.value + tol(wc.value));
        }
    }

    #[test]
    fn enum_and_milp_oracles_agree(kind in polytope(), seed in 0u64..10_000) {
        let p = small(kind, seed);
        let mut r = rng::seeded(seed ^ 0x5eed);
        let x: Vec<f64> = (0..p.n_x).map(|_| rng::uniform(&mut r, -1.0, 1.0)).collect();
        let e = true_value(&p, &x, &OracleOptions::default(), None).unwrap().value;
        let milp = OracleOptions { kind: OracleKind::Milp, ..OracleOptions::default() };
        let m = true_value(&p, &x, &milp, None).unwrap().value;
        prop_assert!((e - m).abs() < tol(e), "enum {e} milp {m}");
    }

    #[test]
    fn cutting_planes_bracket_the_exact_value(kind in any_set(), seed in 0u64..10_000) {
        let p = small(kind, seed);
        let exact = common::value(&p, Method::Eorlc);
        let cfg = CutPlaneConfig::default();
        for run in [cutplane::algorithm1, cutplane::algorithm2, cutplane::combined] {
            let res = run(&p, &cfg).unwrap();
            prop_assert!(res.converged());
            prop_assert!(res.value <= exact + tol(exact), "LB {} exact {exact}", res.value);
            prop_assert!(res.upper_bound >= exact - tol(exact), "UB {} exact {exact}", res.upper_bound);
            for w in res.trace.records.windows(2) {
                prop_assert!(w[1].ub <= w[0].ub + 1e-9 * (1.0 + w[0].ub.abs()));
            }
        }
    }

    #[test]
    fn lazy_variants_agree_within_epsilon(kind in any_set(), seed in 0u64..10_000) {
        let p = small(kind, seed);
        let base = CutPlaneConfig { epsilon: 1e-4, ..CutPlaneConfig::default() };
        let plain = cutplane::algorithm1(&p, &base).unwrap().value;
        for (lo, lm) in [(true, false), (false, true), (true, true)] {
            let cfg = CutPlaneConfig { lazy_oracle: lo, lazy_master: lm, ..base.clone() };
            for run in [cutplane::algorithm1, cutplane::algorithm2] {
                let v = run(&p, &cfg).unwrap().value;
                prop_assert!((v - plain).abs() <= 1e-4 + tol(plain), "lazy {lo}/{lm}: {v} vs {plain}");
            }
        }
    }

    #[test]
    fn json_round_trip(kind in any_set(), seed in 0u64..10_000) {
        let p = small(kind, seed);
        let text = serialize_problem(&p).unwrap();
        let q = parse_problem(&text).unwrap();
        prop_assert_eq!(&p, &q);
        prop_assert_eq!(text, serialize_problem(&q).unwrap());
    }

    #[test]
    fn refining_a_split_never_lowers_the_value(kind in any_set(), seed in 0u64..10_000) {
        let dims = Dims { n_x: 2, terms: 4, pieces: 2, dim_zeta: 2 };
        let p = random_instance(dims, kind, seed);
        let whole = groups_value(&p, &[vec![0, 1, 2, 3]]);
        let halves = groups_value(&p, &[vec![0, 2], vec![1, 3]]);
        let quarter = groups_value(&p, &[vec![0], vec![2], vec![1, 3]]);
        let singles = groups_value(&p, &[vec![0], vec![1], vec![2], vec![3]]);
        prop_assert!(whole <= halves + tol(halves));
        prop_assert!(halves <= quarter + tol(quarter));
        prop_assert!(quarter <= singles + tol(singles));
        let rcr = common::value(&p, Method::Rcr);
        prop_assert!((singles - rcr).abs() < tol(rcr), "singles {singles} rcr {rcr}");

        // One static group is exact once the base no longer depends on ζ.
        let mut q = p.clone();
        q.base = BiaffineForm::deterministic(p.base.constant(), p.base.x_linear().to_vec(), p.dim_zeta());
        let whole = groups_value(&q, &[vec![0, 1, 2, 3]]);
        let exact = common::value(&q, Method::Eorlc);
        prop_assert!((whole - exact).abs() < tol(exact), "whole {whole} exact {exact}");
    }
}
