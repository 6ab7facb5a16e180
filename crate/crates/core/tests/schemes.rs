mod common;

use num_bigint::BigUint;
use num_rational::BigRational;
use proptest::prelude::*;

use common::{brute_maxsat, formula_corpus, fpn_corpus, graph_corpus};
use sgat_core::error::Error;
use sgat_core::expansion::{expand, expand_formula, expand_fpn, expand_fpn_formula, level_restriction};
use sgat_core::generate;
use sgat_core::graph::ExpandedGraph;
use sgat_core::schemes::{
    epsilon_to_l, fpn_maxcut, fpn_maxsat, fpn_mis, fpn_vc, h_maxcut, h_maxsat, h_mis, h_vc, parse_epsilon,
    ApproxSolution, GuaranteeKind, SchemeParams,
};
use sgat_core::solution::{query, query_fpn, solution_size, stream_solution};
use sgat_core::solvers::{exact_maxcut, exact_mis, BakerSolver, ExactSolver};
use sgat_core::spec::{parse_fpn, parse_fpn_formula, VertexAddress};

fn streamed(sol: &ApproxSolution) -> Vec<String> {
    let mut out = Vec::new();
    stream_solution(sol, None, |s| {
        out.push(s.to_string());
        Ok(())
    })
    .unwrap();
    out
}

/// Membership of every vertex of an expanded graph, read back through
/// `query`.
fn members(sol: &ApproxSolution, g: &ExpandedGraph) -> Vec<bool> {
    g.labels
        .iter()
        .map(|l| {
            if sol.is_periodic() {
                let (name, p) = l.split_once('@').unwrap();
                query_fpn(sol, name, &p.parse().unwrap()).unwrap()
            } else {
                query(sol, &l.parse::<VertexAddress>().unwrap()).unwrap()
            }
        })
        .collect()
}

#[test]
fn thread_count_does_not_change_results() {
    let base = ExactSolver::default();
    for (name, spec) in graph_corpus().into_iter().step_by(5) {
        for l in 1..=2 {
            let one = SchemeParams::new(l);
            let four = SchemeParams { threads: 4, ..SchemeParams::new(l) };
            for run in [h_mis, h_vc, h_maxcut] {
                let a = run(&spec, &one, &base).unwrap();
                let b = run(&spec, &four, &base).unwrap();
                assert_eq!(a.total_value, b.total_value, "{name}");
                assert_eq!(a.offset_values, b.offset_values, "{name}");
                assert_eq!(streamed(&a), streamed(&b), "{name}");
            }
        }
    }
}

#[test]
fn hierarchical_values_match_their_sets() {
    let base = ExactSolver::default();
    for (name, spec) in graph_corpus().into_iter().step_by(3) {
        let g = expand(&spec, 100_000).unwrap();
        let n = g.graph.n();
        let opt = BigUint::from(exact_mis(&g.graph, 128).unwrap().len());
        let cut_opt = exact_maxcut(&g.graph, 128).map(|s| BigUint::from(g.graph.cut_value(&s)));
        for l in 1..=3 {
            let p = SchemeParams::new(l);

            let mis = h_mis(&spec, &p, &base).unwrap();
            let set: Vec<usize> = members(&mis, &g).iter().enumerate().filter(|(_, &b)| b).map(|(v, _)| v).collect();
            assert!(g.graph.is_independent(&set), "{name} l={l}");
            assert_eq!(BigUint::from(set.len()), mis.total_value, "{name} l={l}");
            assert!(mis.total_value <= opt);

            let vc = h_vc(&spec, &p, &base).unwrap();
            let set: Vec<usize> = members(&vc, &g).iter().enumerate().filter(|(_, &b)| b).map(|(v, _)| v).collect();
            assert!(g.graph.is_vertex_cover(&set), "{name} l={l}");
            assert_eq!(BigUint::from(set.len()), vc.total_value, "{name} l={l}");
            assert!(vc.total_value >= BigUint::from(n) - &opt);

            let cut = h_maxcut(&spec, &p, &base).unwrap();
            let side = members(&cut, &g);
            assert_eq!(BigUint::from(g.graph.cut_value(&side)), cut.total_value, "{name} l={l}");
            assert_eq!(solution_size(&cut), BigUint::from(side.iter().filter(|&&b| b).count()));
            if let Ok(best) = &cut_opt {
                assert!(&cut.total_value <= best);
            }
        }
    }
}

#[test]
fn hierarchical_maxsat_values_match_assignments() {
    let base = ExactSolver::default();
    for (name, f) in formula_corpus().into_iter().step_by(4) {
        let flat = expand_formula(&f, 100_000).unwrap();
        let opt = brute_maxsat(&flat);
        for l in 1..=3 {
            let sol = h_maxsat(&f, &SchemeParams::new(l), &base).unwrap();
            let x: Vec<bool> = flat
                .variables
                .iter()
                .map(|v| query(&sol, &v.parse::<VertexAddress>().unwrap()).unwrap())
                .collect();
            assert_eq!(BigUint::from(flat.count_satisfied(&x)), sol.total_value, "{name} l={l}");
            assert!(sol.total_value <= BigUint::from(opt));
        }
    }
}

#[test]
fn a_larger_k_still_gives_feasible_solutions() {
    let base = ExactSolver::default();
    for (name, spec) in graph_corpus().into_iter().step_by(9) {
        let g = expand(&spec, 100_000).unwrap();
        let k = level_restriction(&spec).max(1);
        for extra in 1..=2 {
            let p = SchemeParams::new(2).with_k(k + extra);
            let mis = h_mis(&spec, &p, &base).unwrap();
            assert_eq!(mis.k, k + extra);
            let set: Vec<usize> = members(&mis, &g).iter().enumerate().filter(|(_, &b)| b).map(|(v, _)| v).collect();
            assert!(g.graph.is_independent(&set), "{name}");
            assert_eq!(BigUint::from(set.len()), mis.total_value, "{name}");
        }
    }
}

#[test]
fn too_small_k_is_rejected() {
    let spec = generate::bintree(4);
    let err = h_mis(&spec, &SchemeParams::new(1).with_k(0), &ExactSolver::default()).unwrap_err();
    assert!(matches!(err, Error::NotLevelRestricted { .. }), "{err}");

    let spec = parse_fpn("fpn m=5\nvertex a\nedge a a 2\n").unwrap();
    let err = fpn_mis(&spec, &SchemeParams::new(1).with_k(1), &ExactSolver::default()).unwrap_err();
    assert!(matches!(err, Error::NotNarrow { measured: 2, requested: 1 }), "{err}");
    assert!(fpn_mis(&spec, &SchemeParams::new(1), &ExactSolver::default()).is_ok());
}

#[test]
fn baker_base_runs_through_the_scheme() {
    for (name, spec) in graph_corpus().into_iter().step_by(11) {
        let g = expand(&spec, 100_000).unwrap();
        for l in 1..=2 {
            let base = BakerSolver { l: l as usize, budget: 64 };
            let sol = h_mis(&spec, &SchemeParams::new(l), &base).unwrap();
            assert!(sol.base.contains("baker"));
            let set: Vec<usize> = members(&sol, &g).iter().enumerate().filter(|(_, &b)| b).map(|(v, _)| v).collect();
            assert!(g.graph.is_independent(&set), "{name}");
            assert!(h_maxcut(&spec, &SchemeParams::new(l), &base).is_err());
        }
    }
}

#[test]
fn periodic_values_match_their_sets() {
    let base = ExactSolver::default();
    for (name, spec) in fpn_corpus() {
        let g = expand_fpn(&spec, 100_000).unwrap();
        for l in 1..=3 {
            let p = SchemeParams::new(l);

            let mis = fpn_mis(&spec, &p, &base).unwrap();
            let set: Vec<usize> = members(&mis, &g).iter().enumerate().filter(|(_, &b)| b).map(|(v, _)| v).collect();
            assert!(g.graph.is_independent(&set), "{name} l={l}");
            assert_eq!(BigUint::from(set.len()), mis.total_value, "{name} l={l}");

            let vc = fpn_vc(&spec, &p, &base).unwrap();
            let set: Vec<usize> = members(&vc, &g).iter().enumerate().filter(|(_, &b)| b).map(|(v, _)| v).collect();
            assert!(g.graph.is_vertex_cover(&set), "{name} l={l}");
            assert_eq!(BigUint::from(set.len()), vc.total_value, "{name} l={l}");
            assert_eq!(solution_size(&vc), vc.total_value);
            let labels: Vec<String> = set.iter().map(|&v| g.labels[v].clone()).collect();
            let mut stream = streamed(&vc);
            stream.sort();
            let mut queried = labels;
            queried.sort();
            assert_eq!(stream, queried, "{name} l={l}");

            let cut = fpn_maxcut(&spec, &p, &base).unwrap();
            let side = members(&cut, &g);
            assert_eq!(BigUint::from(g.graph.cut_value(&side)), cut.total_value, "{name} l={l}");
            assert_eq!(solution_size(&cut), BigUint::from(side.iter().filter(|&&b| b).count()));
        }
    }
}

#[test]
fn periodic_maxsat_values_match_assignments() {
    let base = ExactSolver::default();
    for seed in 0..60 {
        let m = BigUint::from(seed % 10);
        let f = parse_fpn_formula(&generate::rand_fpn_formula(2, 3, 1, &m, seed)).unwrap();
        let flat = expand_fpn_formula(&f, 100_000).unwrap();
        let opt = brute_maxsat(&flat);
        for l in 1..=3 {
            let sol = fpn_maxsat(&f, &SchemeParams::new(l), &base).unwrap();
            let x: Vec<bool> = flat
                .variables
                .iter()
                .map(|v| {
                    let (name, p) = v.split_once('@').unwrap();
                    query_fpn(&sol, name, &p.parse().unwrap()).unwrap()
                })
                .collect();
            assert_eq!(BigUint::from(flat.count_satisfied(&x)), sol.total_value, "seed {seed} l={l}");
            let bound = GuaranteeKind::Linear.factor(l) * BigRational::from_integer(opt.into());
            assert!(BigRational::from_integer(sol.total_value.clone().into()) >= bound, "seed {seed} l={l}");
        }
    }
}

proptest! {
    #[test]
    fn epsilon_to_l_is_minimal(num in 1u32..1000, den in 1u32..1000) {
        let eps = BigRational::new(num.into(), den.into());
        let one = BigRational::from_integer(1.into());
        for kind in [GuaranteeKind::MaxSquared, GuaranteeKind::MinSquared, GuaranteeKind::Linear, GuaranteeKind::MaxSat] {
            let l = epsilon_to_l(&eps, kind);
            let meets = |l: u32| match kind {
                GuaranteeKind::MinSquared => kind.factor(l) <= &one + &eps,
                _ => kind.factor(l) >= &one - &eps,
            };
            prop_assert!(l >= 1);
            prop_assert!(meets(l));
            prop_assert!(l == 1 || !meets(l - 1));
        }
    }

    #[test]
    fn epsilon_forms_agree(num in 1u32..10_000) {
        let dec = format!("0.{num:04}");
        let frac = format!("{num}/10000");
        let exp = format!("{num}e-4");
        let a = parse_epsilon(&dec).unwrap();
        prop_assert_eq!(&a, &parse_epsilon(&frac).unwrap());
        prop_assert_eq!(&a, &parse_epsilon(&exp).unwrap());
    }
}

#[test]
fn bad_epsilons_are_rejected() {
    for e in ["0", "-1", "abc", "1/0", "", ".", "1e"] {
        assert!(parse_epsilon(e).is_err(), "{e}");
    }
}

