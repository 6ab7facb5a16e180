mod common;

use std::collections::HashMap;

use num_bigint::BigUint;

use common::{depth_of, graph_corpus};
use sgat_core::expansion::{count_expansion, expand, expand_fpn, level_restriction};
use sgat_core::generate::{self, bintree};
use sgat_core::graph::Graph;
use sgat_core::spec::parse_fpn;

#[test]
fn counts_match_expansion() {
    for (name, spec) in graph_corpus() {
        let g = expand(&spec, 100_000).unwrap();
        let c = count_expansion(&spec);
        assert_eq!(c.top_vertices(), &BigUint::from(g.graph.n()), "{name}");
        assert_eq!(c.top_edges(), &BigUint::from(g.graph.m() + g.collapsed_edges), "{name}");
    }
}

/// Owner nodes of every edge are within the measured level restriction.
#[test]
fn level_restriction_holds_on_expansions() {
    for (name, spec) in graph_corpus() {
        let k = level_restriction(&spec) as usize;
        let g = expand(&spec, 100_000).unwrap();
        let node = |v: usize| {
            let l = &g.labels[v];
            l.rfind('/').map_or("", |i| &l[..i]).to_string()
        };
        for (u, v) in g.graph.edges() {
            let (a, b) = (node(u), node(v));
            let (short, long) = if a.len() <= b.len() { (a, b) } else { (b, a) };
            assert!(
                short.is_empty() || long == short || long.starts_with(&format!("{short}/")),
                "{name}: edge between unrelated nodes"
            );
            assert!(depth_of(&g.labels[u]).abs_diff(depth_of(&g.labels[v])) <= k, "{name}");
        }
    }
}

fn direct_tree(n: u32) -> Graph {
    let size = (1usize << n) - 1;
    Graph::from_edges(size, (1..size).map(|v| ((v - 1) / 2, v)))
}

#[test]
fn bintree_is_the_complete_binary_tree() {
    for n in 1..=8 {
        let g = expand(&bintree(n), 1000).unwrap();
        let t = direct_tree(n);
        // Map labels to heap positions: L is the left child, R the right one.
        let pos: HashMap<usize, usize> = g
            .labels
            .iter()
            .enumerate()
            .map(|(i, l)| {
                let mut p = 0;
                for step in l.split('/').filter(|s| *s != "r") {
                    p = 2 * p + if step == "L" { 1 } else { 2 };
                }
                (i, p)
            })
            .collect();
        assert_eq!(g.graph.n(), t.n());
        assert_eq!(g.graph.m(), t.m());
        for (u, v) in g.graph.edges() {
            assert!(t.has_edge(pos[&u], pos[&v]));
        }
    }
}

#[test]
fn tri_expands_to_a_triangle() {
    let g = expand(&generate::TRI.parse().unwrap(), 10).unwrap();
    let mut labels = g.labels.clone();
    labels.sort();
    assert_eq!(labels, ["X/a", "u", "v"]);
    assert_eq!(g.graph.m(), 3);
}

#[test]
fn fpn_edges_stay_within_narrowness() {
    for seed in 0..50 {
        for k in 0..3u64 {
            let spec = parse_fpn(&generate::rand_fpn(4, 0.3, k, &BigUint::from(12u32), seed)).unwrap();
            let g = expand_fpn(&spec, 1000).unwrap();
            assert_eq!(g.graph.n(), 13 * 4);
            for (u, v) in g.graph.edges() {
                assert!(g.levels[u].abs_diff(g.levels[v]) <= spec.narrowness());
            }
        }
    }
}

#[test]
fn expansion_budget_reports_exact_count() {
    let err = expand(&bintree(40), 1_000_000).unwrap_err();
    assert!(err.to_string().contains("1099511627775"), "{err}");
}
