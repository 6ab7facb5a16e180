//! Shared fixtures and independent oracles for the integration tests.
#![allow(dead_code)]

use num_bigint::BigUint;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sgat_core::generate::{self, RandFormulaParams, RandLevelParams};
use sgat_core::graph::Graph;
use sgat_core::solvers::planarity_check;
use sgat_core::spec::{parse_lformula, parse_lspec, FpnSpec, LFormula, LSpec, SFormula};

/// 200 random planar 1-level specs, TRI and BINTREE(1..=8).
pub fn graph_corpus() -> Vec<(String, LSpec)> {
    let p = RandLevelParams::default();
    let mut out: Vec<(String, LSpec)> = (0..200)
        .map(|seed| {
            let text = generate::rand1level(&p, seed).expect("corpus instance");
            (format!("rand1level seed {seed}"), parse_lspec(&text).unwrap())
        })
        .collect();
    out.push(("tri".into(), parse_lspec(generate::TRI).unwrap()));
    for n in 1..=8 {
        out.push((format!("bintree {n}"), generate::bintree(n)));
    }
    out
}

/// 100 random 1-level formulas with 8 to 20 expanded variables.
pub fn formula_corpus() -> Vec<(String, LFormula)> {
    let p = RandFormulaParams {
        cells: 5,
        max_calls: 3,
        min_variables: 8,
        ..Default::default()
    };
    (0..100)
        .map(|seed| {
            let text = generate::rand_lformula(&p, seed).expect("corpus instance");
            (format!("lformula seed {seed}"), parse_lformula(&text).unwrap())
        })
        .collect()
}

/// 100 random 1-narrow periodic specs with `|V| <= 6` and `m <= 60`.
pub fn fpn_corpus() -> Vec<(String, FpnSpec)> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    (0..100)
        .map(|seed| {
            let nv = rng.gen_range(1..=6);
            let m = BigUint::from(rng.gen_range(0..=60u32));
            let density = rng.gen_range(0.1..0.6);
            let text = generate::rand_fpn(nv, density, 1, &m, seed);
            (format!("randfpn seed {seed}"), text.parse().unwrap())
        })
        .collect()
}

/// Random planar graph: edges are proposed at random and kept while the
/// graph stays planar.
pub fn random_planar(n: usize, attempts: usize, rng: &mut ChaCha8Rng) -> Graph {
    let mut g = Graph::new(n);
    if n < 2 {
        return g;
    }
    for _ in 0..attempts {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u == v || g.has_edge(u, v) {
            continue;
        }
        let mut h = g.clone();
        h.add_edge(u, v);
        if planarity_check(&h) {
            g = h;
        }
    }
    g
}

/// Maximum independent set of positions `lo..=hi` of a 1-narrow periodic
/// graph, by dynamic programming over the vertex subsets of one position.
pub fn fpn_dp_mis(spec: &FpnSpec, lo: u64, hi: u64) -> usize {
    if hi < lo {
        return 0;
    }
    let nv = spec.vertices.len();
    assert!(nv <= 16);
    assert!(spec.edges.iter().all(|e| e.offset <= 1));
    let inside = |mask: usize| {
        spec.edges
            .iter()
            .filter(|e| e.offset == 0)
            .all(|e| mask >> e.from & 1 == 0 || mask >> e.to & 1 == 0)
    };
    let across = |a: usize, b: usize| {
        spec.edges
            .iter()
            .filter(|e| e.offset == 1)
            .all(|e| a >> e.from & 1 == 0 || b >> e.to & 1 == 0)
    };
    let masks: Vec<usize> = (0..1usize << nv).filter(|&m| inside(m)).collect();
    let mut best: Vec<i64> = masks.iter().map(|m| m.count_ones() as i64).collect();
    for _ in lo..hi {
        best = masks
            .iter()
            .map(|&b| {
                masks
                    .iter()
                    .zip(&best)
                    .filter(|(&a, _)| across(a, b))
                    .map(|(_, &v)| v)
                    .max()
                    .unwrap_or(i64::MIN)
                    + b.count_ones() as i64
            })
            .collect();
    }
    best.into_iter().max().unwrap_or(0) as usize
}

/// Maximum satisfied clauses by enumerating every assignment.
pub fn brute_maxsat(f: &SFormula) -> usize {
    let n = f.variables.len();
    assert!(n <= 22, "enumeration over {n} variables");
    // Truth table per clause, indexed by the bits of its variables.
    let tables: Vec<(Vec<usize>, Vec<bool>)> = f
        .clauses
        .iter()
        .map(|c| {
            let rel = &f.relations[c.relation];
            let a = c.vars.len();
            let table = (0..1usize << a)
                .map(|t| rel.satisfied_by((0..a).map(|i| t >> i & 1 == 1)))
                .collect();
            (c.vars.clone(), table)
        })
        .collect();
    let mut best = 0;
    for x in 0..1u64 << n {
        let mut s = 0;
        for (vars, table) in &tables {
            let mut idx = 0;
            for (i, &v) in vars.iter().enumerate() {
                idx |= ((x >> v & 1) as usize) << i;
            }
            s += table[idx] as usize;
        }
        best = best.max(s);
    }
    best
}

pub fn ratio(a: i64, b: i64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

pub fn rat(n: impl Into<BigUint>) -> BigRational {
    BigRational::from_integer(n.into().into())
}

/// `(l/(l+1))^e`.
pub fn shrink(l: u32, e: u32) -> BigRational {
    num_traits::pow(ratio(l as i64, l as i64 + 1), e as usize)
}

/// Depth of an address in the hierarchy tree.
pub fn depth_of(label: &str) -> usize {
    label.matches('/').count()
}

/// Maximum independent set of a complete binary tree with `h` levels.
pub fn tree_mis(h: u32) -> BigUint {
    let mut a = vec![BigUint::from(0u32), BigUint::from(1u32)];
    for i in 2..=h as usize {
        let next = (BigUint::from(1u32) << (i - 1)) + &a[i - 2];
        a.push(next);
    }
    a[h as usize].clone()
}

/// The value of the MIS scheme with an exact base on BINTREE(n) at
/// iteration `i`: blocks of `l` levels between deleted levels `i`,
/// `i + l + 1`, ..., each block a forest of complete trees.
pub fn bintree_prediction(n: u32, l: u32, i: u32) -> BigUint {
    let mut v = tree_mis(i.min(n));
    let mut d = i + 1;
    while d < n {
        let h = l.min(n - d);
        v += (BigUint::from(1u32) << d) * tree_mis(h);
        d += l + 1;
    }
    v
}
