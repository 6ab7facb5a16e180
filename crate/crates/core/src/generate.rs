//! Instance generators. All of them are deterministic given their seed and
//! produce documents that parse and validate.

use std::fmt::Write;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::expansion::expand;
use crate::hier::Hier;
use crate::solvers::planarity_check;
use crate::spec::{parse_lformula, parse_lspec, validate_lspec, LFormula, LSpec};

/// Complete binary tree with `2^n - 1` vertices from `n` cells: `T1` is a
/// leaf, `T<h>` hangs two copies of `T<h-1>` below its root and the pinless
/// top cell `Top` does the same with `T<n-1>`.
pub fn bintree_text(n: u32) -> String {
    let n = n.max(1);
    let mut s = format!("lspec bintree{n}\n");
    for h in 1..n {
        let _ = writeln!(s, "cell T{h} pins 1\n  vertex r\n  edge pin:1 r");
        if h > 1 {
            let _ = writeln!(
                s,
                "  nonterm L type T{p}\n  nonterm R type T{p}\n  bind L 1 r\n  bind R 1 r",
                p = h - 1
            );
        }
    }
    s.push_str("cell Top pins 0\n  vertex r\n");
    if n > 1 {
        let _ = writeln!(
            s,
            "  nonterm L type T{p}\n  nonterm R type T{p}\n  bind L 1 r\n  bind R 1 r",
            p = n - 1
        );
    }
    s
}

pub fn bintree(n: u32) -> LSpec {
    parse_lspec(&bintree_text(n)).expect("generated document parses")
}

/// The triangle: one vertex in a called cell joined to an edge of the top.
pub const TRI: &str = "lspec tri
cell G1 pins 2
  vertex a
  edge pin:1 a
  edge a pin:2
cell G2 pins 0
  vertex u
  vertex v
  edge u v
  nonterm X type G1
  bind X 1 u
  bind X 2 v
";

/// A three-level formula whose expansion has 7 clauses over 9 variables.
pub const EXAMPLE4: &str = "lformula example4
relation OR2 arity 2 tuples 01,10,11
relation OR3 arity 3 tuples 001,010,011,100,101,110,111
fcell F1 in x1,x2
  local z1,z2,z3
  clause OR3(x1,x2,z1)
  clause OR2(z2,z3)
fcell F2 in x3,x4
  local z4,z5
  clause OR3(z4,z5,x4)
  call F1(x3,z4)
  call F1(z4,z5)
fcell F3
  local z6,z7,z8
  call F1(z7,z6)
  call F2(z8,z7)
";

/// Path `v(0) - v(1) - ... - v(m)`.
pub fn fpn_path(m: &BigUint) -> String {
    format!("fpn m={m}\nvertex v\nedge v v 1\n")
}

/// Ladder with rungs `a(p) - b(p)` and rails along both vertices.
pub fn fpn_ladder(m: &BigUint) -> String {
    format!("fpn m={m}\nvertex a\nvertex b\nedge a b 0\nedge a a 1\nedge b b 1\n")
}

#[derive(Clone, Debug)]
pub struct RandLevelParams {
    pub cells: usize,
    pub max_locals: usize,
    pub max_pins: usize,
    pub max_calls: usize,
    pub edge_prob: f64,
    /// Upper bound on the expanded vertex count.
    pub max_vertices: usize,
    pub retries: usize,
}

impl Default for RandLevelParams {
    fn default() -> Self {
        RandLevelParams {
            cells: 5,
            max_locals: 3,
            max_pins: 2,
            max_calls: 2,
            edge_prob: 0.5,
            max_vertices: 30,
            retries: 1000,
        }
    }
}

/// A random 1-level-restricted L-spec whose expansion is planar and has at
/// most `max_vertices` vertices. Calls bind callee pins to distinct locals
/// of the caller only, which keeps every edge between a node and its
/// parent. Candidates with a non-planar expansion are discarded, so the
/// family is biased towards sparse cells.
pub fn rand1level(params: &RandLevelParams, seed: u64) -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..params.retries.max(1) {
        let text = rand1level_candidate(params, &mut rng);
        let spec = parse_lspec(&text).expect("generated document parses");
        if !validate_lspec(&spec).is_valid() {
            continue;
        }
        let Ok(g) = expand(&spec, params.max_vertices) else {
            continue;
        };
        if g.graph.n() > 0 && planarity_check(&g.graph) {
            return Ok(text);
        }
    }
    Err(Error::Unsupported(format!(
        "no planar instance within {} retries",
        params.retries
    )))
}

fn rand1level_candidate(p: &RandLevelParams, rng: &mut ChaCha8Rng) -> String {
    let cells = p.cells.max(1);
    let mut s = String::from("lspec rand\n");
    let mut pins = Vec::new();
    for i in 0..cells {
        let top = i + 1 == cells;
        let np = if top { 0 } else { rng.gen_range(1..=p.max_pins.max(1)) };
        let nl = rng.gen_range(1..=p.max_locals.max(1));
        pins.push(np);
        let _ = writeln!(s, "cell C{i} pins {np}");
        for v in 0..nl {
            let _ = writeln!(s, "  vertex v{v}");
        }
        let mut calls = Vec::new();
        if i > 0 {
            for c in 0..rng.gen_range(0..=p.max_calls) {
                let callee = rng.gen_range(0..i);
                if pins[callee] > nl {
                    continue;
                }
                let mut locals: Vec<usize> = (0..nl).collect();
                for j in 0..pins[callee] {
                    let k = rng.gen_range(j..nl);
                    locals.swap(j, k);
                }
                let _ = writeln!(s, "  nonterm N{c} type C{callee}");
                calls.push((c, locals[..pins[callee]].to_vec()));
            }
        }
        for q in 1..=np {
            // Every pin touches at least one local.
            let _ = writeln!(s, "  edge pin:{q} v{}", rng.gen_range(0..nl));
        }
        for a in 0..nl {
            for b in a + 1..nl {
                if rng.gen_bool(p.edge_prob) {
                    let _ = writeln!(s, "  edge v{a} v{b}");
                }
            }
        }
        for (c, binds) in calls {
            for (q, v) in binds.iter().enumerate() {
                let _ = writeln!(s, "  bind N{c} {} v{v}", q + 1);
            }
        }
    }
    s
}

/// Random FPN spec over `nv` vertices: each pair and offset `0..=k` gets an
/// edge with probability `density`.
pub fn rand_fpn(nv: usize, density: f64, k: u64, m: &BigUint, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nv = nv.max(1);
    let mut s = format!("fpn m={m}\n");
    for v in 0..nv {
        let _ = writeln!(s, "vertex v{v}");
    }
    for t in 0..=k {
        for a in 0..nv {
            let from_b = if t == 0 { a + 1 } else { 0 };
            for b in from_b..nv {
                if rng.gen_bool(density.clamp(0.0, 1.0)) {
                    let _ = writeln!(s, "edge v{a} v{b} {t}");
                }
            }
        }
    }
    s
}

#[derive(Clone, Debug)]
pub struct RandFormulaParams {
    pub cells: usize,
    pub max_locals: usize,
    pub max_interface: usize,
    pub max_calls: usize,
    pub max_clauses: usize,
    pub max_arity: usize,
    /// Bounds on the expanded variable count.
    pub min_variables: usize,
    pub max_variables: usize,
    pub retries: usize,
}

impl Default for RandFormulaParams {
    fn default() -> Self {
        RandFormulaParams {
            cells: 4,
            max_locals: 3,
            max_interface: 2,
            max_calls: 2,
            max_clauses: 3,
            max_arity: 3,
            min_variables: 1,
            max_variables: 20,
            retries: 1000,
        }
    }
}

/// A random 1-level LFormula of disjunctive clauses. Calls pass distinct
/// locals of the caller, so every clause spans a node and its parent.
pub fn rand_lformula(params: &RandFormulaParams, seed: u64) -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..params.retries.max(1) {
        let text = rand_lformula_candidate(params, &mut rng);
        let f: LFormula = parse_lformula(&text).expect("generated document parses");
        let h = Hier::from_lformula(&f);
        let n = &h.expanded_locals()[h.top()];
        if *n >= BigUint::from(params.min_variables) && *n <= BigUint::from(params.max_variables) {
            return Ok(text);
        }
    }
    Err(Error::Unsupported(format!(
        "no formula with {} to {} variables within {} retries",
        params.min_variables, params.max_variables, params.retries
    )))
}

/// Clause relation name for the given polarity bits (`1` for positive).
fn or_relation(polarity: &[bool]) -> (String, String) {
    let bits: String = polarity.iter().map(|&b| if b { '1' } else { '0' }).collect();
    let a = polarity.len();
    let tuples: Vec<String> = (0..1usize << a)
        .map(|t| (0..a).map(|i| if t >> (a - 1 - i) & 1 == 1 { '1' } else { '0' }).collect::<String>())
        .filter(|t| {
            // The only falsifying tuple has every literal false.
            t.chars().zip(polarity).any(|(c, &pos)| (c == '1') == pos)
        })
        .collect();
    let name = format!("C{bits}");
    let decl = format!("relation {name} arity {a} tuples {}", tuples.join(","));
    (name, decl)
}

fn rand_lformula_candidate(p: &RandFormulaParams, rng: &mut ChaCha8Rng) -> String {
    let cells = p.cells.max(1);
    let mut decls: Vec<String> = Vec::new();
    let mut body = String::new();
    let mut iface = Vec::new();
    for i in 0..cells {
        let top = i + 1 == cells;
        let ni = if top { 0 } else { rng.gen_range(1..=p.max_interface.max(1)) };
        let nl = rng.gen_range(1..=p.max_locals.max(1));
        iface.push(ni);
        let names: Vec<String> = (0..ni).map(|v| format!("x{v}")).chain((0..nl).map(|v| format!("z{v}"))).collect();
        if ni > 0 {
            let _ = writeln!(body, "fcell F{i} in {}", names[..ni].join(","));
        } else {
            let _ = writeln!(body, "fcell F{i}");
        }
        let _ = writeln!(body, "  local {}", names[ni..].join(","));
        for _ in 0..rng.gen_range(1..=p.max_clauses.max(1)) {
            let arity = rng.gen_range(1..=p.max_arity.max(1).min(names.len()));
            let mut pool: Vec<usize> = (0..names.len()).collect();
            for j in 0..arity {
                let k = rng.gen_range(j..pool.len());
                pool.swap(j, k);
            }
            let polarity: Vec<bool> = (0..arity).map(|_| rng.gen_bool(0.5)).collect();
            let (name, decl) = or_relation(&polarity);
            if !decls.contains(&decl) {
                decls.push(decl);
            }
            let args: Vec<&str> = pool[..arity].iter().map(|&v| names[v].as_str()).collect();
            let _ = writeln!(body, "  clause {name}({})", args.join(","));
        }
        if i > 0 {
            for _ in 0..rng.gen_range(0..=p.max_calls) {
                let callee = rng.gen_range(0..i);
                if iface[callee] > nl {
                    continue;
                }
                let mut locals: Vec<usize> = (0..nl).collect();
                for j in 0..iface[callee] {
                    let k = rng.gen_range(j..nl);
                    locals.swap(j, k);
                }
                let args: Vec<&str> = locals[..iface[callee]].iter().map(|&v| names[ni + v].as_str()).collect();
                let _ = writeln!(body, "  call F{callee}({})", args.join(","));
            }
        }
    }
    let mut s = String::from("lformula rand\n");
    for d in decls {
        s.push_str(&d);
        s.push('\n');
    }
    s + &body
}

/// Random periodic CNF: `clauses` disjunctions of up to three literals over
/// `nv` variables with offsets `0..=k`.
pub fn rand_fpn_formula(nv: usize, clauses: usize, k: u64, m: &BigUint, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nv = nv.max(1);
    let names: Vec<String> = (0..nv).map(|v| format!("x{v}")).collect();
    let mut s = format!("fpncnf m={m}\nvar {}\n", names.join(","));
    for _ in 0..clauses {
        let width = rng.gen_range(1..=3usize);
        let mut lits: Vec<(usize, u64)> = Vec::new();
        for _ in 0..width {
            let lit = (rng.gen_range(0..nv), rng.gen_range(0..=k));
            if !lits.contains(&lit) {
                lits.push(lit);
            }
        }
        let text: Vec<String> = lits
            .iter()
            .map(|&(v, t)| format!("{}{}@{t}", if rng.gen_bool(0.5) { "" } else { "!" }, names[v]))
            .collect();
        let _ = writeln!(s, "clause {}", text.join(" "));
    }
    s
}
