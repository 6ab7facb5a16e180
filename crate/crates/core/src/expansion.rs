//! Expansion of specifications into concrete graphs and formulas, and the
//! counting and level-restriction analyses that avoid expansion.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::graph::{ExpandedGraph, Graph, Origin};
use crate::hier::{FormulaHier, GraphHier, Hier, Window, NONE};
use crate::spec::{
    validate_lspec, BoolRelation, FpnFormula, FpnSpec, LFormula, LSpec, SClause, SFormula, VertexAddress,
};

/// Exact per-cell sizes of the expansions `E(Γ_i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountVector {
    pub vertices: Vec<BigUint>,
    pub edges: Vec<BigUint>,
    /// `copies[i][j]`: number of hierarchy-tree nodes of type `j` in `HT(Γ_i)`.
    pub copies: Vec<Vec<BigUint>>,
}

impl CountVector {
    pub fn top_vertices(&self) -> &BigUint {
        self.vertices.last().expect("non-empty spec")
    }

    pub fn top_edges(&self) -> &BigUint {
        self.edges.last().expect("non-empty spec")
    }
}

fn ensure_valid(spec: &LSpec) -> Result<()> {
    let report = validate_lspec(spec);
    if report.is_valid() {
        Ok(())
    } else {
        Err(Error::Invalid(report))
    }
}

/// Vertex, edge and cell-copy counts by dynamic programming over the cells.
///
/// Pins are identified with a terminal of the caller, so a vertex is counted
/// only in the cell that declares it explicitly. Edges never merge in a valid
/// spec: an edge touching a local of node `n` is declared at `n` or, through
/// a pin, at a descendant of `n`, and a repeat would need a duplicate edge or
/// a pin-pin edge.
pub fn count_expansion(spec: &LSpec) -> CountVector {
    let n = spec.cells.len();
    let mut vertices: Vec<BigUint> = Vec::with_capacity(n);
    let mut edges: Vec<BigUint> = Vec::with_capacity(n);
    let mut copies: Vec<Vec<BigUint>> = Vec::with_capacity(n);
    for (i, cell) in spec.cells.iter().enumerate() {
        let mut v = BigUint::from(cell.vertices.len());
        let mut e = BigUint::from(cell.edges.len());
        let mut c = vec![BigUint::zero(); n];
        c[i] = BigUint::from(1u32);
        for nt in &cell.nonterminals {
            v += &vertices[nt.callee];
            e += &edges[nt.callee];
            for (j, x) in copies[nt.callee].iter().enumerate() {
                c[j] += x;
            }
        }
        vertices.push(v);
        edges.push(e);
        copies.push(c);
    }
    CountVector {
        vertices,
        edges,
        copies,
    }
}

/// The expansion `E(Γ)` with vertices labeled by their addresses.
pub fn expand(spec: &LSpec, budget: usize) -> Result<ExpandedGraph> {
    ensure_valid(spec)?;
    let count = count_expansion(spec);
    if *count.top_vertices() > BigUint::from(budget) {
        return Err(Error::budget("expansion", count.top_vertices().clone(), budget));
    }
    let gh = GraphHier::new(spec);
    let top = gh.hier.top();
    let height = gh.hier.heights()[top];
    let w = Window::build(&gh.hier, top, height + 1, budget.saturating_mul(2).saturating_add(1))?;
    Ok(window_graph(&gh, &w, Origin::LSpec { name: spec.name.clone() }))
}

/// All window elements with the edges defined at window nodes.
pub(crate) fn window_graph(gh: &GraphHier, w: &Window, origin: Origin) -> ExpandedGraph {
    let mut graph = Graph::new(w.elements());
    let mut collapsed = 0;
    for (a, b) in gh.window_edges(w, |_| true) {
        if !graph.add_edge(a as usize, b as usize) {
            collapsed += 1;
        }
    }
    ExpandedGraph {
        labels: (0..w.elements() as u32).map(|e| w.label(&gh.hier, e)).collect(),
        levels: (0..w.elements() as u32).map(|e| u64::from(w.depth_of(e))).collect(),
        graph,
        origin,
        collapsed_edges: collapsed,
    }
}

/// Minimal k such that an L-spec is k-level-restricted, by static analysis of
/// pin chains over the cell DAG.
pub fn level_restriction(spec: &LSpec) -> u32 {
    GraphHier::new(spec).level_restriction()
}

pub fn formula_level_restriction(f: &LFormula) -> u32 {
    FormulaHier::new(f).level_restriction()
}

pub fn fpn_narrowness(spec: &FpnSpec) -> u64 {
    spec.narrowness()
}

/// Owning cell (0-based) and depth of an address, or why it does not resolve.
pub fn resolve_address(spec: &LSpec, addr: &VertexAddress) -> Result<(usize, u32)> {
    Hier::from_lspec(spec)
        .resolve(&addr.path, &addr.vertex)
        .map(|(c, d, _)| (c, d))
        .map_err(|reason| Error::Address {
            addr: addr.to_string(),
            reason,
        })
}

/// Height of the hierarchy tree.
pub fn hierarchy_depth(spec: &LSpec) -> u32 {
    let h = Hier::from_lspec(spec);
    h.heights()[h.top()]
}

/// Number of positions `m + 1` as a machine integer, if it fits.
fn positions(m: &BigUint) -> Option<u64> {
    m.to_u64().and_then(|m| m.checked_add(1))
}

/// `G^m`: vertices `v@p` in position-major order.
pub fn expand_fpn(spec: &FpnSpec, budget: usize) -> Result<ExpandedGraph> {
    let total = (&spec.m + 1u32) * BigUint::from(spec.vertices.len());
    if total > BigUint::from(budget) {
        return Err(Error::budget("expansion", total, budget));
    }
    let count = positions(&spec.m).expect("bounded by budget");
    let mut g = unroll(spec, count);
    g.labels = (0..count)
        .flat_map(|p| spec.vertices.iter().map(move |v| format!("{v}@{p}")))
        .collect();
    g.origin = Origin::Fpn { m: spec.m.to_string() };
    Ok(g)
}

/// The graph induced by positions `0..count` of the lattice, which is also
/// the graph induced by any `count` consecutive positions ending at or
/// before `m`. Vertex `p * |V| + v` is `v` at relative position `p`.
pub(crate) fn unroll(spec: &FpnSpec, count: u64) -> ExpandedGraph {
    let nv = spec.vertices.len();
    let n = nv * count as usize;
    let mut graph = Graph::new(n);
    let mut collapsed = 0;
    for p in 0..count {
        for e in &spec.edges {
            let q = p + e.offset;
            if q < count {
                let a = p as usize * nv + e.from;
                let b = q as usize * nv + e.to;
                if !graph.add_edge(a, b) {
                    collapsed += 1;
                }
            }
        }
    }
    ExpandedGraph {
        labels: (0..count)
            .flat_map(|p| spec.vertices.iter().map(move |v| format!("{v}@{p}")))
            .collect(),
        levels: (0..count).flat_map(|p| std::iter::repeat_n(p, nv)).collect(),
        graph,
        origin: Origin::Piece {
            description: format!("{count} positions"),
        },
        collapsed_edges: collapsed,
    }
}

/// The flat formula `E(F)`. Each call instance gets fresh copies of the
/// callee's locals, named by call path; a node's calls precede its own
/// clauses.
pub fn expand_formula(f: &LFormula, budget: usize) -> Result<SFormula> {
    let fh = FormulaHier::new(f);
    let h = &fh.hier;
    let top = h.top();
    let mut clause_count: Vec<BigUint> = Vec::new();
    for (c, cell) in h.cells.iter().enumerate() {
        let mut n = BigUint::from(fh.clauses[c].len());
        for k in &cell.calls {
            n += &clause_count[k.callee];
        }
        clause_count.push(n);
    }
    if clause_count[top] > BigUint::from(budget) {
        return Err(Error::budget("expansion", clause_count[top].clone(), budget));
    }
    let vars = &h.expanded_locals()[top];
    if *vars > BigUint::from(budget) {
        return Err(Error::budget("expansion", vars.clone(), budget));
    }
    let height = h.heights()[top];
    let w = Window::build(h, top, height + 1, budget.saturating_mul(3).saturating_add(1))?;
    Ok(window_formula(&fh, &w, |_| true))
}

/// The clauses defined at window nodes accepted by `keep`, over all window
/// elements, in call-before-clause post-order.
pub(crate) fn window_formula(
    fh: &FormulaHier,
    w: &Window,
    mut keep: impl FnMut(u32) -> bool,
) -> SFormula {
    let mut out = SFormula {
        relations: fh.relations.clone(),
        variables: (0..w.elements() as u32).map(|e| w.label(&fh.hier, e)).collect(),
        clauses: Vec::new(),
    };
    if w.nodes.is_empty() {
        return out;
    }
    let mut stack = vec![(0u32, 0usize)];
    while let Some(&mut (n, ref mut next)) = stack.last_mut() {
        let node = &w.nodes[n as usize];
        if *next < node.children.len() {
            let c = node.children[*next];
            *next += 1;
            if c != NONE {
                stack.push((c, 0));
            }
            continue;
        }
        stack.pop();
        if !keep(n) {
            continue;
        }
        for (rel, terms) in &fh.clauses[node.cell] {
            let vars: Vec<u32> = terms.iter().map(|&t| w.term(n, t)).collect();
            if vars.contains(&NONE) {
                continue;
            }
            out.clauses.push(SClause {
                relation: *rel,
                vars: vars.into_iter().map(|v| v as usize).collect(),
            });
        }
    }
    out
}

/// The flat formula of a periodic CNF: every static clause instantiated at
/// every position `p` whose literals all stay within `0..=m`.
pub fn expand_fpn_formula(f: &FpnFormula, budget: usize) -> Result<SFormula> {
    let count = positions(&f.m).filter(|&c| c.saturating_mul(f.clauses.len().max(f.variables.len()) as u64) <= budget as u64);
    let Some(count) = count else {
        let need = (&f.m + 1u32) * BigUint::from(f.clauses.len().max(f.variables.len()));
        return Err(Error::budget("expansion", need, budget));
    };
    Ok(unroll_formula(f, count, count, |v, p| format!("{}@{p}", f.variables[v])))
}

/// Relations `C1..Cr`, one per static clause, as disjunctions with the
/// clause's polarities.
pub(crate) fn static_relations(f: &FpnFormula) -> Vec<BoolRelation> {
    f.clauses
        .iter()
        .enumerate()
        .map(|(j, c)| {
            let pol: Vec<bool> = c.iter().map(|l| l.positive).collect();
            BoolRelation::clause(format!("C{}", j + 1), &pol)
        })
        .collect()
}

/// Clauses at relative positions `0..clause_positions` whose literals lie in
/// `0..count`, over variables `p * |U| + u`.
pub(crate) fn unroll_formula(
    f: &FpnFormula,
    count: u64,
    clause_positions: u64,
    name: impl Fn(usize, u64) -> String,
) -> SFormula {
    let nu = f.variables.len();
    let mut out = SFormula {
        relations: static_relations(f),
        variables: (0..count)
            .flat_map(|p| (0..nu).map(move |v| (v, p)))
            .map(|(v, p)| name(v, p))
            .collect(),
        clauses: Vec::new(),
    };
    for p in 0..clause_positions.min(count) {
        for (j, c) in f.clauses.iter().enumerate() {
            if c.iter().all(|l| p + l.offset < count) {
                out.clauses.push(SClause {
                    relation: j,
                    vars: c
                        .iter()
                        .map(|l| (p + l.offset) as usize * nu + l.var)
                        .collect(),
                });
            }
        }
    }
    out
}
