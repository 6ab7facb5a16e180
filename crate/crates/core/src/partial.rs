//! Decomposition primitives: partial expansions of L-specs, slabs and blocks
//! of periodic specs, and the clause-level split of hierarchical formulas.
//!
//! Depths are hierarchy-tree levels. With a k-level-restricted input every
//! band that is deleted, shared or crossed is `k` levels wide; for periodic
//! specs positions are grouped into units of `k` consecutive positions.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::expansion::{unroll, unroll_formula};
use crate::graph::{ExpandedGraph, Graph, Origin};
use crate::hier::{FormulaHier, GraphHier, Hier, Window, NONE};
use crate::spec::{validate_lspec, FpnFormula, FpnSpec, LFormula, LSpec, SClause, SFormula};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundary {
    /// The boundary band is removed.
    Delete,
    /// The boundary band stays, to be shared with the pieces below it.
    Overlap,
}

/// `PE(G_i^j)`: the explicit part of a cell's hierarchy tree above depth `j`
/// and the cell types hanging below it.
#[derive(Clone, Debug)]
pub struct PartialExpansion {
    pub root: usize,
    pub depth: u32,
    pub k: u32,
    /// Vertices owned at depths `< j` (`< j + k` in overlap mode), labeled
    /// relative to the root. The root's pins are not part of it.
    pub explicit_graph: ExpandedGraph,
    /// Cell types of the pieces below, with exact multiplicities.
    pub frontier: Vec<(usize, BigUint)>,
    pub deleted_level_count: BigUint,
}

/// Partial expansion of cell `i` (0-based) to depth `j`.
///
/// Delete mode keeps depths `< j`, removes the band `j..j+k` and reports the
/// cell types at depth `j + k`. Overlap mode keeps depths `< j + k` and
/// reports the types at depth `j`, whose top band is shared with them.
pub fn partial_expand(
    spec: &LSpec,
    i: usize,
    j: u32,
    boundary: Boundary,
    k: u32,
    budget: usize,
) -> Result<PartialExpansion> {
    let report = validate_lspec(spec);
    if !report.is_valid() {
        return Err(Error::Invalid(report));
    }
    if i >= spec.cells.len() {
        return Err(Error::Unsupported(format!("no cell with index {i}")));
    }
    let k = k.max(1);
    let gh = GraphHier::new(spec);
    let w = Window::build(&gh.hier, i, j + k, budget)?;
    let origin = Origin::Piece {
        description: format!("PE({}, {j})", spec.cells[i].name),
    };
    let (own, frontier_depth, deleted) = match boundary {
        Boundary::Delete => (j, j + k, gh.hier.count_band(i, j, j + k).1),
        Boundary::Overlap => (j + k, j, BigUint::zero()),
    };
    let (graph, elems) = owned_graph(&gh, &w, own);
    let explicit_graph = ExpandedGraph {
        labels: elems.iter().map(|&e| w.label(&gh.hier, e)).collect(),
        levels: elems.iter().map(|&e| u64::from(w.depth_of(e))).collect(),
        graph,
        origin,
        collapsed_edges: 0,
    };
    Ok(PartialExpansion {
        root: i,
        depth: j,
        k,
        explicit_graph,
        frontier: gh.hier.types_at_depth(i, frontier_depth).into_iter().collect(),
        deleted_level_count: deleted,
    })
}

/// Where a piece rooted at a hierarchy node sits: it materializes depths
/// `< window`, owns the locals at depths `< own_below` and its child pieces
/// are rooted at depth `child_at`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Layout {
    pub window: u32,
    pub own_below: u32,
    pub child_at: u32,
}

/// The graph induced on the window elements owned at depths `< own_below`,
/// and the element id of each of its vertices.
pub(crate) fn owned_graph(gh: &GraphHier, w: &Window, own_below: u32) -> (Graph, Vec<u32>) {
    let (elems, index) = owned_elements(w, own_below);
    let mut g = Graph::new(elems.len());
    for (a, b) in gh.window_edges(w, |_| true) {
        let (ia, ib) = (index[a as usize], index[b as usize]);
        if ia != NONE && ib != NONE {
            g.add_edge(ia as usize, ib as usize);
        }
    }
    (g, elems)
}

/// Owned elements in id order, and the position of each element among them
/// ([`NONE`] if not owned).
pub(crate) fn owned_elements(w: &Window, own_below: u32) -> (Vec<u32>, Vec<u32>) {
    let mut elems = Vec::new();
    let mut index = vec![NONE; w.elements()];
    for e in 0..w.elements() as u32 {
        if w.depth_of(e) < own_below {
            index[e as usize] = elems.len() as u32;
            elems.push(e);
        }
    }
    (elems, index)
}

/// Clauses defined at window nodes whose depth passes `kept`, restricted to
/// those whose variables are all owned, over the owned variables.
pub(crate) fn owned_formula(
    fh: &FormulaHier,
    w: &Window,
    own_below: u32,
    kept: impl Fn(u32) -> bool,
) -> (SFormula, Vec<u32>) {
    let (elems, index) = owned_elements(w, own_below);
    let mut f = SFormula {
        relations: fh.relations.clone(),
        variables: elems.iter().map(|&e| w.label(&fh.hier, e)).collect(),
        clauses: Vec::new(),
    };
    for (n, node) in w.nodes.iter().enumerate() {
        if !kept(node.depth) {
            continue;
        }
        for (rel, terms) in &fh.clauses[node.cell] {
            let vars: Option<Vec<usize>> = terms
                .iter()
                .map(|&t| {
                    let e = w.term(n as u32, t);
                    (e != NONE && index[e as usize] != NONE).then(|| index[e as usize] as usize)
                })
                .collect();
            if let Some(vars) = vars {
                f.clauses.push(SClause { relation: *rel, vars });
            }
        }
    }
    (f, elems)
}

/// The super-level residues `j` and `j + 1` whose clauses are dropped in
/// MAX-SAT iteration `i` (`i` even, `0..=2l`).
pub fn sat_deleted_residues(l: u32, i: u32) -> (u32, u32) {
    let j = i % (l + 1);
    (j, (j + 1) % (l + 1))
}

/// Top-piece depth (in super-levels) for MAX-SAT iteration `i`: the first
/// super-level `s >= 1` congruent to `j + 1`, where the memo pieces start.
pub(crate) fn sat_top_supers(l: u32, i: u32) -> u32 {
    match sat_deleted_residues(l, i).1 {
        0 => l + 1,
        f => f,
    }
}

/// A hierarchical formula split by one MAX-SAT iteration.
#[derive(Clone, Debug)]
pub struct FormulaPiece {
    pub cell: usize,
    /// Number of instances in the expansion.
    pub multiplicity: BigUint,
    /// Kept clauses over the variables the piece owns.
    pub formula: SFormula,
    pub top: bool,
}

#[derive(Clone, Debug)]
pub struct FormulaPieces {
    pub iteration: u32,
    pub pieces: Vec<FormulaPiece>,
    /// Clauses of the expansion at dropped super-levels.
    pub deleted_clauses: BigUint,
}

/// Splits `E(F)` for iteration `i` (`i` even, `0..=2l`): clauses at
/// super-levels congruent to `j` or `j + 1` modulo `l + 1` are dropped, with
/// `j = i mod (l + 1)`. The remaining clauses fall into variable-disjoint
/// pieces: a top piece and one piece per node at super-levels congruent to
/// `j + 1`, grouped by cell type.
pub fn formula_pieces(f: &LFormula, l: u32, k: u32, i: u32, budget: usize) -> Result<FormulaPieces> {
    assert!(l >= 1 && i.is_multiple_of(2) && i <= 2 * l, "iteration must be even and at most 2l");
    let k = k.max(1);
    let fh = FormulaHier::new(f);
    let h = &fh.hier;
    let (j0, j1) = sat_deleted_residues(l, i);
    let f_top = sat_top_supers(l, i);
    let block = (l + 1) * k;
    let kept_abs = |d: u32| {
        let r = (d / k) % (l + 1);
        r != j0 && r != j1
    };

    let mut pieces = Vec::new();
    let top = h.top();
    let w = Window::build(h, top, f_top * k, budget)?;
    let (formula, _) = owned_formula(&fh, &w, f_top * k, kept_abs);
    pieces.push(FormulaPiece {
        cell: top,
        multiplicity: BigUint::one(),
        formula,
        top: true,
    });

    // Memo pieces start at depths f_top*k + t*block; their relative
    // super-levels 0 and l are the dropped ones.
    let mut roots: BTreeMap<usize, BigUint> = BTreeMap::new();
    let mut deleted = BigUint::zero();
    let mut level: BTreeMap<usize, BigUint> = BTreeMap::new();
    level.insert(top, BigUint::one());
    let mut d = 0;
    while !level.is_empty() {
        if !kept_abs(d) {
            for (c, x) in &level {
                deleted += x * BigUint::from(fh.clauses[*c].len());
            }
        }
        if d >= f_top * k && (d - f_top * k).is_multiple_of(block) {
            for (c, x) in &level {
                *roots.entry(*c).or_insert_with(BigUint::zero) += x;
            }
        }
        level = next_level(h, &level);
        d += 1;
    }
    let kept_rel = |d: u32| {
        let r = (d / k) % (l + 1);
        r != 0 && r != l
    };
    for (c, x) in roots {
        let w = Window::build(h, c, block, budget)?;
        let (formula, _) = owned_formula(&fh, &w, block, kept_rel);
        pieces.push(FormulaPiece {
            cell: c,
            multiplicity: x,
            formula,
            top: false,
        });
    }
    Ok(FormulaPieces {
        iteration: i,
        pieces,
        deleted_clauses: deleted,
    })
}

fn next_level(h: &Hier, level: &BTreeMap<usize, BigUint>) -> BTreeMap<usize, BigUint> {
    let mut next: BTreeMap<usize, BigUint> = BTreeMap::new();
    for (t, x) in level {
        for call in &h.cells[*t].calls {
            *next.entry(call.callee).or_insert_with(BigUint::zero) += x;
        }
    }
    next
}

/// Deletion class of each expanded vertex: its super-level modulo `l + 1`.
/// Iteration `i` of the MIS scheme deletes exactly class `i`.
pub fn deletion_classes(levels: &[u64], l: u32, k: u32) -> Vec<u32> {
    let k = u64::from(k.max(1));
    levels
        .iter()
        .map(|&d| ((d / k) % u64::from(l + 1)) as u32)
        .collect()
}

/// An inclusive range of units; empty when `hi < lo`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitSpan {
    pub lo: BigInt,
    pub hi: BigInt,
}

impl UnitSpan {
    fn new(lo: impl Into<BigInt>, hi: impl Into<BigInt>) -> Self {
        UnitSpan {
            lo: lo.into(),
            hi: hi.into(),
        }
    }

    /// First position and number of positions, clipped to `0..=m`.
    pub fn positions(&self, k: u64, m: &BigUint) -> (BigUint, u64) {
        let k = BigInt::from(k);
        let start = &self.lo * &k;
        let end: BigInt = &self.hi * &k + &k - 1;
        let end = end.min(BigInt::from(m.clone()));
        let len = if end < start { BigInt::zero() } else { &end - &start + 1 };
        (
            start.to_biguint().unwrap_or_default(),
            len.to_u64().expect("piece length fits in u64"),
        )
    }

    fn shift(&self, by: &BigInt) -> UnitSpan {
        UnitSpan::new(&self.lo + by, &self.hi + by)
    }
}

/// The unit line `0..=M` split into a first block, a run of identical middle
/// blocks and a last block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockPlan {
    pub first: UnitSpan,
    /// The first middle block, the stride in units and the number of copies.
    pub middle: Option<(UnitSpan, u64, BigUint)>,
    pub last: Option<UnitSpan>,
}

impl BlockPlan {
    /// Every block in order, with its role and index. Only for small plans.
    pub fn blocks(&self) -> Vec<(Role, BigUint, UnitSpan)> {
        let mut out = vec![(Role::First, BigUint::zero(), self.first.clone())];
        if let Some((span, stride, count)) = &self.middle {
            let count = count.to_u64().expect("small plan");
            for t in 0..count {
                let by = BigInt::from(t) * BigInt::from(*stride);
                out.push((Role::Middle, BigUint::from(t + 1), span.shift(&by)));
            }
        }
        if let Some(span) = &self.last {
            out.push((Role::Last, BigUint::from(out.len()), span.clone()));
        }
        out
    }
}

fn ceil_div(a: &BigInt, b: u64) -> BigInt {
    a.div_ceil(&BigInt::from(b))
}

/// MIS slabs for offset `i`: units congruent to `i` modulo `l + 1` are
/// deleted. Slab `p` spans `max(0, (p-1)(l+1)+i+1) ..= min(M, p(l+1)+i-1)`
/// for `p = 0..=t` with `t = ceil((M - i + 1) / (l + 1))`.
pub fn mis_plan(units_max: &BigUint, i: u64, l: u64) -> BlockPlan {
    let mu = BigInt::from(units_max.clone());
    let i_b = BigInt::from(i);
    let t = ceil_div(&(&mu - &i_b + 1), l + 1).max(BigInt::zero());
    let first = UnitSpan::new(BigInt::zero(), (&i_b - BigInt::one()).min(mu.clone()));
    let middle = (t > BigInt::one()).then(|| {
        (
            UnitSpan::new(i + 1, i + l),
            l + 1,
            (&t - BigInt::one()).to_biguint().expect("positive"),
        )
    });
    let last = t.is_positive().then(|| {
        let lo: BigInt = (&t - BigInt::one()) * BigInt::from(l + 1) + BigInt::from(i + 1);
        let hi: BigInt = &t * BigInt::from(l + 1) + &i_b - BigInt::one();
        let hi = hi.min(mu.clone());
        UnitSpan::new(lo, hi)
    });
    BlockPlan { first, middle, last }
}

/// Overlapping pieces for vertex cover: `[0, h]`, then `l + 1` units every
/// `l` units, each sharing its first unit with the previous piece.
pub fn overlap_plan(units_max: &BigUint, h: u64, l: u64) -> BlockPlan {
    chain_plan(units_max, h, l, l + 1)
}

/// Adjacent blocks: `[0, h - 1]`, then blocks of `l + 1` units.
pub fn adjacent_plan(units_max: &BigUint, h: u64, l: u64) -> BlockPlan {
    assert!(h >= 1);
    chain_plan(units_max, h - 1, l + 1, l + 1)
}

/// First block `[0, first_hi]`, then blocks of `width` units every `stride`
/// units starting at `first_hi + 1 + stride - width`, clipped at `M`.
fn chain_plan(units_max: &BigUint, first_hi: u64, stride: u64, width: u64) -> BlockPlan {
    let mu = BigInt::from(units_max.clone());
    let fh = BigInt::from(first_hi);
    if mu <= fh {
        return BlockPlan {
            first: UnitSpan::new(BigInt::zero(), mu),
            middle: None,
            last: None,
        };
    }
    let start: BigInt = &fh + BigInt::from(1 + stride) - BigInt::from(width);
    // Blocks needed to reach M from the end of the first block.
    let blocks = ceil_div(&(&mu - &fh), stride);
    let middle_count = (&blocks - BigInt::one()).to_biguint().expect("at least one block");
    let middle = (!middle_count.is_zero()).then(|| {
        (
            UnitSpan::new(start.clone(), &start + width - 1),
            stride,
            middle_count.clone(),
        )
    });
    let last_lo = &start + BigInt::from(middle_count) * BigInt::from(stride);
    BlockPlan {
        first: UnitSpan::new(BigInt::zero(), fh),
        middle,
        last: Some(UnitSpan::new(last_lo, mu)),
    }
}

/// Index of the last unit, `floor(m / k)`.
pub fn units_max(m: &BigUint, k: u64) -> BigUint {
    m / BigUint::from(k.max(1))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    First,
    Middle,
    Last,
}

/// `H(l_p, r_p)`: the lattice graph induced by a slab of positions.
#[derive(Clone, Debug)]
pub struct FpnSlab {
    pub offset: u64,
    pub index: BigUint,
    /// First and last position; `hi < lo` for an empty slab.
    pub lo: BigInt,
    pub hi: BigInt,
    pub graph: ExpandedGraph,
    pub role: Role,
}

#[derive(Clone, Debug)]
pub struct FpnSlabs {
    pub first: FpnSlab,
    pub middle: Option<FpnSlab>,
    pub last: Option<FpnSlab>,
    /// Number of middle slabs, all isomorphic to `middle`.
    pub middle_count: BigUint,
}

/// The slab graph of a unit span, labeled with absolute positions.
pub fn slab_graph(spec: &FpnSpec, span: &UnitSpan, k: u64) -> (BigUint, u64, ExpandedGraph) {
    let (start, len) = span.positions(k, &spec.m);
    let mut g = unroll(spec, len);
    let nv = spec.vertices.len();
    for (idx, label) in g.labels.iter_mut().enumerate() {
        let p = &start + BigUint::from(idx / nv);
        *label = format!("{}@{p}", spec.vertices[idx % nv]);
    }
    for lv in g.levels.iter_mut() {
        *lv += start.to_u64().unwrap_or(0);
    }
    g.origin = Origin::Piece {
        description: format!("positions {start}+{len}"),
    };
    (start, len, g)
}

/// The representative slabs for MIS offset `i` and the number of middle
/// copies. Positions are grouped into units of `k`.
pub fn fpn_slabs(spec: &FpnSpec, i: u64, l: u64, k: u64) -> FpnSlabs {
    let k = k.max(1);
    let plan = mis_plan(&units_max(&spec.m, k), i, l);
    let slab = |role: Role, index: BigUint, span: &UnitSpan| {
        let (start, len, graph) = slab_graph(spec, span, k);
        let lo = BigInt::from(start);
        let hi = &lo + BigInt::from(len) - 1;
        FpnSlab {
            offset: i,
            index,
            lo,
            hi,
            graph,
            role,
        }
    };
    let first = slab(Role::First, BigUint::zero(), &plan.first);
    let (middle, middle_count) = match &plan.middle {
        Some((span, _, count)) => (Some(slab(Role::Middle, BigUint::one(), span)), count.clone()),
        None => (None, BigUint::zero()),
    };
    let last_index = &middle_count + 1u32;
    let last = plan.last.as_ref().map(|s| slab(Role::Last, last_index, s));
    FpnSlabs {
        first,
        middle,
        last,
        middle_count,
    }
}

/// Number of clause instances of `E(F)`: a static clause with largest
/// offset `o` has one instance per position `0..=m-o`.
pub fn fpn_clause_instances(f: &FpnFormula) -> BigUint {
    f.clauses
        .iter()
        .map(|c| {
            let o = BigUint::from(c.iter().map(|l| l.offset).max().unwrap_or(0));
            if o > f.m {
                BigUint::zero()
            } else {
                &f.m - o + 1u32
            }
        })
        .sum()
}

/// One block of a periodic formula for an iteration.
#[derive(Clone, Debug)]
pub struct FpnFormulaBlock {
    pub role: Role,
    pub start: BigUint,
    pub len: u64,
    pub multiplicity: BigUint,
    /// Kept clauses over the block's variables, positions relative to `start`.
    pub formula: SFormula,
}

/// Blocks of a periodic formula for iteration `i`: clause positions in units
/// congruent to `i` modulo `l + 1` are dropped, which leaves variable-disjoint
/// blocks `[0, i]` and then `l + 1` units each.
pub fn fpn_formula_pieces(f: &FpnFormula, l: u64, k: u64, i: u64) -> (Vec<FpnFormulaBlock>, BigUint) {
    let k = k.max(1);
    let plan = adjacent_plan(&units_max(&f.m, k), i + 1, l);
    let mut out = Vec::new();
    let single = plan.middle.is_none() && plan.last.is_none();
    let mut push = |role: Role, span: &UnitSpan, multiplicity: BigUint, is_final: bool| {
        let (start, len) = span.positions(k, &f.m);
        let kept = if is_final { len } else { len.saturating_sub(k) };
        let formula = unroll_formula(f, len, kept, |v, p| format!("{}@{}", f.variables[v], &start + p));
        out.push(FpnFormulaBlock {
            role,
            start,
            len,
            multiplicity,
            formula,
        });
    };
    push(Role::First, &plan.first, BigUint::one(), single);
    if let Some((span, _, count)) = &plan.middle {
        push(Role::Middle, span, count.clone(), false);
    }
    if let Some(span) = &plan.last {
        push(Role::Last, span, BigUint::one(), true);
    }
    let kept: BigUint = out
        .iter()
        .map(|b| &b.multiplicity * BigUint::from(b.formula.clauses.len()))
        .sum();
    let dropped = fpn_clause_instances(f) - kept;
    (out, dropped)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::{parse_fpn, parse_lspec};

    const TRI: &str = "lspec tri
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

    #[test]
    fn tri_partial_expansions() {
        let s = parse_lspec(TRI).unwrap();
        let pe = partial_expand(&s, 1, 0, Boundary::Delete, 1, 100).unwrap();
        assert_eq!(pe.explicit_graph.n(), 0);
        assert_eq!(pe.frontier, vec![(0, BigUint::one())]);
        assert_eq!(pe.deleted_level_count, BigUint::from(2u32));

        let pe = partial_expand(&s, 1, 1, Boundary::Delete, 1, 100).unwrap();
        assert_eq!(pe.explicit_graph.labels, vec!["u", "v"]);
        assert_eq!(pe.explicit_graph.m(), 1);
        assert!(pe.frontier.is_empty());
        assert_eq!(pe.deleted_level_count, BigUint::one());

        // The leaf cell: its pins are not part of the piece.
        let pe = partial_expand(&s, 0, 1, Boundary::Delete, 1, 100).unwrap();
        assert_eq!(pe.explicit_graph.labels, vec!["a"]);
        assert_eq!(pe.explicit_graph.m(), 0);
        assert!(pe.frontier.is_empty());

        let pe = partial_expand(&s, 1, 0, Boundary::Overlap, 1, 100).unwrap();
        assert_eq!(pe.explicit_graph.labels, vec!["u", "v"]);
        assert_eq!(pe.frontier, vec![(1, BigUint::one())]);
    }

    fn spans(plan: &BlockPlan) -> Vec<(i64, i64)> {
        plan.blocks()
            .into_iter()
            .map(|(_, _, s)| (s.lo.to_i64().unwrap(), s.hi.to_i64().unwrap()))
            .collect()
    }

    #[test]
    fn mis_slabs_on_paths() {
        // Deleting 3 and 7 out of 0..=9.
        let p = mis_plan(&BigUint::from(9u32), 3, 3);
        assert_eq!(spans(&p), vec![(0, 2), (4, 6), (8, 9)]);
        // Deleting position 0 out of 0..=2.
        let p = mis_plan(&BigUint::from(2u32), 0, 3);
        assert_eq!(spans(&p), vec![(0, -1), (1, 2)]);
        // Nothing to delete.
        let p = mis_plan(&BigUint::from(2u32), 3, 3);
        assert_eq!(spans(&p), vec![(0, 2)]);
        // The last slab is a full one.
        let p = mis_plan(&BigUint::from(7u32), 0, 3);
        assert_eq!(spans(&p), vec![(0, -1), (1, 3), (5, 7)]);
    }

    #[test]
    fn mis_slabs_cover_the_kept_units() {
        for mu in 0u32..30 {
            for l in 1..5u64 {
                for i in 0..=l {
                    let mut seen = vec![false; mu as usize + 1];
                    for (_, _, s) in mis_plan(&BigUint::from(mu), i, l).blocks() {
                        let (lo, hi) = (s.lo.to_i64().unwrap(), s.hi.to_i64().unwrap());
                        assert!(hi - lo < l as i64, "slab wider than l");
                        for u in lo..=hi {
                            assert!(!seen[u as usize]);
                            seen[u as usize] = true;
                        }
                    }
                    for (u, &s) in seen.iter().enumerate() {
                        assert_eq!(s, u as u64 % (l + 1) != i, "mu={mu} l={l} i={i} u={u}");
                    }
                }
            }
        }
    }

    #[test]
    fn chained_plans_cover_consecutive_units() {
        for mu in 0u32..25 {
            for l in 1..5u64 {
                for h in 1..=l {
                    let b = overlap_plan(&BigUint::from(mu), h, l).blocks();
                    assert_eq!(b[0].2.lo, BigInt::zero());
                    assert_eq!(b.last().unwrap().2.hi, BigInt::from(mu));
                    for w in b.windows(2) {
                        assert_eq!(w[0].2.hi, w[1].2.lo);
                    }
                }
                for h in 1..=l + 1 {
                    let b = adjacent_plan(&BigUint::from(mu), h, l).blocks();
                    assert_eq!(b.last().unwrap().2.hi, BigInt::from(mu));
                    for w in b.windows(2) {
                        assert_eq!(&w[0].2.hi + 1, w[1].2.lo);
                        assert_eq!(&w[0].2.hi % BigInt::from(l + 1), BigInt::from(h - 1));
                    }
                }
            }
        }
    }

    #[test]
    fn fpn_slab_graphs() {
        let s = parse_fpn("fpn m=9\nvertex v\nedge v v 1\n").unwrap();
        let slabs = fpn_slabs(&s, 3, 3, 1);
        assert_eq!(slabs.first.graph.labels, vec!["v@0", "v@1", "v@2"]);
        let mid = slabs.middle.unwrap();
        assert_eq!(mid.graph.labels, vec!["v@4", "v@5", "v@6"]);
        assert_eq!(mid.graph.m(), 2);
        assert_eq!(slabs.middle_count, BigUint::one());
        let last = slabs.last.unwrap();
        assert_eq!((last.lo.clone(), last.hi.clone()), (BigInt::from(8), BigInt::from(9)));
        assert_eq!(last.index, BigUint::from(2u32));
    }

    #[test]
    fn deletion_classes_partition() {
        let levels = [0, 1, 2, 3, 4, 5];
        assert_eq!(deletion_classes(&levels, 1, 1), vec![0, 1, 0, 1, 0, 1]);
        assert_eq!(deletion_classes(&levels, 1, 2), vec![0, 0, 1, 1, 0, 0]);
    }
}
