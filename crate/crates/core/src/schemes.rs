//! Approximation schemes over hierarchical and periodic specifications.
//!
//! Hierarchical schemes solve one piece per cell type and combine the
//! values with exact multiplicities, so their cost depends on the size of
//! the input, not of its expansion. A piece is rooted at a hierarchy node,
//! owns the locals in its top levels and hands the subtrees below to the
//! pieces of their cell types. The top piece changes with the offset iteration, the
//! memoized pieces do not.
//!
//! Periodic schemes split the lattice into a first block, identical middle
//! blocks and a last block, so only three pieces are solved per offset.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::expansion::{unroll, unroll_formula};
use crate::hier::{FormulaHier, GraphHier, Hier, Window, NONE};
use crate::partial::{
    adjacent_plan, mis_plan, overlap_plan, owned_formula, owned_graph, sat_deleted_residues, sat_top_supers,
    units_max, BlockPlan, Layout, UnitSpan,
};
use crate::solvers::{planarity_check, BaseSolver, Problem};
use crate::spec::{validate_lspec, FpnFormula, FpnSpec, LFormula, LSpec};

/// How a requested accuracy maps to `l`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GuaranteeKind {
    /// `(l/(l+1))^2 >= 1 - eps`
    MaxSquared,
    /// `((l+1)/l)^2 <= 1 + eps`
    MinSquared,
    /// `l/(l+1) >= 1 - eps`
    Linear,
    /// `1 - 2/(l+1) >= 1 - eps`
    MaxSat,
}

impl GuaranteeKind {
    pub fn for_problem(problem: Problem, periodic: bool) -> Self {
        match (problem, periodic) {
            (Problem::Mis, _) => GuaranteeKind::MaxSquared,
            (Problem::Vc, _) => GuaranteeKind::MinSquared,
            (Problem::MaxCut, _) | (Problem::MaxSat, true) => GuaranteeKind::Linear,
            (Problem::MaxSat, false) => GuaranteeKind::MaxSat,
        }
    }

    /// The factor the scheme alone guarantees for a given `l`.
    pub fn factor(self, l: u32) -> BigRational {
        let l = BigInt::from(l);
        let r = BigRational::new(l.clone(), &l + 1);
        match self {
            GuaranteeKind::MaxSquared => &r * &r,
            GuaranteeKind::MinSquared => {
                let inv = r.recip();
                &inv * &inv
            }
            GuaranteeKind::Linear => r,
            GuaranteeKind::MaxSat => BigRational::new(&l - 1, &l + 1),
        }
    }

    fn holds(self, l: u32, eps: &BigRational) -> bool {
        let f = self.factor(l);
        match self {
            GuaranteeKind::MinSquared => f <= BigRational::one() + eps,
            _ => f >= BigRational::one() - eps,
        }
    }
}

/// Parses a positive decimal (`0.25`, `1e-3`) or fraction (`1/4`) exactly.
pub fn parse_epsilon(text: &str) -> Result<BigRational> {
    let bad = || Error::Unsupported(format!("invalid epsilon `{text}`: expected a positive number"));
    let t = text.trim();
    let value = if let Some((a, b)) = t.split_once('/') {
        let a: BigInt = a.trim().parse().map_err(|_| bad())?;
        let b: BigInt = b.trim().parse().map_err(|_| bad())?;
        if b.is_zero() {
            return Err(bad());
        }
        BigRational::new(a, b)
    } else {
        let (mantissa, exp) = match t.split_once(['e', 'E']) {
            Some((m, e)) => (m, e.parse::<i32>().map_err(|_| bad())?),
            None => (t, 0),
        };
        let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
        if int.is_empty() && frac.is_empty() || !(int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit())) {
            return Err(bad());
        }
        let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
        let scale = exp - frac.len() as i32;
        let ten = BigInt::from(10);
        if scale >= 0 {
            BigRational::from_integer(digits * num_traits::pow(ten, scale as usize))
        } else {
            BigRational::new(digits, num_traits::pow(ten, (-scale) as usize))
        }
    };
    if value <= BigRational::zero() {
        return Err(bad());
    }
    Ok(value)
}

/// The smallest `l >= 1` meeting the accuracy `eps` for the given kind.
pub fn epsilon_to_l(eps: &BigRational, kind: GuaranteeKind) -> u32 {
    let e = eps.to_f64().unwrap_or(f64::MAX).max(1e-12);
    let guess = match kind {
        GuaranteeKind::MaxSquared => {
            let r = (1.0 - e).max(0.0).sqrt();
            r / (1.0 - r)
        }
        GuaranteeKind::MinSquared => 1.0 / ((1.0 + e).sqrt() - 1.0),
        GuaranteeKind::Linear => (1.0 - e) / e,
        GuaranteeKind::MaxSat => 2.0 / e - 1.0,
    };
    let mut l = if guess.is_finite() { guess.ceil().clamp(1.0, 1e9) as u32 } else { 1 };
    while l > 1 && kind.holds(l - 1, eps) {
        l -= 1;
    }
    while !kind.holds(l, eps) {
        l += 1;
    }
    l
}

/// Scheme parameters. `k` defaults to the measured level restriction
/// (narrowness for periodic inputs).
#[derive(Clone, Debug)]
pub struct SchemeParams {
    pub l: u32,
    pub k: Option<u32>,
    pub piece_budget: usize,
    pub threads: usize,
    /// The accuracy `l` was derived from, for reporting.
    pub epsilon: Option<String>,
}

impl SchemeParams {
    pub fn new(l: u32) -> Self {
        SchemeParams {
            l,
            k: None,
            piece_budget: 20_000,
            threads: 1,
            epsilon: None,
        }
    }

    pub fn with_k(mut self, k: u32) -> Self {
        self.k = Some(k);
        self
    }
}

/// `(offset, value)` for every offset tried.
pub type OffsetValues = Vec<(u32, BigUint)>;

/// The result of a scheme: the chosen offset, the exact value and enough
/// per-piece state to answer size, membership, streaming and construction
/// requests without expanding.
#[derive(Clone, Debug)]
pub struct ApproxSolution {
    pub problem: Problem,
    pub source: String,
    pub l: u32,
    pub k: u32,
    pub base: String,
    pub epsilon: Option<String>,
    pub best_offset: u32,
    /// Exact value: set size for MIS and VC, cut edges, satisfied clauses.
    pub total_value: BigUint,
    /// Ratio to the optimum the value is guaranteed to meet, base solver included.
    pub guarantee: BigRational,
    /// Value of every offset iteration, in iteration order.
    pub offset_values: OffsetValues,
    pub(crate) repr: Repr,
}

impl ApproxSolution {
    pub fn is_periodic(&self) -> bool {
        matches!(self.repr, Repr::Fpn(_))
    }

    /// Representative pieces of a periodic solution, in the order solved.
    pub fn fpn_pieces(&self) -> &[FpnPiece] {
        match &self.repr {
            Repr::Fpn(s) => &s.pieces,
            Repr::Hier(_) => &[],
        }
    }

    /// Number of distinct pieces solved for a hierarchical solution.
    pub fn piece_count(&self) -> usize {
        match &self.repr {
            Repr::Hier(s) => s.pieces.len(),
            Repr::Fpn(s) => s.pieces.len(),
        }
    }
}

impl fmt::Display for ApproxSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "value={} offset={} guarantee={}",
            self.total_value, self.best_offset, self.guarantee
        )
    }
}

#[derive(Clone, Debug)]
pub(crate) enum Repr {
    Hier(HierSolution),
    Fpn(FpnSolution),
}

#[derive(Clone, Debug)]
pub(crate) struct Piece {
    pub cell: usize,
    pub layout: Layout,
    pub window: Window,
    /// Per window element: in the set (MIS, VC), on side 1 (cut) or true
    /// (MAX-SAT). Always false for elements the piece does not own.
    pub chosen: Vec<bool>,
    pub value: BigUint,
}

#[derive(Clone, Debug)]
pub(crate) struct HierSolution {
    pub hier: Hier,
    pub pieces: Vec<Piece>,
    /// Memo piece of each cell type, if reachable.
    pub memo: Vec<Option<usize>>,
    pub top: usize,
}

/// A solved periodic piece over `len` positions, vertex `p * |V| + v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpnPiece {
    pub len: u64,
    /// Clause positions optimized (MAX-SAT only).
    pub kept: u64,
    pub chosen: Vec<bool>,
}

/// `count` copies of a piece, `stride` positions apart, from `start`.
#[derive(Clone, Debug)]
pub(crate) struct Segment {
    pub start: BigUint,
    pub stride: BigUint,
    pub count: BigUint,
    pub piece: usize,
}

#[derive(Clone, Debug)]
pub(crate) struct FpnSolution {
    pub names: Vec<String>,
    pub m: BigUint,
    pub pieces: Vec<FpnPiece>,
    pub segments: Vec<Segment>,
}

fn composite(kind: GuaranteeKind, l: u32, rho: &BigRational, maximize: bool) -> BigRational {
    let f = kind.factor(l);
    if maximize {
        f / rho
    } else {
        f * rho
    }
}

fn base_ratio(base: &dyn BaseSolver, problem: Problem) -> Result<BigRational> {
    base.contract(problem)
        .map(|c| c.ratio)
        .ok_or_else(|| Error::Inapplicable {
            solver: base.id(),
            reason: format!("{problem} is not supported"),
        })
}

fn with_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    if threads <= 1 {
        return f();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

fn check_l(l: u32) -> Result<()> {
    if l == 0 {
        Err(Error::Unsupported("l must be at least 1".into()))
    } else {
        Ok(())
    }
}

fn resolve_k(requested: Option<u32>, measured: u32) -> Result<u32> {
    match requested {
        Some(k) if k < measured => Err(Error::NotLevelRestricted { measured, requested: k }),
        Some(k) => Ok(k.max(1)),
        None => Ok(measured.max(1)),
    }
}

#[derive(Clone, Copy)]
enum Source<'a> {
    Graph(&'a GraphHier),
    Formula(&'a FormulaHier),
}

impl Source<'_> {
    fn hier(&self) -> &Hier {
        match self {
            Source::Graph(g) => &g.hier,
            Source::Formula(f) => &f.hier,
        }
    }
}

/// Clause filter for MAX-SAT pieces: clauses at super-level `s` are dropped
/// when `(s + shift) mod (l + 1)` is `j0` or `j1`.
#[derive(Clone, Copy)]
struct SatKeep {
    shift: u32,
    j0: u32,
    j1: u32,
}

struct TopPlan {
    offset: u32,
    layout: Layout,
    keep: SatKeep,
}

fn memo_layout(problem: Problem, l: u32, k: u32) -> Layout {
    match problem {
        Problem::Mis => Layout {
            window: (l + 1) * k,
            own_below: l * k,
            child_at: (l + 1) * k,
        },
        Problem::Vc => Layout {
            window: (l + 1) * k,
            own_below: (l + 1) * k,
            child_at: l * k,
        },
        Problem::MaxCut | Problem::MaxSat => Layout {
            window: (l + 2) * k,
            own_below: (l + 1) * k,
            child_at: (l + 1) * k,
        },
    }
}

fn top_plans(problem: Problem, l: u32, k: u32) -> Vec<TopPlan> {
    let memo_keep = SatKeep { shift: 1, j0: 0, j1: 1 };
    match problem {
        Problem::Mis => (0..=l)
            .map(|i| TopPlan {
                offset: i,
                layout: Layout {
                    window: (i + 1) * k,
                    own_below: i * k,
                    child_at: (i + 1) * k,
                },
                keep: memo_keep,
            })
            .collect(),
        Problem::Vc => (1..=l)
            .map(|h| TopPlan {
                offset: h - 1,
                layout: Layout {
                    window: (h + 1) * k,
                    own_below: (h + 1) * k,
                    child_at: h * k,
                },
                keep: memo_keep,
            })
            .collect(),
        Problem::MaxCut => (1..=l + 1)
            .map(|h| TopPlan {
                offset: h - 1,
                layout: Layout {
                    window: (h + 1) * k,
                    own_below: h * k,
                    child_at: h * k,
                },
                keep: memo_keep,
            })
            .collect(),
        Problem::MaxSat => (0..=2 * l)
            .step_by(2)
            .map(|i| {
                let f = sat_top_supers(l, i);
                let (j0, j1) = sat_deleted_residues(l, i);
                TopPlan {
                    offset: i,
                    layout: Layout {
                        window: (f + 1) * k,
                        own_below: f * k,
                        child_at: f * k,
                    },
                    keep: SatKeep { shift: 0, j0, j1 },
                }
            })
            .collect(),
    }
}

struct Engine<'a> {
    src: Source<'a>,
    problem: Problem,
    base: &'a dyn BaseSolver,
    l: u32,
    k: u32,
    budget: usize,
    planar_only: bool,
}

impl Engine<'_> {
    /// Builds the window of a piece and solves its owned part.
    fn solve(&self, cell: usize, layout: Layout, keep: SatKeep) -> Result<Piece> {
        let h = self.src.hier();
        let window = Window::build(h, cell, layout.window, self.budget)?;
        let mut chosen = vec![false; window.elements()];
        match self.src {
            Source::Graph(gh) => {
                let (g, elems) = owned_graph(gh, &window, layout.own_below);
                if self.planar_only && !planarity_check(&g) {
                    return Err(Error::Inapplicable {
                        solver: self.base.id(),
                        reason: format!("piece rooted at {} is not planar", h.cells[cell].name),
                    });
                }
                match self.problem {
                    Problem::Mis => {
                        for v in self.base.independent_set(&g)? {
                            chosen[elems[v] as usize] = true;
                        }
                    }
                    Problem::Vc => {
                        for v in self.base.vertex_cover(&g)? {
                            chosen[elems[v] as usize] = true;
                        }
                    }
                    Problem::MaxCut => {
                        for (v, s) in self.base.max_cut(&g)?.into_iter().enumerate() {
                            chosen[elems[v] as usize] = s;
                        }
                    }
                    Problem::MaxSat => unreachable!("graph source"),
                }
            }
            Source::Formula(fh) => {
                let (l, k) = (self.l, self.k);
                let kept = |d: u32| {
                    let r = (d / k + keep.shift) % (l + 1);
                    r != keep.j0 && r != keep.j1
                };
                let (f, elems) = owned_formula(fh, &window, layout.own_below, kept);
                for (v, b) in self.base.max_sat(&f)?.into_iter().enumerate() {
                    chosen[elems[v] as usize] = b;
                }
            }
        }
        Ok(Piece {
            cell,
            layout,
            window,
            chosen,
            value: BigUint::zero(),
        })
    }

    /// Value of the subtree below a solved piece, given the memo values.
    fn value(&self, p: &Piece, pieces: &[Piece], memo: &[Option<usize>]) -> BigUint {
        let h = self.src.hier();
        let lay = p.layout;
        let w = &p.window;
        let child = |c: usize| &pieces[memo[c].expect("reachable memo piece")];
        let own = p.chosen.iter().filter(|&&b| b).count();
        match self.problem {
            Problem::Mis => {
                let mut v = BigUint::from(own);
                for (c, x) in h.types_at_depth(p.cell, lay.child_at) {
                    v += x * &child(c).value;
                }
                v
            }
            Problem::Vc => {
                let mut v = BigUint::from(own);
                for f in w.nodes_at_depth(lay.child_at) {
                    let cp = child(w.nodes[f as usize].cell);
                    let overlap = w
                        .paired_elements(f, &cp.window, lay.window - lay.child_at)
                        .into_iter()
                        .filter(|&(a, b)| p.chosen[a as usize] && cp.chosen[b as usize])
                        .count();
                    v += &cp.value - BigUint::from(overlap);
                }
                v
            }
            Problem::MaxCut | Problem::MaxSat => {
                // Values of frontier elements come from the child pieces.
                let mut value = p.chosen.clone();
                let mut v = BigUint::zero();
                for f in w.nodes_at_depth(lay.child_at) {
                    let cp = child(w.nodes[f as usize].cell);
                    v += &cp.value;
                    for (a, b) in w.paired_elements(f, &cp.window, lay.window - lay.child_at) {
                        value[a as usize] = cp.chosen[b as usize];
                    }
                }
                v + BigUint::from(self.counted(w, lay.own_below, &value))
            }
        }
    }

    /// Edges or clauses defined in the window with every term inside it and
    /// at least one term owned (depth `< own_below`), that are cut or
    /// satisfied under `value`.
    fn counted(&self, w: &Window, own_below: u32, value: &[bool]) -> usize {
        let owned = |e: u32| w.depth_of(e) < own_below;
        match self.src {
            Source::Graph(gh) => gh
                .window_edges(w, |_| true)
                .into_iter()
                .filter(|&(a, b)| (owned(a) || owned(b)) && value[a as usize] != value[b as usize])
                .count(),
            Source::Formula(fh) => {
                let mut n = 0;
                for (i, node) in w.nodes.iter().enumerate() {
                    for (rel, terms) in &fh.clauses[node.cell] {
                        let vars: Vec<u32> = terms.iter().map(|&t| w.term(i as u32, t)).collect();
                        if vars.contains(&NONE) || !vars.iter().any(|&e| owned(e)) {
                            continue;
                        }
                        if fh.relations[*rel].satisfied_by(vars.iter().map(|&e| value[e as usize])) {
                            n += 1;
                        }
                    }
                }
                n
            }
        }
    }

    /// The solution of the best offset, every offset's value, and the best offset.
    fn run(&self, threads: usize) -> Result<(HierSolution, OffsetValues, u32)> {
        let h = self.src.hier();
        let top = h.top();
        let memo_lay = memo_layout(self.problem, self.l, self.k);
        let plans = top_plans(self.problem, self.l, self.k);
        let memo_keep = SatKeep { shift: 1, j0: 0, j1: 1 };

        // Only cell types that occur at some piece root get a memo piece.
        let mut need = BTreeSet::new();
        let mut stack: Vec<usize> = Vec::new();
        for plan in &plans {
            stack.extend(h.types_at_depth(top, plan.layout.child_at).into_keys());
        }
        while let Some(c) = stack.pop() {
            if need.insert(c) {
                stack.extend(h.types_at_depth(c, memo_lay.child_at).into_keys());
            }
        }
        let need: Vec<usize> = need.into_iter().collect();

        let solved: Vec<Piece> = with_pool(threads, || {
            need.par_iter()
                .map(|&c| self.solve(c, memo_lay, memo_keep))
                .collect::<Result<Vec<_>>>()
        })?;
        let mut memo = vec![None; h.cells.len()];
        for (i, &c) in need.iter().enumerate() {
            memo[c] = Some(i);
        }
        // Callees precede callers, so increasing cell order resolves children first.
        let mut pieces = solved;
        for i in 0..pieces.len() {
            let v = self.value(&pieces[i], &pieces, &memo);
            pieces[i].value = v;
        }

        let tops: Vec<Piece> = with_pool(threads, || {
            plans
                .par_iter()
                .map(|plan| {
                    let mut p = self.solve(top, plan.layout, plan.keep)?;
                    p.value = self.value(&p, &pieces, &memo);
                    Ok(p)
                })
                .collect::<Result<Vec<_>>>()
        })?;
        let offset_values: Vec<(u32, BigUint)> = plans
            .iter()
            .zip(&tops)
            .map(|(plan, p)| (plan.offset, p.value.clone()))
            .collect();
        let mut best = 0;
        for (i, p) in tops.iter().enumerate() {
            let better = if self.problem.maximize() {
                p.value > tops[best].value
            } else {
                p.value < tops[best].value
            };
            if better {
                best = i;
            }
        }
        let best_offset = plans[best].offset;
        let top_piece = tops.into_iter().nth(best).expect("at least one iteration");
        pieces.push(top_piece);
        let top_idx = pieces.len() - 1;
        Ok((
            HierSolution {
                hier: h.clone(),
                pieces,
                memo,
                top: top_idx,
            },
            offset_values,
            best_offset,
        ))
    }
}

fn run_hier(
    src: Source<'_>,
    name: &str,
    measured_k: u32,
    problem: Problem,
    params: &SchemeParams,
    base: &dyn BaseSolver,
) -> Result<ApproxSolution> {
    check_l(params.l)?;
    let k = resolve_k(params.k, measured_k)?;
    let rho = base_ratio(base, problem)?;
    let contract = base.contract(problem).expect("checked above");
    let engine = Engine {
        src,
        problem,
        base,
        l: params.l,
        k,
        budget: params.piece_budget,
        planar_only: contract.requires_planarity,
    };
    let (sol, offset_values, best_offset) = engine.run(params.threads)?;
    let total_value = sol.pieces[sol.top].value.clone();
    let kind = GuaranteeKind::for_problem(problem, false);
    Ok(ApproxSolution {
        problem,
        source: name.to_string(),
        l: params.l,
        k,
        base: base.id(),
        epsilon: params.epsilon.clone(),
        best_offset,
        total_value,
        guarantee: composite(kind, params.l, &rho, problem.maximize()),
        offset_values,
        repr: Repr::Hier(sol),
    })
}

fn graph_scheme(spec: &LSpec, problem: Problem, params: &SchemeParams, base: &dyn BaseSolver) -> Result<ApproxSolution> {
    let report = validate_lspec(spec);
    if !report.is_valid() {
        return Err(Error::Invalid(report));
    }
    let gh = GraphHier::new(spec);
    let measured = gh.level_restriction();
    run_hier(Source::Graph(&gh), &spec.name, measured, problem, params, base)
}

/// Maximum independent set, guarantee `(l/(l+1))^2 / rho`.
pub fn h_mis(spec: &LSpec, params: &SchemeParams, base: &dyn BaseSolver) -> Result<ApproxSolution> {
    graph_scheme(spec, Problem::Mis, params, base)
}

/// Minimum vertex cover, guarantee `((l+1)/l)^2 * rho`. Pieces overlap on
/// one band of `k` levels and the cover is the union of the piece covers.
pub fn h_vc(spec: &LSpec, params: &SchemeParams, base: &dyn BaseSolver) -> Result<ApproxSolution> {
    graph_scheme(spec, Problem::Vc, params, base)
}

/// Maximum cut, guarantee `(l/(l+1)) / rho`. Pieces are blocks of `l + 1`
/// super-levels; edges between blocks are counted after solving.
pub fn h_maxcut(spec: &LSpec, params: &SchemeParams, base: &dyn BaseSolver) -> Result<ApproxSolution> {
    graph_scheme(spec, Problem::MaxCut, params, base)
}

/// MAX-SAT of a hierarchical formula, guarantee `(1 - 2/(l+1)) / rho`. The
/// value counts every clause of the expansion satisfied by the assignment.
pub fn h_maxsat(f: &LFormula, params: &SchemeParams, base: &dyn BaseSolver) -> Result<ApproxSolution> {
    let fh = FormulaHier::new(f);
    let measured = fh.level_restriction();
    run_hier(Source::Formula(&fh), &f.name, measured, Problem::MaxSat, params, base)
}

enum PeriodicSource<'a> {
    Graph(&'a FpnSpec),
    Formula(&'a FpnFormula),
}

struct Block {
    piece: usize,
    start: BigUint,
    stride: BigUint,
    count: BigUint,
}

struct FpnEngine<'a> {
    src: PeriodicSource<'a>,
    problem: Problem,
    base: &'a dyn BaseSolver,
    k: u64,
    budget: usize,
    planar_only: bool,
    pieces: Vec<FpnPiece>,
    index: HashMap<(u64, u64), usize>,
}

impl FpnEngine<'_> {
    fn width(&self) -> usize {
        match self.src {
            PeriodicSource::Graph(s) => s.vertices.len(),
            PeriodicSource::Formula(f) => f.variables.len(),
        }
    }

    fn m(&self) -> &BigUint {
        match self.src {
            PeriodicSource::Graph(s) => &s.m,
            PeriodicSource::Formula(f) => &f.m,
        }
    }

    fn piece(&mut self, len: u64, kept: u64) -> Result<usize> {
        let key = (len, if self.problem == Problem::MaxSat { kept } else { len });
        if let Some(&i) = self.index.get(&key) {
            return Ok(i);
        }
        let n = len as usize * self.width();
        if n > self.budget {
            return Err(Error::budget("piece", n, self.budget));
        }
        let chosen = match self.src {
            PeriodicSource::Graph(spec) => {
                let g = unroll(spec, len).graph;
                if self.planar_only && !planarity_check(&g) {
                    return Err(Error::Inapplicable {
                        solver: self.base.id(),
                        reason: format!("slab of {len} positions is not planar"),
                    });
                }
                let mut chosen = vec![false; n];
                match self.problem {
                    Problem::Mis => self.base.independent_set(&g)?.into_iter().for_each(|v| chosen[v] = true),
                    Problem::Vc => self.base.vertex_cover(&g)?.into_iter().for_each(|v| chosen[v] = true),
                    Problem::MaxCut => chosen = self.base.max_cut(&g)?,
                    Problem::MaxSat => unreachable!("graph source"),
                }
                chosen
            }
            PeriodicSource::Formula(f) => {
                let sf = unroll_formula(f, len, key.1, |v, p| format!("{}@{p}", f.variables[v]));
                self.base.max_sat(&sf)?
            }
        };
        self.pieces.push(FpnPiece {
            len,
            kept: key.1,
            chosen,
        });
        self.index.insert(key, self.pieces.len() - 1);
        Ok(self.pieces.len() - 1)
    }

    fn blocks(&mut self, plan: &BlockPlan) -> Result<Vec<Block>> {
        let k = self.k;
        let m = self.m().clone();
        let single = plan.middle.is_none() && plan.last.is_none();
        let mut out = Vec::new();
        let mut add = |this: &mut Self, span: &UnitSpan, stride: u64, count: BigUint, is_final: bool| -> Result<()> {
            let (start, len) = span.positions(k, &m);
            let kept = if is_final { len } else { len.saturating_sub(k) };
            let piece = this.piece(len, kept)?;
            out.push(Block {
                piece,
                start,
                stride: BigUint::from(stride * k),
                count,
            });
            Ok(())
        };
        add(self, &plan.first, 0, BigUint::one(), single)?;
        if let Some((span, stride, count)) = &plan.middle {
            add(self, span, *stride, count.clone(), false)?;
        }
        if let Some(span) = &plan.last {
            add(self, span, 0, BigUint::one(), true)?;
        }
        Ok(out)
    }

    fn count(&self, piece: usize) -> usize {
        self.pieces[piece].chosen.iter().filter(|&&b| b).count()
    }

    /// Value contributed by a piece alone: set size, cut edges or
    /// satisfied clause instances inside it.
    fn own(&self, piece: usize) -> usize {
        let p = &self.pieces[piece];
        match self.src {
            PeriodicSource::Graph(spec) => match self.problem {
                Problem::MaxCut => unroll(spec, p.len).graph.cut_value(&p.chosen),
                _ => self.count(piece),
            },
            PeriodicSource::Formula(f) => unroll_formula(f, p.len, p.len, |_, _| String::new()).count_satisfied(&p.chosen),
        }
    }

    /// Correction for consecutive pieces `a` then `b`: minus the doubly
    /// counted cover vertices, or plus the cut edges or satisfied clauses
    /// that straddle the two.
    fn junction(&self, a: usize, b: usize) -> BigInt {
        let (pa, pb) = (&self.pieces[a], &self.pieces[b]);
        let nv = self.width();
        match (self.problem, &self.src) {
            (Problem::Vc, _) => {
                let shared = self.k as usize * nv;
                let base = pa.chosen.len() - shared;
                let n = (0..shared).filter(|&i| pa.chosen[base + i] && pb.chosen[i]).count();
                -BigInt::from(n)
            }
            (Problem::MaxCut, PeriodicSource::Graph(spec)) => {
                let both = unroll(spec, pa.len + pb.len).graph;
                let side: Vec<bool> = pa.chosen.iter().chain(&pb.chosen).copied().collect();
                BigInt::from(both.cut_value(&side)) - BigInt::from(self.own(a)) - BigInt::from(self.own(b))
            }
            (Problem::MaxSat, PeriodicSource::Formula(f)) => {
                let both = unroll_formula(f, pa.len + pb.len, pa.len, |_, _| String::new());
                let value: Vec<bool> = pa.chosen.iter().chain(&pb.chosen).copied().collect();
                BigInt::from(both.count_satisfied(&value)) - BigInt::from(self.own(a))
            }
            _ => BigInt::zero(),
        }
    }

    fn total(&self, blocks: &[Block]) -> BigUint {
        let mut v = BigInt::zero();
        for b in blocks {
            v += BigInt::from(self.own(b.piece)) * BigInt::from(b.count.clone());
        }
        for pair in blocks.windows(2) {
            v += self.junction(pair[0].piece, pair[1].piece);
        }
        if let Some(mid) = blocks.iter().find(|b| b.count > BigUint::one()) {
            let repeats = BigInt::from(&mid.count - 1u32);
            v += self.junction(mid.piece, mid.piece) * repeats;
        }
        v.to_biguint().expect("values are non-negative")
    }
}

fn run_fpn(
    src: PeriodicSource<'_>,
    measured: u64,
    problem: Problem,
    params: &SchemeParams,
    base: &dyn BaseSolver,
) -> Result<ApproxSolution> {
    check_l(params.l)?;
    let k = match params.k {
        Some(k) if u64::from(k) < measured => {
            return Err(Error::NotNarrow {
                measured,
                requested: u64::from(k),
            })
        }
        Some(k) => u64::from(k.max(1)),
        None => measured.max(1),
    };
    let rho = base_ratio(base, problem)?;
    let contract = base.contract(problem).expect("checked above");
    let l = u64::from(params.l);
    let mut eng = FpnEngine {
        src,
        problem,
        base,
        k,
        budget: params.piece_budget,
        planar_only: contract.requires_planarity,
        pieces: Vec::new(),
        index: HashMap::new(),
    };
    let mu = units_max(eng.m(), k);
    let plans: Vec<(u32, BlockPlan)> = match problem {
        Problem::Mis => (0..=l).map(|i| (i as u32, mis_plan(&mu, i, l))).collect(),
        Problem::Vc => (1..=l).map(|h| (h as u32 - 1, overlap_plan(&mu, h, l))).collect(),
        Problem::MaxCut | Problem::MaxSat => (1..=l + 1).map(|h| (h as u32 - 1, adjacent_plan(&mu, h, l))).collect(),
    };
    let mut best: Option<(u32, BigUint, Vec<Block>)> = None;
    let mut offset_values = Vec::new();
    for (offset, plan) in plans {
        let blocks = eng.blocks(&plan)?;
        let v = eng.total(&blocks);
        offset_values.push((offset, v.clone()));
        let better = match &best {
            None => true,
            Some((_, b, _)) if problem.maximize() => v > *b,
            Some((_, b, _)) => v < *b,
        };
        if better {
            best = Some((offset, v, blocks));
        }
    }
    let (best_offset, total_value, blocks) = best.expect("at least one iteration");
    let (names, m, source) = match eng.src {
        PeriodicSource::Graph(s) => (s.vertices.clone(), s.m.clone(), "fpn"),
        PeriodicSource::Formula(f) => (f.variables.clone(), f.m.clone(), "fpncnf"),
    };
    let segments = blocks
        .into_iter()
        .map(|b| Segment {
            start: b.start,
            stride: b.stride,
            count: b.count,
            piece: b.piece,
        })
        .collect();
    let kind = GuaranteeKind::for_problem(problem, true);
    Ok(ApproxSolution {
        problem,
        source: source.to_string(),
        l: params.l,
        k: k as u32,
        base: base.id(),
        epsilon: params.epsilon.clone(),
        best_offset,
        total_value,
        guarantee: composite(kind, params.l, &rho, problem.maximize()),
        offset_values,
        repr: Repr::Fpn(FpnSolution {
            names,
            m,
            pieces: eng.pieces,
            segments,
        }),
    })
}

/// Maximum independent set of `G^m`: units congruent to the offset are
/// deleted and the first, middle and last slabs are solved once each.
pub fn fpn_mis(spec: &FpnSpec, params: &SchemeParams, base: &dyn BaseSolver) -> Result<ApproxSolution> {
    run_fpn(PeriodicSource::Graph(spec), spec.narrowness(), Problem::Mis, params, base)
}

pub fn fpn_vc(spec: &FpnSpec, params: &SchemeParams, base: &dyn BaseSolver) -> Result<ApproxSolution> {
    run_fpn(PeriodicSource::Graph(spec), spec.narrowness(), Problem::Vc, params, base)
}

pub fn fpn_maxcut(spec: &FpnSpec, params: &SchemeParams, base: &dyn BaseSolver) -> Result<ApproxSolution> {
    run_fpn(PeriodicSource::Graph(spec), spec.narrowness(), Problem::MaxCut, params, base)
}

/// MAX-SAT of a periodic CNF, guarantee `(l/(l+1)) / rho`.
pub fn fpn_maxsat(f: &FpnFormula, params: &SchemeParams, base: &dyn BaseSolver) -> Result<ApproxSolution> {
    run_fpn(PeriodicSource::Formula(f), f.narrowness(), Problem::MaxSat, params, base)
}
