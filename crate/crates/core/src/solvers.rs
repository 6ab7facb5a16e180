//! Solvers for the small concrete pieces: exact oracles, a BFS-layer shifting
//! solver for planar graphs, and the contract schemes use to compose them.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rustworkx_core::petgraph::graph::UnGraph;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::spec::SFormula;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Problem {
    Mis,
    Vc,
    MaxCut,
    MaxSat,
}

impl Problem {
    pub fn maximize(self) -> bool {
        !matches!(self, Problem::Vc)
    }

    pub fn name(self) -> &'static str {
        match self {
            Problem::Mis => "mis",
            Problem::Vc => "vc",
            Problem::MaxCut => "maxcut",
            Problem::MaxSat => "maxsat",
        }
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// What a base solver promises for one problem.
///
/// `ratio` is ρ ≥ 1: a maximizer returns at least OPT/ρ, a minimizer at most
/// ρ·OPT.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolverContract {
    pub solver: String,
    pub problem: Problem,
    pub ratio: BigRational,
    pub requires_planarity: bool,
    /// Largest connected component (after tree peeling) solved exactly.
    pub budget: usize,
}

/// A deterministic solver for pieces. Identical inputs give identical outputs.
pub trait BaseSolver: Send + Sync {
    fn id(&self) -> String;
    /// `None` when the problem is not supported.
    fn contract(&self, problem: Problem) -> Option<SolverContract>;
    fn independent_set(&self, g: &Graph) -> Result<Vec<usize>>;
    fn vertex_cover(&self, g: &Graph) -> Result<Vec<usize>>;
    fn max_cut(&self, g: &Graph) -> Result<Vec<bool>>;
    fn max_sat(&self, f: &SFormula) -> Result<Vec<bool>>;
}

#[derive(Clone, Debug)]
pub struct ExactSolver {
    pub budget: usize,
}

impl Default for ExactSolver {
    fn default() -> Self {
        ExactSolver { budget: 64 }
    }
}

impl BaseSolver for ExactSolver {
    fn id(&self) -> String {
        "exact".into()
    }

    fn contract(&self, problem: Problem) -> Option<SolverContract> {
        Some(SolverContract {
            solver: self.id(),
            problem,
            ratio: BigRational::one(),
            requires_planarity: false,
            budget: self.budget,
        })
    }

    fn independent_set(&self, g: &Graph) -> Result<Vec<usize>> {
        exact_mis(g, self.budget)
    }

    fn vertex_cover(&self, g: &Graph) -> Result<Vec<usize>> {
        exact_vc(g, self.budget)
    }

    fn max_cut(&self, g: &Graph) -> Result<Vec<bool>> {
        exact_maxcut(g, self.budget)
    }

    fn max_sat(&self, f: &SFormula) -> Result<Vec<bool>> {
        exact_maxsat(f, self.budget).map(|(a, _)| a)
    }
}

/// Shifting over BFS layers with exact slab solves; planar pieces only.
#[derive(Clone, Debug)]
pub struct BakerSolver {
    pub l: usize,
    pub budget: usize,
}

impl BaseSolver for BakerSolver {
    fn id(&self) -> String {
        format!("baker(l={})", self.l)
    }

    fn contract(&self, problem: Problem) -> Option<SolverContract> {
        let l = BigInt::from(self.l);
        let ratio = match problem {
            Problem::Mis | Problem::Vc => BigRational::new(&l + 1, l),
            _ => return None,
        };
        Some(SolverContract {
            solver: self.id(),
            problem,
            ratio,
            requires_planarity: true,
            budget: self.budget,
        })
    }

    fn independent_set(&self, g: &Graph) -> Result<Vec<usize>> {
        baker_mis(g, self.l, self.budget)
    }

    fn vertex_cover(&self, g: &Graph) -> Result<Vec<usize>> {
        baker_vc(g, self.l, self.budget)
    }

    fn max_cut(&self, _: &Graph) -> Result<Vec<bool>> {
        Err(Error::Unsupported(format!("{} does not solve max-cut", self.id())))
    }

    fn max_sat(&self, _: &SFormula) -> Result<Vec<bool>> {
        Err(Error::Unsupported(format!("{} does not solve MAX-SAT", self.id())))
    }
}

const WIDTH: usize = 128;
type Mask = u128;

fn bit(i: usize) -> Mask {
    1 << i
}

fn bits(mut m: Mask) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(i)
        }
    })
}

/// Removes degree-0 and degree-1 vertices repeatedly, taking each into the
/// independent set. Returns the taken vertices and the remaining ones.
fn peel_leaves(g: &Graph) -> (Vec<usize>, Vec<bool>) {
    let n = g.n();
    let mut alive = vec![true; n];
    let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut taken = Vec::new();
    let mut queue: Vec<usize> = (0..n).filter(|&v| deg[v] <= 1).rev().collect();
    while let Some(v) = queue.pop() {
        if !alive[v] || deg[v] > 1 {
            continue;
        }
        taken.push(v);
        alive[v] = false;
        for &u in g.neighbors(v) {
            if alive[u] {
                alive[u] = false;
                for &w in g.neighbors(u) {
                    if alive[w] {
                        deg[w] -= 1;
                        if deg[w] <= 1 {
                            queue.push(w);
                        }
                    }
                }
            }
        }
    }
    (taken, alive)
}

struct MisSearch {
    adj: Vec<Mask>,
    memo: HashMap<Mask, Mask>,
}

impl MisSearch {
    fn degree(&self, v: usize, cand: Mask) -> u32 {
        (self.adj[v] & cand).count_ones()
    }

    fn component(&self, cand: Mask) -> Mask {
        let start = cand & cand.wrapping_neg();
        let mut comp = start;
        let mut frontier = start;
        while frontier != 0 {
            let mut next = 0;
            for v in bits(frontier) {
                next |= self.adj[v];
            }
            next &= cand & !comp;
            comp |= next;
            frontier = next;
        }
        comp
    }

    /// α(S) ≤ |S| − ⌈|E(S)| / Δ(S)⌉, since the complement of an independent
    /// set covers every edge and a vertex covers at most Δ of them.
    fn upper_bound(&self, cand: Mask) -> u32 {
        let mut twice_edges = 0;
        let mut max_deg = 0;
        for v in bits(cand) {
            let d = self.degree(v, cand);
            twice_edges += d;
            max_deg = max_deg.max(d);
        }
        if max_deg == 0 {
            return cand.count_ones();
        }
        let edges = twice_edges / 2;
        cand.count_ones() - edges.div_ceil(max_deg)
    }

    fn solve(&mut self, mut cand: Mask) -> Mask {
        let mut forced = 0;
        loop {
            let mut changed = false;
            for v in bits(cand) {
                if cand & bit(v) == 0 {
                    continue;
                }
                let nb = self.adj[v] & cand;
                let take = match nb.count_ones() {
                    0 | 1 => true,
                    // A vertex whose neighborhood is a clique is in some maximum set.
                    2 | 3 => bits(nb).all(|u| (self.adj[u] | bit(u)) & nb == nb),
                    _ => false,
                };
                if take {
                    forced |= bit(v);
                    cand &= !(bit(v) | nb);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        if cand == 0 {
            return forced;
        }
        let comp = self.component(cand);
        if comp != cand {
            let a = self.solve(comp);
            let b = self.solve(cand & !comp);
            return forced | a | b;
        }
        if let Some(&m) = self.memo.get(&cand) {
            return forced | m;
        }
        let v = bits(cand)
            .max_by_key(|&v| (self.degree(v, cand), std::cmp::Reverse(v)))
            .expect("non-empty");
        let with = bit(v) | self.solve(cand & !(bit(v) | self.adj[v]));
        let rest = cand & !bit(v);
        let best = if self.upper_bound(rest) <= with.count_ones() {
            with
        } else {
            let without = self.solve(rest);
            if without.count_ones() > with.count_ones() {
                without
            } else {
                with
            }
        };
        if self.memo.len() < 1 << 20 {
            self.memo.insert(cand, best);
        }
        forced | best
    }
}

fn component_budget(size: usize, budget: usize, what: &'static str) -> Result<()> {
    let cap = budget.min(WIDTH);
    if size > cap {
        Err(Error::budget(what, size, cap))
    } else {
        Ok(())
    }
}

/// A maximum independent set, sorted. The budget bounds each connected
/// component left after peeling degree-≤1 vertices.
pub fn exact_mis(g: &Graph, budget: usize) -> Result<Vec<usize>> {
    let (mut taken, alive) = peel_leaves(g);
    let rest: Vec<usize> = (0..g.n()).filter(|&v| alive[v]).collect();
    let (sub, map) = g.induced(&rest);
    for comp in sub.components() {
        component_budget(comp.len(), budget, "exact solver")?;
        let mut index = vec![usize::MAX; sub.n()];
        for (i, &v) in comp.iter().enumerate() {
            index[v] = i;
        }
        let adj = comp
            .iter()
            .map(|&v| {
                sub.neighbors(v)
                    .iter()
                    .fold(0, |m, &u| m | bit(index[u]))
            })
            .collect();
        let mut search = MisSearch {
            adj,
            memo: HashMap::new(),
        };
        let full = if comp.len() == WIDTH { Mask::MAX } else { bit(comp.len()) - 1 };
        for i in bits(search.solve(full)) {
            taken.push(map[comp[i]]);
        }
    }
    taken.sort_unstable();
    Ok(taken)
}

/// A minimum vertex cover: the complement of [`exact_mis`].
pub fn exact_vc(g: &Graph, budget: usize) -> Result<Vec<usize>> {
    let mis = exact_mis(g, budget)?;
    let mut mark = vec![false; g.n()];
    for v in mis {
        mark[v] = true;
    }
    Ok((0..g.n()).filter(|&v| !mark[v]).collect())
}

fn two_coloring(g: &Graph, comp: &[usize]) -> Option<Vec<(usize, bool)>> {
    let mut color: HashMap<usize, bool> = HashMap::new();
    let mut out = Vec::with_capacity(comp.len());
    let root = comp[0];
    color.insert(root, false);
    let mut queue = vec![root];
    let mut i = 0;
    while i < queue.len() {
        let u = queue[i];
        i += 1;
        let cu = color[&u];
        out.push((u, cu));
        for &w in g.neighbors(u) {
            match color.get(&w) {
                Some(&cw) if cw == cu => return None,
                Some(_) => {}
                None => {
                    color.insert(w, !cu);
                    queue.push(w);
                }
            }
        }
    }
    Some(out)
}

struct CutSearch {
    adj: Vec<Vec<usize>>,
    side: Vec<Option<bool>>,
    best: usize,
    best_side: Vec<bool>,
}

impl CutSearch {
    fn bound(&self, next: usize, cut: usize) -> usize {
        let n = self.adj.len();
        let mut b = cut;
        for u in next..n {
            let mut to = [0usize; 2];
            let mut free = 0;
            for &w in &self.adj[u] {
                match self.side[w] {
                    Some(s) => to[usize::from(s)] += 1,
                    None if w > u => free += 1,
                    None => {}
                }
            }
            b += to[0].max(to[1]) + free;
        }
        b
    }

    fn run(&mut self, next: usize, cut: usize) {
        let n = self.adj.len();
        if next == n {
            if cut > self.best {
                self.best = cut;
                self.best_side = self.side.iter().map(|s| s.unwrap()).collect();
            }
            return;
        }
        if self.bound(next, cut) <= self.best {
            return;
        }
        let choices: &[bool] = if next == 0 { &[false] } else { &[false, true] };
        for &s in choices {
            let gain = self.adj[next]
                .iter()
                .filter(|&&w| self.side[w].is_some_and(|t| t != s))
                .count();
            self.side[next] = Some(s);
            self.run(next + 1, cut + gain);
            self.side[next] = None;
        }
    }
}

/// A maximum cut as a side per vertex. Bipartite components are 2-colored;
/// the rest go through branch-and-bound under the budget.
pub fn exact_maxcut(g: &Graph, budget: usize) -> Result<Vec<bool>> {
    let mut side = vec![false; g.n()];
    for comp in g.components() {
        if let Some(col) = two_coloring(g, &comp) {
            for (v, c) in col {
                side[v] = c;
            }
            continue;
        }
        component_budget(comp.len(), budget, "exact solver")?;
        // BFS order so that early decisions constrain many edges.
        let order = two_coloring_order(g, &comp);
        let mut index = HashMap::new();
        for (i, &v) in order.iter().enumerate() {
            index.insert(v, i);
        }
        let adj = order
            .iter()
            .map(|&v| g.neighbors(v).iter().map(|u| index[u]).collect())
            .collect();
        // Start from a greedy solution so pruning bites immediately.
        let mut search = CutSearch {
            adj,
            side: vec![None; order.len()],
            best: 0,
            best_side: vec![false; order.len()],
        };
        let greedy = greedy_cut(&search.adj);
        search.best = cut_of(&search.adj, &greedy);
        search.best_side = greedy;
        search.run(0, 0);
        for (i, &v) in order.iter().enumerate() {
            side[v] = search.best_side[i];
        }
    }
    Ok(side)
}

fn two_coloring_order(g: &Graph, comp: &[usize]) -> Vec<usize> {
    let mut seen: HashMap<usize, ()> = HashMap::new();
    let mut order = vec![comp[0]];
    seen.insert(comp[0], ());
    let mut i = 0;
    while i < order.len() {
        let u = order[i];
        i += 1;
        for &w in g.neighbors(u) {
            if seen.insert(w, ()).is_none() {
                order.push(w);
            }
        }
    }
    order
}

fn cut_of(adj: &[Vec<usize>], side: &[bool]) -> usize {
    adj.iter()
        .enumerate()
        .map(|(u, ns)| ns.iter().filter(|&&w| w > u && side[w] != side[u]).count())
        .sum()
}

fn greedy_cut(adj: &[Vec<usize>]) -> Vec<bool> {
    let mut side = vec![false; adj.len()];
    for u in 0..adj.len() {
        let same = adj[u].iter().filter(|&&w| w < u && !side[w]).count();
        let other = adj[u].iter().filter(|&&w| w < u && side[w]).count();
        side[u] = same > other;
    }
    // Local search: flip any vertex with more same-side neighbors.
    loop {
        let mut improved = false;
        for u in 0..adj.len() {
            let same = adj[u].iter().filter(|&&w| side[w] == side[u]).count();
            if 2 * same > adj[u].len() {
                side[u] = !side[u];
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }
    if side.first() == Some(&true) {
        side.iter_mut().for_each(|s| *s = !*s);
    }
    side
}

struct SatSearch<'a> {
    f: &'a SFormula,
    vars: Vec<usize>,
    /// Clauses decided once variable `i` of `vars` is assigned.
    closing: Vec<Vec<usize>>,
    value: Vec<bool>,
    best: usize,
    best_value: Vec<bool>,
    total: usize,
}

impl SatSearch<'_> {
    fn run(&mut self, i: usize, sat: usize, decided: usize) {
        if !self.best_value.is_empty() && sat + (self.total - decided) <= self.best {
            return;
        }
        if i == self.vars.len() {
            if sat > self.best || self.best_value.is_empty() {
                self.best = sat;
                self.best_value = self.vars.iter().map(|&v| self.value[v]).collect();
            }
            return;
        }
        for b in [false, true] {
            self.value[self.vars[i]] = b;
            let closing = &self.closing[i];
            let gained = closing
                .iter()
                .filter(|&&c| self.f.satisfied(&self.f.clauses[c], &self.value))
                .count();
            let n = closing.len();
            self.run(i + 1, sat + gained, decided + n);
        }
        self.value[self.vars[i]] = false;
    }
}

/// An assignment maximizing the number of satisfied clauses, and that
/// number. Each variable-connected component is searched separately.
pub fn exact_maxsat(f: &SFormula, budget: usize) -> Result<(Vec<bool>, usize)> {
    let n = f.variables.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    for c in &f.clauses {
        for w in c.vars.windows(2) {
            let a = find(&mut parent, w[0]);
            let b = find(&mut parent, w[1]);
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: HashMap<usize, (Vec<usize>, Vec<usize>)> = HashMap::new();
    let mut order = Vec::new();
    for (ci, c) in f.clauses.iter().enumerate() {
        let root = c.vars.first().map_or(usize::MAX, |&v| find(&mut parent, v));
        let entry = groups.entry(root).or_insert_with(|| {
            order.push(root);
            (Vec::new(), Vec::new())
        });
        entry.1.push(ci);
        for &v in &c.vars {
            if !entry.0.contains(&v) {
                entry.0.push(v);
            }
        }
    }
    let mut value = vec![false; n];
    let mut total = 0;
    for root in order {
        let (vars, clauses) = &groups[&root];
        component_budget(vars.len(), budget, "exact solver")?;
        let pos: HashMap<usize, usize> = vars.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut closing = vec![Vec::new(); vars.len().max(1)];
        let mut constant = 0;
        for &ci in clauses {
            let c = &f.clauses[ci];
            match c.vars.iter().map(|v| pos[v]).max() {
                Some(last) => closing[last].push(ci),
                None => {
                    if f.relations[c.relation].table[0] {
                        constant += 1;
                    }
                }
            }
        }
        let mut s = SatSearch {
            f,
            vars: vars.clone(),
            closing,
            value: vec![false; n],
            best: 0,
            best_value: Vec::new(),
            total: clauses.iter().filter(|&&c| !f.clauses[c].vars.is_empty()).count(),
        };
        if !vars.is_empty() {
            s.run(0, 0, 0);
            for (i, &v) in vars.iter().enumerate() {
                value[v] = s.best_value[i];
            }
        }
        total += s.best + constant;
    }
    Ok((value, total))
}

/// Planarity, with the Euler bound as a fast reject.
pub fn planarity_check(g: &Graph) -> bool {
    let n = g.n();
    if n >= 3 && g.m() > 3 * n - 6 {
        return false;
    }
    if n <= 4 {
        return true;
    }
    let pg: UnGraph<(), ()> = UnGraph::from_edges(g.edges().map(|(u, v)| (u as u32, v as u32)));
    rustworkx_core::planar::is_planar(&pg)
}

/// BFS layer of every vertex, each component rooted at its smallest vertex.
pub fn bfs_layers(g: &Graph) -> Vec<usize> {
    let mut layer = vec![usize::MAX; g.n()];
    for s in 0..g.n() {
        if layer[s] != usize::MAX {
            continue;
        }
        layer[s] = 0;
        let mut queue = vec![s];
        let mut i = 0;
        while i < queue.len() {
            let u = queue[i];
            i += 1;
            for &w in g.neighbors(u) {
                if layer[w] == usize::MAX {
                    layer[w] = layer[u] + 1;
                    queue.push(w);
                }
            }
        }
    }
    layer
}

/// Shifting over BFS layers: for each offset drop the layers congruent to it
/// modulo `l + 1` and solve what remains exactly; keep the best offset per
/// connected component.
pub fn baker_mis(g: &Graph, l: usize, budget: usize) -> Result<Vec<usize>> {
    assert!(l >= 1, "l must be positive");
    let layer = bfs_layers(g);
    let mut out = Vec::new();
    for comp in g.components() {
        let mut best: Option<Vec<usize>> = None;
        for o in 0..=l {
            let keep: Vec<usize> = comp.iter().copied().filter(|&v| layer[v] % (l + 1) != o).collect();
            let (sub, map) = g.induced(&keep);
            let set: Vec<usize> = exact_mis(&sub, budget)?.into_iter().map(|i| map[i]).collect();
            if best.as_ref().is_none_or(|b| set.len() > b.len()) {
                best = Some(set);
            }
        }
        out.extend(best.unwrap_or_default());
    }
    out.sort_unstable();
    Ok(out)
}

/// Overlap variant: pieces of `l + 1` consecutive layers sharing their
/// boundary layers, covers united; best of the `l` offsets per component.
pub fn baker_vc(g: &Graph, l: usize, budget: usize) -> Result<Vec<usize>> {
    assert!(l >= 1, "l must be positive");
    let layer = bfs_layers(g);
    let mut out = Vec::new();
    for comp in g.components() {
        let depth = comp.iter().map(|&v| layer[v]).max().unwrap_or(0);
        let mut best: Option<Vec<usize>> = None;
        for o in 0..l {
            let mut chosen = vec![false; g.n()];
            // Boundaries are the layers congruent to o; piece j spans the
            // layers between consecutive boundaries, both included.
            let mut start = 0;
            loop {
                let mut end = start + 1;
                while end < depth && end % l != o {
                    end += 1;
                }
                let end = end.min(depth);
                let keep: Vec<usize> = comp
                    .iter()
                    .copied()
                    .filter(|&v| layer[v] >= start && layer[v] <= end)
                    .collect();
                let (sub, map) = g.induced(&keep);
                for i in exact_vc(&sub, budget)? {
                    chosen[map[i]] = true;
                }
                if end >= depth {
                    break;
                }
                start = end;
            }
            let set: Vec<usize> = comp.iter().copied().filter(|&v| chosen[v]).collect();
            if best.as_ref().is_none_or(|b| set.len() < b.len()) {
                best = Some(set);
            }
        }
        out.extend(best.unwrap_or_default());
    }
    out.sort_unstable();
    Ok(out)
}
