//! A common view of hierarchical specifications (graphs and formulas) and
//! bounded-depth windows into their hierarchy trees.
//!
//! A cell has pins (interface vertices or variables), locals (explicit
//! vertices or local variables) and calls. The hierarchy tree is never built
//! in full; [`Window`] materializes the nodes above a depth limit and the
//! counting helpers work level by level over the cell DAG.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::spec::{Endpoint, FVar, LFormula, LSpec};

/// A terminal of a cell, 0-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Pin(usize),
    Local(usize),
}

#[derive(Clone, Debug)]
pub struct HCall {
    pub name: String,
    pub callee: usize,
    /// `binds[q]` is the caller terminal identified with the callee's pin `q`.
    pub binds: Vec<Term>,
}

#[derive(Clone, Debug)]
pub struct HCell {
    pub name: String,
    pub pins: usize,
    pub locals: Vec<String>,
    pub calls: Vec<HCall>,
    local_index: HashMap<String, usize>,
    call_index: HashMap<String, usize>,
}

impl HCell {
    fn new(name: String, pins: usize, locals: Vec<String>, calls: Vec<HCall>) -> Self {
        let local_index = locals.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
        let call_index = calls.iter().enumerate().map(|(i, c)| (c.name.clone(), i)).collect();
        HCell {
            name,
            pins,
            locals,
            calls,
            local_index,
            call_index,
        }
    }

    pub fn local(&self, name: &str) -> Option<usize> {
        self.local_index.get(name).copied()
    }

    pub fn call(&self, name: &str) -> Option<usize> {
        self.call_index.get(name).copied()
    }
}

#[derive(Clone, Debug)]
pub struct Hier {
    pub cells: Vec<HCell>,
}

fn term_of(e: Endpoint) -> Term {
    match e {
        Endpoint::Pin(k) => Term::Pin(k - 1),
        Endpoint::Vertex(i) => Term::Local(i),
        Endpoint::Nonterminal(_) => panic!("nonterminal used as a terminal in a validated spec"),
    }
}

fn fterm(v: FVar) -> Term {
    match v {
        FVar::Interface(i) => Term::Pin(i),
        FVar::Local(i) => Term::Local(i),
    }
}

impl Hier {
    /// The hierarchy of a validated L-spec.
    pub fn from_lspec(spec: &LSpec) -> Self {
        let cells = spec
            .cells
            .iter()
            .map(|c| {
                let calls = c
                    .nonterminals
                    .iter()
                    .map(|nt| {
                        let mut binds = vec![Term::Local(0); spec.cells[nt.callee].pins];
                        for &(k, t) in &nt.binds {
                            binds[k - 1] = term_of(t);
                        }
                        HCall {
                            name: nt.name.clone(),
                            callee: nt.callee,
                            binds,
                        }
                    })
                    .collect();
                HCell::new(c.name.clone(), c.pins, c.vertices.clone(), calls)
            })
            .collect();
        Hier { cells }
    }

    pub fn from_lformula(f: &LFormula) -> Self {
        let cells = f
            .cells
            .iter()
            .map(|c| {
                let calls = c
                    .calls
                    .iter()
                    .map(|call| HCall {
                        name: call.name.clone(),
                        callee: call.callee,
                        binds: call.args.iter().map(|&v| fterm(v)).collect(),
                    })
                    .collect();
                HCell::new(c.name.clone(), c.interface.len(), c.locals.clone(), calls)
            })
            .collect();
        Hier { cells }
    }

    pub fn top(&self) -> usize {
        self.cells.len() - 1
    }

    /// Height of each cell's hierarchy tree (0 for a cell without calls).
    pub fn heights(&self) -> Vec<u32> {
        let mut h = vec![0u32; self.cells.len()];
        for c in 0..self.cells.len() {
            h[c] = self.cells[c]
                .calls
                .iter()
                .map(|k| h[k.callee] + 1)
                .max()
                .unwrap_or(0);
        }
        h
    }

    /// Number of locals in the full expansion of each cell.
    pub fn expanded_locals(&self) -> Vec<BigUint> {
        let mut v: Vec<BigUint> = Vec::with_capacity(self.cells.len());
        for c in &self.cells {
            let mut n = BigUint::from(c.locals.len());
            for k in &c.calls {
                n += &v[k.callee];
            }
            v.push(n);
        }
        v
    }

    /// Cell types of the hierarchy-tree nodes at depth `d` below a `root`
    /// node, with multiplicities, computed level by level.
    pub fn types_at_depth(&self, root: usize, d: u32) -> BTreeMap<usize, BigUint> {
        let mut level = BTreeMap::new();
        level.insert(root, BigUint::one());
        for _ in 0..d {
            let mut next: BTreeMap<usize, BigUint> = BTreeMap::new();
            for (t, x) in &level {
                for k in &self.cells[*t].calls {
                    *next.entry(k.callee).or_insert_with(BigUint::zero) += x;
                }
            }
            if next.is_empty() {
                return next;
            }
            level = next;
        }
        level
    }

    /// `(nodes, locals)` owned by nodes at depths `from..to` below `root`.
    pub fn count_band(&self, root: usize, from: u32, to: u32) -> (BigUint, BigUint) {
        let mut nodes = BigUint::zero();
        let mut locals = BigUint::zero();
        let mut level = BTreeMap::new();
        level.insert(root, BigUint::one());
        for d in 0..to {
            if level.is_empty() {
                break;
            }
            let mut next: BTreeMap<usize, BigUint> = BTreeMap::new();
            for (t, x) in &level {
                if d >= from {
                    nodes += x;
                    locals += x * BigUint::from(self.cells[*t].locals.len());
                }
                if d + 1 < to {
                    for k in &self.cells[*t].calls {
                        *next.entry(k.callee).or_insert_with(BigUint::zero) += x;
                    }
                }
            }
            level = next;
        }
        (nodes, locals)
    }

    /// Walks a call path from the top cell. Returns the owning cell, the
    /// depth and the local index of `vertex`.
    pub fn resolve(&self, path: &[String], vertex: &str) -> std::result::Result<(usize, u32, usize), String> {
        let mut c = self.top();
        for step in path {
            let k = self.cells[c]
                .call(step)
                .ok_or_else(|| format!("cell {} has no nonterminal `{step}`", self.cells[c].name))?;
            c = self.cells[c].calls[k].callee;
        }
        let local = self.cells[c]
            .local(vertex)
            .ok_or_else(|| format!("cell {} has no explicit vertex `{vertex}`", self.cells[c].name))?;
        Ok((c, path.len() as u32, local))
    }

    /// Maximum distance, in hierarchy levels, between a node and the owner
    /// of a pin of that node, per cell and pin.
    pub fn pin_distances(&self) -> Vec<Vec<u32>> {
        let mut dist: Vec<Vec<u32>> = self.cells.iter().map(|c| vec![0; c.pins]).collect();
        for c in (0..self.cells.len()).rev() {
            for call in &self.cells[c].calls {
                for (q, t) in call.binds.iter().enumerate() {
                    let d = match *t {
                        Term::Local(_) => 1,
                        Term::Pin(r) => 1 + dist[c][r],
                    };
                    let slot = &mut dist[call.callee][q];
                    *slot = (*slot).max(d);
                }
            }
        }
        dist
    }

    /// Minimal k such that every incidence (edge or clause) defined in a cell
    /// only touches owners at most k levels above the defining node.
    pub fn level_restriction<'a, I>(&self, incidences: impl Fn(usize) -> I) -> u32
    where
        I: IntoIterator<Item = &'a [Term]>,
    {
        let dist = self.pin_distances();
        let mut k = 0;
        for (c, d) in dist.iter().enumerate() {
            for inc in incidences(c) {
                for t in inc {
                    if let Term::Pin(q) = *t {
                        k = k.max(d[q]);
                    }
                }
            }
        }
        k
    }
}

/// An L-spec compiled to a hierarchy plus per-cell edges.
#[derive(Clone, Debug)]
pub struct GraphHier {
    pub name: String,
    pub hier: Hier,
    pub edges: Vec<Vec<[Term; 2]>>,
}

impl GraphHier {
    /// Compiles a validated spec.
    pub fn new(spec: &LSpec) -> Self {
        let edges = spec
            .cells
            .iter()
            .map(|c| c.edges.iter().map(|&(a, b)| [term_of(a), term_of(b)]).collect())
            .collect();
        GraphHier {
            name: spec.name.clone(),
            hier: Hier::from_lspec(spec),
            edges,
        }
    }

    pub fn level_restriction(&self) -> u32 {
        self.hier
            .level_restriction(|c| self.edges[c].iter().map(|e| &e[..]))
    }

    /// Window edges defined at nodes for which `keep(node)` holds, with both
    /// endpoints inside the window.
    pub fn window_edges(&self, w: &Window, mut keep: impl FnMut(&WNode) -> bool) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        for (i, node) in w.nodes.iter().enumerate() {
            if !keep(node) {
                continue;
            }
            for e in &self.edges[node.cell] {
                let a = w.term(i as u32, e[0]);
                let b = w.term(i as u32, e[1]);
                if a != NONE && b != NONE {
                    out.push((a, b));
                }
            }
        }
        out
    }
}

/// An LFormula compiled to a hierarchy plus per-cell clauses.
#[derive(Clone, Debug)]
pub struct FormulaHier {
    pub name: String,
    pub hier: Hier,
    pub relations: Vec<crate::spec::BoolRelation>,
    pub clauses: Vec<Vec<(usize, Vec<Term>)>>,
}

impl FormulaHier {
    pub fn new(f: &LFormula) -> Self {
        let clauses = f
            .cells
            .iter()
            .map(|c| {
                c.clauses
                    .iter()
                    .map(|cl| (cl.relation, cl.args.iter().map(|&v| fterm(v)).collect()))
                    .collect()
            })
            .collect();
        FormulaHier {
            name: f.name.clone(),
            hier: Hier::from_lformula(f),
            relations: f.relations.clone(),
            clauses,
        }
    }

    pub fn level_restriction(&self) -> u32 {
        self.hier
            .level_restriction(|c| self.clauses[c].iter().map(|(_, t)| &t[..]))
    }
}

pub const NONE: u32 = u32::MAX;

#[derive(Clone, Debug)]
pub struct WNode {
    pub cell: usize,
    pub depth: u32,
    pub parent: u32,
    /// Index of the call in the parent's cell that created this node.
    pub call: u32,
    /// Element id of local 0.
    pub first: u32,
    /// Element id of each pin, [`NONE`] above the window root.
    pub pins: Vec<u32>,
    /// Node id per call, [`NONE`] at the depth limit.
    pub children: Vec<u32>,
}

/// The hierarchy-tree nodes of depth `< limit` below a root cell, with their
/// locals numbered as elements `0..elements()` in preorder.
#[derive(Clone, Debug)]
pub struct Window {
    pub root: usize,
    pub limit: u32,
    pub nodes: Vec<WNode>,
    pub owner: Vec<u32>,
}

impl Window {
    /// Builds the window, refusing when nodes plus locals exceed `budget`.
    pub fn build(h: &Hier, root: usize, limit: u32, budget: usize) -> Result<Window> {
        let (nodes, locals) = h.count_band(root, 0, limit);
        let total = &nodes + &locals;
        if total > BigUint::from(budget) {
            return Err(Error::budget("piece", total, budget));
        }
        let mut w = Window {
            root,
            limit,
            nodes: Vec::new(),
            owner: Vec::new(),
        };
        if limit == 0 {
            return Ok(w);
        }
        let pins = vec![NONE; h.cells[root].pins];
        w.push_node(h, root, 0, NONE, NONE, pins);
        let mut stack = vec![(0u32, 0usize)];
        while let Some(&mut (n, ref mut next)) = stack.last_mut() {
            let node = &w.nodes[n as usize];
            let cell = &h.cells[node.cell];
            if *next == cell.calls.len() || node.depth + 1 >= limit {
                stack.pop();
                continue;
            }
            let j = *next;
            *next += 1;
            let call = &cell.calls[j];
            let pins: Vec<u32> = call.binds.iter().map(|&t| w.term(n, t)).collect();
            let depth = node.depth + 1;
            let child = w.push_node(h, call.callee, depth, n, j as u32, pins);
            w.nodes[n as usize].children[j] = child;
            stack.push((child, 0));
        }
        Ok(w)
    }

    fn push_node(&mut self, h: &Hier, cell: usize, depth: u32, parent: u32, call: u32, pins: Vec<u32>) -> u32 {
        let id = self.nodes.len() as u32;
        let first = self.owner.len() as u32;
        let c = &h.cells[cell];
        self.owner.extend(std::iter::repeat_n(id, c.locals.len()));
        self.nodes.push(WNode {
            cell,
            depth,
            parent,
            call,
            first,
            pins,
            children: vec![NONE; c.calls.len()],
        });
        id
    }

    pub fn elements(&self) -> usize {
        self.owner.len()
    }

    pub fn term(&self, node: u32, t: Term) -> u32 {
        let n = &self.nodes[node as usize];
        match t {
            Term::Pin(q) => n.pins[q],
            Term::Local(i) => n.first + i as u32,
        }
    }

    pub fn depth_of(&self, e: u32) -> u32 {
        self.nodes[self.owner[e as usize] as usize].depth
    }

    pub fn local_of(&self, e: u32) -> usize {
        (e - self.nodes[self.owner[e as usize] as usize].first) as usize
    }

    /// Call names from the window root down to `node`.
    pub fn path<'h>(&self, h: &'h Hier, node: u32) -> Vec<&'h str> {
        let mut out = Vec::new();
        let mut n = node;
        while self.nodes[n as usize].parent != NONE {
            let node = &self.nodes[n as usize];
            let parent = &self.nodes[node.parent as usize];
            out.push(h.cells[parent.cell].calls[node.call as usize].name.as_str());
            n = node.parent;
        }
        out.reverse();
        out
    }

    /// Address of an element relative to the window root.
    pub fn label(&self, h: &Hier, e: u32) -> String {
        let node = self.owner[e as usize];
        let mut s = String::new();
        for p in self.path(h, node) {
            s.push_str(p);
            s.push('/');
        }
        s.push_str(&h.cells[self.nodes[node as usize].cell].locals[self.local_of(e)]);
        s
    }

    /// Walks the window along a call path given as call indices.
    pub fn descend(&self, from: u32, calls: impl IntoIterator<Item = usize>) -> Option<u32> {
        let mut n = from;
        for j in calls {
            let c = *self.nodes[n as usize].children.get(j)?;
            if c == NONE {
                return None;
            }
            n = c;
        }
        Some(n)
    }

    pub fn nodes_at_depth(&self, d: u32) -> impl Iterator<Item = u32> + '_ {
        self.nodes
            .iter()
            .enumerate()
            .filter(move |(_, n)| n.depth == d)
            .map(|(i, _)| i as u32)
    }

    /// Pairs of elements `(in self below node, in other below its root)` that
    /// correspond to the same relative position, for relative depth `< depth`.
    /// Both windows must describe the same cell at the paired roots.
    pub fn paired_elements(&self, node: u32, other: &Window, depth: u32) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        if other.nodes.is_empty() {
            return out;
        }
        let mut stack = vec![(node, 0u32, 0u32)];
        while let Some((a, b, rel)) = stack.pop() {
            let na = &self.nodes[a as usize];
            let nb = &other.nodes[b as usize];
            debug_assert_eq!(na.cell, nb.cell);
            let locals = other.local_count(b);
            for i in 0..locals {
                out.push((na.first + i, nb.first + i));
            }
            if rel + 1 < depth {
                for (&ca, &cb) in na.children.iter().zip(&nb.children).rev() {
                    if ca != NONE && cb != NONE {
                        stack.push((ca, cb, rel + 1));
                    }
                }
            }
        }
        out
    }

    fn local_count(&self, node: u32) -> u32 {
        let n = node as usize;
        let end = self
            .nodes
            .get(n + 1)
            .map_or(self.owner.len() as u32, |next| next.first);
        // Preorder numbering: a node's locals end where the next node's begin.
        end - self.nodes[n].first
    }
}
