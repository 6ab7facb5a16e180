//! Access to scheme results without expanding: size, membership queries,
//! streaming and a hierarchical specification of the solution itself.
//!
//! A hierarchy node inherits a set of piece contexts from its parent: the
//! top piece and every memo piece whose window reaches it. Membership of a
//! local is the OR over those contexts. Nodes with the same context set
//! have the same solution below them, which is what keeps size and
//! construction proportional to the succinct input.

use std::collections::HashMap;
use std::io;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::schemes::{ApproxSolution, FpnSolution, HierSolution, Repr};
use crate::solvers::Problem;
use crate::spec::{Cell, LSpec, Nonterminal, VertexAddress};

/// `(piece, window node)` pairs; the relative depth is the node's depth.
type State = Vec<(usize, u32)>;

impl HierSolution {
    fn root_state(&self) -> State {
        vec![(self.top, 0)]
    }

    /// Context set of the child reached through call `j`.
    fn step(&self, state: &State, j: usize) -> State {
        let mut out = State::new();
        let mut callee = None;
        for &(p, n) in state {
            let piece = &self.pieces[p];
            let node = &piece.window.nodes[n as usize];
            let rel = node.depth + 1;
            let c = node.children[j];
            if c != crate::hier::NONE {
                out.push((p, c));
            }
            if rel == piece.layout.child_at {
                callee = Some(self.hier.cells[node.cell].calls[j].callee);
            }
        }
        if let Some(c) = callee {
            let m = self.memo[c].expect("memo piece for every reachable cell");
            out.push((m, 0));
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    fn member(&self, state: &State, local: usize) -> bool {
        state.iter().any(|&(p, n)| {
            let piece = &self.pieces[p];
            piece.chosen[(piece.window.nodes[n as usize].first as usize) + local]
        })
    }

    fn cell_of(&self, state: &State) -> usize {
        let (p, n) = state[0];
        self.pieces[p].window.nodes[n as usize].cell
    }
}

/// Distinct context sets reachable from the top, children before parents.
struct Dag {
    cells: Vec<usize>,
    members: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
    count: Vec<BigUint>,
    root: usize,
}

impl Dag {
    fn build(s: &HierSolution) -> Dag {
        let mut index: HashMap<State, usize> = HashMap::new();
        let mut states: Vec<State> = Vec::new();
        let root = s.root_state();
        index.insert(root.clone(), 0);
        states.push(root);
        let mut children: Vec<Vec<usize>> = Vec::new();
        let mut i = 0;
        while i < states.len() {
            let cell = s.cell_of(&states[i]);
            let mut kids = Vec::new();
            for j in 0..s.hier.cells[cell].calls.len() {
                let next = s.step(&states[i], j);
                let id = match index.get(&next) {
                    Some(&id) => id,
                    None => {
                        index.insert(next.clone(), states.len());
                        states.push(next);
                        states.len() - 1
                    }
                };
                kids.push(id);
            }
            children.push(kids);
            i += 1;
        }
        let cells: Vec<usize> = states.iter().map(|st| s.cell_of(st)).collect();
        let members: Vec<Vec<usize>> = states
            .iter()
            .zip(&cells)
            .map(|(st, &c)| (0..s.hier.cells[c].locals.len()).filter(|&v| s.member(st, v)).collect())
            .collect();
        // Callees have smaller cell indices than callers.
        let mut order: Vec<usize> = (0..states.len()).collect();
        order.sort_by_key(|&i| cells[i]);
        let mut count = vec![BigUint::zero(); states.len()];
        for &i in &order {
            let mut c = BigUint::from(members[i].len());
            for &k in &children[i] {
                c += &count[k];
            }
            count[i] = c;
        }
        Dag {
            cells,
            members,
            children,
            count,
            root: 0,
        }
    }
}

impl FpnSolution {
    fn member(&self, v: usize, p: &BigUint) -> bool {
        let nv = self.names.len();
        self.segments.iter().any(|seg| {
            if p < &seg.start {
                return false;
            }
            let off = p - &seg.start;
            let piece = &self.pieces[seg.piece];
            let len = BigUint::from(piece.len);
            let chosen = |r: &BigUint| {
                let r: u64 = r.try_into().expect("below piece length");
                piece.chosen[r as usize * nv + v]
            };
            if seg.stride.is_zero() {
                return !seg.count.is_zero() && off < len && chosen(&off);
            }
            // Overlapping copies (stride below the length) share positions;
            // the position is in the set if any copy covering it chose it.
            let mut r = &off % &seg.stride;
            while r < len && r <= off {
                let t = (&off - &r) / &seg.stride;
                if t < seg.count && chosen(&r) {
                    return true;
                }
                r += &seg.stride;
            }
            false
        })
    }
}

/// Number of vertices in the solution set (the cover, the independent set,
/// side 1 of the cut, or the true variables).
pub fn solution_size(sol: &ApproxSolution) -> BigUint {
    match &sol.repr {
        Repr::Hier(s) => {
            let dag = Dag::build(s);
            dag.count[dag.root].clone()
        }
        Repr::Fpn(s) => match sol.problem {
            Problem::Mis | Problem::Vc => sol.total_value.clone(),
            Problem::MaxCut | Problem::MaxSat => s
                .segments
                .iter()
                .map(|seg| &seg.count * BigUint::from(s.pieces[seg.piece].chosen.iter().filter(|&&b| b).count()))
                .sum(),
        },
    }
}

/// Whether the vertex (or variable) at `addr` is in the solution set.
/// Periodic solutions take a single component `name@position`.
pub fn query(sol: &ApproxSolution, addr: &VertexAddress) -> Result<bool> {
    let bad = |reason: String| Error::Address {
        addr: addr.to_string(),
        reason,
    };
    match &sol.repr {
        Repr::Hier(s) => {
            let mut state = s.root_state();
            let mut c = s.hier.top();
            for step in &addr.path {
                let j = s.hier.cells[c]
                    .call(step)
                    .ok_or_else(|| bad(format!("cell {} has no nonterminal `{step}`", s.hier.cells[c].name)))?;
                state = s.step(&state, j);
                c = s.hier.cells[c].calls[j].callee;
            }
            let v = s.hier.cells[c]
                .local(&addr.vertex)
                .ok_or_else(|| bad(format!("cell {} has no explicit vertex `{}`", s.hier.cells[c].name, addr.vertex)))?;
            Ok(s.member(&state, v))
        }
        Repr::Fpn(_) => {
            if !addr.path.is_empty() {
                return Err(bad("periodic addresses have the form name@position".into()));
            }
            let (name, p) = addr
                .vertex
                .split_once('@')
                .ok_or_else(|| bad("periodic addresses have the form name@position".into()))?;
            let p: BigUint = p.parse().map_err(|_| bad(format!("invalid position `{p}`")))?;
            query_fpn(sol, name, &p)
        }
    }
}

/// Membership of `name@p` in a periodic solution.
pub fn query_fpn(sol: &ApproxSolution, name: &str, p: &BigUint) -> Result<bool> {
    let bad = |reason: String| Error::Address {
        addr: format!("{name}@{p}"),
        reason,
    };
    let Repr::Fpn(s) = &sol.repr else {
        return Err(bad("not a periodic solution".into()));
    };
    let v = s
        .names
        .iter()
        .position(|n| n == name)
        .ok_or_else(|| bad(format!("no vertex `{name}`")))?;
    if p > &s.m {
        return Err(bad(format!("position beyond m = {}", s.m)));
    }
    Ok(s.member(v, p))
}

/// Writes the addresses of the solution set to `sink`, one call per
/// vertex, in preorder of the hierarchy tree (position order for periodic
/// solutions). Stops after `cap` vertices. Memory is proportional to the
/// hierarchy depth, not to the output.
pub fn stream_solution(
    sol: &ApproxSolution,
    cap: Option<u64>,
    mut sink: impl FnMut(&str) -> io::Result<()>,
) -> io::Result<u64> {
    let cap = cap.unwrap_or(u64::MAX);
    let mut emitted = 0u64;
    if cap == 0 {
        return Ok(0);
    }
    match &sol.repr {
        Repr::Hier(s) => {
            let dag = Dag::build(s);
            let mut prefix = String::new();
            // (state, next call, prefix length before this node's name)
            let mut stack: Vec<(usize, usize, usize)> = vec![(dag.root, 0, 0)];
            emit_locals(s, &dag, dag.root, &mut prefix, &mut emitted, cap, &mut sink)?;
            while let Some(top) = stack.last_mut() {
                if emitted >= cap {
                    break;
                }
                let (st, j, len) = *top;
                if j == dag.children[st].len() {
                    prefix.truncate(len);
                    stack.pop();
                    continue;
                }
                top.1 += 1;
                let child = dag.children[st][j];
                if dag.count[child].is_zero() {
                    continue;
                }
                let before = prefix.len();
                prefix.push_str(&s.hier.cells[dag.cells[st]].calls[j].name);
                prefix.push('/');
                emit_locals(s, &dag, child, &mut prefix, &mut emitted, cap, &mut sink)?;
                stack.push((child, 0, before));
            }
        }
        Repr::Fpn(s) => {
            let mut p = BigUint::zero();
            while p <= s.m && emitted < cap {
                for (v, name) in s.names.iter().enumerate() {
                    if emitted < cap && s.member(v, &p) {
                        sink(&format!("{name}@{p}"))?;
                        emitted += 1;
                    }
                }
                p += BigUint::one();
            }
        }
    }
    Ok(emitted)
}

fn emit_locals(
    s: &HierSolution,
    dag: &Dag,
    st: usize,
    prefix: &mut String,
    emitted: &mut u64,
    cap: u64,
    sink: &mut impl FnMut(&str) -> io::Result<()>,
) -> io::Result<()> {
    let cell = &s.hier.cells[dag.cells[st]];
    for &v in &dag.members[st] {
        if *emitted >= cap {
            break;
        }
        let len = prefix.len();
        prefix.push_str(&cell.locals[v]);
        sink(prefix)?;
        prefix.truncate(len);
        *emitted += 1;
    }
    Ok(())
}

/// An edgeless L-spec whose expansion is exactly the solution set, with
/// the same vertex addresses. One cell `H_<cell>` per distinct context set
/// (suffixed `_2`, `_3`, ... when a cell needs several); subtrees without
/// solution vertices are pruned.
pub fn emit_solution_lspec(sol: &ApproxSolution) -> Result<LSpec> {
    let Repr::Hier(s) = &sol.repr else {
        return Err(Error::Unsupported(
            "solution specifications are only produced for hierarchical inputs".into(),
        ));
    };
    let dag = Dag::build(s);
    let mut order: Vec<usize> = (0..dag.cells.len())
        .filter(|&i| i == dag.root || !dag.count[i].is_zero())
        .collect();
    order.sort_by_key(|&i| (dag.cells[i], i));
    let mut used: HashMap<usize, usize> = HashMap::new();
    let mut position: HashMap<usize, usize> = HashMap::new();
    let mut cells = Vec::new();
    for &i in order.iter().filter(|&&i| i != dag.root).chain(std::iter::once(&dag.root)) {
        let hc = &s.hier.cells[dag.cells[i]];
        let n = used.entry(dag.cells[i]).or_insert(0);
        *n += 1;
        let name = if *n == 1 {
            format!("H_{}", hc.name)
        } else {
            format!("H_{}_{}", hc.name, n)
        };
        let mut cell = Cell::new(name, 0);
        cell.vertices = dag.members[i].iter().map(|&v| hc.locals[v].clone()).collect();
        for (j, &k) in dag.children[i].iter().enumerate() {
            if dag.count[k].is_zero() {
                continue;
            }
            cell.nonterminals.push(Nonterminal {
                name: hc.calls[j].name.clone(),
                callee: position[&k],
                binds: Vec::new(),
            });
        }
        position.insert(i, cells.len());
        cells.push(cell);
    }
    Ok(LSpec {
        name: format!("{}_sol", sol.source),
        cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expansion::expand;
    use crate::schemes::{fpn_mis, h_mis, h_vc, SchemeParams};
    use crate::solvers::ExactSolver;
    use crate::spec::{parse_fpn, parse_lspec, validate_lspec};

    const CHAIN: &str = "lspec chain
cell A pins 1
  vertex x
  vertex y
  edge pin:1 x
  edge x y
cell B pins 1
  vertex z
  edge pin:1 z
  nonterm P type A
  nonterm Q type A
  bind P 1 z
  bind Q 1 z
cell C pins 1
  vertex w
  edge pin:1 w
  nonterm R type B
  nonterm S type B
  bind R 1 w
  bind S 1 w
cell D pins 0
  vertex r
  nonterm T type C
  nonterm U type C
  bind T 1 r
  bind U 1 r
";

    fn streamed(sol: &ApproxSolution) -> Vec<String> {
        let mut out = Vec::new();
        stream_solution(sol, None, |s| {
            out.push(s.to_string());
            Ok(())
        })
        .unwrap();
        out
    }

    #[test]
    fn size_query_stream_and_emit_agree() {
        let spec = parse_lspec(CHAIN).unwrap();
        let base = ExactSolver::default();
        for l in 1..=3 {
            for vc in [false, true] {
                let p = SchemeParams::new(l);
                let sol = if vc { h_vc(&spec, &p, &base) } else { h_mis(&spec, &p, &base) }.unwrap();
                let names = streamed(&sol);
                assert_eq!(BigUint::from(names.len()), solution_size(&sol));
                assert_eq!(solution_size(&sol), sol.total_value);
                let g = expand(&spec, 10_000).unwrap();
                let chosen: Vec<usize> = g
                    .labels
                    .iter()
                    .enumerate()
                    .filter(|(_, lab)| query(&sol, &lab.parse().unwrap()).unwrap())
                    .map(|(i, _)| i)
                    .collect();
                assert_eq!(chosen.len(), names.len());
                if vc {
                    assert!(g.graph.is_vertex_cover(&chosen));
                } else {
                    assert!(g.graph.is_independent(&chosen));
                }
                let emitted = emit_solution_lspec(&sol).unwrap();
                assert!(validate_lspec(&emitted).is_valid());
                let mut labels = expand(&emitted, 10_000).unwrap().labels;
                let mut names = names.clone();
                labels.sort();
                names.sort();
                assert_eq!(labels, names);
            }
        }
    }

    #[test]
    fn stream_cap() {
        let spec = parse_lspec(CHAIN).unwrap();
        let sol = h_mis(&spec, &SchemeParams::new(1), &ExactSolver::default()).unwrap();
        let n = stream_solution(&sol, Some(2), |_| Ok(())).unwrap();
        assert_eq!(n, 2);
    }

    #[test]
    fn fpn_queries() {
        let s = parse_fpn("fpn m=9\nvertex v\nedge v v 1\n").unwrap();
        let sol = fpn_mis(&s, &SchemeParams::new(3), &ExactSolver::default()).unwrap();
        let names = streamed(&sol);
        assert_eq!(BigUint::from(names.len()), sol.total_value);
        for p in 0..9u32 {
            let a = query_fpn(&sol, "v", &p.into()).unwrap();
            let b = query_fpn(&sol, "v", &(p + 1).into()).unwrap();
            assert!(!(a && b));
        }
        assert!(query_fpn(&sol, "v", &10u32.into()).is_err());
        assert!(query(&sol, &"v@3".parse::<VertexAddress>().unwrap_or(VertexAddress::new(vec![], "v@3"))).is_ok());
        assert!(emit_solution_lspec(&sol).is_err());
    }
}
