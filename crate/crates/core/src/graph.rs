//! Plain undirected simple graphs with labeled vertices.

use std::collections::HashMap;
use std::fmt;

/// Undirected simple graph on vertices `0..n`. Adjacency lists are kept sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    m: usize,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); n],
            m: 0,
        }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut g = Graph::new(n);
        for (u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    pub fn add_vertex(&mut self) -> usize {
        self.adj.push(Vec::new());
        self.adj.len() - 1
    }

    /// Adds `{u, v}`. Returns false for self-loops and edges already present.
    pub fn add_edge(&mut self, u: usize, v: usize) -> bool {
        if u == v {
            return false;
        }
        match self.adj[u].binary_search(&v) {
            Ok(_) => false,
            Err(pos) => {
                self.adj[u].insert(pos, v);
                let pos = self.adj[v].binary_search(&u).unwrap_err();
                self.adj[v].insert(pos, u);
                self.m += 1;
                true
            }
        }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, ns)| ns.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    /// Subgraph induced by `keep`, plus the map from new to old indices.
    pub fn induced(&self, keep: &[usize]) -> (Graph, Vec<usize>) {
        let mut index = HashMap::with_capacity(keep.len());
        for (i, &v) in keep.iter().enumerate() {
            index.insert(v, i);
        }
        let mut g = Graph::new(keep.len());
        for (i, &v) in keep.iter().enumerate() {
            for w in &self.adj[v] {
                if let Some(&j) = index.get(w) {
                    if i < j {
                        g.add_edge(i, j);
                    }
                }
            }
        }
        (g, keep.to_vec())
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n()];
        let mut out = Vec::new();
        for s in 0..self.n() {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut i = 0;
            while i < comp.len() {
                let u = comp[i];
                i += 1;
                for &w in &self.adj[u] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_independent(&self, set: &[usize]) -> bool {
        let mut mark = vec![false; self.n()];
        for &v in set {
            mark[v] = true;
        }
        self.edges().all(|(u, v)| !(mark[u] && mark[v]))
    }

    pub fn is_vertex_cover(&self, set: &[usize]) -> bool {
        let mut mark = vec![false; self.n()];
        for &v in set {
            mark[v] = true;
        }
        self.edges().all(|(u, v)| mark[u] || mark[v])
    }

    pub fn cut_value(&self, side: &[bool]) -> usize {
        self.edges().filter(|&(u, v)| side[u] != side[v]).count()
    }
}

/// Where an [`ExpandedGraph`] came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Origin {
    LSpec { name: String },
    Fpn { m: String },
    Piece { description: String },
    EdgeList,
}

/// A concrete graph whose vertices carry address labels.
///
/// `levels[v]` is the hierarchy-tree depth of the owner of `v` for L-spec
/// expansions and the lattice position for FPN expansions.
#[derive(Clone, Debug)]
pub struct ExpandedGraph {
    pub labels: Vec<String>,
    pub levels: Vec<u64>,
    pub graph: Graph,
    pub origin: Origin,
    /// Number of parallel edges merged during construction.
    pub collapsed_edges: usize,
}

impl ExpandedGraph {
    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn m(&self) -> usize {
        self.graph.m()
    }

    pub fn index_of(&self) -> HashMap<&str, usize> {
        self.labels
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect()
    }

    /// The `v <label>` / `e <a> <b>` edge-list rendering.
    pub fn to_edge_list(&self) -> String {
        self.to_string()
    }

    /// Parses the edge-list rendering. Unknown endpoints are an error.
    pub fn parse_edge_list(text: &str) -> Result<ExpandedGraph, String> {
        let mut labels = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut edges = Vec::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            match parts.as_slice() {
                ["v", name] => {
                    if index.insert(name.to_string(), labels.len()).is_some() {
                        return Err(format!("line {}: duplicate vertex {name}", no + 1));
                    }
                    labels.push(name.to_string());
                }
                ["e", a, b] => {
                    let lookup = |s: &str| {
                        index
                            .get(s)
                            .copied()
                            .ok_or_else(|| format!("line {}: unknown vertex {s}", no + 1))
                    };
                    edges.push((lookup(a)?, lookup(b)?));
                }
                _ => return Err(format!("line {}: expected `v <name>` or `e <a> <b>`", no + 1)),
            }
        }
        let mut graph = Graph::new(labels.len());
        let mut collapsed = 0;
        for (u, v) in edges {
            if !graph.add_edge(u, v) {
                collapsed += 1;
            }
        }
        Ok(ExpandedGraph {
            levels: vec![0; labels.len()],
            labels,
            graph,
            origin: Origin::EdgeList,
            collapsed_edges: collapsed,
        })
    }
}

impl fmt::Display for ExpandedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.labels {
            writeln!(f, "v {l}")?;
        }
        for (u, v) in self.graph.edges() {
            writeln!(f, "e {} {}", self.labels[u], self.labels[v])?;
        }
        Ok(())
    }
}
