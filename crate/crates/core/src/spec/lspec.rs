use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use super::lex::{is_ident, lines, Line, ParseError};

/// A vertex of a cell as referenced by edges and bindings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Endpoint {
    /// Pin number, 1-based.
    Pin(usize),
    /// Index into the cell's explicit vertices.
    Vertex(usize),
    /// Index into the cell's nonterminals. Only ever valid as data to report.
    Nonterminal(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nonterminal {
    pub name: String,
    /// 0-based index of the callee cell.
    pub callee: usize,
    /// `(pin of the callee, terminal of this cell)` in declaration order.
    pub binds: Vec<(usize, Endpoint)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub name: String,
    pub pins: usize,
    pub vertices: Vec<String>,
    pub nonterminals: Vec<Nonterminal>,
    pub edges: Vec<(Endpoint, Endpoint)>,
}

impl Cell {
    pub fn new(name: impl Into<String>, pins: usize) -> Self {
        Cell {
            name: name.into(),
            pins,
            vertices: Vec::new(),
            nonterminals: Vec::new(),
            edges: Vec::new(),
        }
    }

    /// n_i: pins, explicit vertices and nonterminals.
    pub fn vertex_count(&self) -> usize {
        self.pins + self.vertices.len() + self.nonterminals.len()
    }

    /// m_i: explicit edges plus the edges at nonterminals.
    pub fn edge_count(&self) -> usize {
        self.edges.len() + self.nonterminals.iter().map(|n| n.binds.len()).sum::<usize>()
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == name)
    }

    pub fn nonterminal_index(&self, name: &str) -> Option<usize> {
        self.nonterminals.iter().position(|n| n.name == name)
    }

    pub fn endpoint_name(&self, e: Endpoint) -> String {
        match e {
            Endpoint::Pin(k) => format!("pin:{k}"),
            Endpoint::Vertex(i) => self.vertices[i].clone(),
            Endpoint::Nonterminal(i) => self.nonterminals[i].name.clone(),
        }
    }
}

/// A hierarchical specification: cells in dependency order, the last one on top.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LSpec {
    pub name: String,
    pub cells: Vec<Cell>,
}

impl LSpec {
    /// N: sum of the cells' vertex counts.
    pub fn vertex_number(&self) -> usize {
        self.cells.iter().map(Cell::vertex_count).sum()
    }

    /// M: sum of the cells' edge counts.
    pub fn edge_number(&self) -> usize {
        self.cells.iter().map(Cell::edge_count).sum()
    }

    pub fn size(&self) -> usize {
        self.vertex_number() + self.edge_number()
    }

    pub fn cell_index(&self, name: &str) -> Option<usize> {
        self.cells.iter().position(|c| c.name == name)
    }

    pub fn top(&self) -> usize {
        self.cells.len() - 1
    }
}

impl FromStr for LSpec {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_lspec(s)
    }
}

pub fn parse_lspec(text: &str) -> Result<LSpec, ParseError> {
    let ls = lines(text);
    if ls.is_empty() {
        return Err(ParseError::whole("no cells"));
    }
    let header = &ls[0];
    if header.keyword() != "lspec" {
        return Err(header.err_at(0, "expected `lspec <name>` header"));
    }
    header.expect_len(2, "lspec <name>")?;
    let name = header.ident(1)?.to_string();

    // First pass: cell names, so that later references can be told apart
    // from forward references.
    let mut cell_pos: HashMap<&str, usize> = HashMap::new();
    let mut count = 0;
    for l in &ls[1..] {
        if l.keyword() == "cell" && l.tokens.len() >= 2 {
            let n = l.ident(1)?;
            if cell_pos.insert(n, count).is_some() {
                return Err(l.err_at(1, format!("duplicate cell `{n}`")));
            }
            count += 1;
        }
    }
    if count == 0 {
        return Err(ParseError::whole("no cells"));
    }

    let mut cells: Vec<Cell> = Vec::new();
    let mut block: Vec<&Line<'_>> = Vec::new();
    let mut head: Option<&Line<'_>> = None;
    for l in &ls[1..] {
        if l.keyword() == "cell" {
            if let Some(h) = head {
                cells.push(parse_cell(h, &block, &cell_pos, cells.len())?);
            }
            head = Some(l);
            block.clear();
        } else if head.is_none() {
            return Err(l.err_at(0, "statement outside of a cell"));
        } else {
            block.push(l);
        }
    }
    if let Some(h) = head {
        cells.push(parse_cell(h, &block, &cell_pos, cells.len())?);
    }
    Ok(LSpec { name, cells })
}

fn parse_cell(
    head: &Line<'_>,
    body: &[&Line<'_>],
    cell_pos: &HashMap<&str, usize>,
    index: usize,
) -> Result<Cell, ParseError> {
    head.expect_len(4, "cell <name> pins <p>")?;
    let name = head.ident(1)?;
    if head.tokens[2].text != "pins" {
        return Err(head.err_at(2, "expected `pins`"));
    }
    let pins: usize = head.tokens[3]
        .text
        .parse()
        .map_err(|_| head.err_at(3, "pin count must be a non-negative integer"))?;
    let mut cell = Cell::new(name, pins);

    // Names of explicit vertices and nonterminals share one namespace.
    let mut names: HashMap<&str, Endpoint> = HashMap::new();
    for l in body {
        match l.keyword() {
            "vertex" => {
                l.expect_len(2, "vertex <name>")?;
                let v = l.ident(1)?;
                if names.insert(v, Endpoint::Vertex(cell.vertices.len())).is_some() {
                    return Err(l.err_at(1, format!("duplicate name `{v}`")));
                }
                cell.vertices.push(v.to_string());
            }
            "nonterm" => {
                l.expect_len(4, "nonterm <name> type <cell>")?;
                let nt = l.ident(1)?;
                if l.tokens[2].text != "type" {
                    return Err(l.err_at(2, "expected `type`"));
                }
                let ty = l.ident(3)?;
                let callee = match cell_pos.get(ty) {
                    None => return Err(l.err_at(3, format!("undefined cell `{ty}`"))),
                    Some(&c) if c >= index => {
                        return Err(l.err_at(3, format!("forward reference to cell `{ty}`")))
                    }
                    Some(&c) => c,
                };
                if names
                    .insert(nt, Endpoint::Nonterminal(cell.nonterminals.len()))
                    .is_some()
                {
                    return Err(l.err_at(1, format!("duplicate name `{nt}`")));
                }
                cell.nonterminals.push(Nonterminal {
                    name: nt.to_string(),
                    callee,
                    binds: Vec::new(),
                });
            }
            "edge" | "bind" => {}
            other => return Err(l.err_at(0, format!("unknown statement `{other}`"))),
        }
    }

    let resolve = |l: &Line<'_>, tok: usize| -> Result<Endpoint, ParseError> {
        let t = l.tokens[tok].text;
        if let Some(k) = t.strip_prefix("pin:") {
            let k: usize = k
                .parse()
                .map_err(|_| l.err_at(tok, format!("invalid pin `{t}`")))?;
            if k == 0 || k > pins {
                return Err(l.err_at(tok, format!("pin {k} out of range 1..{pins}")));
            }
            Ok(Endpoint::Pin(k))
        } else if !is_ident(t) {
            Err(l.err_at(tok, format!("invalid identifier `{t}`")))
        } else {
            names
                .get(t)
                .copied()
                .ok_or_else(|| l.err_at(tok, format!("unknown vertex `{t}`")))
        }
    };

    for l in body {
        match l.keyword() {
            "edge" => {
                l.expect_len(3, "edge <t1> <t2>")?;
                let a = resolve(l, 1)?;
                let b = resolve(l, 2)?;
                if cell
                    .edges
                    .iter()
                    .any(|&(x, y)| (x == a && y == b) || (x == b && y == a))
                {
                    return Err(l.err_at(1, "duplicate edge"));
                }
                cell.edges.push((a, b));
            }
            "bind" => {
                l.expect_len(4, "bind <nonterm> <k> <terminal>")?;
                let nt = l.ident(1)?;
                let idx = cell
                    .nonterminal_index(nt)
                    .ok_or_else(|| l.err_at(1, format!("unknown nonterminal `{nt}`")))?;
                let k: usize = l.tokens[2]
                    .text
                    .parse()
                    .map_err(|_| l.err_at(2, "pin number must be a positive integer"))?;
                if k == 0 {
                    return Err(l.err_at(2, "pin numbers start at 1"));
                }
                let t = resolve(l, 3)?;
                let binds = &mut cell.nonterminals[idx].binds;
                if binds.iter().any(|&(q, _)| q == k) {
                    return Err(l.err_at(2, format!("pin {k} of `{nt}` bound twice")));
                }
                binds.push((k, t));
            }
            _ => {}
        }
    }
    Ok(cell)
}

impl fmt::Display for LSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "lspec {}", self.name)?;
        for cell in &self.cells {
            writeln!(f, "cell {} pins {}", cell.name, cell.pins)?;
            for v in &cell.vertices {
                writeln!(f, "  vertex {v}")?;
            }
            for nt in &cell.nonterminals {
                writeln!(f, "  nonterm {} type {}", nt.name, self.cells[nt.callee].name)?;
            }
            for &(a, b) in &cell.edges {
                writeln!(f, "  edge {} {}", cell.endpoint_name(a), cell.endpoint_name(b))?;
            }
            for nt in &cell.nonterminals {
                for &(k, t) in &nt.binds {
                    writeln!(f, "  bind {} {} {}", nt.name, k, cell.endpoint_name(t))?;
                }
            }
        }
        Ok(())
    }
}

/// A vertex of an expansion named by the nonterminal path from the top cell.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexAddress {
    pub path: Vec<String>,
    pub vertex: String,
}

impl VertexAddress {
    pub fn new(path: Vec<String>, vertex: impl Into<String>) -> Self {
        VertexAddress {
            path,
            vertex: vertex.into(),
        }
    }

    pub fn depth(&self) -> usize {
        self.path.len()
    }
}

impl fmt::Display for VertexAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.path {
            write!(f, "{p}/")?;
        }
        write!(f, "{}", self.vertex)
    }
}

impl FromStr for VertexAddress {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut parts: Vec<String> = s.split('/').map(str::to_string).collect();
        if let Some(bad) = parts.iter().find(|p| !is_ident(p)) {
            return Err(format!("invalid address component `{bad}` in `{s}`"));
        }
        let vertex = parts.pop().unwrap_or_default();
        Ok(VertexAddress {
            path: parts,
            vertex,
        })
    }
}
