use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;

use super::lex::{lines, parse_m, ParseError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FpnEdge {
    pub from: usize,
    pub to: usize,
    pub offset: u64,
}

/// A static graph with non-negative edge offsets, unrolled over positions `0..=m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpnSpec {
    pub vertices: Vec<String>,
    pub edges: Vec<FpnEdge>,
    pub m: BigUint,
}

impl FpnSpec {
    /// The maximum edge offset.
    pub fn narrowness(&self) -> u64 {
        self.edges.iter().map(|e| e.offset).max().unwrap_or(0)
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == name)
    }
}

impl FromStr for FpnSpec {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_fpn(s)
    }
}

pub fn parse_fpn(text: &str) -> Result<FpnSpec, ParseError> {
    let ls = lines(text);
    let header = ls.first().ok_or_else(|| ParseError::whole("empty document"))?;
    if header.keyword() != "fpn" {
        return Err(header.err_at(0, "expected `fpn m=<int>` header"));
    }
    header.expect_len(2, "fpn m=<int>")?;
    let m = parse_m(header, 1)?;

    let mut index: HashMap<&str, usize> = HashMap::new();
    let mut spec = FpnSpec {
        vertices: Vec::new(),
        edges: Vec::new(),
        m,
    };
    for l in &ls[1..] {
        match l.keyword() {
            "vertex" => {
                l.expect_len(2, "vertex <name>")?;
                let v = l.ident(1)?;
                if index.insert(v, spec.vertices.len()).is_some() {
                    return Err(l.err_at(1, format!("duplicate vertex `{v}`")));
                }
                spec.vertices.push(v.to_string());
            }
            "edge" => {
                l.expect_len(4, "edge <u> <v> <offset>")?;
                let lookup = |tok: usize| {
                    let n = l.ident(tok)?;
                    index
                        .get(n)
                        .copied()
                        .ok_or_else(|| l.err_at(tok, format!("unknown vertex `{n}`")))
                };
                let from = lookup(1)?;
                let to = lookup(2)?;
                let t = l.tokens[3].text;
                if t.starts_with('-') {
                    return Err(l.err_at(3, "negative offset"));
                }
                let offset: u64 = t
                    .parse()
                    .map_err(|_| l.err_at(3, format!("invalid offset `{t}`")))?;
                if from == to && offset == 0 {
                    return Err(l.err_at(1, "self-loop with offset 0"));
                }
                let e = FpnEdge { from, to, offset };
                let mirrored = offset == 0 && spec.edges.contains(&FpnEdge { from: to, to: from, offset });
                if spec.edges.contains(&e) || mirrored {
                    return Err(l.err_at(1, "duplicate edge"));
                }
                spec.edges.push(e);
            }
            other => return Err(l.err_at(0, format!("unknown statement `{other}`"))),
        }
    }
    Ok(spec)
}

impl fmt::Display for FpnSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "fpn m={}", self.m)?;
        for v in &self.vertices {
            writeln!(f, "vertex {v}")?;
        }
        for e in &self.edges {
            writeln!(f, "edge {} {} {}", self.vertices[e.from], self.vertices[e.to], e.offset)?;
        }
        Ok(())
    }
}
