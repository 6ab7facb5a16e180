use std::collections::HashSet;
use std::fmt;

use super::lspec::{Endpoint, LSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ViolationKind {
    NoCells,
    DuplicateName,
    TypeOrder,
    PinDegreeMismatch,
    NonDistinctBinding,
    NonterminalAdjacency,
    BadPinReference,
    SelfLoop,
    DuplicateEdge,
    PinPinEdge,
    TopCellHasPins,
    RedundantCell,
}

impl ViolationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationKind::NoCells => "no cells",
            ViolationKind::DuplicateName => "duplicate name",
            ViolationKind::TypeOrder => "type order",
            ViolationKind::PinDegreeMismatch => "pin-degree mismatch",
            ViolationKind::NonDistinctBinding => "non-distinct binding",
            ViolationKind::NonterminalAdjacency => "nonterminal adjacency",
            ViolationKind::BadPinReference => "bad pin reference",
            ViolationKind::SelfLoop => "self-loop",
            ViolationKind::DuplicateEdge => "duplicate edge",
            ViolationKind::PinPinEdge => "pin-pin edge",
            ViolationKind::TopCellHasPins => "top cell has pins",
            ViolationKind::RedundantCell => "redundant cell",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    /// Name of the offending cell, if the violation is local to one.
    pub cell: Option<String>,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.cell {
            Some(c) => write!(f, "{} in cell {}: {}", self.kind.as_str(), c, self.detail),
            None => write!(f, "{}: {}", self.kind.as_str(), self.detail),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

pub fn validate_lspec(spec: &LSpec) -> ValidationReport {
    let mut out = Vec::new();
    let mut push = |kind, cell: Option<&str>, detail: String| {
        out.push(Violation {
            kind,
            cell: cell.map(str::to_string),
            detail,
        })
    };
    if spec.cells.is_empty() {
        push(ViolationKind::NoCells, None, "specification has no cells".into());
        return ValidationReport { violations: out };
    }

    let mut seen = HashSet::new();
    for c in &spec.cells {
        if !seen.insert(c.name.as_str()) {
            push(ViolationKind::DuplicateName, None, format!("cell `{}` declared twice", c.name));
        }
    }

    let mut called = vec![false; spec.cells.len()];
    for (ci, cell) in spec.cells.iter().enumerate() {
        let here = Some(cell.name.as_str());
        let mut local = HashSet::new();
        for n in cell
            .vertices
            .iter()
            .chain(cell.nonterminals.iter().map(|n| &n.name))
        {
            if !local.insert(n.as_str()) {
                push(ViolationKind::DuplicateName, here, format!("`{n}` declared twice"));
            }
        }

        let pin_ok = |e: Endpoint| match e {
            Endpoint::Pin(k) => k >= 1 && k <= cell.pins,
            Endpoint::Vertex(i) => i < cell.vertices.len(),
            Endpoint::Nonterminal(i) => i < cell.nonterminals.len(),
        };

        for nt in &cell.nonterminals {
            if nt.callee >= ci || nt.callee >= spec.cells.len() {
                push(
                    ViolationKind::TypeOrder,
                    here,
                    format!("nonterminal `{}` has type index {} not below {}", nt.name, nt.callee + 1, ci + 1),
                );
                continue;
            }
            called[nt.callee] = true;
            let callee = &spec.cells[nt.callee];
            let mut pins: Vec<usize> = nt.binds.iter().map(|&(k, _)| k).collect();
            pins.sort_unstable();
            if pins != (1..=callee.pins).collect::<Vec<_>>() {
                push(
                    ViolationKind::PinDegreeMismatch,
                    here,
                    format!(
                        "nonterminal `{}` of type {} ({} pins) has bindings for pins {:?}",
                        nt.name, callee.name, callee.pins, pins
                    ),
                );
            }
            let mut targets = HashSet::new();
            for &(k, t) in &nt.binds {
                if !pin_ok(t) {
                    push(ViolationKind::BadPinReference, here, format!("binding {} {k} refers to a missing terminal", nt.name));
                    continue;
                }
                if let Endpoint::Nonterminal(_) = t {
                    push(
                        ViolationKind::NonterminalAdjacency,
                        here,
                        format!("nonterminal `{}` is bound to nonterminal `{}`", nt.name, cell.endpoint_name(t)),
                    );
                }
                if !targets.insert(t) {
                    push(
                        ViolationKind::NonDistinctBinding,
                        here,
                        format!("nonterminal `{}` binds two pins to `{}`", nt.name, cell.endpoint_name(t)),
                    );
                }
            }
        }

        let mut edges = HashSet::new();
        for &(a, b) in &cell.edges {
            if !pin_ok(a) || !pin_ok(b) {
                push(ViolationKind::BadPinReference, here, "edge refers to a missing terminal".into());
                continue;
            }
            let shown = format!("{}-{}", cell.endpoint_name(a), cell.endpoint_name(b));
            if a == b {
                push(ViolationKind::SelfLoop, here, format!("edge {shown}"));
            }
            if !edges.insert((a.min(b), a.max(b))) {
                push(ViolationKind::DuplicateEdge, here, format!("edge {shown}"));
            }
            if matches!(a, Endpoint::Pin(_)) && matches!(b, Endpoint::Pin(_)) && a != b {
                push(ViolationKind::PinPinEdge, here, format!("edge {shown}"));
            }
            if matches!(a, Endpoint::Nonterminal(_)) || matches!(b, Endpoint::Nonterminal(_)) {
                push(
                    ViolationKind::NonterminalAdjacency,
                    here,
                    format!("edge {shown} touches a nonterminal; use `bind`"),
                );
            }
        }
    }

    let top = spec.cells.last().unwrap();
    if top.pins != 0 {
        push(
            ViolationKind::TopCellHasPins,
            Some(top.name.as_str()),
            format!("top cell has {} pins", top.pins),
        );
    }
    for (ci, c) in spec.cells.iter().enumerate().take(spec.cells.len() - 1) {
        if !called[ci] {
            push(
                ViolationKind::RedundantCell,
                Some(c.name.as_str()),
                "no later cell uses it as a nonterminal type".into(),
            );
        }
    }
    ValidationReport { violations: out }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::lspec::{parse_lspec, Cell, Nonterminal};

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

    fn tri() -> LSpec {
        parse_lspec(TRI).unwrap()
    }

    #[test]
    fn tri_is_valid() {
        let r = validate_lspec(&tri());
        assert!(r.is_valid(), "{r}");
    }

    #[test]
    fn missing_binding_is_pin_degree_mismatch() {
        let doc = TRI.replace("  bind X 2 v\n", "");
        let r = validate_lspec(&parse_lspec(&doc).unwrap());
        assert!(r.has(ViolationKind::PinDegreeMismatch), "{r}");
    }

    #[test]
    fn pin_pin_edge() {
        let doc = TRI.replace("  edge a pin:2\n", "  edge a pin:2\n  edge pin:1 pin:2\n");
        let r = validate_lspec(&parse_lspec(&doc).unwrap());
        assert!(r.has(ViolationKind::PinPinEdge), "{r}");
    }

    #[test]
    fn self_loop_and_duplicate_edge() {
        let mut s = tri();
        s.cells[1].edges.push((Endpoint::Vertex(0), Endpoint::Vertex(0)));
        s.cells[1].edges.push((Endpoint::Vertex(1), Endpoint::Vertex(0)));
        let r = validate_lspec(&s);
        assert!(r.has(ViolationKind::SelfLoop));
        assert!(r.has(ViolationKind::DuplicateEdge));
    }

    #[test]
    fn top_cell_pins_and_redundancy() {
        let doc = TRI.replace("cell G2 pins 0", "cell G2 pins 1");
        let r = validate_lspec(&parse_lspec(&doc).unwrap());
        assert!(r.has(ViolationKind::TopCellHasPins));

        let doc = TRI.replace("lspec tri\n", "lspec tri\ncell Unused pins 0\n  vertex q\n");
        let r = validate_lspec(&parse_lspec(&doc).unwrap());
        assert!(r.has(ViolationKind::RedundantCell));
    }

    #[test]
    fn type_order_and_duplicates() {
        let mut s = tri();
        s.cells[0].nonterminals.push(Nonterminal {
            name: "Z".into(),
            callee: 1,
            binds: vec![],
        });
        s.cells.push(Cell::new("G1", 0));
        let r = validate_lspec(&s);
        assert!(r.has(ViolationKind::TypeOrder));
        assert!(r.has(ViolationKind::DuplicateName));
    }

    #[test]
    fn bindings_must_be_distinct_terminals() {
        let doc = TRI.replace("bind X 2 v", "bind X 2 u");
        let r = validate_lspec(&parse_lspec(&doc).unwrap());
        assert!(r.has(ViolationKind::NonDistinctBinding));

        let mut s = tri();
        s.cells[1].nonterminals[0].binds[1].1 = Endpoint::Nonterminal(0);
        assert!(validate_lspec(&s).has(ViolationKind::NonterminalAdjacency));
        let mut s = tri();
        s.cells[1].edges.push((Endpoint::Nonterminal(0), Endpoint::Vertex(0)));
        assert!(validate_lspec(&s).has(ViolationKind::NonterminalAdjacency));
    }

    #[test]
    fn bad_pin_reference() {
        let mut s = tri();
        s.cells[0].edges.push((Endpoint::Pin(3), Endpoint::Vertex(0)));
        assert!(validate_lspec(&s).has(ViolationKind::BadPinReference));
    }

    #[test]
    fn no_cells() {
        let s = LSpec {
            name: "e".into(),
            cells: vec![],
        };
        assert!(validate_lspec(&s).has(ViolationKind::NoCells));
    }
}
