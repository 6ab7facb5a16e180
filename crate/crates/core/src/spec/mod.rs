//! Specification documents: types, parsers, serializers and validation.

mod formula;
mod fpn;
mod lex;
mod lspec;
mod validate;

pub use formula::{
    parse_fpn_formula, parse_lformula, parse_sformula, BoolRelation, FCall, FCell, FClause, FVar,
    FpnFormula, LFormula, Literal, SClause, SFormula,
};
pub use fpn::{parse_fpn, FpnEdge, FpnSpec};
pub use lex::{is_ident, parse_big, ParseError};
pub use lspec::{parse_lspec, Cell, Endpoint, LSpec, Nonterminal, VertexAddress};
pub use validate::{validate_lspec, ValidationReport, Violation, ViolationKind};

/// The kind of document, told apart by its header keyword.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DocumentKind {
    LSpec,
    Fpn,
    SFormula,
    LFormula,
    FpnFormula,
}

pub fn detect_kind(text: &str) -> Option<DocumentKind> {
    let first = lex::lines(text).into_iter().next()?;
    match first.keyword() {
        "lspec" => Some(DocumentKind::LSpec),
        "fpn" => Some(DocumentKind::Fpn),
        "sformula" | "relation" | "clause" | "var" => Some(DocumentKind::SFormula),
        "lformula" => Some(DocumentKind::LFormula),
        "fpncnf" => Some(DocumentKind::FpnFormula),
        _ => None,
    }
}
