use std::collections::HashMap;
use std::fmt;

use num_bigint::BigUint;

use super::lex::{is_ident, lines, parse_application, Args, parse_ident_list, parse_m, Line, ParseError};

const MAX_ARITY: usize = 16;

/// A finite Boolean relation given by its satisfying tuples.
///
/// `table[x]` tells whether the tuple whose bits spell `x` (first argument in
/// the most significant position) satisfies the relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoolRelation {
    pub name: String,
    pub arity: usize,
    pub table: Vec<bool>,
}

impl BoolRelation {
    pub fn new(name: impl Into<String>, arity: usize, tuples: &[&str]) -> Self {
        let mut table = vec![false; 1 << arity];
        for t in tuples {
            table[usize::from_str_radix(t, 2).expect("bitstring")] = true;
        }
        BoolRelation {
            name: name.into(),
            arity,
            table,
        }
    }

    /// The disjunction of `arity` literals with the given polarities.
    pub fn clause(name: impl Into<String>, polarity: &[bool]) -> Self {
        let arity = polarity.len();
        let mut falsifying = 0;
        for (j, &pos) in polarity.iter().enumerate() {
            if !pos {
                falsifying |= 1 << (arity - 1 - j);
            }
        }
        let mut table = vec![true; 1 << arity];
        table[falsifying] = false;
        BoolRelation {
            name: name.into(),
            arity,
            table,
        }
    }

    pub fn satisfied_by(&self, values: impl IntoIterator<Item = bool>) -> bool {
        let mut x = 0;
        for b in values {
            x = (x << 1) | usize::from(b);
        }
        self.table[x]
    }

    pub fn tuples(&self) -> Vec<String> {
        (0..self.table.len())
            .filter(|&x| self.table[x])
            .map(|x| format!("{:0width$b}", x, width = self.arity))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SClause {
    pub relation: usize,
    pub vars: Vec<usize>,
}

/// A flat conjunction of relation applications to distinct variables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SFormula {
    pub relations: Vec<BoolRelation>,
    pub variables: Vec<String>,
    pub clauses: Vec<SClause>,
}

impl SFormula {
    pub fn satisfied(&self, c: &SClause, assignment: &[bool]) -> bool {
        self.relations[c.relation].satisfied_by(c.vars.iter().map(|&v| assignment[v]))
    }

    pub fn count_satisfied(&self, assignment: &[bool]) -> usize {
        self.clauses
            .iter()
            .filter(|c| self.satisfied(c, assignment))
            .count()
    }

    pub fn variable_index(&self) -> HashMap<&str, usize> {
        self.variables
            .iter()
            .enumerate()
            .map(|(i, v)| (v.as_str(), i))
            .collect()
    }
}

/// A variable of a formula cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FVar {
    Interface(usize),
    Local(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FClause {
    pub relation: usize,
    pub args: Vec<FVar>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FCall {
    /// `<Callee>_<ordinal>` within the calling cell.
    pub name: String,
    pub callee: usize,
    pub args: Vec<FVar>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FCell {
    pub name: String,
    pub interface: Vec<String>,
    pub locals: Vec<String>,
    pub clauses: Vec<FClause>,
    pub calls: Vec<FCall>,
}

impl FCell {
    pub fn var_name(&self, v: FVar) -> &str {
        match v {
            FVar::Interface(i) => &self.interface[i],
            FVar::Local(i) => &self.locals[i],
        }
    }
}

/// A hierarchical formula; the last cell has no interface variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LFormula {
    pub name: String,
    pub relations: Vec<BoolRelation>,
    pub cells: Vec<FCell>,
}

impl LFormula {
    /// Sum over cells of (clauses and calls) times (interface and local variables).
    pub fn size(&self) -> usize {
        self.cells
            .iter()
            .map(|c| (c.clauses.len() + c.calls.len()) * (c.interface.len() + c.locals.len()))
            .sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Literal {
    pub var: usize,
    pub offset: u64,
    pub positive: bool,
}

/// A periodic CNF: static clauses instantiated at every position `0..=m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpnFormula {
    pub variables: Vec<String>,
    pub clauses: Vec<Vec<Literal>>,
    pub m: BigUint,
}

impl FpnFormula {
    pub fn narrowness(&self) -> u64 {
        self.clauses
            .iter()
            .flatten()
            .map(|l| l.offset)
            .max()
            .unwrap_or(0)
    }
}

fn parse_relation(l: &Line<'_>) -> Result<BoolRelation, ParseError> {
    if l.tokens.len() < 5 {
        return Err(l.err_at(l.tokens.len(), "expected `relation <R> arity <p> tuples <bits,...>`"));
    }
    let name = l.ident(1)?;
    if l.tokens[2].text != "arity" {
        return Err(l.err_at(2, "expected `arity`"));
    }
    let arity: usize = l.tokens[3]
        .text
        .parse()
        .map_err(|_| l.err_at(3, "arity must be a positive integer"))?;
    if arity == 0 || arity > MAX_ARITY {
        return Err(l.err_at(3, format!("arity must be in 1..={MAX_ARITY}")));
    }
    if l.tokens[4].text != "tuples" {
        return Err(l.err_at(4, "expected `tuples`"));
    }
    let (rest, col) = l.rest_from(5);
    let mut table = vec![false; 1 << arity];
    if !rest.trim().is_empty() {
        let mut offset = 0;
        for part in rest.split(',') {
            let lead = part.len() - part.trim_start().len();
            let t = part.trim();
            let c = col + offset + lead;
            if t.len() != arity || !t.chars().all(|ch| ch == '0' || ch == '1') {
                return Err(l.err(c, format!("tuple `{t}` is not a bitstring of length {arity}")));
            }
            let x = usize::from_str_radix(t, 2).unwrap();
            if table[x] {
                return Err(l.err(c, format!("duplicate tuple `{t}`")));
            }
            table[x] = true;
            offset += part.len() + 1;
        }
    }
    Ok(BoolRelation {
        name: name.to_string(),
        arity,
        table,
    })
}

fn add_relation(
    l: &Line<'_>,
    relations: &mut Vec<BoolRelation>,
    index: &mut HashMap<String, usize>,
) -> Result<(), ParseError> {
    let r = parse_relation(l)?;
    if index.insert(r.name.clone(), relations.len()).is_some() {
        return Err(l.err_at(1, format!("duplicate relation `{}`", r.name)));
    }
    relations.push(r);
    Ok(())
}

fn write_relations(f: &mut fmt::Formatter<'_>, relations: &[BoolRelation]) -> fmt::Result {
    for r in relations {
        let tuples = r.tuples().join(",");
        if tuples.is_empty() {
            writeln!(f, "relation {} arity {} tuples", r.name, r.arity)?;
        } else {
            writeln!(f, "relation {} arity {} tuples {}", r.name, r.arity, tuples)?;
        }
    }
    Ok(())
}

/// Resolves `R(args)`: the relation and its argument names, with arity and
/// distinctness checked.
fn parse_clause_app<'a>(
    l: &Line<'a>,
    from: usize,
    relations: &[BoolRelation],
    index: &HashMap<String, usize>,
) -> Result<(usize, Args<'a>), ParseError> {
    let (text, col) = l.rest_from(from);
    let (name, args) = parse_application(l, text, col)?;
    let r = *index
        .get(name)
        .ok_or_else(|| l.err(col, format!("unknown relation `{name}`")))?;
    if args.len() != relations[r].arity {
        return Err(l.err(
            col,
            format!(
                "arity mismatch: `{name}` has arity {} but {} arguments were given",
                relations[r].arity,
                args.len()
            ),
        ));
    }
    check_distinct(l, &args)?;
    Ok((r, args))
}

fn check_distinct(l: &Line<'_>, args: &[(&str, usize)]) -> Result<(), ParseError> {
    for (i, (a, c)) in args.iter().enumerate() {
        if args[..i].iter().any(|(b, _)| b == a) {
            return Err(l.err(*c, format!("variable `{a}` repeated")));
        }
    }
    Ok(())
}

pub fn parse_sformula(text: &str) -> Result<SFormula, ParseError> {
    let ls = lines(text);
    let mut f = SFormula::default();
    let mut rel_index = HashMap::new();
    let mut var_index: HashMap<String, usize> = HashMap::new();
    let mut intern = |f: &mut SFormula, v: &str| -> usize {
        *var_index.entry(v.to_string()).or_insert_with(|| {
            f.variables.push(v.to_string());
            f.variables.len() - 1
        })
    };
    for (i, l) in ls.iter().enumerate() {
        match l.keyword() {
            "sformula" if i == 0 => l.expect_len(1, "sformula")?,
            "relation" => add_relation(l, &mut f.relations, &mut rel_index)?,
            "var" => {
                for (v, _) in parse_ident_list(l, 1)? {
                    intern(&mut f, v);
                }
            }
            "clause" => {
                let (relation, args) = parse_clause_app(l, 1, &f.relations, &rel_index)?;
                let vars = args.iter().map(|(v, _)| intern(&mut f, v)).collect();
                f.clauses.push(SClause { relation, vars });
            }
            other => return Err(l.err_at(0, format!("unknown statement `{other}`"))),
        }
    }
    Ok(f)
}

impl fmt::Display for SFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "sformula")?;
        write_relations(f, &self.relations)?;
        if !self.variables.is_empty() {
            writeln!(f, "var {}", self.variables.join(","))?;
        }
        for c in &self.clauses {
            let args: Vec<&str> = c.vars.iter().map(|&v| self.variables[v].as_str()).collect();
            writeln!(f, "clause {}({})", self.relations[c.relation].name, args.join(","))?;
        }
        Ok(())
    }
}

pub fn parse_lformula(text: &str) -> Result<LFormula, ParseError> {
    let ls = lines(text);
    let header = ls.first().ok_or_else(|| ParseError::whole("no cells"))?;
    if header.keyword() != "lformula" {
        return Err(header.err_at(0, "expected `lformula <name>` header"));
    }
    header.expect_len(2, "lformula <name>")?;
    let mut out = LFormula {
        name: header.ident(1)?.to_string(),
        relations: Vec::new(),
        cells: Vec::new(),
    };
    let mut rel_index = HashMap::new();

    let mut cell_pos: HashMap<&str, usize> = HashMap::new();
    for l in &ls[1..] {
        if l.keyword() == "fcell" && l.tokens.len() >= 2 {
            let n = l.ident(1)?;
            let next = cell_pos.len();
            if cell_pos.insert(n, next).is_some() {
                return Err(l.err_at(1, format!("duplicate fcell `{n}`")));
            }
        }
    }
    if cell_pos.is_empty() {
        return Err(ParseError::whole("no cells"));
    }

    let mut current: Option<(FCell, HashMap<String, FVar>, &Line<'_>)> = None;
    let mut call_counts: HashMap<usize, usize> = HashMap::new();
    for l in &ls[1..] {
        match l.keyword() {
            "relation" => {
                if current.is_some() {
                    return Err(l.err_at(0, "relations must be declared before the first fcell"));
                }
                add_relation(l, &mut out.relations, &mut rel_index)?;
            }
            "fcell" => {
                if let Some((c, _, _)) = current.take() {
                    out.cells.push(c);
                }
                call_counts.clear();
                let name = l.ident(1)?;
                let interface = match l.tokens.get(2).map(|t| t.text) {
                    None => Vec::new(),
                    Some("in") => parse_ident_list(l, 3)?,
                    Some(_) => return Err(l.err_at(2, "expected `in <vars>`")),
                };
                check_distinct(l, &interface)?;
                let vars = interface
                    .iter()
                    .enumerate()
                    .map(|(i, (v, _))| (v.to_string(), FVar::Interface(i)))
                    .collect();
                let cell = FCell {
                    name: name.to_string(),
                    interface: interface.iter().map(|(v, _)| v.to_string()).collect(),
                    locals: Vec::new(),
                    clauses: Vec::new(),
                    calls: Vec::new(),
                };
                current = Some((cell, vars, l));
            }
            kw @ ("local" | "clause" | "call") => {
                let Some((cell, vars, _)) = current.as_mut() else {
                    return Err(l.err_at(0, format!("`{kw}` outside of an fcell")));
                };
                let mut intern = |v: &str, cell: &mut FCell| -> FVar {
                    *vars.entry(v.to_string()).or_insert_with(|| {
                        cell.locals.push(v.to_string());
                        FVar::Local(cell.locals.len() - 1)
                    })
                };
                match kw {
                    "local" => {
                        for (v, c) in parse_ident_list(l, 1)? {
                            if cell.interface.iter().any(|x| x == v) {
                                return Err(l.err(c, format!("`{v}` is an interface variable")));
                            }
                            intern(v, cell);
                        }
                    }
                    "clause" => {
                        let (relation, args) = parse_clause_app(l, 1, &out.relations, &rel_index)?;
                        let args = args.iter().map(|(v, _)| intern(v, cell)).collect();
                        cell.clauses.push(FClause { relation, args });
                    }
                    _ => {
                        let (text, col) = l.rest_from(1);
                        let (callee_name, args) = parse_application(l, text, col)?;
                        let here = out.cells.len();
                        let callee = match cell_pos.get(callee_name) {
                            None => return Err(l.err(col, format!("undefined fcell `{callee_name}`"))),
                            Some(&c) if c >= here => {
                                return Err(l.err(col, format!("forward reference to fcell `{callee_name}`")))
                            }
                            Some(&c) => c,
                        };
                        let expected = out.cells[callee].interface.len();
                        if args.len() != expected {
                            return Err(l.err(
                                col,
                                format!(
                                    "arity mismatch: `{callee_name}` takes {expected} arguments but {} were given",
                                    args.len()
                                ),
                            ));
                        }
                        check_distinct(l, &args)?;
                        let ordinal = call_counts.entry(callee).or_insert(0);
                        *ordinal += 1;
                        let args = args.iter().map(|(v, _)| intern(v, cell)).collect();
                        cell.calls.push(FCall {
                            name: format!("{callee_name}_{ordinal}"),
                            callee,
                            args,
                        });
                    }
                }
            }
            other => return Err(l.err_at(0, format!("unknown statement `{other}`"))),
        }
    }
    let (last, _, line) = current.expect("at least one fcell");
    if !last.interface.is_empty() {
        return Err(line.err_at(3, "the top fcell must not have interface variables"));
    }
    out.cells.push(last);
    for c in &out.cells {
        // Auto-generated call names must not collide with local names,
        // since both appear as address components.
        if let Some(call) = c.calls.iter().find(|k| c.locals.contains(&k.name) || c.interface.contains(&k.name)) {
            return Err(ParseError::whole(format!(
                "call name `{}` in fcell `{}` collides with a variable",
                call.name, c.name
            )));
        }
    }
    Ok(out)
}

impl fmt::Display for LFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "lformula {}", self.name)?;
        write_relations(f, &self.relations)?;
        for c in &self.cells {
            if c.interface.is_empty() {
                writeln!(f, "fcell {}", c.name)?;
            } else {
                writeln!(f, "fcell {} in {}", c.name, c.interface.join(","))?;
            }
            if !c.locals.is_empty() {
                writeln!(f, "  local {}", c.locals.join(","))?;
            }
            for cl in &c.clauses {
                let args: Vec<&str> = cl.args.iter().map(|&v| c.var_name(v)).collect();
                writeln!(f, "  clause {}({})", self.relations[cl.relation].name, args.join(","))?;
            }
            for call in &c.calls {
                let args: Vec<&str> = call.args.iter().map(|&v| c.var_name(v)).collect();
                writeln!(f, "  call {}({})", self.cells[call.callee].name, args.join(","))?;
            }
        }
        Ok(())
    }
}

pub fn parse_fpn_formula(text: &str) -> Result<FpnFormula, ParseError> {
    let ls = lines(text);
    let header = ls.first().ok_or_else(|| ParseError::whole("empty document"))?;
    if header.keyword() != "fpncnf" {
        return Err(header.err_at(0, "expected `fpncnf m=<int>` header"));
    }
    header.expect_len(2, "fpncnf m=<int>")?;
    let mut f = FpnFormula {
        variables: Vec::new(),
        clauses: Vec::new(),
        m: parse_m(header, 1)?,
    };
    let mut index: HashMap<&str, usize> = HashMap::new();
    for l in &ls[1..] {
        match l.keyword() {
            "var" => {
                for (v, c) in parse_ident_list(l, 1)? {
                    if index.insert(v, f.variables.len()).is_some() {
                        return Err(l.err(c, format!("duplicate variable `{v}`")));
                    }
                    f.variables.push(v.to_string());
                }
            }
            "clause" => {
                if l.tokens.len() < 2 {
                    return Err(l.err_at(1, "a clause needs at least one literal"));
                }
                let mut lits: Vec<Literal> = Vec::new();
                for (ti, t) in l.tokens.iter().enumerate().skip(1) {
                    let (positive, body) = match t.text.strip_prefix('!') {
                        Some(b) => (false, b),
                        None => (true, t.text),
                    };
                    let (name, off) = body
                        .split_once('@')
                        .ok_or_else(|| l.err_at(ti, format!("expected `<var>@<offset>`, got `{}`", t.text)))?;
                    if !is_ident(name) {
                        return Err(l.err_at(ti, format!("invalid identifier `{name}`")));
                    }
                    let var = *index
                        .get(name)
                        .ok_or_else(|| l.err_at(ti, format!("undeclared variable `{name}`")))?;
                    if off.starts_with('-') {
                        return Err(l.err_at(ti, "negative offset"));
                    }
                    let offset: u64 = off
                        .parse()
                        .map_err(|_| l.err_at(ti, format!("invalid offset `{off}`")))?;
                    if lits.iter().any(|x| x.var == var && x.offset == offset) {
                        return Err(l.err_at(ti, format!("variable `{name}@{offset}` repeated")));
                    }
                    lits.push(Literal { var, offset, positive });
                }
                if lits.len() > MAX_ARITY {
                    return Err(l.err_at(MAX_ARITY + 1, format!("more than {MAX_ARITY} literals")));
                }
                f.clauses.push(lits);
            }
            other => return Err(l.err_at(0, format!("unknown statement `{other}`"))),
        }
    }
    Ok(f)
}

impl fmt::Display for FpnFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "fpncnf m={}", self.m)?;
        if !self.variables.is_empty() {
            writeln!(f, "var {}", self.variables.join(","))?;
        }
        for c in &self.clauses {
            let lits: Vec<String> = c
                .iter()
                .map(|l| {
                    format!(
                        "{}{}@{}",
                        if l.positive { "" } else { "!" },
                        self.variables[l.var],
                        l.offset
                    )
                })
                .collect();
            writeln!(f, "clause {}", lits.join(" "))?;
        }
        Ok(())
    }
}
