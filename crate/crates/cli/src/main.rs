//! `sgat`: validate, expand and analyse succinct specifications and run the
//! approximation schemes on them.
//!
//! Exit codes: 0 success, 1 usage error, 2 parse or validation failure,
//! 3 budget exceeded, 4 guarantee check failed (`verify`).

use std::collections::HashMap;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use num_rational::BigRational;
use serde_json::{json, Value};

use sgat_core::expansion::{
    count_expansion, expand, expand_formula, expand_fpn, expand_fpn_formula, formula_level_restriction,
    hierarchy_depth, level_restriction,
};
use sgat_core::generate;
use sgat_core::partial::{formula_pieces, fpn_formula_pieces, fpn_slabs, partial_expand, Boundary};
use sgat_core::schemes::{self, epsilon_to_l, parse_epsilon, ApproxSolution, GuaranteeKind, SchemeParams};
use sgat_core::solution::{emit_solution_lspec, query, solution_size, stream_solution};
use sgat_core::solvers::{exact_maxcut, exact_maxsat, exact_mis, exact_vc, BakerSolver, BaseSolver, ExactSolver, Problem};
use sgat_core::spec::{
    detect_kind, parse_fpn, parse_fpn_formula, parse_lformula, parse_lspec, parse_sformula, validate_lspec,
    DocumentKind, FpnFormula, FpnSpec, LFormula, LSpec, SFormula, VertexAddress,
};
use sgat_core::Error;

#[derive(Parser)]
#[command(name = "sgat", version, about = "Succinct graph approximation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a document and report validation violations.
    Validate { file: PathBuf },
    /// Print the expanded graph (edge list) or formula.
    Expand {
        file: PathBuf,
        #[arg(long, default_value_t = 1_000_000)]
        budget_expand: usize,
    },
    /// Sizes, expansion counts, level restriction, narrowness and depth.
    Stats {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Describe the pieces of one offset iteration.
    Pieces {
        file: PathBuf,
        /// Offset iteration (deletion depth for L-specs).
        #[arg(long, default_value_t = 0)]
        i: u32,
        #[arg(long, default_value_t = 1)]
        l: u32,
        #[arg(long)]
        k: Option<u32>,
        /// Cell to expand, by name (default: top).
        #[arg(long)]
        cell: Option<String>,
        /// Keep the boundary band for sharing instead of deleting it.
        #[arg(long)]
        overlap: bool,
        #[arg(long, default_value_t = 20_000)]
        budget_piece: usize,
        #[arg(long)]
        json: bool,
    },
    /// Run an approximation scheme and print value, offset and guarantee.
    Approx {
        problem: ProblemArg,
        file: PathBuf,
        #[command(flatten)]
        scheme: SchemeArgs,
    },
    /// Membership of one vertex (or variable) in the scheme's solution.
    Query {
        problem: ProblemArg,
        file: PathBuf,
        /// `a/b/v` for hierarchical inputs, `v@p` for periodic ones.
        address: String,
        #[command(flatten)]
        scheme: SchemeArgs,
    },
    /// Print the solution set, one address per line.
    Stream {
        problem: ProblemArg,
        file: PathBuf,
        #[arg(long)]
        cap: Option<u64>,
        #[command(flatten)]
        scheme: SchemeArgs,
    },
    /// Print an L-spec whose expansion is the solution set.
    Emit {
        problem: ProblemArg,
        file: PathBuf,
        #[command(flatten)]
        scheme: SchemeArgs,
    },
    /// Exact optimum of the expanded instance.
    Oracle {
        problem: ProblemArg,
        file: PathBuf,
        #[arg(long, default_value_t = 1_000_000)]
        budget_expand: usize,
        #[arg(long, default_value_t = 64)]
        budget_exact: usize,
        #[arg(long)]
        json: bool,
    },
    /// Run the scheme and the oracle and check feasibility and the guarantee.
    Verify {
        problem: ProblemArg,
        file: PathBuf,
        #[arg(long, default_value_t = 1_000_000)]
        budget_expand: usize,
        #[command(flatten)]
        scheme: SchemeArgs,
    },
    /// Generate an instance.
    Gen {
        #[command(subcommand)]
        family: Family,
    },
}

#[derive(Subcommand)]
enum Family {
    /// Complete binary tree with 2^n - 1 vertices.
    Bintree { n: u32 },
    /// The triangle spec.
    Tri,
    /// The three-level example formula with 7 expanded clauses.
    Example4,
    /// Periodic path v(0) .. v(m).
    Fpnpath { m: BigUint },
    /// Periodic ladder over positions 0..m.
    Fpnladder { m: BigUint },
    /// Random 1-level-restricted L-spec with a planar expansion.
    Rand1level {
        #[arg(long, default_value_t = 5)]
        cells: usize,
        #[arg(long, default_value_t = 3)]
        max_locals: usize,
        #[arg(long, default_value_t = 2)]
        max_calls: usize,
        #[arg(long, default_value_t = 30)]
        max_vertices: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Random periodic spec.
    Randfpn {
        #[arg(long, default_value_t = 4)]
        vertices: usize,
        #[arg(long, default_value_t = 0.3)]
        density: f64,
        #[arg(long, default_value_t = 1)]
        k: u64,
        #[arg(long, default_value = "20")]
        m: BigUint,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Random 1-level LFormula.
    Lformula {
        #[arg(long, default_value_t = 4)]
        cells: usize,
        #[arg(long, default_value_t = 20)]
        max_variables: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Random periodic CNF.
    Fpncnf {
        #[arg(long, default_value_t = 3)]
        vars: usize,
        #[arg(long, default_value_t = 4)]
        clauses: usize,
        #[arg(long, default_value_t = 1)]
        k: u64,
        #[arg(long, default_value = "20")]
        m: BigUint,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ProblemArg {
    Mis,
    Vc,
    Maxcut,
    Maxsat,
}

impl From<ProblemArg> for Problem {
    fn from(p: ProblemArg) -> Problem {
        match p {
            ProblemArg::Mis => Problem::Mis,
            ProblemArg::Vc => Problem::Vc,
            ProblemArg::Maxcut => Problem::MaxCut,
            ProblemArg::Maxsat => Problem::MaxSat,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum BaseArg {
    Exact,
    Baker,
}

#[derive(Args)]
#[group(skip)]
struct SchemeArgs {
    /// Accuracy; mapped to the smallest sufficient l.
    #[arg(long, conflicts_with = "l")]
    epsilon: Option<String>,
    #[arg(long)]
    l: Option<u32>,
    #[arg(long)]
    k: Option<u32>,
    #[arg(long, value_enum, default_value_t = BaseArg::Exact)]
    base: BaseArg,
    #[arg(long, default_value_t = 64)]
    budget_exact: usize,
    #[arg(long, default_value_t = 20_000)]
    budget_piece: usize,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    #[arg(long)]
    json: bool,
}

/// A failure with its exit code.
struct Fail {
    code: u8,
    message: String,
}

impl Fail {
    fn usage(message: impl Into<String>) -> Fail {
        Fail {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<Error> for Fail {
    fn from(e: Error) -> Fail {
        let code = match &e {
            Error::Parse(_)
            | Error::Invalid(_)
            | Error::Address { .. }
            | Error::NotLevelRestricted { .. }
            | Error::NotNarrow { .. }
            | Error::Inapplicable { .. } => 2,
            Error::Budget { .. } => 3,
            Error::Unsupported(_) => 1,
        };
        Fail {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Fail {
    fn from(e: io::Error) -> Fail {
        Fail::usage(e.to_string())
    }
}

type Out<T = ()> = Result<T, Fail>;

enum Doc {
    LSpec(LSpec),
    Fpn(FpnSpec),
    SFormula(SFormula),
    LFormula(LFormula),
    FpnFormula(FpnFormula),
}

fn read(path: &Path) -> Out<String> {
    fs::read_to_string(path).map_err(|e| Fail::usage(format!("cannot read {}: {e}", path.display())))
}

fn parse(text: &str) -> Out<Doc> {
    let kind = detect_kind(text).ok_or_else(|| Fail {
        code: 2,
        message: "unrecognized document header".into(),
    })?;
    let doc = match kind {
        DocumentKind::LSpec => Doc::LSpec(parse_lspec(text).map_err(Error::from)?),
        DocumentKind::Fpn => Doc::Fpn(parse_fpn(text).map_err(Error::from)?),
        DocumentKind::SFormula => Doc::SFormula(parse_sformula(text).map_err(Error::from)?),
        DocumentKind::LFormula => Doc::LFormula(parse_lformula(text).map_err(Error::from)?),
        DocumentKind::FpnFormula => Doc::FpnFormula(parse_fpn_formula(text).map_err(Error::from)?),
    };
    Ok(doc)
}

/// Parses and, for L-specs, validates.
fn load(path: &Path) -> Out<Doc> {
    let doc = parse(&read(path)?)?;
    if let Doc::LSpec(s) = &doc {
        let report = validate_lspec(s);
        if !report.is_valid() {
            return Err(Error::Invalid(report).into());
        }
    }
    Ok(doc)
}

fn big(n: &BigUint) -> Value {
    Value::String(n.to_string())
}

fn print_json(v: &Value) -> Out {
    println!("{}", serde_json::to_string_pretty(v).map_err(|e| Fail::usage(e.to_string()))?);
    Ok(())
}

fn base_solver(args: &SchemeArgs, l: u32) -> Box<dyn BaseSolver> {
    match args.base {
        BaseArg::Exact => Box::new(ExactSolver {
            budget: args.budget_exact,
        }),
        BaseArg::Baker => Box::new(BakerSolver {
            l: l as usize,
            budget: args.budget_exact,
        }),
    }
}

fn run_scheme(problem: Problem, doc: &Doc, args: &SchemeArgs) -> Out<ApproxSolution> {
    let periodic = matches!(doc, Doc::Fpn(_) | Doc::FpnFormula(_));
    let l = match (&args.epsilon, args.l) {
        (_, Some(l)) => l,
        (Some(e), None) => epsilon_to_l(&parse_epsilon(e)?, GuaranteeKind::for_problem(problem, periodic)),
        (None, None) => return Err(Fail::usage("one of --epsilon or --l is required")),
    };
    let mut params = SchemeParams::new(l);
    params.k = args.k;
    params.piece_budget = args.budget_piece;
    params.threads = args.threads.max(1);
    params.epsilon = args.epsilon.clone();
    let base = base_solver(args, l);
    let base = base.as_ref();
    let sol = match (problem, doc) {
        (Problem::Mis, Doc::LSpec(s)) => schemes::h_mis(s, &params, base)?,
        (Problem::Vc, Doc::LSpec(s)) => schemes::h_vc(s, &params, base)?,
        (Problem::MaxCut, Doc::LSpec(s)) => schemes::h_maxcut(s, &params, base)?,
        (Problem::MaxSat, Doc::LFormula(f)) => schemes::h_maxsat(f, &params, base)?,
        (Problem::Mis, Doc::Fpn(s)) => schemes::fpn_mis(s, &params, base)?,
        (Problem::Vc, Doc::Fpn(s)) => schemes::fpn_vc(s, &params, base)?,
        (Problem::MaxCut, Doc::Fpn(s)) => schemes::fpn_maxcut(s, &params, base)?,
        (Problem::MaxSat, Doc::FpnFormula(f)) => schemes::fpn_maxsat(f, &params, base)?,
        (p, _) => {
            return Err(Fail::usage(format!(
                "{p} needs {}",
                if p == Problem::MaxSat {
                    "an lformula or fpncnf document"
                } else {
                    "an lspec or fpn document"
                }
            )))
        }
    };
    Ok(sol)
}

fn solution_json(sol: &ApproxSolution) -> Value {
    json!({
        "problem": sol.problem.name(),
        "source": sol.source,
        "value": big(&sol.total_value),
        "offset": sol.best_offset,
        "guarantee": sol.guarantee.to_string(),
        "l": sol.l,
        "k": sol.k,
        "epsilon": sol.epsilon,
        "base": sol.base,
        "offsets": sol.offset_values.iter().map(|(o, v)| json!({"offset": o, "value": big(v)})).collect::<Vec<_>>(),
    })
}

fn cmd_validate(file: &Path) -> Out {
    match parse(&read(file)?)? {
        Doc::LSpec(s) => {
            let report = validate_lspec(&s);
            if report.is_valid() {
                println!("valid");
                Ok(())
            } else {
                print!("{report}");
                Err(Fail {
                    code: 2,
                    message: format!("{} violation(s)", report.violations.len()),
                })
            }
        }
        _ => {
            println!("valid");
            Ok(())
        }
    }
}

fn cmd_expand(file: &Path, budget: usize) -> Out {
    let text = match load(file)? {
        Doc::LSpec(s) => expand(&s, budget)?.to_string(),
        Doc::Fpn(s) => expand_fpn(&s, budget)?.to_string(),
        Doc::SFormula(f) => f.to_string(),
        Doc::LFormula(f) => expand_formula(&f, budget)?.to_string(),
        Doc::FpnFormula(f) => expand_fpn_formula(&f, budget)?.to_string(),
    };
    print!("{text}");
    Ok(())
}

fn cmd_stats(file: &Path, as_json: bool) -> Out {
    let v = match load(file)? {
        Doc::LSpec(s) => {
            let c = count_expansion(&s);
            json!({
                "kind": "lspec",
                "name": s.name,
                "cells": s.cells.len(),
                "vertex_number": s.vertex_number(),
                "edge_number": s.edge_number(),
                "size": s.size(),
                "expanded_vertices": big(c.top_vertices()),
                "expanded_edges": big(c.top_edges()),
                "level_restriction": level_restriction(&s),
                "depth": hierarchy_depth(&s),
            })
        }
        Doc::Fpn(s) => json!({
            "kind": "fpn",
            "vertices": s.vertices.len(),
            "edges": s.edges.len(),
            "m": big(&s.m),
            "narrowness": s.narrowness(),
            "expanded_vertices": big(&((&s.m + 1u32) * BigUint::from(s.vertices.len()))),
        }),
        Doc::SFormula(f) => json!({
            "kind": "sformula",
            "variables": f.variables.len(),
            "clauses": f.clauses.len(),
        }),
        Doc::LFormula(f) => {
            let h = sgat_core::hier::Hier::from_lformula(&f);
            json!({
                "kind": "lformula",
                "name": f.name,
                "cells": f.cells.len(),
                "size": f.size(),
                "expanded_variables": big(&h.expanded_locals()[h.top()]),
                "level_restriction": formula_level_restriction(&f),
                "depth": h.heights()[h.top()],
            })
        }
        Doc::FpnFormula(f) => json!({
            "kind": "fpncnf",
            "variables": f.variables.len(),
            "clauses": f.clauses.len(),
            "m": big(&f.m),
            "narrowness": f.narrowness(),
        }),
    };
    if as_json {
        return print_json(&v);
    }
    if let Value::Object(map) = v {
        for (key, val) in map {
            match val {
                Value::String(s) => println!("{key}: {s}"),
                other => println!("{key}: {other}"),
            }
        }
    }
    Ok(())
}

struct PiecesArgs<'a> {
    i: u32,
    l: u32,
    k: Option<u32>,
    cell: Option<&'a str>,
    overlap: bool,
    budget: usize,
    json: bool,
}

fn cmd_pieces(file: &Path, a: PiecesArgs<'_>) -> Out {
    let v = match load(file)? {
        Doc::LSpec(s) => {
            let k = a.k.unwrap_or_else(|| level_restriction(&s).max(1));
            let cell = match a.cell {
                Some(name) => s
                    .cell_index(name)
                    .ok_or_else(|| Fail::usage(format!("no cell `{name}`")))?,
                None => s.top(),
            };
            let boundary = if a.overlap { Boundary::Overlap } else { Boundary::Delete };
            let pe = partial_expand(&s, cell, a.i, boundary, k, a.budget)?;
            json!({
                "cell": s.cells[pe.root].name,
                "depth": pe.depth,
                "k": pe.k,
                "explicit_vertices": pe.explicit_graph.n(),
                "explicit_edges": pe.explicit_graph.m(),
                "frontier": pe.frontier.iter().map(|(c, n)| json!({"cell": s.cells[*c].name, "count": big(n)})).collect::<Vec<_>>(),
                "deleted": big(&pe.deleted_level_count),
                "vertices": pe.explicit_graph.labels,
            })
        }
        Doc::Fpn(s) => {
            let k = u64::from(a.k.unwrap_or(0)).max(s.narrowness()).max(1);
            let slabs = fpn_slabs(&s, u64::from(a.i), u64::from(a.l), k);
            let slab = |x: &sgat_core::partial::FpnSlab| {
                json!({"lo": x.lo.to_string(), "hi": x.hi.to_string(), "vertices": x.graph.n(), "edges": x.graph.m()})
            };
            json!({
                "first": slab(&slabs.first),
                "middle": slabs.middle.as_ref().map(slab),
                "middle_count": big(&slabs.middle_count),
                "last": slabs.last.as_ref().map(slab),
            })
        }
        Doc::LFormula(f) => {
            let k = a.k.unwrap_or_else(|| formula_level_restriction(&f).max(1));
            let fp = formula_pieces(&f, a.l, k, a.i, a.budget)?;
            json!({
                "iteration": fp.iteration,
                "deleted_clauses": big(&fp.deleted_clauses),
                "pieces": fp.pieces.iter().map(|p| json!({
                    "cell": f.cells[p.cell].name,
                    "count": big(&p.multiplicity),
                    "top": p.top,
                    "variables": p.formula.variables.len(),
                    "clauses": p.formula.clauses.len(),
                })).collect::<Vec<_>>(),
            })
        }
        Doc::FpnFormula(f) => {
            let k = u64::from(a.k.unwrap_or(0)).max(f.narrowness()).max(1);
            let (blocks, dropped) = fpn_formula_pieces(&f, u64::from(a.l), k, u64::from(a.i));
            json!({
                "dropped_clauses": big(&dropped),
                "blocks": blocks.iter().map(|b| json!({
                    "start": big(&b.start),
                    "len": b.len,
                    "count": big(&b.multiplicity),
                    "clauses": b.formula.clauses.len(),
                })).collect::<Vec<_>>(),
            })
        }
        Doc::SFormula(_) => return Err(Fail::usage("a flat formula has no pieces")),
    };
    if a.json {
        print_json(&v)
    } else {
        println!("{}", serde_json::to_string_pretty(&v).map_err(|e| Fail::usage(e.to_string()))?);
        Ok(())
    }
}

fn cmd_approx(problem: Problem, file: &Path, args: &SchemeArgs) -> Out {
    let doc = load(file)?;
    let sol = run_scheme(problem, &doc, args)?;
    if args.json {
        return print_json(&solution_json(&sol));
    }
    println!("{sol}");
    match &sol.epsilon {
        Some(e) => println!("epsilon={e} l={} k={} base={}", sol.l, sol.k, sol.base),
        None => println!("l={} k={} base={}", sol.l, sol.k, sol.base),
    }
    Ok(())
}

fn cmd_query(problem: Problem, file: &Path, address: &str, args: &SchemeArgs) -> Out {
    let doc = load(file)?;
    let sol = run_scheme(problem, &doc, args)?;
    let addr = if sol.is_periodic() {
        VertexAddress::new(Vec::new(), address)
    } else {
        address.parse::<VertexAddress>().map_err(|reason| Error::Address {
            addr: address.to_string(),
            reason,
        })?
    };
    let member = query(&sol, &addr)?;
    if args.json {
        return print_json(&json!({"address": address, "member": member}));
    }
    println!("{member}");
    Ok(())
}

fn cmd_stream(problem: Problem, file: &Path, cap: Option<u64>, args: &SchemeArgs) -> Out {
    let doc = load(file)?;
    let sol = run_scheme(problem, &doc, args)?;
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let r = stream_solution(&sol, cap, |s| writeln!(out, "{s}"));
    match r.and_then(|_| out.flush()) {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
        Err(e) => Err(e.into()),
    }
}

fn cmd_emit(problem: Problem, file: &Path, args: &SchemeArgs) -> Out {
    let doc = load(file)?;
    let sol = run_scheme(problem, &doc, args)?;
    print!("{}", emit_solution_lspec(&sol)?);
    Ok(())
}

/// Exact optimum of the expansion, with the optimal solution's members.
fn oracle(problem: Problem, doc: &Doc, budget_expand: usize, budget_exact: usize) -> Out<BigUint> {
    let v = match (problem, doc) {
        (Problem::MaxSat, Doc::LFormula(f)) => exact_maxsat(&expand_formula(f, budget_expand)?, budget_exact)?.1,
        (Problem::MaxSat, Doc::FpnFormula(f)) => exact_maxsat(&expand_fpn_formula(f, budget_expand)?, budget_exact)?.1,
        (Problem::MaxSat, Doc::SFormula(f)) => exact_maxsat(f, budget_exact)?.1,
        (Problem::MaxSat, _) => return Err(Fail::usage("maxsat needs a formula document")),
        (p, d) => {
            let g = match d {
                Doc::LSpec(s) => expand(s, budget_expand)?.graph,
                Doc::Fpn(s) => expand_fpn(s, budget_expand)?.graph,
                _ => return Err(Fail::usage(format!("{p} needs an lspec or fpn document"))),
            };
            match p {
                Problem::Mis => exact_mis(&g, budget_exact)?.len(),
                Problem::Vc => exact_vc(&g, budget_exact)?.len(),
                _ => {
                    let side = exact_maxcut(&g, budget_exact)?;
                    g.cut_value(&side)
                }
            }
        }
    };
    Ok(BigUint::from(v))
}

fn cmd_oracle(problem: Problem, file: &Path, budget_expand: usize, budget_exact: usize, as_json: bool) -> Out {
    let doc = load(file)?;
    let opt = oracle(problem, &doc, budget_expand, budget_exact)?;
    if as_json {
        return print_json(&json!({"problem": problem.name(), "opt": big(&opt)}));
    }
    println!("opt={opt}");
    Ok(())
}

/// Recomputes the value of the streamed solution on the expansion and
/// reports whether it is feasible and equal to the claimed value.
fn recheck(sol: &ApproxSolution, doc: &Doc, budget_expand: usize) -> Out<Result<(), String>> {
    let mut members = Vec::new();
    stream_solution(sol, None, |s| {
        members.push(s.to_string());
        Ok(())
    })?;
    let claimed = &sol.total_value;
    let value_ok = match doc {
        Doc::LFormula(_) | Doc::FpnFormula(_) => {
            let f = match doc {
                Doc::LFormula(f) => expand_formula(f, budget_expand)?,
                Doc::FpnFormula(f) => expand_fpn_formula(f, budget_expand)?,
                _ => unreachable!(),
            };
            let index = f.variable_index();
            let mut a = vec![false; f.variables.len()];
            for m in &members {
                match index.get(m.as_str()) {
                    Some(&i) => a[i] = true,
                    None => return Ok(Err(format!("streamed variable {m} is not in the expansion"))),
                }
            }
            let v = BigUint::from(f.count_satisfied(&a));
            v == *claimed
        }
        _ => {
            let g = match doc {
                Doc::LSpec(s) => expand(s, budget_expand)?,
                Doc::Fpn(s) => expand_fpn(s, budget_expand)?,
                _ => return Err(Fail::usage("unsupported document")),
            };
            let index: HashMap<&str, usize> = g.index_of();
            let mut set = Vec::new();
            for m in &members {
                match index.get(m.as_str()) {
                    Some(&i) => set.push(i),
                    None => return Ok(Err(format!("streamed vertex {m} is not in the expansion"))),
                }
            }
            
            match sol.problem {
                Problem::Mis => {
                    if !g.graph.is_independent(&set) {
                        return Ok(Err("solution is not independent".into()));
                    }
                    BigUint::from(set.len()) == *claimed
                }
                Problem::Vc => {
                    if !g.graph.is_vertex_cover(&set) {
                        return Ok(Err("solution is not a vertex cover".into()));
                    }
                    BigUint::from(set.len()) == *claimed
                }
                _ => {
                    let mut side = vec![false; g.graph.n()];
                    for &i in &set {
                        side[i] = true;
                    }
                    BigUint::from(g.graph.cut_value(&side)) == *claimed
                }
            }
        }
    };
    if !value_ok {
        return Ok(Err("recomputed value differs from the reported value".into()));
    }
    if BigUint::from(members.len()) != solution_size(sol) {
        return Ok(Err("streamed count differs from the solution size".into()));
    }
    Ok(Ok(()))
}

fn cmd_verify(problem: Problem, file: &Path, budget_expand: usize, args: &SchemeArgs) -> Out {
    let doc = load(file)?;
    let sol = run_scheme(problem, &doc, args)?;
    let opt = oracle(problem, &doc, budget_expand, args.budget_exact)?;
    let value = BigRational::from_integer(sol.total_value.clone().into());
    let bound = &sol.guarantee * BigRational::from_integer(opt.clone().into());
    let within = if problem.maximize() { value >= bound } else { value <= bound };
    let check = recheck(&sol, &doc, budget_expand)?;
    if args.json {
        print_json(&json!({
            "value": big(&sol.total_value),
            "opt": big(&opt),
            "bound": bound.to_string(),
            "guarantee": sol.guarantee.to_string(),
            "within_guarantee": within,
            "feasible": check.is_ok(),
            "error": check.as_ref().err(),
        }))?;
    } else {
        println!("value={} opt={opt} bound={bound} offset={}", sol.total_value, sol.best_offset);
    }
    match check {
        Err(reason) => Err(Fail { code: 4, message: reason }),
        Ok(()) if !within => Err(Fail {
            code: 4,
            message: format!("value {} violates the guarantee bound {bound}", sol.total_value),
        }),
        Ok(()) => {
            if !args.json {
                println!("ok");
            }
            Ok(())
        }
    }
}

fn cmd_gen(family: &Family) -> Out {
    let text = match family {
        Family::Bintree { n } => generate::bintree_text(*n),
        Family::Tri => generate::TRI.to_string(),
        Family::Example4 => generate::EXAMPLE4.to_string(),
        Family::Fpnpath { m } => generate::fpn_path(m),
        Family::Fpnladder { m } => generate::fpn_ladder(m),
        Family::Rand1level {
            cells,
            max_locals,
            max_calls,
            max_vertices,
            seed,
        } => {
            let p = generate::RandLevelParams {
                cells: *cells,
                max_locals: *max_locals,
                max_calls: *max_calls,
                max_vertices: *max_vertices,
                ..Default::default()
            };
            generate::rand1level(&p, *seed)?
        }
        Family::Randfpn {
            vertices,
            density,
            k,
            m,
            seed,
        } => generate::rand_fpn(*vertices, *density, *k, m, *seed),
        Family::Lformula {
            cells,
            max_variables,
            seed,
        } => {
            let p = generate::RandFormulaParams {
                cells: *cells,
                max_variables: *max_variables,
                ..Default::default()
            };
            generate::rand_lformula(&p, *seed)?
        }
        Family::Fpncnf {
            vars,
            clauses,
            k,
            m,
            seed,
        } => generate::rand_fpn_formula(*vars, *clauses, *k, m, *seed),
    };
    print!("{text}");
    Ok(())
}

fn run(cli: Cli) -> Out {
    match cli.command {
        Command::Validate { file } => cmd_validate(&file),
        Command::Expand { file, budget_expand } => cmd_expand(&file, budget_expand),
        Command::Stats { file, json } => cmd_stats(&file, json),
        Command::Pieces {
            file,
            i,
            l,
            k,
            cell,
            overlap,
            budget_piece,
            json,
        } => cmd_pieces(
            &file,
            PiecesArgs {
                i,
                l,
                k,
                cell: cell.as_deref(),
                overlap,
                budget: budget_piece,
                json,
            },
        ),
        Command::Approx { problem, file, scheme } => cmd_approx(problem.into(), &file, &scheme),
        Command::Query {
            problem,
            file,
            address,
            scheme,
        } => cmd_query(problem.into(), &file, &address, &scheme),
        Command::Stream {
            problem,
            file,
            cap,
            scheme,
        } => cmd_stream(problem.into(), &file, cap, &scheme),
        Command::Emit { problem, file, scheme } => cmd_emit(problem.into(), &file, &scheme),
        Command::Oracle {
            problem,
            file,
            budget_expand,
            budget_exact,
            json,
        } => cmd_oracle(problem.into(), &file, budget_expand, budget_exact, json),
        Command::Verify {
            problem,
            file,
            budget_expand,
            scheme,
        } => cmd_verify(problem.into(), &file, budget_expand, &scheme),
        Command::Gen { family } => cmd_gen(&family),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Help and version requests are not errors.
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
