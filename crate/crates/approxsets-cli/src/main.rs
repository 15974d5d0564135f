use std::path::PathBuf;
use std::process::ExitCode;

use approxsets::cardinality::{self, Class, Cofinality, Evidence, OrdOp, OrdVal, Size};
use approxsets::expr;
use approxsets::set_rep::{Config, SetRef, Truth};
use approxsets::topology::{self, Classification, PATH_CAP};
use approxsets::universal_tree::{level_count, Enumerator, Node};
use approxsets::{hf_kernel, Hf, Mode, Universe};
use clap::{Parser, Subcommand};
use serde_json::{json, Value};
use thiserror::Error;

mod theorems;

const MAX_DEPTH: u32 = 12;

#[derive(Parser)]
#[command(name = "asets", version, about = "Sets described by their finite approximations")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Approximation / unfolding depth.
    #[arg(long, global = true, env = "ASETS_DEPTH", default_value_t = 6)]
    depth: u32,
    /// Allow --depth above 12.
    #[arg(long, global = true)]
    force: bool,
    /// Node and state budget.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    budget: u64,
    /// Maximum number of derived-set iterations.
    #[arg(long = "rank-cap", global = true, default_value_t = 64)]
    rank_cap: u32,
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    /// Graphviz output (tree, utree).
    #[arg(long, global = true)]
    dot: bool,
    /// Read expression arguments from a file, one per non-empty line.
    #[arg(long, global = true)]
    file: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print an expression in canonical form.
    Normalize { exprs: Vec<String> },
    /// F(depth, A).
    Approx { exprs: Vec<String> },
    /// Is X an element of A?  Arguments: X A.
    Member { exprs: Vec<String> },
    /// Are A and B equal?
    Eq { exprs: Vec<String> },
    /// Is A a subset of B?
    Subset { exprs: Vec<String> },
    /// Level `depth` of the universal tree.
    Utree,
    /// Developing tree of A down to level `depth`.
    Tree { exprs: Vec<String> },
    /// Isolated or accumulation point.  Arguments: X A.
    Classify { exprs: Vec<String> },
    /// Derived set (accumulation points) of A.
    Derive { exprs: Vec<String> },
    /// Cantor-Bendixson rank and degree.
    Cb { exprs: Vec<String> },
    /// Does A contain a perfect subset?
    Perfect { exprs: Vec<String> },
    /// Compare cardinalities of A and B.
    Compare { exprs: Vec<String> },
    /// Cardinal class and flags.
    CardClass { exprs: Vec<String> },
    /// Size under the counting measure.
    Size { exprs: Vec<String> },
    /// Ordinal arithmetic on naturals and omega.  OP is add, mul or pow.
    OrdArith { op: String, a: String, b: String },
    /// Run the built-in law and theorem scenarios.
    Theorems { filter: Option<String> },
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Domain(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 1,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Domain(_) => "domain",
        }
    }
}

fn domain<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Domain(e.to_string())
}

/// What a verb prints: plain text, or a JSON value printed compactly.
enum Out {
    Text(String, Value),
    Json(Value),
    Code(String, Value, u8),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = cli.json;
    match run(cli) {
        Ok(Out::Text(text, v)) => {
            println!("{}", if json { v.to_string() } else { text });
            ExitCode::SUCCESS
        }
        Ok(Out::Json(v)) => {
            println!("{v}");
            ExitCode::SUCCESS
        }
        Ok(Out::Code(text, v, code)) => {
            println!("{}", if json { v.to_string() } else { text });
            ExitCode::from(code)
        }
        Err(e) => {
            if json {
                eprintln!("{}", json!({"error": {"kind": e.kind(), "message": e.to_string()}}));
            } else {
                eprintln!("asets: {e}");
            }
            ExitCode::from(e.code())
        }
    }
}

struct Ctx {
    u: Universe,
    depth: u32,
    rank_cap: u32,
}

impl Ctx {
    fn build(&self, src: &str) -> Result<SetRef, CliError> {
        let e = expr::parse(src).map_err(|e| CliError::Usage(format!("{src:?}: {e}")))?;
        e.build(&self.u).map_err(domain)
    }
}

fn inputs(given: Vec<String>, file: &Option<PathBuf>, want: usize) -> Result<Vec<String>, CliError> {
    let args = match file {
        Some(p) if given.is_empty() => std::fs::read_to_string(p)
            .map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(String::from)
            .collect(),
        Some(_) => return Err(CliError::Usage("give expressions either inline or with --file, not both".into())),
        None => given,
    };
    if args.len() != want {
        return Err(CliError::Usage(format!("expected {want} expression(s), got {}", args.len())));
    }
    Ok(args)
}

fn run(cli: Cli) -> Result<Out, CliError> {
    if cli.depth > MAX_DEPTH && !cli.force {
        return Err(CliError::Usage(format!("--depth {} exceeds {MAX_DEPTH}; pass --force to allow it", cli.depth)));
    }
    if cli.dot && !matches!(cli.cmd, Cmd::Tree { .. } | Cmd::Utree) {
        return Err(CliError::Usage("--dot applies only to tree and utree".into()));
    }
    let cfg = Config { budget: cli.budget, ..Config::default() };
    let cx = Ctx { u: Universe::new(cfg), depth: cli.depth, rank_cap: cli.rank_cap };
    let file = &cli.file;
    let one = |v: Vec<String>| -> Result<SetRef, CliError> { cx.build(&inputs(v, file, 1)?[0]) };
    let two = |v: Vec<String>| -> Result<(SetRef, SetRef), CliError> {
        let a = inputs(v, file, 2)?;
        Ok((cx.build(&a[0])?, cx.build(&a[1])?))
    };
    let u = &cx.u;
    Ok(match cli.cmd {
        Cmd::Normalize { exprs } => {
            let src = &inputs(exprs, file, 1)?[0];
            let e = expr::parse(src).map_err(|e| CliError::Usage(format!("{src:?}: {e}")))?;
            let s = e.to_string();
            Out::Text(s.clone(), json!({ "expr": s }))
        }
        Cmd::Approx { exprs } => {
            let w = u.approx_of(one(exprs)?, cx.depth).map_err(domain)?.to_string();
            Out::Text(w.clone(), json!({ "depth": cx.depth, "approx": w }))
        }
        Cmd::Member { exprs } => {
            let (x, a) = two(exprs)?;
            truth_out(u.member_in(x, a, Mode::Exact).map_err(domain)?)
        }
        Cmd::Eq { exprs } => {
            let (a, b) = two(exprs)?;
            truth_out(u.equal_sets(a, b, Mode::Exact).map_err(domain)?)
        }
        Cmd::Subset { exprs } => {
            let (a, b) = two(exprs)?;
            let r = u.subset_of(a, b).map_err(domain)?;
            Out::Text(r.to_string(), json!({ "subset": r }))
        }
        Cmd::Utree => utree(&cx, cli.budget, cli.dot)?,
        Cmd::Tree { exprs } => tree(&cx, one(exprs)?, cli.dot)?,
        Cmd::Classify { exprs } => {
            let (x, a) = two(exprs)?;
            let p = topology::classify_point(u, a, x).map_err(domain)?;
            let c = match p.classification {
                Classification::Isolated => "Isolated",
                Classification::Accumulation => "Accumulation",
            };
            Out::Json(json!({ "classification": c, "witness_depth": p.witness_depth }))
        }
        Cmd::Derive { exprs } => {
            let a = one(exprs)?;
            let d = topology::derived_set(u, a).map_err(domain)?;
            let paths = topology::path_total(u, d, PATH_CAP).map_err(domain)?;
            let w = u.approx_of(d, cx.depth).map_err(domain)?.to_string();
            Out::Json(json!({ "paths": paths, "depth": cx.depth, "approx": w }))
        }
        Cmd::Cb { exprs } => {
            let (rank, degree) = topology::cb_rank_degree(u, one(exprs)?, cx.rank_cap).map_err(domain)?;
            Out::Json(json!({ "rank": rank, "degree": degree }))
        }
        Cmd::Perfect { exprs } => {
            let r = topology::contains_perfect_subtree(u, one(exprs)?).map_err(domain)?;
            Out::Text(r.to_string(), json!({ "perfect": r }))
        }
        Cmd::Compare { exprs } => {
            let (a, b) = two(exprs)?;
            let v = cardinality::compare_with_cap(u, a, b, cx.rank_cap).map_err(domain)?;
            let evidence = match v.evidence {
                Evidence::BothContinuum => json!({ "kind": "BothContinuum" }),
                Evidence::PerfectVsWellOrdered => json!({ "kind": "PerfectVsWellOrdered" }),
                Evidence::RankDegree { rank_a, deg_a, rank_b, deg_b } => json!({
                    "kind": "RankDegree", "rank_a": rank_a, "deg_a": deg_a, "rank_b": rank_b, "deg_b": deg_b
                }),
            };
            Out::Json(json!({ "relation": v.relation.to_string(), "evidence": evidence }))
        }
        Cmd::CardClass { exprs } => {
            let c = cardinality::classify_with_cap(u, one(exprs)?, cx.rank_cap).map_err(domain)?;
            let class = match c.class {
                Class::Finite(n) => json!({ "kind": "Finite", "count": n }),
                Class::WellOrderedInfinite { rank, degree } => {
                    json!({ "kind": "WellOrderedInfinite", "rank": rank, "degree": degree })
                }
                Class::Continuum => json!({ "kind": "Continuum" }),
            };
            let cf = match c.cofinality {
                Cofinality::None => Value::Null,
                Cofinality::Two => json!("Two"),
                Cofinality::Omega => json!("Omega"),
            };
            Out::Json(json!({
                "class": class,
                "is_cardinal": c.is_cardinal,
                "is_limit": c.is_limit,
                "cofinality": cf,
                "regular": c.regular,
                "strong_limit": c.strong_limit,
                "inaccessible": c.inaccessible,
                "strongly_inaccessible": c.strongly_inaccessible,
            }))
        }
        Cmd::Size { exprs } => {
            let a = one(exprs)?;
            let is_hf = u.is_hf(a).map_err(domain)?;
            Out::Json(match cardinality::size_of(u, a).map_err(domain)? {
                Size::Finite(n) => json!({ "size": "Finite", "count": n, "is_hf": is_hf }),
                Size::OmegaSize => json!({ "size": "Omega", "count": null, "is_hf": is_hf }),
            })
        }
        Cmd::OrdArith { op, a, b } => {
            let op = match op.as_str() {
                "add" | "+" => OrdOp::Add,
                "mul" | "*" => OrdOp::Mul,
                "pow" | "^" => OrdOp::Pow,
                _ => return Err(CliError::Usage(format!("unknown operation {op:?}; use add, mul or pow"))),
            };
            let r = cardinality::nordinal_arith_with_omega(op, ord_val(&a)?, ord_val(&b)?).map_err(domain)?;
            let v = match r {
                OrdVal::Fin(n) => json!(n),
                OrdVal::Omega => json!("omega"),
            };
            Out::Text(r.to_string(), json!({ "result": v }))
        }
        Cmd::Theorems { filter } => theorems::run(filter.as_deref()),
    })
}

fn ord_val(s: &str) -> Result<OrdVal, CliError> {
    match s.trim() {
        "omega" | "w" => Ok(OrdVal::Omega),
        t => t
            .parse()
            .map(OrdVal::Fin)
            .map_err(|_| CliError::Usage(format!("{s:?} is neither a natural number nor omega"))),
    }
}

fn truth_out(t: Truth) -> Out {
    match t {
        Truth::True => Out::Text("true".into(), json!({ "truth": "True", "witness_depth": null })),
        Truth::False { witness } => {
            let text = match witness {
                Some(n) => format!("false (approximations differ at depth {n})"),
                None => "false".into(),
            };
            Out::Text(text, json!({ "truth": "False", "witness_depth": witness }))
        }
        Truth::ConsistentUpTo(n) => Out::Text(
            format!("undecided (consistent up to depth {n})"),
            json!({ "truth": "ConsistentUpTo", "witness_depth": n }),
        ),
    }
}

fn utree(cx: &Ctx, budget: u64, dot: bool) -> Result<Out, CliError> {
    let mut en = Enumerator::new(budget);
    let count = level_count(cx.depth).to_string();
    if dot {
        let mut lines = vec!["digraph utree {".to_string()];
        let mut cur = vec![Node::root()];
        lines.push(format!("  {};", node_id(&Node::root())));
        for _ in 0..cx.depth {
            let mut next = Vec::new();
            for v in &cur {
                for w in en.successors(v).map_err(domain)? {
                    lines.push(format!("  {} -> {};", node_id(v), node_id(&w)));
                    next.push(w);
                }
            }
            cur = next;
        }
        lines.push("}".into());
        return Ok(Out::Text(lines.join("\n"), json!({ "dot": lines.join("\n") })));
    }
    let nodes: Vec<String> = en.level(cx.depth).map_err(domain)?.into_iter().map(|n| n.approx.to_string()).collect();
    let text = nodes.join("\n");
    Ok(Out::Text(text, json!({ "level": cx.depth, "count": count, "nodes": nodes })))
}

fn node_id(n: &Node) -> String {
    format!("\"{}:{}\"", n.level, n.approx)
}

/// Level `k` of the developing tree holds the elements of `F(k + 1, A)`.
fn tree(cx: &Ctx, a: SetRef, dot: bool) -> Result<Out, CliError> {
    let levels: Vec<Vec<Hf>> = (0..=cx.depth)
        .map(|k| Ok(cx.u.approx_of(a, k + 1).map_err(domain)?.elems().to_vec()))
        .collect::<Result<_, CliError>>()?;
    if dot {
        let mut lines = vec!["digraph tree {".to_string(), "  root [label=\"A\"];".to_string()];
        for (k, level) in levels.iter().enumerate() {
            for x in level {
                let id = format!("\"{k}:{x}\"");
                lines.push(format!("  {id} [label=\"{x}\"];"));
                let parent = match k {
                    0 => "root".to_string(),
                    _ => format!("\"{}:{}\"", k - 1, hf_kernel::approx(k as u32 - 1, x)),
                };
                lines.push(format!("  {parent} -> {id};"));
            }
        }
        lines.push("}".into());
        return Ok(Out::Text(lines.join("\n"), json!({ "dot": lines.join("\n") })));
    }
    let words: Vec<Vec<String>> = levels.iter().map(|l| l.iter().map(Hf::to_string).collect()).collect();
    let text = words.iter().enumerate().map(|(k, l)| format!("{k}: {}", l.join(" "))).collect::<Vec<_>>().join("\n");
    Ok(Out::Text(text, json!({ "depth": cx.depth, "levels": words })))
}
