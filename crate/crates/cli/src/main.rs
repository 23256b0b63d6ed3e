//! `relrep`: validate, search, chain and table commands over algebra files.
//!
//! Exit codes: 0 success or found, 1 negative result, 2 input error,
//! 3 resource limit.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use relrep::chain::{self, ChainError, ModelTriple};
use relrep::format::{self, FormatError};
use relrep::model::generate_closure;
use relrep::point;
use relrep::search::cnf::{decode_cnf, encode_cnf, parse_assignment};
use relrep::search::{
    nonrep_certificate, search, NonRepOptions, NonRepVerdict, SearchOptions, SearchOutcome, SearchProblem, SizeMethod,
    DEFAULT_NODE_LIMIT, DEFAULT_SCAN_CEILING,
};
use relrep::{check_representation, extract_tables, necessary_laws, FiniteAlgebra, Relation, Representation};
use serde_json::{json, Value};

const OK: u8 = 0;
const NEGATIVE: u8 = 1;
const INPUT: u8 = 2;
const LIMIT: u8 = 3;

#[derive(Parser)]
#[command(name = "relrep", version, about = "Finite algebras of binary relations under composition and intersection")]
struct Cli {
    /// Print reports as JSON documents.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check an algebra file against the laws every representable algebra obeys.
    Validate {
        /// Algebra file.
        file: PathBuf,
    },
    /// Search for a representation over a finite base.
    Search(SearchArgs),
    /// Run the chain construction on a model triple.
    Chain(ChainArgs),
    /// Print the operation tables of a concrete model.
    Tables(TablesArgs),
    /// Decode a solver assignment for a CNF exported with `search --dimacs`.
    Decode {
        /// Algebra file the CNF was exported from.
        file: PathBuf,
        /// Base size used for the export.
        #[arg(long)]
        size: usize,
        /// Solver output: signed literals, `v` and `s` lines allowed.
        assignment: PathBuf,
    },
}

#[derive(Args)]
struct SearchArgs {
    /// Algebra file.
    file: PathBuf,
    /// Base size to search.
    #[arg(long, required_unless_present = "max_size", conflicts_with = "max_size")]
    size: Option<usize>,
    /// Decide every base size from 1 up to this one.
    #[arg(long)]
    max_size: Option<usize>,
    /// Write the CNF encoding to this path instead of searching.
    #[arg(long, requires = "size")]
    dimacs: Option<PathBuf>,
    /// Search sequentially so node counts are reproducible.
    #[arg(long)]
    deterministic: bool,
    /// Skip leaves that are not minimal under permutations of the base.
    #[arg(long)]
    symmetry: bool,
    /// Stop after this many decisions and report the limit.
    #[arg(long, env = "RELREP_NODE_LIMIT", default_value_t = DEFAULT_NODE_LIMIT)]
    node_limit: u64,
}

#[derive(Args)]
struct ChainArgs {
    /// `qsymbolic` or a relation file defining z, e, r.
    #[arg(long)]
    model: String,
    /// Number of points to add after the start pair.
    #[arg(long)]
    depth: usize,
    /// Write the certificate here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct TablesArgs {
    /// Only `qsymbolic` is known.
    #[arg(long, required_unless_present = "closure", conflicts_with = "closure")]
    model: Option<String>,
    /// Relation file whose relations seed the closure.
    #[arg(long)]
    closure: Option<PathBuf>,
    /// With `--model qsymbolic`, close all eight comparison relations.
    #[arg(long, requires = "model")]
    all: bool,
}

/// A failure that ends the command with an exit code.
struct Exit(u8, String);

type Outcome = Result<u8, Exit>;

fn input_error(msg: impl Into<String>) -> Exit {
    Exit(INPUT, msg.into())
}

fn read(path: &Path) -> Result<String, Exit> {
    fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn located(path: &Path, e: FormatError) -> Exit {
    input_error(format!("{}: {e}", path.display()))
}

fn load_algebra(path: &Path) -> Result<FiniteAlgebra, Exit> {
    format::parse_algebra(&read(path)?).map_err(|e| located(path, e))
}

struct Out {
    json: bool,
}

impl Out {
    fn emit(&self, text: impl FnOnce() -> String, doc: impl FnOnce() -> Value) {
        if self.json {
            stdout(&(serde_json::to_string_pretty(&doc()).expect("json values serialize") + "\n"));
        } else {
            stdout(&text());
        }
    }
}

// A closed pipe (`relrep ... | head`) is not an error worth reporting.
fn stdout(s: &str) {
    let mut lock = io::stdout().lock();
    let _ = lock.write_all(s.as_bytes()).and_then(|()| lock.flush());
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = Out { json: cli.json };
    let result = match cli.command {
        Command::Validate { file } => validate(&out, &file),
        Command::Search(args) => search_cmd(&out, &args),
        Command::Chain(args) => chain_cmd(&out, &args),
        Command::Tables(args) => tables(&out, &args),
        Command::Decode { file, size, assignment } => decode(&out, &file, size, &assignment),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Exit(code, msg)) => {
            if out.json {
                stdout(&format!("{}\n", json!({ "status": "error", "exit": code, "message": msg })));
            } else {
                eprintln!("error: {msg}");
            }
            ExitCode::from(code)
        }
    }
}

fn validate(out: &Out, file: &Path) -> Outcome {
    let alg = load_algebra(file)?;
    let violations = necessary_laws(&alg);
    out.emit(
        || {
            if violations.is_empty() {
                "ok\n".into()
            } else {
                violations.iter().map(|v| v.describe(&alg) + "\n").collect()
            }
        },
        || {
            let list: Vec<Value> = violations
                .iter()
                .map(|v| json!({ "law": v.law, "witness": v.witness.iter().map(|&i| alg.name(i)).collect::<Vec<_>>(), "message": v.describe(&alg) }))
                .collect();
            json!({ "status": if violations.is_empty() { "ok" } else { "violations" }, "violations": list })
        },
    );
    Ok(if violations.is_empty() { OK } else { NEGATIVE })
}

fn representation_lines(rep: &Representation<Relation>) -> String {
    (0..rep.algebra.len()).map(|a| format!("{} -> {}\n", rep.algebra.name(a), rep.image(a))).collect()
}

fn representation_json(rep: &Representation<Relation>) -> Value {
    let images: serde_json::Map<String, Value> = (0..rep.algebra.len())
        .map(|a| {
            let pairs: Vec<[usize; 2]> = rep.image(a).pairs().map(|(x, y)| [x, y]).collect();
            (rep.algebra.name(a).to_string(), json!(pairs))
        })
        .collect();
    Value::Object(images)
}

fn outcome_json(n: usize, method: &str, outcome: &SearchOutcome) -> Value {
    match outcome {
        SearchOutcome::Found { representation } => {
            json!({ "base_size": n, "method": method, "status": "found", "images": representation_json(representation) })
        }
        SearchOutcome::ExhaustedNone { nodes } => {
            json!({ "base_size": n, "method": method, "status": "none", "nodes": nodes })
        }
        SearchOutcome::LimitReached { nodes } => {
            json!({ "base_size": n, "method": method, "status": "limit", "nodes": nodes })
        }
    }
}

fn outcome_line(n: usize, method: &str, outcome: &SearchOutcome) -> String {
    match outcome {
        SearchOutcome::Found { .. } => format!("size {n}: found ({method})\n"),
        SearchOutcome::ExhaustedNone { nodes } => {
            let unit = if method == "exhaustive" { "assignments" } else { "nodes" };
            format!("size {n}: none ({method}, {nodes} {unit})\n")
        }
        SearchOutcome::LimitReached { nodes } => format!("size {n}: limit reached ({method}, {nodes} nodes)\n"),
    }
}

fn search_cmd(out: &Out, args: &SearchArgs) -> Outcome {
    let alg = load_algebra(&args.file)?;
    let options = SearchOptions {
        deterministic: args.deterministic,
        symmetry_pruning: args.symmetry,
        node_limit: args.node_limit,
    };
    if let Some(max) = args.max_size {
        let report = nonrep_certificate(&alg, max, NonRepOptions { search: options, scan_ceiling: DEFAULT_SCAN_CEILING })
            .map_err(|e| input_error(e.to_string()))?;
        let method = |m: SizeMethod| match m {
            SizeMethod::Exhaustive => "exhaustive",
            SizeMethod::Search => "search",
        };
        let (code, verdict) = match &report.verdict {
            NonRepVerdict::NoRepresentation { max_size } => {
                (NEGATIVE, format!("no representation for any base size <= {max_size}"))
            }
            NonRepVerdict::Representable { base_size } => (OK, format!("representable at base size {base_size}")),
            NonRepVerdict::Inconclusive { sizes } => (LIMIT, format!("inconclusive: node limit reached at sizes {sizes:?}")),
        };
        out.emit(
            || {
                let mut s: String =
                    report.sizes.iter().map(|r| outcome_line(r.base_size, method(r.method), &r.outcome)).collect();
                if let Some(rep) = report.sizes.last().and_then(|r| r.outcome.representation()) {
                    s += &representation_lines(rep);
                }
                s + "verdict: " + &verdict + "\n"
            },
            || {
                let sizes: Vec<Value> =
                    report.sizes.iter().map(|r| outcome_json(r.base_size, method(r.method), &r.outcome)).collect();
                json!({ "verdict": report.verdict, "message": verdict, "sizes": sizes })
            },
        );
        return Ok(code);
    }

    let n = args.size.expect("clap requires --size without --max-size");
    if let Some(path) = &args.dimacs {
        if n == 0 {
            return Err(input_error("base size must be at least 1"));
        }
        let cnf = encode_cnf(&alg, n);
        fs::write(path, cnf.to_dimacs()).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
        out.emit(
            || format!("wrote {} ({} variables, {} clauses)\n", path.display(), cnf.variable_count, cnf.clauses.len()),
            || json!({ "status": "written", "path": path, "variables": cnf.variable_count, "clauses": cnf.clauses.len() }),
        );
        return Ok(OK);
    }
    let problem = SearchProblem::new(alg, n, options).map_err(|e| input_error(e.to_string()))?;
    let outcome = search(&problem);
    out.emit(
        || {
            let mut s = outcome_line(n, "search", &outcome);
            if let Some(rep) = outcome.representation() {
                s += &representation_lines(rep);
            }
            s
        },
        || outcome_json(n, "search", &outcome),
    );
    Ok(match outcome {
        SearchOutcome::Found { .. } => OK,
        SearchOutcome::ExhaustedNone { .. } => NEGATIVE,
        SearchOutcome::LimitReached { .. } => LIMIT,
    })
}

fn chain_cmd(out: &Out, args: &ChainArgs) -> Outcome {
    if args.depth == 0 {
        return Err(input_error("--depth must be at least 1"));
    }
    let model = if args.model == "qsymbolic" {
        ModelTriple::qsymbolic()
    } else {
        let path = Path::new(&args.model);
        format::parse_model_triple(&read(path)?).map_err(|e| located(path, e))?
    };
    match chain::run_chain(&model, args.depth) {
        Ok(cert) => {
            if let Some(path) = &args.output {
                fs::write(path, cert.to_text()).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
            }
            let to_stdout = args.output.is_none();
            out.emit(
                || if to_stdout { cert.to_text() } else { format!("chain n={} y={} verified\n", cert.length(), cert.anchor()) },
                || json!({ "status": "certificate", "verified": true, "certificate": cert }),
            );
            Ok(OK)
        }
        Err(ChainError::Blocked(report)) => {
            let failing = chain::check_hypotheses(&model);
            out.emit(
                || {
                    let mut s = format!("{report}\n");
                    for f in &failing {
                        s += &format!("hypothesis check: {f}\n");
                    }
                    s
                },
                || json!({ "status": "blocked", "report": report, "failing_hypotheses": failing }),
            );
            Ok(NEGATIVE)
        }
        Err(ChainError::ZeroDepth) => Err(input_error("--depth must be at least 1")),
        Err(e @ ChainError::Unverified(_)) => Err(Exit(NEGATIVE, e.to_string())),
    }
}

fn tables(out: &Out, args: &TablesArgs) -> Outcome {
    let alg = match (&args.model, &args.closure) {
        (Some(m), _) if m == "qsymbolic" => {
            let seeds = if args.all { point::all_basis_seeds() } else { point::point_seeds() };
            let model = generate_closure(seeds).map_err(|e| input_error(e.to_string()))?;
            extract_tables(&model).map_err(|e| input_error(e.to_string()))?
        }
        (Some(m), _) => return Err(input_error(format!("unknown model {m:?}; expected qsymbolic"))),
        (None, Some(path)) => {
            let file = format::parse_relations(&read(path)?).map_err(|e| located(path, e))?;
            if file.relations.is_empty() {
                return Err(input_error(format!("{}: no relations to close", path.display())));
            }
            let model = generate_closure(file.relations).map_err(|e| input_error(e.to_string()))?;
            extract_tables(&model).map_err(|e| input_error(e.to_string()))?
        }
        (None, None) => unreachable!("clap requires one source"),
    };
    out.emit(
        || format::print_algebra(&alg),
        || json!({ "elements": alg.elements(), "comp": alg.table(relrep::Op::Comp), "meet": alg.table(relrep::Op::Meet) }),
    );
    Ok(OK)
}

fn decode(out: &Out, file: &Path, n: usize, assignment: &Path) -> Outcome {
    let alg = load_algebra(file)?;
    if n == 0 {
        return Err(input_error("base size must be at least 1"));
    }
    let lits = parse_assignment(&read(assignment)?).map_err(|e| input_error(format!("{}: {e}", assignment.display())))?;
    let cnf = encode_cnf(&alg, n);
    match decode_cnf(&cnf, &lits, &alg, n) {
        Ok(rep) => {
            let verdict = check_representation(&rep);
            let ok = verdict.is_ok();
            out.emit(
                || {
                    let head = if ok { "valid representation\n" } else { "assignment decodes to an invalid representation\n" };
                    head.to_string() + &representation_lines(&rep)
                },
                || json!({ "status": if ok { "valid" } else { "invalid" }, "images": representation_json(&rep) }),
            );
            Ok(if ok { OK } else { NEGATIVE })
        }
        Err(e) => {
            out.emit(|| format!("invalid assignment: {e}\n"), || json!({ "status": "invalid", "message": e.to_string() }));
            Ok(NEGATIVE)
        }
    }
}
