//! Command-line surface: every analysis reads a project configuration and
//! prints one JSON report on stdout.
//!
//! Exit codes: 0 computed (obstructed findings included), 2 configuration
//! or input error, 3 ingestion error, 4 variable budget exceeded, 5 solver
//! invariant violation.

mod config;

pub use config::{ingest_csv, ingest_csv_bytes, write_csv, InputHash, Options, Project, ProjectConfig, SchemaRef, Source, TableSpec};

use crate::error::Error;
use crate::joins::{self, FillStatus, HornProblem, JoinProblem};
use crate::lp::Solver;
use crate::measures::{DataComplexGen, DataTable};
use crate::obstruction::{self, default_cells, DataSection};
use crate::rational::{self, Rational};
use crate::schema::{metric_warnings, Violation};
use crate::simpattr::{homology_rank, AttributeList};
use crate::transport;
use clap::{Parser, Subcommand};
use serde_json::{json, Map, Value};
use std::collections::BTreeSet;
use std::io::Write;
use std::path::PathBuf;

/// Report layout version; bump on any field change.
pub const REPORT_VERSION: &str = "1";

#[derive(Debug, Parser)]
#[command(name = "datacomplex", version, about = "Join feasibility and obstruction analysis for collections of data tables")]
pub struct Cli {
    /// Project configuration (JSON).
    #[arg(long, short, default_value = "project.json")]
    pub config: PathBuf,
    /// Overrides the configured LP variable budget.
    #[arg(long)]
    pub budget: Option<usize>,
    /// Adds lossy decimal renderings next to exact values.
    #[arg(long)]
    pub decimal: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the schema, configuration and every input file.
    Validate,
    /// Integrate out one position of a table.
    Marginal {
        table: String,
        #[arg(long)]
        drop: usize,
    },
    /// Transport distance between two tables on the same list.
    Wasserstein { t1: String, t2: String },
    /// Conditional-product join along an overlap, e.g. `--overlap 1:0`
    /// (positions in the first table, then in the second).
    Glue {
        t1: String,
        t2: String,
        #[arg(long)]
        overlap: String,
    },
    /// Fill a horn whose faces are the project's tables on the face lists.
    FillHorn {
        /// Comma-separated attribute list of the cell, e.g. `X,Y,Z`.
        #[arg(long)]
        cell: String,
        /// Index of the face left open.
        #[arg(long)]
        missing: usize,
        /// Use the explicit construction, falling back to the LP when it stalls.
        #[arg(long)]
        constructive: bool,
        /// Exact rational such as `1/3`; the horn filler needs 0.
        #[arg(long, default_value = "0")]
        slack: String,
    },
    /// Fill a full boundary within the given slack.
    FillBoundary {
        /// Comma-separated attribute list of the cell.
        #[arg(long)]
        cell: String,
        #[arg(long, default_value = "0")]
        slack: String,
    },
    /// Evaluate the obstruction cocycle on every default cell.
    Cocycle {
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value = "0")]
        slack: String,
    },
    /// Classify the obstruction into one of three cases.
    Trichotomy {
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value = "0")]
        slack: String,
    },
    /// Least slacks at which the cocycle, and its class, become trivial.
    Persistence {
        #[arg(long)]
        dim: usize,
    },
    /// Z/2 homology rank of the face-closed set of table lists.
    Homology {
        #[arg(long)]
        dim: usize,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Marginal { .. } => "marginal",
            Command::Wasserstein { .. } => "wasserstein",
            Command::Glue { .. } => "glue",
            Command::FillHorn { .. } => "fill-horn",
            Command::FillBoundary { .. } => "fill-boundary",
            Command::Cocycle { .. } => "cocycle",
            Command::Trichotomy { .. } => "trichotomy",
            Command::Persistence { .. } => "persistence",
            Command::Homology { .. } => "homology",
        }
    }

    fn arguments(&self) -> Value {
        match self {
            Command::Validate => json!({}),
            Command::Marginal { table, drop } => json!({ "table": table, "drop": drop }),
            Command::Wasserstein { t1, t2 } => json!({ "t1": t1, "t2": t2 }),
            Command::Glue { t1, t2, overlap } => json!({ "t1": t1, "t2": t2, "overlap": overlap }),
            Command::FillHorn { cell, missing, constructive, slack } => {
                json!({ "cell": cell, "missing": missing, "constructive": constructive, "slack": slack })
            }
            Command::FillBoundary { cell, slack } => json!({ "cell": cell, "slack": slack }),
            Command::Cocycle { dim, slack } | Command::Trichotomy { dim, slack } => json!({ "dim": dim, "slack": slack }),
            Command::Persistence { dim } | Command::Homology { dim } => json!({ "dim": dim }),
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Ingest(_) => 3,
        Error::BudgetExceeded { .. } => 4,
        Error::SolverInvariant(_) => 5,
        _ => 2,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match exit_code(e) {
        3 => "ingest",
        4 => "budget_exceeded",
        5 => "solver_invariant",
        _ => "config",
    }
}

struct Failure {
    error: Error,
    diagnostics: Vec<Violation>,
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        Failure { error, diagnostics: Vec::new() }
    }
}

fn parse_slack(s: &str) -> Result<Rational, Error> {
    let t = rational::parse(s).map_err(|e| Error::InvalidArgument(format!("slack: {e}")))?;
    if t < rational::zero() {
        return Err(Error::InvalidArgument(format!("negative slack {s}")));
    }
    Ok(t)
}

fn parse_cell(s: &str) -> AttributeList {
    AttributeList::new(s.split(',').map(str::trim).filter(|a| !a.is_empty()))
}

fn parse_positions(s: &str) -> Result<Vec<usize>, Error> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse().map_err(|_| Error::InvalidArgument(format!("bad position {p:?}"))))
        .collect()
}

/// `"i,j:k,l"`: positions of the shared list in each table.
fn parse_overlap(s: &str) -> Result<(Vec<usize>, Vec<usize>), Error> {
    let (a, b) = s.split_once(':').ok_or_else(|| Error::InvalidArgument(format!("overlap {s:?} needs a ':'")))?;
    Ok((parse_positions(a)?, parse_positions(b)?))
}

fn approx(v: &mut Map<String, Value>, key: &str, r: Option<&Rational>, on: bool) {
    if on {
        v.insert(format!("{key}_approx"), r.map_or(json!("inf"), |r| json!(rational::to_f64(r))));
    }
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

fn complex_and_section(p: &Project, dim: usize) -> Result<(DataComplexGen, DataSection, Vec<AttributeList>), Error> {
    if dim == 0 {
        return Err(Error::InvalidArgument("--dim must be at least 1".into()));
    }
    let gens: Vec<DataTable> = p.tables.iter().map(|(_, t)| t.clone()).collect();
    let c = DataComplexGen::new(p.schema.clone(), gens)?.with_permutations(p.config.options.closed_under_permutation);
    let level = p.tables.iter().filter(|(_, t)| t.list().len() == dim).map(|(_, t)| t.clone());
    let sigma = DataSection::from_tables(dim - 1, level)?;
    let cells = default_cells(&sigma)?;
    Ok((c, sigma, cells))
}

fn horn(p: &Project, cell: &AttributeList, missing: Option<usize>, slack: Rational) -> Result<HornProblem, Error> {
    let mut faces = std::collections::BTreeMap::new();
    for j in 0..cell.len() {
        if Some(j) != missing {
            faces.insert(j, p.table_on(&cell.face(j)?)?.clone());
        }
    }
    HornProblem::new(cell.clone(), faces, slack)
}

/// Runs one command; the returned map is merged into the report root.
/// The exit code is nonzero only for budget overruns reported as status.
fn execute(cli: &Cli, p: &Project) -> Result<(Map<String, Value>, i32), Error> {
    let budget = cli.budget.or(p.budget()).unwrap_or(crate::lp::DEFAULT_VARIABLE_BUDGET);
    let solver = Solver::new(budget);
    let schema = &p.schema;
    let mut out = Map::new();
    let mut code = 0;
    match &cli.command {
        Command::Validate => {
            out.insert("valid".into(), json!(true));
            out.insert("tables".into(), to_value(&p.tables.iter().map(|(n, t)| json!({ "name": n, "list": t.list(), "atoms": t.atoms().len(), "mass": rational::fmt(&t.total_mass()) })).collect::<Vec<_>>()));
            out.insert("warnings".into(), to_value(&metric_warnings(schema)));
        }
        Command::Marginal { table, drop } => {
            let t = p.table(table)?.marginalize(*drop)?;
            out.insert("table".into(), to_value(&t.to_doc(schema)?));
        }
        Command::Wasserstein { t1, t2 } => {
            let (d, coupling) = transport::optimal_coupling_with(&solver, schema, p.table(t1)?, p.table(t2)?)?;
            out.insert("distance".into(), json!(rational::fmt(&d)));
            approx(&mut out, "distance", Some(&d), cli.decimal);
            out.insert("coupling".into(), to_value(&coupling.to_doc(schema)?));
        }
        Command::Glue { t1, t2, overlap } => {
            let (m1, m2) = parse_overlap(overlap)?;
            let jp = JoinProblem::from_maps(p.table(t1)?.clone(), p.table(t2)?.clone(), m1, m2)?;
            let (ok, witness) = joins::joins_feasible(&jp)?;
            out.insert("feasible".into(), json!(ok));
            if let Some(w) = witness {
                out.insert("table".into(), to_value(&w.to_doc(schema)?));
            }
        }
        Command::FillHorn { cell, missing, constructive, slack } => {
            let h = horn(p, &parse_cell(cell), Some(*missing), parse_slack(slack)?)?;
            let r = if *constructive {
                joins::fill_horn_constructive(&solver, schema, &h)?
            } else {
                joins::fill_horn_lp(&solver, schema, &h)?
            };
            if r.status == FillStatus::BudgetExceeded {
                code = 4;
            }
            out.extend(to_value(&r.to_doc(schema)?).as_object().cloned().unwrap_or_default());
        }
        Command::FillBoundary { cell, slack } => {
            let h = horn(p, &parse_cell(cell), None, parse_slack(slack)?)?;
            let r = joins::fill_boundary(&solver, schema, &h)?;
            if r.status == FillStatus::BudgetExceeded {
                code = 4;
            }
            out.extend(to_value(&r.to_doc(schema)?).as_object().cloned().unwrap_or_default());
        }
        Command::Cocycle { dim, slack } => {
            let (c, sigma, cells) = complex_and_section(p, *dim)?;
            let r = obstruction::evaluate_cocycle(&solver, &c, &sigma, &cells, &parse_slack(slack)?)?;
            out.insert("all_trivial".into(), json!(r.all_trivial()));
            out.extend(to_value(&r.to_doc(schema)?).as_object().cloned().unwrap_or_default());
        }
        Command::Trichotomy { dim, slack } => {
            let (c, sigma, cells) = complex_and_section(p, *dim)?;
            let v = obstruction::classify_trichotomy(&solver, &c, &sigma, &cells, &parse_slack(slack)?)?;
            out.extend(to_value(&v.to_doc(schema)?).as_object().cloned().unwrap_or_default());
        }
        Command::Persistence { dim } => {
            let (c, sigma, cells) = complex_and_section(p, *dim)?;
            let r = obstruction::persistence(&solver, &c, &sigma, &cells)?;
            out.extend(to_value(&r.to_doc(schema)?).as_object().cloned().unwrap_or_default());
            approx(&mut out, "t_n", r.t_n.as_ref(), cli.decimal);
            approx(&mut out, "t_prime_n", r.t_prime_n.as_ref(), cli.decimal);
        }
        Command::Homology { dim } => {
            let mut lists: BTreeSet<AttributeList> = BTreeSet::new();
            let mut todo: Vec<AttributeList> = p.tables.iter().map(|(_, t)| t.list().clone()).collect();
            while let Some(l) = todo.pop() {
                if l.len() >= 2 {
                    for j in 0..l.len() {
                        todo.push(l.face(j)?);
                    }
                }
                lists.insert(l);
            }
            out.insert("rank".into(), json!(homology_rank(lists.iter(), *dim)?));
            out.insert("coefficients".into(), json!("Z/2"));
        }
    }
    Ok((out, code))
}

/// Runs a parsed command line, returning the exit code and the report.
pub fn run(cli: &Cli) -> (i32, Value) {
    let mut report = Map::new();
    report.insert("version".into(), json!(REPORT_VERSION));
    report.insert("command".into(), json!(cli.command.name()));
    report.insert("arguments".into(), cli.command.arguments());
    let result = Project::load(&cli.config).map_err(|(error, diagnostics)| Failure { error, diagnostics }).and_then(|p| {
        report.insert("inputs".into(), to_value(&p.inputs));
        execute(cli, &p).map_err(Failure::from)
    });
    let code = match result {
        Ok((out, code)) => {
            report.extend(out);
            code
        }
        Err(f) => {
            let code = exit_code(&f.error);
            if matches!(cli.command, Command::Validate) {
                report.insert("valid".into(), json!(false));
            }
            report.insert(
                "error".into(),
                json!({ "kind": error_kind(&f.error), "message": f.error.to_string(), "diagnostics": to_value(&f.diagnostics) }),
            );
            code
        }
    };
    (code, Value::Object(report))
}

/// Entry point for the binary.
pub fn main_entry() -> i32 {
    let cli = Cli::parse();
    let (code, report) = run(&cli);
    // a closed pipe downstream is not our failure
    let _ = writeln!(std::io::stdout(), "{}", serde_json::to_string_pretty(&report).expect("reports serialize"));
    if let Some(e) = report.get("error") {
        eprintln!("error: {}", e["message"].as_str().unwrap_or_default());
    }
    code
}
