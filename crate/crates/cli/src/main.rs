mod bench;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use thiserror::Error;

use ddt_core::decomp::{heuristic_decomposition, AdjGraph, Heuristic};
use ddt_core::gadgets::{build_hardness_instance, GadgetError};
use ddt_core::generate::{random_graph, random_path, tree_intersection, GenError, GraphParams, PathParams, TreeParams};
use ddt_core::intersect::{thickness, IntersectionGraph};
use ddt_core::model::io::{parse_instance, parse_schedule, schedule_to_json, serialize_instance};
use ddt_core::model::{format_rational, rational_to_f64, validate_schedule, Instance, Mode, ModelError, Time};
use ddt_core::solve::{solve, Algorithm, SolveError, SolveOptions, SolveReport};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Model { path: PathBuf, source: ModelError },
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error(transparent)]
    Gadget(#[from] GadgetError),
    #[error("{0}")]
    Csv(#[from] csv::Error),
    #[error("schedule rejected")]
    Rejected,
    #[error("exact solvers disagree")]
    Disagreement,
    #[error("{0} instance(s) failed")]
    BenchErrors(usize),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Gen(_) | CliError::Gadget(_) => 2,
            CliError::Disagreement => 3,
            _ => 1,
        }
    }
}

#[derive(Parser)]
#[command(name = "ddt", version, about = "Exact solvers for cooperative drone delivery")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute an optimal delivery and print a JSON report.
    Solve(SolveArgs),
    /// Check a schedule against an instance.
    Verify(VerifyArgs),
    /// Write a generated instance.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Inspect the agent intersection graph.
    Isect {
        instance: PathBuf,
        /// Print Graphviz instead of a JSON summary.
        #[arg(long)]
        dot: bool,
    },
    /// Run several solvers over a directory of instances and print CSV.
    Bench(bench::BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AlgoArg {
    Auto,
    Path,
    Tree,
    Tw,
    Order,
    Oracle,
}

impl From<AlgoArg> for Algorithm {
    fn from(a: AlgoArg) -> Self {
        match a {
            AlgoArg::Auto => Algorithm::Auto,
            AlgoArg::Path => Algorithm::Path,
            AlgoArg::Tree => Algorithm::Tree,
            AlgoArg::Tw => Algorithm::Tw,
            AlgoArg::Order => Algorithm::Order,
            AlgoArg::Oracle => Algorithm::Oracle,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DecompArg {
    MinFill,
    MinDegree,
}

impl From<DecompArg> for Heuristic {
    fn from(d: DecompArg) -> Self {
        match d {
            DecompArg::MinFill => Heuristic::MinFill,
            DecompArg::MinDegree => Heuristic::MinDegree,
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    #[arg(long, value_enum, default_value_t = AlgoArg::Auto)]
    algo: AlgoArg,
    /// Elimination heuristic for the treewidth solver.
    #[arg(long, value_enum, default_value_t = DecompArg::MinFill)]
    decomp: DecompArg,
    /// Agent ids for `--algo order`, comma separated.
    #[arg(long, value_delimiter = ',')]
    order: Option<Vec<String>>,
    /// Longest agent sequence the oracle enumerates.
    #[arg(long)]
    max_len: Option<usize>,
    /// Also print a floating-point approximation of the optimum.
    #[arg(long)]
    decimal: bool,
    /// Write the schedule alone to this file.
    #[arg(long)]
    schedule_out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Sp,
    Fp,
}

#[derive(Args)]
struct VerifyArgs {
    instance: PathBuf,
    schedule: PathBuf,
    #[arg(long, value_enum, default_value_t = ModeArg::Sp)]
    mode: ModeArg,
}

#[derive(Args)]
struct GenCommon {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum GenKind {
    RandomPath {
        #[command(flatten)]
        common: GenCommon,
        #[arg(long, default_value_t = 8)]
        positions: usize,
        #[arg(long, default_value_t = 4)]
        agents: usize,
        #[arg(long, default_value_t = 10)]
        max_len: i64,
        #[arg(long, value_delimiter = ',', default_values_t = [1, 2, 3, 5])]
        speeds: Vec<i64>,
    },
    RandomGraph {
        #[command(flatten)]
        common: GenCommon,
        #[arg(long, default_value_t = 7)]
        vertices: usize,
        #[arg(long, default_value_t = 4)]
        agents: usize,
        #[arg(long, default_value_t = 4)]
        max_area: usize,
        #[arg(long, default_value_t = 0.25)]
        extra_edge_prob: f64,
        #[arg(long, default_value_t = 10)]
        max_len: i64,
        #[arg(long, value_delimiter = ',', default_values_t = [1, 2, 3, 5])]
        speeds: Vec<i64>,
    },
    TreeIntersection {
        #[command(flatten)]
        common: GenCommon,
        #[arg(long, default_value_t = 5)]
        agents: usize,
        #[arg(long, default_value_t = 2)]
        max_private: usize,
        #[arg(long, default_value_t = 2)]
        max_shared: usize,
        #[arg(long, default_value_t = 10)]
        max_len: i64,
        #[arg(long, value_delimiter = ',', default_values_t = [1, 2, 3, 5])]
        speeds: Vec<i64>,
    },
    /// Hardness construction for a PartitionInto-k instance.
    Gadget {
        #[command(flatten)]
        common: GenCommon,
        /// Values, comma separated and non-increasing.
        #[arg(long, value_delimiter = ',', required = true)]
        p: Vec<u64>,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        an: u64,
        /// Construction metadata; defaults to `<out>.sidecar.json` next to `--out`.
        #[arg(long)]
        sidecar: Option<PathBuf>,
    },
}

pub fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

pub fn load_instance(path: &Path) -> Result<Instance, CliError> {
    parse_instance(&read(path)?).map_err(|source| CliError::Model {
        path: path.to_owned(),
        source,
    })
}

pub fn time_text(t: &Time) -> String {
    match t {
        Time::Finite(r) => format_rational(r),
        Time::Infinite => "inf".into(),
    }
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json serializes"));
}

fn report_json(inst: &Instance, r: &SolveReport, ms: f64, decimal: bool) -> Value {
    let mut out = json!({
        "algorithm": r.algorithm.name(),
        "optimum": time_text(&r.time),
        "sequence": r.sequence.as_ref().map(|s| s.iter().map(|&a| inst.agents[a].id.clone()).collect::<Vec<_>>()),
        "schedule": r.schedule.as_ref().map(|s| schedule_to_json(inst, s)),
        "wall_time_ms": ms,
        "stats": {
            "states": r.stats.states,
            "width": r.stats.width,
            "invocations": r.stats.invocations,
        },
    });
    if decimal {
        out["optimum_decimal"] = match &r.time {
            Time::Finite(x) => json!(rational_to_f64(x)),
            Time::Infinite => json!("inf"),
        };
    }
    out
}

fn cmd_solve(a: SolveArgs) -> Result<(), CliError> {
    let inst = load_instance(&a.instance)?;
    let opts = SolveOptions {
        order: a.order,
        heuristic: a.decomp.into(),
        oracle_max_len: a.max_len,
    };
    let start = Instant::now();
    let report = solve(&inst, a.algo.into(), &opts)?;
    let ms = start.elapsed().as_secs_f64() * 1e3;
    if let (Some(path), Some(s)) = (&a.schedule_out, &report.schedule) {
        let text = serde_json::to_string_pretty(&schedule_to_json(&inst, s)).expect("json serializes");
        write(path, &text)?;
    }
    print_json(&report_json(&inst, &report, ms, a.decimal));
    Ok(())
}

fn cmd_verify(a: VerifyArgs) -> Result<(), CliError> {
    let inst = load_instance(&a.instance)?;
    let sched = parse_schedule(&inst, &read(&a.schedule)?).map_err(|source| CliError::Model {
        path: a.schedule.clone(),
        source,
    })?;
    let mode = match a.mode {
        ModeArg::Sp => Mode::Sp,
        ModeArg::Fp => Mode::Fp,
    };
    match validate_schedule(&inst, &sched, mode) {
        Ok(v) => {
            print_json(&json!({
                "feasible": true,
                "delivery_time": format_rational(&v.delivery_time),
                "warnings": v.warnings,
            }));
            Ok(())
        }
        Err(e) => {
            print_json(&json!({
                "feasible": false,
                "violations": e.violations.iter().map(ToString::to_string).collect::<Vec<_>>(),
            }));
            Err(CliError::Rejected)
        }
    }
}

fn emit(common: &GenCommon, inst: &Instance) -> Result<(), CliError> {
    let text = serialize_instance(inst);
    match &common.out {
        Some(path) => write(path, &(text + "\n")),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn sidecar_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("gadget");
    out.with_file_name(format!("{stem}.sidecar.json"))
}

fn cmd_gen(kind: GenKind) -> Result<(), CliError> {
    match kind {
        GenKind::RandomPath {
            common,
            positions,
            agents,
            max_len,
            speeds,
        } => {
            let p = PathParams {
                positions,
                agents,
                max_len,
                speeds,
            };
            emit(&common, &random_path(common.seed, &p)?)
        }
        GenKind::RandomGraph {
            common,
            vertices,
            agents,
            max_area,
            extra_edge_prob,
            max_len,
            speeds,
        } => {
            let p = GraphParams {
                vertices,
                agents,
                max_area,
                extra_edge_prob,
                max_len,
                speeds,
            };
            emit(&common, &random_graph(common.seed, &p)?)
        }
        GenKind::TreeIntersection {
            common,
            agents,
            max_private,
            max_shared,
            max_len,
            speeds,
        } => {
            let p = TreeParams {
                agents,
                max_private,
                max_shared,
                max_len,
                speeds,
            };
            emit(&common, &tree_intersection(common.seed, &p)?)
        }
        GenKind::Gadget {
            common,
            p,
            k,
            an,
            sidecar,
        } => {
            let (inst, spec) = build_hardness_instance(&p, k, an)?;
            emit(&common, &inst)?;
            let side = sidecar.or_else(|| common.out.as_deref().map(sidecar_path));
            if let Some(path) = side {
                let text = serde_json::to_string_pretty(&spec.to_json()).expect("json serializes");
                write(&path, &(text + "\n"))?;
            }
            Ok(())
        }
    }
}

fn cmd_isect(path: &Path, dot: bool) -> Result<(), CliError> {
    let inst = load_instance(path)?;
    let ig = IntersectionGraph::build(&inst);
    if dot {
        print!("{}", ig.to_dot(&inst));
        return Ok(());
    }
    let td = heuristic_decomposition(&AdjGraph::from_intersection(&ig), Heuristic::MinFill);
    print_json(&json!({
        "agents": ig.agent_count(),
        "edges": ig.edge_count(),
        "simple": ig.is_simple(),
        "max_degree": ig.max_degree(),
        "thickness": thickness(&inst),
        "forest": ig.is_forest(),
        "path_graph": inst.graph.is_path(),
        "min_fill_width": td.width(),
    }));
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Gen { kind } => cmd_gen(kind),
        Command::Isect { instance, dot } => cmd_isect(&instance, dot),
        Command::Bench(a) => bench::run(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
