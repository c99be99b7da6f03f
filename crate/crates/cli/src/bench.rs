//! Corpus benchmark: one CSV row per (instance, algorithm).

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use clap::Args;

use ddt_core::model::{rational_to_f64, Time};
use ddt_core::solve::{solve, Algorithm, SolveOptions, SolveReport};

use crate::{load_instance, time_text, AlgoArg, CliError};

pub const WORKERS_ENV: &str = "DDT_WORKERS";

#[derive(Args)]
pub struct BenchArgs {
    /// Directory of instance files (`*.json`, sidecars excluded).
    corpus: PathBuf,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [AlgoArg::Auto, AlgoArg::Oracle])]
    algos: Vec<AlgoArg>,
    /// Runs per (instance, algorithm); the fastest is reported.
    #[arg(long, default_value_t = 1)]
    repeat: usize,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; overrides the DDT_WORKERS environment variable.
    #[arg(long)]
    workers: Option<usize>,
    /// Exit nonzero when any instance fails to load or solve.
    #[arg(long)]
    fail_on_error: bool,
}

struct Row {
    instance: String,
    algorithm: Algorithm,
    outcome: Result<(SolveReport, Duration), String>,
}

fn corpus_files(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let entries = std::fs::read_dir(dir).map_err(|source| CliError::Io {
        path: dir.to_owned(),
        source,
    })?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            let name = p.file_name().and_then(|n| n.to_str()).unwrap_or("");
            name.ends_with(".json") && !name.ends_with(".sidecar.json")
        })
        .collect();
    files.sort();
    Ok(files)
}

fn worker_count(flag: Option<usize>) -> Result<usize, CliError> {
    if let Some(n) = flag {
        return Ok(n.max(1));
    }
    match std::env::var(WORKERS_ENV) {
        Ok(v) => v
            .parse::<usize>()
            .map(|n| n.max(1))
            .map_err(|_| CliError::Usage(format!("{WORKERS_ENV} must be a positive integer, got `{v}`"))),
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

fn bench_file(path: &Path, algos: &[Algorithm], repeat: usize) -> Vec<Row> {
    let name = path.file_name().map_or_else(String::new, |n| n.to_string_lossy().into_owned());
    let inst = match load_instance(path) {
        Ok(i) => i,
        Err(e) => {
            return algos
                .iter()
                .map(|&algorithm| Row {
                    instance: name.clone(),
                    algorithm,
                    outcome: Err(e.to_string()),
                })
                .collect()
        }
    };
    let opts = SolveOptions::default();
    algos
        .iter()
        .map(|&algorithm| {
            let mut best: Option<(SolveReport, Duration)> = None;
            let mut outcome = Err(String::new());
            for _ in 0..repeat {
                let start = Instant::now();
                match solve(&inst, algorithm, &opts) {
                    Ok(r) => {
                        let took = start.elapsed();
                        if best.as_ref().is_none_or(|(_, d)| took < *d) {
                            best = Some((r, took));
                        }
                    }
                    Err(e) => {
                        outcome = Err(e.to_string());
                        break;
                    }
                }
            }
            if let Some(b) = best {
                outcome = Ok(b);
            }
            Row {
                instance: name.clone(),
                algorithm,
                outcome,
            }
        })
        .collect()
}

pub fn run(args: BenchArgs) -> Result<(), CliError> {
    let algos: Vec<Algorithm> = args.algos.iter().map(|&a| a.into()).collect();
    if algos.contains(&Algorithm::Order) {
        return Err(CliError::Usage("the order solver needs a per-instance order and cannot be benchmarked".into()));
    }
    if args.repeat == 0 {
        return Err(CliError::Usage("--repeat must be at least 1".into()));
    }
    let files = corpus_files(&args.corpus)?;
    let workers = worker_count(args.workers)?.min(files.len().max(1));

    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<(usize, Vec<Row>)>> = Mutex::new(Vec::with_capacity(files.len()));
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(path) = files.get(i) else { break };
                let rows = bench_file(path, &algos, args.repeat);
                results.lock().expect("no worker panicked").push((i, rows));
            });
        }
    });
    let mut results = results.into_inner().expect("no worker panicked");
    results.sort_by_key(|(i, _)| *i);
    let rows: Vec<Row> = results.into_iter().flat_map(|(_, r)| r).collect();

    let mut by_instance: BTreeMap<&str, Vec<&Time>> = BTreeMap::new();
    for r in &rows {
        if let Ok((rep, _)) = &r.outcome {
            by_instance.entry(&r.instance).or_default().push(&rep.time);
        }
    }
    let agreement = |inst: &str| -> &'static str {
        match by_instance.get(inst) {
            Some(ts) if ts.len() >= 2 => {
                if ts.iter().all(|t| *t == ts[0]) {
                    "agree"
                } else {
                    "disagree"
                }
            }
            _ => "",
        }
    };

    let sink: Box<dyn Write> = match &args.out {
        Some(p) => Box::new(std::fs::File::create(p).map_err(|source| CliError::Io {
            path: p.clone(),
            source,
        })?),
        None => Box::new(std::io::stdout().lock()),
    };
    let mut w = csv::Writer::from_writer(sink);
    w.write_record([
        "instance",
        "algorithm",
        "resolved",
        "status",
        "optimum",
        "optimum_decimal",
        "wall_ms",
        "states",
        "width",
        "invocations",
        "agreement",
        "error",
    ])?;
    let opt = |x: Option<String>| x.unwrap_or_default();
    let mut errors = 0;
    for r in &rows {
        let record = match &r.outcome {
            Ok((rep, took)) => [
                r.instance.clone(),
                r.algorithm.name().to_string(),
                rep.algorithm.name().to_string(),
                if rep.time.is_finite() { "ok" } else { "infeasible" }.to_string(),
                time_text(&rep.time),
                rep.time.finite().map_or_else(|| "inf".into(), |x| format!("{:.6}", rational_to_f64(x))),
                format!("{:.3}", took.as_secs_f64() * 1e3),
                opt(rep.stats.states.map(|x| x.to_string())),
                opt(rep.stats.width.map(|x| x.to_string())),
                opt(rep.stats.invocations.map(|x| x.to_string())),
                agreement(&r.instance).to_string(),
                String::new(),
            ],
            Err(msg) => {
                errors += 1;
                [
                    r.instance.clone(),
                    r.algorithm.name().to_string(),
                    String::new(),
                    "error".into(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    agreement(&r.instance).to_string(),
                    msg.clone(),
                ]
            }
        };
        w.write_record(&record)?;
    }
    w.flush().map_err(|e| CliError::Csv(e.into()))?;
    drop(w);

    print_matrix(&rows, &algos);
    if by_instance.keys().any(|i| agreement(i) == "disagree") {
        return Err(CliError::Disagreement);
    }
    if args.fail_on_error && errors > 0 {
        return Err(CliError::BenchErrors(errors));
    }
    Ok(())
}

/// Pairwise agreement counts on stderr, keyed by requested algorithm.
fn print_matrix(rows: &[Row], algos: &[Algorithm]) {
    if algos.len() < 2 || rows.is_empty() {
        return;
    }
    let mut times: BTreeMap<(&str, usize), &Time> = BTreeMap::new();
    for (i, r) in rows.iter().enumerate() {
        if let Ok((rep, _)) = &r.outcome {
            times.insert((&r.instance, i % algos.len()), &rep.time);
        }
    }
    eprintln!("agreement (agreed/compared):");
    for (i, a) in algos.iter().enumerate() {
        for (j, b) in algos.iter().enumerate().skip(i + 1) {
            let (mut same, mut total) = (0, 0);
            for ((inst, x), t) in &times {
                if *x == i {
                    if let Some(u) = times.get(&(*inst, j)) {
                        total += 1;
                        same += (t == u) as usize;
                    }
                }
            }
            eprintln!("  {a} vs {b}: {same}/{total}");
        }
    }
}
