//! Acceptance suite: one PASS/FAIL line per criterion, then a nonzero exit
//! if any criterion failed. Runs without the libtest harness so the lines
//! are always printed.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use ddt_core::decomp::events::path_event_sequence;
use ddt_core::decomp::{exact_treewidth, make_nice, validate_nice, AdjGraph, Heuristic};
use ddt_core::gadgets::{build_hardness_instance, partition_into_k_checker, three_to_kpartition};
use ddt_core::intersect::{simplify_intersections, thickness, IntersectionGraph};
use ddt_core::model::{format_rational, int, validate_schedule, Instance, Mode, Rational, Schedule, Time};
use ddt_core::oracle::brute_force_opt;
use ddt_core::order_solver::{order_from_ids, solve_fixed_order};
use ddt_core::path_solver::solve_path;
use ddt_core::solve::{choose_algorithm, solve, Algorithm, SolveOptions};
use ddt_core::tree_solver::{check_tree_intersection, solve_tree_intersection};
use ddt_core::tw_solver::{augment_with_terminals, decompose, solve_treewidth};

use common::{four_agents, graph_corpus, path_corpus, tree_corpus};

const FIG1_BUDGET: Duration = Duration::from_secs(1);
const PATH_BUDGET: Duration = Duration::from_secs(60);
const TW_BUDGET: Duration = Duration::from_secs(300);
const GADGET_BUDGET: Duration = Duration::from_secs(60);

const PATH_INSTANCES: u64 = 240;
const TW_INSTANCES: u64 = 120;
const TREE_INSTANCES: u64 = 60;
const SCALING_INSTANCES: u64 = 20;
const MAX_TREE_INVOCATIONS: usize = 4;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn show(t: &Time) -> String {
    match t {
        Time::Finite(r) => format_rational(r),
        Time::Infinite => "inf".into(),
    }
}

fn within(start: Instant, budget: Duration) -> Result<(), String> {
    let took = start.elapsed();
    ensure(took < budget, || format!("took {took:.2?}, budget {budget:?}"))
}

fn schedule_time(inst: &Instance, sched: &Option<Schedule>) -> Result<Rational, String> {
    let sched = sched.as_ref().ok_or("no schedule returned")?;
    validate_schedule(inst, sched, Mode::Sp)
        .map(|v| v.delivery_time)
        .map_err(|e| e.to_string())
}

fn four_agent_example() -> Check {
    let start = Instant::now();
    let inst = four_agents();
    let five = Time::Finite(int(5));
    let tw = solve_treewidth(&inst);
    let oracle = brute_force_opt(&inst, None);
    let order = order_from_ids(&inst, &["blue", "green", "red"]).map_err(|e| e.to_string())?;
    let (fixed, _, fixed_sched) = solve_fixed_order(&inst, &order).map_err(|e| e.to_string())?;
    for (name, time, sched) in [
        ("tw", &tw.time, &tw.schedule),
        ("oracle", &oracle.time, &oracle.schedule),
        ("order", &fixed, &fixed_sched),
    ] {
        ensure(*time == five, || format!("{name} gave {}", show(time)))?;
        let got = schedule_time(&inst, sched).map_err(|e| format!("{name}: {e}"))?;
        ensure(got == int(5), || format!("{name} schedule validates at {}", format_rational(&got)))?;
    }
    within(start, FIG1_BUDGET)?;
    Ok(format!("tw = oracle = order(blue,green,red) = 5 in {:.2?}", start.elapsed()))
}

fn path_vs_oracle() -> Check {
    let start = Instant::now();
    let corpus = path_corpus(PATH_INSTANCES);
    for (seed, inst) in &corpus {
        let dp = solve_path(inst).map_err(|e| format!("seed {seed}: {e}"))?;
        let want = brute_force_opt(inst, None).time;
        ensure(dp.time == want, || format!("seed {seed}: dp {} oracle {}", show(&dp.time), show(&want)))?;
    }
    within(start, PATH_BUDGET)?;
    Ok(format!("{} path instances agree in {:.2?}", corpus.len(), start.elapsed()))
}

fn tw_vs_oracle() -> Check {
    let start = Instant::now();
    let corpus = graph_corpus(TW_INSTANCES);
    let mut multi = 0;
    for (seed, inst) in &corpus {
        if !IntersectionGraph::build(inst).is_simple() {
            multi += 1;
        }
        let dp = solve_treewidth(inst);
        let want = brute_force_opt(inst, None).time;
        ensure(dp.time == want, || format!("seed {seed}: dp {} oracle {}", show(&dp.time), show(&want)))?;
    }
    ensure(multi > 0, || "corpus has no multi-vertex overlaps".into())?;
    within(start, TW_BUDGET)?;
    Ok(format!(
        "{} instances ({multi} with multi-vertex overlaps) agree in {:.2?}",
        corpus.len(),
        start.elapsed()
    ))
}

fn transformation() -> Check {
    let corpus = graph_corpus(TW_INSTANCES);
    for (seed, inst) in &corpus {
        let (simple, _) = simplify_intersections(inst);
        let (before, after) = (brute_force_opt(inst, None).time, brute_force_opt(&simple, None).time);
        ensure(before == after, || format!("seed {seed}: OPT {} became {}", show(&before), show(&after)))?;
        let (d0, d1) = (
            IntersectionGraph::build(inst).max_degree(),
            IntersectionGraph::build(&simple).max_degree(),
        );
        ensure(d1 <= d0 + 1, || format!("seed {seed}: max degree {d0} became {d1}"))?;
        ensure(IntersectionGraph::build(&simple).is_simple(), || format!("seed {seed}: result not simple"))?;
    }
    Ok(format!("{} instances keep OPT and satisfy the degree bound", corpus.len()))
}

fn tree_algorithm() -> Check {
    let corpus = tree_corpus(TREE_INSTANCES);
    let mut most = 0;
    for (seed, inst) in &corpus {
        check_tree_intersection(inst, &IntersectionGraph::build(inst)).map_err(|e| format!("seed {seed}: {e}"))?;
        let sol = solve_tree_intersection(inst).map_err(|e| format!("seed {seed}: {e}"))?;
        let want = brute_force_opt(inst, None).time;
        ensure(sol.time == want, || format!("seed {seed}: tree {} oracle {}", show(&sol.time), show(&want)))?;
        ensure(sol.invocations <= MAX_TREE_INVOCATIONS, || {
            format!("seed {seed}: {} fixed-order invocations", sol.invocations)
        })?;
        most = most.max(sol.invocations);
    }
    Ok(format!("{} instances agree, at most {most} fixed-order invocations", corpus.len()))
}

fn interval_identity() -> Check {
    let corpus = path_corpus(PATH_INSTANCES);
    for (seed, inst) in &corpus {
        let seq = path_event_sequence(inst).map_err(|e| format!("seed {seed}: {e}"))?;
        let bag = seq.max_bag() as isize - 1;
        let sigma = thickness(inst) as isize - 1;
        let width = seq.to_tree_decomposition().width();
        let tw = exact_treewidth(&AdjGraph::from_intersection(&IntersectionGraph::build(inst))) as isize;
        ensure(bag == sigma && sigma == width && width == tw, || {
            format!("seed {seed}: bag-1 {bag}, sigma-1 {sigma}, width {width}, treewidth {tw}")
        })?;
    }
    Ok(format!("{} path instances: max bag - 1 = sigma - 1 = width = treewidth", corpus.len()))
}

/// `(n - 1 + 2P)k + 2nk + n + k - 1`, the yes-direction delivery time bound.
fn yes_bound(n: u64, total: u64, k: u64) -> u64 {
    (n - 1 + 2 * total) * k + 2 * n * k + n + k - 1
}

fn gadget_separation() -> Check {
    let mut lines = Vec::new();
    for (p, yes) in [([3u64, 2, 1], true), ([5, 2, 1], false)] {
        let start = Instant::now();
        let (inst, spec) = build_hardness_instance(&p, 2, 1).map_err(|e| e.to_string())?;
        ensure(choose_algorithm(&inst) == Algorithm::Path, || format!("{p:?}: not a path instance"))?;
        ensure(partition_into_k_checker(&p, 2).is_some() == yes, || format!("{p:?}: checker disagrees"))?;
        let sol = solve_path(&inst).map_err(|e| e.to_string())?;
        let opt = sol.time.finite().cloned().ok_or_else(|| format!("{p:?}: infeasible"))?;
        within(start, GADGET_BUDGET)?;
        if yes {
            let bound = yes_bound(p.len() as u64, spec.total, 2);
            ensure(Rational::from_integer(bound.into()) <= spec.d, || format!("{p:?}: yes bound {bound} exceeds d"))?;
            ensure(opt <= spec.d, || format!("{p:?}: OPT {} > d {}", format_rational(&opt), format_rational(&spec.d)))?;
        } else {
            ensure(opt > spec.d, || format!("{p:?}: OPT {} <= d {}", format_rational(&opt), format_rational(&spec.d)))?;
        }
        lines.push(format!(
            "{p:?}: OPT ~{:.2} {} d = {}",
            ddt_core::model::rational_to_f64(&opt),
            if yes { "<=" } else { ">" },
            format_rational(&spec.d)
        ));
    }
    Ok(lines.join("; "))
}

/// Direct search for a split of `p` into triples of equal sum.
fn three_partition(p: &[u64]) -> bool {
    fn go(p: &[u64], used: &mut [bool], target: u64) -> bool {
        let Some(first) = used.iter().position(|&u| !u) else {
            return true;
        };
        used[first] = true;
        for j in first + 1..p.len() {
            for l in j + 1..p.len() {
                if !used[j] && !used[l] && p[first] + p[j] + p[l] == target {
                    used[j] = true;
                    used[l] = true;
                    if go(p, used, target) {
                        return true;
                    }
                    used[j] = false;
                    used[l] = false;
                }
            }
        }
        used[first] = false;
        false
    }
    let m = p.len() as u64 / 3;
    let total: u64 = p.iter().sum();
    total.is_multiple_of(m) && go(p, &mut vec![false; p.len()], total / m)
}

/// Non-decreasing sequences of `len` values in `1..=max`; yes/no status
/// does not depend on the order of the values.
fn multisets(len: usize, max: u64) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(len);
    fn rec(len: usize, lo: u64, max: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for x in lo..=max {
            cur.push(x);
            rec(len, x, max, cur, out);
            cur.pop();
        }
    }
    rec(len, 1, max, &mut cur, &mut out);
    out
}

fn partition_round_trip() -> Check {
    let (mut total, mut yes) = (0, 0);
    for m in 1..=3 {
        for p in multisets(3 * m, 8) {
            let (q, k) = three_to_kpartition(&p).map_err(|e| e.to_string())?;
            ensure(k == m, || format!("{p:?}: k = {k}"))?;
            let direct = three_partition(&p);
            let via = partition_into_k_checker(&q, k);
            ensure(direct == via.is_some(), || format!("{p:?}: 3-partition {direct}, k-partition {via:?}"))?;
            if let Some(sets) = via {
                ensure(sets.iter().all(|s| s.len() == 3), || format!("{p:?}: non-triple set in {sets:?}"))?;
            }
            total += 1;
            yes += direct as usize;
        }
    }
    Ok(format!("{total} instances ({yes} yes) round-trip"))
}

fn nice_validators() -> Check {
    let mut checked = 0;
    for (seed, inst) in graph_corpus(TW_INSTANCES).iter().chain(&tree_corpus(TREE_INSTANCES)) {
        let (simple, _) = simplify_intersections(inst);
        let aug = augment_with_terminals(&simple).map_err(|e| format!("seed {seed}: {e}"))?;
        for h in [Heuristic::MinFill, Heuristic::MinDegree] {
            let report = validate_nice(&decompose(&aug, h), &aug.graph);
            ensure(report.passed(), || format!("seed {seed} {h:?}: {report:?}"))?;
            checked += 1;
        }
    }
    for (seed, inst) in &path_corpus(PATH_INSTANCES) {
        let graph = AdjGraph::from_intersection(&IntersectionGraph::build(inst));
        let seq = path_event_sequence(inst).map_err(|e| format!("seed {seed}: {e}"))?;
        let ntd = make_nice(&seq.to_tree_decomposition(), &graph, &[]).map_err(|e| format!("seed {seed}: {e}"))?;
        let report = validate_nice(&ntd, &graph);
        ensure(report.passed(), || format!("path seed {seed}: {report:?}"))?;
        checked += 1;
    }
    Ok(format!("{checked} nice decompositions pass every check"))
}

fn scaling() -> Check {
    let three = int(3);
    let opts = SolveOptions::default();
    let mut runs = 0;
    let instances = path_corpus(SCALING_INSTANCES)
        .into_iter()
        .chain(graph_corpus(SCALING_INSTANCES))
        .chain(tree_corpus(SCALING_INSTANCES));
    for (seed, inst) in instances {
        let mut algos = vec![Algorithm::Auto, Algorithm::Tw, Algorithm::Oracle];
        match choose_algorithm(&inst) {
            Algorithm::Path | Algorithm::Tree => algos.push(choose_algorithm(&inst)),
            _ => {}
        }
        let faster = inst.scale_speeds(&three);
        let longer = inst.scale_lengths(&three);
        for algo in algos {
            let run = |i: &Instance| solve(i, algo, &opts).map(|r| r.time).map_err(|e| format!("seed {seed} {algo}: {e}"));
            let (base, fast, long) = (run(&inst)?, run(&faster)?, run(&longer)?);
            let (want_fast, want_long) = match &base {
                Time::Finite(r) => (Time::Finite(r / &three), Time::Finite(r * &three)),
                Time::Infinite => (Time::Infinite, Time::Infinite),
            };
            ensure(fast == want_fast && long == want_long, || {
                format!("seed {seed} {algo}: {} -> speeds x3 {}, lengths x3 {}", show(&base), show(&fast), show(&long))
            })?;
            runs += 1;
        }
    }
    Ok(format!("{runs} solver runs scale exactly"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("four-agent example", four_agent_example),
        ("path DP equals oracle", path_vs_oracle),
        ("treewidth DP equals oracle", tw_vs_oracle),
        ("transformation soundness", transformation),
        ("tree-intersection algorithm", tree_algorithm),
        ("interval-structure identity", interval_identity),
        ("hardness-gadget separation", gadget_separation),
        ("partition round trip", partition_round_trip),
        ("nice decomposition validators", nice_validators),
        ("scaling laws", scaling),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
