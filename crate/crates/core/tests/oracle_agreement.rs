//! Denser random corpora than the acceptance suite, checking every exact
//! solver against the brute-force oracle and validating the schedules.

mod common;

use ddt_core::decomp::Heuristic;
use ddt_core::generate::{random_graph, GraphParams};
use ddt_core::model::{validate_schedule, Instance, Mode, Schedule, Time};
use ddt_core::oracle::brute_force_opt;
use ddt_core::path_solver::solve_path;
use ddt_core::tree_solver::solve_tree_intersection;
use ddt_core::tw_solver::solve_treewidth_with;

fn check_schedule(inst: &Instance, time: &Time, sched: &Option<Schedule>, what: &str) {
    match (time, sched) {
        (Time::Finite(t), Some(s)) => {
            let v = validate_schedule(inst, s, Mode::Sp).unwrap_or_else(|e| panic!("{what}: {e}"));
            assert_eq!(&v.delivery_time, t, "{what}: schedule time");
        }
        (Time::Infinite, None) => {}
        _ => panic!("{what}: schedule presence does not match {time:?}"),
    }
}

#[test]
fn path_solver_matches_oracle_with_valid_schedules() {
    for (seed, inst) in common::path_corpus(400) {
        let sol = solve_path(&inst).unwrap();
        assert_eq!(sol.time, brute_force_opt(&inst, None).time, "seed {seed}");
        check_schedule(&inst, &sol.time, &sol.schedule, &format!("path seed {seed}"));
    }
}

#[test]
fn treewidth_solver_matches_oracle_on_dense_instances() {
    let p = GraphParams {
        vertices: 8,
        agents: 5,
        max_area: 6,
        extra_edge_prob: 0.4,
        ..GraphParams::default()
    };
    for seed in 0..150 {
        let inst = random_graph(seed, &p).unwrap();
        let want = brute_force_opt(&inst, None).time;
        for h in [Heuristic::MinFill, Heuristic::MinDegree] {
            let sol = solve_treewidth_with(&inst, h);
            assert_eq!(sol.time, want, "seed {seed} {h:?}");
            check_schedule(&inst, &sol.time, &sol.schedule, &format!("tw seed {seed} {h:?}"));
        }
    }
}

#[test]
fn tree_solver_schedules_validate() {
    for (seed, inst) in common::tree_corpus(100) {
        let sol = solve_tree_intersection(&inst).unwrap();
        assert_eq!(sol.time, brute_force_opt(&inst, None).time, "seed {seed}");
        check_schedule(&inst, &sol.time, &sol.schedule, &format!("tree seed {seed}"));
    }
}
