//! Property tests over seeded generator output.

use proptest::prelude::*;

use ddt_core::generate::{random_graph, random_path, tree_intersection, GraphParams, PathParams, TreeParams};
use ddt_core::intersect::{simplify_intersections, IntersectionGraph};
use ddt_core::model::io::{parse_instance, serialize_instance};
use ddt_core::model::{AgentDistances, Instance, Time};
use ddt_core::oracle::brute_force_opt;
use ddt_core::order_solver::fixed_order_time;
use ddt_core::solve::{solve, Algorithm, SolveOptions};

fn graph_instance() -> impl Strategy<Value = Instance> {
    (any::<u64>(), 3usize..=7, 1usize..=4, 2usize..=5).prop_map(|(seed, vertices, agents, area)| {
        let p = GraphParams {
            vertices,
            agents,
            max_area: area.min(vertices),
            ..GraphParams::default()
        };
        random_graph(seed, &p).unwrap()
    })
}

fn path_instance() -> impl Strategy<Value = Instance> {
    (any::<u64>(), 2usize..=10, 1usize..=5).prop_map(|(seed, positions, agents)| {
        let p = PathParams {
            positions,
            agents,
            ..PathParams::default()
        };
        random_path(seed, &p).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn json_round_trip(inst in graph_instance()) {
        let again = parse_instance(serialize_instance(&inst).as_bytes()).unwrap();
        prop_assert_eq!(inst, again);
    }

    #[test]
    fn generators_are_deterministic(seed in any::<u64>()) {
        let p = GraphParams::default();
        prop_assert_eq!(random_graph(seed, &p).unwrap(), random_graph(seed, &p).unwrap());
        let t = TreeParams::default();
        prop_assert_eq!(tree_intersection(seed, &t).unwrap(), tree_intersection(seed, &t).unwrap());
    }

    #[test]
    fn simplify_gives_simple_graph_with_degree_bound(inst in graph_instance()) {
        let (simple, map) = simplify_intersections(&inst);
        let (before, after) = (IntersectionGraph::build(&inst), IntersectionGraph::build(&simple));
        prop_assert!(after.is_simple());
        prop_assert!(after.max_degree() <= before.max_degree() + 1);
        for a in 0..inst.agent_count() {
            prop_assert_eq!(&simple.agents[a].id, &inst.agents[a].id);
            prop_assert_eq!(map.lift_agent(a), a);
        }
    }

    #[test]
    fn auto_matches_oracle(inst in graph_instance()) {
        let auto = solve(&inst, Algorithm::Auto, &SolveOptions::default()).unwrap();
        prop_assert_eq!(auto.time, brute_force_opt(&inst, None).time);
    }

    #[test]
    fn path_dp_matches_oracle(inst in path_instance()) {
        let dp = solve(&inst, Algorithm::Path, &SolveOptions::default()).unwrap();
        prop_assert_eq!(dp.time, brute_force_opt(&inst, None).time);
    }

    /// Any single fixed order is an upper bound on the optimum.
    #[test]
    fn fixed_orders_bound_the_optimum(inst in graph_instance()) {
        let opt = brute_force_opt(&inst, None).time;
        let dist = AgentDistances::new(&inst);
        for a in 0..inst.agent_count() {
            let t = fixed_order_time(&inst, &dist, &[a]).unwrap().time;
            prop_assert!(opt <= t);
        }
    }

    /// Optimum is never better than the fastest agent flying the whole way.
    #[test]
    fn optimum_respects_speed_lower_bound(inst in graph_instance()) {
        let opt = brute_force_opt(&inst, None).time;
        if let Time::Finite(opt) = opt {
            let fastest = inst.agents.iter().map(|a| a.speed.clone()).max().unwrap();
            let mut whole = inst.clone();
            for a in &mut whole.agents {
                a.speed = fastest.clone();
                a.vertices = (0..inst.graph.vertex_count()).collect();
                a.edges = (0..inst.graph.edge_count()).collect();
            }
            let d = AgentDistances::new(&whole);
            if let Time::Finite(lb) = d.time(0, inst.source, inst.target) {
                prop_assert!(lb <= opt);
            }
        }
    }
}
