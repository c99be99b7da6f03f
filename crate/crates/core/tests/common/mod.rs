//! Seeded instance corpora shared by the integration tests.

#![allow(dead_code)]

use ddt_core::generate::{random_graph, random_path, tree_intersection, GraphParams, PathParams, TreeParams};
use ddt_core::model::io::parse_instance;
use ddt_core::model::Instance;

pub fn four_agents() -> Instance {
    parse_instance(include_bytes!("../../data/four_agents.json")).expect("bundled instance parses")
}

/// Path instances with at most 12 vertices (so at most 12 interval
/// endpoints) and at most 6 agents.
pub fn path_corpus(count: u64) -> Vec<(u64, Instance)> {
    (0..count)
        .map(|seed| {
            let p = PathParams {
                positions: 2 + (seed as usize % 11),
                agents: 1 + (seed as usize % 6),
                ..PathParams::default()
            };
            (seed, random_path(seed, &p).expect("valid path parameters"))
        })
        .collect()
}

/// General instances with `n <= 8`, `k <= 5`; larger areas make agents
/// share several vertices.
pub fn graph_corpus(count: u64) -> Vec<(u64, Instance)> {
    (0..count)
        .map(|seed| {
            let vertices = 4 + (seed as usize % 5);
            let p = GraphParams {
                vertices,
                agents: 2 + (seed as usize % 4),
                max_area: (2 + (seed as usize % 5)).min(vertices),
                extra_edge_prob: 0.3,
                ..GraphParams::default()
            };
            (seed, random_graph(seed, &p).expect("valid graph parameters"))
        })
        .collect()
}

pub fn tree_corpus(count: u64) -> Vec<(u64, Instance)> {
    (0..count)
        .map(|seed| {
            let p = TreeParams {
                agents: 2 + (seed as usize % 5),
                ..TreeParams::default()
            };
            (seed, tree_intersection(seed, &p).expect("valid tree parameters"))
        })
        .collect()
}
