//! Polynomial algorithm for instances whose agent intersection graph is acyclic.

use thiserror::Error;

use crate::intersect::IntersectionGraph;
use crate::model::{AgentDistances, AgentIdx, Instance, Schedule, Time, VertexIdx};
use crate::order_solver::fixed_order_time;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("vertex {vertex} is covered by agents {agents:?}, which form a triangle")]
    ThreeCover {
        vertex: String,
        agents: [String; 3],
    },
    #[error("intersection graph has a cycle through {0:?}")]
    NotATree(Vec<String>),
}

#[derive(Clone, Debug)]
pub struct TreeSolution {
    pub time: Time,
    pub order: Option<Vec<AgentIdx>>,
    pub schedule: Option<Schedule>,
    /// Number of fixed-order solves performed (at most four).
    pub invocations: usize,
}

/// Checks the precondition and returns a witness when it fails.
pub fn check_tree_intersection(inst: &Instance, ig: &IntersectionGraph) -> Result<(), TreeError> {
    for u in 0..inst.graph.vertex_count() {
        let cover = inst.covering_agents(u);
        if cover.len() >= 3 {
            return Err(TreeError::ThreeCover {
                vertex: inst.graph.name(u).to_string(),
                agents: [0, 1, 2].map(|i| inst.agents[cover[i]].id.clone()),
            });
        }
    }
    if !ig.is_forest() {
        return Err(TreeError::NotATree(find_cycle(ig, inst)));
    }
    Ok(())
}

fn find_cycle(ig: &IntersectionGraph, inst: &Instance) -> Vec<String> {
    let k = ig.agent_count();
    let mut parent = vec![usize::MAX; k];
    let mut depth = vec![0usize; k];
    for root in 0..k {
        if parent[root] != usize::MAX {
            continue;
        }
        parent[root] = root;
        let mut stack = vec![root];
        while let Some(x) = stack.pop() {
            for &y in ig.neighbors(x) {
                if parent[y] == usize::MAX {
                    parent[y] = x;
                    depth[y] = depth[x] + 1;
                    stack.push(y);
                } else if y != parent[x] && parent[y] != x {
                    // Closing edge x-y: walk both up to their meeting point.
                    let (mut a, mut b) = (x, y);
                    let (mut left, mut right) = (vec![a], vec![b]);
                    while a != b {
                        if depth[a] >= depth[b] {
                            a = parent[a];
                            left.push(a);
                        } else {
                            b = parent[b];
                            right.push(b);
                        }
                    }
                    right.pop();
                    left.extend(right.into_iter().rev());
                    return left.into_iter().map(|a| inst.agents[a].id.clone()).collect();
                }
            }
        }
    }
    Vec::new()
}

/// Tries every (first, last) pair from `B_s × B_t` along the unique agent path.
pub fn solve_tree_intersection(inst: &Instance) -> Result<TreeSolution, TreeError> {
    let ig = IntersectionGraph::build(inst);
    check_tree_intersection(inst, &ig)?;
    if inst.source == inst.target {
        return Ok(TreeSolution {
            time: Time::zero(),
            order: Some(Vec::new()),
            schedule: Some(Schedule::from_legs(inst, &[])),
            invocations: 0,
        });
    }
    let dist = AgentDistances::new(inst);
    let mut invocations = 0;
    let mut best: Option<(Time, Vec<AgentIdx>, Vec<VertexIdx>)> = None;
    for first in inst.covering_agents(inst.source) {
        for last in inst.covering_agents(inst.target) {
            let Some(order) = ig.forest_path(first, last) else {
                continue;
            };
            invocations += 1;
            let sol = fixed_order_time(inst, &dist, &order).expect("nonempty order");
            if sol.time.is_finite() && best.as_ref().is_none_or(|(t, _, _)| sol.time < *t) {
                best = Some((sol.time.clone(), order, sol.route));
            }
        }
    }
    Ok(match best {
        None => TreeSolution {
            time: Time::Infinite,
            order: None,
            schedule: None,
            invocations,
        },
        Some((time, order, route)) => {
            let sol = crate::order_solver::FixedOrderSolution {
                time: time.clone(),
                route,
            };
            TreeSolution {
                schedule: sol.schedule(inst, &dist, &order),
                time,
                order: Some(order),
                invocations,
            }
        }
    })
}
