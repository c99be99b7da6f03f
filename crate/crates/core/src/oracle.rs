//! Exhaustive ground truth: every simple agent path of the intersection graph
//! from a cover agent of `s` to one of `t`, each priced by the layered solver.

use crate::intersect::IntersectionGraph;
use crate::model::{AgentDistances, AgentIdx, Instance, Schedule, Time};
use crate::order_solver::fixed_order_time;

/// All simple paths from `B_s` to `B_t` with at most `max_len` agents, in
/// depth-first order with smaller agent indices first.
pub fn enumerate_sequences(inst: &Instance, max_len: usize) -> Vec<Vec<AgentIdx>> {
    let ig = IntersectionGraph::build(inst);
    let mut out = Vec::new();
    let mut on_path = vec![false; inst.agent_count()];
    let targets: Vec<bool> = (0..inst.agent_count())
        .map(|a| inst.agents[a].covers(inst.target))
        .collect();
    for first in inst.covering_agents(inst.source) {
        let mut path = vec![first];
        on_path[first] = true;
        extend(&ig, &targets, max_len, &mut path, &mut on_path, &mut out);
        on_path[first] = false;
    }
    out
}

fn extend(
    ig: &IntersectionGraph,
    targets: &[bool],
    max_len: usize,
    path: &mut Vec<AgentIdx>,
    on_path: &mut [bool],
    out: &mut Vec<Vec<AgentIdx>>,
) {
    if path.len() > max_len {
        return;
    }
    let last = *path.last().unwrap();
    if targets[last] {
        out.push(path.clone());
    }
    if path.len() == max_len {
        return;
    }
    for &next in ig.neighbors(last) {
        if on_path[next] {
            continue;
        }
        on_path[next] = true;
        path.push(next);
        extend(ig, targets, max_len, path, on_path, out);
        path.pop();
        on_path[next] = false;
    }
}

#[derive(Clone, Debug)]
pub struct OracleResult {
    pub time: Time,
    pub sequence: Option<Vec<AgentIdx>>,
    pub schedule: Option<Schedule>,
    pub sequences_tried: usize,
}

/// Minimum over all enumerated sequences of the fixed-order optimum.
pub fn brute_force_opt(inst: &Instance, max_len: Option<usize>) -> OracleResult {
    let k = inst.agent_count();
    if k > 10 {
        log::warn!("brute-force oracle on {k} agents may take very long");
    }
    if inst.source == inst.target {
        return OracleResult {
            time: Time::zero(),
            sequence: Some(Vec::new()),
            schedule: Some(Schedule::from_legs(inst, &[])),
            sequences_tried: 0,
        };
    }
    let dist = AgentDistances::new(inst);
    let sequences = enumerate_sequences(inst, max_len.unwrap_or(k));
    let mut best: Option<(Time, usize, crate::order_solver::FixedOrderSolution)> = None;
    for (i, seq) in sequences.iter().enumerate() {
        let sol = fixed_order_time(inst, &dist, seq).expect("sequences are nonempty");
        if sol.time.is_finite() && best.as_ref().is_none_or(|(t, _, _)| sol.time < *t) {
            best = Some((sol.time.clone(), i, sol));
        }
    }
    match best {
        None => OracleResult {
            time: Time::Infinite,
            sequence: None,
            schedule: None,
            sequences_tried: sequences.len(),
        },
        Some((time, i, sol)) => OracleResult {
            schedule: sol.schedule(inst, &dist, &sequences[i]),
            time,
            sequence: Some(sequences[i].clone()),
            sequences_tried: sequences.len(),
        },
    }
}
