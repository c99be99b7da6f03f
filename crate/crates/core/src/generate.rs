//! Seeded random instance generators.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{int, AgentSpec, Instance, InstanceBuilder};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("invalid generator parameters: {0}")]
    BadParams(String),
}

fn vname(i: usize) -> String {
    format!("v{i}")
}

fn aname(i: usize) -> String {
    format!("a{i}")
}

#[derive(Clone, Debug)]
pub struct PathParams {
    /// Number of path vertices.
    pub positions: usize,
    pub agents: usize,
    /// Edge lengths are drawn from `0..=max_len` (zero is rare).
    pub max_len: i64,
    pub speeds: Vec<i64>,
}

impl Default for PathParams {
    fn default() -> Self {
        PathParams {
            positions: 8,
            agents: 4,
            max_len: 10,
            speeds: vec![1, 2, 3, 5],
        }
    }
}

/// Path `v0 - v1 - ...` with random interval agents and random distinct `s`, `t`.
pub fn random_path(seed: u64, p: &PathParams) -> Result<Instance, GenError> {
    if p.positions < 2 || p.agents == 0 || p.max_len < 1 || p.speeds.iter().any(|&v| v <= 0) || p.speeds.is_empty() {
        return Err(GenError::BadParams(
            "need >= 2 positions, >= 1 agent, max_len >= 1, positive speeds".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = InstanceBuilder::new();
    for i in 0..p.positions {
        b.vertex(vname(i));
    }
    for i in 0..p.positions - 1 {
        let len = if rng.gen_bool(0.1) { 0 } else { rng.gen_range(1..=p.max_len) };
        b.edge(&vname(i), &vname(i + 1), int(len));
    }
    for a in 0..p.agents {
        let x = rng.gen_range(0..p.positions);
        let y = rng.gen_range(0..p.positions);
        let (lo, hi) = (x.min(y), x.max(y));
        let speed = *p.speeds.choose(&mut rng).unwrap();
        b.agent(AgentSpec::new(aname(a), int(speed), (lo..=hi).map(vname).collect()));
    }
    let s = rng.gen_range(0..p.positions);
    let mut t = rng.gen_range(0..p.positions - 1);
    if t >= s {
        t += 1;
    }
    Ok(b.build(&vname(s), &vname(t)).expect("generated path is valid"))
}

#[derive(Clone, Debug)]
pub struct GraphParams {
    pub vertices: usize,
    pub agents: usize,
    /// Probability of each non-tree edge.
    pub extra_edge_prob: f64,
    /// Largest agent area.
    pub max_area: usize,
    pub max_len: i64,
    pub speeds: Vec<i64>,
}

impl Default for GraphParams {
    fn default() -> Self {
        GraphParams {
            vertices: 7,
            agents: 4,
            extra_edge_prob: 0.25,
            max_area: 4,
            max_len: 10,
            speeds: vec![1, 2, 3, 5],
        }
    }
}

/// Connected random graph; each agent area is grown as a random connected
/// vertex set with induced edges, so several agents may share many vertices.
pub fn random_graph(seed: u64, p: &GraphParams) -> Result<Instance, GenError> {
    if p.vertices < 2 || p.agents == 0 || p.max_area == 0 || p.max_len < 1 || p.speeds.is_empty() || p.speeds.iter().any(|&v| v <= 0) {
        return Err(GenError::BadParams(
            "need >= 2 vertices, >= 1 agent, max_area >= 1, positive speeds".into(),
        ));
    }
    if !(0.0..=1.0).contains(&p.extra_edge_prob) {
        return Err(GenError::BadParams("extra_edge_prob outside [0, 1]".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = p.vertices;
    let mut adj = vec![BTreeSet::new(); n];
    let mut b = InstanceBuilder::new();
    for i in 0..n {
        b.vertex(vname(i));
    }
    let add = |b: &mut InstanceBuilder, adj: &mut Vec<BTreeSet<usize>>, u: usize, v: usize, rng: &mut ChaCha8Rng| {
        adj[u].insert(v);
        adj[v].insert(u);
        b.edge(&vname(u), &vname(v), int(rng.gen_range(1..=p.max_len)));
    };
    for v in 1..n {
        let u = rng.gen_range(0..v);
        add(&mut b, &mut adj, u, v, &mut rng);
    }
    for u in 0..n {
        for v in u + 1..n {
            if !adj[u].contains(&v) && rng.gen_bool(p.extra_edge_prob) {
                add(&mut b, &mut adj, u, v, &mut rng);
            }
        }
    }
    for a in 0..p.agents {
        let size = rng.gen_range(1..=p.max_area.min(n));
        let mut area = BTreeSet::from([rng.gen_range(0..n)]);
        while area.len() < size {
            let frontier: Vec<usize> = area
                .iter()
                .flat_map(|&x| adj[x].iter().copied())
                .filter(|y| !area.contains(y))
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            let Some(&y) = frontier.choose(&mut rng) else { break };
            area.insert(y);
        }
        let speed = *p.speeds.choose(&mut rng).unwrap();
        b.agent(AgentSpec::new(aname(a), int(speed), area.into_iter().map(vname).collect()));
    }
    let s = rng.gen_range(0..n);
    let mut t = rng.gen_range(0..n - 1);
    if t >= s {
        t += 1;
    }
    Ok(b.build(&vname(s), &vname(t)).expect("generated graph is valid"))
}

#[derive(Clone, Debug)]
pub struct TreeParams {
    pub agents: usize,
    /// Private vertices per agent, drawn from `1..=max_private`.
    pub max_private: usize,
    /// Shared vertices per adjacent agent pair, drawn from `1..=max_shared`.
    pub max_shared: usize,
    pub max_len: i64,
    pub speeds: Vec<i64>,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            agents: 5,
            max_private: 2,
            max_shared: 2,
            max_len: 10,
            speeds: vec![1, 2, 3, 5],
        }
    }
}

/// Instance whose intersection graph is a random tree on the agents, with
/// every vertex covered by at most two agents.
pub fn tree_intersection(seed: u64, p: &TreeParams) -> Result<Instance, GenError> {
    if p.agents == 0 || p.max_private == 0 || p.max_shared == 0 || p.max_len < 1 || p.speeds.is_empty() || p.speeds.iter().any(|&v| v <= 0) {
        return Err(GenError::BadParams(
            "need >= 1 agent, max_private >= 1, max_shared >= 1, positive speeds".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = p.agents;
    let mut areas: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mut next = 0usize;
    for area in areas.iter_mut() {
        for _ in 0..rng.gen_range(1..=p.max_private) {
            area.push(next);
            next += 1;
        }
    }
    for a in 1..k {
        let parent = rng.gen_range(0..a);
        for _ in 0..rng.gen_range(1..=p.max_shared) {
            areas[a].push(next);
            areas[parent].push(next);
            next += 1;
        }
    }
    let n = next;
    let mut b = InstanceBuilder::new();
    for v in 0..n {
        b.vertex(vname(v));
    }
    let mut present = BTreeSet::new();
    for area in &areas {
        let mut order = area.clone();
        order.shuffle(&mut rng);
        for i in 1..order.len() {
            let j = rng.gen_range(0..i);
            let (u, v) = (order[i].min(order[j]), order[i].max(order[j]));
            if present.insert((u, v)) {
                b.edge(&vname(u), &vname(v), int(rng.gen_range(1..=p.max_len)));
            }
        }
        // An occasional chord inside the same area.
        if order.len() >= 3 && rng.gen_bool(0.3) {
            let (u, v) = (order[0].min(order[2]), order[0].max(order[2]));
            if present.insert((u, v)) {
                b.edge(&vname(u), &vname(v), int(rng.gen_range(1..=p.max_len)));
            }
        }
    }
    for (a, area) in areas.iter().enumerate() {
        let speed = *p.speeds.choose(&mut rng).unwrap();
        b.agent(AgentSpec::new(aname(a), int(speed), area.iter().map(|&v| vname(v)).collect()));
    }
    let s = rng.gen_range(0..n);
    let t = if n > 1 {
        let mut t = rng.gen_range(0..n - 1);
        if t >= s {
            t += 1;
        }
        t
    } else {
        s
    };
    Ok(b.build(&vname(s), &vname(t)).expect("generated tree instance is valid"))
}
