//! Exact dynamic program over a nice tree decomposition of the intersection
//! graph, for arbitrary underlying graphs.

mod augment;
mod table;

use std::collections::BTreeMap;

use thiserror::Error;

pub use augment::{augment_with_terminals, AugmentedInstance};
pub use table::{
    handle_forget, handle_introduce, handle_introduce_edge, handle_join, handle_leaf, Back, End,
    TwDpEntry, TwDpKey, TwTable,
};

use crate::decomp::{heuristic_decomposition, make_nice, AdjGraph, Heuristic, NiceKind, NiceTreeDecomposition};
use crate::intersect::{simplify_intersections, IntersectError};
use crate::model::{AgentIdx, Instance, Rational, Schedule, Time};
use crate::order_solver::solve_fixed_order;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TwError {
    #[error(transparent)]
    Intersect(#[from] IntersectError),
    #[error("agent `{0}` is not a neighbour of `{1}`")]
    NotNeighbor(String, String),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TwStats {
    /// Agents after simplification, terminals excluded.
    pub agents: usize,
    /// Width of the nice decomposition, terminals included.
    pub width: isize,
    pub max_degree: usize,
    pub nodes: usize,
    pub max_entries: usize,
    pub total_entries: usize,
    pub entries_per_node: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct TwSolution {
    pub time: Time,
    /// Agents of the original instance in delivery order.
    pub sequence: Option<Vec<AgentIdx>>,
    pub schedule: Option<Schedule>,
    pub stats: TwStats,
}

/// All node tables of one DP run.
pub struct TwRun {
    pub aug: AugmentedInstance,
    pub ntd: NiceTreeDecomposition,
    pub tables: Vec<TwTable>,
}

/// Decomposes the augmented instance: the heuristic runs on the instance
/// agents only and the terminals are then added to every bag.
pub fn decompose(aug: &AugmentedInstance, heuristic: Heuristic) -> NiceTreeDecomposition {
    let real = AdjGraph::from_edges(
        aug.k,
        aug.graph
            .edges
            .iter()
            .copied()
            .filter(|&(u, v)| u < aug.k && v < aug.k),
    );
    let td = heuristic_decomposition(&real, heuristic);
    make_nice(&td, &aug.graph, &[aug.a_s(), aug.a_t()]).expect("heuristic decompositions are valid")
}

/// Fills every node table bottom-up.
pub fn run_dp(aug: AugmentedInstance, heuristic: Heuristic) -> TwRun {
    let ntd = decompose(&aug, heuristic);
    let mut tables: Vec<TwTable> = Vec::with_capacity(ntd.nodes.len());
    for (t, node) in ntd.nodes.iter().enumerate() {
        let table = match node.kind {
            NiceKind::Leaf => handle_leaf(),
            NiceKind::Introduce(_) => handle_introduce(&tables[node.children[0]]),
            NiceKind::Forget(v) => handle_forget(&tables[node.children[0]], v),
            NiceKind::IntroduceEdge(e) => {
                let (u, v) = ntd.edges[e];
                handle_introduce_edge(&aug, &ntd, t, &tables[node.children[0]], u, v)
            }
            NiceKind::Join => {
                let (c1, c2) = (node.children[0], node.children[1]);
                handle_join(&aug, &ntd, c1, c2, &tables[c1], &tables[c2], &node.bag)
            }
        };
        tables.push(table);
    }
    TwRun { aug, ntd, tables }
}

impl TwRun {
    /// Root entries encoding a single `a_s`–`a_t` path; the minimum over the
    /// npip guesses of both terminals.
    pub fn best_root(&self) -> Option<(&TwDpKey, &TwDpEntry)> {
        let (a_s, a_t) = (self.aug.a_s(), self.aug.a_t());
        self.tables
            .last()?
            .iter()
            .filter(|(k, _)| {
                k.inner.is_empty()
                    && k.pairs == [(a_s, a_t)]
                    && k.end(a_s).is_some_and(|e| e.psp == self.aug.a_s_virtual())
                    && k.end(a_t).is_some_and(|e| e.psp == self.aug.a_t_virtual())
            })
            .min_by(|x, y| x.1.cost.cmp(&y.1.cost))
    }

    /// Edges used by the forest behind `key` at the root.
    pub fn used_edges(&self, key: &TwDpKey) -> Vec<(AgentIdx, AgentIdx)> {
        let mut out = Vec::new();
        let mut stack = vec![(self.ntd.root(), key.clone())];
        while let Some((t, k)) = stack.pop() {
            let node = &self.ntd.nodes[t];
            match &self.tables[t][&k].back {
                Back::Leaf => {}
                Back::Child(c) => stack.push((node.children[0], c.clone())),
                Back::Edge(c) => {
                    if let NiceKind::IntroduceEdge(e) = node.kind {
                        out.push(self.ntd.edges[e]);
                    }
                    stack.push((node.children[0], c.clone()));
                }
                Back::Join(c1, c2) => {
                    stack.push((node.children[0], c1.clone()));
                    stack.push((node.children[1], c2.clone()));
                }
            }
        }
        out
    }

    /// Agent sequence `a_s, …, a_t` traced through `edges`.
    pub fn trace(&self, edges: &[(AgentIdx, AgentIdx)]) -> Vec<AgentIdx> {
        let mut adj: BTreeMap<AgentIdx, Vec<AgentIdx>> = BTreeMap::new();
        for &(u, v) in edges {
            adj.entry(u).or_default().push(v);
            adj.entry(v).or_default().push(u);
        }
        let mut seq = vec![self.aug.a_s()];
        let mut prev = usize::MAX;
        while let Some(&cur) = seq.last() {
            let Some(&next) = adj.get(&cur).and_then(|n| n.iter().find(|&&x| x != prev)) else {
                break;
            };
            prev = cur;
            seq.push(next);
            if next == self.aug.a_t() {
                break;
            }
        }
        seq
    }
}

fn stats(run: &TwRun) -> TwStats {
    let entries_per_node: Vec<usize> = run.tables.iter().map(|t| t.len()).collect();
    TwStats {
        agents: run.aug.k,
        width: run.ntd.width(),
        max_degree: (0..run.aug.k + 2)
            .map(|a| run.aug.graph.adj[a].len())
            .max()
            .unwrap_or(0),
        nodes: run.ntd.nodes.len(),
        max_entries: entries_per_node.iter().copied().max().unwrap_or(0),
        total_entries: entries_per_node.iter().sum(),
        entries_per_node,
    }
}

pub fn solve_treewidth(inst: &Instance) -> TwSolution {
    solve_treewidth_with(inst, Heuristic::MinFill)
}

/// Simplifies, augments, decomposes, runs the DP and rebuilds a schedule of
/// `inst` from the optimal agent path.
pub fn solve_treewidth_with(inst: &Instance, heuristic: Heuristic) -> TwSolution {
    if inst.source == inst.target {
        return TwSolution {
            time: Time::zero(),
            sequence: Some(Vec::new()),
            schedule: Some(Schedule::from_legs(inst, &[])),
            stats: TwStats::default(),
        };
    }
    let infeasible = TwSolution {
        time: Time::Infinite,
        sequence: None,
        schedule: None,
        stats: TwStats::default(),
    };
    if inst.covering_agents(inst.source).is_empty() || inst.covering_agents(inst.target).is_empty() {
        return infeasible;
    }
    let (simple, map) = simplify_intersections(inst);
    let aug = augment_with_terminals(&simple).expect("simplified instances have unique intersections");
    let run = run_dp(aug, heuristic);
    let stats = stats(&run);
    let Some((key, entry)) = run.best_root() else {
        return TwSolution { stats, ..infeasible };
    };
    let cost: Rational = entry.cost.clone();
    let path = run.trace(&run.used_edges(key));
    debug_assert_eq!(run.aug.extended_sequence_cost(&framed(&run.aug, &path)).ok(), Some(cost.clone()));
    let inner: Vec<AgentIdx> = path[1..path.len() - 1].to_vec();
    let sequence = map.lower_sequence(&inner);
    let (time, _, schedule) = solve_fixed_order(inst, &sequence).expect("nonempty agent path");
    debug_assert_eq!(time, Time::Finite(cost.clone()));
    TwSolution {
        time: Time::Finite(cost),
        sequence: Some(sequence),
        schedule,
        stats,
    }
}

/// `a_s', path, a_t'`.
fn framed(aug: &AugmentedInstance, path: &[AgentIdx]) -> Vec<AgentIdx> {
    let mut seq = vec![aug.a_s_virtual()];
    seq.extend_from_slice(path);
    seq.push(aug.a_t_virtual());
    seq
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{random_graph, GraphParams};
    use crate::model::{int, validate_schedule, AgentSpec, InstanceBuilder, Mode};
    use crate::oracle::brute_force_opt;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn chain() -> Instance {
        let mut b = InstanceBuilder::new();
        for v in ["s", "p", "q", "t"] {
            b.vertex(v);
        }
        b.edge("s", "p", int(2)).edge("p", "q", int(4)).edge("q", "t", int(6));
        b.agent(AgentSpec::new("x", int(1), names(&["s", "p"])));
        b.agent(AgentSpec::new("y", int(2), names(&["p", "q"])));
        b.agent(AgentSpec::new("z", int(3), names(&["q", "t"])));
        b.build("s", "t").unwrap()
    }

    #[test]
    fn three_agent_chain() {
        let inst = chain();
        let sol = solve_treewidth(&inst);
        assert_eq!(sol.time, Time::Finite(int(6)));
        assert_eq!(sol.sequence, Some(vec![0, 1, 2]));
        let v = validate_schedule(&inst, &sol.schedule.unwrap(), Mode::Sp).unwrap();
        assert_eq!(Time::Finite(v.delivery_time), sol.time);
    }

    #[test]
    fn chain_sequence_cost_matches_fixed_order() {
        let inst = chain();
        let aug = augment_with_terminals(&inst).unwrap();
        let seq = [aug.a_s_virtual(), aug.a_s(), 0, 1, 2, aug.a_t(), aug.a_t_virtual()];
        assert_eq!(aug.extended_sequence_cost(&seq).unwrap(), int(6));
        assert_eq!(aug.extended_sequence_cost(&[]).unwrap(), int(0));
        assert!(aug.extended_sequence_cost(&[0, 2, 1]).is_err());
        assert_eq!(aug.seg_cost(0, 1, 0).unwrap(), int(0));
    }

    #[test]
    fn single_agent() {
        let mut b = InstanceBuilder::new();
        b.vertex("s").vertex("t").edge("s", "t", int(6));
        b.agent(AgentSpec::new("a", int(4), names(&["s", "t"])));
        let sol = solve_treewidth(&b.build("s", "t").unwrap());
        assert_eq!(sol.time, Time::Finite(Rational::new(3.into(), 2.into())));
    }

    #[test]
    fn uncovered_target_is_infeasible() {
        let mut b = InstanceBuilder::new();
        b.vertex("s").vertex("t").edge("s", "t", int(6));
        b.agent(AgentSpec::new("a", int(4), names(&["s"])));
        assert_eq!(solve_treewidth(&b.build("s", "t").unwrap()).time, Time::Infinite);
    }

    #[test]
    fn disconnected_agents_are_infeasible() {
        let mut b = InstanceBuilder::new();
        for v in ["s", "p", "q", "t"] {
            b.vertex(v);
        }
        b.edge("s", "p", int(1)).edge("p", "q", int(1)).edge("q", "t", int(1));
        b.agent(AgentSpec::new("a", int(1), names(&["s", "p"])));
        b.agent(AgentSpec::new("b", int(1), names(&["q", "t"])));
        assert_eq!(solve_treewidth(&b.build("s", "t").unwrap()).time, Time::Infinite);
    }

    #[test]
    fn terminals_in_every_bag() {
        let inst = random_graph(5, &GraphParams::default()).unwrap();
        let (simple, _) = simplify_intersections(&inst);
        let aug = augment_with_terminals(&simple).unwrap();
        let ntd = decompose(&aug, Heuristic::MinFill);
        for node in &ntd.nodes {
            assert!(node.bag.contains(&aug.a_s()) && node.bag.contains(&aug.a_t()));
            assert!(!node.bag.contains(&aug.a_s_virtual()));
        }
    }

    #[test]
    fn matches_oracle_on_small_graphs() {
        let p = GraphParams {
            vertices: 6,
            agents: 4,
            ..GraphParams::default()
        };
        for seed in 0..40 {
            let inst = random_graph(seed, &p).unwrap();
            let sol = solve_treewidth(&inst);
            assert_eq!(sol.time, brute_force_opt(&inst, None).time, "seed {seed}");
            if let Some(s) = sol.schedule {
                let v = validate_schedule(&inst, &s, Mode::Sp).unwrap();
                assert_eq!(Time::Finite(v.delivery_time), sol.time, "seed {seed}");
            }
        }
    }

    #[test]
    fn leaf_and_introduce() {
        let leaf = handle_leaf();
        assert_eq!(leaf.len(), 1);
        assert_eq!(leaf[&TwDpKey::default()].cost, int(0));
        assert_eq!(handle_introduce(&leaf).len(), 1);
    }

    #[test]
    fn forget_drops_open_ends() {
        let mut child = TwTable::new();
        let open = TwDpKey {
            inner: vec![],
            ends: vec![
                End { agent: 0, psp: 5, npip: 1 },
                End { agent: 1, psp: 6, npip: 0 },
            ],
            pairs: vec![(0, 1)],
        };
        let closed = TwDpKey {
            inner: vec![0],
            ..TwDpKey::default()
        };
        for k in [open, closed] {
            child.insert(k, TwDpEntry { cost: int(1), back: Back::Leaf });
        }
        let out = handle_forget(&child, 0);
        assert_eq!(out.len(), 1);
        assert!(out.contains_key(&TwDpKey::default()));
    }
}
