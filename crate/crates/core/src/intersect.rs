//! Agent intersection multigraph and the unique-intersection transformation.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use num::Zero;
use thiserror::Error;

use crate::model::{
    int, AgentIdx, AgentSpec, Instance, InstanceBuilder, Rational, Schedule, VertexIdx,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IntersectError {
    #[error("intersection graph is not simple: agents {0} and {1} share {2} vertices")]
    NotSimple(String, String, usize),
}

/// Multigraph on agents with one edge per shared vertex.
#[derive(Clone, Debug)]
pub struct IntersectionGraph {
    ids: Vec<String>,
    /// Shared vertices per unordered pair `(a, b)` with `a < b`.
    shared: BTreeMap<(AgentIdx, AgentIdx), Vec<VertexIdx>>,
    neighbors: Vec<BTreeSet<AgentIdx>>,
    degree: Vec<usize>,
}

impl IntersectionGraph {
    pub fn build(inst: &Instance) -> Self {
        let k = inst.agent_count();
        let mut shared: BTreeMap<(AgentIdx, AgentIdx), Vec<VertexIdx>> = BTreeMap::new();
        for u in 0..inst.graph.vertex_count() {
            let cover = inst.covering_agents(u);
            for (i, &a) in cover.iter().enumerate() {
                for &b in &cover[i + 1..] {
                    shared.entry((a, b)).or_default().push(u);
                }
            }
        }
        let mut neighbors = vec![BTreeSet::new(); k];
        let mut degree = vec![0; k];
        for (&(a, b), verts) in &shared {
            neighbors[a].insert(b);
            neighbors[b].insert(a);
            degree[a] += verts.len();
            degree[b] += verts.len();
        }
        IntersectionGraph {
            ids: inst.agents.iter().map(|a| a.id.clone()).collect(),
            shared,
            neighbors,
            degree,
        }
    }

    pub fn agent_count(&self) -> usize {
        self.ids.len()
    }

    pub fn id(&self, a: AgentIdx) -> &str {
        &self.ids[a]
    }

    /// Every parallel edge as `(a, b, shared vertex)` with `a < b`.
    pub fn edges(&self) -> impl Iterator<Item = (AgentIdx, AgentIdx, VertexIdx)> + '_ {
        self.shared
            .iter()
            .flat_map(|(&(a, b), vs)| vs.iter().map(move |&v| (a, b, v)))
    }

    /// Adjacent pairs of the underlying simple graph.
    pub fn simple_edges(&self) -> impl Iterator<Item = (AgentIdx, AgentIdx)> + '_ {
        self.shared.keys().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.shared.values().map(Vec::len).sum()
    }

    pub fn shared_vertices(&self, a: AgentIdx, b: AgentIdx) -> &[VertexIdx] {
        self.shared
            .get(&(a.min(b), a.max(b)))
            .map_or(&[], Vec::as_slice)
    }

    pub fn parallel_count(&self, a: AgentIdx, b: AgentIdx) -> usize {
        self.shared_vertices(a, b).len()
    }

    /// `N_a` in the underlying simple graph.
    pub fn neighbors(&self, a: AgentIdx) -> &BTreeSet<AgentIdx> {
        &self.neighbors[a]
    }

    /// Degree counting parallel edges.
    pub fn degree(&self, a: AgentIdx) -> usize {
        self.degree[a]
    }

    /// `Δ(G_I)` with parallel edges counted.
    pub fn max_degree(&self) -> usize {
        self.degree.iter().copied().max().unwrap_or(0)
    }

    pub fn is_simple(&self) -> bool {
        self.shared.values().all(|v| v.len() <= 1)
    }

    /// `D(a, b)`: the unique shared vertex, `None` when disjoint.
    pub fn intersection_point(
        &self,
        a: AgentIdx,
        b: AgentIdx,
    ) -> Result<Option<VertexIdx>, IntersectError> {
        if let Some((&(x, y), vs)) = self.shared.iter().find(|(_, vs)| vs.len() > 1) {
            return Err(IntersectError::NotSimple(
                self.ids[x].clone(),
                self.ids[y].clone(),
                vs.len(),
            ));
        }
        Ok(self.shared_vertices(a, b).first().copied())
    }

    /// True when the underlying simple graph has no cycle.
    pub fn is_forest(&self) -> bool {
        let k = self.agent_count();
        let mut comp = vec![usize::MAX; k];
        let mut components = 0;
        for start in 0..k {
            if comp[start] != usize::MAX {
                continue;
            }
            comp[start] = components;
            let mut queue = VecDeque::from([start]);
            while let Some(x) = queue.pop_front() {
                for &y in &self.neighbors[x] {
                    if comp[y] == usize::MAX {
                        comp[y] = components;
                        queue.push_back(y);
                    }
                }
            }
            components += 1;
        }
        self.shared.len() + components == k
    }

    /// A triangle in the underlying simple graph, if any.
    pub fn find_triangle(&self) -> Option<[AgentIdx; 3]> {
        for &(a, b) in self.shared.keys() {
            if let Some(&c) = self.neighbors[a]
                .intersection(&self.neighbors[b])
                .find(|&&c| c > b)
            {
                return Some([a, b, c]);
            }
        }
        None
    }

    /// Unique simple path between two agents in a forest.
    pub fn forest_path(&self, from: AgentIdx, to: AgentIdx) -> Option<Vec<AgentIdx>> {
        let mut parent = vec![usize::MAX; self.agent_count()];
        parent[from] = from;
        let mut queue = VecDeque::from([from]);
        while let Some(x) = queue.pop_front() {
            if x == to {
                break;
            }
            for &y in &self.neighbors[x] {
                if parent[y] == usize::MAX {
                    parent[y] = x;
                    queue.push_back(y);
                }
            }
        }
        if parent[to] == usize::MAX {
            return None;
        }
        let mut path = vec![to];
        while *path.last().unwrap() != from {
            path.push(parent[*path.last().unwrap()]);
        }
        path.reverse();
        Some(path)
    }

    /// Graphviz rendering; parallel edges are labelled by their shared vertex.
    pub fn to_dot(&self, inst: &Instance) -> String {
        let mut out = String::from("graph intersection {\n");
        for id in &self.ids {
            let _ = writeln!(out, "  {id:?};");
        }
        for (a, b, v) in self.edges() {
            let _ = writeln!(
                out,
                "  {:?} -- {:?} [label={:?}];",
                self.ids[a],
                self.ids[b],
                inst.graph.name(v)
            );
        }
        out.push_str("}\n");
        out
    }
}

/// `σ = max_u |B_u|`.
pub fn thickness(inst: &Instance) -> usize {
    (0..inst.graph.vertex_count())
        .map(|u| inst.covering_agents(u).len())
        .max()
        .unwrap_or(0)
}

/// Relates a transformed instance to its original.
#[derive(Clone, Debug)]
pub struct TransformMap {
    /// Original vertex -> (original agent -> copy).
    pub copies: Vec<BTreeMap<AgentIdx, VertexIdx>>,
    /// Transformed vertex -> original vertex.
    pub origin_vertex: Vec<VertexIdx>,
    /// Transformed agent -> original agent; `None` for helpers.
    pub origin_agent: Vec<Option<AgentIdx>>,
    /// Helper agent -> the original vertex whose copies it connects.
    pub helper_of: BTreeMap<AgentIdx, VertexIdx>,
}

impl TransformMap {
    /// Original agent `a` keeps index `a` in the transformed instance.
    pub fn lift_agent(&self, a: AgentIdx) -> AgentIdx {
        debug_assert_eq!(self.origin_agent[a], Some(a));
        a
    }

    /// Drops helpers and maps the rest back to original agents.
    pub fn lower_sequence(&self, seq: &[AgentIdx]) -> Vec<AgentIdx> {
        let mut out: Vec<AgentIdx> = Vec::new();
        for &a in seq {
            if let Some(orig) = self.origin_agent[a] {
                if out.last() != Some(&orig) {
                    out.push(orig);
                }
            }
        }
        out
    }

    /// Maps a schedule of the transformed instance to one of the original
    /// instance with no larger delivery time.
    pub fn lower_schedule(&self, original: &Instance, sched: &Schedule) -> Schedule {
        let mut legs: Vec<(AgentIdx, Vec<VertexIdx>)> = Vec::new();
        for (a, walk) in sched.legs() {
            let Some(orig) = self.origin_agent[a] else { continue };
            let walk: Vec<VertexIdx> = walk.iter().map(|&v| self.origin_vertex[v]).collect();
            match legs.last_mut() {
                Some((prev, w)) if *prev == orig => w.extend_from_slice(&walk[1..]),
                _ => legs.push((orig, walk)),
            }
        }
        Schedule::from_legs(original, &legs)
    }

    /// Maps a schedule of the original instance to the transformed one with
    /// equal delivery time, relaying through helpers at every handover.
    pub fn lift_schedule(&self, transformed: &Instance, sched: &Schedule) -> Schedule {
        let helper_at: BTreeMap<VertexIdx, AgentIdx> =
            self.helper_of.iter().map(|(&h, &u)| (u, h)).collect();
        let mut legs: Vec<(AgentIdx, Vec<VertexIdx>)> = Vec::new();
        let mut prev: Option<AgentIdx> = None;
        for (a, walk) in sched.legs() {
            if let Some(p) = prev {
                let u = walk[0];
                legs.push((helper_at[&u], vec![self.copies[u][&p], self.copies[u][&a]]));
            }
            legs.push((a, walk.iter().map(|&v| self.copies[v][&a]).collect()));
            prev = Some(a);
        }
        Schedule::from_legs(transformed, &legs)
    }
}

/// Splits every vertex into one copy per covering agent, joins copies by
/// zero-length edges and adds a helper agent per multiply covered vertex,
/// so that any two agents share at most one vertex.
pub fn simplify_intersections(inst: &Instance) -> (Instance, TransformMap) {
    let g = &inst.graph;
    let n = g.vertex_count();
    let covers: Vec<Vec<AgentIdx>> = (0..n).map(|u| inst.covering_agents(u)).collect();
    let copy_name = |u: VertexIdx, a: AgentIdx| format!("({},{})", g.name(u), inst.agents[a].id);

    let mut b = InstanceBuilder::new();
    let mut copies = vec![BTreeMap::new(); n];
    let mut origin_vertex = Vec::new();
    for (u, cover) in covers.iter().enumerate() {
        for &a in cover {
            copies[u].insert(a, origin_vertex.len());
            origin_vertex.push(u);
            b.vertex(copy_name(u, a));
        }
    }
    let mut terminal = |u: VertexIdx, b: &mut InstanceBuilder| -> String {
        let smallest = covers[u].iter().min_by_key(|&&a| &inst.agents[a].id);
        match smallest {
            Some(&a) => copy_name(u, a),
            None => {
                let name = format!("({},-)", g.name(u));
                if !b.has_vertex(&name) {
                    origin_vertex.push(u);
                    b.vertex(name.clone());
                }
                name
            }
        }
    };
    let source = terminal(inst.source, &mut b);
    let target = terminal(inst.target, &mut b);

    for (a, agent) in inst.agents.iter().enumerate() {
        let mut pairs = Vec::new();
        for &e in &agent.edges {
            let edge = g.edge(e);
            let (cu, cv) = (copy_name(edge.u, a), copy_name(edge.v, a));
            b.edge(&cu, &cv, edge.len.clone());
            pairs.push((cu, cv));
        }
        let verts = agent.vertices.iter().map(|&u| copy_name(u, a)).collect();
        b.agent(AgentSpec::new(agent.id.clone(), agent.speed.clone(), verts).with_edges(pairs));
    }

    let taken: BTreeSet<&str> = inst.agents.iter().map(|a| a.id.as_str()).collect();
    let mut origin_agent: Vec<Option<AgentIdx>> = (0..inst.agent_count()).map(Some).collect();
    let mut helper_of = BTreeMap::new();
    for (u, cover) in covers.iter().enumerate() {
        if cover.len() < 2 {
            continue;
        }
        let mut pairs = Vec::new();
        for (i, &a) in cover.iter().enumerate() {
            for &c in &cover[i + 1..] {
                let (x, y) = (copy_name(u, a), copy_name(u, c));
                b.edge(&x, &y, Rational::zero());
                pairs.push((x, y));
            }
        }
        let mut id = format!("h[{}]", g.name(u));
        while taken.contains(id.as_str()) {
            id.push('\'');
        }
        let verts = cover.iter().map(|&a| copy_name(u, a)).collect();
        helper_of.insert(origin_agent.len(), u);
        origin_agent.push(None);
        b.agent(AgentSpec::new(id, int(1), verts).with_edges(pairs));
    }

    let out = b
        .build(&source, &target)
        .expect("transformation yields a valid instance");
    (
        out,
        TransformMap {
            copies,
            origin_vertex,
            origin_agent,
            helper_of,
        },
    )
}
