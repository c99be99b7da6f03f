use std::collections::{BTreeSet, HashMap, VecDeque};

use num::{Signed, Zero};

use super::{ModelError, Rational};

pub type VertexIdx = usize;
pub type AgentIdx = usize;
pub type EdgeIdx = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub u: VertexIdx,
    pub v: VertexIdx,
    pub len: Rational,
}

impl Edge {
    pub fn other(&self, x: VertexIdx) -> VertexIdx {
        if self.u == x {
            self.v
        } else {
            self.u
        }
    }
}

/// Undirected multigraph with non-negative rational edge lengths.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    names: Vec<String>,
    index: HashMap<String, VertexIdx>,
    edges: Vec<Edge>,
    incident: Vec<Vec<EdgeIdx>>,
}

impl Graph {
    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn name(&self, v: VertexIdx) -> &str {
        &self.names[v]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn vertex(&self, name: &str) -> Option<VertexIdx> {
        self.index.get(name).copied()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeIdx) -> &Edge {
        &self.edges[e]
    }

    pub fn incident(&self, v: VertexIdx) -> &[EdgeIdx] {
        &self.incident[v]
    }

    /// All edges joining `u` and `v` (parallel edges included).
    pub fn edges_between(&self, u: VertexIdx, v: VertexIdx) -> impl Iterator<Item = EdgeIdx> + '_ {
        self.incident[u]
            .iter()
            .copied()
            .filter(move |&e| self.edges[e].other(u) == v)
    }

    /// True when the graph is a simple path (a single vertex counts).
    pub fn is_path(&self) -> bool {
        let n = self.vertex_count();
        if n == 0 || self.edges.len() != n - 1 {
            return false;
        }
        let mut seen = BTreeSet::new();
        for e in &self.edges {
            let key = (e.u.min(e.v), e.u.max(e.v));
            if !seen.insert(key) {
                return false;
            }
        }
        if self.incident.iter().any(|inc| inc.len() > 2) {
            return false;
        }
        let all: Vec<VertexIdx> = (0..n).collect();
        let all_edges: Vec<EdgeIdx> = (0..self.edges.len()).collect();
        self.is_connected_on(&all, &all_edges)
    }

    pub(crate) fn is_connected_on(&self, vertices: &[VertexIdx], edges: &[EdgeIdx]) -> bool {
        if vertices.is_empty() {
            return false;
        }
        let mut adj: HashMap<VertexIdx, Vec<VertexIdx>> = HashMap::new();
        for &e in edges {
            let edge = &self.edges[e];
            adj.entry(edge.u).or_default().push(edge.v);
            adj.entry(edge.v).or_default().push(edge.u);
        }
        let mut seen = BTreeSet::from([vertices[0]]);
        let mut queue = VecDeque::from([vertices[0]]);
        while let Some(x) = queue.pop_front() {
            for &y in adj.get(&x).map(Vec::as_slice).unwrap_or(&[]) {
                if seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        vertices.iter().all(|v| seen.contains(v))
    }
}

/// A drone: speed plus a connected movement area, optionally a fixed start.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Agent {
    pub id: String,
    pub speed: Rational,
    /// Sorted, deduplicated.
    pub vertices: Vec<VertexIdx>,
    /// Sorted, deduplicated.
    pub edges: Vec<EdgeIdx>,
    pub start: Option<VertexIdx>,
    /// Whether `edges` was given explicitly or defaulted to the induced subgraph.
    pub explicit_edges: bool,
}

impl Agent {
    pub fn covers(&self, v: VertexIdx) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    pub fn has_edge(&self, e: EdgeIdx) -> bool {
        self.edges.binary_search(&e).is_ok()
    }
}

/// A delivery instance: graph, source, target and agents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub graph: Graph,
    pub source: VertexIdx,
    pub target: VertexIdx,
    pub agents: Vec<Agent>,
}

impl Instance {
    pub fn agent_count(&self) -> usize {
        self.agents.len()
    }

    pub fn agent_index(&self, id: &str) -> Option<AgentIdx> {
        self.agents.iter().position(|a| a.id == id)
    }

    /// The cover set `B_u`: agents whose area contains `u`, by index.
    pub fn covering_agents(&self, u: VertexIdx) -> Vec<AgentIdx> {
        self.agents
            .iter()
            .enumerate()
            .filter(|(_, a)| a.covers(u))
            .map(|(i, _)| i)
            .collect()
    }

    /// Name-based variant of [`Instance::covering_agents`].
    pub fn covering_agents_by_name(&self, vertex: &str) -> Result<BTreeSet<String>, ModelError> {
        let u = self
            .graph
            .vertex(vertex)
            .ok_or_else(|| ModelError::UnknownVertex(vertex.to_string()))?;
        Ok(self
            .covering_agents(u)
            .into_iter()
            .map(|a| self.agents[a].id.clone())
            .collect())
    }

    /// Shortest `E_a` edge length between two adjacent area vertices.
    pub fn agent_edge_len(&self, a: AgentIdx, u: VertexIdx, v: VertexIdx) -> Option<&Rational> {
        let agent = &self.agents[a];
        self.graph
            .edges_between(u, v)
            .filter(|&e| agent.has_edge(e))
            .map(|e| &self.graph.edge(e).len)
            .min()
    }

    /// Multiplies every speed by `factor` (for scaling-law checks).
    pub fn scale_speeds(&self, factor: &Rational) -> Instance {
        let mut out = self.clone();
        for a in &mut out.agents {
            a.speed = &a.speed * factor;
        }
        out
    }

    /// Multiplies every edge length by `factor`.
    pub fn scale_lengths(&self, factor: &Rational) -> Instance {
        let mut out = self.clone();
        for e in &mut out.graph.edges {
            e.len = &e.len * factor;
        }
        out
    }
}

/// Description of an agent prior to validation.
#[derive(Clone, Debug)]
pub struct AgentSpec {
    pub id: String,
    pub speed: Rational,
    pub vertices: Vec<String>,
    pub edges: Option<Vec<(String, String)>>,
    pub start: Option<String>,
}

impl AgentSpec {
    pub fn new(id: impl Into<String>, speed: Rational, vertices: Vec<String>) -> Self {
        AgentSpec {
            id: id.into(),
            speed,
            vertices,
            edges: None,
            start: None,
        }
    }

    pub fn with_edges(mut self, edges: Vec<(String, String)>) -> Self {
        self.edges = Some(edges);
        self
    }

    pub fn with_start(mut self, start: impl Into<String>) -> Self {
        self.start = Some(start.into());
        self
    }
}

/// Incremental, validating construction of an [`Instance`].
#[derive(Clone, Debug, Default)]
pub struct InstanceBuilder {
    names: Vec<String>,
    index: HashMap<String, VertexIdx>,
    edges: Vec<Edge>,
    agents: Vec<AgentSpec>,
    error: Option<ModelError>,
}

impl InstanceBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn vertex(&mut self, name: impl Into<String>) -> &mut Self {
        let name = name.into();
        if self.index.contains_key(&name) {
            self.error.get_or_insert(ModelError::DuplicateVertex(name));
        } else {
            self.index.insert(name.clone(), self.names.len());
            self.names.push(name);
        }
        self
    }

    pub fn has_vertex(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn edge(&mut self, u: &str, v: &str, len: Rational) -> &mut Self {
        let (Some(&ui), Some(&vi)) = (self.index.get(u), self.index.get(v)) else {
            let missing = if self.index.contains_key(u) { v } else { u };
            self.error.get_or_insert(ModelError::UnknownVertex(missing.to_string()));
            return self;
        };
        if ui == vi {
            self.error.get_or_insert(ModelError::SelfLoop(u.to_string()));
        } else if len.is_negative() {
            self.error
                .get_or_insert(ModelError::NegativeLength(u.to_string(), v.to_string()));
        } else {
            self.edges.push(Edge { u: ui, v: vi, len });
        }
        self
    }

    pub fn agent(&mut self, spec: AgentSpec) -> &mut Self {
        self.agents.push(spec);
        self
    }

    pub fn build(&self, source: &str, target: &str) -> Result<Instance, ModelError> {
        if let Some(err) = &self.error {
            return Err(err.clone());
        }
        let n = self.names.len();
        let mut incident = vec![Vec::new(); n];
        for (i, e) in self.edges.iter().enumerate() {
            incident[e.u].push(i);
            incident[e.v].push(i);
        }
        let graph = Graph {
            names: self.names.clone(),
            index: self.index.clone(),
            edges: self.edges.clone(),
            incident,
        };
        let lookup = |name: &str| {
            graph
                .vertex(name)
                .ok_or_else(|| ModelError::UnknownVertex(name.to_string()))
        };
        let source = lookup(source)?;
        let target = lookup(target)?;

        let mut seen_ids = BTreeSet::new();
        let mut agents = Vec::with_capacity(self.agents.len());
        for spec in &self.agents {
            if !seen_ids.insert(spec.id.clone()) {
                return Err(ModelError::DuplicateAgent(spec.id.clone()));
            }
            if !spec.speed.is_positive() {
                return Err(ModelError::NonPositiveSpeed(spec.id.clone()));
            }
            let mut vertices = spec
                .vertices
                .iter()
                .map(|v| lookup(v))
                .collect::<Result<Vec<_>, _>>()?;
            vertices.sort_unstable();
            vertices.dedup();
            if vertices.is_empty() {
                return Err(ModelError::EmptyArea(spec.id.clone()));
            }
            let member = |v: VertexIdx| vertices.binary_search(&v).is_ok();
            let mut edges = match &spec.edges {
                Some(pairs) => {
                    let mut out = Vec::new();
                    for (u, v) in pairs {
                        let (ui, vi) = (lookup(u)?, lookup(v)?);
                        if !member(ui) || !member(vi) {
                            return Err(ModelError::EdgeOutsideArea {
                                agent: spec.id.clone(),
                                u: u.clone(),
                                v: v.clone(),
                            });
                        }
                        let before = out.len();
                        out.extend(graph.edges_between(ui, vi));
                        if out.len() == before {
                            return Err(ModelError::UnknownEdge(u.clone(), v.clone()));
                        }
                    }
                    out
                }
                None => (0..graph.edge_count())
                    .filter(|&e| member(graph.edge(e).u) && member(graph.edge(e).v))
                    .collect(),
            };
            edges.sort_unstable();
            edges.dedup();
            if !graph.is_connected_on(&vertices, &edges) {
                return Err(ModelError::DisconnectedArea(spec.id.clone()));
            }
            let start = match &spec.start {
                Some(p) => {
                    let pi = lookup(p)?;
                    if !member(pi) {
                        return Err(ModelError::StartOutsideArea(spec.id.clone()));
                    }
                    Some(pi)
                }
                None => None,
            };
            agents.push(Agent {
                id: spec.id.clone(),
                speed: spec.speed.clone(),
                vertices,
                edges,
                start,
                explicit_edges: spec.edges.is_some(),
            });
        }
        Ok(Instance {
            graph,
            source,
            target,
            agents,
        })
    }
}

/// Checks the zero-length-edge-friendly invariants that `build` cannot express.
pub fn has_zero_length_edges(inst: &Instance) -> bool {
    inst.graph.edges().iter().any(|e| e.len.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::time::int;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn single_vertex_source_equals_target() {
        let mut b = InstanceBuilder::new();
        b.vertex("x");
        b.agent(AgentSpec::new("a", int(1), names(&["x"])));
        let inst = b.build("x", "x").unwrap();
        assert_eq!(inst.agent_count(), 1);
        assert!(inst.graph.is_path());
    }

    #[test]
    fn disconnected_area_rejected() {
        let mut b = InstanceBuilder::new();
        b.vertex("a").vertex("b").vertex("c");
        b.edge("a", "b", int(1)).edge("b", "c", int(1));
        b.agent(AgentSpec::new("x", int(1), names(&["a", "c"])));
        let err = b.build("a", "c").unwrap_err();
        assert_eq!(err, ModelError::DisconnectedArea("x".into()));
        assert!(err.to_string().contains("disconnected movement area"));
    }

    #[test]
    fn explicit_edges_can_disconnect_an_otherwise_connected_area() {
        let mut b = InstanceBuilder::new();
        b.vertex("a").vertex("b").vertex("c");
        b.edge("a", "b", int(1)).edge("b", "c", int(1));
        b.agent(
            AgentSpec::new("x", int(1), names(&["a", "b", "c"]))
                .with_edges(vec![("a".into(), "b".into())]),
        );
        assert!(matches!(b.build("a", "c"), Err(ModelError::DisconnectedArea(_))));
    }

    #[test]
    fn rejects_bad_speed_and_unknown_vertices() {
        let mut b = InstanceBuilder::new();
        b.vertex("a");
        b.agent(AgentSpec::new("x", int(0), names(&["a"])));
        assert!(matches!(b.build("a", "a"), Err(ModelError::NonPositiveSpeed(_))));

        let mut b = InstanceBuilder::new();
        b.vertex("a");
        b.agent(AgentSpec::new("x", int(1), names(&["zz"])));
        assert!(matches!(b.build("a", "a"), Err(ModelError::UnknownVertex(_))));
        assert!(matches!(b.build("a", "q"), Err(ModelError::UnknownVertex(_))));
    }

    #[test]
    fn uncovered_vertex_has_empty_cover_set() {
        let mut b = InstanceBuilder::new();
        b.vertex("a").vertex("b").edge("a", "b", int(2));
        b.agent(AgentSpec::new("x", int(1), names(&["a"])));
        let inst = b.build("a", "b").unwrap();
        assert!(inst.covering_agents_by_name("b").unwrap().is_empty());
        assert!(inst.covering_agents_by_name("nope").is_err());
    }

    #[test]
    fn path_detection() {
        let mut b = InstanceBuilder::new();
        b.vertex("a").vertex("b").vertex("c");
        b.edge("a", "b", int(1)).edge("b", "c", int(0));
        assert!(b.build("a", "c").unwrap().graph.is_path());
        b.edge("a", "b", int(3));
        assert!(!b.build("a", "c").unwrap().graph.is_path());
    }
}
