use std::collections::{BTreeSet, HashMap};

use crate::decomp::AdjGraph;
use crate::intersect::{IntersectError, IntersectionGraph};
use crate::model::{AgentDistances, AgentIdx, Instance, Rational, VertexIdx};

use super::TwError;

/// A simple-intersection instance extended by the two designated terminal
/// agents and their two virtual partners.
///
/// Agent numbering: `0..k` are the instance agents, then `a_s = k`,
/// `a_t = k + 1`, `a_s' = k + 2`, `a_t' = k + 3`. The virtual agents never
/// appear in [`AugmentedInstance::graph`].
#[derive(Clone, Debug)]
pub struct AugmentedInstance {
    pub inst: Instance,
    pub dist: AgentDistances,
    pub k: usize,
    /// Neighbours in the augmented intersection graph, virtual partners included.
    pub neighbors: Vec<BTreeSet<AgentIdx>>,
    /// Intersection graph on `0..k + 2`.
    pub graph: AdjGraph,
    /// `B_s` or `B_t` is empty, so no delivery exists.
    pub infeasible: bool,
    point: HashMap<(AgentIdx, AgentIdx), VertexIdx>,
    edge_index: HashMap<(AgentIdx, AgentIdx), usize>,
}

impl AugmentedInstance {
    pub fn a_s(&self) -> AgentIdx {
        self.k
    }

    pub fn a_t(&self) -> AgentIdx {
        self.k + 1
    }

    pub fn a_s_virtual(&self) -> AgentIdx {
        self.k + 2
    }

    pub fn a_t_virtual(&self) -> AgentIdx {
        self.k + 3
    }

    pub fn is_terminal(&self, a: AgentIdx) -> bool {
        a == self.a_s() || a == self.a_t()
    }

    pub fn is_virtual(&self, a: AgentIdx) -> bool {
        a >= self.k + 2
    }

    /// Virtual partner of a terminal.
    pub fn virtual_of(&self, a: AgentIdx) -> AgentIdx {
        a + 2
    }

    /// `D(a, b)`, the unique shared vertex.
    pub fn point(&self, a: AgentIdx, b: AgentIdx) -> Option<VertexIdx> {
        self.point.get(&(a, b)).copied()
    }

    /// Index of `{a, b}` in [`AugmentedInstance::graph`].
    pub fn edge_id(&self, a: AgentIdx, b: AgentIdx) -> Option<usize> {
        self.edge_index.get(&(a.min(b), a.max(b))).copied()
    }

    pub fn label(&self, a: AgentIdx) -> String {
        match a.checked_sub(self.k) {
            None => self.inst.agents[a].id.clone(),
            Some(0) => "a_s".into(),
            Some(1) => "a_t".into(),
            Some(2) => "a_s'".into(),
            _ => "a_t'".into(),
        }
    }

    /// `d_a(D(x, a), D(a, y))`; zero for the terminals.
    pub fn seg_cost(&self, x: AgentIdx, a: AgentIdx, y: AgentIdx) -> Result<Rational, TwError> {
        for other in [x, y] {
            if !self.neighbors.get(a).is_some_and(|n| n.contains(&other)) {
                return Err(TwError::NotNeighbor(self.label(other), self.label(a)));
            }
        }
        if self.is_terminal(a) {
            return Ok(Rational::from_integer(0.into()));
        }
        let p = self.point[&(x, a)];
        let q = self.point[&(a, y)];
        Ok(self
            .dist
            .time(a, p, q)
            .finite()
            .cloned()
            .expect("movement areas are connected"))
    }

    /// Sum of `seg_cost` over the interior of `seq`.
    pub fn extended_sequence_cost(&self, seq: &[AgentIdx]) -> Result<Rational, TwError> {
        let mut total = Rational::from_integer(0.into());
        for w in seq.windows(3) {
            total += self.seg_cost(w[0], w[1], w[2])?;
        }
        if seq.len() == 2 && !self.neighbors[seq[0]].contains(&seq[1]) {
            return Err(TwError::NotNeighbor(self.label(seq[0]), self.label(seq[1])));
        }
        Ok(total)
    }
}

/// Adds `a_s`, `a_t` (areas `{s}`, `{t}`) and their virtual partners.
pub fn augment_with_terminals(inst: &Instance) -> Result<AugmentedInstance, TwError> {
    let ig = IntersectionGraph::build(inst);
    if let Some((a, b)) = ig.simple_edges().find(|&(a, b)| ig.parallel_count(a, b) > 1) {
        return Err(TwError::Intersect(IntersectError::NotSimple(
            ig.id(a).to_string(),
            ig.id(b).to_string(),
            ig.parallel_count(a, b),
        )));
    }
    let k = inst.agent_count();
    let (a_s, a_t) = (k, k + 1);
    let mut neighbors = vec![BTreeSet::new(); k + 4];
    let mut point = HashMap::new();
    let mut graph = AdjGraph::new(k + 2);
    let mut edge_index = HashMap::new();
    let mut link = |a: AgentIdx, b: AgentIdx, v: VertexIdx, graph: &mut AdjGraph| {
        neighbors[a].insert(b);
        neighbors[b].insert(a);
        point.insert((a, b), v);
        point.insert((b, a), v);
        edge_index.insert((a.min(b), a.max(b)), graph.edges.len());
        graph.add_edge(a, b);
    };
    for (a, b, v) in ig.edges().collect::<Vec<_>>() {
        link(a, b, v, &mut graph);
    }
    let b_s = inst.covering_agents(inst.source);
    let b_t = inst.covering_agents(inst.target);
    for &a in &b_s {
        link(a_s, a, inst.source, &mut graph);
    }
    for &a in &b_t {
        link(a_t, a, inst.target, &mut graph);
    }
    neighbors[a_s].insert(k + 2);
    neighbors[k + 2].insert(a_s);
    neighbors[a_t].insert(k + 3);
    neighbors[k + 3].insert(a_t);
    Ok(AugmentedInstance {
        dist: AgentDistances::new(inst),
        inst: inst.clone(),
        k,
        neighbors,
        graph,
        infeasible: b_s.is_empty() || b_t.is_empty(),
        point,
        edge_index,
    })
}
