use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::{AgentIdx, Instance, Rational, Time, VertexIdx};

/// Per-agent shortest paths restricted to each agent's own area.
///
/// `time(a, u, v)` is the `G_a` shortest-path length divided by the speed,
/// and infinite when either endpoint lies outside `V_a`.
#[derive(Clone, Debug)]
pub struct AgentDistances {
    tables: Vec<AgentTable>,
}

#[derive(Clone, Debug)]
struct AgentTable {
    /// Global vertex -> local slot, `usize::MAX` when outside the area.
    slot: Vec<usize>,
    vertices: Vec<VertexIdx>,
    /// `len[i][j]`: shortest length between local slots.
    len: Vec<Vec<Option<Rational>>>,
    /// `pred[i][j]`: predecessor of slot `j` on the tree rooted at `i`.
    pred: Vec<Vec<usize>>,
    speed: Rational,
}

impl AgentDistances {
    pub fn new(inst: &Instance) -> Self {
        let n = inst.graph.vertex_count();
        let tables = inst
            .agents
            .iter()
            .map(|agent| {
                let mut slot = vec![usize::MAX; n];
                for (i, &v) in agent.vertices.iter().enumerate() {
                    slot[v] = i;
                }
                let m = agent.vertices.len();
                let mut adj: Vec<Vec<(usize, &Rational)>> = vec![Vec::new(); m];
                for &e in &agent.edges {
                    let edge = inst.graph.edge(e);
                    let (a, b) = (slot[edge.u], slot[edge.v]);
                    adj[a].push((b, &edge.len));
                    adj[b].push((a, &edge.len));
                }
                let mut len = Vec::with_capacity(m);
                let mut pred = Vec::with_capacity(m);
                for src in 0..m {
                    let (l, p) = dijkstra(&adj, src);
                    len.push(l);
                    pred.push(p);
                }
                AgentTable {
                    slot,
                    vertices: agent.vertices.clone(),
                    len,
                    pred,
                    speed: agent.speed.clone(),
                }
            })
            .collect();
        AgentDistances { tables }
    }

    pub fn agent_count(&self) -> usize {
        self.tables.len()
    }

    /// Shortest-path length inside `G_a` (not divided by speed).
    pub fn length(&self, a: AgentIdx, u: VertexIdx, v: VertexIdx) -> Option<&Rational> {
        let t = &self.tables[a];
        let (i, j) = (*t.slot.get(u)?, *t.slot.get(v)?);
        if i == usize::MAX || j == usize::MAX {
            return None;
        }
        t.len[i][j].as_ref()
    }

    /// `d_a(u, v)`.
    pub fn time(&self, a: AgentIdx, u: VertexIdx, v: VertexIdx) -> Time {
        match self.length(a, u, v) {
            Some(l) => Time::Finite(l / &self.tables[a].speed),
            None => Time::Infinite,
        }
    }

    /// Vertex sequence of the chosen shortest path from `u` to `v` inside `G_a`.
    pub fn path(&self, a: AgentIdx, u: VertexIdx, v: VertexIdx) -> Option<Vec<VertexIdx>> {
        self.length(a, u, v)?;
        let t = &self.tables[a];
        let (i, mut j) = (t.slot[u], t.slot[v]);
        let mut rev = vec![t.vertices[j]];
        while j != i {
            j = t.pred[i][j];
            rev.push(t.vertices[j]);
        }
        rev.reverse();
        Some(rev)
    }
}

fn dijkstra(adj: &[Vec<(usize, &Rational)>], src: usize) -> (Vec<Option<Rational>>, Vec<usize>) {
    let m = adj.len();
    let mut dist: Vec<Option<Rational>> = vec![None; m];
    let mut pred = vec![usize::MAX; m];
    let mut done = vec![false; m];
    let mut heap = BinaryHeap::new();
    dist[src] = Some(Rational::from_integer(0.into()));
    pred[src] = src;
    heap.push(Reverse((Rational::from_integer(0.into()), src)));
    while let Some(Reverse((d, x))) = heap.pop() {
        if done[x] {
            continue;
        }
        done[x] = true;
        for &(y, w) in &adj[x] {
            let cand = &d + w;
            let better = match &dist[y] {
                None => true,
                Some(cur) => cand < *cur || (cand == *cur && !done[y] && x < pred[y]),
            };
            if better && !done[y] {
                dist[y] = Some(cand.clone());
                pred[y] = x;
                heap.push(Reverse((cand, y)));
            }
        }
    }
    (dist, pred)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{int, AgentSpec, InstanceBuilder};

    fn chain() -> Instance {
        let mut b = InstanceBuilder::new();
        for v in ["a", "b", "c", "d"] {
            b.vertex(v);
        }
        b.edge("a", "b", int(0)).edge("b", "c", int(3)).edge("a", "c", int(5));
        b.edge("c", "d", int(1));
        b.agent(AgentSpec::new(
            "x",
            int(2),
            vec!["a".into(), "b".into(), "c".into()],
        ));
        b.build("a", "d").unwrap()
    }

    #[test]
    fn zero_length_edges_and_speed() {
        let inst = chain();
        let d = AgentDistances::new(&inst);
        assert_eq!(d.time(0, 0, 2), Time::Finite(Rational::new(3.into(), 2.into())));
        assert_eq!(d.time(0, 0, 1), Time::zero());
        assert_eq!(d.time(0, 1, 1), Time::zero());
        assert_eq!(d.time(0, 0, 3), Time::Infinite);
        assert_eq!(d.path(0, 0, 2).unwrap(), vec![0, 1, 2]);
    }
}
