//! Event points of interval (path) instances and their path decomposition.

use num::Zero;

use super::{DecompError, TreeDecomposition};
use crate::model::{AgentIdx, Instance, Rational, VertexIdx};

/// Positions of the vertices along a path graph, oriented so that the source
/// does not lie to the right of the target.
#[derive(Clone, Debug)]
pub struct PathLayout {
    /// Position -> vertex.
    pub order: Vec<VertexIdx>,
    /// Vertex -> position.
    pub pos: Vec<usize>,
    /// Position -> cumulative coordinate.
    pub coord: Vec<Rational>,
}

impl PathLayout {
    pub fn new(inst: &Instance) -> Result<Self, DecompError> {
        let g = &inst.graph;
        if !g.is_path() {
            return Err(DecompError::NotAPath);
        }
        let n = g.vertex_count();
        let start = (0..n).find(|&v| g.incident(v).len() <= 1).expect("paths have ends");
        let mut order = vec![start];
        let mut lens = Vec::with_capacity(n.saturating_sub(1));
        let mut prev_edge = usize::MAX;
        while order.len() < n {
            let cur = *order.last().unwrap();
            let e = *g
                .incident(cur)
                .iter()
                .find(|&&e| e != prev_edge)
                .expect("path continues");
            order.push(g.edge(e).other(cur));
            lens.push(g.edge(e).len.clone());
            prev_edge = e;
        }
        let mut pos = vec![0; n];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
        if pos[inst.target] < pos[inst.source] {
            order.reverse();
            lens.reverse();
            for (i, &v) in order.iter().enumerate() {
                pos[v] = i;
            }
        }
        let mut coord = Vec::with_capacity(n);
        coord.push(Rational::zero());
        for l in &lens {
            let next = coord.last().unwrap() + l;
            coord.push(next);
        }
        Ok(PathLayout { order, pos, coord })
    }

    /// Leftmost and rightmost positions of an agent's area.
    pub fn interval(&self, inst: &Instance, a: AgentIdx) -> (usize, usize) {
        let ps = inst.agents[a].vertices.iter().map(|&v| self.pos[v]);
        (ps.clone().min().unwrap(), ps.max().unwrap())
    }

    /// Travel length between two positions.
    pub fn distance(&self, p: usize, q: usize) -> Rational {
        if p <= q {
            &self.coord[q] - &self.coord[p]
        } else {
            &self.coord[p] - &self.coord[q]
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum EventKind {
    Start,
    End,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Event {
    pub agent: usize,
    pub kind: EventKind,
    pub position: usize,
    pub coord: Rational,
}

/// Sorted event points with the set of active intervals after each event.
#[derive(Clone, Debug)]
pub struct EventSequence {
    pub events: Vec<Event>,
    /// `bags[i]`: active agents right after `events[i]`, sorted.
    pub bags: Vec<Vec<usize>>,
}

impl EventSequence {
    /// Events are ordered by position, starts before ends, then by `rank`.
    pub fn from_intervals(intervals: &[(usize, usize)], coord: &[Rational], rank: &[usize]) -> Self {
        let mut events: Vec<Event> = Vec::with_capacity(2 * intervals.len());
        for (a, &(lo, hi)) in intervals.iter().enumerate() {
            events.push(Event {
                agent: a,
                kind: EventKind::Start,
                position: lo,
                coord: coord[lo].clone(),
            });
            events.push(Event {
                agent: a,
                kind: EventKind::End,
                position: hi,
                coord: coord[hi].clone(),
            });
        }
        events.sort_by_key(|e| (e.position, e.kind, rank[e.agent]));
        let mut active: Vec<usize> = Vec::new();
        let mut bags = Vec::with_capacity(events.len());
        for e in &events {
            match e.kind {
                EventKind::Start => {
                    let at = active.binary_search(&e.agent).unwrap_err();
                    active.insert(at, e.agent);
                }
                EventKind::End => active.retain(|&x| x != e.agent),
            }
            bags.push(active.clone());
        }
        EventSequence { events, bags }
    }

    pub fn max_bag(&self) -> usize {
        self.bags.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn width(&self) -> isize {
        self.max_bag() as isize - 1
    }

    /// Active set after all events at each distinct coordinate.
    pub fn bags_by_coordinate(&self) -> Vec<(Rational, Vec<usize>)> {
        let mut out: Vec<(Rational, Vec<usize>)> = Vec::new();
        for (e, bag) in self.events.iter().zip(&self.bags) {
            match out.last_mut() {
                Some((c, b)) if *c == e.coord => *b = bag.clone(),
                _ => out.push((e.coord.clone(), bag.clone())),
            }
        }
        out
    }

    /// Path decomposition with one bag per event, chained in event order.
    pub fn to_tree_decomposition(&self) -> TreeDecomposition {
        if self.bags.is_empty() {
            return TreeDecomposition {
                bags: vec![Vec::new()],
                tree: Vec::new(),
                root: 0,
            };
        }
        let m = self.bags.len();
        TreeDecomposition {
            bags: self.bags.clone(),
            tree: (1..m).map(|i| (i - 1, i)).collect(),
            root: m - 1,
        }
    }
}

/// Events of the raw agent intervals (no clipping, no terminal agents).
pub fn path_event_sequence(inst: &Instance) -> Result<EventSequence, DecompError> {
    let layout = PathLayout::new(inst)?;
    let intervals: Vec<(usize, usize)> = (0..inst.agent_count())
        .map(|a| layout.interval(inst, a))
        .collect();
    let mut by_id: Vec<usize> = (0..inst.agent_count()).collect();
    by_id.sort_by(|&a, &b| inst.agents[a].id.cmp(&inst.agents[b].id));
    let mut rank = vec![0; by_id.len()];
    for (r, &a) in by_id.iter().enumerate() {
        rank[a] = r;
    }
    Ok(EventSequence::from_intervals(&intervals, &layout.coord, &rank))
}
