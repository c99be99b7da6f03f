//! Optimal handover vertices for a fixed sequence of agents, via a shortest
//! path through a layered DAG.

use thiserror::Error;

use crate::model::{AgentDistances, AgentIdx, Instance, Schedule, Time, VertexIdx};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrderError {
    #[error("empty agent order")]
    EmptyOrder,
    #[error("unknown agent `{0}`")]
    UnknownAgent(String),
}

/// Layer 0 is `{s}`, layer `i` is `V_{a_i} ∩ V_{a_{i+1}}`, the last layer is `{t}`.
/// Arcs run between consecutive layers; the arc into layer `i` is travelled by
/// the `i`-th agent of the order.
#[derive(Clone, Debug)]
pub struct LayeredGraph {
    pub order: Vec<AgentIdx>,
    pub layers: Vec<Vec<VertexIdx>>,
    /// `arcs[i]` holds `(p, q, weight)` index pairs from layer `i` into layer `i + 1`.
    pub arcs: Vec<Vec<(usize, usize, Time)>>,
}

pub fn build_layered_graph(
    inst: &Instance,
    dist: &AgentDistances,
    order: &[AgentIdx],
) -> Result<LayeredGraph, OrderError> {
    if order.is_empty() {
        return Err(OrderError::EmptyOrder);
    }
    if let Some(&bad) = order.iter().find(|&&a| a >= inst.agent_count()) {
        return Err(OrderError::UnknownAgent(format!("#{bad}")));
    }
    let b = order.len();
    let mut layers = Vec::with_capacity(b + 1);
    layers.push(vec![inst.source]);
    for w in order.windows(2) {
        let (x, y) = (&inst.agents[w[0]], &inst.agents[w[1]]);
        layers.push(
            x.vertices
                .iter()
                .copied()
                .filter(|&v| y.covers(v))
                .collect(),
        );
    }
    layers.push(vec![inst.target]);
    let arcs = (0..b)
        .map(|i| {
            let mut out = Vec::new();
            for (pi, &p) in layers[i].iter().enumerate() {
                for (qi, &q) in layers[i + 1].iter().enumerate() {
                    let w = dist.time(order[i], p, q);
                    if w.is_finite() {
                        out.push((pi, qi, w));
                    }
                }
            }
            out
        })
        .collect();
    Ok(LayeredGraph {
        order: order.to_vec(),
        layers,
        arcs,
    })
}

#[derive(Clone, Debug)]
pub struct FixedOrderSolution {
    pub time: Time,
    /// Chosen vertex per layer, `s` first and `t` last; empty when infeasible.
    pub route: Vec<VertexIdx>,
}

impl FixedOrderSolution {
    /// Handover vertices strictly between the first and last agent.
    pub fn handovers(&self) -> &[VertexIdx] {
        if self.route.len() < 2 {
            &[]
        } else {
            &self.route[1..self.route.len() - 1]
        }
    }

    /// Relay schedule following each agent's internal shortest path.
    pub fn schedule(&self, inst: &Instance, dist: &AgentDistances, order: &[AgentIdx]) -> Option<Schedule> {
        if !self.time.is_finite() {
            return None;
        }
        if self.route.is_empty() {
            return Some(Schedule::from_legs(inst, &[]));
        }
        let legs: Vec<(AgentIdx, Vec<VertexIdx>)> = order
            .iter()
            .enumerate()
            .map(|(i, &a)| {
                let walk = dist
                    .path(a, self.route[i], self.route[i + 1])
                    .expect("finite arcs have paths");
                (a, walk)
            })
            .collect();
        Some(Schedule::from_legs(inst, &legs))
    }
}

/// Forward sweep over the layered DAG; ties keep the earlier vertex.
pub fn shortest_layered_path(lg: &LayeredGraph) -> FixedOrderSolution {
    let mut best: Vec<Vec<Time>> = lg
        .layers
        .iter()
        .map(|l| vec![Time::Infinite; l.len()])
        .collect();
    let mut pred: Vec<Vec<usize>> = lg.layers.iter().map(|l| vec![usize::MAX; l.len()]).collect();
    best[0][0] = Time::zero();
    for (i, arcs) in lg.arcs.iter().enumerate() {
        for (p, q, w) in arcs {
            if !best[i][*p].is_finite() {
                continue;
            }
            let cand = &best[i][*p] + w;
            if cand < best[i + 1][*q] {
                best[i + 1][*q] = cand;
                pred[i + 1][*q] = *p;
            }
        }
    }
    let last = lg.layers.len() - 1;
    let time = best[last][0].clone();
    if !time.is_finite() {
        return FixedOrderSolution {
            time,
            route: Vec::new(),
        };
    }
    let mut idx = vec![0; lg.layers.len()];
    for i in (1..=last).rev() {
        idx[i - 1] = pred[i][idx[i]];
    }
    let route = idx
        .iter()
        .enumerate()
        .map(|(i, &j)| lg.layers[i][j])
        .collect();
    FixedOrderSolution { time, route }
}

/// Optimal delivery time using exactly the agents of `order`, in that order.
pub fn fixed_order_time(
    inst: &Instance,
    dist: &AgentDistances,
    order: &[AgentIdx],
) -> Result<FixedOrderSolution, OrderError> {
    if inst.source == inst.target {
        if order.is_empty() {
            return Err(OrderError::EmptyOrder);
        }
        return Ok(FixedOrderSolution {
            time: Time::zero(),
            route: Vec::new(),
        });
    }
    let lg = build_layered_graph(inst, dist, order)?;
    Ok(shortest_layered_path(&lg))
}

/// Convenience wrapper returning time, handovers and a validated-shape schedule.
pub fn solve_fixed_order(
    inst: &Instance,
    order: &[AgentIdx],
) -> Result<(Time, Vec<VertexIdx>, Option<Schedule>), OrderError> {
    let dist = AgentDistances::new(inst);
    let sol = fixed_order_time(inst, &dist, order)?;
    let sched = sol.schedule(inst, &dist, order);
    Ok((sol.time.clone(), sol.handovers().to_vec(), sched))
}

/// Resolves agent ids to indices.
pub fn order_from_ids(inst: &Instance, ids: &[&str]) -> Result<Vec<AgentIdx>, OrderError> {
    ids.iter()
        .map(|id| {
            inst.agent_index(id)
                .ok_or_else(|| OrderError::UnknownAgent(id.to_string()))
        })
        .collect()
}
