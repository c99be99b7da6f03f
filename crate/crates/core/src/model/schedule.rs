use std::collections::{BTreeMap, BTreeSet};

use num::Zero;
use thiserror::Error;

use super::{AgentIdx, Instance, Rational, VertexIdx};

/// One agent move `(u, v, τ)`: traverse edge `{u, v}` starting at time `τ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trip {
    pub u: VertexIdx,
    pub v: VertexIdx,
    pub tau: Rational,
}

/// One package move `(u, v, a, τ)`, carried by agent `a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Carry {
    pub u: VertexIdx,
    pub v: VertexIdx,
    pub agent: AgentIdx,
    pub tau: Rational,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Schedule {
    pub start_positions: BTreeMap<AgentIdx, VertexIdx>,
    /// Indexed by agent.
    pub agent_trips: Vec<Vec<Trip>>,
    pub package_trips: Vec<Carry>,
}

impl Schedule {
    pub fn empty(agents: usize) -> Self {
        Schedule {
            start_positions: BTreeMap::new(),
            agent_trips: vec![Vec::new(); agents],
            package_trips: Vec::new(),
        }
    }

    /// Builds the relay schedule in which each leg's agent carries the package
    /// along the given vertex walk, starting as soon as the previous leg ends.
    ///
    /// Every agent waits at the first vertex of its leg; agents without a leg
    /// sit at their smallest area vertex (or their fixed start).
    pub fn from_legs(inst: &Instance, legs: &[(AgentIdx, Vec<VertexIdx>)]) -> Self {
        let mut sched = Schedule::empty(inst.agent_count());
        let mut clock = Rational::zero();
        for (a, walk) in legs {
            let a = *a;
            sched.start_positions.entry(a).or_insert(walk[0]);
            for w in walk.windows(2) {
                let len = inst
                    .agent_edge_len(a, w[0], w[1])
                    .expect("leg walks use agent edges")
                    .clone();
                sched.agent_trips[a].push(Trip {
                    u: w[0],
                    v: w[1],
                    tau: clock.clone(),
                });
                sched.package_trips.push(Carry {
                    u: w[0],
                    v: w[1],
                    agent: a,
                    tau: clock.clone(),
                });
                clock += len / &inst.agents[a].speed;
            }
        }
        for (a, agent) in inst.agents.iter().enumerate() {
            sched
                .start_positions
                .entry(a)
                .or_insert(agent.start.unwrap_or(agent.vertices[0]));
        }
        sched
    }

    /// Package route grouped into maximal single-carrier walks.
    pub fn legs(&self) -> Vec<(AgentIdx, Vec<VertexIdx>)> {
        let mut legs: Vec<(AgentIdx, Vec<VertexIdx>)> = Vec::new();
        for c in &self.package_trips {
            match legs.last_mut() {
                Some((a, walk)) if *a == c.agent => walk.push(c.v),
                _ => legs.push((c.agent, vec![c.u, c.v])),
            }
        }
        legs
    }

    /// Ordered list of distinct consecutive carriers.
    pub fn carriers(&self) -> Vec<AgentIdx> {
        let mut out: Vec<AgentIdx> = Vec::new();
        for c in &self.package_trips {
            if out.last() != Some(&c.agent) {
                out.push(c.agent);
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Selectable starting positions.
    Sp,
    /// Fixed starting positions `p_a`.
    Fp,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Validation {
    pub delivery_time: Rational,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("agent {agent} trip #{index} ({u},{v},{tau}): edge not in its area")]
    EdgeNotInArea {
        agent: String,
        index: usize,
        u: String,
        v: String,
        tau: String,
    },
    #[error("agent {agent} trip #{index}: starts at {u} but previous trip ended at {prev_v}")]
    BrokenChain {
        agent: String,
        index: usize,
        u: String,
        prev_v: String,
    },
    #[error("agent {agent} trip #{index} ({u},{v},{tau}): departs before arrival at {arrival}")]
    Timing {
        agent: String,
        index: usize,
        u: String,
        v: String,
        tau: String,
        arrival: String,
    },
    #[error("agent {agent} trip #{index}: negative start time {tau}")]
    NegativeTime {
        agent: String,
        index: usize,
        tau: String,
    },
    #[error("agent {agent}: start position {declared} differs from first trip origin {first}")]
    StartMismatch {
        agent: String,
        declared: String,
        first: String,
    },
    #[error("agent {agent}: start position {vertex} outside its area")]
    StartOutsideArea { agent: String, vertex: String },
    #[error("agent {agent}: must start at fixed position {fixed}, starts at {actual}")]
    FixedStartViolated {
        agent: String,
        fixed: String,
        actual: String,
    },
    #[error("agent {agent}: no fixed start position in fixed-start mode")]
    MissingFixedStart { agent: String },
    #[error("package path empty")]
    PackagePathEmpty,
    #[error("package tuple #0 starts at {actual}, not at the source {source_vertex}")]
    WrongStart {
        actual: String,
        source_vertex: String,
    },
    #[error("last package tuple ends at {actual}, not at the target {target}")]
    WrongEnd { actual: String, target: String },
    #[error("package tuple #{index} ({u},{v},{agent},{tau}): no matching trip of {agent}")]
    UnmatchedCarry {
        index: usize,
        u: String,
        v: String,
        agent: String,
        tau: String,
    },
    #[error("package tuple #{index}: starts at {u} but the package is at {prev_v}")]
    PackageChain {
        index: usize,
        u: String,
        prev_v: String,
    },
    #[error("package tuple #{index} ({u},{v},{agent},{tau}): package only arrives at {arrival}")]
    PackageTiming {
        index: usize,
        u: String,
        v: String,
        agent: String,
        tau: String,
        arrival: String,
    },
    #[error("package tuple #{index}: {from} and {to} never meet at {vertex}")]
    NoHandover {
        index: usize,
        from: String,
        to: String,
        vertex: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("infeasible schedule: {}", .violations.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
pub struct ScheduleError {
    pub violations: Vec<Violation>,
}

/// Checks every feasibility rule and returns the delivery time `c(S)`.
pub fn validate_schedule(
    inst: &Instance,
    sched: &Schedule,
    mode: Mode,
) -> Result<Validation, ScheduleError> {
    let g = &inst.graph;
    let vname = |v: VertexIdx| g.name(v).to_string();
    let aname = |a: AgentIdx| inst.agents[a].id.clone();
    let fmt = super::format_rational;
    let mut violations = Vec::new();
    let no_trips = Vec::new();
    let trips_of = |a: AgentIdx| sched.agent_trips.get(a).unwrap_or(&no_trips);

    // Per-trip travel durations, None when the edge is not usable.
    let mut durations: Vec<Vec<Option<Rational>>> = Vec::with_capacity(inst.agent_count());
    for (a, agent) in inst.agents.iter().enumerate() {
        let trips = trips_of(a);
        let mut dur = Vec::with_capacity(trips.len());
        for (i, t) in trips.iter().enumerate() {
            let len = inst.agent_edge_len(a, t.u, t.v);
            if len.is_none() {
                violations.push(Violation::EdgeNotInArea {
                    agent: aname(a),
                    index: i,
                    u: vname(t.u),
                    v: vname(t.v),
                    tau: fmt(&t.tau),
                });
            }
            dur.push(len.map(|l| l / &agent.speed));
            if t.tau < Rational::zero() {
                violations.push(Violation::NegativeTime {
                    agent: aname(a),
                    index: i,
                    tau: fmt(&t.tau),
                });
            }
            if i > 0 {
                let prev = &trips[i - 1];
                if prev.v != t.u {
                    violations.push(Violation::BrokenChain {
                        agent: aname(a),
                        index: i,
                        u: vname(t.u),
                        prev_v: vname(prev.v),
                    });
                }
                if let Some(d) = &dur[i - 1] {
                    let arrival = &prev.tau + d;
                    if arrival > t.tau {
                        violations.push(Violation::Timing {
                            agent: aname(a),
                            index: i,
                            u: vname(t.u),
                            v: vname(t.v),
                            tau: fmt(&t.tau),
                            arrival: fmt(&arrival),
                        });
                    }
                }
            }
        }
        durations.push(dur);

        let declared = sched.start_positions.get(&a).copied();
        if let Some(p) = declared {
            if !agent.covers(p) {
                violations.push(Violation::StartOutsideArea {
                    agent: aname(a),
                    vertex: vname(p),
                });
            }
        }
        let first = trips.first().map(|t| t.u);
        if let (Some(p), Some(f)) = (declared, first) {
            if p != f {
                violations.push(Violation::StartMismatch {
                    agent: aname(a),
                    declared: vname(p),
                    first: vname(f),
                });
            }
        }
        if mode == Mode::Fp {
            match agent.start {
                None => violations.push(Violation::MissingFixedStart { agent: aname(a) }),
                Some(fixed) => {
                    if let Some(actual) = first.or(declared) {
                        if actual != fixed {
                            violations.push(Violation::FixedStartViolated {
                                agent: aname(a),
                                fixed: vname(fixed),
                                actual: vname(actual),
                            });
                        }
                    }
                }
            }
        }
    }

    let pkg = &sched.package_trips;
    if pkg.is_empty() && inst.source != inst.target {
        violations.push(Violation::PackagePathEmpty);
    }
    if let Some(first) = pkg.first() {
        if first.u != inst.source {
            violations.push(Violation::WrongStart {
                actual: vname(first.u),
                source_vertex: vname(inst.source),
            });
        }
    }
    if let Some(last) = pkg.last() {
        if last.v != inst.target {
            violations.push(Violation::WrongEnd {
                actual: vname(last.v),
                target: vname(inst.target),
            });
        }
    }

    // Locate each package tuple inside its carrier's trip list.
    let mut mirror: Vec<Option<usize>> = Vec::with_capacity(pkg.len());
    let mut mirrored: BTreeSet<(AgentIdx, usize)> = BTreeSet::new();
    for (i, c) in pkg.iter().enumerate() {
        let found = if c.agent < inst.agent_count() {
            trips_of(c.agent)
                .iter()
                .position(|t| t.u == c.u && t.v == c.v && t.tau == c.tau)
        } else {
            None
        };
        if found.is_none() {
            violations.push(Violation::UnmatchedCarry {
                index: i,
                u: vname(c.u),
                v: vname(c.v),
                agent: inst
                    .agents
                    .get(c.agent)
                    .map_or_else(|| format!("#{}", c.agent), |a| a.id.clone()),
                tau: fmt(&c.tau),
            });
        } else if let Some(j) = found {
            mirrored.insert((c.agent, j));
        }
        mirror.push(found);
    }

    let duration = |i: usize| -> Option<&Rational> {
        let j = mirror[i]?;
        durations[pkg[i].agent][j].as_ref()
    };

    for i in 1..pkg.len() {
        let (prev, cur) = (&pkg[i - 1], &pkg[i]);
        if prev.v != cur.u {
            violations.push(Violation::PackageChain {
                index: i,
                u: vname(cur.u),
                prev_v: vname(prev.v),
            });
            continue;
        }
        let Some(d) = duration(i - 1) else { continue };
        let arrival = &prev.tau + d;
        if arrival > cur.tau {
            violations.push(Violation::PackageTiming {
                index: i,
                u: vname(cur.u),
                v: vname(cur.v),
                agent: aname(cur.agent),
                tau: fmt(&cur.tau),
                arrival: fmt(&arrival),
            });
            continue;
        }
        if prev.agent == cur.agent {
            continue;
        }
        let (Some(jp), Some(jc)) = (mirror[i - 1], mirror[i]) else {
            continue;
        };
        // Previous carrier stays at the vertex from `arrival` until its next departure.
        let leave_prev = trips_of(prev.agent).get(jp + 1).map(|t| t.tau.clone());
        // Next carrier is there from its own arrival (or time 0) until `cur.tau`.
        let reach_cur = if jc == 0 {
            Some(Rational::zero())
        } else {
            let before = &trips_of(cur.agent)[jc - 1];
            durations[cur.agent][jc - 1]
                .as_ref()
                .map(|d| &before.tau + d)
        };
        let Some(reach_cur) = reach_cur else { continue };
        let lo = if arrival > reach_cur { &arrival } else { &reach_cur };
        let meets = lo <= &cur.tau && leave_prev.as_ref().is_none_or(|l| lo <= l);
        if !meets {
            violations.push(Violation::NoHandover {
                index: i,
                from: aname(prev.agent),
                to: aname(cur.agent),
                vertex: vname(cur.u),
            });
        }
    }

    if !violations.is_empty() {
        return Err(ScheduleError { violations });
    }

    let mut warnings = Vec::new();
    for a in 0..inst.agent_count() {
        let idle_moves = (0..trips_of(a).len())
            .filter(|j| !mirrored.contains(&(a, *j)))
            .count();
        if idle_moves > 0 {
            warnings.push(format!(
                "agent {} makes {idle_moves} move(s) without the package",
                aname(a)
            ));
        }
    }
    let delivery_time = match pkg.last() {
        None => Rational::zero(),
        Some(last) => &last.tau + duration(pkg.len() - 1).expect("checked above"),
    };
    Ok(Validation {
        delivery_time,
        warnings,
    })
}
