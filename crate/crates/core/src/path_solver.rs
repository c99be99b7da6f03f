//! Sweep-line dynamic program for instances whose graph is a path.
//!
//! Agents are intervals. The sweep visits start and end points in order and
//! keeps, per event, the cheapest way to have the package at that point for
//! every (set of used active agents, current carrier) pair.

use std::collections::BTreeMap;

use num::Zero;

use crate::decomp::events::{EventKind, EventSequence, PathLayout};
use crate::decomp::DecompError;
use crate::model::{int, AgentIdx, Instance, Rational, Schedule, Time, VertexIdx};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalAgent {
    /// Original agent, `None` for the two terminal agents.
    pub source: Option<AgentIdx>,
    pub id: String,
    /// Leftmost and rightmost path positions.
    pub lo: usize,
    pub hi: usize,
    pub speed: Rational,
}

#[derive(Clone, Debug)]
pub struct CanonicalPath {
    pub layout: PathLayout,
    pub agents: Vec<IntervalAgent>,
    pub a_s: usize,
    pub a_t: usize,
    pub events: EventSequence,
}

/// Clips intervals to `[s, t]`, drops empty ones and appends zero-extent
/// terminal agents at `s` and `t`.
pub fn canonicalize_path(inst: &Instance) -> Result<CanonicalPath, DecompError> {
    let layout = PathLayout::new(inst)?;
    let (ps, pt) = (layout.pos[inst.source], layout.pos[inst.target]);
    let mut agents: Vec<IntervalAgent> = Vec::new();
    for a in 0..inst.agent_count() {
        let (lo, hi) = layout.interval(inst, a);
        let (lo, hi) = (lo.max(ps), hi.min(pt));
        if lo <= hi {
            agents.push(IntervalAgent {
                source: Some(a),
                id: inst.agents[a].id.clone(),
                lo,
                hi,
                speed: inst.agents[a].speed.clone(),
            });
        }
    }
    let terminal = |id: &str, p: usize| IntervalAgent {
        source: None,
        id: id.to_string(),
        lo: p,
        hi: p,
        speed: int(1),
    };
    let a_s = agents.len();
    agents.push(terminal("a_s", ps));
    let a_t = agents.len();
    agents.push(terminal("a_t", pt));

    let mut by_id: Vec<usize> = (0..a_s).collect();
    by_id.sort_by(|&x, &y| agents[x].id.cmp(&agents[y].id));
    let mut rank = vec![0; agents.len()];
    rank[a_s] = 0;
    for (r, &x) in by_id.iter().enumerate() {
        rank[x] = r + 1;
    }
    rank[a_t] = agents.len();
    let intervals: Vec<(usize, usize)> = agents.iter().map(|a| (a.lo, a.hi)).collect();
    let events = EventSequence::from_intervals(&intervals, &layout.coord, &rank);
    Ok(CanonicalPath {
        layout,
        agents,
        a_s,
        a_t,
        events,
    })
}

/// `used` is a bitmask over slots of active agents, `carrier` a slot in it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PathDpKey {
    pub used: u64,
    pub carrier: u8,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathDpEntry {
    pub cost: Rational,
    pub prev: Option<PathDpKey>,
}

pub type PathDpTable = BTreeMap<PathDpKey, PathDpEntry>;

fn relax(table: &mut PathDpTable, key: PathDpKey, cost: Rational, prev: PathDpKey) {
    match table.get(&key) {
        Some(e) if e.cost <= cost => {}
        _ => {
            table.insert(
                key,
                PathDpEntry {
                    cost,
                    prev: Some(prev),
                },
            );
        }
    }
}

/// Agent in slot `x` starts: the carrier keeps the package or hands it to the newcomer.
/// `slot_speed` holds the speeds of the slots active before the event.
pub fn dp_introduce_event(
    prev: &PathDpTable,
    delta: &Rational,
    slot_speed: &[Rational],
    x: u8,
) -> PathDpTable {
    let mut out = PathDpTable::new();
    for (&key, entry) in prev {
        debug_assert_eq!(key.used >> x & 1, 0, "fresh slot cannot be used");
        let cost = &entry.cost + delta / &slot_speed[key.carrier as usize];
        relax(&mut out, key, cost.clone(), key);
        let handed = PathDpKey {
            used: key.used | 1 << x,
            carrier: x,
        };
        relax(&mut out, handed, cost, key);
    }
    out
}

/// Agent in slot `x` ends. If it carries the package it hands over to an
/// unused agent still active (`active_after` is the slot mask after the event).
pub fn dp_forget_event(
    prev: &PathDpTable,
    delta: &Rational,
    slot_speed: &[Rational],
    x: u8,
    active_after: u64,
) -> PathDpTable {
    let mut out = PathDpTable::new();
    for (&key, entry) in prev {
        let cost = &entry.cost + delta / &slot_speed[key.carrier as usize];
        let used = key.used & !(1 << x);
        if key.carrier != x {
            relax(&mut out, PathDpKey { used, carrier: key.carrier }, cost, key);
            continue;
        }
        let mut free = active_after & !used;
        while free != 0 {
            let b = free.trailing_zeros() as u8;
            free &= free - 1;
            relax(
                &mut out,
                PathDpKey {
                    used: used | 1 << b,
                    carrier: b,
                },
                cost.clone(),
                key,
            );
        }
    }
    out
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PathStats {
    pub events: usize,
    pub slots: usize,
    pub max_entries: usize,
}

#[derive(Clone, Debug)]
pub struct PathSolution {
    pub time: Time,
    pub schedule: Option<Schedule>,
    /// Original agents in carrying order.
    pub carriers: Vec<AgentIdx>,
    pub stats: PathStats,
}

pub fn solve_path(inst: &Instance) -> Result<PathSolution, DecompError> {
    let canon = canonicalize_path(inst)?;
    if inst.source == inst.target {
        return Ok(PathSolution {
            time: Time::zero(),
            schedule: Some(Schedule::from_legs(inst, &[])),
            carriers: Vec::new(),
            stats: PathStats::default(),
        });
    }
    let events = &canon.events.events;
    let m = events.len();

    // Greedy slot assignment; slot_of[agent] stays fixed for its lifetime.
    let mut slot_of = vec![u8::MAX; canon.agents.len()];
    let mut occupant: Vec<Option<usize>> = Vec::new();
    // Occupants right after each event.
    let mut occupants_after: Vec<Vec<Option<usize>>> = Vec::with_capacity(m);
    let mut tables: Vec<PathDpTable> = Vec::with_capacity(m);
    let mut stats = PathStats {
        events: m,
        ..PathStats::default()
    };

    for (i, e) in events.iter().enumerate() {
        let speeds: Vec<Rational> = occupant
            .iter()
            .map(|o| o.map_or_else(Rational::zero, |a| canon.agents[a].speed.clone()))
            .collect();
        let delta = if i == 0 {
            Rational::zero()
        } else {
            &e.coord - &events[i - 1].coord
        };
        match e.kind {
            EventKind::Start => {
                let x = occupant.iter().position(Option::is_none).unwrap_or_else(|| {
                    occupant.push(None);
                    occupant.len() - 1
                });
                assert!(x < 64, "more than 64 simultaneously active agents");
                occupant[x] = Some(e.agent);
                slot_of[e.agent] = x as u8;
                let table = if i == 0 {
                    debug_assert_eq!(e.agent, canon.a_s);
                    let key = PathDpKey {
                        used: 1 << x,
                        carrier: x as u8,
                    };
                    PathDpTable::from([(
                        key,
                        PathDpEntry {
                            cost: Rational::zero(),
                            prev: None,
                        },
                    )])
                } else {
                    dp_introduce_event(&tables[i - 1], &delta, &speeds, x as u8)
                };
                tables.push(table);
            }
            EventKind::End => {
                let x = slot_of[e.agent];
                occupant[x as usize] = None;
                let active_after = occupant
                    .iter()
                    .enumerate()
                    .filter(|(_, o)| o.is_some())
                    .fold(0u64, |m, (s, _)| m | 1 << s);
                tables.push(dp_forget_event(
                    &tables[i - 1],
                    &delta,
                    &speeds,
                    x,
                    active_after,
                ));
            }
        }
        occupants_after.push(occupant.clone());
        stats.max_entries = stats.max_entries.max(tables[i].len());
        if tables[i].is_empty() {
            break;
        }
    }
    stats.slots = occupant.len();

    // The terminal agent at t ends last; read the table just before it.
    let infeasible = PathSolution {
        time: Time::Infinite,
        schedule: None,
        carriers: Vec::new(),
        stats: stats.clone(),
    };
    if tables.len() < m || m < 2 {
        return Ok(infeasible);
    }
    debug_assert_eq!(events[m - 1].agent, canon.a_t);
    let last = m - 2;
    let t_slot = slot_of[canon.a_t];
    let Some((&best_key, best)) = tables[last]
        .iter()
        .filter(|(k, _)| k.carrier == t_slot)
        .min_by(|a, b| a.1.cost.cmp(&b.1.cost))
    else {
        return Ok(infeasible);
    };
    let time = Time::Finite(best.cost.clone());

    // Carrier after each event, walking the back pointers.
    let mut carrier_after = vec![0usize; last + 1];
    let mut key = best_key;
    for i in (0..=last).rev() {
        carrier_after[i] = occupants_after[i][key.carrier as usize].expect("carrier occupies slot");
        if let Some(p) = tables[i][&key].prev {
            key = p;
        }
    }

    // Segment events[i] -> events[i + 1] is travelled by carrier_after[i].
    let mut legs: Vec<(AgentIdx, Vec<VertexIdx>)> = Vec::new();
    let mut carriers: Vec<AgentIdx> = Vec::new();
    for i in 0..last {
        let (p, q) = (events[i].position, events[i + 1].position);
        let Some(orig) = canon.agents[carrier_after[i]].source else {
            continue;
        };
        if carriers.last() != Some(&orig) {
            carriers.push(orig);
        }
        if p == q {
            continue;
        }
        let walk: Vec<VertexIdx> = canon.layout.order[p..=q].to_vec();
        match legs.last_mut() {
            Some((a, w)) if *a == orig && *w.last().unwrap() == walk[0] => {
                w.extend_from_slice(&walk[1..])
            }
            _ => legs.push((orig, walk)),
        }
    }
    let schedule = Schedule::from_legs(inst, &legs);
    Ok(PathSolution {
        time,
        schedule: Some(schedule),
        carriers,
        stats,
    })
}
