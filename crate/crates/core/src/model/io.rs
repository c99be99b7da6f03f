//! JSON reading and writing for instances and schedules.
//!
//! Vertex and agent ids may be JSON strings or numbers; rationals may be
//! numbers or strings in `"3"`, `"1.25"` or `"7/2"` form.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{
    format_rational, parse_rational, AgentSpec, Carry, Instance, InstanceBuilder, ModelError,
    Rational, Schedule, Trip,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Id {
    Str(String),
    Num(serde_json::Number),
}

impl Id {
    pub fn into_string(self) -> String {
        match self {
            Id::Str(s) => s,
            Id::Num(n) => n.to_string(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RationalText {
    Str(String),
    Num(serde_json::Number),
}

impl RationalText {
    fn parse(&self) -> Result<Rational, ModelError> {
        match self {
            RationalText::Str(s) => parse_rational(s),
            RationalText::Num(n) => parse_rational(&n.to_string()),
        }
    }
}

impl From<&Rational> for RationalText {
    fn from(r: &Rational) -> Self {
        RationalText::Str(format_rational(r))
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeJson {
    u: Id,
    v: Id,
    len: RationalText,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AgentJson {
    id: Id,
    speed: RationalText,
    vertices: Vec<Id>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    edges: Option<Vec<(Id, Id)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    start: Option<Id>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceJson {
    vertices: Vec<Id>,
    edges: Vec<EdgeJson>,
    source: Id,
    target: Id,
    agents: Vec<AgentJson>,
}

pub fn parse_instance(text: &[u8]) -> Result<Instance, ModelError> {
    let raw: InstanceJson =
        serde_json::from_slice(text).map_err(|e| ModelError::Syntax(e.to_string()))?;
    let mut b = InstanceBuilder::new();
    for v in raw.vertices {
        b.vertex(v.into_string());
    }
    for e in raw.edges {
        let len = e.len.parse()?;
        b.edge(&e.u.into_string(), &e.v.into_string(), len);
    }
    for a in raw.agents {
        let mut spec = AgentSpec::new(
            a.id.into_string(),
            a.speed.parse()?,
            a.vertices.into_iter().map(Id::into_string).collect(),
        );
        if let Some(edges) = a.edges {
            spec = spec.with_edges(
                edges
                    .into_iter()
                    .map(|(u, v)| (u.into_string(), v.into_string()))
                    .collect(),
            );
        }
        if let Some(start) = a.start {
            spec = spec.with_start(start.into_string());
        }
        b.agent(spec);
    }
    b.build(&raw.source.into_string(), &raw.target.into_string())
}

pub fn instance_to_json(inst: &Instance) -> serde_json::Value {
    let g = &inst.graph;
    let name = |v: usize| Id::Str(g.name(v).to_string());
    let raw = InstanceJson {
        vertices: (0..g.vertex_count()).map(name).collect(),
        edges: g
            .edges()
            .iter()
            .map(|e| EdgeJson {
                u: name(e.u),
                v: name(e.v),
                len: (&e.len).into(),
            })
            .collect(),
        source: name(inst.source),
        target: name(inst.target),
        agents: inst
            .agents
            .iter()
            .map(|a| AgentJson {
                id: Id::Str(a.id.clone()),
                speed: (&a.speed).into(),
                vertices: a.vertices.iter().map(|&v| name(v)).collect(),
                edges: a.explicit_edges.then(|| {
                    let mut pairs: Vec<(usize, usize)> = a
                        .edges
                        .iter()
                        .map(|&e| {
                            let e = g.edge(e);
                            (e.u, e.v)
                        })
                        .collect();
                    pairs.dedup();
                    pairs.into_iter().map(|(u, v)| (name(u), name(v))).collect()
                }),
                start: a.start.map(name),
            })
            .collect(),
    };
    serde_json::to_value(raw).expect("instance serializes")
}

pub fn serialize_instance(inst: &Instance) -> String {
    serde_json::to_string_pretty(&instance_to_json(inst)).expect("instance serializes")
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TripJson {
    u: Id,
    v: Id,
    tau: RationalText,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CarryJson {
    u: Id,
    v: Id,
    agent: Id,
    tau: RationalText,
}

#[derive(Debug, Serialize, Deserialize)]
struct ScheduleJson {
    #[serde(default)]
    start_positions: BTreeMap<String, Id>,
    #[serde(default)]
    agent_trips: BTreeMap<String, Vec<TripJson>>,
    #[serde(default)]
    package_trips: Vec<CarryJson>,
}

/// Reads a schedule; names are resolved against `inst`.
pub fn parse_schedule(inst: &Instance, text: &[u8]) -> Result<Schedule, ModelError> {
    let raw: ScheduleJson =
        serde_json::from_slice(text).map_err(|e| ModelError::Syntax(e.to_string()))?;
    let vertex = |id: Id| {
        let s = id.into_string();
        inst.graph.vertex(&s).ok_or(ModelError::UnknownVertex(s))
    };
    let agent = |s: String| inst.agent_index(&s).ok_or(ModelError::UnknownAgent(s));
    let mut sched = Schedule::empty(inst.agent_count());
    for (a, v) in raw.start_positions {
        sched.start_positions.insert(agent(a)?, vertex(v)?);
    }
    for (a, trips) in raw.agent_trips {
        let a = agent(a)?;
        for t in trips {
            sched.agent_trips[a].push(Trip {
                u: vertex(t.u)?,
                v: vertex(t.v)?,
                tau: t.tau.parse()?,
            });
        }
    }
    for c in raw.package_trips {
        sched.package_trips.push(Carry {
            u: vertex(c.u)?,
            v: vertex(c.v)?,
            agent: agent(c.agent.into_string())?,
            tau: c.tau.parse()?,
        });
    }
    Ok(sched)
}

pub fn schedule_to_json(inst: &Instance, sched: &Schedule) -> serde_json::Value {
    let name = |v: usize| Id::Str(inst.graph.name(v).to_string());
    let raw = ScheduleJson {
        start_positions: sched
            .start_positions
            .iter()
            .map(|(&a, &v)| (inst.agents[a].id.clone(), name(v)))
            .collect(),
        agent_trips: sched
            .agent_trips
            .iter()
            .enumerate()
            .filter(|(_, trips)| !trips.is_empty())
            .map(|(a, trips)| {
                (
                    inst.agents[a].id.clone(),
                    trips
                        .iter()
                        .map(|t| TripJson {
                            u: name(t.u),
                            v: name(t.v),
                            tau: (&t.tau).into(),
                        })
                        .collect(),
                )
            })
            .collect(),
        package_trips: sched
            .package_trips
            .iter()
            .map(|c| CarryJson {
                u: name(c.u),
                v: name(c.v),
                agent: Id::Str(inst.agents[c.agent].id.clone()),
                tau: (&c.tau).into(),
            })
            .collect(),
    };
    serde_json::to_value(raw).expect("schedule serializes")
}

pub fn serialize_schedule(inst: &Instance, sched: &Schedule) -> String {
    serde_json::to_string_pretty(&schedule_to_json(inst, sched)).expect("schedule serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = r#"{
        "vertices": ["s", 1, "t"],
        "edges": [{"u": "s", "v": 1, "len": "1.5"}, {"u": "1", "v": "t", "len": 2}],
        "source": "s", "target": "t",
        "agents": [
            {"id": 7, "speed": "7/2", "vertices": ["s", "1"]},
            {"id": "b", "speed": "1", "vertices": ["1", "t"], "edges": [["1", "t"]], "start": "t"}
        ]
    }"#;

    #[test]
    fn mixed_id_and_rational_syntax() {
        let inst = parse_instance(SMALL.as_bytes()).unwrap();
        assert_eq!(inst.agent_count(), 2);
        assert_eq!(inst.agents[0].id, "7");
        assert_eq!(inst.graph.edge(0).len, Rational::new(3.into(), 2.into()));
        assert_eq!(inst.agents[1].start, inst.graph.vertex("t"));
    }

    #[test]
    fn round_trip() {
        let inst = parse_instance(SMALL.as_bytes()).unwrap();
        let again = parse_instance(serialize_instance(&inst).as_bytes()).unwrap();
        assert_eq!(inst, again);
    }

    #[test]
    fn syntax_errors_are_reported() {
        assert!(matches!(
            parse_instance(b"{not json"),
            Err(ModelError::Syntax(_))
        ));
        let bad = SMALL.replace("\"7/2\"", "\"7/0\"");
        assert!(matches!(
            parse_instance(bad.as_bytes()),
            Err(ModelError::BadRational(_))
        ));
    }
}
