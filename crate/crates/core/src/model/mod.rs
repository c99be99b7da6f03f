//! Instances, exact arithmetic, per-agent distances and schedule checking.

mod distance;
mod instance;
pub mod io;
mod schedule;
mod time;

pub use distance::AgentDistances;
pub use instance::{
    has_zero_length_edges, Agent, AgentIdx, AgentSpec, Edge, EdgeIdx, Graph, Instance,
    InstanceBuilder, VertexIdx,
};
pub use schedule::{
    validate_schedule, Carry, Mode, Schedule, ScheduleError, Trip, Validation, Violation,
};
pub use time::{format_rational, int, parse_rational, rational_to_f64, Rational, Time};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),
    #[error("duplicate agent id `{0}`")]
    DuplicateAgent(String),
    #[error("unknown agent `{0}`")]
    UnknownAgent(String),
    #[error("self-loop at `{0}`")]
    SelfLoop(String),
    #[error("negative length on edge {0}-{1}")]
    NegativeLength(String, String),
    #[error("no edge between `{0}` and `{1}`")]
    UnknownEdge(String, String),
    #[error("agent `{0}`: non-positive speed")]
    NonPositiveSpeed(String),
    #[error("agent `{0}`: empty movement area")]
    EmptyArea(String),
    #[error("agent `{0}`: disconnected movement area")]
    DisconnectedArea(String),
    #[error("agent `{agent}`: edge {u}-{v} leaves its vertex set")]
    EdgeOutsideArea { agent: String, u: String, v: String },
    #[error("agent `{0}`: start position outside its area")]
    StartOutsideArea(String),
    #[error("bad rational `{0}`")]
    BadRational(String),
}
