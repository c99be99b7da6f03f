//! One entry point over all exact solvers.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::decomp::{DecompError, Heuristic};
use crate::intersect::IntersectionGraph;
use crate::model::{AgentIdx, Instance, Schedule, Time};
use crate::oracle::brute_force_opt;
use crate::order_solver::{order_from_ids, solve_fixed_order, OrderError};
use crate::path_solver::solve_path;
use crate::tree_solver::{check_tree_intersection, solve_tree_intersection, TreeError};
use crate::tw_solver::solve_treewidth_with;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Auto,
    Path,
    Tree,
    Tw,
    Order,
    Oracle,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::Auto,
        Algorithm::Path,
        Algorithm::Tree,
        Algorithm::Tw,
        Algorithm::Order,
        Algorithm::Oracle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Auto => "auto",
            Algorithm::Path => "path",
            Algorithm::Tree => "tree",
            Algorithm::Tw => "tw",
            Algorithm::Order => "order",
            Algorithm::Oracle => "oracle",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = SolveError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| SolveError::UnknownAlgorithm(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("unknown algorithm `{0}`")]
    UnknownAlgorithm(String),
    #[error("the order solver needs an agent order")]
    MissingOrder,
    #[error(transparent)]
    Order(#[from] OrderError),
    #[error(transparent)]
    Path(#[from] DecompError),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

#[derive(Clone, Debug, Default)]
pub struct SolveOptions {
    pub order: Option<Vec<String>>,
    pub heuristic: Heuristic,
    pub oracle_max_len: Option<usize>,
}

/// Solver-specific counters, for reports and benchmarks.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub states: Option<usize>,
    pub width: Option<isize>,
    pub invocations: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    /// The solver that actually ran (never `Auto`).
    pub algorithm: Algorithm,
    pub time: Time,
    pub sequence: Option<Vec<AgentIdx>>,
    pub schedule: Option<Schedule>,
    pub stats: SolveStats,
}

/// Path solver on path graphs, tree solver on acyclic intersection graphs,
/// treewidth solver otherwise.
pub fn choose_algorithm(inst: &Instance) -> Algorithm {
    if inst.graph.is_path() {
        Algorithm::Path
    } else if check_tree_intersection(inst, &IntersectionGraph::build(inst)).is_ok() {
        Algorithm::Tree
    } else {
        Algorithm::Tw
    }
}

pub fn solve(inst: &Instance, algorithm: Algorithm, opts: &SolveOptions) -> Result<SolveReport, SolveError> {
    let algorithm = match algorithm {
        Algorithm::Auto => choose_algorithm(inst),
        a => a,
    };
    let report = match algorithm {
        Algorithm::Auto => unreachable!(),
        Algorithm::Path => {
            let sol = solve_path(inst)?;
            SolveReport {
                algorithm,
                sequence: sol.time.is_finite().then(|| sol.carriers.clone()),
                time: sol.time,
                schedule: sol.schedule,
                stats: SolveStats {
                    states: Some(sol.stats.max_entries),
                    width: Some(sol.stats.slots as isize - 1),
                    invocations: None,
                },
            }
        }
        Algorithm::Tree => {
            let sol = solve_tree_intersection(inst)?;
            SolveReport {
                algorithm,
                time: sol.time,
                sequence: sol.order,
                schedule: sol.schedule,
                stats: SolveStats {
                    invocations: Some(sol.invocations),
                    ..SolveStats::default()
                },
            }
        }
        Algorithm::Tw => {
            let sol = solve_treewidth_with(inst, opts.heuristic);
            SolveReport {
                algorithm,
                time: sol.time,
                sequence: sol.sequence,
                schedule: sol.schedule,
                stats: SolveStats {
                    states: Some(sol.stats.total_entries),
                    width: Some(sol.stats.width),
                    invocations: None,
                },
            }
        }
        Algorithm::Order => {
            let ids = opts.order.as_ref().ok_or(SolveError::MissingOrder)?;
            let ids: Vec<&str> = ids.iter().map(String::as_str).collect();
            let order = order_from_ids(inst, &ids)?;
            let (time, _, schedule) = solve_fixed_order(inst, &order)?;
            SolveReport {
                algorithm,
                time,
                sequence: Some(order),
                schedule,
                stats: SolveStats::default(),
            }
        }
        Algorithm::Oracle => {
            let r = brute_force_opt(inst, opts.oracle_max_len);
            SolveReport {
                algorithm,
                time: r.time,
                sequence: r.sequence,
                schedule: r.schedule,
                stats: SolveStats {
                    invocations: Some(r.sequences_tried),
                    ..SolveStats::default()
                },
            }
        }
    };
    Ok(report)
}
