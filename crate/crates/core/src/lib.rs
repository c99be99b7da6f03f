//! Exact solvers for cooperative single-package delivery by speed-heterogeneous
//! agents with restricted movement areas.

pub mod model;
pub mod intersect;
pub mod decomp;
pub mod oracle;
pub mod order_solver;
pub mod tree_solver;
pub mod path_solver;
pub mod generate;
pub mod tw_solver;
pub mod gadgets;
pub mod solve;
