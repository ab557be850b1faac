//! Exact rational linear programming in standard equality form.

pub mod oracle;
pub mod problem;
pub mod simplex;

pub use oracle::{vertex_enum_oracle, OracleResult};
pub use problem::LpProblem;
pub use simplex::{
    check_feasible, solve, solve_with_stats, FarkasCertificate, Feasibility, LpSolution, LpStatus,
    Optimum, SolveStats, UnboundedCertificate,
};
