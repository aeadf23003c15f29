//! Iterative-LQR minimizer for discrete-time optimal control.
//!
//! Single shooting: a trajectory is represented by its control sequence, and
//! states always come from integrating the dynamics, so every returned
//! trajectory is dynamically consistent even when the optimization is stopped
//! early. The backward pass is a standard Riccati recursion on the
//! Gauss-Newton expansion (second-order dynamics terms dropped); the forward
//! pass is a backtracking line search on the closed-loop rollout.

mod problem;
mod riccati;
mod solver;

pub use problem::{CostExpansion, DiscreteProblem};
pub use riccati::{backward_pass, BackwardError, ExpectedReduction, Gains};
pub use solver::{
    forward_pass, rollout, solve, ForwardOutcome, IlqrSettings, Regularization, SolveReport,
    Termination, Trajectory,
};
