//! Augmented-Lagrangian constraint handling around the ILQR core.
//!
//! Inequality constraints `h_i(x_k, u_k) <= 0` enter the objective as
//! `lambda_{k,i} * h_i + mu_i * h_i^2` per stage. Barrier weights `mu_i` are
//! large and constant, multipliers are clamped to `[0, lambda_max_i]`, and
//! exactly one multiplier update runs per planning cycle; together with
//! warm-start shifting between cycles this keeps the solver stable even for
//! infeasible initializations.

mod augmented;
mod constraint;
mod solver;
mod state;

pub use augmented::{augmented_stage_cost, augmented_stage_expansion, AugmentedProblem};
pub use constraint::{ConstraintFn, ConstraintHessian, ConstraintSet, ConstraintSpec, Mask};
pub use solver::{
    shift_warm_start, solve_constrained, update_multipliers, ConstrainedSolution, ShiftOutcome,
    ViolationReport, WarmStart,
};
pub use state::ALState;
