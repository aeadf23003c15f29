//! Spatial trajectory planning toolkit.
//!
//! Planning is decomposed into a geometric path problem and a longitudinal
//! velocity problem, both expressed as discrete optimal-control problems over
//! arc length `s` instead of time. Constraints that are fixed in space (speed
//! limits, stop lines, obstacle gaps, arrival-time windows) then bind at fixed
//! grid indices, which keeps the problems well conditioned for single-shooting
//! solvers.
//!
//! The crates are organized around that split:
//!
//! - [`ilqr`]: generic iterative-LQR minimizer for unconstrained problems,
//! - [`al`]: augmented-Lagrangian wrapper that handles inequality constraints
//!   with bounded multipliers and a single update per planning cycle,
//! - [`path`]: reference-line smoothing and curvature speed limits,
//! - [`velocity`]: velocity-limit construction, jerk-limited reference
//!   profiles, and the constrained profile optimization,
//! - [`sim`]: closed-loop replanning simulator (kinematic bicycle ego,
//!   scripted actors and signals, 10 ms control cycle),
//! - [`scenario`]: JSON scenario files and parameter defaults.

pub mod al;
pub mod check;
pub mod error;
pub mod grid;
pub mod ilqr;
pub mod path;
pub mod scenario;
pub mod sim;
pub mod velocity;

pub use error::Error;
pub use grid::SpatialGrid;
