//! Closed-loop scenario engine.
//!
//! One simulation advances scripted actors and signals, replans on every
//! 10 ms control cycle (path smoothing, constraint extraction, reference
//! generation, profile optimization), tracks the plan with a simple low-level
//! controller, and integrates a kinematic-bicycle ego vehicle. The loop is
//! single threaded and fully deterministic unless a wall-clock planning
//! budget is enabled.

mod control;
mod engine;
mod planner;
mod record;
mod vehicle;

pub use control::{low_level_control, ControlCommand, CONTROL_GAIN};
pub use engine::{RunOutcome, SimOptions, Simulation};
pub use planner::{Plan, PlanDiagnostics, Planner};
pub use record::{
    ArrivalReport, CollisionEvent, CycleRecord, CycleTimings, ProfileSnapshot, StatsRow,
    TimingStats, Verdict,
};
pub use vehicle::{step_vehicle, EgoState, WHEELBASE};
