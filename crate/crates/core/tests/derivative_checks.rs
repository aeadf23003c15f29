//! Central finite-difference validation of every analytic derivative the
//! solvers rely on, 100 random points per family.

mod common;

use common::{FD_POINTS, FD_TOLERANCE};

#[test]
fn path_dynamics_jacobians_match_finite_differences() {
    let worst = common::fd_path_dynamics(FD_POINTS);
    assert!(worst < FD_TOLERANCE, "worst relative error {worst}");
}

#[test]
fn velocity_dynamics_jacobians_match_finite_differences() {
    let worst = common::fd_velocity_dynamics(FD_POINTS);
    assert!(worst < FD_TOLERANCE, "worst relative error {worst}");
}

#[test]
fn path_cost_expansion_matches_finite_differences() {
    let worst = common::fd_path_cost(FD_POINTS);
    assert!(worst < FD_TOLERANCE, "worst relative error {worst}");
}

#[test]
fn velocity_cost_expansion_matches_finite_differences() {
    let worst = common::fd_velocity_cost(FD_POINTS);
    assert!(worst < FD_TOLERANCE, "worst relative error {worst}");
}

#[test]
fn augmented_lagrangian_terms_match_finite_differences() {
    let worst = common::fd_al_terms(FD_POINTS);
    assert!(worst < FD_TOLERANCE, "worst relative error {worst}");
}

#[test]
fn minimum_arrival_constraint_gradient_matches_finite_differences() {
    let worst = common::fd_tmin_gradient(FD_POINTS);
    assert!(worst < FD_TOLERANCE, "worst relative error {worst}");
}
