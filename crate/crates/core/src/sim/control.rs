use super::planner::Plan;
use super::vehicle::{EgoState, WHEELBASE};

/// Proportional gain on the velocity error of the longitudinal controller.
pub const CONTROL_GAIN: f64 = 0.5;

#[derive(Debug, Clone, Copy)]
pub struct ControlCommand {
    pub accel: f64,
    pub steer: f64,
    /// Set when the ego has run past the plan horizon and zero commands were
    /// issued.
    pub beyond_horizon: bool,
}

/// Track the current plan: feedforward acceleration plus a proportional
/// velocity correction longitudinally, pure pursuit on the smoothed path
/// laterally with a speed-dependent lookahead.
pub fn low_level_control(
    ego: &EgoState,
    plan: &Plan,
    a_min: f64,
    a_max: f64,
) -> ControlCommand {
    let grid = plan.velocity.grid;
    if ego.s > grid.end() || ego.s < grid.s0 - grid.delta_s {
        return ControlCommand {
            accel: 0.0,
            steer: 0.0,
            beyond_horizon: true,
        };
    }

    let a_ff = grid.interpolate(&plan.velocity.a, ego.s);
    let v_target = grid.interpolate(&plan.velocity.v, ego.s);
    let mut accel = a_ff + CONTROL_GAIN * (v_target - ego.v);
    // Brake to rest at stops instead of creeping over them: the stop is a
    // zero sample on the grid, the interpolated target never reaches exactly
    // zero while the vehicle noses up to it, and the model has no drag, so a
    // plain non-positive clamp would glide across the line. The braking is
    // sized to rest exactly at the stop sample.
    if let Some(s_stop) = nearest_stop(plan, ego.s - 0.5, ego.s + 3.5) {
        if ego.v <= 2.0 || v_target <= 0.05 {
            let d = (s_stop - ego.s).max(0.05);
            let brake = (ego.v * ego.v / (2.0 * d)).max(0.6);
            accel = accel.min(-brake);
        }
    }
    accel = accel.clamp(a_min, a_max);

    let lookahead = (0.5 * ego.v).max(3.0);
    let target_s = (ego.s + lookahead).min(plan.path.grid.end());
    let tx = plan.path.grid.interpolate(&plan.path.xs, target_s);
    let ty = plan.path.grid.interpolate(&plan.path.ys, target_s);
    let heading_err = normalize_angle((ty - ego.y).atan2(tx - ego.x) - ego.psi);
    let dist = ((tx - ego.x).powi(2) + (ty - ego.y).powi(2)).sqrt().max(1.0);
    let steer = (2.0 * WHEELBASE * heading_err.sin() / dist)
        .atan()
        .clamp(-0.6, 0.6);

    ControlCommand {
        accel,
        steer,
        beyond_horizon: false,
    }
}

/// Arc position of the first stop sample of the plan within `[lo, hi]`.
fn nearest_stop(plan: &Plan, lo: f64, hi: f64) -> Option<f64> {
    let grid = plan.velocity.grid;
    (0..grid.len)
        .map(|k| (grid.s(k), plan.velocity.v[k]))
        .find(|&(s, v)| v == 0.0 && (lo..=hi).contains(&s))
        .map(|(s, _)| s)
}

fn normalize_angle(a: f64) -> f64 {
    let mut a = a % (2.0 * std::f64::consts::PI);
    if a > std::f64::consts::PI {
        a -= 2.0 * std::f64::consts::PI;
    } else if a < -std::f64::consts::PI {
        a += 2.0 * std::f64::consts::PI;
    }
    a
}
