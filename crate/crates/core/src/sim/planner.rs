use std::time::Instant;

use crate::al::{shift_warm_start, WarmStart};
use crate::error::Result;
use crate::path::{curvature_speed_limit, PathSmoother, ReferencePolyline, SmoothedPath};
use crate::scenario::Scenario;
use crate::velocity::{
    generate_reference_from, postprocess_standstill, LimitProfile, ProfileOptimizer,
    ReferenceProfile, SpatioTemporalConstraint, VelocityTrajectory,
};

use super::record::CycleTimings;
use super::vehicle::EgoState;

/// One planning cycle's output: the smoothed path and optimized velocity
/// profile plus the intermediate profiles behind them, all on the same
/// absolute arc-length window.
#[derive(Debug, Clone)]
pub struct Plan {
    pub path: SmoothedPath,
    pub velocity: VelocityTrajectory,
    pub limits: LimitProfile,
    pub reference: ReferenceProfile,
}

/// Diagnostics of one planning cycle.
#[derive(Debug, Clone)]
pub struct PlanDiagnostics {
    pub lateral_iterations: usize,
    pub longitudinal_iterations: usize,
    /// Largest constraint violation of the longitudinal solve.
    pub max_violation: f64,
    /// Arc positions of stop constraints applied for red signals this cycle.
    pub applied_stops: Vec<f64>,
    /// Warm starts were reinitialized because the advance exceeded the horizon.
    pub warm_start_reset: bool,
}

/// A view of the scripted world at one planning instant.
pub struct WorldSnapshot<'a> {
    /// Current simulation time.
    pub time: f64,
    /// Longitudinal acceleration the ego is currently executing; seeds the
    /// forward reference sweep so the ramp persists across cycles.
    pub ego_accel: f64,
    /// Active traffic participants as `(x, y, speed)`.
    pub obstacles: &'a [(f64, f64, f64)],
    /// Signals currently showing red, as arc positions.
    pub red_signals: &'a [f64],
}

/// Replanning state of one planning stream: configured solvers plus the warm
/// starts carried between cycles.
pub struct Planner {
    smoother: PathSmoother,
    optimizer: ProfileOptimizer,
    window_len: usize,
    delta_s: f64,
    a_lat_hat: f64,
    a_min: f64,
    v_min: f64,
    d_safe_base: f64,
    d_safe_headway: f64,
    /// Selected spatiotemporal constraints in absolute scenario time.
    spatiotemporal: Vec<SpatioTemporalConstraint>,
    cold_start: bool,
    path_warm: Option<(f64, WarmStart<1>)>,
    velocity_warm: Option<(f64, WarmStart<1>)>,
}

impl Planner {
    pub fn new(
        scenario: &Scenario,
        spatiotemporal: Vec<SpatioTemporalConstraint>,
        cold_start: bool,
    ) -> Self {
        Self {
            smoother: scenario.path_smoother(),
            optimizer: scenario.profile_optimizer(),
            window_len: scenario.grid.window_len(),
            delta_s: scenario.grid.delta_s,
            a_lat_hat: scenario.params.a_lat_hat,
            a_min: scenario.params.a_min,
            v_min: scenario.params.v_min,
            d_safe_base: scenario.ego.d_safe_base,
            d_safe_headway: scenario.ego.d_safe_headway,
            spatiotemporal,
            cold_start,
            path_warm: None,
            velocity_warm: None,
        }
    }

    /// Current safety distance, velocity dependent.
    pub fn d_safe(&self, v: f64) -> f64 {
        self.d_safe_base + self.d_safe_headway * v
    }

    fn take_warm(
        slot: &mut Option<(f64, WarmStart<1>)>,
        s0: f64,
        delta_s: f64,
        cold: bool,
    ) -> (Option<WarmStart<1>>, bool) {
        if cold {
            return (None, false);
        }
        match slot.take() {
            Some((prev_s0, warm)) => {
                let advance = (s0 - prev_s0).max(0.0);
                let shifted = shift_warm_start(&warm, advance, delta_s);
                (Some(shifted.warm), shifted.reinitialized)
            }
            None => (None, false),
        }
    }

    /// Run one full planning cycle at the given ego state and world snapshot.
    ///
    /// Order: smooth the path window, extract obstacles concerning it,
    /// convert everything into limit and arrival-time constraints, generate
    /// the reference profile, optimize the velocity profile. Warm starts are
    /// shifted by the arc distance passed since the previous cycle.
    pub fn plan(
        &mut self,
        ego: &EgoState,
        refline: &ReferencePolyline,
        legal: &[f64],
        world: &WorldSnapshot,
    ) -> Result<(Plan, CycleTimings, PlanDiagnostics)> {
        let t_start = Instant::now();

        // Window anchored on whole grid samples so warm-start shifts are exact.
        let k0 = ((ego.s - refline.grid.s0) / self.delta_s).floor().max(0.0) as usize;
        let k0 = k0.min(refline.grid.len.saturating_sub(2));
        let window = refline.slice(k0, self.window_len);
        let s0 = window.grid.s0;

        let (path_warm, reset_a) = Self::take_warm(&mut self.path_warm, s0, self.delta_s, self.cold_start);

        let t_lat = Instant::now();
        let path_solution = self.smoother.smooth(&window, path_warm.as_ref())?;
        let lateral_ms = t_lat.elapsed().as_secs_f64() * 1e3;
        self.path_warm = Some((s0, path_solution.warm));

        let legal_window: Vec<f64> = (0..window.grid.len)
            .map(|k| legal[k0 + k])
            .collect();
        let mut limits = curvature_speed_limit(
            window.grid,
            &path_solution.path.curvatures,
            &legal_window,
            self.a_lat_hat,
        );

        // Signals showing red become stop constraints, unless the ego can no
        // longer brake to the line within its deceleration limit (it then
        // legally clears the junction). A line the ego is straddling while
        // slow stays constrained so a held stop does not release itself.
        let mut applied_stops = Vec::new();
        for &s_sig in world.red_signals {
            if s_sig <= ego.s - 0.5 {
                continue;
            }
            let gap = s_sig - ego.s;
            let stoppable = if gap > 0.1 {
                ego.v * ego.v / (2.0 * gap) <= self.a_min.abs()
            } else {
                false
            };
            if stoppable || ego.v < 2.0 {
                limits.apply_static(s_sig, 0.0);
                applied_stops.push(s_sig);
            }
        }

        // Actors concern the path when they are within 2 m laterally of it;
        // their projection becomes a reactive gap constraint.
        let d_safe = self.d_safe(ego.v);
        for &(ox, oy, ov) in world.obstacles {
            let (s_proj, lateral) = project_onto_path(&path_solution.path, ox, oy);
            if lateral < 2.0 && s_proj > ego.s {
                limits.apply_dynamic(s_proj, ov, d_safe);
            }
        }

        let v_ref =
            generate_reference_from(&limits, ego.v, world.ego_accel, &self.optimizer.weights);

        // Arrival-time bounds re-anchored to this cycle (plan time starts at 0).
        let st_cycle: Vec<SpatioTemporalConstraint> = self
            .spatiotemporal
            .iter()
            .map(|c| SpatioTemporalConstraint {
                kind: c.kind,
                s: c.s,
                t: c.t - world.time,
            })
            .collect();

        let (vel_warm, reset_b) =
            Self::take_warm(&mut self.velocity_warm, s0, self.delta_s, self.cold_start);

        let t_lon = Instant::now();
        let vel_solution = self
            .optimizer
            .optimize(&v_ref, ego.v, &st_cycle, vel_warm.as_ref())?;
        let longitudinal_ms = t_lon.elapsed().as_secs_f64() * 1e3;
        self.velocity_warm = Some((s0, vel_solution.warm));

        let mut velocity = vel_solution.trajectory;
        postprocess_standstill(&mut velocity, &limits, self.v_min);

        let total_ms = t_start.elapsed().as_secs_f64() * 1e3;
        let timings = CycleTimings {
            lateral_ms,
            longitudinal_ms,
            preprocessing_ms: total_ms - lateral_ms - longitudinal_ms,
            total_ms,
        };

        let diagnostics = PlanDiagnostics {
            lateral_iterations: path_solution.report.iterations,
            longitudinal_iterations: vel_solution.report.iterations,
            max_violation: vel_solution.violations.max(),
            applied_stops,
            warm_start_reset: reset_a || reset_b,
        };

        Ok((
            Plan {
                path: path_solution.path,
                velocity,
                limits,
                reference: v_ref,
            },
            timings,
            diagnostics,
        ))
    }
}

/// Project a 2D point onto a smoothed path, returning the arc position of the
/// closest segment point and the lateral distance.
fn project_onto_path(path: &SmoothedPath, x: f64, y: f64) -> (f64, f64) {
    let n = path.grid.len;
    let mut best = (path.grid.s0, f64::INFINITY);
    for k in 0..n - 1 {
        let (ax, ay) = (path.xs[k], path.ys[k]);
        let (bx, by) = (path.xs[k + 1], path.ys[k + 1]);
        let (ex, ey) = (bx - ax, by - ay);
        let len2 = ex * ex + ey * ey;
        if len2 < 1e-18 {
            continue;
        }
        let t = (((x - ax) * ex + (y - ay) * ey) / len2).clamp(0.0, 1.0);
        let (px, py) = (ax + t * ex, ay + t * ey);
        let d = ((x - px).powi(2) + (y - py).powi(2)).sqrt();
        if d < best.1 {
            best = (path.grid.s(k) + t * path.grid.delta_s, d);
        }
    }
    best
}
