//! Longitudinal planning over arc length.
//!
//! Three stages per planning cycle:
//!
//! 1. build the velocity-limit function from legal limits, curvature, static
//!    stops, and dynamic obstacle gaps ([`LimitProfile`]),
//! 2. shape it into a jerk/acceleration-limited reference by a backward and a
//!    forward integration sweep ([`generate_reference`]),
//! 3. minimize the profile objective with the reference as target and upper
//!    bound, plus arrival-time constraints ([`ProfileOptimizer`]).

mod limits;
mod problem;
mod reference;

pub use limits::LimitProfile;
pub use problem::VelocityProblem;
pub use reference::{
    backward_profile, forward_profile, generate_reference, generate_reference_from,
    ReferenceProfile,
};

use nalgebra::{Matrix2, Vector1, Vector2};

use crate::al::{
    self, ConstraintFn, ConstraintHessian, ConstraintSet, ConstraintSpec, Mask, ViolationReport,
    WarmStart,
};
use crate::error::Result;
use crate::grid::SpatialGrid;
use crate::ilqr::{IlqrSettings, SolveReport};

/// Objective weights and dynamic limits of the velocity problem.
#[derive(Debug, Clone, Copy)]
pub struct ProfileWeights {
    pub w_v: f64,
    pub w_a: f64,
    pub v_min: f64,
    pub a_min: f64,
    pub a_max: f64,
    pub j_min: f64,
    pub j_max: f64,
}

impl Default for ProfileWeights {
    fn default() -> Self {
        Self {
            w_v: 0.1,
            w_a: 1.0,
            v_min: 1.0,
            a_min: -2.5,
            a_max: 2.5,
            j_min: -1.5,
            j_max: 1.5,
        }
    }
}

impl ProfileWeights {
    pub fn validate(&self) {
        assert!(self.w_v > 0.0 && self.w_a > 0.0, "weights must be positive");
        assert!(self.v_min > 0.0, "v_min must be positive");
        assert!(self.a_min < 0.0 && self.a_max > 0.0, "a_min < 0 < a_max");
        assert!(self.j_min < 0.0 && self.j_max > 0.0, "j_min < 0 < j_max");
    }
}

/// An arrival-time constraint at a fixed location, with times relative to the
/// current cycle (`t(0) = 0`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatioTemporalConstraint {
    pub kind: StKind,
    /// Constraint location in absolute arc length.
    pub s: f64,
    /// Time bound in seconds relative to the cycle start.
    pub t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StKind {
    /// Reach the location no earlier than the bound; `alpha`/`beta` shape the
    /// velocity-tracking weight so slowing or stopping near the location is
    /// cheap.
    Min { alpha: f64, beta: f64 },
    /// Reach the location no later than the bound.
    Max,
}

/// Left-hand side of the minimum-arrival-time inequality
/// `(t_min - t) * (v - v_min) <= 0`: satisfied by arriving late enough or by
/// reducing the velocity to `v_min`.
pub fn tmin_residual(t_at_sc: f64, v_at_sc: f64, t_min: f64, v_min: f64) -> f64 {
    (t_min - t_at_sc) * (v_at_sc - v_min)
}

/// Velocity-weight shaping for a minimum-arrival constraint at `s_c`:
/// `min(1, ((s - s_c - alpha) * beta)^2)`, minimal at `s_c + alpha` so
/// stopping near the constraint location stays cheap.
pub fn tmin_weight(s: f64, s_c: f64, alpha: f64, beta: f64) -> f64 {
    debug_assert!(alpha >= 0.0 && beta > 0.0 && beta < 1.0);
    (((s - s_c - alpha) * beta).powi(2)).min(1.0)
}

/// Solved velocity profile: speed and arrival time per sample, acceleration
/// control, all over the shared grid.
#[derive(Debug, Clone)]
pub struct VelocityTrajectory {
    pub grid: SpatialGrid,
    pub v: Vec<f64>,
    pub t: Vec<f64>,
    pub a: Vec<f64>,
    pub postprocessed: bool,
}

/// Replace near-standstill samples by exact zeros where the limit profile
/// demands a stop, freezing the arrival time over each stopped segment.
pub fn postprocess_standstill(
    traj: &mut VelocityTrajectory,
    limits: &LimitProfile,
    v_min: f64,
) {
    debug_assert_eq!(traj.grid.len, limits.grid.len);
    let mut frozen: Option<f64> = None;
    for k in 0..traj.grid.len {
        if traj.v[k] <= v_min + 0.05 && limits.values[k] == 0.0 {
            let t0 = *frozen.get_or_insert(traj.t[k]);
            traj.v[k] = 0.0;
            traj.t[k] = t0;
            traj.postprocessed = true;
        } else {
            frozen = None;
        }
    }
}

/// Upper bound `v <= v_ref(s_k)`.
struct VRefUpper {
    v_ref: Vec<f64>,
}

impl ConstraintFn<2, 1> for VRefUpper {
    fn value(&self, x: &Vector2<f64>, _u: &Vector1<f64>, k: usize) -> f64 {
        x[0] - self.v_ref[k]
    }

    fn gradient(
        &self,
        _x: &Vector2<f64>,
        _u: &Vector1<f64>,
        _k: usize,
    ) -> (Vector2<f64>, Vector1<f64>) {
        (Vector2::new(1.0, 0.0), Vector1::zeros())
    }
}

/// Lower bound `v_min <= v`.
struct VMinLower {
    v_min: f64,
}

impl ConstraintFn<2, 1> for VMinLower {
    fn value(&self, x: &Vector2<f64>, _u: &Vector1<f64>, _k: usize) -> f64 {
        self.v_min - x[0]
    }

    fn gradient(
        &self,
        _x: &Vector2<f64>,
        _u: &Vector1<f64>,
        _k: usize,
    ) -> (Vector2<f64>, Vector1<f64>) {
        (Vector2::new(-1.0, 0.0), Vector1::zeros())
    }
}

/// Acceleration box `a <= a_max` / `a_min <= a`.
struct AccelBound {
    bound: f64,
    sign: f64,
}

impl ConstraintFn<2, 1> for AccelBound {
    fn value(&self, _x: &Vector2<f64>, u: &Vector1<f64>, _k: usize) -> f64 {
        self.sign * (u[0] - self.bound)
    }

    fn gradient(
        &self,
        _x: &Vector2<f64>,
        _u: &Vector1<f64>,
        _k: usize,
    ) -> (Vector2<f64>, Vector1<f64>) {
        (Vector2::zeros(), Vector1::new(self.sign))
    }
}

/// Latest-arrival constraint `t(s_c) - t_max <= 0` at one sample.
struct TMaxAt {
    bound: f64,
}

impl ConstraintFn<2, 1> for TMaxAt {
    fn value(&self, x: &Vector2<f64>, _u: &Vector1<f64>, _k: usize) -> f64 {
        x[1] - self.bound
    }

    fn gradient(
        &self,
        _x: &Vector2<f64>,
        _u: &Vector1<f64>,
        _k: usize,
    ) -> (Vector2<f64>, Vector1<f64>) {
        (Vector2::new(0.0, 1.0), Vector1::zeros())
    }
}

/// Earliest-arrival product constraint `(t_min - t) * (v - v_min) <= 0`.
struct TMinProduct {
    t_min: f64,
    v_min: f64,
}

impl ConstraintFn<2, 1> for TMinProduct {
    fn value(&self, x: &Vector2<f64>, _u: &Vector1<f64>, _k: usize) -> f64 {
        tmin_residual(x[1], x[0], self.t_min, self.v_min)
    }

    fn gradient(
        &self,
        x: &Vector2<f64>,
        _u: &Vector1<f64>,
        _k: usize,
    ) -> (Vector2<f64>, Vector1<f64>) {
        // h = (t_min - t)(v - v_min): dh/dv = t_min - t, dh/dt = -(v - v_min)
        (
            Vector2::new(self.t_min - x[1], -(x[0] - self.v_min)),
            Vector1::zeros(),
        )
    }

    fn hessian(
        &self,
        _x: &Vector2<f64>,
        _u: &Vector1<f64>,
        _k: usize,
    ) -> ConstraintHessian<2, 1> {
        let mut h = ConstraintHessian::zero();
        h.xx = Matrix2::new(0.0, -1.0, -1.0, 0.0);
        h
    }
}

/// Result of one profile-optimization cycle.
pub struct VelocitySolution {
    pub trajectory: VelocityTrajectory,
    pub warm: WarmStart<1>,
    pub report: SolveReport,
    pub violations: ViolationReport,
    pub objective_cost: f64,
}

/// Configured longitudinal optimizer; one planning stream holds one of these.
///
/// The constraint columns are ordered `[v <= v_ref, v >= v_min, a <= a_max,
/// a >= a_min]` followed by one column per spatiotemporal constraint, so
/// multiplier matrices stay aligned across cycles as long as the
/// spatiotemporal list is stable.
pub struct ProfileOptimizer {
    pub weights: ProfileWeights,
    pub settings: IlqrSettings,
    pub mu_default: f64,
    pub mu_tmax: f64,
    pub lambda_max_default: f64,
    pub lambda_max_tmax: f64,
}

impl Default for ProfileOptimizer {
    fn default() -> Self {
        Self {
            weights: ProfileWeights::default(),
            settings: IlqrSettings::default(),
            mu_default: 1e2,
            mu_tmax: 1e3,
            lambda_max_default: 1e2,
            lambda_max_tmax: 1e3,
        }
    }
}

impl ProfileOptimizer {
    /// Number of constraint columns for a given spatiotemporal list.
    pub fn constraint_count(spatiotemporal: usize) -> usize {
        4 + spatiotemporal
    }

    /// The constraint set for one cycle: the four profile bounds plus one
    /// column per spatiotemporal constraint, in stable order.
    pub fn constraint_set(
        &self,
        grid: SpatialGrid,
        v_ref: &[f64],
        spatiotemporal: &[SpatioTemporalConstraint],
    ) -> ConstraintSet<2, 1> {
        let mut set = ConstraintSet::new();
        set.push(ConstraintSpec::new(
            "v_ref_upper",
            Box::new(VRefUpper {
                v_ref: v_ref.to_vec(),
            }),
            Mask::All,
            self.mu_default,
            self.lambda_max_default,
        ));
        set.push(ConstraintSpec::new(
            "v_min_lower",
            Box::new(VMinLower {
                v_min: self.weights.v_min,
            }),
            Mask::All,
            self.mu_default,
            self.lambda_max_default,
        ));
        set.push(ConstraintSpec::new(
            "a_max_upper",
            Box::new(AccelBound {
                bound: self.weights.a_max,
                sign: 1.0,
            }),
            Mask::All,
            self.mu_default,
            self.lambda_max_default,
        ));
        set.push(ConstraintSpec::new(
            "a_min_lower",
            Box::new(AccelBound {
                bound: self.weights.a_min,
                sign: -1.0,
            }),
            Mask::All,
            self.mu_default,
            self.lambda_max_default,
        ));
        for c in spatiotemporal {
            // Constraints whose location lies outside the window stay in the
            // set with an empty mask so multiplier columns keep their identity.
            let mask = grid.snap(c.s).map_or(Mask::None, Mask::At);
            match c.kind {
                StKind::Max => set.push(ConstraintSpec::new(
                    format!("t_max@{:.1}", c.s),
                    Box::new(TMaxAt { bound: c.t }),
                    mask,
                    self.mu_tmax,
                    self.lambda_max_tmax,
                )),
                StKind::Min { .. } => set.push(ConstraintSpec::new(
                    format!("t_min@{:.1}", c.s),
                    Box::new(TMinProduct {
                        t_min: c.t,
                        v_min: self.weights.v_min,
                    }),
                    mask,
                    self.mu_default,
                    self.lambda_max_default,
                )),
            }
        }
        set
    }

    /// Per-sample velocity-tracking weight: the base weight shaped by the
    /// pointwise minimum of every minimum-arrival constraint's weighting
    /// function. The shape is a pure function of absolute arc length, so it
    /// stays in effect while the window passes the constraint location.
    pub fn shaped_weights(
        &self,
        grid: SpatialGrid,
        spatiotemporal: &[SpatioTemporalConstraint],
    ) -> Vec<f64> {
        (0..grid.len)
            .map(|k| {
                let s = grid.s(k);
                let shape = spatiotemporal
                    .iter()
                    .filter_map(|c| match c.kind {
                        StKind::Min { alpha, beta } => Some(tmin_weight(s, c.s, alpha, beta)),
                        StKind::Max => None,
                    })
                    .fold(1.0, f64::min);
                self.weights.w_v * shape
            })
            .collect()
    }

    /// One planning cycle of the profile objective. `v_start` is floored to
    /// `v_min` for the boundary sample; pass the previous cycle's (shifted)
    /// warm start to continue a stream.
    pub fn optimize(
        &self,
        v_ref: &ReferenceProfile,
        v_start: f64,
        spatiotemporal: &[SpatioTemporalConstraint],
        warm: Option<&WarmStart<1>>,
    ) -> Result<VelocitySolution> {
        self.weights.validate();
        let grid = v_ref.grid;
        let w_v = self.shaped_weights(grid, spatiotemporal);
        let problem = VelocityProblem::new(
            grid,
            v_ref.values.clone(),
            w_v,
            self.weights.w_a,
            v_start.max(self.weights.v_min),
        );
        let constraints = self.constraint_set(grid, &v_ref.values, spatiotemporal);
        let cold = WarmStart::cold(grid.len, constraints.len());
        let warm = warm.unwrap_or(&cold);
        let solution = al::solve_constrained(&problem, &constraints, warm, &self.settings)?;

        let traj = &solution.trajectory;
        let trajectory = VelocityTrajectory {
            grid,
            v: traj.states.iter().map(|x| x[0]).collect(),
            t: traj.states.iter().map(|x| x[1]).collect(),
            a: traj.controls.iter().map(|u| u[0]).collect(),
            postprocessed: false,
        };
        Ok(VelocitySolution {
            trajectory,
            warm: WarmStart {
                controls: solution.trajectory.controls.clone(),
                multipliers: solution.multipliers,
            },
            report: solution.report,
            violations: solution.violations,
            objective_cost: solution.objective_cost,
        })
    }
}
