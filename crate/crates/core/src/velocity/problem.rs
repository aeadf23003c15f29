use nalgebra::{Matrix2, SMatrix, Vector1, Vector2};

use crate::grid::SpatialGrid;
use crate::ilqr::{CostExpansion, DiscreteProblem};

/// Guard for the `1/v` terms in the spatial dynamics. The constraint set
/// keeps solutions at `v >= v_min`, so the guard only protects intermediate
/// line-search rollouts from blowing up, not converged profiles.
pub const ROLLOUT_GUARD: f64 = 0.1;

/// Longitudinal problem over arc length: state `[v, t]`, control `[a]`.
///
/// Euler step of the spatial dynamics
/// `v' = v + ds * a / max(v, guard)`, `t' = t + ds / max(v, guard)`;
/// quadratic stage cost on reference deviation (per-sample shaped weight) and
/// acceleration effort, scaled by `ds` so weights are resolution independent.
pub struct VelocityProblem {
    grid: SpatialGrid,
    v_ref: Vec<f64>,
    w_v: Vec<f64>,
    w_a: f64,
    initial: Vector2<f64>,
}

impl VelocityProblem {
    pub fn new(
        grid: SpatialGrid,
        v_ref: Vec<f64>,
        w_v: Vec<f64>,
        w_a: f64,
        v_start: f64,
    ) -> Self {
        assert_eq!(v_ref.len(), grid.len);
        assert_eq!(w_v.len(), grid.len);
        Self {
            grid,
            v_ref,
            w_v,
            w_a,
            initial: Vector2::new(v_start, 0.0),
        }
    }

    pub fn grid(&self) -> SpatialGrid {
        self.grid
    }
}

impl DiscreteProblem<2, 1> for VelocityProblem {
    fn horizon(&self) -> usize {
        self.grid.len
    }

    fn initial_state(&self) -> Vector2<f64> {
        self.initial
    }

    fn dynamics(&self, x: &Vector2<f64>, u: &Vector1<f64>) -> Vector2<f64> {
        let ds = self.grid.delta_s;
        let vt = x[0].max(ROLLOUT_GUARD);
        Vector2::new(x[0] + ds * u[0] / vt, x[1] + ds / vt)
    }

    fn dynamics_jacobians(
        &self,
        x: &Vector2<f64>,
        u: &Vector1<f64>,
    ) -> (Matrix2<f64>, SMatrix<f64, 2, 1>) {
        let ds = self.grid.delta_s;
        let vt = x[0].max(ROLLOUT_GUARD);
        // d max(v, guard)/dv vanishes below the guard
        let dvt = if x[0] > ROLLOUT_GUARD { 1.0 } else { 0.0 };
        let a = Matrix2::new(
            1.0 - dvt * ds * u[0] / (vt * vt),
            0.0,
            -dvt * ds / (vt * vt),
            1.0,
        );
        let b = SMatrix::<f64, 2, 1>::new(ds / vt, 0.0);
        (a, b)
    }

    fn stage_cost(&self, x: &Vector2<f64>, u: &Vector1<f64>, k: usize) -> f64 {
        let ds = self.grid.delta_s;
        let dv = x[0] - self.v_ref[k];
        ds * (self.w_v[k] * dv * dv + self.w_a * u[0] * u[0])
    }

    fn cost_expansion(&self, x: &Vector2<f64>, u: &Vector1<f64>, k: usize) -> CostExpansion<2, 1> {
        let ds = self.grid.delta_s;
        let dv = x[0] - self.v_ref[k];
        let mut e = CostExpansion::zero();
        e.dx = Vector2::new(2.0 * ds * self.w_v[k] * dv, 0.0);
        e.du = Vector1::new(2.0 * ds * self.w_a * u[0]);
        e.dxx = Matrix2::new(2.0 * ds * self.w_v[k], 0.0, 0.0, 0.0);
        e.duu = SMatrix::<f64, 1, 1>::new(2.0 * ds * self.w_a);
        e
    }
}
