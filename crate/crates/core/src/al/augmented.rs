use nalgebra::{SMatrix, SVector};

use crate::ilqr::{CostExpansion, DiscreteProblem};

use super::constraint::ConstraintSet;
use super::state::ALState;

/// Penalty contribution of one constraint at one sample:
/// `lambda * h + mu * h^2` while the constraint is active (`h > 0`) or its
/// multiplier is positive; strictly feasible constraints with zero multiplier
/// contribute nothing.
fn penalty(h: f64, lambda: f64, mu: f64) -> f64 {
    if h > 0.0 || lambda > 0.0 {
        lambda * h + mu * h * h
    } else {
        0.0
    }
}

/// Stage cost of the Lagrangian: base cost plus all active penalty terms.
pub fn augmented_stage_cost<const N: usize, const M: usize>(
    base: f64,
    x: &SVector<f64, N>,
    u: &SVector<f64, M>,
    k: usize,
    constraints: &ConstraintSet<N, M>,
    multipliers: &ALState,
) -> f64 {
    let mut total = base;
    for (i, spec) in constraints.iter().enumerate() {
        if !spec.mask.active(k) {
            continue;
        }
        let h = spec.fun.value(x, u, k);
        total += penalty(h, multipliers.get(k, i), spec.mu);
    }
    total
}

/// Gradient/Hessian contributions of the active penalty terms, added onto the
/// base expansion. Uses the exact chain rule:
/// `d(lambda h + mu h^2) = (lambda + 2 mu h) dh` and
/// `d^2 = 2 mu dh dh' + (lambda + 2 mu h) d^2h`.
pub fn augmented_stage_expansion<const N: usize, const M: usize>(
    mut base: CostExpansion<N, M>,
    x: &SVector<f64, N>,
    u: &SVector<f64, M>,
    k: usize,
    constraints: &ConstraintSet<N, M>,
    multipliers: &ALState,
) -> CostExpansion<N, M> {
    for (i, spec) in constraints.iter().enumerate() {
        if !spec.mask.active(k) {
            continue;
        }
        let h = spec.fun.value(x, u, k);
        let lambda = multipliers.get(k, i);
        if h <= 0.0 && lambda <= 0.0 {
            continue;
        }
        let (hx, hu) = spec.fun.gradient(x, u, k);
        let outer = spec.lambda_scaled(h, lambda);
        base.dx += hx * outer;
        base.du += hu * outer;
        let two_mu = 2.0 * spec.mu;
        base.dxx += hx * hx.transpose() * two_mu;
        base.duu += hu * hu.transpose() * two_mu;
        base.dux += hu * hx.transpose() * two_mu;
        let hess = spec.fun.hessian(x, u, k);
        base.dxx += hess.xx * outer;
        base.duu += hess.uu * outer;
        base.dux += hess.ux * outer;
    }
    base
}

impl<const N: usize, const M: usize> super::constraint::ConstraintSpec<N, M> {
    fn lambda_scaled(&self, h: f64, lambda: f64) -> f64 {
        lambda + 2.0 * self.mu * h
    }
}

/// A base problem with the Lagrangian penalty terms layered on top; this is
/// what the inner ILQR iterations actually minimize.
pub struct AugmentedProblem<'a, P, const N: usize, const M: usize> {
    pub base: &'a P,
    pub constraints: &'a ConstraintSet<N, M>,
    pub multipliers: &'a ALState,
}

impl<'a, P, const N: usize, const M: usize> DiscreteProblem<N, M>
    for AugmentedProblem<'a, P, N, M>
where
    P: DiscreteProblem<N, M>,
{
    fn horizon(&self) -> usize {
        self.base.horizon()
    }

    fn initial_state(&self) -> SVector<f64, N> {
        self.base.initial_state()
    }

    fn dynamics(&self, x: &SVector<f64, N>, u: &SVector<f64, M>) -> SVector<f64, N> {
        self.base.dynamics(x, u)
    }

    fn dynamics_jacobians(
        &self,
        x: &SVector<f64, N>,
        u: &SVector<f64, M>,
    ) -> (SMatrix<f64, N, N>, SMatrix<f64, N, M>) {
        self.base.dynamics_jacobians(x, u)
    }

    fn stage_cost(&self, x: &SVector<f64, N>, u: &SVector<f64, M>, k: usize) -> f64 {
        let base = self.base.stage_cost(x, u, k);
        augmented_stage_cost(base, x, u, k, self.constraints, self.multipliers)
    }

    fn cost_expansion(
        &self,
        x: &SVector<f64, N>,
        u: &SVector<f64, M>,
        k: usize,
    ) -> CostExpansion<N, M> {
        let base = self.base.cost_expansion(x, u, k);
        augmented_stage_expansion(base, x, u, k, self.constraints, self.multipliers)
    }
}
