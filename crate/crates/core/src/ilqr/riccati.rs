use nalgebra::{SMatrix, SVector};
use thiserror::Error;

use super::problem::DiscreteProblem;
use super::solver::Trajectory;

/// Feedforward/feedback gains from one backward pass, plus the quadratic
/// model of the achievable cost reduction.
#[derive(Debug, Clone)]
pub struct Gains<const N: usize, const M: usize> {
    pub feedforward: Vec<SVector<f64, M>>,
    pub feedback: Vec<SMatrix<f64, M, N>>,
    pub expected: ExpectedReduction,
}

/// Expected cost change of the line-searched update,
/// `dJ(alpha) = alpha * linear + alpha^2 * quadratic` with
/// `linear = sum d' Q_u` and `quadratic = 0.5 * sum d' Q_uu d`.
#[derive(Debug, Clone, Copy)]
pub struct ExpectedReduction {
    pub linear: f64,
    pub quadratic: f64,
}

impl ExpectedReduction {
    /// Predicted cost decrease (positive means descent) for step size `alpha`.
    pub fn at(&self, alpha: f64) -> f64 {
        -(alpha * self.linear + alpha * alpha * self.quadratic)
    }
}

#[derive(Debug, Error)]
pub enum BackwardError {
    #[error("backward pass failed: control Hessian not positive definite at step {index}")]
    NotPositiveDefinite { index: usize },
}

/// Riccati backward pass on the quadratic expansion of the cost along `traj`.
///
/// `regularization` is added to the control Hessian at every index; the pass
/// reports failure as soon as the regularized Hessian loses positive
/// definiteness so the caller can increase the regularization and retry.
pub fn backward_pass<P, const N: usize, const M: usize>(
    traj: &Trajectory<N, M>,
    problem: &P,
    regularization: f64,
) -> Result<Gains<N, M>, BackwardError>
where
    P: DiscreteProblem<N, M>,
{
    let horizon = traj.len();
    let mut feedforward = vec![SVector::<f64, M>::zeros(); horizon];
    let mut feedback = vec![SMatrix::<f64, M, N>::zeros(); horizon];
    let mut linear = 0.0;
    let mut quadratic = 0.0;

    // Value function beyond the horizon is zero.
    let mut vx = SVector::<f64, N>::zeros();
    let mut vxx = SMatrix::<f64, N, N>::zeros();
    let reg = SMatrix::<f64, M, M>::identity() * regularization;

    for k in (0..horizon).rev() {
        let x = &traj.states[k];
        let u = &traj.controls[k];
        let exp = problem.cost_expansion(x, u, k);

        let (qx, qu, qxx, quu, qux) = if k + 1 < horizon {
            let (a, b) = problem.dynamics_jacobians(x, u);
            (
                exp.dx + a.transpose() * vx,
                exp.du + b.transpose() * vx,
                exp.dxx + a.transpose() * vxx * a,
                exp.duu + b.transpose() * vxx * b,
                exp.dux + b.transpose() * vxx * a,
            )
        } else {
            (exp.dx, exp.du, exp.dxx, exp.duu, exp.dux)
        };

        let quu_reg = quu + reg;
        let chol = quu_reg
            .cholesky()
            .ok_or(BackwardError::NotPositiveDefinite { index: k })?;
        let d = -chol.solve(&qu);
        let gain = -chol.solve(&qux);

        linear += d.dot(&qu);
        quadratic += 0.5 * (d.transpose() * quu_reg * d)[(0, 0)];

        vx = qx + gain.transpose() * quu_reg * d + gain.transpose() * qu + qux.transpose() * d;
        vxx = qxx
            + gain.transpose() * quu_reg * gain
            + gain.transpose() * qux
            + qux.transpose() * gain;
        vxx = (vxx + vxx.transpose()) * 0.5;

        feedforward[k] = d;
        feedback[k] = gain;
    }

    Ok(Gains {
        feedforward,
        feedback,
        expected: ExpectedReduction { linear, quadratic },
    })
}
