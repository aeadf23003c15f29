use nalgebra::{SMatrix, SVector};

/// Gradient and Hessian blocks of a stage cost at an evaluation point.
#[derive(Debug, Clone)]
pub struct CostExpansion<const N: usize, const M: usize> {
    pub dx: SVector<f64, N>,
    pub du: SVector<f64, M>,
    pub dxx: SMatrix<f64, N, N>,
    pub duu: SMatrix<f64, M, M>,
    pub dux: SMatrix<f64, M, N>,
}

impl<const N: usize, const M: usize> CostExpansion<N, M> {
    pub fn zero() -> Self {
        Self {
            dx: SVector::zeros(),
            du: SVector::zeros(),
            dxx: SMatrix::zeros(),
            duu: SMatrix::zeros(),
            dux: SMatrix::zeros(),
        }
    }

    /// Accumulate another expansion in place.
    pub fn add_assign(&mut self, other: &Self) {
        self.dx += other.dx;
        self.du += other.du;
        self.dxx += other.dxx;
        self.duu += other.duu;
        self.dux += other.dux;
    }
}

/// A discrete-time optimal control problem with `N` states, `M` controls, and
/// a fixed horizon of `K` samples.
///
/// States and controls both have `K` rows. The dynamics couple consecutive
/// samples, `x_{k+1} = f(x_k, u_k)` for `k < K-1`; the cost sums the stage
/// cost over all `K` samples, so the final control only enters the objective.
pub trait DiscreteProblem<const N: usize, const M: usize> {
    /// Number of samples `K` (at least 2).
    fn horizon(&self) -> usize;

    /// The fixed initial state.
    fn initial_state(&self) -> SVector<f64, N>;

    /// Dynamics `f(x_k, u_k) -> x_{k+1}`.
    fn dynamics(&self, x: &SVector<f64, N>, u: &SVector<f64, M>) -> SVector<f64, N>;

    /// Analytic Jacobians `(df/dx, df/du)` of the dynamics.
    fn dynamics_jacobians(
        &self,
        x: &SVector<f64, N>,
        u: &SVector<f64, M>,
    ) -> (SMatrix<f64, N, N>, SMatrix<f64, N, M>);

    /// Stage cost `l(x_k, u_k, k)`.
    fn stage_cost(&self, x: &SVector<f64, N>, u: &SVector<f64, M>, k: usize) -> f64;

    /// Analytic gradient and Hessian of the stage cost.
    fn cost_expansion(&self, x: &SVector<f64, N>, u: &SVector<f64, M>, k: usize)
        -> CostExpansion<N, M>;
}
