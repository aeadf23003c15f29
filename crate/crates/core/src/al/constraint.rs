use nalgebra::{SMatrix, SVector};

/// Exact second derivatives of a constraint function. Affine constraints can
/// keep the zero default.
#[derive(Debug, Clone)]
pub struct ConstraintHessian<const N: usize, const M: usize> {
    pub xx: SMatrix<f64, N, N>,
    pub uu: SMatrix<f64, M, M>,
    pub ux: SMatrix<f64, M, N>,
}

impl<const N: usize, const M: usize> ConstraintHessian<N, M> {
    pub fn zero() -> Self {
        Self {
            xx: SMatrix::zeros(),
            uu: SMatrix::zeros(),
            ux: SMatrix::zeros(),
        }
    }
}

/// A scalar inequality constraint `h(x_k, u_k) <= 0` (negative is feasible).
pub trait ConstraintFn<const N: usize, const M: usize>: Send + Sync {
    fn value(&self, x: &SVector<f64, N>, u: &SVector<f64, M>, k: usize) -> f64;

    /// Analytic gradients `(dh/dx, dh/du)`.
    fn gradient(
        &self,
        x: &SVector<f64, N>,
        u: &SVector<f64, M>,
        k: usize,
    ) -> (SVector<f64, N>, SVector<f64, M>);

    /// Exact constraint Hessian; defaults to zero for affine constraints.
    fn hessian(
        &self,
        _x: &SVector<f64, N>,
        _u: &SVector<f64, M>,
        _k: usize,
    ) -> ConstraintHessian<N, M> {
        ConstraintHessian::zero()
    }
}

/// Which grid indices a constraint binds at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mask {
    /// Every sample.
    All,
    /// A single sample.
    At(usize),
    /// No sample this cycle (kept in the set so multiplier columns stay
    /// aligned across cycles).
    None,
}

impl Mask {
    pub fn active(&self, k: usize) -> bool {
        match *self {
            Mask::All => true,
            Mask::At(idx) => idx == k,
            Mask::None => false,
        }
    }
}

/// One constraint with its barrier weight and multiplier cap.
pub struct ConstraintSpec<const N: usize, const M: usize> {
    pub name: String,
    pub fun: Box<dyn ConstraintFn<N, M>>,
    pub mask: Mask,
    /// Barrier weight, positive and constant during a solve.
    pub mu: f64,
    /// Upper clamp for the Lagrange multipliers.
    pub lambda_max: f64,
}

impl<const N: usize, const M: usize> ConstraintSpec<N, M> {
    pub fn new(
        name: impl Into<String>,
        fun: Box<dyn ConstraintFn<N, M>>,
        mask: Mask,
        mu: f64,
        lambda_max: f64,
    ) -> Self {
        assert!(mu > 0.0, "barrier weight must be positive");
        assert!(lambda_max > 0.0, "multiplier cap must be positive");
        Self {
            name: name.into(),
            fun,
            mask,
            mu,
            lambda_max,
        }
    }
}

/// Ordered collection of constraints applied to one problem.
#[derive(Default)]
pub struct ConstraintSet<const N: usize, const M: usize> {
    specs: Vec<ConstraintSpec<N, M>>,
}

impl<const N: usize, const M: usize> ConstraintSet<N, M> {
    pub fn new() -> Self {
        Self { specs: Vec::new() }
    }

    pub fn push(&mut self, spec: ConstraintSpec<N, M>) {
        self.specs.push(spec);
    }

    pub fn len(&self) -> usize {
        self.specs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.specs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &ConstraintSpec<N, M>> {
        self.specs.iter()
    }

    pub fn get(&self, i: usize) -> &ConstraintSpec<N, M> {
        &self.specs[i]
    }
}
