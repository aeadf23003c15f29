//! Shared helpers for the integration and acceptance suites: finite-difference
//! sweeps over the production problem derivatives, and fixture builders.

use nalgebra::{SMatrix, SVector, Vector1, Vector2, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stp_core::al::{augmented_stage_cost, augmented_stage_expansion, ALState, ConstraintSet};
use stp_core::check;
use stp_core::grid::SpatialGrid;
use stp_core::ilqr::DiscreteProblem;
use stp_core::path::{PathProblem, PathSmoother, PathWeights, ReferencePolyline};
use stp_core::velocity::{
    ProfileOptimizer, SpatioTemporalConstraint, StKind, VelocityProblem,
};

pub const FD_TOLERANCE: f64 = 1e-5;
pub const FD_POINTS: usize = 100;

/// Straight reference along +x with the given length.
pub fn straight_reference(length: f64) -> ReferencePolyline {
    ReferencePolyline::resample(&[[0.0, 0.0], [length, 0.0]], 0.0, 0.5).unwrap()
}

fn max3<const N: usize, const M: usize>(
    a: (
        SMatrix<f64, N, N>,
        SMatrix<f64, M, M>,
        SMatrix<f64, M, N>,
    ),
    b: (
        SMatrix<f64, N, N>,
        SMatrix<f64, M, M>,
        SMatrix<f64, M, N>,
    ),
) -> f64 {
    check::relative_error(&a.0, &b.0)
        .max(check::relative_error(&a.1, &b.1))
        .max(check::relative_error(&a.2, &b.2))
}

/// Worst relative error of the path dynamics Jacobians over random points.
pub fn fd_path_dynamics(points: usize) -> f64 {
    let refline = straight_reference(130.0);
    let problem = PathProblem::new(&refline, PathWeights::default());
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    for _ in 0..points {
        let x = Vector3::new(
            rng.gen_range(-50.0..50.0),
            rng.gen_range(-50.0..50.0),
            rng.gen_range(-3.0..3.0),
        );
        let u = Vector1::new(rng.gen_range(-3.0..3.0));
        let (a, b) = problem.dynamics_jacobians(&x, &u);
        let a_fd = check::jacobian(|x| problem.dynamics(x, &u), &x);
        let b_fd = check::jacobian(|u| problem.dynamics(&x, u), &u);
        worst = worst
            .max(check::relative_error(&a, &a_fd))
            .max(check::relative_error(&b, &b_fd));
    }
    worst
}

fn velocity_fixture(grid: SpatialGrid) -> VelocityProblem {
    let n = grid.len;
    VelocityProblem::new(grid, vec![9.0; n], vec![0.1; n], 1.0, 8.0)
}

fn random_velocity_point(rng: &mut impl Rng) -> (Vector2<f64>, Vector1<f64>) {
    // Stay clear of the rollout-guard kink at v = 0.1; the branch below the
    // guard is sampled explicitly in `fd_velocity_dynamics`.
    let x = Vector2::new(rng.gen_range(0.2..14.0), rng.gen_range(0.0..30.0));
    let u = Vector1::new(rng.gen_range(-2.5..2.5));
    (x, u)
}

/// Worst relative error of the velocity dynamics Jacobians, sampling both
/// guard branches.
pub fn fd_velocity_dynamics(points: usize) -> f64 {
    let grid = SpatialGrid::new(0.0, 0.5, 16);
    let problem = velocity_fixture(grid);
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut worst = 0.0f64;
    for i in 0..points {
        let (x, u) = if i % 10 == 9 {
            // below the guard: dynamics freeze their v dependence
            (
                Vector2::new(rng.gen_range(0.0..0.09), rng.gen_range(0.0..30.0)),
                Vector1::new(rng.gen_range(-2.5..2.5)),
            )
        } else {
            random_velocity_point(&mut rng)
        };
        let (a, b) = problem.dynamics_jacobians(&x, &u);
        let a_fd = check::jacobian(|x| problem.dynamics(x, &u), &x);
        let b_fd = check::jacobian(|u| problem.dynamics(&x, u), &u);
        worst = worst
            .max(check::relative_error(&a, &a_fd))
            .max(check::relative_error(&b, &b_fd));
    }
    worst
}

/// Worst relative error of a stage-cost expansion (gradient against the FD of
/// the cost, Hessian blocks against the FD of the analytic gradient).
fn fd_cost_expansion<P, const N: usize, const M: usize>(
    problem: &P,
    sample: impl Fn(&mut ChaCha8Rng) -> (SVector<f64, N>, SVector<f64, M>),
    points: usize,
    seed: u64,
    k_max: usize,
) -> f64
where
    P: DiscreteProblem<N, M>,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for i in 0..points {
        let (x, u) = sample(&mut rng);
        let k = i % k_max;
        let e = problem.cost_expansion(&x, &u, k);
        let gx_fd = check::gradient(|x| problem.stage_cost(x, &u, k), &x);
        let gu_fd = check::gradient(|u| problem.stage_cost(&x, u, k), &u);
        worst = worst
            .max(check::relative_error(&SMatrix::from(e.dx), &SMatrix::from(gx_fd)))
            .max(check::relative_error(&SMatrix::from(e.du), &SMatrix::from(gu_fd)));

        let dxx_fd = check::jacobian(|x| problem.cost_expansion(x, &u, k).dx, &x);
        let duu_fd = check::jacobian(|u| problem.cost_expansion(&x, u, k).du, &u);
        let dux_fd = check::jacobian(|x| problem.cost_expansion(x, &u, k).du, &x);
        worst = max3((e.dxx, e.duu, e.dux), (dxx_fd, duu_fd, dux_fd)).max(worst);
    }
    worst
}

pub fn fd_path_cost(points: usize) -> f64 {
    let refline = straight_reference(130.0);
    let problem = PathProblem::new(&refline, PathWeights::default());
    let n = refline.grid.len;
    fd_cost_expansion(
        &problem,
        |rng| {
            (
                Vector3::new(
                    rng.gen_range(-50.0..50.0),
                    rng.gen_range(-50.0..50.0),
                    rng.gen_range(-3.0..3.0),
                ),
                Vector1::new(rng.gen_range(-3.0..3.0)),
            )
        },
        points,
        13,
        n,
    )
}

pub fn fd_velocity_cost(points: usize) -> f64 {
    let grid = SpatialGrid::new(0.0, 0.5, 16);
    let problem = velocity_fixture(grid);
    fd_cost_expansion(&problem, |rng| random_velocity_point(rng), points, 14, 16)
}

/// Velocity constraint set with every constraint class present: the four
/// profile bounds plus one maximum- and one minimum-arrival constraint.
pub fn full_velocity_constraints(grid: SpatialGrid) -> ConstraintSet<2, 1> {
    let optimizer = ProfileOptimizer::default();
    let st = [
        SpatioTemporalConstraint {
            kind: StKind::Max,
            s: grid.s(grid.len / 2),
            t: 3.0,
        },
        SpatioTemporalConstraint {
            kind: StKind::Min {
                alpha: 10.0,
                beta: 5e-3,
            },
            s: grid.s(grid.len / 3),
            t: 2.0,
        },
    ];
    let v_ref = vec![9.0; grid.len];
    optimizer.constraint_set(grid, &v_ref, &st)
}

/// Worst relative error of the augmented-Lagrangian stage terms: the gradient
/// of the penalized cost against the FD of its value, and the Hessian blocks
/// against the FD of the analytic gradient. Points too close to a penalty
/// activation kink (`h = 0` with `lambda = 0`) are skipped, and arrival times
/// stay within a realistic violation envelope; far outside it the quadratic
/// penalty value dwarfs the control gradient and the difference quotient
/// loses the digits being checked.
pub fn fd_al_terms(points: usize) -> f64 {
    let grid = SpatialGrid::new(0.0, 0.5, 16);
    let problem = velocity_fixture(grid);
    let constraints = full_velocity_constraints(grid);
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let mut multipliers = ALState::zeros(grid.len, constraints.len());
    for k in 0..grid.len {
        for i in 0..constraints.len() {
            if rng.gen_bool(0.5) {
                multipliers.set(k, i, rng.gen_range(0.1..100.0));
            }
        }
    }

    let mut worst = 0.0f64;
    let mut checked = 0;
    let mut attempts = 0;
    while checked < points && attempts < points * 20 {
        attempts += 1;
        let x = Vector2::new(rng.gen_range(0.2..14.0), rng.gen_range(0.0..8.0));
        let u = Vector1::new(rng.gen_range(-2.5..2.5));
        let k = attempts % grid.len;
        let near_kink = constraints.iter().enumerate().any(|(i, spec)| {
            spec.mask.active(k)
                && multipliers.get(k, i) == 0.0
                && spec.fun.value(&x, &u, k).abs() < 1e-3
        });
        if near_kink {
            continue;
        }
        checked += 1;

        let value = |x: &Vector2<f64>, u: &Vector1<f64>| {
            let base = problem.stage_cost(x, u, k);
            augmented_stage_cost(base, x, u, k, &constraints, &multipliers)
        };
        let expansion = |x: &Vector2<f64>, u: &Vector1<f64>| {
            let base = problem.cost_expansion(x, u, k);
            augmented_stage_expansion(base, x, u, k, &constraints, &multipliers)
        };

        let e = expansion(&x, &u);
        let gx_fd = check::gradient(|x| value(x, &u), &x);
        let gu_fd = check::gradient(|u| value(&x, u), &u);
        worst = worst
            .max(check::relative_error(&SMatrix::from(e.dx), &SMatrix::from(gx_fd)))
            .max(check::relative_error(&SMatrix::from(e.du), &SMatrix::from(gu_fd)));

        let dxx_fd = check::jacobian(|x| expansion(x, &u).dx, &x);
        let duu_fd = check::jacobian(|u| expansion(&x, u).du, &u);
        let dux_fd = check::jacobian(|x| expansion(x, &u).du, &x);
        worst = max3((e.dxx, e.duu, e.dux), (dxx_fd, duu_fd, dux_fd)).max(worst);
    }
    assert!(checked >= points, "too many kink rejections");
    worst
}

/// Worst relative error of the minimum-arrival product-constraint gradient.
pub fn fd_tmin_gradient(points: usize) -> f64 {
    let grid = SpatialGrid::new(0.0, 0.5, 8);
    let optimizer = ProfileOptimizer::default();
    let st = [SpatioTemporalConstraint {
        kind: StKind::Min {
            alpha: 10.0,
            beta: 5e-3,
        },
        s: grid.s(4),
        t: 5.75,
    }];
    let v_ref = vec![9.0; grid.len];
    let set = optimizer.constraint_set(grid, &v_ref, &st);
    let spec = set.get(4); // after the four profile bounds

    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let mut worst = 0.0f64;
    for _ in 0..points {
        let (x, u) = random_velocity_point(&mut rng);
        let (gx, gu) = spec.fun.gradient(&x, &u, 4);
        let gx_fd = check::gradient(|x| spec.fun.value(x, &u, 4), &x);
        let gu_fd = check::gradient(|u| spec.fun.value(&x, u, 4), &u);
        worst = worst
            .max(check::relative_error(&SMatrix::from(gx), &SMatrix::from(gx_fd)))
            .max(check::relative_error(&SMatrix::from(gu), &SMatrix::from(gu_fd)));
        let hess = spec.fun.hessian(&x, &u, 4);
        let hxx_fd = check::jacobian(|x| spec.fun.gradient(x, &u, 4).0, &x);
        worst = worst.max(check::relative_error(&hess.xx, &hxx_fd));
    }
    worst
}

/// Path to a bundled scenario file.
pub fn scenario_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name)
}

pub fn load_scenario(name: &str) -> stp_core::scenario::Scenario {
    let text = std::fs::read_to_string(scenario_path(name))
        .unwrap_or_else(|e| panic!("reading scenario {name}: {e}"));
    stp_core::scenario::Scenario::from_json(&text).unwrap()
}
