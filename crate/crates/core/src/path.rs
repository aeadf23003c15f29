//! Reference-line smoothing and curvature speed limits.
//!
//! A noisy 2D polyline is resampled to the uniform arc-length grid and
//! smoothed by solving a spatial optimal-control problem: state
//! `[x, y, heading]`, control `curvature`, explicit Euler step of the unicycle
//! dynamics, quadratic cost on position error and applied curvature, and a
//! curvature box handled by the augmented-Lagrangian wrapper.

use nalgebra::{Matrix3, SMatrix, Vector1, Vector3};

use crate::al::{
    self, ConstraintFn, ConstraintSet, ConstraintSpec, Mask, ViolationReport, WarmStart,
};
use crate::error::{Error, Result};
use crate::grid::SpatialGrid;
use crate::ilqr::{CostExpansion, DiscreteProblem, IlqrSettings, SolveReport};
use crate::velocity::LimitProfile;

/// A 2D reference polyline resampled to uniform arc-length spacing.
#[derive(Debug, Clone)]
pub struct ReferencePolyline {
    pub grid: SpatialGrid,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
}

impl ReferencePolyline {
    /// Resample `points` to uniform spacing `delta_s` by linear interpolation
    /// along the cumulative arc length. The grid starts at `s0`.
    pub fn resample(points: &[[f64; 2]], s0: f64, delta_s: f64) -> Result<Self> {
        let mut cleaned: Vec<[f64; 2]> = Vec::with_capacity(points.len());
        for p in points {
            if cleaned
                .last()
                .map_or(true, |q: &[f64; 2]| dist(q, p) > 1e-9)
            {
                cleaned.push(*p);
            }
        }
        if cleaned.len() < 2 {
            return Err(Error::DegeneratePolyline {
                distinct: cleaned.len(),
            });
        }

        let mut cumulative = Vec::with_capacity(cleaned.len());
        let mut total = 0.0;
        cumulative.push(0.0);
        for w in cleaned.windows(2) {
            total += dist(&w[0], &w[1]);
            cumulative.push(total);
        }

        let len = (total / delta_s).floor() as usize + 1;
        let len = len.max(2);
        let mut xs = Vec::with_capacity(len);
        let mut ys = Vec::with_capacity(len);
        let mut seg = 0;
        for k in 0..len {
            let target = (k as f64 * delta_s).min(total);
            while seg + 2 < cumulative.len() && cumulative[seg + 1] < target {
                seg += 1;
            }
            let span = cumulative[seg + 1] - cumulative[seg];
            let frac = if span > 0.0 {
                (target - cumulative[seg]) / span
            } else {
                0.0
            };
            xs.push(cleaned[seg][0] + frac * (cleaned[seg + 1][0] - cleaned[seg][0]));
            ys.push(cleaned[seg][1] + frac * (cleaned[seg + 1][1] - cleaned[seg][1]));
        }

        Ok(Self {
            grid: SpatialGrid::new(s0, delta_s, len),
            xs,
            ys,
        })
    }

    /// Total arc length covered by the samples.
    pub fn length(&self) -> f64 {
        self.grid.end() - self.grid.s0
    }

    /// Copy of the sample range `[start, start + len)`.
    pub fn slice(&self, start: usize, len: usize) -> Self {
        let end = (start + len).min(self.grid.len);
        Self {
            grid: SpatialGrid::new(self.grid.s(start), self.grid.delta_s, end - start),
            xs: self.xs[start..end].to_vec(),
            ys: self.ys[start..end].to_vec(),
        }
    }

    /// Extend the polyline along its final segment direction so at least
    /// `extra` meters of road exist beyond the current end.
    pub fn extend_straight(&mut self, extra: f64) {
        let n = self.grid.len;
        let dx = self.xs[n - 1] - self.xs[n - 2];
        let dy = self.ys[n - 1] - self.ys[n - 2];
        let norm = (dx * dx + dy * dy).sqrt().max(1e-12);
        let (ux, uy) = (dx / norm, dy / norm);
        let steps = (extra / self.grid.delta_s).ceil() as usize;
        for i in 1..=steps {
            let d = i as f64 * self.grid.delta_s;
            self.xs.push(self.xs[n - 1] + ux * d);
            self.ys.push(self.ys[n - 1] + uy * d);
        }
        self.grid = SpatialGrid::new(self.grid.s0, self.grid.delta_s, self.xs.len());
    }

    /// Interpolated 2D point at arc position `s`, clamped to the ends.
    pub fn point_at(&self, s: f64) -> (f64, f64) {
        (
            self.grid.interpolate(&self.xs, s),
            self.grid.interpolate(&self.ys, s),
        )
    }

    /// Squared distance from a point to sample `k`.
    fn sample_dist2(&self, k: usize, x: f64, y: f64) -> f64 {
        let dx = self.xs[k] - x;
        let dy = self.ys[k] - y;
        dx * dx + dy * dy
    }

    /// Project a 2D point onto the polyline, searching samples within
    /// `window` meters around the hint arc position. Returns the arc position
    /// and the lateral distance.
    pub fn project(&self, x: f64, y: f64, hint_s: f64, window: f64) -> (f64, f64) {
        let k_hint = ((hint_s - self.grid.s0) / self.grid.delta_s).round() as i64;
        let w = (window / self.grid.delta_s).ceil() as i64;
        let lo = (k_hint - w).max(0) as usize;
        let hi = ((k_hint + w) as usize).min(self.grid.len - 1);

        let mut best_k = lo;
        let mut best_d2 = f64::INFINITY;
        for k in lo..=hi {
            let d2 = self.sample_dist2(k, x, y);
            if d2 < best_d2 {
                best_d2 = d2;
                best_k = k;
            }
        }

        // Refine on the segments adjacent to the best sample.
        let mut best = (self.grid.s(best_k), best_d2.sqrt());
        for seg in [best_k.saturating_sub(1), best_k] {
            if seg + 1 >= self.grid.len {
                continue;
            }
            let (ax, ay) = (self.xs[seg], self.ys[seg]);
            let (bx, by) = (self.xs[seg + 1], self.ys[seg + 1]);
            let (ex, ey) = (bx - ax, by - ay);
            let len2 = ex * ex + ey * ey;
            if len2 < 1e-18 {
                continue;
            }
            let t = (((x - ax) * ex + (y - ay) * ey) / len2).clamp(0.0, 1.0);
            let (px, py) = (ax + t * ex, ay + t * ey);
            let d = ((x - px).powi(2) + (y - py).powi(2)).sqrt();
            if d < best.1 {
                best = (self.grid.s(seg) + t * self.grid.delta_s, d);
            }
        }
        best
    }
}

fn dist(a: &[f64; 2], b: &[f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

/// Weights of the smoothing objective.
#[derive(Debug, Clone, Copy)]
pub struct PathWeights {
    /// Weight on the Cartesian position error.
    pub w_d: f64,
    /// Weight on the applied curvature.
    pub w_kappa: f64,
}

impl Default for PathWeights {
    fn default() -> Self {
        Self {
            w_d: 1.0,
            w_kappa: 20.0,
        }
    }
}

/// A smoothed, driveable path with per-sample heading and curvature.
#[derive(Debug, Clone)]
pub struct SmoothedPath {
    pub grid: SpatialGrid,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub headings: Vec<f64>,
    pub curvatures: Vec<f64>,
}

/// Spatial optimal-control problem behind the smoothing: state
/// `[x, y, heading]`, control `curvature`, Euler step of size `delta_s`.
pub struct PathProblem<'a> {
    refline: &'a ReferencePolyline,
    weights: PathWeights,
    initial: Vector3<f64>,
}

impl<'a> PathProblem<'a> {
    pub fn new(refline: &'a ReferencePolyline, weights: PathWeights) -> Self {
        let heading = (refline.ys[1] - refline.ys[0]).atan2(refline.xs[1] - refline.xs[0]);
        let initial = Vector3::new(refline.xs[0], refline.ys[0], heading);
        Self {
            refline,
            weights,
            initial,
        }
    }
}

impl<'a> DiscreteProblem<3, 1> for PathProblem<'a> {
    fn horizon(&self) -> usize {
        self.refline.grid.len
    }

    fn initial_state(&self) -> Vector3<f64> {
        self.initial
    }

    fn dynamics(&self, x: &Vector3<f64>, u: &Vector1<f64>) -> Vector3<f64> {
        let ds = self.refline.grid.delta_s;
        Vector3::new(
            x[0] + ds * x[2].cos(),
            x[1] + ds * x[2].sin(),
            x[2] + ds * u[0],
        )
    }

    fn dynamics_jacobians(
        &self,
        x: &Vector3<f64>,
        _u: &Vector1<f64>,
    ) -> (Matrix3<f64>, SMatrix<f64, 3, 1>) {
        let ds = self.refline.grid.delta_s;
        let a = Matrix3::new(
            1.0,
            0.0,
            -ds * x[2].sin(),
            0.0,
            1.0,
            ds * x[2].cos(),
            0.0,
            0.0,
            1.0,
        );
        let b = SMatrix::<f64, 3, 1>::new(0.0, 0.0, ds);
        (a, b)
    }

    fn stage_cost(&self, x: &Vector3<f64>, u: &Vector1<f64>, k: usize) -> f64 {
        let ds = self.refline.grid.delta_s;
        let ex = x[0] - self.refline.xs[k];
        let ey = x[1] - self.refline.ys[k];
        ds * (self.weights.w_d * (ex * ex + ey * ey) + self.weights.w_kappa * u[0] * u[0])
    }

    fn cost_expansion(&self, x: &Vector3<f64>, u: &Vector1<f64>, k: usize) -> CostExpansion<3, 1> {
        let ds = self.refline.grid.delta_s;
        let wd = self.weights.w_d;
        let wk = self.weights.w_kappa;
        let ex = x[0] - self.refline.xs[k];
        let ey = x[1] - self.refline.ys[k];
        let mut e = CostExpansion::zero();
        e.dx = Vector3::new(2.0 * ds * wd * ex, 2.0 * ds * wd * ey, 0.0);
        e.du = Vector1::new(2.0 * ds * wk * u[0]);
        e.dxx = Matrix3::from_diagonal(&Vector3::new(2.0 * ds * wd, 2.0 * ds * wd, 0.0));
        e.duu = SMatrix::<f64, 1, 1>::new(2.0 * ds * wk);
        e
    }
}

/// Curvature bound `u <= max` or `min <= u`, expressed as `h <= 0`.
struct CurvatureBound {
    bound: f64,
    sign: f64,
}

impl ConstraintFn<3, 1> for CurvatureBound {
    fn value(&self, _x: &Vector3<f64>, u: &Vector1<f64>, _k: usize) -> f64 {
        self.sign * (u[0] - self.bound)
    }

    fn gradient(
        &self,
        _x: &Vector3<f64>,
        _u: &Vector1<f64>,
        _k: usize,
    ) -> (Vector3<f64>, Vector1<f64>) {
        (Vector3::zeros(), Vector1::new(self.sign))
    }
}

/// Result of one smoothing cycle.
pub struct PathSolution {
    pub path: SmoothedPath,
    pub warm: WarmStart<1>,
    pub report: SolveReport,
    pub violations: ViolationReport,
    pub objective_cost: f64,
}

/// Configured path smoother; one planning stream holds one of these.
pub struct PathSmoother {
    pub weights: PathWeights,
    pub kappa_min: f64,
    pub kappa_max: f64,
    pub mu: f64,
    pub lambda_max: f64,
    pub settings: IlqrSettings,
}

impl Default for PathSmoother {
    fn default() -> Self {
        Self {
            weights: PathWeights::default(),
            kappa_min: -3.0,
            kappa_max: 3.0,
            mu: 1e2,
            lambda_max: 1e2,
            settings: IlqrSettings::default(),
        }
    }
}

impl PathSmoother {
    pub fn constraint_count() -> usize {
        2
    }

    /// The curvature box as two inequality constraints.
    pub fn constraint_set(&self) -> ConstraintSet<3, 1> {
        let mut set = ConstraintSet::new();
        set.push(ConstraintSpec::new(
            "kappa_max",
            Box::new(CurvatureBound {
                bound: self.kappa_max,
                sign: 1.0,
            }),
            Mask::All,
            self.mu,
            self.lambda_max,
        ));
        set.push(ConstraintSpec::new(
            "kappa_min",
            Box::new(CurvatureBound {
                bound: self.kappa_min,
                sign: -1.0,
            }),
            Mask::All,
            self.mu,
            self.lambda_max,
        ));
        set
    }

    /// One planning cycle of the smoothing objective: an ILQR solve on the
    /// augmented cost followed by a single multiplier update. Pass the
    /// previous cycle's (shifted) warm start to continue a stream.
    pub fn smooth(
        &self,
        refline: &ReferencePolyline,
        warm: Option<&WarmStart<1>>,
    ) -> Result<PathSolution> {
        if refline.grid.len < 2 {
            return Err(Error::DegeneratePolyline {
                distinct: refline.grid.len,
            });
        }
        let problem = PathProblem::new(refline, self.weights);
        let constraints = self.constraint_set();
        let cold = WarmStart::cold(refline.grid.len, constraints.len());
        let warm = warm.unwrap_or(&cold);
        let solution = al::solve_constrained(&problem, &constraints, warm, &self.settings)?;

        let traj = &solution.trajectory;
        let path = SmoothedPath {
            grid: refline.grid,
            xs: traj.states.iter().map(|x| x[0]).collect(),
            ys: traj.states.iter().map(|x| x[1]).collect(),
            headings: traj.states.iter().map(|x| x[2]).collect(),
            curvatures: traj.controls.iter().map(|u| u[0]).collect(),
        };
        Ok(PathSolution {
            path,
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

/// Three-point circumscribed-circle curvature per sample, signed by the turn
/// direction. Endpoints copy their nearest interior value. Collinear triples
/// yield zero. This is the noisy baseline the smoother is measured against.
pub fn local_curvature(refline: &ReferencePolyline) -> Vec<f64> {
    let n = refline.grid.len;
    assert!(n >= 3, "local curvature needs at least 3 points");
    let mut kappa = vec![0.0; n];
    for i in 1..n - 1 {
        let (ax, ay) = (refline.xs[i - 1], refline.ys[i - 1]);
        let (bx, by) = (refline.xs[i], refline.ys[i]);
        let (cx, cy) = (refline.xs[i + 1], refline.ys[i + 1]);
        let cross = (bx - ax) * (cy - by) - (by - ay) * (cx - bx);
        let d_ab = ((bx - ax).powi(2) + (by - ay).powi(2)).sqrt();
        let d_bc = ((cx - bx).powi(2) + (cy - by).powi(2)).sqrt();
        let d_ca = ((cx - ax).powi(2) + (cy - ay).powi(2)).sqrt();
        let denom = d_ab * d_bc * d_ca;
        kappa[i] = if denom > 1e-12 { 2.0 * cross / denom } else { 0.0 };
    }
    kappa[0] = kappa[1];
    kappa[n - 1] = kappa[n - 2];
    kappa
}

/// Velocity limit implied by path curvature and the admissible lateral
/// acceleration: `v = min(v_lg, sqrt(a_lat / max(|kappa|, 1e-6)))`.
/// The epsilon guards the straight-line singularity.
pub fn curvature_speed_limit(
    grid: SpatialGrid,
    curvatures: &[f64],
    legal_limit: &[f64],
    a_lat_hat: f64,
) -> LimitProfile {
    assert!(a_lat_hat > 0.0, "lateral acceleration bound must be positive");
    assert_eq!(curvatures.len(), grid.len);
    assert_eq!(legal_limit.len(), grid.len);
    let values = curvatures
        .iter()
        .zip(legal_limit)
        .map(|(&k, &vlg)| vlg.min((a_lat_hat / k.abs().max(1e-6)).sqrt()))
        .collect();
    LimitProfile { grid, values }
}
