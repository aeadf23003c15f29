use nalgebra::SVector;

use crate::error::{Error, Result};
use crate::ilqr::{self, IlqrSettings, SolveReport, Trajectory};

use super::augmented::AugmentedProblem;
use super::constraint::ConstraintSet;
use super::state::ALState;

/// Controls and multipliers carried from one planning cycle to the next.
#[derive(Debug, Clone)]
pub struct WarmStart<const M: usize> {
    pub controls: Vec<SVector<f64, M>>,
    pub multipliers: ALState,
}

impl<const M: usize> WarmStart<M> {
    /// Cold start: zero controls, zero multipliers.
    pub fn cold(horizon: usize, constraints: usize) -> Self {
        Self {
            controls: vec![SVector::zeros(); horizon],
            multipliers: ALState::zeros(horizon, constraints),
        }
    }
}

/// Per-constraint maximum violation `max_k h_i^+` on the returned trajectory.
#[derive(Debug, Clone)]
pub struct ViolationReport {
    pub per_constraint: Vec<(String, f64)>,
}

impl ViolationReport {
    pub fn max(&self) -> f64 {
        self.per_constraint
            .iter()
            .map(|(_, v)| *v)
            .fold(0.0, f64::max)
    }
}

/// Result of one constrained planning cycle.
pub struct ConstrainedSolution<const N: usize, const M: usize> {
    pub trajectory: Trajectory<N, M>,
    /// Objective value without penalty terms.
    pub objective_cost: f64,
    pub multipliers: ALState,
    pub violations: ViolationReport,
    pub report: SolveReport,
}

/// Multiplier update of one planning cycle:
/// `lambda' = clamp(lambda + mu * h, 0, lambda_max)` at every masked sample.
pub fn update_multipliers<const N: usize, const M: usize>(
    state: &ALState,
    traj: &Trajectory<N, M>,
    constraints: &ConstraintSet<N, M>,
) -> ALState {
    let mut next = state.clone();
    for k in 0..traj.len() {
        for (i, spec) in constraints.iter().enumerate() {
            if !spec.mask.active(k) {
                continue;
            }
            let h = spec.fun.value(&traj.states[k], &traj.controls[k], k);
            let raw = state.get(k, i) + spec.mu * h;
            next.set(k, i, raw.clamp(0.0, spec.lambda_max));
        }
    }
    next
}

fn measure_violations<const N: usize, const M: usize>(
    traj: &Trajectory<N, M>,
    constraints: &ConstraintSet<N, M>,
) -> ViolationReport {
    let per_constraint = constraints
        .iter()
        .map(|spec| {
            let mut worst = 0.0f64;
            for k in 0..traj.len() {
                if spec.mask.active(k) {
                    worst = worst.max(spec.fun.value(&traj.states[k], &traj.controls[k], k));
                }
            }
            (spec.name.clone(), worst)
        })
        .collect();
    ViolationReport { per_constraint }
}

/// One planning cycle: minimize the Lagrangian with ILQR, then perform exactly
/// one clamped multiplier update. Infeasibility is reported, never raised;
/// the bounded multipliers and fixed barrier weights keep the cost finite for
/// infeasible warm starts.
pub fn solve_constrained<P, const N: usize, const M: usize>(
    problem: &P,
    constraints: &ConstraintSet<N, M>,
    warm: &WarmStart<M>,
    settings: &IlqrSettings,
) -> Result<ConstrainedSolution<N, M>>
where
    P: ilqr::DiscreteProblem<N, M>,
{
    let horizon = problem.horizon();
    if warm.controls.len() != horizon {
        return Err(Error::WarmStartMismatch(format!(
            "controls have {} rows, problem horizon is {}",
            warm.controls.len(),
            horizon
        )));
    }
    if warm.multipliers.horizon() != horizon
        || warm.multipliers.constraint_count() != constraints.len()
    {
        return Err(Error::WarmStartMismatch(format!(
            "multiplier matrix is {}x{}, expected {}x{}",
            warm.multipliers.horizon(),
            warm.multipliers.constraint_count(),
            horizon,
            constraints.len()
        )));
    }

    let augmented = AugmentedProblem {
        base: problem,
        constraints,
        multipliers: &warm.multipliers,
    };
    let (trajectory, report) = ilqr::solve(&augmented, &warm.controls, settings)?;

    let objective_cost = (0..horizon)
        .map(|k| problem.stage_cost(&trajectory.states[k], &trajectory.controls[k], k))
        .sum();
    let multipliers = update_multipliers(&warm.multipliers, &trajectory, constraints);
    let violations = measure_violations(&trajectory, constraints);

    Ok(ConstrainedSolution {
        trajectory,
        objective_cost,
        multipliers,
        violations,
        report,
    })
}

/// Result of shifting a warm start by the distance driven since the last cycle.
#[derive(Debug, Clone)]
pub struct ShiftOutcome<const M: usize> {
    pub warm: WarmStart<M>,
    /// Set when the advance exceeded the horizon and the warm start was
    /// reinitialized to zeros.
    pub reinitialized: bool,
}

/// Shift controls and multipliers backward by `round(advance / delta_s)`
/// samples. Vacated tail rows repeat the last control and zero the
/// multipliers; an advance beyond the horizon returns an all-zero warm start
/// with the `reinitialized` flag set.
pub fn shift_warm_start<const M: usize>(
    warm: &WarmStart<M>,
    advance: f64,
    delta_s: f64,
) -> ShiftOutcome<M> {
    assert!(advance >= 0.0, "advance must be non-negative");
    assert!(delta_s > 0.0);
    let horizon = warm.controls.len();
    let constraints = warm.multipliers.constraint_count();
    let shift = (advance / delta_s).round() as usize;

    if shift == 0 {
        return ShiftOutcome {
            warm: warm.clone(),
            reinitialized: false,
        };
    }
    if shift >= horizon {
        return ShiftOutcome {
            warm: WarmStart::cold(horizon, constraints),
            reinitialized: true,
        };
    }

    let mut controls = Vec::with_capacity(horizon);
    let mut multipliers = ALState::zeros(horizon, constraints);
    for k in 0..horizon {
        let src = k + shift;
        if src < horizon {
            controls.push(warm.controls[src]);
            for i in 0..constraints {
                multipliers.set(k, i, warm.multipliers.get(src, i));
            }
        } else {
            controls.push(warm.controls[horizon - 1]);
            // multipliers stay zero in the vacated tail
        }
    }

    ShiftOutcome {
        warm: WarmStart {
            controls,
            multipliers,
        },
        reinitialized: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Vector1;

    #[test]
    fn shift_by_two_on_horizon_five() {
        let mut warm = WarmStart::<1>::cold(5, 1);
        for k in 0..5 {
            warm.controls[k] = Vector1::new((k + 1) as f64);
            warm.multipliers.set(k, 0, (k + 1) as f64);
        }
        let out = shift_warm_start(&warm, 1.0, 0.5);
        assert!(!out.reinitialized);
        let u: Vec<f64> = out.warm.controls.iter().map(|u| u[0]).collect();
        assert_eq!(u, vec![3.0, 4.0, 5.0, 5.0, 5.0]);
        let l: Vec<f64> = (0..5).map(|k| out.warm.multipliers.get(k, 0)).collect();
        assert_eq!(l, vec![3.0, 4.0, 5.0, 0.0, 0.0]);
    }

    #[test]
    fn zero_advance_is_identity() {
        let mut warm = WarmStart::<1>::cold(4, 2);
        warm.controls[2] = Vector1::new(7.0);
        warm.multipliers.set(1, 1, 3.0);
        let out = shift_warm_start(&warm, 0.0, 0.5);
        assert!(!out.reinitialized);
        assert_eq!(out.warm.controls[2][0], 7.0);
        assert_eq!(out.warm.multipliers.get(1, 1), 3.0);
    }

    #[test]
    fn advance_past_horizon_reinitializes() {
        let mut warm = WarmStart::<1>::cold(4, 1);
        warm.controls[0] = Vector1::new(9.0);
        warm.multipliers.set(0, 0, 9.0);
        let out = shift_warm_start(&warm, 126.0, 0.5);
        assert!(out.reinitialized);
        assert!(out.warm.controls.iter().all(|u| u[0] == 0.0));
        assert!(out.warm.multipliers.iter().all(|l| l == 0.0));
    }
}
