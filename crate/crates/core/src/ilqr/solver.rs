use nalgebra::SVector;

use crate::error::{Error, Result};

use super::problem::DiscreteProblem;
use super::riccati::{backward_pass, Gains};

/// State/control sequences over the horizon plus their accumulated cost.
///
/// Produced only by rollouts, so the shooting property
/// `x_{k+1} = f(x_k, u_k)` holds by construction.
#[derive(Debug, Clone)]
pub struct Trajectory<const N: usize, const M: usize> {
    pub states: Vec<SVector<f64, N>>,
    pub controls: Vec<SVector<f64, M>>,
    pub cost: f64,
}

impl<const N: usize, const M: usize> Trajectory<N, M> {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// Regularization schedule for the backward pass.
#[derive(Debug, Clone, Copy)]
pub struct Regularization {
    pub initial: f64,
    pub growth: f64,
    pub max: f64,
}

impl Default for Regularization {
    fn default() -> Self {
        Self {
            initial: 1e-6,
            growth: 10.0,
            max: 1e6,
        }
    }
}

/// Solver settings.
///
/// The defaults mirror a high-rate replanning setup: few iterations, a
/// relative cost tolerance of `1e-6`, and a backtracking step set
/// `{1, 1/2, ..., 2^-10}` accepted when the achieved reduction exceeds
/// `1e-4` of the model prediction.
#[derive(Debug, Clone)]
pub struct IlqrSettings {
    pub max_iterations: usize,
    pub tolerance: f64,
    pub regularization: Regularization,
    pub line_search_steps: Vec<f64>,
    pub acceptance_ratio: f64,
}

impl Default for IlqrSettings {
    fn default() -> Self {
        Self {
            max_iterations: 5,
            tolerance: 1e-6,
            regularization: Regularization::default(),
            line_search_steps: (0..=10).map(|i| 0.5f64.powi(i)).collect(),
            acceptance_ratio: 1e-4,
        }
    }
}

impl IlqrSettings {
    /// Settings for offline use where full convergence matters more than
    /// cycle time.
    pub fn converged(max_iterations: usize) -> Self {
        Self {
            max_iterations,
            tolerance: 1e-9,
            ..Self::default()
        }
    }

    pub fn validate(&self) {
        assert!(self.max_iterations >= 1, "need at least one iteration");
        assert!(self.tolerance > 0.0, "tolerance must be positive");
        assert!(
            self.line_search_steps
                .iter()
                .all(|&a| a > 0.0 && a <= 1.0),
            "line-search steps must lie in (0, 1]"
        );
    }
}

/// How a solve terminated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// Relative cost change fell below the tolerance.
    Converged,
    /// The iteration cap was reached first.
    IterationCap,
    /// No descent step could be found even at maximum regularization.
    Stalled,
}

/// Per-solve diagnostics.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub termination: Termination,
    pub iterations: usize,
    pub accepted_iterations: usize,
    pub initial_cost: f64,
    pub final_cost: f64,
    /// Cost after each accepted iteration (non-increasing).
    pub cost_history: Vec<f64>,
}

/// Integrate the dynamics from the initial state under `controls` and
/// accumulate the stage cost.
pub fn rollout<P, const N: usize, const M: usize>(
    problem: &P,
    controls: &[SVector<f64, M>],
) -> Result<Trajectory<N, M>>
where
    P: DiscreteProblem<N, M>,
{
    let horizon = problem.horizon();
    assert_eq!(controls.len(), horizon, "control rows must match horizon");

    let mut states = Vec::with_capacity(horizon);
    let mut cost = 0.0;
    let mut x = problem.initial_state();
    if !x.iter().all(|v| v.is_finite()) {
        return Err(Error::RolloutDiverged { index: 0 });
    }

    for k in 0..horizon {
        states.push(x);
        let l = problem.stage_cost(&x, &controls[k], k);
        if !l.is_finite() {
            return Err(Error::RolloutDiverged { index: k });
        }
        cost += l;
        if k + 1 < horizon {
            x = problem.dynamics(&x, &controls[k]);
            if !x.iter().all(|v| v.is_finite()) {
                return Err(Error::RolloutDiverged { index: k + 1 });
            }
        }
    }

    Ok(Trajectory {
        states,
        controls: controls.to_vec(),
        cost,
    })
}

/// Outcome of one line-searched forward pass.
#[derive(Debug)]
pub enum ForwardOutcome<const N: usize, const M: usize> {
    /// A step achieved sufficient cost decrease.
    Improved { trajectory: Trajectory<N, M>, step: f64 },
    /// No step in the set improved the cost; the input stands.
    NoImprovement,
}

/// Closed-loop rollout `u' = u + alpha*d + K(x' - x)` over the step set,
/// largest step first; accepts the first step whose actual reduction exceeds
/// `acceptance_ratio` times the model prediction. Steps whose rollout
/// diverges are rejected and the search continues.
pub fn forward_pass<P, const N: usize, const M: usize>(
    traj: &Trajectory<N, M>,
    gains: &Gains<N, M>,
    problem: &P,
    steps: &[f64],
    acceptance_ratio: f64,
) -> ForwardOutcome<N, M>
where
    P: DiscreteProblem<N, M>,
{
    let horizon = traj.len();
    for &alpha in steps {
        let expected = gains.expected.at(alpha);
        if expected <= 0.0 {
            continue;
        }

        let mut states = Vec::with_capacity(horizon);
        let mut controls = Vec::with_capacity(horizon);
        let mut cost = 0.0;
        let mut x = traj.states[0];
        let mut ok = true;

        for k in 0..horizon {
            let u = traj.controls[k]
                + gains.feedforward[k] * alpha
                + gains.feedback[k] * (x - traj.states[k]);
            let l = problem.stage_cost(&x, &u, k);
            if !l.is_finite() {
                ok = false;
                break;
            }
            cost += l;
            states.push(x);
            controls.push(u);
            if k + 1 < horizon {
                x = problem.dynamics(&x, &u);
                if !x.iter().all(|v| v.is_finite()) {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }

        let actual = traj.cost - cost;
        if actual / expected > acceptance_ratio {
            return ForwardOutcome::Improved {
                trajectory: Trajectory {
                    states,
                    controls,
                    cost,
                },
                step: alpha,
            };
        }
    }
    ForwardOutcome::NoImprovement
}

/// Minimize the problem from `initial_controls`.
///
/// Alternates backward and forward passes until the relative cost change
/// drops below the tolerance or the iteration cap is hit. Always returns the
/// best trajectory found; the report distinguishes converged, iteration-capped,
/// and stalled runs.
pub fn solve<P, const N: usize, const M: usize>(
    problem: &P,
    initial_controls: &[SVector<f64, M>],
    settings: &IlqrSettings,
) -> Result<(Trajectory<N, M>, SolveReport)>
where
    P: DiscreteProblem<N, M>,
{
    settings.validate();
    let mut traj = rollout(problem, initial_controls)?;
    let initial_cost = traj.cost;
    let mut cost_history = Vec::with_capacity(settings.max_iterations);

    let mut reg = settings.regularization.initial;
    let mut termination = Termination::IterationCap;
    let mut iterations = 0;
    let mut accepted = 0;

    'outer: for _ in 0..settings.max_iterations {
        iterations += 1;

        let gains = loop {
            match backward_pass(&traj, problem, reg) {
                Ok(g) => break g,
                Err(_) => {
                    if reg >= settings.regularization.max {
                        termination = Termination::Stalled;
                        break 'outer;
                    }
                    reg = (reg * settings.regularization.growth).min(settings.regularization.max);
                }
            }
        };

        let scale = traj.cost.abs().max(1.0);
        match forward_pass(
            &traj,
            &gains,
            problem,
            &settings.line_search_steps,
            settings.acceptance_ratio,
        ) {
            ForwardOutcome::Improved { trajectory, .. } => {
                let drop = traj.cost - trajectory.cost;
                traj = trajectory;
                accepted += 1;
                cost_history.push(traj.cost);
                reg = (reg / settings.regularization.growth).max(settings.regularization.initial);
                if drop < settings.tolerance * scale {
                    termination = Termination::Converged;
                    break;
                }
            }
            ForwardOutcome::NoImprovement => {
                if gains.expected.at(1.0) < settings.tolerance * scale {
                    // Stationary point: the model predicts no usable descent.
                    termination = Termination::Converged;
                    break;
                }
                if reg >= settings.regularization.max {
                    termination = Termination::Stalled;
                    break;
                }
                reg = (reg * settings.regularization.growth).min(settings.regularization.max);
            }
        }
    }

    let report = SolveReport {
        termination,
        iterations,
        accepted_iterations: accepted,
        initial_cost,
        final_cost: traj.cost,
        cost_history,
    };
    Ok((traj, report))
}
