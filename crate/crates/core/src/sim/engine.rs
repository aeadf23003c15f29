use crate::error::Result;
use crate::path::ReferencePolyline;
use crate::scenario::{Scenario, StSelection};
use crate::velocity::SpatioTemporalConstraint;

use super::control::low_level_control;
use super::planner::{Plan, Planner, WorldSnapshot};
use super::record::{
    ArrivalReport, CollisionEvent, CycleRecord, CycleTimings, ProfileSnapshot, TimingStats,
    Verdict,
};
use super::vehicle::{step_vehicle, EgoState};

/// Distance below which ego and an actor count as collided (center to center).
const COLLISION_DISTANCE: f64 = 2.0;

/// Control cycle length in seconds.
const CONTROL_DT: f64 = 0.01;

/// Run options, typically filled from CLI flags.
#[derive(Debug, Clone)]
pub struct SimOptions {
    pub duration: f64,
    /// Overrides the reference noise seed of the scenario.
    pub seed: Option<u64>,
    pub selection: StSelection,
    /// Reinitialize solvers from scratch every cycle instead of shifting the
    /// previous solution.
    pub cold_start: bool,
    /// Wall-clock planning budget per cycle; when exceeded, the previous
    /// solution stays in force. `None` disables the budget, which keeps runs
    /// deterministic.
    pub budget_ms: Option<f64>,
    /// Record a profile snapshot every this many cycles.
    pub profile_stride: u64,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            duration: 20.0,
            seed: None,
            selection: StSelection::All,
            cold_start: false,
            budget_ms: None,
            profile_stride: 10,
        }
    }
}

struct Actor {
    track: ReferencePolyline,
    s0: f64,
    v: f64,
    spawn_time: f64,
    /// Current 2D position, valid while active.
    position: (f64, f64),
    active: bool,
}

impl Actor {
    fn advance(&mut self, time: f64) {
        if time < self.spawn_time {
            self.active = false;
            return;
        }
        let s = self.s0 + self.v * (time - self.spawn_time);
        if s > self.track.grid.end() {
            self.active = false;
            return;
        }
        self.active = true;
        self.position = self.track.point_at(s);
    }
}

/// Full simulation results.
pub struct RunOutcome {
    pub records: Vec<CycleRecord>,
    pub snapshots: Vec<ProfileSnapshot>,
    pub timings: Vec<CycleTimings>,
    pub timing_stats: TimingStats,
    pub verdict: Verdict,
}

/// Closed-loop scenario engine: scripted actors and signals, per-cycle
/// replanning, low-level control, kinematic-bicycle integration, and
/// collision/constraint monitoring on a 10 ms clock.
pub struct Simulation {
    scenario: Scenario,
    options: SimOptions,
    refline: ReferencePolyline,
    legal: Vec<f64>,
    planner: Planner,
    ego: EgoState,
    actors: Vec<Actor>,
    plan: Option<Plan>,
    time: f64,
    cycle: u64,
    last_accel: f64,

    records: Vec<CycleRecord>,
    snapshots: Vec<ProfileSnapshot>,
    timings: Vec<CycleTimings>,
    collision: Option<CollisionEvent>,
    arrival_times: Vec<Option<f64>>,
    stop_compliance: bool,
    /// Per signal: a stop was committed to (applied while stoppable) and the
    /// signal has stayed red since.
    committed_stops: Vec<bool>,
    plan_failures: u64,
    accel_min: f64,
    accel_max: f64,
    v_max: f64,
    lon_iters_sum: u64,
    lon_iters_count: u64,
}

impl Simulation {
    pub fn new(scenario: Scenario, options: SimOptions) -> Result<Self> {
        scenario.validate()?;
        let refline = scenario.build_reference(options.seed)?;
        let legal: Vec<f64> = refline.grid.samples().map(|s| scenario.speed_limits.at(s)).collect();

        let spatiotemporal: Vec<SpatioTemporalConstraint> =
            scenario.selected_spatiotemporal(options.selection);
        let planner = Planner::new(&scenario, spatiotemporal, options.cold_start);

        let (x, y) = refline.point_at(scenario.ego.s);
        let (x2, y2) = refline.point_at(scenario.ego.s + scenario.grid.delta_s);
        let ego = EgoState {
            x,
            y,
            psi: (y2 - y).atan2(x2 - x),
            v: scenario.ego.v,
            s: scenario.ego.s,
        };

        let actors = scenario
            .actors
            .iter()
            .map(|a| -> Result<Actor> {
                let track = match &a.track {
                    Some(points) => {
                        ReferencePolyline::resample(points, 0.0, scenario.grid.delta_s)?
                    }
                    None => refline.clone(),
                };
                Ok(Actor {
                    track,
                    s0: a.s0,
                    v: a.v,
                    spawn_time: a.spawn_time,
                    position: (f64::INFINITY, f64::INFINITY),
                    active: false,
                })
            })
            .collect::<Result<Vec<_>>>()?;

        let arrival_times = vec![None; scenario.spatiotemporal.len()];
        let committed_stops = vec![false; scenario.signals.len()];

        Ok(Self {
            scenario,
            options,
            refline,
            legal,
            planner,
            ego,
            actors,
            plan: None,
            time: 0.0,
            cycle: 0,
            last_accel: 0.0,
            records: Vec::new(),
            snapshots: Vec::new(),
            timings: Vec::new(),
            collision: None,
            arrival_times,
            stop_compliance: true,
            committed_stops,
            plan_failures: 0,
            accel_min: f64::INFINITY,
            accel_max: f64::NEG_INFINITY,
            v_max: 0.0,
            lon_iters_sum: 0,
            lon_iters_count: 0,
        })
    }

    pub fn ego(&self) -> &EgoState {
        &self.ego
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn current_plan(&self) -> Option<&Plan> {
        self.plan.as_ref()
    }

    /// Advance one 10 ms control cycle. Planner failures are logged and the
    /// previous solution stays in force; the loop never aborts mid-run.
    pub fn step(&mut self) {
        for actor in &mut self.actors {
            actor.advance(self.time);
        }

        let obstacles: Vec<(f64, f64, f64)> = self
            .actors
            .iter()
            .filter(|a| a.active)
            .map(|a| (a.position.0, a.position.1, a.v))
            .collect();
        let red_signals: Vec<f64> = self
            .scenario
            .signals
            .iter()
            .filter(|sig| sig.is_red(self.time))
            .map(|sig| sig.s)
            .collect();

        let snapshot = WorldSnapshot {
            time: self.time,
            ego_accel: self.last_accel,
            obstacles: &obstacles,
            red_signals: &red_signals,
        };

        let mut plan_fresh = false;
        let mut lat_iters = 0;
        let mut lon_iters = 0;
        let mut max_violation = 0.0;
        let mut applied_stops = Vec::new();
        match self
            .planner
            .plan(&self.ego, &self.refline, &self.legal, &snapshot)
        {
            Ok((plan, timings, diag)) => {
                let within_budget = self
                    .options
                    .budget_ms
                    .map_or(true, |budget| timings.total_ms <= budget);
                if within_budget || self.plan.is_none() {
                    self.plan = Some(plan);
                    plan_fresh = true;
                }
                lat_iters = diag.lateral_iterations;
                lon_iters = diag.longitudinal_iterations;
                max_violation = diag.max_violation;
                applied_stops = diag.applied_stops;
                self.timings.push(timings);
                self.lon_iters_sum += diag.longitudinal_iterations as u64;
                self.lon_iters_count += 1;
            }
            Err(_) => {
                self.plan_failures += 1;
            }
        }

        let command = match &self.plan {
            Some(plan) => low_level_control(
                &self.ego,
                plan,
                self.scenario.params.a_min,
                self.scenario.params.a_max,
            ),
            None => super::control::ControlCommand {
                accel: 0.0,
                steer: 0.0,
                beyond_horizon: true,
            },
        };

        let prev_s = self.ego.s;
        let mut next = step_vehicle(&self.ego, command.accel, command.steer, CONTROL_DT);
        let (s_proj, _) = self
            .refline
            .project(next.x, next.y, prev_s, 10.0 + next.v * CONTROL_DT);
        next.s = s_proj.max(prev_s);
        self.ego = next;

        self.last_accel = command.accel;
        self.accel_min = self.accel_min.min(command.accel);
        self.accel_max = self.accel_max.max(command.accel);
        self.v_max = self.v_max.max(self.ego.v);

        // Collision monitoring (2D proximity to any active actor).
        if self.collision.is_none() {
            for (idx, actor) in self.actors.iter().enumerate() {
                if !actor.active {
                    continue;
                }
                let d = ((self.ego.x - actor.position.0).powi(2)
                    + (self.ego.y - actor.position.1).powi(2))
                .sqrt();
                if d < COLLISION_DISTANCE {
                    self.collision = Some(CollisionEvent {
                        time: self.time,
                        actor: idx,
                        distance: d,
                    });
                }
            }
        }

        // Arrival times at constraint locations (interpolated crossing).
        for (i, st) in self.scenario.spatiotemporal.iter().enumerate() {
            if self.arrival_times[i].is_none() && prev_s < st.s && self.ego.s >= st.s {
                let frac = (st.s - prev_s) / (self.ego.s - prev_s).max(1e-12);
                self.arrival_times[i] = Some(self.time + frac * CONTROL_DT);
            }
        }

        // Stop-line compliance: once a red-signal stop has been committed to,
        // its line must not be crossed while the signal stays red.
        for (i, sig) in self.scenario.signals.iter().enumerate() {
            if !sig.is_red(self.time) {
                self.committed_stops[i] = false;
                continue;
            }
            if applied_stops.iter().any(|&s| (s - sig.s).abs() < 1e-6) {
                self.committed_stops[i] = true;
            }
            if self.committed_stops[i] && prev_s <= sig.s + 0.25 && self.ego.s > sig.s + 0.25 {
                self.stop_compliance = false;
            }
        }

        self.records.push(CycleRecord {
            cycle: self.cycle,
            time: self.time,
            x: self.ego.x,
            y: self.ego.y,
            psi: self.ego.psi,
            v: self.ego.v,
            s: self.ego.s,
            accel_cmd: command.accel,
            steer_cmd: command.steer,
            plan_fresh,
            lateral_iterations: lat_iters,
            longitudinal_iterations: lon_iters,
            max_violation,
        });

        if self.cycle % self.options.profile_stride == 0 {
            if let Some(plan) = &self.plan {
                let rows = (0..plan.velocity.grid.len)
                    .map(|k| {
                        [
                            plan.velocity.grid.s(k),
                            plan.limits.values[k],
                            plan.reference.values[k],
                            plan.velocity.v[k],
                            plan.velocity.a[k],
                            plan.velocity.t[k],
                        ]
                    })
                    .collect();
                self.snapshots.push(ProfileSnapshot {
                    cycle: self.cycle,
                    time: self.time,
                    rows,
                });
            }
        }

        self.time += CONTROL_DT;
        self.cycle += 1;
    }

    /// Run until the configured duration, a collision, or the map end.
    pub fn run(mut self) -> RunOutcome {
        let map_end = self.refline.grid.end() - self.scenario.grid.horizon;
        while self.time < self.options.duration - 0.5 * CONTROL_DT {
            self.step();
            if self.collision.is_some() {
                break;
            }
            if self.ego.s >= map_end {
                break;
            }
        }
        self.finish()
    }

    fn finish(self) -> RunOutcome {
        let arrivals = self
            .scenario
            .spatiotemporal
            .iter()
            .enumerate()
            .map(|(i, st)| {
                let arrival = self.arrival_times[i];
                let satisfied = match st.kind {
                    crate::scenario::StKindConfig::Min => {
                        arrival.map_or(true, |t| t >= st.t - 0.1)
                    }
                    crate::scenario::StKindConfig::Max => {
                        arrival.map_or(false, |t| t <= st.t + 0.1)
                    }
                };
                ArrivalReport {
                    kind: st.kind,
                    s: st.s,
                    bound: st.t,
                    arrival,
                    satisfied,
                }
            })
            .collect();

        let verdict = Verdict {
            collision: self.collision,
            arrivals,
            stop_compliance: self.stop_compliance,
            accel_cmd_min: self.accel_min.min(0.0),
            accel_cmd_max: self.accel_max.max(0.0),
            v_max: self.v_max,
            plan_failures: self.plan_failures,
            mean_longitudinal_iterations: if self.lon_iters_count > 0 {
                self.lon_iters_sum as f64 / self.lon_iters_count as f64
            } else {
                0.0
            },
            completed_time: self.time,
        };

        RunOutcome {
            records: self.records,
            snapshots: self.snapshots,
            timing_stats: TimingStats::from_cycles(&self.timings),
            timings: self.timings,
            verdict,
        }
    }
}
