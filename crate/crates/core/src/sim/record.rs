use crate::scenario::StKindConfig;

/// Wall-clock times of one planning cycle in milliseconds, split by stage.
#[derive(Debug, Clone, Copy, Default)]
pub struct CycleTimings {
    pub preprocessing_ms: f64,
    pub lateral_ms: f64,
    pub longitudinal_ms: f64,
    pub total_ms: f64,
}

/// One record per 10 ms control cycle. Contains only deterministic fields;
/// wall-clock times are kept separately so logs replay byte identically.
#[derive(Debug, Clone)]
pub struct CycleRecord {
    pub cycle: u64,
    pub time: f64,
    pub x: f64,
    pub y: f64,
    pub psi: f64,
    pub v: f64,
    pub s: f64,
    pub accel_cmd: f64,
    pub steer_cmd: f64,
    /// Whether this cycle executed a freshly computed plan (false when the
    /// previous solution stayed in force).
    pub plan_fresh: bool,
    pub lateral_iterations: usize,
    pub longitudinal_iterations: usize,
    pub max_violation: f64,
}

impl CycleRecord {
    pub const CSV_HEADER: &'static str =
        "cycle,t,x,y,psi,v,s,a_cmd,steer_cmd,plan_fresh,lat_iters,lon_iters,max_violation";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{:.4},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{},{},{},{:.6}",
            self.cycle,
            self.time,
            self.x,
            self.y,
            self.psi,
            self.v,
            self.s,
            self.accel_cmd,
            self.steer_cmd,
            self.plan_fresh as u8,
            self.lateral_iterations,
            self.longitudinal_iterations,
            self.max_violation,
        )
    }
}

/// Per-cycle snapshot of the planned profiles at a configurable stride.
#[derive(Debug, Clone)]
pub struct ProfileSnapshot {
    pub cycle: u64,
    pub time: f64,
    /// Rows `(s, v_lim, v_ref, v_star, a_star, t_star)`.
    pub rows: Vec<[f64; 6]>,
}

impl ProfileSnapshot {
    pub const CSV_HEADER: &'static str = "cycle,t,s,v_lim,v_ref,v_star,a_star,t_star";

    pub fn csv_rows(&self) -> impl Iterator<Item = String> + '_ {
        self.rows.iter().map(move |r| {
            format!(
                "{},{:.4},{:.3},{:.6},{:.6},{:.6},{:.6},{:.6}",
                self.cycle, self.time, r[0], r[1], r[2], r[3], r[4], r[5]
            )
        })
    }
}

/// First collision observed during a run.
#[derive(Debug, Clone, Copy)]
pub struct CollisionEvent {
    pub time: f64,
    pub actor: usize,
    pub distance: f64,
}

/// Outcome of one spatiotemporal constraint over a run.
#[derive(Debug, Clone)]
pub struct ArrivalReport {
    pub kind: StKindConfig,
    pub s: f64,
    pub bound: f64,
    /// Interpolated crossing time, if the location was reached.
    pub arrival: Option<f64>,
    pub satisfied: bool,
}

/// Mean/standard deviation/maximum of a timing series, in milliseconds.
#[derive(Debug, Clone, Copy, Default)]
pub struct StatsRow {
    pub mean: f64,
    pub stddev: f64,
    pub max: f64,
}

impl StatsRow {
    pub fn from_series(values: impl Iterator<Item = f64> + Clone) -> Self {
        let n = values.clone().count();
        if n == 0 {
            return Self::default();
        }
        let sum: f64 = values.clone().sum();
        let mean = sum / n as f64;
        let var: f64 = values.clone().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
        let max = values.fold(f64::NEG_INFINITY, f64::max);
        Self {
            mean,
            stddev: var.sqrt(),
            max,
        }
    }
}

/// Runtime statistics per pipeline component.
#[derive(Debug, Clone, Copy, Default)]
pub struct TimingStats {
    pub lateral: StatsRow,
    pub longitudinal: StatsRow,
    pub total: StatsRow,
}

impl TimingStats {
    pub fn from_cycles(timings: &[CycleTimings]) -> Self {
        Self {
            lateral: StatsRow::from_series(timings.iter().map(|t| t.lateral_ms)),
            longitudinal: StatsRow::from_series(timings.iter().map(|t| t.longitudinal_ms)),
            total: StatsRow::from_series(timings.iter().map(|t| t.total_ms)),
        }
    }

    /// The three-row table used by the bench command.
    pub fn table(&self) -> String {
        let row = |name: &str, s: &StatsRow| {
            format!(
                "{:<32} {:>10.3} ms {:>10.3} ms {:>10.3} ms\n",
                name, s.mean, s.stddev, s.max
            )
        };
        let mut out = format!(
            "{:<32} {:>13} {:>13} {:>13}\n",
            "Component", "Mean", "Stddev.", "Max."
        );
        out.push_str(&row("lateral", &self.lateral));
        out.push_str(&row("longitudinal", &self.longitudinal));
        out.push_str(&row("total (lat. + lon. + preproc.)", &self.total));
        out
    }
}

/// End-of-run summary.
#[derive(Debug, Clone)]
pub struct Verdict {
    pub collision: Option<CollisionEvent>,
    pub arrivals: Vec<ArrivalReport>,
    /// True when the ego never passed an applied stop line while it was active.
    pub stop_compliance: bool,
    pub accel_cmd_min: f64,
    pub accel_cmd_max: f64,
    pub v_max: f64,
    pub plan_failures: u64,
    pub mean_longitudinal_iterations: f64,
    pub completed_time: f64,
}

impl Verdict {
    pub fn constraints_satisfied(&self) -> bool {
        self.arrivals.iter().all(|a| a.satisfied)
    }
}
