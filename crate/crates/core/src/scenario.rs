//! Scenario files: JSON documents describing the road, traffic, signals,
//! arrival-time constraints, and all planner parameters.
//!
//! Unknown keys are rejected; missing parameters fall back to the evaluation
//! defaults, so a minimal scenario only needs a reference polyline.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ilqr::IlqrSettings;
use crate::path::{PathSmoother, PathWeights, ReferencePolyline};
use crate::velocity::{ProfileOptimizer, ProfileWeights, SpatioTemporalConstraint, StKind};

/// Grid section: sample spacing and planning horizon in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub delta_s: f64,
    pub horizon: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            delta_s: 0.5,
            horizon: 125.0,
        }
    }
}

impl GridConfig {
    /// Number of samples in one planning window.
    pub fn window_len(&self) -> usize {
        (self.horizon / self.delta_s).round() as usize
    }
}

/// Objective parameters. Field names match the scenario-file keys.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Params {
    pub v_min: f64,
    pub a_min: f64,
    pub a_max: f64,
    pub a_lat_hat: f64,
    pub j_min: f64,
    pub j_max: f64,
    pub kappa_min: f64,
    pub kappa_max: f64,
    pub w_d: f64,
    pub w_kappa: f64,
    pub w_v: f64,
    pub w_a: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            v_min: 1.0,
            a_min: -2.5,
            a_max: 2.5,
            a_lat_hat: 2.5,
            j_min: -1.5,
            j_max: 1.5,
            kappa_min: -3.0,
            kappa_max: 3.0,
            w_d: 1.0,
            w_kappa: 20.0,
            w_v: 0.1,
            w_a: 1.0,
            alpha: 10.0,
            beta: 5e-3,
        }
    }
}

/// Solver section: iteration budget, tolerance, and the per-class barrier
/// weights and multiplier caps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub n_iters: usize,
    pub tol: f64,
    pub mu_default: f64,
    pub mu_tmax: f64,
    pub lambda_max_default: f64,
    pub lambda_max_tmax: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            n_iters: 5,
            tol: 1e-6,
            mu_default: 1e2,
            mu_tmax: 1e3,
            lambda_max_default: 1e2,
            lambda_max_tmax: 1e3,
        }
    }
}

/// Reference polyline, optionally corrupted by seeded Gaussian noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceConfig {
    pub points: Vec<[f64; 2]>,
    #[serde(default)]
    pub noise_sigma: f64,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpeedSegment {
    pub from: f64,
    pub to: f64,
    pub v: f64,
}

/// Legal speed limit: a default plus overriding segments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpeedLimits {
    pub default: f64,
    pub segments: Vec<SpeedSegment>,
}

impl Default for SpeedLimits {
    fn default() -> Self {
        Self {
            default: 13.89,
            segments: Vec::new(),
        }
    }
}

impl SpeedLimits {
    pub fn at(&self, s: f64) -> f64 {
        for seg in &self.segments {
            if s >= seg.from && s <= seg.to {
                return seg.v;
            }
        }
        self.default
    }
}

/// A scripted constant-velocity traffic participant. Without an own `track`
/// it drives along the scenario reference; `s0` is its arc position on its
/// track at spawn time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActorConfig {
    pub s0: f64,
    pub v: f64,
    #[serde(default)]
    pub spawn_time: f64,
    #[serde(default)]
    pub track: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RedInterval {
    pub from: f64,
    #[serde(default)]
    pub until: Option<f64>,
}

/// A traffic signal at a fixed arc position with scripted red intervals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalConfig {
    pub s: f64,
    pub red: Vec<RedInterval>,
}

impl SignalConfig {
    pub fn is_red(&self, t: f64) -> bool {
        self.red
            .iter()
            .any(|r| t >= r.from && r.until.map_or(true, |u| t < u))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StKindConfig {
    Min,
    Max,
}

/// Arrival-time constraint in absolute scenario time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StConfig {
    pub kind: StKindConfig,
    pub s: f64,
    pub t: f64,
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub beta: Option<f64>,
}

/// Ego start state and safety-distance policy
/// (`d_safe = d_safe_base + d_safe_headway * v`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EgoConfig {
    pub s: f64,
    pub v: f64,
    pub d_safe_base: f64,
    pub d_safe_headway: f64,
}

impl Default for EgoConfig {
    fn default() -> Self {
        Self {
            s: 0.0,
            v: 0.0,
            d_safe_base: 6.0,
            d_safe_headway: 1.0,
        }
    }
}

/// Which scenario-authored spatiotemporal constraints a run applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StSelection {
    None,
    TMin,
    TMinTMax,
    All,
}

impl StSelection {
    pub fn keeps(&self, kind: StKindConfig) -> bool {
        match self {
            StSelection::None => false,
            StSelection::TMin => kind == StKindConfig::Min,
            StSelection::TMinTMax | StSelection::All => true,
        }
    }
}

impl std::str::FromStr for StSelection {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "none" => Ok(StSelection::None),
            "tmin" => Ok(StSelection::TMin),
            "tmin_tmax" => Ok(StSelection::TMinTMax),
            "all" => Ok(StSelection::All),
            other => Err(format!(
                "unknown constraint set '{other}' (expected none|tmin|tmin_tmax|all)"
            )),
        }
    }
}

/// A complete scenario document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub params: Params,
    #[serde(default)]
    pub solver: SolverConfig,
    pub reference: ReferenceConfig,
    #[serde(default)]
    pub speed_limits: SpeedLimits,
    #[serde(default)]
    pub actors: Vec<ActorConfig>,
    #[serde(default)]
    pub signals: Vec<SignalConfig>,
    #[serde(default)]
    pub spatiotemporal: Vec<StConfig>,
    #[serde(default)]
    pub ego: EgoConfig,
}

impl Scenario {
    /// Parse and validate a scenario document.
    pub fn from_json(text: &str) -> Result<Self> {
        let scenario: Scenario =
            serde_json::from_str(text).map_err(|e| Error::ScenarioParse {
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            })?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Scenario(msg));

        if self.grid.delta_s <= 0.0 {
            return fail("grid.delta_s must be positive".into());
        }
        if self.grid.window_len() < 2 {
            return fail("grid.horizon must cover at least two samples".into());
        }
        if self.reference.points.len() < 2 {
            return fail("reference.points needs at least 2 points".into());
        }
        if self.reference.noise_sigma < 0.0 {
            return fail("reference.noise_sigma must be non-negative".into());
        }

        let p = &self.params;
        if p.v_min <= 0.0
            || p.a_min >= 0.0
            || p.a_max <= 0.0
            || p.a_lat_hat <= 0.0
            || p.j_min >= 0.0
            || p.j_max <= 0.0
            || p.kappa_min >= 0.0
            || p.kappa_max <= 0.0
            || p.w_d <= 0.0
            || p.w_kappa <= 0.0
            || p.w_v <= 0.0
            || p.w_a <= 0.0
            || p.alpha < 0.0
            || p.beta <= 0.0
            || p.beta >= 1.0
        {
            return fail("params out of range".into());
        }

        let s = &self.solver;
        if s.n_iters < 1
            || s.tol <= 0.0
            || s.mu_default <= 0.0
            || s.mu_tmax <= 0.0
            || s.lambda_max_default <= 0.0
            || s.lambda_max_tmax <= 0.0
        {
            return fail("solver config out of range".into());
        }

        let extent = polyline_length(&self.reference.points);
        for seg in &self.speed_limits.segments {
            if seg.from >= seg.to || seg.v < 0.0 {
                return fail(format!("invalid speed segment {seg:?}"));
            }
        }
        if self.speed_limits.default <= 0.0 {
            return fail("speed_limits.default must be positive".into());
        }
        for sig in &self.signals {
            if sig.s < 0.0 || sig.s > extent {
                return fail(format!("signal at s={} outside map extent {extent:.1}", sig.s));
            }
            for r in &sig.red {
                if r.from < 0.0 || r.until.map_or(false, |u| u <= r.from) {
                    return fail(format!("invalid red interval {r:?}"));
                }
            }
        }
        for st in &self.spatiotemporal {
            if st.s < 0.0 || st.s > extent {
                return fail(format!(
                    "spatiotemporal constraint at s={} outside map extent {extent:.1}",
                    st.s
                ));
            }
            if st.t <= 0.0 {
                return fail("spatiotemporal bound times must be positive".into());
            }
            if st.alpha.map_or(false, |a| a < 0.0) {
                return fail("spatiotemporal alpha must be non-negative".into());
            }
            if st.beta.map_or(false, |b| b <= 0.0 || b >= 1.0) {
                return fail("spatiotemporal beta must lie in (0, 1)".into());
            }
        }
        for a in &self.actors {
            if a.v < 0.0 || a.spawn_time < 0.0 {
                return fail(format!("invalid actor {a:?}"));
            }
            if let Some(track) = &a.track {
                if track.len() < 2 {
                    return fail("actor track needs at least 2 points".into());
                }
            }
        }
        if self.ego.v < 0.0 || self.ego.s < 0.0 {
            return fail("ego start must have non-negative s and v".into());
        }
        if self.ego.d_safe_base <= 0.0 || self.ego.d_safe_headway < 0.0 {
            return fail("ego safety distance parameters out of range".into());
        }
        Ok(())
    }

    /// Resampled global reference, noise applied with the scenario (or
    /// overridden) seed, extended past the map end so every planning window
    /// is full-length.
    pub fn build_reference(&self, seed_override: Option<u64>) -> Result<ReferencePolyline> {
        let mut points = self.reference.points.clone();
        if self.reference.noise_sigma > 0.0 {
            let seed = seed_override.unwrap_or(self.reference.seed);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let normal = Normal::new(0.0, self.reference.noise_sigma).expect("sigma checked");
            for p in &mut points {
                p[0] += normal.sample(&mut rng);
                p[1] += normal.sample(&mut rng);
            }
        }
        let mut refline = ReferencePolyline::resample(&points, 0.0, self.grid.delta_s)?;
        refline.extend_straight(self.grid.horizon + 10.0);
        Ok(refline)
    }

    /// Spatiotemporal constraints kept by `selection`, with per-constraint
    /// shaping parameters defaulted from the params section. Times stay in
    /// absolute scenario time.
    pub fn selected_spatiotemporal(&self, selection: StSelection) -> Vec<SpatioTemporalConstraint> {
        self.spatiotemporal
            .iter()
            .filter(|c| selection.keeps(c.kind))
            .map(|c| SpatioTemporalConstraint {
                kind: match c.kind {
                    StKindConfig::Min => StKind::Min {
                        alpha: c.alpha.unwrap_or(self.params.alpha),
                        beta: c.beta.unwrap_or(self.params.beta),
                    },
                    StKindConfig::Max => StKind::Max,
                },
                s: c.s,
                t: c.t,
            })
            .collect()
    }

    pub fn ilqr_settings(&self) -> IlqrSettings {
        IlqrSettings {
            max_iterations: self.solver.n_iters,
            tolerance: self.solver.tol,
            ..IlqrSettings::default()
        }
    }

    pub fn path_smoother(&self) -> PathSmoother {
        PathSmoother {
            weights: PathWeights {
                w_d: self.params.w_d,
                w_kappa: self.params.w_kappa,
            },
            kappa_min: self.params.kappa_min,
            kappa_max: self.params.kappa_max,
            mu: self.solver.mu_default,
            lambda_max: self.solver.lambda_max_default,
            settings: self.ilqr_settings(),
        }
    }

    pub fn profile_weights(&self) -> ProfileWeights {
        ProfileWeights {
            w_v: self.params.w_v,
            w_a: self.params.w_a,
            v_min: self.params.v_min,
            a_min: self.params.a_min,
            a_max: self.params.a_max,
            j_min: self.params.j_min,
            j_max: self.params.j_max,
        }
    }

    pub fn profile_optimizer(&self) -> ProfileOptimizer {
        ProfileOptimizer {
            weights: self.profile_weights(),
            settings: self.ilqr_settings(),
            mu_default: self.solver.mu_default,
            mu_tmax: self.solver.mu_tmax,
            lambda_max_default: self.solver.lambda_max_default,
            lambda_max_tmax: self.solver.lambda_max_tmax,
        }
    }
}

fn polyline_length(points: &[[f64; 2]]) -> f64 {
    points
        .windows(2)
        .map(|w| ((w[1][0] - w[0][0]).powi(2) + (w[1][1] - w[0][1]).powi(2)).sqrt())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{ "reference": { "points": [[0.0, 0.0], [200.0, 0.0]] } }"#;

    #[test]
    fn defaults_match_evaluation_parameters() {
        let sc = Scenario::from_json(MINIMAL).unwrap();
        let p = sc.params;
        assert_eq!(p.v_min, 1.0);
        assert_eq!(p.a_min, -2.5);
        assert_eq!(p.a_max, 2.5);
        assert_eq!(p.a_lat_hat, 2.5);
        assert_eq!(p.j_min, -1.5);
        assert_eq!(p.j_max, 1.5);
        assert_eq!(p.kappa_min, -3.0);
        assert_eq!(p.kappa_max, 3.0);
        assert_eq!(p.w_d, 1.0);
        assert_eq!(p.w_kappa, 20.0);
        assert_eq!(p.w_v, 0.1);
        assert_eq!(p.w_a, 1.0);
        assert_eq!(p.alpha, 10.0);
        assert_eq!(p.beta, 5e-3);
        assert_eq!(sc.solver.mu_default, 1e2);
        assert_eq!(sc.solver.mu_tmax, 1e3);
        assert_eq!(sc.solver.lambda_max_default, 1e2);
        assert_eq!(sc.solver.lambda_max_tmax, 1e3);
        assert_eq!(sc.solver.n_iters, 5);
        assert_eq!(sc.solver.tol, 1e-6);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = r#"{ "reference": { "points": [[0,0],[1,0]] }, "sprocket": 3 }"#;
        let err = Scenario::from_json(text).unwrap_err();
        assert!(matches!(err, Error::ScenarioParse { .. }));
    }

    #[test]
    fn parse_errors_carry_line_and_column() {
        let text = "{\n  \"reference\": { \"points\": [[0,0],[1,0]] },\n  oops\n}";
        match Scenario::from_json(text) {
            Err(Error::ScenarioParse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn round_trip_preserves_configuration() {
        let text = r#"{
            "grid": { "delta_s": 0.5, "horizon": 100.0 },
            "reference": { "points": [[0,0],[50,0],[120,30]], "noise_sigma": 0.1, "seed": 7 },
            "speed_limits": { "default": 11.11, "segments": [{ "from": 0.0, "to": 60.0, "v": 8.33 }] },
            "actors": [{ "s0": 20.0, "v": 5.0, "spawn_time": 1.5 }],
            "signals": [{ "s": 80.0, "red": [{ "from": 14.0 }] }],
            "spatiotemporal": [
                { "kind": "min", "s": 44.5, "t": 5.75 },
                { "kind": "max", "s": 114.5, "t": 14.0 }
            ],
            "ego": { "s": 0.0, "v": 10.0, "d_safe_base": 6.0, "d_safe_headway": 1.0 }
        }"#;
        let sc = Scenario::from_json(text).unwrap();
        let serialized = serde_json::to_string_pretty(&sc).unwrap();
        let reparsed = Scenario::from_json(&serialized).unwrap();
        assert_eq!(sc, reparsed);
    }

    #[test]
    fn selection_filters_constraint_kinds() {
        let text = r#"{
            "reference": { "points": [[0,0],[200,0]] },
            "spatiotemporal": [
                { "kind": "min", "s": 44.5, "t": 5.75 },
                { "kind": "max", "s": 114.5, "t": 14.0 }
            ]
        }"#;
        let sc = Scenario::from_json(text).unwrap();
        assert_eq!(sc.selected_spatiotemporal(StSelection::None).len(), 0);
        let tmin = sc.selected_spatiotemporal(StSelection::TMin);
        assert_eq!(tmin.len(), 1);
        assert!(matches!(tmin[0].kind, StKind::Min { .. }));
        assert_eq!(sc.selected_spatiotemporal(StSelection::TMinTMax).len(), 2);
    }

    #[test]
    fn noise_is_seed_deterministic() {
        let text = r#"{ "reference": { "points": [[0,0],[100,0],[200,0]], "noise_sigma": 0.1, "seed": 42 } }"#;
        let sc = Scenario::from_json(text).unwrap();
        let a = sc.build_reference(None).unwrap();
        let b = sc.build_reference(None).unwrap();
        assert_eq!(a.xs, b.xs);
        assert_eq!(a.ys, b.ys);
        let c = sc.build_reference(Some(43)).unwrap();
        assert_ne!(a.ys, c.ys);
    }
}
