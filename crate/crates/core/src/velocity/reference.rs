use crate::grid::SpatialGrid;

use super::limits::LimitProfile;
use super::ProfileWeights;

/// Jerk/acceleration-limited reference profile `v_ref(s)`, the pointwise
/// minimum of the backward and forward integration sweeps. Always satisfies
/// `v_ref <= v_lim`; apart from the fixed start sample it respects the
/// acceleration and jerk limits, but it is neither foresighted nor smooth to
/// follow, which is what the profile optimization adds.
#[derive(Debug, Clone)]
pub struct ReferenceProfile {
    pub grid: SpatialGrid,
    pub values: Vec<f64>,
}

/// Advance one kinematic state `(v, a)` by exactly `delta` meters of a
/// jerk-limited speed build-up toward `v_target`: the acceleration ramps up
/// at jerk `j`, holds at `a_cap`, and ramps back down so it reaches zero
/// exactly when the speed touches the target. Read forward this is the
/// comfortable deceleration profile; the three phases are integrated in
/// closed form, which stays exact through the standstill where spatial Euler
/// steps blow up on the `1/v` singularity.
fn advance(v: f64, a: f64, j: f64, a_cap: f64, v_target: f64, delta: f64) -> (f64, f64) {
    debug_assert!(v >= 0.0 && a >= 0.0 && j > 0.0 && a_cap > 0.0 && delta > 0.0);

    let mut v = v;
    let mut a = a.min(a_cap);
    let mut remaining = delta;

    // Each iteration either exhausts the distance or crosses one phase
    // boundary (ramp-up -> hold -> ramp-down -> settled).
    for _ in 0..8 {
        if v >= v_target - 1e-12 {
            return (v.max(v_target), 0.0);
        }
        // Speed at which the ramp-down must start to land at (v_target, 0).
        let release_v = v_target - a * a / (2.0 * j);

        if a > 0.0 && v >= release_v - 1e-12 {
            // Ramp-down: a(t) = a - j t, reaching zero exactly at v_target.
            let t_end = a / j;
            let d_end = v * t_end + 0.5 * a * t_end * t_end - j * t_end.powi(3) / 6.0;
            if d_end >= remaining {
                let tau = time_to_cover(remaining, v, a, -j, t_end);
                return (v + a * tau - 0.5 * j * tau * tau, (a - j * tau).max(0.0));
            }
            v = v_target;
            a = 0.0;
            remaining -= d_end;
            continue;
        }

        if a < a_cap {
            // Ramp-up, interrupted by the cap or by the release curve
            // j t^2 + 2 a t + (v + a^2/(2j) - v_target) = 0.
            let t_cap = (a_cap - a) / j;
            let disc = 0.5 * a * a + j * (v_target - v);
            let t_rel = if disc > 0.0 {
                ((disc.sqrt() - a) / j).max(0.0)
            } else {
                0.0
            };
            let t_switch = t_cap.min(t_rel);
            let d_switch =
                v * t_switch + 0.5 * a * t_switch * t_switch + j * t_switch.powi(3) / 6.0;
            if d_switch >= remaining {
                let tau = time_to_cover(remaining, v, a, j, t_switch);
                return (v + a * tau + 0.5 * j * tau * tau, a + j * tau);
            }
            v += a * t_switch + 0.5 * j * t_switch * t_switch;
            a += j * t_switch;
            remaining -= d_switch;
            continue;
        }

        // Hold at the cap until the release curve.
        let d_rel = (release_v * release_v - v * v).max(0.0) / (2.0 * a_cap);
        if d_rel >= remaining {
            return ((v * v + 2.0 * a_cap * remaining).sqrt(), a_cap);
        }
        v = release_v;
        remaining -= d_rel;
    }
    (v, a)
}

/// First root of `v t + a t^2/2 + j t^3/6 = delta` in `(0, t_max]`, found by
/// bracketed bisection. The callers guarantee the covered distance at `t_max`
/// is at least `delta`, so the bracket always closes.
fn time_to_cover(delta: f64, v: f64, a: f64, j: f64, t_max: f64) -> f64 {
    let f = |t: f64| v * t + 0.5 * a * t * t + j * t.powi(3) / 6.0 - delta;
    if v == 0.0 && a == 0.0 && j > 0.0 {
        return (6.0 * delta / j).cbrt();
    }
    let mut hi = 1e-3_f64.min(t_max);
    while f(hi) < 0.0 && hi < t_max {
        hi = (hi * 2.0).min(t_max);
    }
    let mut lo = 0.0;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Backward sweep: starting from `(v_lim(S), 0)` at the horizon and walking
/// toward `s = 0`, the speed builds up with jerk magnitude `|j_min|` capped at
/// `|a_min|`. Read forward this is a jerk/acceleration-limited deceleration
/// ending exactly at each limit drop. Whenever the built-up speed hits the
/// limit it is clamped and the acceleration resets to zero.
pub fn backward_profile(limits: &LimitProfile, weights: &ProfileWeights) -> Vec<f64> {
    let n = limits.grid.len;
    let j = weights.j_min.abs();
    let cap = weights.a_min.abs();
    let mut v = vec![0.0; n];
    v[n - 1] = limits.values[n - 1];
    let mut a = 0.0;
    for k in (0..n - 1).rev() {
        let target = limits.values[k];
        if target <= v[k + 1] {
            // Limit drop: clamp and reset the acceleration.
            v[k] = target;
            a = 0.0;
        } else {
            let (vn, an) = advance(v[k + 1], a, j, cap, target, limits.grid.delta_s);
            v[k] = vn;
            a = an;
        }
    }
    v
}

/// Forward sweep from `(v_start, a_start)` with jerk `j_max` capped at
/// `a_max`. The start sample keeps the physical vehicle speed even when it
/// exceeds the limit; later samples are clamped like the backward sweep.
/// Seeding the sweep with the vehicle's current acceleration keeps the ramp
/// alive across replanning cycles; restarting it at zero every cycle caps the
/// closed-loop acceleration near zero.
pub fn forward_profile(
    limits: &LimitProfile,
    v_start: f64,
    a_start: f64,
    weights: &ProfileWeights,
) -> Vec<f64> {
    let n = limits.grid.len;
    let j = weights.j_max;
    let cap = weights.a_max;
    let mut v = vec![0.0; n];
    v[0] = v_start.max(0.0);
    let mut a = a_start.clamp(0.0, cap);
    for k in 0..n - 1 {
        let target = limits.values[k + 1];
        if target <= v[k] {
            v[k + 1] = target;
            a = 0.0;
        } else {
            let (vn, an) = advance(v[k], a, j, cap, target, limits.grid.delta_s);
            v[k + 1] = vn;
            a = an;
        }
    }
    v
}

/// Reference profile per the minimum rule over both sweeps, with the forward
/// sweep starting at rest acceleration.
pub fn generate_reference(
    limits: &LimitProfile,
    v_start: f64,
    weights: &ProfileWeights,
) -> ReferenceProfile {
    generate_reference_from(limits, v_start, 0.0, weights)
}

/// Reference profile whose forward sweep is seeded with the vehicle's current
/// acceleration, for use inside the replanning loop.
pub fn generate_reference_from(
    limits: &LimitProfile,
    v_start: f64,
    a_start: f64,
    weights: &ProfileWeights,
) -> ReferenceProfile {
    let bwd = backward_profile(limits, weights);
    let fwd = forward_profile(limits, v_start, a_start, weights);
    let values = bwd.iter().zip(&fwd).map(|(&b, &f)| b.min(f)).collect();
    ReferenceProfile {
        grid: limits.grid,
        values,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::SpatialGrid;

    fn grid_125() -> SpatialGrid {
        SpatialGrid::new(0.0, 0.5, 251)
    }

    #[test]
    fn constant_limit_at_speed_stays_flat() {
        let limits = LimitProfile::constant(grid_125(), 10.0);
        let r = generate_reference(&limits, 10.0, &ProfileWeights::default());
        assert!(r.values.iter().all(|&v| (v - 10.0).abs() < 1e-12));
    }

    #[test]
    fn huge_jerk_backward_matches_constant_deceleration_envelope() {
        // With effectively unlimited jerk the backward sweep reduces to the
        // constant-deceleration stopping envelope sqrt(2 |a_min| (s_stop - s)).
        let mut limits = LimitProfile::constant(grid_125(), 10.0);
        limits.apply_static(100.0, 0.0);
        let w = ProfileWeights {
            j_min: -1e3,
            j_max: 1e3,
            ..ProfileWeights::default()
        };
        let bwd = backward_profile(&limits, &w);
        for k in 0..limits.grid.len {
            let s = limits.grid.s(k);
            if (80.0..=99.0).contains(&s) {
                let expect = (2.0 * 2.5 * (100.0 - s)).sqrt().min(10.0);
                assert!(
                    (bwd[k] - expect).abs() <= 0.02 * expect,
                    "s={s}: got {} want {expect}",
                    bwd[k]
                );
            }
        }
        // At s = 80 the braking distance v^2 / (2 |a_min|) = 20 m is exactly
        // exhausted, so the profile has reattached to the limit.
        let k80 = limits.grid.snap(80.0).unwrap();
        assert!((bwd[k80] - 10.0).abs() < 1e-3);
        let k79 = limits.grid.snap(79.5).unwrap();
        assert!((bwd[k79] - 10.0).abs() < 1e-12);
    }

    #[test]
    fn reference_never_exceeds_limit() {
        let mut limits = LimitProfile::constant(grid_125(), 12.0);
        limits.apply_static(60.0, 3.0);
        limits.apply_dynamic(110.0, 5.0, 15.0);
        let r = generate_reference(&limits, 8.0, &ProfileWeights::default());
        for k in 0..r.grid.len {
            assert!(r.values[k] <= limits.values[k] + 1e-12);
        }
    }

    #[test]
    fn stopped_start_with_zero_limit_stays_zero_until_released() {
        let mut limits = LimitProfile::constant(grid_125(), 10.0);
        for k in 0..5 {
            let s = limits.grid.s(k);
            limits.apply_static(s, 0.0);
        }
        let r = generate_reference(&limits, 0.0, &ProfileWeights::default());
        for k in 0..5 {
            assert_eq!(r.values[k], 0.0);
        }
        assert!(r.values[20] > 0.0);
    }
}
