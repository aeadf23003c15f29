/// Wheelbase of the simulated vehicle in meters.
pub const WHEELBASE: f64 = 2.9;

/// Ego vehicle state: pose, speed, and arc-length position on the reference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EgoState {
    pub x: f64,
    pub y: f64,
    /// Heading in radians.
    pub psi: f64,
    /// Speed in m/s, never negative.
    pub v: f64,
    /// Arc-length position on the global reference line.
    pub s: f64,
}

/// One RK4 step of the kinematic bicycle model
/// (`x' = v cos psi`, `y' = v sin psi`, `psi' = v tan(steer) / L`, `v' = a`).
/// The speed is floored at zero; the arc position is maintained separately by
/// projection onto the reference.
pub fn step_vehicle(ego: &EgoState, accel: f64, steer: f64, dt: f64) -> EgoState {
    assert!(dt > 0.0);
    let f = |st: [f64; 4]| -> [f64; 4] {
        let v = st[3];
        [
            v * st[2].cos(),
            v * st[2].sin(),
            v * steer.tan() / WHEELBASE,
            accel,
        ]
    };
    let y0 = [ego.x, ego.y, ego.psi, ego.v];
    let k1 = f(y0);
    let k2 = f(add(y0, scale(k1, dt / 2.0)));
    let k3 = f(add(y0, scale(k2, dt / 2.0)));
    let k4 = f(add(y0, scale(k3, dt)));
    let mut y = [0.0; 4];
    for i in 0..4 {
        y[i] = y0[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    EgoState {
        x: y[0],
        y: y[1],
        psi: y[2],
        v: y[3].max(0.0),
        s: ego.s,
    }
}

fn add(a: [f64; 4], b: [f64; 4]) -> [f64; 4] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]]
}

fn scale(a: [f64; 4], c: f64) -> [f64; 4] {
    [a[0] * c, a[1] * c, a[2] * c, a[3] * c]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ego(v: f64) -> EgoState {
        EgoState {
            x: 0.0,
            y: 0.0,
            psi: 0.0,
            v,
            s: 0.0,
        }
    }

    #[test]
    fn standstill_with_zero_inputs_is_fixed_point() {
        let next = step_vehicle(&ego(0.0), 0.0, 0.0, 0.01);
        assert_eq!(next, ego(0.0));
    }

    #[test]
    fn straight_constant_acceleration_matches_closed_form() {
        let next = step_vehicle(&ego(10.0), 2.0, 0.0, 0.01);
        assert!((next.v - 10.02).abs() < 1e-12);
        assert!((next.x - 0.1001).abs() < 1e-9);
        assert_eq!(next.y, 0.0);
        assert_eq!(next.psi, 0.0);
    }

    #[test]
    fn zero_steer_keeps_heading() {
        let start = EgoState {
            psi: 0.7,
            ..ego(8.0)
        };
        let next = step_vehicle(&start, -1.0, 0.0, 0.01);
        assert_eq!(next.psi, 0.7);
    }

    #[test]
    fn braking_never_produces_negative_speed() {
        let next = step_vehicle(&ego(0.01), -2.5, 0.0, 0.01);
        assert!(next.v >= 0.0);
    }
}
