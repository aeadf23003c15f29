use crate::grid::SpatialGrid;

/// Sampled velocity-limit function `v_lim(s)` on the shared grid.
///
/// Built from the legal limit and curvature, then tightened by interaction
/// constraints. All mutations go through minimum updates, so values never
/// increase.
#[derive(Debug, Clone)]
pub struct LimitProfile {
    pub grid: SpatialGrid,
    pub values: Vec<f64>,
}

impl LimitProfile {
    pub fn constant(grid: SpatialGrid, v: f64) -> Self {
        assert!(v >= 0.0 && v.is_finite());
        Self {
            grid,
            values: vec![v; grid.len],
        }
    }

    /// Static interaction at `s_o`: `v_lim(s_o) <- min(v_lim(s_o), v_o)` at
    /// the nearest grid sample. `v_o = 0` encodes a stop. Locations outside
    /// the horizon are a no-op.
    pub fn apply_static(&mut self, s_o: f64, v_o: f64) {
        debug_assert!(v_o >= 0.0);
        if let Some(k) = self.grid.snap(s_o) {
            self.values[k] = self.values[k].min(v_o);
        }
    }

    /// Dynamic interaction at `s_o` with speed `v_o`: over
    /// `s in [s_o - d_safe, s_o]` the limit ramps linearly from `v_o` at the
    /// start of the safety distance down to standstill at the obstacle. The
    /// interval is clipped to the horizon.
    pub fn apply_dynamic(&mut self, s_o: f64, v_o: f64, d_safe: f64) {
        debug_assert!(v_o >= 0.0);
        assert!(d_safe > 0.0, "safety distance must be positive");
        let lo = s_o - d_safe;
        for k in 0..self.grid.len {
            let s = self.grid.s(k);
            if s < lo - 1e-9 || s > s_o + 1e-9 {
                continue;
            }
            let ramp = v_o * ((s_o - s) / d_safe).min(1.0).max(0.0);
            self.values[k] = self.values[k].min(ramp);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> SpatialGrid {
        SpatialGrid::new(0.0, 0.5, 251) // 0 .. 125 m
    }

    #[test]
    fn static_stop_hits_single_sample() {
        let mut lim = LimitProfile::constant(grid(), 13.9);
        lim.apply_static(100.0, 0.0);
        let k = lim.grid.snap(100.0).unwrap();
        assert_eq!(lim.values[k], 0.0);
        assert!(lim
            .values
            .iter()
            .enumerate()
            .all(|(i, &v)| i == k || v == 13.9));
    }

    #[test]
    fn static_min_keeps_smaller_value() {
        let mut lim = LimitProfile::constant(grid(), 13.9);
        lim.apply_static(50.0, 20.0);
        assert!(lim.values.iter().all(|&v| v == 13.9));
        lim.apply_static(50.0, 5.0);
        assert_eq!(lim.values[lim.grid.snap(50.0).unwrap()], 5.0);
    }

    #[test]
    fn dynamic_ramp_endpoints_and_midpoint() {
        let mut lim = LimitProfile::constant(grid(), 13.9);
        lim.apply_dynamic(30.0, 5.0, 15.0);
        let at = |s: f64| lim.values[lim.grid.snap(s).unwrap()];
        assert!((at(15.0) - 5.0).abs() < 1e-12);
        assert!((at(22.5) - 2.5).abs() < 1e-12);
        assert!((at(30.0) - 0.0).abs() < 1e-12);
        // outside the interval the limit is untouched
        assert_eq!(at(14.0), 13.9);
        assert_eq!(at(31.0), 13.9);
    }

    #[test]
    fn dynamic_zero_speed_zeroes_interval() {
        let mut lim = LimitProfile::constant(grid(), 13.9);
        lim.apply_dynamic(30.0, 0.0, 15.0);
        for k in 0..lim.grid.len {
            let s = lim.grid.s(k);
            if (15.0..=30.0).contains(&s) {
                assert_eq!(lim.values[k], 0.0);
            } else {
                assert_eq!(lim.values[k], 13.9);
            }
        }
    }

    #[test]
    fn obstacle_behind_horizon_is_noop() {
        let mut lim = LimitProfile::constant(grid(), 13.9);
        lim.apply_dynamic(-5.0, 5.0, 15.0);
        assert!(lim.values.iter().all(|&v| v == 13.9));
        lim.apply_static(-1.0, 0.0);
        assert!(lim.values.iter().all(|&v| v == 13.9));
    }
}
