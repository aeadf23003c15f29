use serde::{Deserialize, Serialize};

/// Uniform arc-length discretization shared by all profiles and plans.
///
/// Sample `k` sits at `s0 + k * delta_s`. All profiles, trajectories, and
/// constraint locations in a planning cycle refer to the same grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpatialGrid {
    /// Arc-length position of the first sample in meters.
    pub s0: f64,
    /// Sample spacing in meters.
    pub delta_s: f64,
    /// Number of samples.
    pub len: usize,
}

impl SpatialGrid {
    pub fn new(s0: f64, delta_s: f64, len: usize) -> Self {
        assert!(delta_s > 0.0, "grid spacing must be positive");
        assert!(len >= 2, "grid needs at least two samples");
        Self { s0, delta_s, len }
    }

    /// Arc-length position of sample `k`.
    pub fn s(&self, k: usize) -> f64 {
        self.s0 + k as f64 * self.delta_s
    }

    /// Position of the last sample.
    pub fn end(&self) -> f64 {
        self.s(self.len - 1)
    }

    /// Iterator over all sample positions.
    pub fn samples(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len).map(move |k| self.s(k))
    }

    /// Nearest sample index for `s`, or `None` when `s` lies more than half a
    /// spacing outside the grid.
    pub fn snap(&self, s: f64) -> Option<usize> {
        let k = ((s - self.s0) / self.delta_s).round();
        if k < 0.0 || k > (self.len - 1) as f64 {
            return None;
        }
        Some(k as usize)
    }

    /// Linear interpolation of a sampled profile at arc position `s`.
    ///
    /// Clamps to the first/last sample outside the grid.
    pub fn interpolate(&self, values: &[f64], s: f64) -> f64 {
        debug_assert_eq!(values.len(), self.len);
        let x = (s - self.s0) / self.delta_s;
        if x <= 0.0 {
            return values[0];
        }
        let last = (self.len - 1) as f64;
        if x >= last {
            return values[self.len - 1];
        }
        let k = x.floor() as usize;
        let frac = x - k as f64;
        values[k] * (1.0 - frac) + values[k + 1] * frac
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snap_rounds_to_nearest_sample() {
        let g = SpatialGrid::new(10.0, 0.5, 5); // samples at 10.0 .. 12.0
        assert_eq!(g.snap(10.0), Some(0));
        assert_eq!(g.snap(10.24), Some(0));
        assert_eq!(g.snap(10.26), Some(1));
        assert_eq!(g.snap(12.0), Some(4));
        assert_eq!(g.snap(12.24), Some(4));
        assert_eq!(g.snap(12.3), None);
        assert_eq!(g.snap(9.7), None);
    }

    #[test]
    fn interpolation_clamps_at_ends() {
        let g = SpatialGrid::new(0.0, 1.0, 3);
        let v = [1.0, 2.0, 4.0];
        assert_eq!(g.interpolate(&v, -5.0), 1.0);
        assert_eq!(g.interpolate(&v, 0.5), 1.5);
        assert_eq!(g.interpolate(&v, 1.5), 3.0);
        assert_eq!(g.interpolate(&v, 9.0), 4.0);
    }
}
