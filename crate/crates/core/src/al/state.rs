/// Lagrange-multiplier estimates, one row per grid sample and one column per
/// constraint. Entries stay inside `[0, lambda_max_i]` under every operation.
#[derive(Debug, Clone, PartialEq)]
pub struct ALState {
    values: Vec<f64>,
    horizon: usize,
    constraints: usize,
}

impl ALState {
    pub fn zeros(horizon: usize, constraints: usize) -> Self {
        Self {
            values: vec![0.0; horizon * constraints],
            horizon,
            constraints,
        }
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn constraint_count(&self) -> usize {
        self.constraints
    }

    pub fn get(&self, k: usize, i: usize) -> f64 {
        self.values[k * self.constraints + i]
    }

    pub fn set(&mut self, k: usize, i: usize, value: f64) {
        self.values[k * self.constraints + i] = value;
    }

    /// Largest multiplier currently stored.
    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().copied()
    }
}
