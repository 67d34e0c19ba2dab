//! Space-time solution fields on tensor grids.

use crate::error::{Error, Result};
use crate::grid::{SpatialGrid, TimeGrid};

/// Solution values on the tensor grid `(x_i, t_n)`, stored step-major so a
/// time slice is contiguous.
#[derive(Debug, Clone)]
pub struct SpaceTimeField {
    pub grid: SpatialGrid,
    pub times: TimeGrid,
    values: Vec<f64>, // (n_steps + 1) slices of n_nodes values
}

impl SpaceTimeField {
    pub fn new(grid: SpatialGrid, times: TimeGrid, values: Vec<f64>) -> Result<Self> {
        let expected = grid.n_nodes() * (times.n_steps + 1);
        if values.len() != expected {
            return Err(Error::BadInput(format!(
                "field needs {expected} values, got {}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::BadInput("field contains non-finite values".into()));
        }
        Ok(Self { grid, times, values })
    }

    /// Value at node `i`, step `n`.
    pub fn at(&self, i: usize, n: usize) -> f64 {
        self.values[n * self.grid.n_nodes() + i]
    }

    /// Nodal profile at step `n`.
    pub fn step(&self, n: usize) -> &[f64] {
        let w = self.grid.n_nodes();
        &self.values[n * w..(n + 1) * w]
    }

    /// Profile at the final time.
    pub fn final_profile(&self) -> &[f64] {
        self.step(self.times.n_steps)
    }

    /// Time trace at node `i`.
    pub fn trace_at_node(&self, i: usize) -> Vec<f64> {
        (0..=self.times.n_steps).map(|n| self.at(i, n)).collect()
    }

    /// Extremes of the field over all of space-time.
    pub fn value_range(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &v in &self.values {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        (lo, hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_field() -> SpaceTimeField {
        let grid = SpatialGrid::new(0.0, 1.0, 2).unwrap();
        let times = TimeGrid::new(1.0, 1).unwrap();
        // step 0: [0, 1, 2], step 1: [3, 4, 5]
        SpaceTimeField::new(grid, times, vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0]).unwrap()
    }

    #[test]
    fn indexing_is_step_major() {
        let f = small_field();
        assert_eq!(f.at(1, 0), 1.0);
        assert_eq!(f.at(0, 1), 3.0);
        assert_eq!(f.final_profile(), &[3.0, 4.0, 5.0]);
        assert_eq!(f.trace_at_node(2), vec![2.0, 5.0]);
        assert_eq!(f.value_range(), (0.0, 5.0));
    }

    #[test]
    fn rejects_bad_shapes_and_nan() {
        let grid = SpatialGrid::new(0.0, 1.0, 2).unwrap();
        let times = TimeGrid::new(1.0, 1).unwrap();
        assert!(SpaceTimeField::new(grid.clone(), times.clone(), vec![0.0; 5]).is_err());
        let mut vals = vec![0.0; 6];
        vals[3] = f64::NAN;
        assert!(SpaceTimeField::new(grid, times, vals).is_err());
    }
}
