//! Uniform space and time grids.

use crate::error::{Error, Result};

/// Uniform spatial grid on `[x_lo, x_hi]` with `n_cells` cells
/// (`n_cells + 1` nodes).
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialGrid {
    pub x_lo: f64,
    pub x_hi: f64,
    pub n_cells: usize,
}

impl SpatialGrid {
    pub fn new(x_lo: f64, x_hi: f64, n_cells: usize) -> Result<Self> {
        if !(x_lo < x_hi) {
            return Err(Error::BadInput(format!(
                "spatial grid needs x_lo < x_hi, got [{x_lo}, {x_hi}]"
            )));
        }
        if n_cells == 0 {
            return Err(Error::BadInput("spatial grid needs n_cells >= 1".into()));
        }
        Ok(Self { x_lo, x_hi, n_cells })
    }

    /// Number of nodes, `n_cells + 1`.
    pub fn n_nodes(&self) -> usize {
        self.n_cells + 1
    }

    /// Cell width.
    pub fn dx(&self) -> f64 {
        (self.x_hi - self.x_lo) / self.n_cells as f64
    }

    /// Coordinate of node `i`.
    pub fn node(&self, i: usize) -> f64 {
        self.x_lo + i as f64 * self.dx()
    }

    /// All node coordinates.
    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_nodes()).map(|i| self.node(i)).collect()
    }

    /// Index of the node coinciding with `x`, if any.
    pub fn node_index_of(&self, x: f64) -> Option<usize> {
        let s = (x - self.x_lo) / self.dx();
        let i = s.round();
        if i < 0.0 || i > self.n_cells as f64 {
            return None;
        }
        if (s - i).abs() <= 1e-8 {
            Some(i as usize)
        } else {
            None
        }
    }
}

/// Uniform time grid on `[0, t_final]` with `n_steps` steps.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    pub t_final: f64,
    pub n_steps: usize,
}

impl TimeGrid {
    pub fn new(t_final: f64, n_steps: usize) -> Result<Self> {
        if !(t_final > 0.0) {
            return Err(Error::BadInput(format!(
                "time grid needs t_final > 0, got {t_final}"
            )));
        }
        if n_steps == 0 {
            return Err(Error::BadInput("time grid needs n_steps >= 1".into()));
        }
        Ok(Self { t_final, n_steps })
    }

    pub fn dt(&self) -> f64 {
        self.t_final / self.n_steps as f64
    }

    /// Time of step `n`.
    pub fn time(&self, n: usize) -> f64 {
        n as f64 * self.dt()
    }

    /// All step times, `t_0 = 0` through `t_{n_steps} = t_final`.
    pub fn times(&self) -> Vec<f64> {
        (0..=self.n_steps).map(|n| self.time(n)).collect()
    }
}
