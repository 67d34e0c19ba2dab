//! Forward-problem description: domain, horizon, coefficient, source,
//! boundary conditions and initial profile.

use std::sync::Arc;

use crate::coefficient::CoefficientFn;
use crate::error::{Error, Result};
use crate::grid::{SpatialGrid, TimeGrid};

/// Time-dependent boundary data.
pub type TimeFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Source term `r(x, t, u)`.
pub type SourceFn = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;

/// Wrap a closure as boundary data.
pub fn time_fn(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> TimeFn {
    Arc::new(f)
}

/// Wrap a closure as a source term.
pub fn source_fn(f: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static) -> SourceFn {
    Arc::new(f)
}

/// A zero source term.
pub fn zero_source() -> SourceFn {
    Arc::new(|_, _, _| 0.0)
}

/// Boundary condition at one end of the interval. The impedance form
/// prescribes the flux relation `a(u) ∂ν u + γ u = b(t)` with the outward
/// normal derivative `∂ν`; the Dirichlet form prescribes `u = d(t)`.
#[derive(Clone)]
pub enum BoundaryCondition {
    Impedance { gamma: f64, flux: TimeFn },
    Dirichlet { trace: TimeFn },
}

impl BoundaryCondition {
    pub fn impedance(gamma: f64, flux: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::Impedance { gamma, flux: Arc::new(flux) }
    }

    pub fn dirichlet(trace: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::Dirichlet { trace: Arc::new(trace) }
    }

    /// Insulated end: zero flux, zero Robin weight.
    pub fn insulated() -> Self {
        Self::Impedance { gamma: 0.0, flux: Arc::new(|_| 0.0) }
    }

    pub fn is_dirichlet(&self) -> bool {
        matches!(self, Self::Dirichlet { .. })
    }
}

impl std::fmt::Debug for BoundaryCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Impedance { gamma, .. } => write!(f, "Impedance {{ gamma: {gamma} }}"),
            Self::Dirichlet { .. } => write!(f, "Dirichlet"),
        }
    }
}

/// Everything the forward solver needs except the coefficient; the
/// reconstruction schemes carry one of these and plug in each iterate.
#[derive(Clone)]
pub struct ProblemTemplate {
    pub grid: SpatialGrid,
    pub times: TimeGrid,
    pub source: SourceFn,
    pub bc_left: BoundaryCondition,
    pub bc_right: BoundaryCondition,
    pub initial: Vec<f64>,
}

impl std::fmt::Debug for ProblemTemplate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProblemTemplate")
            .field("grid", &self.grid)
            .field("times", &self.times)
            .field("bc_left", &self.bc_left)
            .field("bc_right", &self.bc_right)
            .finish_non_exhaustive()
    }
}

impl ProblemTemplate {
    pub fn with_coefficient(&self, coefficient: CoefficientFn) -> ProblemSpec {
        ProblemSpec {
            grid: self.grid.clone(),
            times: self.times.clone(),
            coefficient,
            source: self.source.clone(),
            bc_left: self.bc_left.clone(),
            bc_right: self.bc_right.clone(),
            initial: self.initial.clone(),
        }
    }
}

/// Complete forward-problem description.
#[derive(Clone)]
pub struct ProblemSpec {
    pub grid: SpatialGrid,
    pub times: TimeGrid,
    pub coefficient: CoefficientFn,
    pub source: SourceFn,
    pub bc_left: BoundaryCondition,
    pub bc_right: BoundaryCondition,
    /// Initial profile on the grid nodes.
    pub initial: Vec<f64>,
}

impl ProblemSpec {
    /// Check shape and compatibility invariants.
    pub fn validate(&self) -> Result<()> {
        if self.initial.len() != self.grid.n_nodes() {
            return Err(Error::BadInput(format!(
                "initial profile has {} values, grid has {} nodes",
                self.initial.len(),
                self.grid.n_nodes()
            )));
        }
        if self.initial.iter().any(|v| !v.is_finite()) {
            return Err(Error::BadInput("initial profile must be finite".into()));
        }
        // When both ends are Dirichlet the trace must match the initial
        // profile at t = 0.
        if let (BoundaryCondition::Dirichlet { trace: dl }, BoundaryCondition::Dirichlet { trace: dr }) =
            (&self.bc_left, &self.bc_right)
        {
            let scale = 1.0 + self.initial.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let el = (dl(0.0) - self.initial[0]).abs();
            let er = (dr(0.0) - self.initial[self.initial.len() - 1]).abs();
            if el > 1e-6 * scale || er > 1e-6 * scale {
                return Err(Error::BadInput(format!(
                    "Dirichlet data at t = 0 disagrees with the initial profile \
                     (left gap {el:.3e}, right gap {er:.3e})"
                )));
            }
        }
        Ok(())
    }

    pub fn template(&self) -> ProblemTemplate {
        ProblemTemplate {
            grid: self.grid.clone(),
            times: self.times.clone(),
            source: self.source.clone(),
            bc_left: self.bc_left.clone(),
            bc_right: self.bc_right.clone(),
            initial: self.initial.clone(),
        }
    }
}

impl std::fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("grid", &self.grid)
            .field("times", &self.times)
            .field("bc_left", &self.bc_left)
            .field("bc_right", &self.bc_right)
            .finish_non_exhaustive()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_spec() -> ProblemSpec {
        let grid = SpatialGrid::new(0.0, 1.0, 4).unwrap();
        let times = TimeGrid::new(1.0, 4).unwrap();
        ProblemSpec {
            initial: vec![0.0; grid.n_nodes()],
            grid,
            times,
            coefficient: CoefficientFn::constant(1.0, 0.0, 1.0).unwrap(),
            source: zero_source(),
            bc_left: BoundaryCondition::dirichlet(|_| 0.0),
            bc_right: BoundaryCondition::dirichlet(|_| 0.0),
        }
    }

    #[test]
    fn validates_shapes() {
        let mut spec = base_spec();
        assert!(spec.validate().is_ok());
        spec.initial.pop();
        assert!(spec.validate().is_err());
    }

    #[test]
    fn dirichlet_initial_compatibility() {
        let mut spec = base_spec();
        spec.bc_right = BoundaryCondition::dirichlet(|_| 0.5);
        assert!(spec.validate().is_err());
        // A single Dirichlet side is not checked against u0.
        spec.bc_left = BoundaryCondition::insulated();
        assert!(spec.validate().is_ok());
    }
}
