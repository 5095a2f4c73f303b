use num_complex::Complex64;

use crate::error::{Error, Result};

/// How the initial support points are placed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitStrategy {
    LogspaceImag,
    LinspaceImag,
    UserSupplied,
}

/// Settings shared by all three fitting iterations.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationConfig {
    /// Number of poles (unstructured) or pole pairs (structured).
    pub order: usize,
    pub max_iters: usize,
    /// Convergence threshold on the largest denominator weight magnitude.
    pub weight_tol: f64,
    /// Convergence threshold on the largest relative support point movement.
    pub pole_move_tol: f64,
    pub enforce_realness: bool,
    pub enforce_stability: bool,
    pub init_strategy: InitStrategy,
}

impl Default for IterationConfig {
    fn default() -> Self {
        Self {
            order: 1,
            max_iters: 100,
            weight_tol: 1e-8,
            pole_move_tol: 1e-10,
            enforce_realness: true,
            enforce_stability: true,
            init_strategy: InitStrategy::LogspaceImag,
        }
    }
}

impl IterationConfig {
    pub fn with_order(order: usize) -> Self {
        Self {
            order,
            ..Self::default()
        }
    }

    /// Validates the configuration against the number of samples and the
    /// number of least-squares columns the method needs per unit of order.
    pub fn validate(&self, samples: usize, columns_per_order: usize) -> Result<()> {
        if self.order == 0 {
            return Err(Error::Config("order must be at least 1".into()));
        }
        if !(self.weight_tol > 0.0 && self.weight_tol.is_finite()) {
            return Err(Error::Config("weight tolerance must be positive".into()));
        }
        if !(self.pole_move_tol > 0.0 && self.pole_move_tol.is_finite()) {
            return Err(Error::Config("pole movement tolerance must be positive".into()));
        }
        let columns = columns_per_order * self.order;
        if columns > samples {
            return Err(Error::Config(format!(
                "least-squares system needs {columns} columns but only {samples} samples are available"
            )));
        }
        Ok(())
    }
}

/// Why an iteration stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// Largest denominator weight dropped below the weight tolerance.
    WeightTolerance,
    /// Support points stopped moving.
    PoleMovement,
    MaxIterations,
}

impl Termination {
    pub fn as_str(&self) -> &'static str {
        match self {
            Termination::WeightTolerance => "weight_tol",
            Termination::PoleMovement => "pole_move_tol",
            Termination::MaxIterations => "max_iters",
        }
    }
}

/// Diagnostics of one fixed-point step.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    /// 1-based iteration index.
    pub iteration: usize,
    /// Support points used by this step's least-squares problem.
    pub poles: Vec<Complex64>,
    pub max_den_weight: f64,
    /// `‖Δ(Ax − h)‖₂` of this step.
    pub ls_residual: f64,
    /// Largest pointwise relative error of the numerator-only model.
    pub max_rel_err: f64,
    /// Largest relative movement of the support points produced by this step
    /// (zero when the step converged and no update happened).
    pub max_pole_move: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub records: Vec<IterationRecord>,
    pub converged: bool,
    /// The denominator weights themselves reached the tolerance.
    pub weights_converged: bool,
    pub termination: Termination,
    /// Number of least-squares solves flagged as numerically rank deficient.
    pub rank_deficient_solves: usize,
    /// Number of weights clipped into the admissible range.
    pub clipped_weights: usize,
    /// Some measurement was zero and absolute error was used there.
    pub absolute_error_fallback: bool,
}

impl FitReport {
    pub(crate) fn empty() -> Self {
        Self {
            records: Vec::new(),
            converged: false,
            weights_converged: false,
            termination: Termination::MaxIterations,
            rank_deficient_solves: 0,
            clipped_weights: 0,
            absolute_error_fallback: false,
        }
    }

    pub fn iterations(&self) -> usize {
        self.records.len()
    }
}
