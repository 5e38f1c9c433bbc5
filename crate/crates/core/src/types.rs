//! Shared vocabulary: solver configuration, swarm snapshots and run records.

use std::fmt;

use crate::error::{Error, Result};
use crate::point::Point;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StepMode {
    /// One global step size for every agent at every iteration.
    #[default]
    Fixed,
    /// Per-agent Armijo backtracking with steepest-descent fallback.
    Backtracking,
}

impl StepMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            StepMode::Fixed => "fixed",
            StepMode::Backtracking => "backtracking",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BacktrackingParams {
    /// First trial step. `None` starts from the configured step size.
    pub initial_step: Option<f64>,
    /// Factor in (0, 1) applied after each rejected trial.
    pub shrink: f64,
    /// Sufficient-decrease constant in (0, 1).
    pub armijo_c: f64,
    pub max_halvings: u32,
}

impl Default for BacktrackingParams {
    fn default() -> Self {
        BacktrackingParams {
            initial_step: None,
            shrink: 0.5,
            armijo_c: 1e-4,
            max_halvings: 40,
        }
    }
}

impl BacktrackingParams {
    pub fn validate(&self) -> Result<()> {
        if let Some(a) = self.initial_step {
            if !(a.is_finite() && a > 0.0) {
                return Err(Error::config(format!(
                    "initial step must be positive, got {a}"
                )));
            }
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return Err(Error::config(format!(
                "shrink factor must lie in (0, 1), got {}",
                self.shrink
            )));
        }
        if !(self.armijo_c > 0.0 && self.armijo_c < 1.0) {
            return Err(Error::config(format!(
                "Armijo constant must lie in (0, 1), got {}",
                self.armijo_c
            )));
        }
        if self.max_halvings == 0 {
            return Err(Error::config("max halvings must be at least 1"));
        }
        Ok(())
    }
}

/// Every parameter of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub step_size: f64,
    pub protocol_factor: f64,
    /// Consensus threshold on the largest pairwise agent distance.
    pub precision: f64,
    pub max_iterations: u64,
    pub initial_points: Vec<Point>,
    pub step_mode: StepMode,
    pub backtracking: BacktrackingParams,
    /// Direction-norm threshold for stall detection; `None` disables it.
    pub stall_tolerance: Option<f64>,
}

impl SolverConfig {
    pub const DEFAULT_STEP_SIZE: f64 = 0.1;
    pub const DEFAULT_PROTOCOL_FACTOR: f64 = 0.005;
    pub const DEFAULT_PRECISION: f64 = 1e-8;
    pub const DEFAULT_MAX_ITERATIONS: u64 = 10_000;

    /// Default parameters around the given starting agents.
    pub fn new(initial_points: Vec<Point>) -> Self {
        SolverConfig {
            step_size: Self::DEFAULT_STEP_SIZE,
            protocol_factor: Self::DEFAULT_PROTOCOL_FACTOR,
            precision: Self::DEFAULT_PRECISION,
            max_iterations: Self::DEFAULT_MAX_ITERATIONS,
            initial_points,
            step_mode: StepMode::Fixed,
            backtracking: BacktrackingParams::default(),
            stall_tolerance: None,
        }
    }

    pub fn with_step_size(mut self, beta: f64) -> Self {
        self.step_size = beta;
        self
    }

    pub fn with_protocol_factor(mut self, lambda: f64) -> Self {
        self.protocol_factor = lambda;
        self
    }

    pub fn with_precision(mut self, xi: f64) -> Self {
        self.precision = xi;
        self
    }

    pub fn with_max_iterations(mut self, n: u64) -> Self {
        self.max_iterations = n;
        self
    }

    pub fn with_step_mode(mut self, mode: StepMode) -> Self {
        self.step_mode = mode;
        self
    }

    pub fn with_backtracking(mut self, params: BacktrackingParams) -> Self {
        self.backtracking = params;
        self
    }

    pub fn with_stall_tolerance(mut self, tol: Option<f64>) -> Self {
        self.stall_tolerance = tol;
        self
    }

    pub fn agents(&self) -> usize {
        self.initial_points.len()
    }

    pub fn dimension(&self) -> usize {
        self.initial_points.first().map_or(0, Point::dim)
    }

    pub fn initial_step(&self) -> f64 {
        self.backtracking.initial_step.unwrap_or(self.step_size)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step_size.is_finite() && self.step_size > 0.0) {
            return Err(Error::config(format!(
                "step size must be positive, got {}",
                self.step_size
            )));
        }
        if !(0.0..=1.0).contains(&self.protocol_factor) {
            return Err(Error::config(format!(
                "protocol factor must lie in [0, 1], got {}",
                self.protocol_factor
            )));
        }
        if !(self.precision.is_finite() && self.precision > 0.0) {
            return Err(Error::config(format!(
                "precision must be positive, got {}",
                self.precision
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::config("iteration budget must be at least 1"));
        }
        if let Some(tol) = self.stall_tolerance {
            if !(tol.is_finite() && tol >= 0.0) {
                return Err(Error::config(format!(
                    "stall tolerance must be non-negative, got {tol}"
                )));
            }
        }
        self.backtracking.validate()?;
        let Some(first) = self.initial_points.first() else {
            return Err(Error::config("at least one agent is required"));
        };
        for p in &self.initial_points[1..] {
            if p.dim() != first.dim() {
                return Err(Error::Dimension {
                    expected: first.dim(),
                    found: p.dim(),
                });
            }
        }
        Ok(())
    }
}

/// Agent positions at iteration `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct SwarmState {
    positions: Vec<Point>,
    iteration: u64,
}

impl SwarmState {
    pub fn new(positions: Vec<Point>, iteration: u64) -> Result<Self> {
        let Some(first) = positions.first() else {
            return Err(Error::config("swarm needs at least one agent"));
        };
        let dim = first.dim();
        if let Some(p) = positions.iter().find(|p| p.dim() != dim) {
            return Err(Error::Dimension {
                expected: dim,
                found: p.dim(),
            });
        }
        Ok(SwarmState {
            positions,
            iteration,
        })
    }

    /// Swarm at iteration 0.
    pub fn initial(positions: Vec<Point>) -> Result<Self> {
        Self::new(positions, 0)
    }

    pub fn positions(&self) -> &[Point] {
        &self.positions
    }

    pub fn iteration(&self) -> u64 {
        self.iteration
    }

    pub fn agents(&self) -> usize {
        self.positions.len()
    }

    pub fn dimension(&self) -> usize {
        self.positions[0].dim()
    }
}

/// Descent directions for every agent, all computed from one snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionSet {
    pub directions: Vec<Point>,
    pub computed_at: u64,
}

impl DirectionSet {
    pub fn max_norm(&self) -> f64 {
        self.directions.iter().map(Point::norm).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub iteration: u64,
    pub positions: Vec<Point>,
    pub values: Vec<f64>,
    pub best_value: f64,
    pub max_pairwise_distance: f64,
    /// Step lengths that produced these positions (zeros at iteration 0).
    pub step_lengths: Vec<f64>,
    /// Agents whose protocol direction was replaced by steepest descent.
    pub fallbacks: Vec<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Consensus,
    IterationBudget,
    Stalled,
    Diverged,
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            StopReason::Consensus => "consensus",
            StopReason::IterationBudget => "iteration budget",
            StopReason::Stalled => "stalled",
            StopReason::Diverged => "diverged",
        };
        f.write_str(s)
    }
}

/// Where a diverged run broke down.
#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceInfo {
    /// Zero-based index of the failing agent, if attributable.
    pub agent: Option<usize>,
    pub last_finite_iteration: u64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub final_swarm: SwarmState,
    /// Zero-based index of the best final agent.
    pub best_agent_index: usize,
    pub best_point: Point,
    pub best_value: f64,
    pub stop_reason: StopReason,
    pub best_ever_point: Point,
    pub best_ever_value: f64,
    pub trace: Vec<IterationRecord>,
    pub divergence: Option<DivergenceInfo>,
}

impl RunResult {
    /// Number of update steps executed.
    pub fn iterations(&self) -> u64 {
        self.final_swarm.iteration()
    }

    /// First iteration whose best agent value is at or below `threshold`.
    pub fn iterations_to_reach(&self, threshold: f64) -> Option<u64> {
        self.trace
            .iter()
            .find(|r| r.best_value <= threshold)
            .map(|r| r.iteration)
    }
}
