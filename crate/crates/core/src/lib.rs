//! Multi-agent gradient descent with a value-weighted communication protocol.
//!
//! A swarm of agents descends an objective together. Each agent's direction
//! blends its own negative gradient with a coupling term that pulls it toward
//! agents with lower objective values and pushes it away from agents with
//! higher ones:
//!
//! ```text
//! d_i = -[(1 - lambda) grad f(x_i) + lambda * sum_{j != i} (x_j - x_i) (f(x_j) - f(x_i))]
//! x_i <- x_i + beta * d_i
//! ```
//!
//! With `lambda = 0` every agent runs plain gradient descent.

pub mod cli;
pub mod engine;
pub mod error;
pub mod objectives;
pub mod point;
pub mod rng;
pub mod runner;
pub mod step;
pub mod trace;
pub mod types;

pub use error::{Error, Result};
pub use objectives::Objective;
pub use point::{distance, Point};
pub use runner::{run, Preset};
pub use types::{
    BacktrackingParams, DirectionSet, IterationRecord, RunResult, SolverConfig, StepMode,
    StopReason, SwarmState,
};
