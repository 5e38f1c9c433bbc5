//! The iteration loop: directions, steps, update, trace, stopping test.

use crate::engine::{self, argmin, SwarmEvaluation};
use crate::error::{Error, Result};
use crate::objectives::{Objective, Quadratic, ScaledRosenbrock};
use crate::point::Point;
use crate::step::{backtracking_step_with, detect_stall, fixed_step};
use crate::types::{
    DirectionSet, DivergenceInfo, IterationRecord, RunResult, SolverConfig, StepMode, StopReason,
    SwarmState,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopStatus {
    Continue,
    Stop(StopReason),
}

impl StopStatus {
    pub fn should_stop(&self) -> bool {
        matches!(self, StopStatus::Stop(_))
    }
}

/// Stopping test, applied after the iteration counter has been advanced.
///
/// Consensus takes precedence over the iteration budget, which takes
/// precedence over stall detection. The budget is exhausted once `k > N`.
/// A lone agent has no partners to agree with, so consensus needs `m >= 2`.
pub fn should_stop(
    swarm: &SwarmState,
    dirs: Option<&DirectionSet>,
    config: &SolverConfig,
) -> StopStatus {
    if swarm.agents() > 1 && engine::max_pairwise_distance(swarm) < config.precision {
        return StopStatus::Stop(StopReason::Consensus);
    }
    if swarm.iteration() > config.max_iterations {
        return StopStatus::Stop(StopReason::IterationBudget);
    }
    if let (Some(tol), Some(dirs)) = (config.stall_tolerance, dirs) {
        if detect_stall(dirs, tol) {
            return StopStatus::Stop(StopReason::Stalled);
        }
    }
    StopStatus::Continue
}

fn record(
    swarm: &SwarmState,
    eval: &SwarmEvaluation,
    step_lengths: Vec<f64>,
    fallbacks: Vec<bool>,
) -> IterationRecord {
    let (_, best_value) = argmin(&eval.values).expect("swarm is non-empty");
    IterationRecord {
        iteration: swarm.iteration(),
        positions: swarm.positions().to_vec(),
        values: eval.values.clone(),
        best_value,
        max_pairwise_distance: engine::max_pairwise_distance(swarm),
        step_lengths,
        fallbacks,
    }
}

struct Progress {
    swarm: SwarmState,
    eval: SwarmEvaluation,
    best_ever: (Point, f64),
    trace: Vec<IterationRecord>,
}

impl Progress {
    fn finish(self, stop_reason: StopReason, divergence: Option<DivergenceInfo>) -> RunResult {
        let (i, v) = argmin(&self.eval.values).expect("swarm is non-empty");
        RunResult {
            best_agent_index: i,
            best_point: self.swarm.positions()[i].clone(),
            best_value: v,
            stop_reason,
            best_ever_point: self.best_ever.0,
            best_ever_value: self.best_ever.1,
            final_swarm: self.swarm,
            trace: self.trace,
            divergence,
        }
    }

    fn diverge(self, err: Error) -> RunResult {
        let agent = match &err {
            Error::Divergence { agent, .. } => *agent,
            _ => None,
        };
        let info = DivergenceInfo {
            agent,
            last_finite_iteration: self.swarm.iteration(),
            message: err.to_string(),
        };
        self.finish(StopReason::Diverged, Some(info))
    }
}

/// Per-agent step lengths and the directions they apply to.
fn choose_steps(
    config: &SolverConfig,
    obj: &dyn Objective,
    swarm: &SwarmState,
    eval: &SwarmEvaluation,
    dirs: DirectionSet,
) -> Result<(DirectionSet, Vec<f64>, Vec<bool>)> {
    let m = swarm.agents();
    match config.step_mode {
        StepMode::Fixed => Ok((dirs, vec![fixed_step(config); m], vec![false; m])),
        StepMode::Backtracking => {
            let mut directions = Vec::with_capacity(m);
            let mut steps = Vec::with_capacity(m);
            let mut fallbacks = Vec::with_capacity(m);
            for (i, d) in dirs.directions.iter().enumerate() {
                let decision = backtracking_step_with(
                    &swarm.positions()[i],
                    d,
                    eval.values[i],
                    &eval.gradients[i],
                    obj,
                    &config.backtracking,
                    config.initial_step(),
                )
                .map_err(|e| e.at_agent(i))?;
                directions.push(decision.direction);
                steps.push(decision.step_length);
                fallbacks.push(decision.fallback_used);
            }
            Ok((
                DirectionSet {
                    directions,
                    computed_at: dirs.computed_at,
                },
                steps,
                fallbacks,
            ))
        }
    }
}

/// Runs the multi-agent descent until consensus, budget exhaustion, stall or
/// divergence.
///
/// Configuration problems are returned as errors before the first iteration.
/// Divergence is reported through [`StopReason::Diverged`] together with the
/// trace up to the last finite iteration.
pub fn run(config: &SolverConfig, obj: &dyn Objective) -> Result<RunResult> {
    config.validate()?;
    if config.dimension() != obj.dimension() {
        return Err(Error::Dimension {
            expected: obj.dimension(),
            found: config.dimension(),
        });
    }
    let swarm = SwarmState::initial(config.initial_points.clone())?;
    let m = swarm.agents();

    let eval = match engine::evaluate_swarm(&swarm, obj) {
        Ok(eval) => eval,
        Err(e) if e.is_divergence() => return Err(Error::config(format!("initial swarm: {e}"))),
        Err(e) => return Err(e),
    };
    let trace = vec![record(&swarm, &eval, vec![0.0; m], vec![false; m])];
    let (i0, v0) = argmin(&eval.values).expect("swarm is non-empty");
    let mut progress = Progress {
        best_ever: (swarm.positions()[i0].clone(), v0),
        swarm,
        eval,
        trace,
    };

    loop {
        let step = engine::directions_from(&progress.swarm, &progress.eval, config.protocol_factor)
            .and_then(|dirs| choose_steps(config, obj, &progress.swarm, &progress.eval, dirs))
            .and_then(|(dirs, steps, fallbacks)| {
                let next = engine::apply_step(&progress.swarm, &dirs, &steps)?;
                let eval = engine::evaluate_swarm(&next, obj)?;
                Ok((dirs, steps, fallbacks, next, eval))
            });
        let (dirs, steps, fallbacks, next, eval) = match step {
            Ok(s) => s,
            Err(e) if e.is_divergence() => return Ok(progress.diverge(e)),
            Err(e) => return Err(e),
        };

        let rec = record(&next, &eval, steps, fallbacks);
        if rec.best_value < progress.best_ever.1 {
            let (i, _) = argmin(&eval.values).expect("swarm is non-empty");
            progress.best_ever = (next.positions()[i].clone(), rec.best_value);
        }
        progress.trace.push(rec);
        progress.swarm = next;
        progress.eval = eval;

        if let StopStatus::Stop(reason) = should_stop(&progress.swarm, Some(&dirs), config) {
            return Ok(progress.finish(reason, None));
        }
    }
}

/// The three starting agents shared by both experiment presets.
pub fn preset_initial_points() -> Vec<Point> {
    [[-10.0, 20.0], [10.0, 10.0], [30.0, -20.0]]
        .into_iter()
        .map(|c| Point::try_from(c).expect("finite"))
        .collect()
}

/// A preset objective with its protocol and no-protocol configurations.
pub struct Preset {
    pub objective: Box<dyn Objective>,
    pub protocol: SolverConfig,
    pub no_protocol: SolverConfig,
}

pub const PRESET_PROTOCOL_FACTOR: f64 = 0.005;
pub const PRESET_STEP_SIZE: f64 = 0.1;

fn preset(objective: Box<dyn Objective>) -> Preset {
    let protocol = SolverConfig::new(preset_initial_points())
        .with_step_size(PRESET_STEP_SIZE)
        .with_protocol_factor(PRESET_PROTOCOL_FACTOR);
    let no_protocol = protocol.clone().with_protocol_factor(0.0);
    Preset {
        objective,
        protocol,
        no_protocol,
    }
}

/// Convex quadratic `(x - 2)^2 + (y + 4)^2` from three spread-out agents.
pub fn preset_experiment1() -> Preset {
    preset(Box::new(Quadratic))
}

/// Scaled Rosenbrock valley from the same three agents.
pub fn preset_experiment2() -> Preset {
    preset(Box::new(ScaledRosenbrock))
}

pub fn preset_by_name(name: &str) -> Option<Preset> {
    match name {
        "exp1" => Some(preset_experiment1()),
        "exp2" => Some(preset_experiment2()),
        _ => None,
    }
}
