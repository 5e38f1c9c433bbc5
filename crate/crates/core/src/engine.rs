//! The communication protocol: coupling term, blended descent directions and
//! the synchronous swarm update.
//!
//! Every agent's direction at iteration `k` is built from the same snapshot
//! of positions and values. Sums over partner agents run in ascending index
//! order, so results are reproducible bit for bit.

use crate::error::{Error, Result};
use crate::objectives::Objective;
use crate::point::{distance, Point};
use crate::types::{DirectionSet, SwarmState};

/// Objective values and gradients of every agent at one iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct SwarmEvaluation {
    pub values: Vec<f64>,
    pub gradients: Vec<Point>,
}

/// Evaluates `f` and its gradient once per agent.
pub fn evaluate_swarm(swarm: &SwarmState, obj: &dyn Objective) -> Result<SwarmEvaluation> {
    let mut values = Vec::with_capacity(swarm.agents());
    let mut gradients = Vec::with_capacity(swarm.agents());
    for (i, x) in swarm.positions().iter().enumerate() {
        values.push(obj.evaluate(x).map_err(|e| e.at_agent(i))?);
        gradients.push(obj.gradient(x).map_err(|e| e.at_agent(i))?);
    }
    Ok(SwarmEvaluation { values, gradients })
}

fn check_values(swarm: &SwarmState, values: &[f64]) -> Result<()> {
    if values.len() != swarm.agents() {
        return Err(Error::config(format!(
            "expected {} objective values, got {}",
            swarm.agents(),
            values.len()
        )));
    }
    if let Some(j) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::diverged("objective value is not finite").at_agent(j));
    }
    Ok(())
}

/// `sum_{j != i} (x_j - x_i) * (f_j - f_i)`, without the protocol factor.
///
/// Each summand pulls agent `i` toward partners with lower values and pushes
/// it away from partners with higher values.
pub fn coupling_sum(i: usize, swarm: &SwarmState, values: &[f64]) -> Result<Point> {
    check_values(swarm, values)?;
    let positions = swarm.positions();
    let xi = positions[i].coords();
    let fi = values[i];
    let mut acc = vec![0.0; xi.len()];
    for (j, xj) in positions.iter().enumerate() {
        if j == i {
            continue;
        }
        let df = values[j] - fi;
        for (a, (pj, pi)) in acc.iter_mut().zip(xj.coords().iter().zip(xi)) {
            *a += (pj - pi) * df;
        }
    }
    Point::new(acc).map_err(|_| Error::diverged("coupling term is not finite").at_agent(i))
}

/// `-[(1 - lambda) * grad_i + lambda * coupling_sum(i)]`.
///
/// With `lambda == 0` the coupling term is never formed and the result is
/// exactly `-grad_i`.
pub fn descent_direction(
    i: usize,
    swarm: &SwarmState,
    grad_i: &Point,
    values: &[f64],
    lambda: f64,
) -> Result<Point> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::config(format!(
            "protocol factor must lie in [0, 1], got {lambda}"
        )));
    }
    if grad_i.dim() != swarm.dimension() {
        return Err(Error::Dimension {
            expected: swarm.dimension(),
            found: grad_i.dim(),
        });
    }
    if lambda == 0.0 {
        check_values(swarm, values)?;
        return Ok(grad_i.neg());
    }
    let coupling = coupling_sum(i, swarm, values)?;
    let local = 1.0 - lambda;
    let d = grad_i
        .coords()
        .iter()
        .zip(coupling.coords())
        .map(|(g, c)| -(local * g + lambda * c))
        .collect();
    Point::new(d).map_err(|_| Error::diverged("descent direction is not finite").at_agent(i))
}

/// Directions for all agents from precomputed values and gradients.
pub fn directions_from(
    swarm: &SwarmState,
    eval: &SwarmEvaluation,
    lambda: f64,
) -> Result<DirectionSet> {
    if eval.gradients.len() != swarm.agents() {
        return Err(Error::config(format!(
            "expected {} gradients, got {}",
            swarm.agents(),
            eval.gradients.len()
        )));
    }
    let directions = eval
        .gradients
        .iter()
        .enumerate()
        .map(|(i, g)| descent_direction(i, swarm, g, &eval.values, lambda))
        .collect::<Result<Vec<_>>>()?;
    Ok(DirectionSet {
        directions,
        computed_at: swarm.iteration(),
    })
}

pub fn compute_directions(
    swarm: &SwarmState,
    obj: &dyn Objective,
    lambda: f64,
) -> Result<DirectionSet> {
    let eval = evaluate_swarm(swarm, obj)?;
    directions_from(swarm, &eval, lambda)
}

/// Moves every agent by `step_lengths[i] * d_i` and advances the iteration.
pub fn apply_step(
    swarm: &SwarmState,
    dirs: &DirectionSet,
    step_lengths: &[f64],
) -> Result<SwarmState> {
    if dirs.computed_at != swarm.iteration() {
        return Err(Error::config(format!(
            "directions from iteration {} applied to swarm at iteration {}",
            dirs.computed_at,
            swarm.iteration()
        )));
    }
    let m = swarm.agents();
    if dirs.directions.len() != m || step_lengths.len() != m {
        return Err(Error::config(format!(
            "swarm has {m} agents but got {} directions and {} step lengths",
            dirs.directions.len(),
            step_lengths.len()
        )));
    }
    if let Some(a) = step_lengths.iter().find(|a| !(a.is_finite() && **a >= 0.0)) {
        return Err(Error::config(format!(
            "step lengths must be finite and non-negative, got {a}"
        )));
    }
    let positions = swarm
        .positions()
        .iter()
        .zip(&dirs.directions)
        .zip(step_lengths)
        .enumerate()
        .map(|(i, ((x, d), &alpha))| x.step(alpha, d).map_err(|e| e.at_agent(i)))
        .collect::<Result<Vec<_>>>()?;
    SwarmState::new(positions, swarm.iteration() + 1)
}

/// Largest Euclidean distance between any two agents; 0 for a single agent.
pub fn max_pairwise_distance(swarm: &SwarmState) -> f64 {
    let pos = swarm.positions();
    let mut max = 0.0f64;
    for i in 0..pos.len() {
        for j in i + 1..pos.len() {
            // positions share a dimension by construction
            let d = distance(&pos[i], &pos[j]).expect("swarm dimensions agree");
            max = max.max(d);
        }
    }
    max
}

/// Index and value of the smallest entry, lowest index on ties.
pub fn argmin(values: &[f64]) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &v) in values.iter().enumerate() {
        match best {
            Some((_, b)) if v >= b => {}
            _ => best = Some((i, v)),
        }
    }
    best
}

/// The agent with the lowest objective value (zero-based index).
pub fn select_best(swarm: &SwarmState, obj: &dyn Objective) -> Result<(usize, Point, f64)> {
    let values = swarm
        .positions()
        .iter()
        .enumerate()
        .map(|(i, x)| obj.evaluate(x).map_err(|e| e.at_agent(i)))
        .collect::<Result<Vec<_>>>()?;
    let (i, v) = argmin(&values).expect("swarm is non-empty");
    Ok((i, swarm.positions()[i].clone(), v))
}
