//! Step lengths: the fixed global step and per-agent Armijo backtracking.

use crate::error::Result;
use crate::objectives::Objective;
use crate::point::Point;
use crate::types::{BacktrackingParams, DirectionSet, SolverConfig};

/// Outcome of one backtracking search.
#[derive(Debug, Clone, PartialEq)]
pub struct StepDecision {
    pub step_length: f64,
    /// The direction was replaced by `-grad f(x)`.
    pub fallback_used: bool,
    /// Shrinks applied before the accepted trial.
    pub halvings: u32,
    /// Direction the step length applies to.
    pub direction: Point,
}

pub fn fixed_step(config: &SolverConfig) -> f64 {
    config.step_size
}

/// Backtracking search from `x` along `d`, evaluating `f(x)` and its gradient.
pub fn backtracking_step(
    x: &Point,
    d: &Point,
    obj: &dyn Objective,
    params: &BacktrackingParams,
    initial_step: f64,
) -> Result<StepDecision> {
    let fx = obj.evaluate(x)?;
    let grad = obj.gradient(x)?;
    backtracking_step_with(x, d, fx, &grad, obj, params, initial_step)
}

/// Backtracking search with `f(x)` and `grad f(x)` already known.
///
/// Accepts the first `alpha = initial_step * shrink^h`, `h <= max_halvings`,
/// with `f(x + alpha d) <= f(x) + c alpha <grad, d>`. If `d` is not a descent
/// direction or no trial is accepted, the search is repeated once along
/// `-grad`. If that fails too the step length is 0. The accepted point never
/// has a larger value than `f(x)`.
pub fn backtracking_step_with(
    x: &Point,
    d: &Point,
    fx: f64,
    grad: &Point,
    obj: &dyn Objective,
    params: &BacktrackingParams,
    initial_step: f64,
) -> Result<StepDecision> {
    if let Some(decision) = armijo_search(x, d, fx, grad, obj, params, initial_step)? {
        return Ok(StepDecision {
            direction: d.clone(),
            fallback_used: false,
            ..decision
        });
    }
    let steepest = grad.neg();
    match armijo_search(x, &steepest, fx, grad, obj, params, initial_step)? {
        Some(decision) => Ok(StepDecision {
            direction: steepest,
            fallback_used: true,
            ..decision
        }),
        None => Ok(StepDecision {
            step_length: 0.0,
            fallback_used: true,
            halvings: params.max_halvings,
            direction: steepest,
        }),
    }
}

fn armijo_search(
    x: &Point,
    d: &Point,
    fx: f64,
    grad: &Point,
    obj: &dyn Objective,
    params: &BacktrackingParams,
    initial_step: f64,
) -> Result<Option<StepDecision>> {
    let slope = grad.dot(d)?;
    // NaN slope counts as "not a descent direction"
    if slope.partial_cmp(&0.0) != Some(std::cmp::Ordering::Less) {
        return Ok(None);
    }
    let mut alpha = initial_step;
    for h in 0..=params.max_halvings {
        // overflowing trial points count as rejected
        if let Ok(trial) = x.step(alpha, d) {
            let v = obj.value(trial.coords());
            if v.is_finite() && v <= fx + params.armijo_c * alpha * slope && v <= fx {
                return Ok(Some(StepDecision {
                    step_length: alpha,
                    fallback_used: false,
                    halvings: h,
                    direction: d.clone(),
                }));
            }
        }
        alpha *= params.shrink;
    }
    Ok(None)
}

/// True iff every direction has norm at most `tol`.
pub fn detect_stall(dirs: &DirectionSet, tol: f64) -> bool {
    dirs.max_norm() <= tol
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::by_name;
    use crate::objectives::{FnObjective, Quadratic, BUILTIN_NAMES};
    use proptest::prelude::*;

    fn p(c: &[f64]) -> Point {
        Point::new(c.to_vec()).unwrap()
    }

    fn params() -> BacktrackingParams {
        BacktrackingParams::default()
    }

    fn square() -> FnObjective<impl Fn(&[f64]) -> f64 + Send + Sync> {
        FnObjective::new("x^2", 1, |x: &[f64]| x[0] * x[0])
    }

    #[test]
    fn fixed_step_is_beta() {
        let cfg = SolverConfig::new(vec![p(&[0.0, 0.0])]);
        assert_eq!(fixed_step(&cfg), 0.1);
        assert_eq!(fixed_step(&cfg.with_step_size(1.0)), 1.0);
    }

    #[test]
    fn one_dimensional_armijo_recursion() {
        let dec = backtracking_step(&p(&[1.0]), &p(&[-2.0]), &square(), &params(), 1.0).unwrap();
        assert_eq!(dec.step_length, 0.5);
        assert_eq!(dec.halvings, 1);
        assert!(!dec.fallback_used);
    }

    #[test]
    fn quadratic_overshoot_is_rejected() {
        let dec = backtracking_step(
            &p(&[0.0, 0.0]),
            &p(&[4.0, -8.0]),
            &Quadratic,
            &params(),
            1.0,
        )
        .unwrap();
        assert_eq!(dec.step_length, 0.5);
        assert_eq!(dec.halvings, 1);
        assert_eq!(dec.direction.coords(), &[4.0, -8.0]);
    }

    #[test]
    fn zero_direction_falls_back() {
        let dec = backtracking_step(&p(&[1.0]), &p(&[0.0]), &square(), &params(), 1.0).unwrap();
        assert!(dec.fallback_used);
        assert!((dec.direction[0] + 2.0).abs() < 1e-8);
        assert_eq!(dec.step_length, 0.5);

        // at a critical point nothing decreases f
        let dec = backtracking_step(
            &p(&[2.0, -4.0]),
            &p(&[0.0, 0.0]),
            &Quadratic,
            &params(),
            1.0,
        )
        .unwrap();
        assert!(dec.fallback_used);
        assert_eq!(dec.step_length, 0.0);
        assert!(dec.halvings <= params().max_halvings);
    }

    #[test]
    fn ascent_direction_falls_back() {
        let dec = backtracking_step(&p(&[1.0]), &p(&[3.0]), &square(), &params(), 0.1).unwrap();
        assert!(dec.fallback_used);
        assert_eq!(dec.step_length, 0.1);
        assert!((dec.direction[0] + 2.0).abs() < 1e-8);
    }

    #[test]
    fn stall_detection() {
        let dirs = |n: &[&[f64]]| DirectionSet {
            directions: n.iter().map(|c| p(c)).collect(),
            computed_at: 0,
        };
        assert!(detect_stall(&dirs(&[&[0.0, 0.0], &[0.0, 0.0]]), 0.0));
        assert!(!detect_stall(&dirs(&[&[1.0, 0.0], &[0.0, 0.0]]), 0.5));
        assert!(detect_stall(&dirs(&[&[1e-9], &[1e-9]]), 1e-8));
        assert!(!detect_stall(&dirs(&[&[1e-9], &[0.0]]), 0.0));
    }

    proptest! {
        #[test]
        fn never_increases_f(
            x in -30.0f64..30.0,
            y in -30.0f64..30.0,
            dx in -100.0f64..100.0,
            dy in -100.0f64..100.0,
            init in 1e-3f64..10.0,
            which in 0usize..3,
        ) {
            let obj = by_name(BUILTIN_NAMES[which]).unwrap();
            let x0 = p(&[x, y]);
            let dec = backtracking_step(&x0, &p(&[dx, dy]), obj.as_ref(), &params(), init).unwrap();
            let moved = x0.step(dec.step_length, &dec.direction).unwrap();
            prop_assert!(obj.evaluate(&moved).unwrap() <= obj.evaluate(&x0).unwrap());
            prop_assert!(dec.step_length >= 0.0);
            prop_assert!(dec.halvings <= params().max_halvings);
        }
    }
}
