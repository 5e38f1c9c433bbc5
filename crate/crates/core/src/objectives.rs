//! Objective functions and the built-in benchmarks.

use crate::error::{Error, Result};
use crate::point::Point;

/// Default central-difference step.
pub const DEFAULT_FD_STEP: f64 = 1e-5;

/// A smooth scalar field on R^n.
///
/// Implementors supply raw evaluation on coordinate slices of length
/// [`dimension`](Objective::dimension). The provided [`evaluate`](Objective::evaluate)
/// and [`gradient`](Objective::gradient) methods check dimensions and finiteness and
/// fall back to central differences when no analytic gradient exists.
pub trait Objective: Send + Sync {
    fn name(&self) -> &str;

    fn dimension(&self) -> usize;

    fn value(&self, x: &[f64]) -> f64;

    fn analytic_gradient(&self, _x: &[f64]) -> Option<Vec<f64>> {
        None
    }

    fn evaluate(&self, p: &Point) -> Result<f64> {
        check_dim(self.dimension(), p)?;
        let v = self.value(p.coords());
        if !v.is_finite() {
            return Err(Error::diverged(format!(
                "{} is not finite at {p}",
                self.name()
            )));
        }
        Ok(v)
    }

    fn gradient(&self, p: &Point) -> Result<Point> {
        check_dim(self.dimension(), p)?;
        match self.analytic_gradient(p.coords()) {
            Some(g) => Point::new(g).map_err(|_| {
                Error::diverged(format!("gradient of {} is not finite at {p}", self.name()))
            }),
            None => finite_difference_gradient(self, p, DEFAULT_FD_STEP),
        }
    }
}

fn check_dim(expected: usize, p: &Point) -> Result<()> {
    if p.dim() != expected {
        return Err(Error::Dimension {
            expected,
            found: p.dim(),
        });
    }
    Ok(())
}

/// Central-difference gradient: `(f(p + h e_j) - f(p - h e_j)) / 2h` per coordinate.
pub fn finite_difference_gradient<O: Objective + ?Sized>(
    obj: &O,
    p: &Point,
    h: f64,
) -> Result<Point> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::config(format!(
            "difference step must be positive, got {h}"
        )));
    }
    check_dim(obj.dimension(), p)?;
    let mut x = p.coords().to_vec();
    let mut grad = Vec::with_capacity(x.len());
    for j in 0..x.len() {
        let orig = x[j];
        x[j] = orig + h;
        let fwd = obj.value(&x);
        x[j] = orig - h;
        let bwd = obj.value(&x);
        x[j] = orig;
        if !(fwd.is_finite() && bwd.is_finite()) {
            return Err(Error::diverged(format!(
                "{} is not finite near {p} (coordinate {j})",
                obj.name()
            )));
        }
        grad.push((fwd - bwd) / (2.0 * h));
    }
    Point::new(grad)
}

/// `(x - 2)^2 + (y + 4)^2`, minimum 0 at (2, -4).
#[derive(Debug, Clone, Copy, Default)]
pub struct Quadratic;

impl Objective for Quadratic {
    fn name(&self) -> &str {
        "quadratic"
    }

    fn dimension(&self) -> usize {
        2
    }

    fn value(&self, x: &[f64]) -> f64 {
        let (a, b) = (x[0] - 2.0, x[1] + 4.0);
        a * a + b * b
    }

    fn analytic_gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        Some(vec![2.0 * (x[0] - 2.0), 2.0 * (x[1] + 4.0)])
    }
}

/// Rosenbrock's banana function scaled by 1e-6:
/// `[(x - 1)^2 + 100 (y - x^2)^2] * 1e-6`, minimum 0 at (1, 1).
#[derive(Debug, Clone, Copy, Default)]
pub struct ScaledRosenbrock;

impl ScaledRosenbrock {
    pub const SCALE: f64 = 1e-6;
}

impl Objective for ScaledRosenbrock {
    fn name(&self) -> &str {
        "rosenbrock"
    }

    fn dimension(&self) -> usize {
        2
    }

    fn value(&self, x: &[f64]) -> f64 {
        let a = x[0] - 1.0;
        let b = x[1] - x[0] * x[0];
        (a * a + 100.0 * b * b) * Self::SCALE
    }

    fn analytic_gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        let b = x[1] - x[0] * x[0];
        Some(vec![
            (2.0 * (x[0] - 1.0) - 400.0 * x[0] * b) * Self::SCALE,
            200.0 * b * Self::SCALE,
        ])
    }
}

/// Tilted double well `(x^2 - 1)^2 + 0.3 x + y^2`.
///
/// Shallow local minimum near (0.96, 0), global minimum near (-1.04, 0).
#[derive(Debug, Clone, Copy, Default)]
pub struct DoubleWell;

impl DoubleWell {
    pub const TILT: f64 = 0.3;
}

impl Objective for DoubleWell {
    fn name(&self) -> &str {
        "doublewell"
    }

    fn dimension(&self) -> usize {
        2
    }

    fn value(&self, x: &[f64]) -> f64 {
        let w = x[0] * x[0] - 1.0;
        w * w + Self::TILT * x[0] + x[1] * x[1]
    }

    fn analytic_gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        Some(vec![
            4.0 * x[0] * (x[0] * x[0] - 1.0) + Self::TILT,
            2.0 * x[1],
        ])
    }
}

/// Closure-backed objective without an analytic gradient.
pub struct FnObjective<F> {
    name: String,
    dimension: usize,
    f: F,
}

impl<F> FnObjective<F>
where
    F: Fn(&[f64]) -> f64 + Send + Sync,
{
    pub fn new(name: impl Into<String>, dimension: usize, f: F) -> Self {
        FnObjective {
            name: name.into(),
            dimension,
            f,
        }
    }
}

impl<F> Objective for FnObjective<F>
where
    F: Fn(&[f64]) -> f64 + Send + Sync,
{
    fn name(&self) -> &str {
        &self.name
    }

    fn dimension(&self) -> usize {
        self.dimension
    }

    fn value(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }
}

pub const BUILTIN_NAMES: [&str; 3] = ["quadratic", "rosenbrock", "doublewell"];

/// Looks up a built-in objective by its CLI name.
pub fn by_name(name: &str) -> Option<Box<dyn Objective>> {
    match name {
        "quadratic" => Some(Box::new(Quadratic)),
        "rosenbrock" => Some(Box::new(ScaledRosenbrock)),
        "doublewell" => Some(Box::new(DoubleWell)),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(x: f64, y: f64) -> Point {
        Point::new(vec![x, y]).unwrap()
    }

    fn assert_vec_close(got: &Point, want: &[f64], tol: f64) {
        for (g, w) in got.coords().iter().zip(want) {
            assert!((g - w).abs() <= tol, "{got} vs {want:?}");
        }
    }

    #[test]
    fn quadratic_values() {
        assert_eq!(Quadratic.evaluate(&p(2.0, -4.0)).unwrap(), 0.0);
        assert_eq!(Quadratic.evaluate(&p(0.0, 0.0)).unwrap(), 20.0);
        assert_eq!(Quadratic.evaluate(&p(10.0, 10.0)).unwrap(), 260.0);
        assert_eq!(
            Quadratic.gradient(&p(2.0, -4.0)).unwrap().coords(),
            &[0.0, 0.0]
        );
        assert_eq!(
            Quadratic.gradient(&p(0.0, 0.0)).unwrap().coords(),
            &[-4.0, 8.0]
        );
        assert_eq!(
            Quadratic.gradient(&p(10.0, 10.0)).unwrap().coords(),
            &[16.0, 28.0]
        );
    }

    #[test]
    fn rosenbrock_values() {
        assert_eq!(ScaledRosenbrock.evaluate(&p(1.0, 1.0)).unwrap(), 0.0);
        assert!((ScaledRosenbrock.evaluate(&p(0.0, 0.0)).unwrap() - 1e-6).abs() < 1e-20);
        assert!((ScaledRosenbrock.evaluate(&p(-10.0, 20.0)).unwrap() - 0.640121).abs() < 1e-15);
        assert_eq!(
            ScaledRosenbrock.gradient(&p(1.0, 1.0)).unwrap().coords(),
            &[0.0, 0.0]
        );
        assert_vec_close(
            &ScaledRosenbrock.gradient(&p(0.0, 0.0)).unwrap(),
            &[-2e-6, 0.0],
            1e-20,
        );
        assert_vec_close(
            &ScaledRosenbrock.gradient(&p(1.0, 2.0)).unwrap(),
            &[-400e-6, 200e-6],
            1e-18,
        );
    }

    #[test]
    fn double_well_values() {
        assert_eq!(
            DoubleWell.gradient(&p(0.0, 0.0)).unwrap().coords(),
            &[0.3, 0.0]
        );
        assert_eq!(DoubleWell.evaluate(&p(0.0, 1.0)).unwrap(), 2.0);
        let left = DoubleWell.evaluate(&p(-1.0, 0.0)).unwrap();
        let right = DoubleWell.evaluate(&p(1.0, 0.0)).unwrap();
        assert!((left + 0.3).abs() < 1e-15 && (right - 0.3).abs() < 1e-15);
        assert!(left < right);
    }

    #[test]
    fn wrong_dimension_is_rejected() {
        let p3 = Point::new(vec![0.0; 3]).unwrap();
        for obj in BUILTIN_NAMES.iter().map(|n| by_name(n).unwrap()) {
            assert!(matches!(
                obj.evaluate(&p3),
                Err(Error::Dimension {
                    expected: 2,
                    found: 3
                })
            ));
            assert!(matches!(obj.gradient(&p3), Err(Error::Dimension { .. })));
        }
    }

    #[test]
    fn finite_difference_examples() {
        let h = DEFAULT_FD_STEP;
        let g = finite_difference_gradient(&Quadratic, &p(0.0, 0.0), h).unwrap();
        assert_vec_close(&g, &[-4.0, 8.0], 1e-8);
        let g = finite_difference_gradient(&ScaledRosenbrock, &p(1.0, 1.0), h).unwrap();
        assert_vec_close(&g, &[0.0, 0.0], 1e-9);
        let g = finite_difference_gradient(&DoubleWell, &p(0.0, 0.0), h).unwrap();
        assert_vec_close(&g, &[0.3, 0.0], 1e-8);
    }

    #[test]
    fn finite_difference_errors() {
        assert!(finite_difference_gradient(&Quadratic, &p(0.0, 0.0), 0.0).is_err());
        let blowup = FnObjective::new(
            "blowup",
            1,
            |x: &[f64]| if x[0] > 0.0 { f64::INFINITY } else { 0.0 },
        );
        let err =
            finite_difference_gradient(&blowup, &Point::new(vec![0.0]).unwrap(), 1e-3).unwrap_err();
        assert!(err.is_divergence());
        assert!(blowup
            .evaluate(&Point::new(vec![1.0]).unwrap())
            .unwrap_err()
            .is_divergence());
    }

    #[test]
    fn fn_objective_uses_differences() {
        let obj = FnObjective::new("sq", 2, |x: &[f64]| x[0] * x[0] + 3.0 * x[1]);
        let g = obj.gradient(&p(1.5, 0.0)).unwrap();
        assert_vec_close(&g, &[3.0, 3.0], 1e-8);
    }

    #[test]
    fn lookup() {
        for name in BUILTIN_NAMES {
            assert_eq!(by_name(name).unwrap().name(), name);
        }
        assert!(by_name("himmelblau").is_none());
    }

    proptest! {
        #[test]
        fn builtins_are_nonnegative_with_unique_zero(x in -30.0f64..30.0, y in -30.0f64..30.0) {
            let q = Quadratic.evaluate(&p(x, y)).unwrap();
            let r = ScaledRosenbrock.evaluate(&p(x, y)).unwrap();
            prop_assert!(q >= 0.0 && r >= 0.0);
            prop_assert_eq!(q == 0.0, x == 2.0 && y == -4.0);
            prop_assert_eq!(r == 0.0, x == 1.0 && y == 1.0);
        }

        #[test]
        fn evaluation_is_deterministic(x in -30.0f64..30.0, y in -30.0f64..30.0) {
            for obj in BUILTIN_NAMES.iter().map(|n| by_name(n).unwrap()) {
                let a = obj.evaluate(&p(x, y)).unwrap();
                let b = obj.evaluate(&p(x, y)).unwrap();
                prop_assert_eq!(a.to_bits(), b.to_bits());
            }
        }
    }
}
