//! Finite points in R^n.

use std::fmt;
use std::ops::Index;

use crate::error::{Error, Result};

/// A position in R^n with every coordinate finite.
///
/// Construction rejects NaN and infinities, so any `Point` that exists can be
/// written to a trace without further checks.
#[derive(Debug, Clone, PartialEq)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::config("point must have at least one coordinate"));
        }
        if let Some(j) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::diverged(format!(
                "coordinate {j} is not finite ({})",
                coords[j]
            )));
        }
        Ok(Point(coords))
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "zero-dimensional point");
        Point(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }

    fn check_dim(&self, other: &Point) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }

    pub fn dot(&self, other: &Point) -> Result<f64> {
        self.check_dim(other)?;
        Ok(self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum())
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// `self + alpha * dir`. Fails if the result leaves the finite range.
    pub fn step(&self, alpha: f64, dir: &Point) -> Result<Point> {
        self.check_dim(dir)?;
        Point::new(
            self.0
                .iter()
                .zip(&dir.0)
                .map(|(x, d)| x + alpha * d)
                .collect(),
        )
    }

    /// `alpha * self`.
    pub fn scaled(&self, alpha: f64) -> Result<Point> {
        Point::new(self.0.iter().map(|c| alpha * c).collect())
    }

    pub fn neg(&self) -> Point {
        Point(self.0.iter().map(|c| -c).collect())
    }
}

impl Index<usize> for Point {
    type Output = f64;

    fn index(&self, j: usize) -> &f64 {
        &self.0[j]
    }
}

impl TryFrom<Vec<f64>> for Point {
    type Error = Error;

    fn try_from(coords: Vec<f64>) -> Result<Self> {
        Point::new(coords)
    }
}

impl<const N: usize> TryFrom<[f64; N]> for Point {
    type Error = Error;

    fn try_from(coords: [f64; N]) -> Result<Self> {
        Point::new(coords.to_vec())
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (j, c) in self.0.iter().enumerate() {
            if j > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Euclidean distance between two points of equal dimension.
pub fn distance(a: &Point, b: &Point) -> Result<f64> {
    a.check_dim(b)?;
    Ok(a.0
        .iter()
        .zip(&b.0)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt())
}
