//! Seeded random initialization.
//!
//! Agents are drawn with xoshiro256++ seeded through SplitMix64
//! (`rand_xoshiro::Xoshiro256PlusPlus::seed_from_u64`). Each coordinate uses
//! one 64-bit output `r`: `u = (r >> 11) * 2^-53`, `x = lo + (hi - lo) * u`.
//! Only integer operations and a single multiply-add per coordinate are
//! involved, so a seed produces the same points on every platform.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::error::{Error, Result};
use crate::point::Point;

/// Uniform sample in `[0, 1)` with 53 random bits.
fn unit(rng: &mut Xoshiro256PlusPlus) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// `agents` points drawn uniformly from the box `[lo, hi]^dim`.
pub fn uniform_points(
    seed: u64,
    agents: usize,
    dim: usize,
    lo: f64,
    hi: f64,
) -> Result<Vec<Point>> {
    if agents == 0 || dim == 0 {
        return Err(Error::config(
            "random initialization needs at least one agent and one dimension",
        ));
    }
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::config(format!(
            "box bounds must be finite with LO < HI, got [{lo}, {hi}]"
        )));
    }
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let width = hi - lo;
    (0..agents)
        .map(|_| Point::new((0..dim).map(|_| lo + width * unit(&mut rng)).collect()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_points() {
        let a = uniform_points(42, 5, 2, -3.0, 3.0).unwrap();
        let b = uniform_points(42, 5, 2, -3.0, 3.0).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, uniform_points(43, 5, 2, -3.0, 3.0).unwrap());
        for p in &a {
            assert!(p.coords().iter().all(|c| (-3.0..3.0).contains(c)));
        }
    }

    #[test]
    fn known_stream() {
        // frozen so that a change of generator or conversion is noticed
        let pts = uniform_points(42, 1, 2, 0.0, 1.0).unwrap();
        let bits: Vec<u64> = pts[0].coords().iter().map(|c| c.to_bits()).collect();
        assert_eq!(bits, FROZEN_SEED_42);
    }

    // cross-checked against a from-scratch SplitMix64 + xoshiro256++ implementation
    const FROZEN_SEED_42: [u64; 2] = [4605509828241559245, 4599414989186784204];

    #[test]
    fn rejects_bad_box() {
        assert!(uniform_points(1, 2, 2, 3.0, -3.0).is_err());
        assert!(uniform_points(1, 0, 2, -3.0, 3.0).is_err());
        assert!(uniform_points(1, 2, 2, f64::NEG_INFINITY, 3.0).is_err());
    }
}
