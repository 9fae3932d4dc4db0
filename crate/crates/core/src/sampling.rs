//! Deterministic seeded sampling of test instances.
//!
//! Randomized sweeps (symmetry residual checks, closed-form-vs-oracle
//! batches) must reproduce the same sample set for the same seed, across
//! runs and platforms, so everything here draws from a `ChaCha8Rng`.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::recurrence::{CoefficientSequence, InitialConditions};
use crate::symmetry::SymmetryPoint;
use crate::Rational;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Nonzero rational with numerator in `[-max_num, max_num]` and denominator
/// in `[1, max_den]`.
pub fn nonzero_rational(rng: &mut ChaCha8Rng, max_num: i64, max_den: i64) -> Rational {
    loop {
        let n = rng.random_range(-max_num..=max_num);
        if n == 0 {
            continue;
        }
        let d = rng.random_range(1..=max_den);
        return Rational::new(n.into(), d.into());
    }
}

/// Five nonzero rational seeds with enough variety that a six-periodic orbit
/// built on them has no shorter sub-period (`u[0] != u[2]` kills period 2,
/// `u[0] != u[3]` kills period 3).
pub fn nonzero_rational_seeds(rng: &mut ChaCha8Rng, max_num: i64, max_den: i64) -> InitialConditions<Rational> {
    loop {
        let vals: [Rational; 5] =
            std::array::from_fn(|_| nonzero_rational(rng, max_num, max_den));
        if vals[0] != vals[2] && vals[0] != vals[3] {
            return InitialConditions::new(vals).expect("rationals are always finite");
        }
    }
}

/// Constant or periodic (period <= max_period) rational coefficient rule
/// with small nonzero entries.
pub fn rational_coefficients(
    rng: &mut ChaCha8Rng,
    max_period: usize,
) -> CoefficientSequence<Rational> {
    let period = rng.random_range(1..=max_period.max(1));
    if period == 1 {
        CoefficientSequence::constant(nonzero_rational(rng, 3, 2))
    } else {
        let vals = (0..period).map(|_| nonzero_rational(rng, 3, 2)).collect();
        CoefficientSequence::periodic(vals)
    }
    .expect("sampled coefficients are nonzero")
}

fn complex_in_annulus(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> Complex64 {
    let r = rng.random_range(lo..hi);
    let theta = rng.random_range(0.0..std::f64::consts::TAU);
    Complex64::from_polar(r, theta)
}

/// Admissible point for the linearized symmetry condition: all `|u|` in
/// `[0.5, 2]`, coefficients in the same annulus, `n` in `0..=11`, and the
/// bracket bounded away from zero so residual scaling stays meaningful.
pub fn symmetry_point(rng: &mut ChaCha8Rng) -> SymmetryPoint {
    loop {
        let u: [Complex64; 5] = std::array::from_fn(|_| complex_in_annulus(rng, 0.5, 2.0));
        let coeff_a = complex_in_annulus(rng, 0.5, 2.0);
        let coeff_b = complex_in_annulus(rng, 0.5, 2.0);
        let bracket = coeff_a + coeff_b * u[0] * u[2] * u[4];
        if bracket.norm() > 0.1 {
            let n = rng.random_range(0..=11);
            return SymmetryPoint { n, u, coeff_a, coeff_b };
        }
    }
}

/// Positive float instance (seeds and constant coefficients in `[0.5, 2]`):
/// the whole orbit and every `V` stay positive, which keeps logarithm-based
/// routes well-defined.
pub fn positive_float_instance(
    rng: &mut ChaCha8Rng,
) -> (InitialConditions<f64>, CoefficientSequence<f64>, CoefficientSequence<f64>) {
    let seeds: [f64; 5] = std::array::from_fn(|_| rng.random_range(0.5..2.0));
    let ic = InitialConditions::new(seeds).expect("finite by construction");
    let a = CoefficientSequence::constant(rng.random_range(0.5..2.0)).unwrap();
    let b = CoefficientSequence::constant(rng.random_range(0.5..2.0)).unwrap();
    (ic, a, b)
}
