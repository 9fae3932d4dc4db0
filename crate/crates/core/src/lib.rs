//! Iteration, closed-form solutions, and symmetry verification for the
//! fifth-order rational difference equation family
//!
//! ```text
//! x[n+1] = x[n]*x[n-2]*x[n-4] / ( x[n-1]*x[n-3] * (a[n] + b[n]*x[n]*x[n-2]*x[n-4]) )
//! ```
//!
//! with nonzero coefficient sequences `a[n]`, `b[n]`, or equivalently its
//! forward-shifted form `u[n+5] = u[n]*u[n+2]*u[n+4] / (u[n+1]*u[n+3]*(A[n] + B[n]*u[n]*u[n+2]*u[n+4]))`
//! where `u[j] = x[j-4]`.
//!
//! The crate provides several independent routes to the same orbit and the
//! machinery to cross-check them:
//!
//! - [`recurrence`]: direct iteration with forbidden-set detection — the
//!   ground-truth oracle.
//! - [`closedform`]: the invariant sequence `V[n] = 1/(u[n]*u[n+2]*u[n+4])`
//!   and the residue-class product solutions built from it, including the
//!   constant-coefficient specialization and a trigonometric magnitude form.
//! - [`symmetry`]: the four Lie point symmetry characteristics of the
//!   equation and numerical verification of the linearized symmetry
//!   condition, the canonical coordinate, and the invariant's exponential
//!   form.
//! - [`analysis`]: periodic-orbit detection, the period-six criterion
//!   `x[-4]*x[-2]*x[0] = (1-a)/b`, decay-rate reporting for `a = 1`, and the
//!   per-residue special-case solution tables.
//!
//! All orbit machinery is generic over [`numerics::Scalar`], so every formula
//! can be evaluated both in exact rational arithmetic (where agreement is
//! required to be bit-exact) and in floating point (where it is required up
//! to a stated tolerance).

pub mod analysis;
pub mod closedform;
pub mod numerics;
pub mod recurrence;
pub mod sampling;
pub mod symmetry;

/// Exact rational backend: arbitrary-precision, always canonical.
pub type Rational = num_rational::BigRational;
/// Real floating-point backend.
pub type Real = f64;
/// Complex floating-point values (sixth roots of unity, characteristics,
/// canonical coordinates).
pub type Complex = num_complex::Complex64;

pub use numerics::{beta_power, Scalar};
pub use recurrence::{
    iterate, iterate_x, CoefficientSequence, ForbiddenCause, InitialConditions, Trajectory,
    TrajectoryStatus,
};
