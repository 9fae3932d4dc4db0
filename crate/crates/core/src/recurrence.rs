//! Direct iteration of the fifth-order recurrence with forbidden-set
//! detection.
//!
//! This is the ground-truth oracle: every closed-form expression elsewhere in
//! the crate is checked against orbits produced here. Iteration works in the
//! forward-shifted `u`-indexing
//!
//! ```text
//! u[n+5] = u[n]*u[n+2]*u[n+4] / ( u[n+1]*u[n+3] * (A[n] + B[n]*u[n]*u[n+2]*u[n+4]) )
//! ```
//!
//! with `u[j] = x[j-4]`; [`iterate_x`] relabels the same orbit in the
//! original `x`-indexing starting at `x[-4]`.
//!
//! An orbit that reaches a vanishing denominator has hit the forbidden set.
//! That is a property of the initial data, not a caller mistake, so it is
//! reported as a truncated [`Trajectory`] with a [`ForbiddenCause`] instead
//! of an error; callers frequently want the partial orbit.

use thiserror::Error;

use crate::numerics::Scalar;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RecurrenceError {
    #[error("coefficient sequence of length {len} has no index {index}")]
    CoefficientIndexOutOfRange { index: usize, len: usize },
    #[error("coefficient sequences must be nonzero everywhere")]
    ZeroCoefficient,
    #[error("periodic coefficient sequence needs at least one value")]
    EmptyPeriod,
    #[error("scalar value is not finite")]
    NonFiniteInput,
    #[error("iteration count {0} is below the five seed values")]
    CountTooSmall(usize),
}

/// Rule producing the coefficient value at any index `n >= 0`.
///
/// All values are required to be nonzero; a zero `A[n]` or `B[n]` makes the
/// invariant recurrence degenerate, so it is rejected at construction.
#[derive(Debug, Clone, PartialEq)]
pub enum CoefficientSequence<S: Scalar> {
    Constant(S),
    Periodic(Vec<S>),
    /// Answers only `0 <= n < len`; anything beyond is an error.
    Explicit(Vec<S>),
}

impl<S: Scalar> CoefficientSequence<S> {
    pub fn constant(value: S) -> Result<Self, RecurrenceError> {
        Self::validate(std::slice::from_ref(&value))?;
        Ok(Self::Constant(value))
    }

    pub fn periodic(values: Vec<S>) -> Result<Self, RecurrenceError> {
        if values.is_empty() {
            return Err(RecurrenceError::EmptyPeriod);
        }
        Self::validate(&values)?;
        Ok(Self::Periodic(values))
    }

    pub fn explicit(values: Vec<S>) -> Result<Self, RecurrenceError> {
        Self::validate(&values)?;
        Ok(Self::Explicit(values))
    }

    fn validate(values: &[S]) -> Result<(), RecurrenceError> {
        for v in values {
            if v.is_zero() {
                return Err(RecurrenceError::ZeroCoefficient);
            }
            if !v.is_finite_value() {
                return Err(RecurrenceError::NonFiniteInput);
            }
        }
        Ok(())
    }

    pub fn get(&self, n: usize) -> Result<&S, RecurrenceError> {
        match self {
            Self::Constant(v) => Ok(v),
            Self::Periodic(vs) => Ok(&vs[n % vs.len()]),
            Self::Explicit(vs) => vs
                .get(n)
                .ok_or(RecurrenceError::CoefficientIndexOutOfRange { index: n, len: vs.len() }),
        }
    }

    /// The constant value, when the sequence is constant.
    pub fn as_constant(&self) -> Option<&S> {
        match self {
            Self::Constant(v) => Some(v),
            _ => None,
        }
    }
}

/// The five seed values `u[0]..u[4]`, equivalently `x[-4]..x[0]`.
///
/// Zero entries are allowed here — the recurrence may still be evaluable for
/// a few steps, and the oracle should stay maximally general. Closed-form
/// operations impose their own nonzero requirements.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialConditions<S: Scalar> {
    u: [S; 5],
}

impl<S: Scalar> InitialConditions<S> {
    pub fn new(u: [S; 5]) -> Result<Self, RecurrenceError> {
        if u.iter().any(|v| !v.is_finite_value()) {
            return Err(RecurrenceError::NonFiniteInput);
        }
        Ok(Self { u })
    }

    /// Seed in `u`-indexing, `j` in `0..5`.
    pub fn u(&self, j: usize) -> &S {
        &self.u[j]
    }

    /// Seed in `x`-indexing, `i` in `-4..=0`.
    pub fn x(&self, i: i64) -> &S {
        &self.u[usize::try_from(i + 4).expect("x index must be in -4..=0")]
    }

    pub fn seeds(&self) -> &[S; 5] {
        &self.u
    }

    /// `u[0]*u[2]*u[4] = x[-4]*x[-2]*x[0]`, the product the closed forms
    /// revolve around.
    pub fn seed_triple_product(&self) -> S {
        self.u[0].clone() * self.u[2].clone() * self.u[4].clone()
    }
}

/// Why an orbit stopped early.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForbiddenCause {
    /// `u[n+1]*u[n+3] = 0`: a zero landed in a denominator factor.
    ZeroDenominatorFactor,
    /// `A[n] + B[n]*u[n]*u[n+2]*u[n+4] = 0`.
    ZeroBracket,
    /// Float-backend overflow/NaN; cannot occur in the exact backend.
    NonFinite,
}

impl std::fmt::Display for ForbiddenCause {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Self::ZeroDenominatorFactor => "zero_denominator_factor",
            Self::ZeroBracket => "zero_bracket",
            Self::NonFinite => "non_finite",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrajectoryStatus {
    Complete,
    /// `index` is the offset of the first value that could not be computed;
    /// the value list holds exactly `index` well-defined entries.
    ForbiddenAt { index: usize, cause: ForbiddenCause },
}

/// An orbit prefix: values indexed from `u[0]`, plus how the run ended.
///
/// `start_label` records the external labeling only (`0` for `u`-indexing,
/// `-4` for `x`-indexing); the value list is identical either way.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<S: Scalar> {
    values: Vec<S>,
    status: TrajectoryStatus,
    start_label: i64,
}

impl<S: Scalar> Trajectory<S> {
    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn status(&self) -> TrajectoryStatus {
        self.status
    }

    pub fn is_complete(&self) -> bool {
        matches!(self.status, TrajectoryStatus::Complete)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// External label of the `i`-th stored value.
    pub fn label(&self, i: usize) -> i64 {
        self.start_label + i as i64
    }

    /// Stored value by external label, if computed.
    pub fn by_label(&self, label: i64) -> Option<&S> {
        let i = usize::try_from(label - self.start_label).ok()?;
        self.values.get(i)
    }

    /// `(label, value)` pairs in order.
    pub fn labeled(&self) -> impl Iterator<Item = (i64, &S)> {
        let start = self.start_label;
        self.values.iter().enumerate().map(move |(i, v)| (start + i as i64, v))
    }
}

/// Iterate the forward-shifted recurrence until `count` values exist
/// (including the five seeds) or the forbidden set is hit.
///
/// Identical inputs produce bit-identical trajectories.
pub fn iterate<S: Scalar>(
    ic: &InitialConditions<S>,
    coeff_a: &CoefficientSequence<S>,
    coeff_b: &CoefficientSequence<S>,
    count: usize,
) -> Result<Trajectory<S>, RecurrenceError> {
    iterate_labeled(ic, coeff_a, coeff_b, count, 0)
}

/// Same orbit as [`iterate`], labeled in `x`-indexing from `x[-4]`.
///
/// The coefficient subscripts coincide: `a[n]` drives the step that produces
/// `x[n+1] = u[n+5]`.
pub fn iterate_x<S: Scalar>(
    ic: &InitialConditions<S>,
    coeff_a: &CoefficientSequence<S>,
    coeff_b: &CoefficientSequence<S>,
    count: usize,
) -> Result<Trajectory<S>, RecurrenceError> {
    iterate_labeled(ic, coeff_a, coeff_b, count, -4)
}

fn iterate_labeled<S: Scalar>(
    ic: &InitialConditions<S>,
    coeff_a: &CoefficientSequence<S>,
    coeff_b: &CoefficientSequence<S>,
    count: usize,
    start_label: i64,
) -> Result<Trajectory<S>, RecurrenceError> {
    if count < 5 {
        return Err(RecurrenceError::CountTooSmall(count));
    }
    let mut values: Vec<S> = Vec::with_capacity(count);
    values.extend(ic.seeds().iter().cloned());
    let mut status = TrajectoryStatus::Complete;

    for idx in 5..count {
        let n = idx - 5;
        let a_n = coeff_a.get(n)?.clone();
        let b_n = coeff_b.get(n)?.clone();

        let pair = values[n + 1].clone() * values[n + 3].clone();
        if pair.is_zero() {
            status = TrajectoryStatus::ForbiddenAt {
                index: idx,
                cause: ForbiddenCause::ZeroDenominatorFactor,
            };
            break;
        }
        let triple = values[n].clone() * values[n + 2].clone() * values[n + 4].clone();
        let bracket = a_n + b_n * triple.clone();
        if bracket.is_zero() {
            status = TrajectoryStatus::ForbiddenAt { index: idx, cause: ForbiddenCause::ZeroBracket };
            break;
        }
        let next = triple / (pair * bracket);
        if !next.is_finite_value() {
            status = TrajectoryStatus::ForbiddenAt { index: idx, cause: ForbiddenCause::NonFinite };
            break;
        }
        values.push(next);
    }

    Ok(Trajectory { values, status, start_label })
}
