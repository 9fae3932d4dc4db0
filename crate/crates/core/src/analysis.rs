//! Dynamical analysis of orbits: periodicity, the period-six criterion, the
//! `a = 1` decay structure, and the per-residue special-case solution tables.
//!
//! For constant coefficients the closed form makes two statements testable:
//!
//! - the orbit is six-periodic when `x[-4]*x[-2]*x[0] = (1-a)/b` with
//!   `a != 1` (every product bracket collapses to 1), and unconditionally
//!   when `a = -1` — the criterion is sufficient, not necessary;
//! - for `a = 1` every residue class decays like `n^(-1/3)`, because the
//!   bracket ratios telescope into `prod (1 - 2/(6k+j+2))` up to a bounded
//!   head factor.
//!
//! Period detection compares full tails rather than isolated value pairs, so
//! a coincidental repeat cannot fake a period. The rational backend compares
//! exactly; floats use a relative tolerance.

use thiserror::Error;

use crate::closedform::ClosedFormError;
use crate::numerics::Scalar;
use crate::recurrence::{
    iterate_x, CoefficientSequence, ForbiddenCause, InitialConditions, RecurrenceError,
    Trajectory, TrajectoryStatus,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AnalysisError {
    #[error(transparent)]
    Recurrence(#[from] RecurrenceError),
    #[error(transparent)]
    ClosedForm(#[from] ClosedFormError),
    #[error("trajectory has {len} values; detecting periods up to {max_period} needs {need}")]
    TrajectoryTooShort { len: usize, max_period: usize, need: usize },
    #[error("period detection needs a complete trajectory")]
    TrajectoryIncomplete,
    #[error("orbit hit the forbidden set at index {index} ({cause})")]
    ForbiddenOrbit { index: usize, cause: ForbiddenCause },
    #[error("decay analysis needs n_max >= {need}, got {got}")]
    HorizonTooShort { got: usize, need: usize },
}

/// How equality was judged when a period was detected.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exactness {
    Exact,
    Approximate { rel_tol: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodReport {
    /// Smallest period `p <= max_period` whose tail repeats, if any.
    pub detected_period: Option<usize>,
    /// First index from which the repetition holds; 0 when periodic from the
    /// start. Meaningful only when a period was detected.
    pub first_index: usize,
    pub exactness: Exactness,
}

/// Smallest `p <= max_period` such that `values[k+p] = values[k]` for every
/// `k` from some start index onward. The repeating tail must span at least
/// `2 * max_period` values, so a coincidental repeat of a few trailing
/// values cannot pass as a period.
pub fn detect_period<S: Scalar>(
    trajectory: &Trajectory<S>,
    max_period: usize,
    rel_tol: f64,
) -> Result<PeriodReport, AnalysisError> {
    if !trajectory.is_complete() {
        return Err(AnalysisError::TrajectoryIncomplete);
    }
    let values = trajectory.values();
    let need = 3 * max_period.max(1);
    if values.len() < need {
        return Err(AnalysisError::TrajectoryTooShort { len: values.len(), max_period, need });
    }
    let exactness =
        if S::EXACT { Exactness::Exact } else { Exactness::Approximate { rel_tol } };
    let eq = |x: &S, y: &S| x.approx_eq(y, rel_tol);

    for p in 1..=max_period {
        // walk back from the end to the first mismatch
        let mut first = values.len() - p;
        for k in (0..values.len() - p).rev() {
            if eq(&values[k], &values[k + p]) {
                first = k;
            } else {
                break;
            }
        }
        if values.len() - first >= 2 * max_period {
            return Ok(PeriodReport { detected_period: Some(p), first_index: first, exactness });
        }
    }
    Ok(PeriodReport { detected_period: None, first_index: 0, exactness })
}

/// The six-periodicity criterion for constant coefficients:
/// `x[-4]*x[-2]*x[0] = (1-a)/b` with `a != 1`.
///
/// Exact equality in the rational backend, `1e-12` tolerance in floats.
/// Sufficient but not necessary: at `a = -1` every admissible orbit is
/// six-periodic whether or not this holds.
pub fn period_six_criterion<S: Scalar>(ic: &InitialConditions<S>, a: &S, b: &S) -> bool {
    if b.is_zero() || a.approx_eq(&S::one(), 1e-12) {
        return false;
    }
    let lhs = ic.seed_triple_product() * b.clone();
    let rhs = S::one() - a.clone();
    lhs.approx_eq(&rhs, 1e-12)
}

/// Head product of the `a = 1` decay factorization:
/// `prod_{k=k_start}^{n0} (1 - 2/(6k+j+2))` for residue class `j`.
///
/// For `j = 0` the `k = 0` factor is exactly zero, so the product is only
/// exposed from `k_start = 1` there; every other class starts at 0.
pub fn gamma_head<S: Scalar>(class_j: usize, n0: usize) -> S {
    let k_start = gamma_start(class_j);
    let mut prod = S::one();
    for k in k_start..=n0 {
        let m = S::from_int((6 * k + class_j + 2) as i64);
        prod = prod * (S::one() - S::from_int(2) / m);
    }
    prod
}

/// First factor index where `6k + j + 2 > 2`.
pub fn gamma_start(class_j: usize) -> usize {
    usize::from(class_j == 0)
}

#[derive(Debug, Clone, Copy)]
pub struct ConvergeOptions {
    /// Largest x-index to iterate to.
    pub n_max: usize,
    /// Residue class `j` (for `x[6n+j-4]`) used for the slope fit and the
    /// head product. Default 4, the `x[6n]` class.
    pub class_j: usize,
    /// Head-product cutoff; chosen automatically from `|b*P|` when absent.
    pub n0: Option<usize>,
    /// Sextet range for the log-log slope fit.
    pub fit_range: (usize, usize),
}

impl Default for ConvergeOptions {
    fn default() -> Self {
        Self { n_max: 6000, class_j: 4, n0: None, fit_range: (100, 1000) }
    }
}

/// Decay diagnostics for the `a = 1` case.
#[derive(Debug, Clone)]
pub struct DecayReport {
    /// Largest `|x[n]|` over the final sextet of the computed orbit.
    pub max_abs_tail: f64,
    /// Least-squares slope of `ln|x[6n+j-4]|` against `ln n` over the fit
    /// range; the telescoped product predicts -1/3.
    pub exponent_estimate: f64,
    /// Head product `prod (1 - 2/(6k+j+2))` up to `n0`.
    pub gamma_n0: f64,
    pub n0: usize,
    pub class_j: usize,
    /// Whether any iteration bracket came within `1e-6` of zero; decay
    /// conclusions are unreliable for such orbits.
    pub near_singular: bool,
}

/// Iterate `x[n+1] = x[n]x[n-2]x[n-4] / (x[n-1]x[n-3](1 + b*x[n]x[n-2]x[n-4]))`
/// and report how the orbit decays.
///
/// The orbit must stay off the forbidden set for the whole horizon; brackets
/// that merely come close to zero set `near_singular` instead of failing.
pub fn convergence_report(
    ic: &InitialConditions<f64>,
    b: f64,
    opts: &ConvergeOptions,
) -> Result<DecayReport, AnalysisError> {
    if opts.n_max < 600 {
        return Err(AnalysisError::HorizonTooShort { got: opts.n_max, need: 600 });
    }
    let one = CoefficientSequence::constant(1.0f64).unwrap();
    let b_seq = CoefficientSequence::constant(b).map_err(AnalysisError::Recurrence)?;
    let t = iterate_x(ic, &one, &b_seq, opts.n_max + 5)?;
    if let TrajectoryStatus::ForbiddenAt { index, cause } = t.status() {
        return Err(AnalysisError::ForbiddenOrbit { index, cause });
    }
    let values = t.values();

    let mut near_singular = false;
    for m in 0..values.len() - 5 {
        let bracket = 1.0 + b * values[m] * values[m + 2] * values[m + 4];
        if bracket.abs() < 1e-6 {
            near_singular = true;
            break;
        }
    }

    let max_abs_tail =
        values[values.len() - 6..].iter().fold(0.0f64, |acc, v| acc.max(v.abs()));

    // class j in x[6n+j-4] sits at u-offset 6n+j
    let class_j = opts.class_j.min(5);
    let (fit_lo, fit_hi) = opts.fit_range;
    let mut points = Vec::new();
    for n in fit_lo..=fit_hi {
        let idx = 6 * n + class_j;
        if idx >= values.len() {
            break;
        }
        let v = values[idx].abs();
        if v > 0.0 && v.is_finite() {
            points.push(((n as f64).ln(), v.ln()));
        }
    }
    let exponent_estimate = least_squares_slope(&points);

    let p = ic.seed_triple_product();
    let n0 = opts.n0.unwrap_or_else(|| auto_n0(class_j, (b * p).abs()));
    let gamma_n0 = gamma_head::<f64>(class_j, n0);

    Ok(DecayReport { max_abs_tail, exponent_estimate, gamma_n0, n0, class_j, near_singular })
}

/// Smallest `n0 >= gamma_start` with `(6(n0+1)+j+2) * |bP| > 10`, so the
/// approximated tail factors are within 10% of the exact brackets.
fn auto_n0(class_j: usize, abs_bp: f64) -> usize {
    let start = gamma_start(class_j);
    if abs_bp <= 0.0 {
        return start;
    }
    let mut n0 = start;
    while ((6 * (n0 + 1) + class_j + 2) as f64) * abs_bp <= 10.0 && n0 < 10_000 {
        n0 += 1;
    }
    n0
}

fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    if points.len() < 2 {
        return f64::NAN;
    }
    let (sx, sy) = points.iter().fold((0.0, 0.0), |(sx, sy), (x, y)| (sx + x, sy + y));
    let (mx, my) = (sx / n, sy / n);
    let (num, den) = points.iter().fold((0.0, 0.0), |(num, den), (x, y)| {
        (num + (x - mx) * (y - my), den + (x - mx) * (x - mx))
    });
    num / den
}

/// The four special-case regimes: `a = 1` or `a = -1`, `b = 1` or `b = -1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpecialCase {
    AOneBPlus,
    AOneBMinus,
    AMinusOneBPlus,
    AMinusOneBMinus,
}

impl SpecialCase {
    pub fn coefficients<S: Scalar>(self) -> (S, S) {
        match self {
            Self::AOneBPlus => (S::one(), S::one()),
            Self::AOneBMinus => (S::one(), -S::one()),
            Self::AMinusOneBPlus => (-S::one(), S::one()),
            Self::AMinusOneBMinus => (-S::one(), -S::one()),
        }
    }
}

/// `x[6n+j-4]` from the hand-expanded per-residue tables.
///
/// For `a = 1` these are the six explicit products
/// `x[j-4] * prod (1 + (6k+j) b P) / (1 + (6k+j+2) b P)` — with the leading
/// factor of the `j = 3` class being `x[-1]` (consistency with the general
/// formula forces it; see the equality test against
/// [`eval_solution_x_constant`]). For `a = -1` numerator and denominator
/// coincide term by term, so the table returns the class seed unchanged.
pub fn special_case_values<S: Scalar>(
    case: SpecialCase,
    ic: &InitialConditions<S>,
    j: usize,
    n: usize,
) -> Result<S, AnalysisError> {
    if j > 5 {
        return Err(AnalysisError::ClosedForm(ClosedFormError::InvalidResidueClass { j }));
    }
    let (a, b): (S, S) = case.coefficients();
    let p = ic.seed_triple_product();
    let bp = b.clone() * p.clone();

    let seed = |denominator_bracket: S| -> Result<S, AnalysisError> {
        if j < 5 {
            return Ok(ic.u(j).clone());
        }
        for index in [1usize, 3] {
            if ic.u(index).is_zero() {
                return Err(ClosedFormError::ZeroInitialCondition { index }.into());
            }
        }
        if denominator_bracket.is_zero() {
            return Err(ClosedFormError::ZeroDenominatorBracket { index: 1 }.into());
        }
        Ok(p.clone() / (ic.u(1).clone() * ic.u(3).clone() * denominator_bracket))
    };

    match case {
        SpecialCase::AOneBPlus | SpecialCase::AOneBMinus => {
            let mut result = seed(S::one() + bp.clone())?;
            for k in 0..n {
                let num = S::one() + S::from_int((6 * k + j) as i64) * bp.clone();
                if num.is_zero() {
                    return Err(
                        ClosedFormError::ZeroDenominatorBracket { index: 6 * k + j }.into()
                    );
                }
                let den = S::one() + S::from_int((6 * k + j + 2) as i64) * bp.clone();
                if den.is_zero() {
                    return Err(
                        ClosedFormError::ZeroDenominatorBracket { index: 6 * k + j + 2 }.into()
                    );
                }
                result = result * num / den;
            }
            Ok(result)
        }
        SpecialCase::AMinusOneBPlus | SpecialCase::AMinusOneBMinus => {
            // factor = (-1)^j + bP * (1 - (-1)^j)/2, identical in numerator
            // and denominator of every product term
            let sign = if j.is_multiple_of(2) { S::one() } else { -S::one() };
            let half_swing = (S::one() - sign.clone()) / S::from_int(2);
            let factor = sign + bp * half_swing;
            if factor.is_zero() {
                return Err(ClosedFormError::ZeroDenominatorBracket { index: j }.into());
            }
            seed(a + b * p.clone())
        }
    }
}
