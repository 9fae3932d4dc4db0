//! Command implementations.
//!
//! Each command returns its process exit code through `Ok`: 0 for
//! success/pass, 1 for a failed check. `Err` is reserved for configuration
//! and usage problems, which the binary maps to exit code 2.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use thiserror::Error;

use rde5::analysis::{
    convergence_report, detect_period, period_six_criterion, ConvergeOptions, Exactness,
};
use rde5::closedform::eval_solution_u;
use rde5::numerics::{Scalar, FLOAT_REL_TOL};
use rde5::recurrence::{iterate, iterate_x, CoefficientSequence, InitialConditions, Trajectory,
    TrajectoryStatus};
use rde5::sampling;
use rde5::symmetry::{scaled_residual_of, Characteristic};
use rde5::Rational;

use crate::config::{Backend, ConfigError, IndexForm, Merged};
use crate::csvout;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

const SYMCHECK_THRESHOLD: f64 = 1e-10;
const CONTROL_THRESHOLD: f64 = 1e-6;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Parsed orbit inputs for one backend.
struct OrbitSetup<S: Scalar> {
    ic: InitialConditions<S>,
    coeff_a: CoefficientSequence<S>,
    coeff_b: CoefficientSequence<S>,
}

fn orbit_setup<S: Scalar>(merged: &Merged) -> Result<OrbitSetup<S>, CliError> {
    Ok(OrbitSetup {
        ic: crate::config::parse_seeds(merged.require_ic()?)?,
        coeff_a: crate::config::parse_coefficients("a", merged.require_a()?)?,
        coeff_b: crate::config::parse_coefficients("b", merged.require_b()?)?,
    })
}

/// Largest index to compute, per labeling form, turned into a value count.
fn count_for(form: IndexForm, n_max: usize) -> usize {
    match form {
        IndexForm::X => n_max + 5,
        IndexForm::U => n_max + 1,
    }
}

fn run_orbit<S: Scalar>(
    setup: &OrbitSetup<S>,
    form: IndexForm,
    count: usize,
) -> Result<Trajectory<S>, CliError> {
    match form {
        IndexForm::X => iterate_x(&setup.ic, &setup.coeff_a, &setup.coeff_b, count),
        IndexForm::U => iterate(&setup.ic, &setup.coeff_a, &setup.coeff_b, count),
    }
    .map_err(|e| usage(e.to_string()))
}

fn open_out(path: &Option<PathBuf>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(std::io::sink()), // caller falls back to the report writer
    })
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

pub fn simulate(merged: &Merged, report: &mut dyn Write) -> Result<i32, CliError> {
    let form = merged.form.unwrap_or_default();
    let n_max = merged.n_max.unwrap_or(120);
    let column = match form {
        IndexForm::X => "x_n",
        IndexForm::U => "u_n",
    };
    match merged.backend.unwrap_or_default() {
        Backend::Rational => {
            let setup = orbit_setup::<Rational>(merged)?;
            let t = run_orbit(&setup, form, count_for(form, n_max))?;
            emit_csv(&t, column, merged, report)
        }
        Backend::Float => {
            let setup = orbit_setup::<f64>(merged)?;
            let t = run_orbit(&setup, form, count_for(form, n_max))?;
            emit_csv(&t, column, merged, report)
        }
    }
}

fn emit_csv<S: Scalar>(
    t: &Trajectory<S>,
    column: &str,
    merged: &Merged,
    report: &mut dyn Write,
) -> Result<i32, CliError> {
    if merged.out.is_some() {
        let mut w = open_out(&merged.out)?;
        csvout::write_trajectory(t, column, &mut w)?;
        w.flush()?;
    } else {
        csvout::write_trajectory(t, column, report)?;
    }
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------------------
// compare
// ---------------------------------------------------------------------------

struct ClassSummary {
    compared: usize,
    mismatches: usize,
    max_diff: f64,
}

pub fn compare(merged: &Merged, report: &mut dyn Write) -> Result<i32, CliError> {
    let n_max = merged.n_max.unwrap_or(120);
    let tol = merged.tol.unwrap_or(FLOAT_REL_TOL);
    match merged.backend.unwrap_or_default() {
        Backend::Rational => compare_backend::<Rational>(merged, n_max, tol, report),
        Backend::Float => compare_backend::<f64>(merged, n_max, tol, report),
    }
}

fn compare_backend<S: Scalar>(
    merged: &Merged,
    n_max: usize,
    tol: f64,
    report: &mut dyn Write,
) -> Result<i32, CliError> {
    let setup = orbit_setup::<S>(merged)?;
    let t = run_orbit(&setup, IndexForm::X, count_for(IndexForm::X, n_max))?;

    writeln!(report, "backend: {}", S::BACKEND)?;
    writeln!(report, "indices: x[-4]..=x[{n_max}]")?;
    if let TrajectoryStatus::ForbiddenAt { index, cause } = t.status() {
        writeln!(
            report,
            "orbit: forbidden at x[{}] ({cause}); comparing the well-defined prefix",
            t.label(index)
        )?;
    }

    let mut classes: [ClassSummary; 6] =
        std::array::from_fn(|_| ClassSummary { compared: 0, mismatches: 0, max_diff: 0.0 });
    for x_index in -4..=(n_max as i64) {
        let offset = (x_index + 4) as usize;
        let (j, n) = (offset % 6, offset / 6);
        let Some(oracle) = t.by_label(x_index) else { break };
        let summary = &mut classes[j];
        summary.compared += 1;
        match eval_solution_u(j, n, &setup.ic, &setup.coeff_a, &setup.coeff_b) {
            Ok(closed) => {
                let matches = if S::EXACT { &closed == oracle } else { closed.approx_eq(oracle, tol) };
                if !matches {
                    summary.mismatches += 1;
                }
                let diff = (closed - oracle.clone()).abs().to_f64_lossy();
                if diff > summary.max_diff {
                    summary.max_diff = diff;
                }
            }
            Err(e) => {
                summary.mismatches += 1;
                writeln!(report, "closed form failed at x[{x_index}]: {e}")?;
            }
        }
    }

    let mut total_mismatches = 0usize;
    let mut max_diff = 0.0f64;
    for (j, s) in classes.iter().enumerate() {
        writeln!(
            report,
            "class x[6n{}]: compared {}, mismatches {}, max |diff| {:.3e}",
            ["-4", "-3", "-2", "-1", "", "+1"][j],
            s.compared,
            s.mismatches,
            s.max_diff
        )?;
        total_mismatches += s.mismatches;
        max_diff = max_diff.max(s.max_diff);
    }
    if S::EXACT {
        if total_mismatches == 0 {
            writeln!(report, "max_discrepancy: 0 (exact)")?;
        } else {
            writeln!(report, "max_discrepancy: {max_diff:.3e} (exact mode, MUST be 0)")?;
        }
    } else {
        writeln!(report, "max_discrepancy: {max_diff:.3e} (tolerance {tol:.1e} relative)")?;
    }

    let pass = total_mismatches == 0;
    writeln!(report, "status: {}", if pass { "PASS" } else { "FAIL" })?;
    Ok(if pass { EXIT_OK } else { EXIT_CHECK_FAILED })
}

// ---------------------------------------------------------------------------
// symcheck
// ---------------------------------------------------------------------------

pub fn symcheck(
    merged: &Merged,
    negative_control: bool,
    report: &mut dyn Write,
) -> Result<i32, CliError> {
    let seed = merged.seed.unwrap_or(42);
    let samples = merged.samples.unwrap_or(1000);
    writeln!(report, "seed: {seed}, samples: {samples}")?;
    if samples == 0 {
        writeln!(report, "warning: zero samples requested; PASS is vacuous")?;
        writeln!(report, "status: PASS")?;
        return Ok(EXIT_OK);
    }

    let mut rng = sampling::rng_from_seed(seed);
    let points: Vec<_> = (0..samples).map(|_| sampling::symmetry_point(&mut rng)).collect();

    let mut all_pass = true;
    for c in Characteristic::ALL {
        let mut max_res = 0.0f64;
        for p in &points {
            let r = scaled_residual_of(|n, u| c.value(n, u), p)
                .expect("sampled points keep Omega well-defined");
            max_res = max_res.max(r);
        }
        let pass = max_res < SYMCHECK_THRESHOLD;
        all_pass &= pass;
        writeln!(
            report,
            "{}: max scaled residual {max_res:.3e} {}",
            c.name(),
            if pass { "PASS" } else { "FAIL" }
        )?;
    }

    if negative_control {
        // planted non-symmetry Q(n, u) = u: must fail at essentially every point
        let mut exceeded = 0usize;
        for p in &points {
            let r = scaled_residual_of(|_, u| u, p)
                .expect("sampled points keep Omega well-defined");
            if r > CONTROL_THRESHOLD {
                exceeded += 1;
            }
        }
        let fraction = exceeded as f64 / samples as f64;
        let control_ok = fraction >= 0.99;
        all_pass &= control_ok;
        writeln!(
            report,
            "control (planted non-symmetry): residual above {CONTROL_THRESHOLD:.0e} at {:.1}% of points — FAIL for the control is expected{}",
            fraction * 100.0,
            if control_ok { "" } else { "; TOO FEW FAILURES" }
        )?;
    }

    writeln!(report, "status: {}", if all_pass { "PASS" } else { "FAIL" })?;
    Ok(if all_pass { EXIT_OK } else { EXIT_CHECK_FAILED })
}

// ---------------------------------------------------------------------------
// period
// ---------------------------------------------------------------------------

pub fn period(
    merged: &Merged,
    expect: Option<usize>,
    report: &mut dyn Write,
) -> Result<i32, CliError> {
    let n_max = merged.n_max.unwrap_or(120);
    let max_period = merged.max_period.unwrap_or(24);
    let tol = merged.tol.unwrap_or(FLOAT_REL_TOL);
    match merged.backend.unwrap_or_default() {
        Backend::Rational => period_backend::<Rational>(merged, n_max, max_period, tol, expect, report),
        Backend::Float => period_backend::<f64>(merged, n_max, max_period, tol, expect, report),
    }
}

fn period_backend<S: Scalar>(
    merged: &Merged,
    n_max: usize,
    max_period: usize,
    tol: f64,
    expect: Option<usize>,
    report: &mut dyn Write,
) -> Result<i32, CliError> {
    let form = merged.form.unwrap_or_default();
    let setup = orbit_setup::<S>(merged)?;
    let t = run_orbit(&setup, form, count_for(form, n_max))?;
    if let TrajectoryStatus::ForbiddenAt { index, cause } = t.status() {
        writeln!(report, "orbit: forbidden at index {} ({cause})", t.label(index))?;
        writeln!(report, "period: undefined (orbit is not complete)")?;
        return Ok(EXIT_CHECK_FAILED);
    }
    let r = detect_period(&t, max_period, tol).map_err(|e| usage(e.to_string()))?;
    let exactness = match r.exactness {
        Exactness::Exact => "exact".to_string(),
        Exactness::Approximate { rel_tol } => format!("within relative {rel_tol:.1e}"),
    };
    match r.detected_period {
        Some(p) => {
            writeln!(report, "period: {p} ({exactness}), first_index: {}", r.first_index)?;
            if p == 6 {
                note_on_criterion(&setup, report)?;
            }
        }
        None => writeln!(report, "period: none (searched p <= {max_period}, {exactness})")?,
    }
    let code = match expect {
        Some(want) => {
            let pass = r.detected_period == Some(want);
            writeln!(report, "expected period {want}: {}", if pass { "PASS" } else { "FAIL" })?;
            if pass {
                EXIT_OK
            } else {
                EXIT_CHECK_FAILED
            }
        }
        None => EXIT_OK,
    };
    Ok(code)
}

/// For constant coefficients, relate the verdict to the product criterion
/// `x[-4]*x[-2]*x[0] = (1-a)/b`.
fn note_on_criterion<S: Scalar>(
    setup: &OrbitSetup<S>,
    report: &mut dyn Write,
) -> Result<(), CliError> {
    let (Some(a), Some(b)) = (setup.coeff_a.as_constant(), setup.coeff_b.as_constant()) else {
        return Ok(());
    };
    if period_six_criterion(&setup.ic, a, b) {
        writeln!(report, "note: the product criterion x[-4]*x[-2]*x[0] = (1-a)/b holds")?;
    } else {
        writeln!(
            report,
            "note: six-periodic although x[-4]*x[-2]*x[0] != (1-a)/b — the criterion is sufficient, not necessary"
        )?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// converge
// ---------------------------------------------------------------------------

pub fn converge(merged: &Merged, report: &mut dyn Write) -> Result<i32, CliError> {
    // decay analysis is float-only: a 6000-step exact orbit is astronomically
    // large, and the slope fit is a float quantity anyway
    let setup = orbit_setup::<f64>(merged)?;
    let a = setup
        .coeff_a
        .as_constant()
        .ok_or_else(|| usage("converge needs a constant coefficient a = 1"))?;
    if (a - 1.0).abs() > 1e-12 {
        return Err(usage(format!("converge analyzes the a = 1 regime; got a = {a}")));
    }
    let b = *setup
        .coeff_b
        .as_constant()
        .ok_or_else(|| usage("converge needs a constant coefficient b"))?;

    let opts = ConvergeOptions { n_max: merged.n_max.unwrap_or(6000), ..Default::default() };
    match convergence_report(&setup.ic, b, &opts) {
        Ok(r) => {
            writeln!(report, "orbit: complete through x[{}]", opts.n_max)?;
            writeln!(report, "max_abs_tail: {:.6e}", r.max_abs_tail)?;
            writeln!(
                report,
                "exponent_estimate: {:.4} (ln|x| vs ln n over sextets {}..={}, class j={})",
                r.exponent_estimate, opts.fit_range.0, opts.fit_range.1, r.class_j
            )?;
            writeln!(report, "gamma_head: {:.6e} (n0 = {}, class j = {})", r.gamma_n0, r.n0, r.class_j)?;
            writeln!(report, "near_singular: {}", r.near_singular)?;
            writeln!(report, "status: ok")?;
            Ok(EXIT_OK)
        }
        Err(rde5::analysis::AnalysisError::ForbiddenOrbit { index, cause }) => {
            writeln!(report, "orbit: forbidden at index {index} ({cause})")?;
            writeln!(report, "status: forbidden")?;
            Ok(EXIT_CHECK_FAILED)
        }
        Err(e) => Err(usage(e.to_string())),
    }
}
