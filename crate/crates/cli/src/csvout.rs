//! Trajectory CSV output.
//!
//! One header line, one `label,value` row per computed term, and — when the
//! orbit hit the forbidden set — a trailing comment recording where and why.
//! Values print via [`Scalar::display_full`] (`p/q` exactly in rational mode,
//! 17 significant digits in float mode), so output is byte-stable across
//! runs.

use std::io::{self, Write};

use rde5::numerics::Scalar;
use rde5::recurrence::{Trajectory, TrajectoryStatus};

pub fn write_trajectory<S: Scalar, W: Write + ?Sized>(
    trajectory: &Trajectory<S>,
    value_column: &str,
    w: &mut W,
) -> io::Result<()> {
    writeln!(w, "n,{value_column}")?;
    for (label, value) in trajectory.labeled() {
        writeln!(w, "{label},{}", value.display_full())?;
    }
    if let TrajectoryStatus::ForbiddenAt { index, cause } = trajectory.status() {
        writeln!(w, "# forbidden_at={} cause={}", trajectory.label(index), cause)?;
    }
    Ok(())
}
