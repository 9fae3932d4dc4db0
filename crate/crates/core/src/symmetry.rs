//! Lie point symmetry characteristics of the recurrence and numerical
//! verification of the linearized symmetry condition.
//!
//! Writing the equation as `u[n+5] = Omega(u[n], ..., u[n+4])`, a
//! characteristic `Q(n, u)` generates a symmetry exactly when
//!
//! ```text
//! Q(n+5, Omega) - sum_{j=0}^{4} (dOmega/du[n+j]) * Q(n+j, u[n+j]) = 0
//! ```
//!
//! on solutions. For this equation the admissible characteristics are linear,
//! `Q(n, u) = lambda^n * u`, with `lambda` ranging over the four primitive
//! sixth-root powers `-beta, -conj(beta), conj(beta), beta` where
//! `beta = exp(i*pi/3)`. All four share the defining constraint
//! `lambda^n + lambda^(n+2) + lambda^(n+4) = 0`.
//!
//! Everything here evaluates in complex floats: the residual uses the
//! partial derivatives of `Omega` in closed form (finite differences exist
//! as a cross-check, not as the primary route), and the beta powers come
//! from the exact six-entry table in [`crate::numerics`], so residuals stay
//! at rounding level no matter how large `n` gets.

use num_complex::Complex64;
use thiserror::Error;

use crate::numerics::beta_power;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SymmetryError {
    #[error("Omega is undefined at this point (zero denominator factor or bracket)")]
    OmegaUndefined,
    #[error("canonical coordinate needs a nonzero argument")]
    ZeroArgument,
}

/// The four symmetry characteristics `Q(n, u) = lambda^n * u`.
///
/// `lambda` is stored as its exponent in the beta table:
/// `-beta = beta^4`, `-conj(beta) = beta^2`, `conj(beta) = beta^5`,
/// `beta = beta^1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Characteristic {
    K1,
    K2,
    K3,
    K4,
}

impl Characteristic {
    pub const ALL: [Characteristic; 4] = [Self::K1, Self::K2, Self::K3, Self::K4];

    fn beta_exponent(self) -> i64 {
        match self {
            Self::K1 => 4,
            Self::K2 => 2,
            Self::K3 => 5,
            Self::K4 => 1,
        }
    }

    /// `lambda^n`, the basis sequence of this characteristic.
    pub fn basis(self, n: i64) -> Complex64 {
        beta_power(self.beta_exponent() * n)
    }

    /// `Q(n, u) = lambda^n * u`.
    pub fn value(self, n: i64, u: Complex64) -> Complex64 {
        self.basis(n) * u
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::K1 => "K1",
            Self::K2 => "K2",
            Self::K3 => "K3",
            Self::K4 => "K4",
        }
    }
}

/// `|lambda^n + lambda^(n+2) + lambda^(n+4)|`: the constraint every basis
/// sequence must satisfy. Table-exact, so this is rounding noise only.
pub fn beta_constraint_residual(c: Characteristic, n: i64) -> f64 {
    (c.basis(n) + c.basis(n + 2) + c.basis(n + 4)).norm()
}

/// A point in the extended space where the symmetry condition is evaluated:
/// the window `u[n]..u[n+4]` together with the coefficients acting there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetryPoint {
    pub n: i64,
    pub u: [Complex64; 5],
    pub coeff_a: Complex64,
    pub coeff_b: Complex64,
}

impl SymmetryPoint {
    fn denominator_parts(&self) -> Result<(Complex64, Complex64, Complex64), SymmetryError> {
        let pair = self.u[1] * self.u[3];
        if pair == Complex64::ZERO {
            return Err(SymmetryError::OmegaUndefined);
        }
        let triple = self.u[0] * self.u[2] * self.u[4];
        let bracket = self.coeff_a + self.coeff_b * triple;
        if bracket == Complex64::ZERO {
            return Err(SymmetryError::OmegaUndefined);
        }
        Ok((pair, triple, bracket))
    }
}

/// `Omega = u[n]*u[n+2]*u[n+4] / (u[n+1]*u[n+3]*(A + B*u[n]*u[n+2]*u[n+4]))`.
pub fn omega(p: &SymmetryPoint) -> Result<Complex64, SymmetryError> {
    let (pair, triple, bracket) = p.denominator_parts()?;
    Ok(triple / (pair * bracket))
}

/// The five partial derivatives of `Omega`, in closed form.
///
/// With `D` the bracket and `pair = u[1]*u[3]`:
/// even offsets get `(product of the other two even u) * A / (pair * D^2)`,
/// odd offsets get `-triple / (u_odd^2 * u_other_odd * D)`.
pub fn omega_partials(p: &SymmetryPoint) -> Result<[Complex64; 5], SymmetryError> {
    let (pair, triple, bracket) = p.denominator_parts()?;
    let d2 = bracket * bracket;
    let even = |other: Complex64| other * p.coeff_a / (pair * d2);
    let odd = |this: Complex64, other: Complex64| -triple / (this * this * other * bracket);
    Ok([
        even(p.u[2] * p.u[4]),
        odd(p.u[1], p.u[3]),
        even(p.u[0] * p.u[4]),
        odd(p.u[3], p.u[1]),
        even(p.u[0] * p.u[2]),
    ])
}

/// Central-difference cross-check of [`omega_partials`] with a real step.
pub fn omega_partials_fd(p: &SymmetryPoint, step: f64) -> Result<[Complex64; 5], SymmetryError> {
    let mut out = [Complex64::ZERO; 5];
    for (j, slot) in out.iter_mut().enumerate() {
        let mut plus = *p;
        plus.u[j] += Complex64::new(step, 0.0);
        let mut minus = *p;
        minus.u[j] -= Complex64::new(step, 0.0);
        *slot = (omega(&plus)? - omega(&minus)?) / Complex64::new(2.0 * step, 0.0);
    }
    Ok(out)
}

/// Linearized symmetry condition residual for an arbitrary candidate
/// characteristic, supplied as a closure. This is the hook the negative
/// controls use; real characteristics go through [`linearized_residual`].
pub fn linearized_residual_of<Q>(q: Q, p: &SymmetryPoint) -> Result<Complex64, SymmetryError>
where
    Q: Fn(i64, Complex64) -> Complex64,
{
    let w = omega(p)?;
    let partials = omega_partials(p)?;
    let mut residual = q(p.n + 5, w);
    for (j, partial) in partials.iter().enumerate() {
        residual -= *partial * q(p.n + j as i64, p.u[j]);
    }
    Ok(residual)
}

/// `S^5 Q - X Omega` at the given point for one of the four characteristics.
/// Zero on symmetries up to rounding.
pub fn linearized_residual(
    c: Characteristic,
    p: &SymmetryPoint,
) -> Result<Complex64, SymmetryError> {
    linearized_residual_of(|n, u| c.value(n, u), p)
}

/// Residual magnitude scaled by `max(1, |Omega|)`, the comparison quantity
/// for pass/fail thresholds.
pub fn scaled_residual_of<Q>(q: Q, p: &SymmetryPoint) -> Result<f64, SymmetryError>
where
    Q: Fn(i64, Complex64) -> Complex64,
{
    let w = omega(p)?;
    let res = linearized_residual_of(q, p)?;
    Ok(res.norm() / w.norm().max(1.0))
}

/// Canonical coordinate `S[n] = beta^(-n) * ln|u[n]|`, in which the `K4`
/// symmetry acts by translation.
pub fn canonical_coordinate(n: i64, u: Complex64) -> Result<Complex64, SymmetryError> {
    if u == Complex64::ZERO {
        return Err(SymmetryError::ZeroArgument);
    }
    Ok(beta_power(-n) * u.norm().ln())
}

/// `Vtilde[n] = S[n]*beta^n + S[n+2]*beta^(n+2) + S[n+4]*beta^(n+4)`.
///
/// On a real orbit this collapses to `ln|u[n]*u[n+2]*u[n+4]|`, so
/// `exp(-Vtilde[n])` reproduces `|V[n]|`.
pub fn vtilde(n: i64, s_n: Complex64, s_n2: Complex64, s_n4: Complex64) -> Complex64 {
    s_n * beta_power(n) + s_n2 * beta_power(n + 2) + s_n4 * beta_power(n + 4)
}

/// `Vtilde[n]` straight from three orbit values `u[n], u[n+2], u[n+4]`.
pub fn vtilde_from_orbit(n: i64, u_n: f64, u_n2: f64, u_n4: f64) -> Result<Complex64, SymmetryError> {
    let s_n = canonical_coordinate(n, Complex64::new(u_n, 0.0))?;
    let s_n2 = canonical_coordinate(n + 2, Complex64::new(u_n2, 0.0))?;
    let s_n4 = canonical_coordinate(n + 4, Complex64::new(u_n4, 0.0))?;
    Ok(vtilde(n, s_n, s_n2, s_n4))
}
