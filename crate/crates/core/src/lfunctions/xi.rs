use super::zeta::{rpow, zeta};
use crate::error::Result;
use crate::special::gamma::gamma_complex;
use num_complex::Complex64;

const PI: f64 = std::f64::consts::PI;

/// Completed zeta xi(s) = pi^(-s/2) Gamma(s/2) zeta(s).
///
/// Satisfies xi(s) = xi(1-s) and is real on the critical line, which is what
/// both the zero search and the wave phase normalization rely on. The poles
/// at s = 0 (Gamma) and s = 1 (zeta) surface as kernel errors.
pub fn xi_completed(s: Complex64) -> Result<Complex64> {
    let g = gamma_complex(0.5 * s)?;
    let z = zeta(s)?;
    Ok(rpow(PI, -0.5 * s) * g * z)
}
