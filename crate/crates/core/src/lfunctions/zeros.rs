use super::xi::xi_completed;
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::path::Path;

/// A nontrivial zeta zero rho = 1/2 + d_n + i gamma_n and the scattering
/// energy E_n = rho(1 - rho) it pins.
#[derive(Clone, Copy, Debug)]
pub struct ZetaZero {
    /// 1-based position in the ordered list of zeros with gamma > 0.
    pub index: usize,
    pub rho: Complex64,
    pub gamma_n: f64,
    /// Offset of Re rho from 1/2; identically zero for every zero this crate
    /// produces, but carried so downstream formulas state their assumptions.
    pub d_n: f64,
    pub energy: Complex64,
}

impl ZetaZero {
    pub fn from_gamma(index: usize, gamma_n: f64) -> Self {
        let rho = Complex64::new(0.5, gamma_n);
        // rho(1-rho) = 1/4 + gamma^2 exactly on the critical line; the complex
        // product would add a spurious imaginary rounding residue.
        let energy = Complex64::new(0.25 + gamma_n * gamma_n, 0.0);
        ZetaZero { index, rho, gamma_n, d_n: 0.0, energy }
    }
}

const MAX_COUNT: usize = 100;
const T_START: f64 = 2.0;
const T_MAX: f64 = 120.0;
const SCAN_STEP: f64 = 0.05;

/// Locates the first `count` critical-line zeros by scanning the real-valued
/// function Z(t) = Re xi(1/2 + it) for sign changes and bisecting each one to
/// |delta gamma| < 1e-10. The scan covers t <= 120 (38 zeros).
pub fn find_zeros(count: usize) -> Result<Vec<ZetaZero>> {
    if count > MAX_COUNT {
        return Err(Error::ZeroCount { requested: count, max: MAX_COUNT });
    }
    let mut zeros = Vec::with_capacity(count);
    if count == 0 {
        return Ok(zeros);
    }
    let mut t_prev = T_START;
    let mut z_prev = xi_line(t_prev)?;
    let steps = ((T_MAX - T_START) / SCAN_STEP).ceil() as usize;
    for k in 1..=steps {
        let t = T_START + SCAN_STEP * k as f64;
        let z = xi_line(t)?;
        if z == 0.0 || z_prev.signum() != z.signum() {
            let gamma_n = bisect(t_prev, t, z_prev)?;
            zeros.push(ZetaZero::from_gamma(zeros.len() + 1, gamma_n));
            if zeros.len() == count {
                return Ok(zeros);
            }
        }
        t_prev = t;
        z_prev = z;
    }
    Err(Error::ZeroSearchExhausted { t_max: T_MAX, found: zeros.len() })
}

fn xi_line(t: f64) -> Result<f64> {
    Ok(xi_completed(Complex64::new(0.5, t))?.re)
}

fn bisect(mut lo: f64, mut hi: f64, mut z_lo: f64) -> Result<f64> {
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= 1e-11 {
            return Ok(mid);
        }
        let z_mid = xi_line(mid)?;
        if z_mid == 0.0 {
            return Ok(mid);
        }
        if z_lo.signum() == z_mid.signum() {
            lo = mid;
            z_lo = z_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Reads ordinates from a text file: one positive decimal per line, strictly
/// increasing, `#` comments and blank lines ignored.
pub fn ingest_zeros(path: &Path) -> Result<Vec<ZetaZero>> {
    let text = std::fs::read_to_string(path)?;
    let mut zeros = Vec::new();
    let mut prev = 0.0_f64;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let entry = raw.trim();
        if entry.is_empty() || entry.starts_with('#') {
            continue;
        }
        let gamma_n: f64 = entry
            .parse()
            .map_err(|_| Error::Parse { line, msg: format!("not a number: {entry:?}") })?;
        if !gamma_n.is_finite() || gamma_n <= 0.0 {
            return Err(Error::Parse { line, msg: format!("ordinate must be positive: {entry:?}") });
        }
        if gamma_n <= prev {
            return Err(Error::ZeroOrdering { line });
        }
        prev = gamma_n;
        zeros.push(ZetaZero::from_gamma(zeros.len() + 1, gamma_n));
    }
    Ok(zeros)
}
