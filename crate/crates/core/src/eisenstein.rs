//! Epstein zeta function of the lattice Z tau + Z, both as a brute-force
//! lattice sum (the convergent half-plane, used as an independent check) and
//! through its Fourier-Bessel expansion, which is the analytic continuation
//! the spectral problem actually runs on.

use crate::error::{Error, Result};
use crate::lfunctions::zeta::{rpow, zeta};
use crate::modular::{fundamental_reduce, UpperHalfPoint};
use crate::special::bessel::{bessel_k, BesselOrder};
use crate::special::gamma::gamma_complex;
use num_complex::Complex64;
use rayon::prelude::*;

const PI: f64 = std::f64::consts::PI;

/// Most Fourier coefficients ever needed: the reduced domain has y >= 0.866,
/// so the K-Bessel factor kills terms long before this.
const MAX_FOURIER_TERMS: usize = 64;

/// Result of a truncated lattice sum, with a bound on the dropped tail.
#[derive(Clone, Copy, Debug)]
pub struct EpsteinValue {
    pub value: Complex64,
    pub error_estimate: f64,
}

/// Direct summation of zeta_E(s, tau) = sum' |m tau + n|^(-2s) over an
/// elliptical cutoff |m tau + n|^2 <= B sized so roughly radius^2 lattice
/// points participate, plus the integral approximation of the dropped tail.
/// Only the absolutely convergent region Re s > 1.2 is admitted.
pub fn epstein_bruteforce(
    s: Complex64,
    tau: &UpperHalfPoint,
    radius: u32,
) -> Result<EpsteinValue> {
    if s.re <= 1.2 {
        return Err(Error::EpsteinDivergence { re_s: s.re });
    }
    if radius < 50 {
        return Err(Error::EpsteinRadius { radius });
    }
    let x = tau.tau().re;
    let y = tau.tau().im;
    // Smallest eigenvalue of the Gram matrix of (m, n) -> |m tau + n|^2;
    // B = radius^2 lambda_min keeps the integer points inside a disk of
    // about that radius.
    let g11 = x * x + y * y;
    let lambda_min = ((g11 + 1.0) - ((g11 - 1.0).powi(2) + 4.0 * x * x).sqrt()) / 2.0;
    let b = (radius as f64) * (radius as f64) * lambda_min;
    let minus_s = -s;

    // The (m, n) -> (-m, -n) symmetry halves the work: m = 0 takes n >= 1,
    // rows m >= 1 take every n in range, and the total doubles.
    let m_max = (b.sqrt() / y).floor() as i64;
    let mut row_sums: Vec<Complex64> = Vec::with_capacity(m_max as usize + 1);
    let n_max = b.sqrt().floor() as i64;
    let mut zero_row = Complex64::new(0.0, 0.0);
    for n in 1..=n_max {
        zero_row += rpow((n * n) as f64, minus_s);
    }
    row_sums.push(zero_row);
    let rows: Vec<Complex64> = (1..=m_max)
        .into_par_iter()
        .map(|m| {
            let mf = m as f64;
            let height = mf * mf * y * y;
            let half_width = (b - height).max(0.0).sqrt();
            let lo = (-mf * x - half_width).ceil() as i64;
            let hi = (-mf * x + half_width).floor() as i64;
            let mut acc = Complex64::new(0.0, 0.0);
            for n in lo..=hi {
                let u = mf * x + n as f64;
                acc += rpow(u * u + height, minus_s);
            }
            acc
        })
        .collect();
    row_sums.extend(rows);
    let mut total = Complex64::new(0.0, 0.0);
    for r in row_sums {
        total += r;
    }
    total *= 2.0;
    // Integral of Q^-s over Q > B; the lattice-point density is 1/y per unit
    // of |m tau + n|^2 area.
    total += PI * rpow(b, Complex64::new(1.0, 0.0) - s) / (y * (s - 1.0));
    let error_estimate = (2.0 * PI / y) * b.powf(0.5 - s.re) * (3.0 + 2.0 * s.norm());
    Ok(EpsteinValue { value: total, error_estimate })
}

/// phi_s(tau) = (Im tau)^s zeta_E(s, tau) / zeta(2s), evaluated through the
/// Fourier-Bessel expansion at the reduced point. This is the analytic
/// continuation in s; the evaluator precomputes everything s-dependent.
pub struct PhiEvaluator {
    s: Complex64,
    order: BesselOrder,
    c2: Complex64,
    c3: Complex64,
    coefficients: Vec<Complex64>,
}

impl PhiEvaluator {
    pub fn new(s: Complex64) -> Result<Self> {
        if (s - Complex64::new(0.5, 0.0)).norm() <= 1e-12 {
            return Err(Error::DegenerateSpectral);
        }
        if (s - Complex64::new(1.0, 0.0)).norm() <= 1e-12 {
            return Err(Error::ZetaPole);
        }
        let order = BesselOrder::new(s - 0.5)?;
        let gamma_s = gamma_complex(s)?;
        let zeta_2s = zeta(2.0 * s)?;
        let denom = gamma_s * zeta_2s;
        let c2 = 2.0 * PI.sqrt() * gamma_complex(s - 0.5)? * zeta(2.0 * s - 1.0)? / denom;
        let c3 = 8.0 * rpow(PI, s) / denom;
        // a_n = n^(s - 1/2) sigma_{1-2s}(n), sigma by trial division.
        let w = Complex64::new(1.0, 0.0) - 2.0 * s;
        let mut coefficients = Vec::with_capacity(MAX_FOURIER_TERMS);
        for n in 1..=MAX_FOURIER_TERMS {
            let mut sigma = Complex64::new(0.0, 0.0);
            for d in 1..=n {
                if n % d == 0 {
                    sigma += rpow(d as f64, w);
                }
            }
            coefficients.push(rpow(n as f64, s - 0.5) * sigma);
        }
        Ok(PhiEvaluator { s, order, c2, c3, coefficients })
    }

    pub fn s(&self) -> Complex64 {
        self.s
    }

    pub fn phi(&self, point: &UpperHalfPoint) -> Result<Complex64> {
        let red = fundamental_reduce(point)?.tau_reduced.tau();
        self.phi_reduced(red.re, red.im)
    }

    /// Expansion at a point already inside the fundamental domain.
    pub(crate) fn phi_reduced(&self, x: f64, y: f64) -> Result<Complex64> {
        let lead = 2.0 * rpow(y, self.s);
        let sub = self.c2 * rpow(y, Complex64::new(1.0, 0.0) - self.s);
        let scale = lead.norm().max(sub.norm()).max(1e-300);
        let root_y = y.sqrt();
        let mut acc = Complex64::new(0.0, 0.0);
        // Stop only after two consecutive negligible terms: a single term can
        // be accidentally small through its cos(2 pi n x) factor alone.
        let mut small_run = 0;
        for (i, &a) in self.coefficients.iter().enumerate() {
            let n = (i + 1) as f64;
            let k = bessel_k(self.order, 2.0 * PI * n * y)?;
            let term = self.c3 * root_y * a * (2.0 * PI * n * x).cos() * k;
            acc += term;
            if term.norm() < 1e-14 * scale {
                small_run += 1;
                if small_run >= 2 {
                    break;
                }
            } else {
                small_run = 0;
            }
        }
        Ok(lead + sub + acc)
    }
}

/// A wave value together with the reduced point it was evaluated at.
#[derive(Clone, Copy, Debug)]
pub struct ReducedWave {
    pub s: Complex64,
    pub tau_reduced: Complex64,
    pub value: Complex64,
}

pub fn phi_s(s: Complex64, tau: &UpperHalfPoint) -> Result<ReducedWave> {
    let ev = PhiEvaluator::new(s)?;
    let red = fundamental_reduce(tau)?.tau_reduced.tau();
    let value = ev.phi_reduced(red.re, red.im)?;
    Ok(ReducedWave { s, tau_reduced: red, value })
}

/// Completed Epstein zeta A(s, tau) = pi^-s Gamma(s) (Im tau)^s zeta_E(s, tau)
/// in the form that never divides by zeta(2s), so it stays finite across the
/// zeta zeros: real on the critical line and invariant under s -> 1-s.
pub fn completed_epstein(s: Complex64, tau: &UpperHalfPoint) -> Result<Complex64> {
    if (s - Complex64::new(0.5, 0.0)).norm() <= 1e-12
        || (s - Complex64::new(1.0, 0.0)).norm() <= 1e-12
    {
        return Err(Error::ZetaPole);
    }
    let order = BesselOrder::new(s - 0.5)?;
    let red = fundamental_reduce(tau)?.tau_reduced.tau();
    let (x, y) = (red.re, red.im);
    let a1 = 2.0 * rpow(PI, -s) * gamma_complex(s)? * zeta(2.0 * s)?;
    let a2 = 2.0 * PI.sqrt() * rpow(PI, -s) * gamma_complex(s - 0.5)? * zeta(2.0 * s - 1.0)?;
    let lead = a1 * rpow(y, s) + a2 * rpow(y, Complex64::new(1.0, 0.0) - s);
    let w = Complex64::new(1.0, 0.0) - 2.0 * s;
    let root_y = y.sqrt();
    let mut acc = Complex64::new(0.0, 0.0);
    let mut small_run = 0;
    for n in 1..=MAX_FOURIER_TERMS {
        let mut sigma = Complex64::new(0.0, 0.0);
        for d in 1..=n {
            if n % d == 0 {
                sigma += rpow(d as f64, w);
            }
        }
        let nf = n as f64;
        let a = rpow(nf, s - 0.5) * sigma;
        let k = bessel_k(order, 2.0 * PI * nf * y)?;
        let term = 8.0 * root_y * a * (2.0 * PI * nf * x).cos() * k;
        acc += term;
        if term.norm() < 1e-14 * lead.norm().max(1e-300) {
            small_run += 1;
            if small_run >= 2 {
                break;
            }
        } else {
            small_run = 0;
        }
    }
    Ok(lead + acc)
}

/// Both sides of the CM-point factorizations
/// zeta_E(s, i) = 4 zeta(s) L(chi_-4, s) and
/// zeta_E(s, e^(i pi/3)) = 6 zeta(s) L(chi_-3, s),
/// with the left sides from the Fourier-Bessel route.
#[derive(Clone, Copy, Debug)]
pub struct BoundaryFactorization {
    pub s: Complex64,
    pub square_lattice: (Complex64, Complex64),
    pub hex_lattice: (Complex64, Complex64),
}

pub fn boundary_factorization_check(s: Complex64) -> Result<BoundaryFactorization> {
    use crate::lfunctions::dirichlet::{dirichlet_l, DirichletCharacter};
    let ev = PhiEvaluator::new(s)?;
    let zeta_2s = zeta(2.0 * s)?;
    let zeta_s = zeta(s)?;
    // zeta_E = phi zeta(2s) / y^s at the two corner points.
    let square_lhs = ev.phi_reduced(0.0, 1.0)? * zeta_2s;
    let hex_y = 3.0f64.sqrt() / 2.0;
    let hex_lhs = ev.phi_reduced(0.5, hex_y)? * zeta_2s / rpow(hex_y, s);
    let square_rhs = 4.0 * zeta_s * dirichlet_l(DirichletCharacter::MinusFour, s)?;
    let hex_rhs = 6.0 * zeta_s * dirichlet_l(DirichletCharacter::MinusThree, s)?;
    Ok(BoundaryFactorization {
        s,
        square_lattice: (square_lhs, square_rhs),
        hex_lattice: (hex_lhs, hex_rhs),
    })
}
