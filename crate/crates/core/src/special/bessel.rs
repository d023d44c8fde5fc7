//! Modified Bessel function K_nu(x) for x > 0 and the order range the
//! spectral problem needs: purely imaginary orders up to |Im nu| = 120 and
//! moderate complex orders near the real axis.
//!
//! Three regimes, each with its own failure mode avoided:
//! - real-axis quadrature for small |Im nu|, where the integrand barely
//!   oscillates;
//! - a double-double power series for imaginary order at small x, where the
//!   f64 sum loses up to ~26 digits to cancellation;
//! - a saddle-height contour quadrature for imaginary order at large x, where
//!   the power series would need prohibitively many terms.

use super::dd::{two_prod, CDd, Dd};
use super::gamma::gamma_complex;
use crate::error::{Error, Result};
use num_complex::Complex64;

const PI: f64 = std::f64::consts::PI;

/// Maximum |Im nu| for purely imaginary orders.
pub const MAX_IMAGINARY_ORDER: f64 = 120.0;
/// Maximum |Re nu| (and |Im nu|) for genuinely complex orders.
pub const MAX_MIXED_ORDER: f64 = 6.0;

/// Validated order for [`bessel_k`]: either nearly purely imaginary with
/// |Im nu| <= 120, or complex with both parts bounded by 6.
#[derive(Clone, Copy, Debug)]
pub struct BesselOrder {
    nu: Complex64,
}

impl BesselOrder {
    pub fn new(nu: Complex64) -> Result<Self> {
        if !nu.re.is_finite() || !nu.im.is_finite() {
            return Err(Error::NonFinite { what: "bessel order" });
        }
        let pure_imaginary = nu.re.abs() <= 1e-9 && nu.im.abs() <= MAX_IMAGINARY_ORDER;
        let mixed = nu.re.abs() <= MAX_MIXED_ORDER && nu.im.abs() <= MAX_MIXED_ORDER;
        if pure_imaginary || mixed {
            Ok(BesselOrder { nu })
        } else {
            Err(Error::BesselOrderRange {
                nu,
                detail: "need |Re| <= 6 and |Im| <= 6, or |Re| <= 1e-9 and |Im| <= 120",
            })
        }
    }

    pub fn nu(&self) -> Complex64 {
        self.nu
    }
}

/// K_nu(x). Absolute accuracy ~1e-12 * max(1, |K|) over the admitted order
/// range; x > 700 underflows and returns exactly 0.
pub fn bessel_k(order: BesselOrder, x: f64) -> Result<Complex64> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::BesselDomain { x });
    }
    if x > 700.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    // K is even in nu and K(conj nu) = conj K(nu) for x > 0.
    let mut nu = order.nu;
    if nu.re < 0.0 {
        nu = -nu;
    }
    let conjugate = nu.im < 0.0;
    if conjugate {
        nu = nu.conj();
    }
    let t = nu.im;
    let value = if t <= 6.0 {
        real_axis_quadrature(nu, x)
    } else {
        // Constructor invariant: t > 6 implies |Re nu| <= 1e-9.
        let scaled = if x * x <= t * t + 36.0 {
            imaginary_order_series(t, x)?
        } else {
            saddle_contour(t, x)
        };
        Complex64::new(scaled * (-PI * t / 2.0).exp(), 0.0)
    };
    Ok(if conjugate { value.conj() } else { value })
}

/// Scaled value exp(pi t / 2) K_{it}(x); the natural quantity on the critical
/// line, where K itself underflows long before the wave does.
pub fn bessel_k_scaled_imag(t: f64, x: f64) -> Result<f64> {
    BesselOrder::new(Complex64::new(0.0, t))?;
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::BesselDomain { x });
    }
    let tt = t.abs();
    if tt <= 6.0 {
        let k = real_axis_quadrature(Complex64::new(0.0, tt), x);
        Ok(k.re * (PI * tt / 2.0).exp())
    } else if x * x <= tt * tt + 36.0 {
        imaginary_order_series(tt, x)
    } else {
        Ok(saddle_contour(tt, x))
    }
}

/// Trapezoid on K_nu(x) = int_0^inf exp(-x cosh u) cosh(nu u) du.
/// The integrand is entire and decays doubly exponentially, so the trapezoid
/// converges geometrically in 1/h; the step shrinks with x and |Im nu| to
/// keep the shifted-contour growth in check.
fn real_axis_quadrature(nu: Complex64, x: f64) -> Complex64 {
    let a = nu.re.abs();
    let t = nu.im.abs();
    // Step from the contour-shift bound: pushing the trapezoid contour to
    // Im u = delta multiplies the integrand by at most
    // exp(x(1 - cos delta) + t delta), so the discretization error is
    // ~exp(-(2 pi delta / h - x(1 - cos delta) - t delta)); pin that at e^-42.
    let delta = 0.7f64;
    let h = 2.0 * PI * delta / (42.0 + delta * t + (1.0 - delta.cos()) * x);
    // Truncate where x(cosh u - 1) - a u >= 39, fixed point in u.
    let mut umax = (1.0 + 42.0 / x).acosh();
    for _ in 0..4 {
        umax = (1.0 + (39.0 + a * umax) / x).acosh();
    }
    umax += h;
    let n = (umax / h).ceil() as usize;
    let sum = Complex64::new(0.5, 0.0); // cosh(0) / 2; exp(-x) factored in below
    let scale = (-x).exp();
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 1..=n {
        let u = h * k as f64;
        let weight = (-x * (u.cosh() - 1.0)).exp();
        acc += (nu * u).cosh() * weight;
    }
    (sum + acc) * scale * h
}

/// Double-double Maclaurin-type series for K_{it}(x), x^2 <= t^2 + 36.
///
/// With W = e^{itL} sum_k (x^2/4)^k / (k! Gamma(k+1+it)) and L = ln(x/2),
/// exp(pi t/2) K_{it}(x) = -2 pi Im(e^{itL} g0 S) / (1 - e^{-2 pi t}),
/// where g0 = e^{-pi t/2} / Gamma(1+it) is O(1) and S is the same sum with
/// the leading 1/Gamma(1+it) divided out. The terms of S reach ~e^{t/4}
/// before cancelling down to O(1), hence the double-double accumulation.
fn imaginary_order_series(t: f64, x: f64) -> Result<f64> {
    let el = (x / 2.0).ln();
    let phase = Complex64::new((t * el).cos(), (t * el).sin());
    let g = gamma_complex(Complex64::new(1.0, t)).expect("Re = 1 is not a pole");
    let g0 = g.inv() * (-PI * t / 2.0).exp();

    let (p, e) = two_prod(x, x);
    let x24 = Dd::new(p, e).mul_f64(0.25);
    let t2 = {
        let (p, e) = two_prod(t, t);
        Dd::new(p, e)
    };

    let mut v = CDd::one();
    let mut s = CDd::one();
    let mut maxmag = 1.0_f64;
    let mut converged = false;
    for k in 1..=40_000u64 {
        let kf = k as f64;
        // multiplier (x^2/4)(k - it) / (k (k^2 + t^2)), all in double-double
        let denom = t2.add_f64(kf * kf).mul_f64(kf);
        let rho = x24.div(denom);
        let m = CDd { re: rho.mul_f64(kf), im: rho.mul_f64(-t) };
        v = v.mul(m);
        s = s.add(v);
        let mag = v.mag_hi();
        if mag > maxmag {
            maxmag = mag;
        }
        if mag < 1e-34 * maxmag {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonFinite { what: "imaginary-order bessel series stalled" });
    }
    let s64 = Complex64::new(s.re.to_f64(), s.im.to_f64());
    let p = phase * g0 * s64;
    Ok(-2.0 * PI * p.im / (1.0 - (-2.0 * PI * t).exp()))
}

/// Contour quadrature at the saddle height for K_{it}(x), x^2 > t^2 + 36.
///
/// Shifting u -> v + i asin(t/x) in K_{it}(x) = Re int_0^inf e^{-x cosh u + itu} du
/// kills the vertical piece (its integrand is purely imaginary) and leaves
/// exp(pi t/2) K_{it}(x)
///   = e^{t acos(t/x)} int_0^inf e^{-w cosh v} cos(t(v - sinh v)) dv,
/// with w = sqrt(x^2 - t^2); the integrand no longer oscillates faster than
/// it decays.
fn saddle_contour(t: f64, x: f64) -> f64 {
    let w = ((x - t) * (x + t)).sqrt();
    let prefactor = (t * (t / x).acos()).exp();
    let h = (PI * w / (184.0 * t)).min(0.35 / w.sqrt()).min(0.25);
    let vmax = (1.0 + 52.0 / w).acosh();
    let n = (vmax / h).ceil() as usize;
    let mut sum = 0.5 * (-w).exp();
    for k in 1..=n {
        let v = h * k as f64;
        sum += (-w * v.cosh()).exp() * (t * (v - v.sinh())).cos();
    }
    prefactor * sum * h
}
