//! Gauss hypergeometric function 2F1(1/6, 5/6; 1; w) and its derivative on the
//! whole plane minus the branch cut [1, inf). This parameter triple sits in the
//! logarithmic case c = a + b, so the unit-disk boundary needs dedicated
//! connection formulas rather than series acceleration.

use crate::error::{Error, Result};
use num_complex::Complex64;

const A: f64 = 1.0 / 6.0;
const B: f64 = 5.0 / 6.0;

/// d_0 = -2*euler_gamma - psi(1/6) - psi(5/6).
const D0: f64 = 6.0684255882441103119;
/// Gamma(2/3) / Gamma(5/6)^2.
const G1: f64 = 1.062753320279079297691391;
/// Gamma(-2/3) / Gamma(1/6)^2.
const G2: f64 = -0.1296935245699850974125576;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

pub fn hyp2f1_16_56_1(w: Complex64) -> Result<Complex64> {
    hyp2f1_16_56_1_d(w).map(|p| p.0)
}

/// Returns (F(w), dF/dw).
pub fn hyp2f1_16_56_1_d(w: Complex64) -> Result<(Complex64, Complex64)> {
    let r = w.norm();
    if r <= 0.7 {
        series_pair(A, B, 1.0, w).ok_or(Error::HypNonConvergence { w })
    } else if (Complex64::new(1.0, 0.0) - w).norm() <= 0.7 {
        log_region_pair(w)
    } else if r >= 1.43 {
        inverse_region_pair(w)
    } else {
        lens_pair(w)
    }
}

/// Maclaurin sum of 2F1(a, b; c; v) and its v-derivative for real parameters.
/// Valid for |v| < 1; the callers keep |v| <= 0.7.
fn series_pair(a: f64, b: f64, c: f64, v: Complex64) -> Option<(Complex64, Complex64)> {
    let mut f = Complex64::new(1.0, 0.0);
    let mut d = Complex64::new(0.0, 0.0);
    let mut coef = 1.0_f64;
    let mut pow = Complex64::new(1.0, 0.0);
    for n in 0..220 {
        let nf = n as f64;
        let next = coef * (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0));
        d += (nf + 1.0) * next * pow;
        pow *= v;
        let t = next * pow;
        f += t;
        coef = next;
        if n > 8 && t.norm() <= 1e-17 * f.norm() {
            return Some((f, d));
        }
    }
    None
}

/// Connection at w = 1 for the logarithmic case c = a + b:
/// F = (1/2pi) * sum p_n (d_n - ln u) u^n with u = 1 - w.
fn log_region_pair(w: Complex64) -> Result<(Complex64, Complex64)> {
    let u = Complex64::new(1.0, 0.0) - w;
    if u.norm() < 1e-280 {
        return Err(Error::NonFinite { what: "2F1(1/6,5/6;1;w) diverges at w = 1" });
    }
    let el = u.ln();
    let mut p = 1.0_f64;
    let mut dn = D0;
    let mut pow = Complex64::new(1.0, 0.0);
    let mut f = dn - el;
    let mut du = -Complex64::new(1.0, 0.0) / u;
    for n in 1..260 {
        let nf = n as f64;
        p *= (A + nf - 1.0) * (B + nf - 1.0) / (nf * nf);
        dn += 2.0 / nf - 1.0 / (nf - 1.0 + A) - 1.0 / (nf - 1.0 + B);
        let t_f = p * (dn - el) * pow * u;
        du += p * pow * (nf * (dn - el) - 1.0);
        pow *= u;
        f += t_f;
        if n > 8 && t_f.norm() <= 1e-17 * f.norm() {
            let scale = 1.0 / TWO_PI;
            return Ok((f * scale, -du * scale));
        }
    }
    Err(Error::HypNonConvergence { w })
}

/// 1/w connection for |w| >= 1.43, principal branch of (-w)^(-a).
fn inverse_region_pair(w: Complex64) -> Result<(Complex64, Complex64)> {
    let v = Complex64::new(1.0, 0.0) / w;
    let (f1, d1) = series_pair(A, A, 1.0 / 3.0, v).ok_or(Error::HypNonConvergence { w })?;
    let (f2, d2) = series_pair(B, B, 5.0 / 3.0, v).ok_or(Error::HypNonConvergence { w })?;
    let mw = -w;
    let t1 = mw.powf(-A);
    let t5 = mw.powf(-B);
    let w2 = w * w;
    let f = G1 * t1 * f1 + G2 * t5 * f2;
    let d = G1 * (A * t1 / mw * f1 - t1 * d1 / w2) + G2 * (B * t5 / mw * f2 - t5 * d2 / w2);
    Ok((f, d))
}

/// Taylor-step continuation of the hypergeometric ODE
/// w(1-w) F'' + (1-2w) F' - (5/36) F = 0
/// along the radial path from 0.55 * w/|w|, for the annular gap the series
/// and connection formulas leave uncovered.
fn lens_pair(w: Complex64) -> Result<(Complex64, Complex64)> {
    let hat = w / w.norm();
    let mut cur = 0.55 * hat;
    let (mut f, mut d) =
        series_pair(A, B, 1.0, cur).ok_or(Error::HypNonConvergence { w })?;
    for _ in 0..64 {
        let delta = w - cur;
        let gap = delta.norm();
        if gap == 0.0 {
            return Ok((f, d));
        }
        let safe = 0.38 * cur.norm().min((cur - 1.0).norm());
        let (step, last) = if gap <= safe {
            (delta, true)
        } else {
            (delta * (safe / gap), false)
        };
        let (nf, nd) = taylor_step(cur, f, d, step);
        f = nf;
        d = nd;
        cur = if last { w } else { cur + step };
        if last {
            return Ok((f, d));
        }
    }
    Err(Error::HypNonConvergence { w })
}

fn taylor_step(
    w0: Complex64,
    f0: Complex64,
    d0: Complex64,
    eta: Complex64,
) -> (Complex64, Complex64) {
    const N: usize = 40;
    let aa = w0 * (Complex64::new(1.0, 0.0) - w0);
    let bb = Complex64::new(1.0, 0.0) - 2.0 * w0;
    let mut c = [Complex64::new(0.0, 0.0); N];
    c[0] = f0;
    c[1] = d0;
    for k in 0..N - 2 {
        let kf = k as f64;
        let num = (kf * kf + kf + 5.0 / 36.0) * c[k] - bb * (kf + 1.0) * (kf + 1.0) * c[k + 1];
        c[k + 2] = num / (aa * (kf + 2.0) * (kf + 1.0));
    }
    let mut f = c[N - 1];
    let mut d = Complex64::new(0.0, 0.0);
    for k in (0..N - 1).rev() {
        d = d * eta + (k as f64 + 1.0) * c[k + 1];
        f = f * eta + c[k];
    }
    (f, d)
}
