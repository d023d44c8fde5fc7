//! Dirichlet L-functions for the two odd real characters mod 3 and mod 4 that
//! control the boundary lines of the fundamental domain.

use super::zeta::{rpow, CompSum, B2K_OVER_FACT};
use crate::error::{Error, Result};
use crate::special::gamma::gamma_complex;
use num_complex::Complex64;

const PI: f64 = std::f64::consts::PI;

/// The two real odd primitive characters used by the boundary factorization:
/// chi_{-3} (conductor 3) and chi_{-4} (conductor 4).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DirichletCharacter {
    MinusThree,
    MinusFour,
}

impl DirichletCharacter {
    pub fn modulus(self) -> u64 {
        match self {
            DirichletCharacter::MinusThree => 3,
            DirichletCharacter::MinusFour => 4,
        }
    }

    /// chi(n): +1 on n = 1 mod m, -1 on n = m-1 mod m, 0 otherwise.
    pub fn chi(self, n: i64) -> i32 {
        let m = self.modulus() as i64;
        let r = n.rem_euclid(m);
        if r == 1 {
            1
        } else if r == m - 1 {
            -1
        } else {
            0
        }
    }
}

/// (1 - exp(-eps * u)) / eps, the pole-free combination the differenced
/// Euler-Maclaurin tails need; finite (= u) at eps = 0.
fn em1_ratio(eps: Complex64, u: f64) -> Complex64 {
    let z = eps * u;
    if z.norm() < 0.5 {
        // u * sum_{j>=0} (-z)^j / (j+1)!
        let mut term = Complex64::new(1.0, 0.0);
        let mut acc = Complex64::new(1.0, 0.0);
        for j in 1..30 {
            term *= -z / (j as f64 + 1.0);
            acc += term;
            if term.norm() < 1e-18 * acc.norm() {
                break;
            }
        }
        acc * u
    } else {
        (Complex64::new(1.0, 0.0) - (-z).exp()) / eps
    }
}

/// L(chi, s) for the two supported characters.
///
/// Right of Re s = -0.25 the character sum is written as a difference of two
/// Hurwitz zetas at shifts a and b = 1-a and evaluated in a single
/// Euler-Maclaurin pass with a shared truncation, so the 1/(s-1) poles cancel
/// exactly and s = 1 is a regular point. Left of it the odd-character
/// functional equation L(s) = (q/pi)^((1-2s)/2) Gamma((2-s)/2)/Gamma((s+1)/2)
/// L(1-s) takes over; the Gamma pole in the denominator produces the exact
/// trivial zeros at s = -1, -3, -5, ...
pub fn dirichlet_l(chi: DirichletCharacter, s: Complex64) -> Result<Complex64> {
    if !s.re.is_finite() || !s.im.is_finite() {
        return Err(Error::NonFinite { what: "dirichlet argument" });
    }
    if s.re >= -0.25 {
        return Ok(differenced_em(chi, s));
    }
    let q = chi.modulus() as f64;
    let ls = differenced_em(chi, Complex64::new(1.0, 0.0) - s);
    let g_num = gamma_complex(0.5 * (2.0 - s))?;
    let g_den_inv = match gamma_complex(0.5 * (s + 1.0)) {
        Ok(g) => g.inv(),
        Err(Error::GammaPole { .. }) => Complex64::new(0.0, 0.0),
        Err(e) => return Err(e),
    };
    Ok(rpow(q / PI, 0.5 * (Complex64::new(1.0, 0.0) - 2.0 * s)) * g_num * g_den_inv * ls)
}

fn differenced_em(chi: DirichletCharacter, s: Complex64) -> Complex64 {
    let q = chi.modulus() as f64;
    let a = 1.0 / q;
    let b = (q - 1.0) / q;
    let n = 24usize.max((0.9 * (s.im.abs() + 30.0)).ceil() as usize);

    let mut main = CompSum::default();
    for k in 0..n {
        main.add(rpow(k as f64 + a, -s) - rpow(k as f64 + b, -s));
    }

    let pa = n as f64 + a;
    let pb = n as f64 + b;
    let pa_inv = rpow(pa, -s);
    let pb_inv = rpow(pb, -s);

    // Differenced pole terms: (pa^{1-s} - pb^{1-s})/(s-1) without the pole.
    let u = (pb / pa).ln();
    let mut tail = pa_inv * pa * em1_ratio(s - 1.0, u);
    tail += 0.5 * (pa_inv - pb_inv);
    let mut ua = pa_inv / pa;
    let mut ub = pb_inv / pb;
    let mut poch = s;
    for (k, &c) in B2K_OVER_FACT.iter().enumerate() {
        tail += c * poch * (ua - ub);
        ua /= pa * pa;
        ub /= pb * pb;
        let m = 2.0 * (k as f64 + 1.0);
        poch *= (s + (m - 1.0)) * (s + m);
    }
    rpow(q, -s) * (main.value() + tail)
}
