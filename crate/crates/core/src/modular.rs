//! The modular side of the problem: SL(2,Z) reduction, Eisenstein series,
//! the uniformizing coordinate z(tau) = 1 - j(tau)/1728 and its inverse, and
//! the geometric potential V the Hamiltonian is built from.

use crate::error::{Error, Result};
use crate::special::hyp2f1::{hyp2f1_16_56_1, hyp2f1_16_56_1_d};
use num_complex::Complex64;
use std::sync::OnceLock;

const PI: f64 = std::f64::consts::PI;

/// A point with Im tau > 0, enforced at construction.
#[derive(Clone, Copy, Debug)]
pub struct UpperHalfPoint {
    tau: Complex64,
}

impl UpperHalfPoint {
    pub fn new(tau: Complex64) -> Result<Self> {
        if !tau.re.is_finite() || !tau.im.is_finite() || tau.im <= 0.0 {
            return Err(Error::NotUpperHalf { tau });
        }
        Ok(UpperHalfPoint { tau })
    }

    pub fn tau(&self) -> Complex64 {
        self.tau
    }
}

/// One generator applied during reduction: tau+1, tau-1, or -1/tau.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeneratorLetter {
    T,
    TInv,
    S,
}

/// Result of reducing to the fundamental domain |Re| <= 1/2, |tau| >= 1.
#[derive(Clone, Debug)]
pub struct ModularReduction {
    pub tau_input: Complex64,
    pub tau_reduced: UpperHalfPoint,
    /// Generators in application order: folding tau_input through each letter
    /// in sequence lands on tau_reduced.
    pub word: Vec<GeneratorLetter>,
    /// Integer matrix [[a,b],[c,d]] with tau_reduced = (a tau + b)/(c tau + d).
    pub matrix: [[i64; 2]; 2],
}

/// Moebius action of an integer matrix.
pub fn apply_unimodular(m: &[[i64; 2]; 2], tau: Complex64) -> Complex64 {
    let num = m[0][0] as f64 * tau + m[0][1] as f64;
    let den = m[1][0] as f64 * tau + m[1][1] as f64;
    num / den
}

fn mat_mul(a: [[i64; 2]; 2], b: [[i64; 2]; 2]) -> [[i64; 2]; 2] {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

/// Translate-and-flip reduction into the fundamental domain. The |tau| < 1
/// test carries a 1e-15 slack so boundary points are not flipped back and
/// forth by rounding noise.
pub fn fundamental_reduce(point: &UpperHalfPoint) -> Result<ModularReduction> {
    let tau_input = point.tau();
    let mut tau = tau_input;
    let mut matrix = [[1i64, 0], [0, 1]];
    let mut word = Vec::new();
    for _ in 0..4096 {
        let shift = (tau.re + 0.5).floor();
        if shift != 0.0 {
            if shift.abs() > 1e5 {
                return Err(Error::ReductionStall { tau: tau_input });
            }
            let n = shift as i64;
            tau.re -= shift;
            matrix = mat_mul([[1, -n], [0, 1]], matrix);
            let letter = if n > 0 { GeneratorLetter::TInv } else { GeneratorLetter::T };
            for _ in 0..n.unsigned_abs() {
                word.push(letter);
            }
        }
        if tau.norm_sqr() < 1.0 - 1e-15 {
            tau = -tau.inv();
            matrix = mat_mul([[0, -1], [1, 0]], matrix);
            word.push(GeneratorLetter::S);
        } else {
            let tau_reduced = UpperHalfPoint::new(tau)?;
            return Ok(ModularReduction { tau_input, tau_reduced, word, matrix });
        }
    }
    Err(Error::ReductionStall { tau: tau_input })
}

fn sigma_tables() -> &'static (Vec<f64>, Vec<f64>) {
    static TABLES: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    TABLES.get_or_init(|| {
        let nmax = 64usize;
        let mut s3 = vec![0.0; nmax + 1];
        let mut s5 = vec![0.0; nmax + 1];
        for d in 1..=nmax {
            let d3 = (d * d * d) as f64;
            let d5 = d3 * (d * d) as f64;
            let mut m = d;
            while m <= nmax {
                s3[m] += d3;
                s5[m] += d5;
                m += d;
            }
        }
        (s3, s5)
    })
}

/// E4 and E6 q-series at an already-reduced point, where |q| <= e^{-pi sqrt 3}
/// makes a dozen terms plenty.
pub(crate) fn eisenstein_reduced(tau_reduced: Complex64) -> (Complex64, Complex64) {
    let (s3, s5) = sigma_tables();
    let q = (Complex64::new(0.0, 2.0 * PI) * tau_reduced).exp();
    let mut e4 = Complex64::new(1.0, 0.0);
    let mut e6 = Complex64::new(1.0, 0.0);
    let mut qn = Complex64::new(1.0, 0.0);
    for n in 1..=64usize {
        qn *= q;
        e4 += 240.0 * s3[n] * qn;
        e6 -= 504.0 * s5[n] * qn;
        let n5 = (n * n * n * n * n) as f64;
        if qn.norm() * n5 < 1e-16 {
            break;
        }
    }
    (e4, e6)
}

/// Eisenstein series E4(tau), E6(tau) at the given (not necessarily reduced)
/// point: computed at the reduced image and carried back through the weight-4
/// and weight-6 cocycles.
pub fn eisenstein_e4_e6(point: &UpperHalfPoint) -> Result<(Complex64, Complex64)> {
    let red = fundamental_reduce(point)?;
    let (e4r, e6r) = eisenstein_reduced(red.tau_reduced.tau());
    let m = red.matrix;
    let j = m[1][0] as f64 * point.tau() + m[1][1] as f64; // c tau + d
    let j2 = j * j;
    let j4 = j2 * j2;
    Ok((e4r / j4, e6r / (j4 * j2)))
}

/// z(tau) = 1 - j(tau)/1728 with j = E4^3/Delta; modular invariant, so it is
/// evaluated straight at the reduced image.
pub fn z_of_tau(point: &UpperHalfPoint) -> Result<Complex64> {
    let red = fundamental_reduce(point)?;
    let (e4, e6) = eisenstein_reduced(red.tau_reduced.tau());
    let e4c = e4 * e4 * e4;
    let delta = (e4c - e6 * e6) / 1728.0;
    if delta == Complex64::new(0.0, 0.0) {
        return Err(Error::NonFinite { what: "discriminant underflow at extreme Im tau" });
    }
    Ok(Complex64::new(1.0, 0.0) - e4c / (delta * 1728.0))
}

pub(crate) fn dz_dtau_from(e4: Complex64, e6: Complex64) -> Result<Complex64> {
    let delta = (e4 * e4 * e4 - e6 * e6) / 1728.0;
    if delta == Complex64::new(0.0, 0.0) {
        return Err(Error::NonFinite { what: "discriminant underflow at extreme Im tau" });
    }
    Ok(Complex64::new(0.0, 2.0 * PI) * e4 * e4 * e6 / (1728.0 * delta))
}

/// dz/dtau = 2 pi i E4^2 E6 / (1728 Delta) at the given point.
pub fn dz_dtau(point: &UpperHalfPoint) -> Result<Complex64> {
    let (e4, e6) = eisenstein_e4_e6(point)?;
    dz_dtau_from(e4, e6)
}

/// Inverse of z(tau) via the hypergeometric period ratio
/// tau = i F(w+) / F(w-), w+- = (1 +- sqrt(z/(z-1)))/2,
/// returned already reduced to the fundamental domain.
pub fn tau_of_z(z: Complex64) -> Result<UpperHalfPoint> {
    let raw = tau_of_z_raw(z)?;
    Ok(fundamental_reduce(&raw)?.tau_reduced)
}

/// sqrt(z/(z-1)) with a -0 imaginary part canonicalized to +0, so exact-real
/// z in (0,1) takes the principal branch from above instead of whichever side
/// the complex division's signed zero happens to land on.
fn sqrt_ratio(z: Complex64) -> Complex64 {
    let mut r = z / (z - 1.0);
    if r.im == 0.0 {
        r.im = 0.0;
    }
    r.sqrt()
}

fn split_points(z: Complex64) -> Result<(Complex64, Complex64)> {
    if z.norm() <= 1e-13 || (z - 1.0).norm() <= 1e-13 {
        return Err(Error::SingularInput { z });
    }
    let u = sqrt_ratio(z);
    Ok((0.5 * (1.0 + u), 0.5 * (1.0 - u)))
}

fn tau_of_z_raw(z: Complex64) -> Result<UpperHalfPoint> {
    let (wp, wm) = split_points(z)?;
    let fp = hyp2f1_16_56_1(wp)?;
    let fm = hyp2f1_16_56_1(wm)?;
    let tau = Complex64::new(0.0, 1.0) * fp / fm;
    UpperHalfPoint::new(tau)
}

/// The geometric potential at a point of the z plane.
#[derive(Clone, Copy, Debug)]
pub struct GeometricPotentialValue {
    pub z: Complex64,
    pub value: f64,
}

/// V(z) = (Im tau * |dz/dtau|)^2 evaluated at the reduced preimage; returns
/// exactly 0 at the two ramification points z = 0, 1 where the metric factor
/// vanishes.
pub fn potential_v(z: Complex64) -> Result<GeometricPotentialValue> {
    if z.norm() <= 1e-13 || (z - 1.0).norm() <= 1e-13 {
        return Ok(GeometricPotentialValue { z, value: 0.0 });
    }
    let tau_red = tau_of_z(z)?;
    let (e4, e6) = eisenstein_reduced(tau_red.tau());
    let d = dz_dtau_from(e4, e6)?;
    let s = tau_red.tau().im * d.norm();
    Ok(GeometricPotentialValue { z, value: s * s })
}

/// Independent route to the same potential through the derivative of the
/// period ratio: V = (Im tau / |dtau/dz|)^2, with everything evaluated at the
/// unreduced tau. Agreement with [`potential_v`] is a strong end-to-end check
/// of the uniformization.
pub fn potential_v_hypergeometric(z: Complex64) -> Result<f64> {
    if z.norm() <= 1e-13 || (z - 1.0).norm() <= 1e-13 {
        return Ok(0.0);
    }
    let (wp, wm) = split_points(z)?;
    let u = sqrt_ratio(z);
    let zm1 = z - 1.0;
    let du = -(0.5 / u) / (zm1 * zm1);
    let (fp, fpd) = hyp2f1_16_56_1_d(wp)?;
    let (fm, fmd) = hyp2f1_16_56_1_d(wm)?;
    // d/dz [i F(w+)/F(w-)] with w+- = (1 +- u)/2
    let dtau_dz = Complex64::new(0.0, 1.0) * (fpd * (0.5 * du) * fm - fp * fmd * (-0.5 * du))
        / (fm * fm);
    let tau = Complex64::new(0.0, 1.0) * fp / fm;
    let v = tau.im / dtau_dz.norm();
    Ok(v * v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn uh(re: f64, im: f64) -> UpperHalfPoint {
        UpperHalfPoint::new(c(re, im)).unwrap()
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn eisenstein_reference_values() {
        let cases = [
            (uh(0.0, 2.0), c(1.00083698843473765919, 0.0), c(0.99824217717624379850, 0.0)),
            (
                uh(0.1, 0.9),
                c(1.68774702158657263793, 0.51924853894007172982),
                c(-0.48856521244053027527, -1.23586559971840845765),
            ),
            (
                uh(-0.3, 1.7),
                c(0.99829568858832331560, -0.00524182446818605557),
                c(1.00358421516145308029, 0.01100408000364451941),
            ),
        ];
        for (tau, e4w, e6w) in cases {
            let (e4, e6) = eisenstein_e4_e6(&tau).unwrap();
            assert!(rel(e4, e4w) < 1e-10, "E4({}) = {e4}, want {e4w}", tau.tau());
            assert!(rel(e6, e6w) < 1e-10, "E6({}) = {e6}, want {e6w}", tau.tau());
        }
        // E6(i) = 0; the q-series must hit it to full cancellation depth.
        let (_, e6i) = eisenstein_e4_e6(&uh(0.0, 1.0)).unwrap();
        assert!(e6i.norm() < 1e-15, "E6(i) = {e6i}");
    }

    #[test]
    fn z_reference_values() {
        let cases = [
            (uh(0.0, 2.0), c(-165.375, 0.0)),
            (uh(0.1, 0.9), c(0.07409408767377863594, -0.30363744457553577603)),
            (uh(-0.3, 1.7), c(8.35632707198450313836, -23.96057036736323614482)),
        ];
        for (tau, want) in cases {
            let got = z_of_tau(&tau).unwrap();
            assert!(rel(got, want) < 1e-10, "z({}) = {got}, want {want}", tau.tau());
        }
        let zi = z_of_tau(&uh(0.0, 1.0)).unwrap();
        assert!(zi.norm() < 1e-12, "z(i) = {zi}");
        let zr = z_of_tau(&uh(0.5, 3.0_f64.sqrt() / 2.0)).unwrap();
        assert!((zr - 1.0).norm() < 1e-12, "z(corner) = {zr}");
    }

    #[test]
    fn z_is_modular_invariant() {
        let mats: [[[i64; 2]; 2]; 4] =
            [[[1, 1], [0, 1]], [[0, -1], [1, 0]], [[2, 1], [1, 1]], [[5, -2], [3, -1]]];
        for tau in [c(0.31, 1.4), c(-0.2, 0.8), c(0.05, 2.3)] {
            let base = z_of_tau(&UpperHalfPoint::new(tau).unwrap()).unwrap();
            for m in &mats {
                let moved = apply_unimodular(m, tau);
                let got = z_of_tau(&UpperHalfPoint::new(moved).unwrap()).unwrap();
                assert!(
                    (got - base).norm() <= 1e-9 * base.norm().max(1.0),
                    "z not invariant under {m:?} at {tau}"
                );
            }
        }
    }

    #[test]
    fn reduction_invariants() {
        for tau in [c(3.7, 0.04), c(-2.45, 0.013), c(0.49999, 1.2), c(12.3, 0.5)] {
            let red = fundamental_reduce(&UpperHalfPoint::new(tau).unwrap()).unwrap();
            let t = red.tau_reduced.tau();
            assert!(t.re.abs() <= 0.5 + 1e-12);
            assert!(t.norm_sqr() >= 1.0 - 1e-12);
            let m = red.matrix;
            assert_eq!(m[0][0] * m[1][1] - m[0][1] * m[1][0], 1, "det != 1");
            let applied = apply_unimodular(&m, tau);
            assert!((applied - t).norm() < 1e-12, "matrix does not map input to reduced");
            // Replaying the word matches the matrix action.
            let mut w = tau;
            for g in &red.word {
                w = match g {
                    GeneratorLetter::T => w + 1.0,
                    GeneratorLetter::TInv => w - 1.0,
                    GeneratorLetter::S => -w.inv(),
                };
            }
            assert!((w - t).norm() < 1e-10, "word replay diverges from matrix");
        }
    }

    #[test]
    fn tau_of_z_reference_values() {
        let cases = [
            (c(-165.375, 0.0), c(0.0, 2.0)),
            (c(0.5, 3.0), c(0.2463454884139562, 1.362500773003417)),
            (c(-0.7, 0.1), c(0.01376974807478098, 1.217738950392409)),
            (c(0.25, 0.0001), c(0.1392900817829957, 0.9902834910037521)),
            (c(2.0, -1.0), c(-0.3997193236195542, 1.273969360871194)),
            (c(0.5, 0.0), c(-0.21136605645534956, 0.97740697264676498)),
            (c(0.75, 0.0), c(-0.28733469584452064, 0.95783024203871158)),
            (c(0.0, 1e4), c(0.24999093701020613, 2.6523267274288839)),
        ];
        for (z, want) in cases {
            let got = tau_of_z(z).unwrap().tau();
            assert!((got - want).norm() < 1e-9 * want.norm(), "tau({z}) = {got}, want {want}");
        }
    }

    #[test]
    fn tau_of_z_rejects_ramification_points() {
        assert!(matches!(tau_of_z(c(0.0, 0.0)), Err(Error::SingularInput { .. })));
        assert!(matches!(tau_of_z(c(1.0, 1e-15)), Err(Error::SingularInput { .. })));
    }

    #[test]
    fn round_trip_through_reference_points() {
        for z in [c(0.5, 3.0), c(-0.7, 0.1), c(2.0, -1.0), c(-165.375, 0.0), c(0.3, -22.0)] {
            let tau = tau_of_z(z).unwrap();
            let back = z_of_tau(&tau).unwrap();
            assert!((back - z).norm() <= 1e-8 * z.norm().max(1.0), "{z} -> {} -> {back}", tau.tau());
        }
    }

    #[test]
    fn dz_dtau_reference_and_finite_difference() {
        let cases = [
            (uh(0.1, 1.3), c(7.669074200016492, 10.20658708241087)),
            (uh(-0.2, 0.95), c(-3.589333754632815, 0.8234091319687511)),
        ];
        for (tau, want) in cases {
            let got = dz_dtau(&tau).unwrap();
            assert!(rel(got, want) < 1e-9, "dz/dtau({}) = {got}, want {want}", tau.tau());
            let h = 1e-5;
            let zp = z_of_tau(&uh(tau.tau().re + h, tau.tau().im)).unwrap();
            let zm = z_of_tau(&uh(tau.tau().re - h, tau.tau().im)).unwrap();
            let fd = (zp - zm) / (2.0 * h);
            assert!(rel(fd, got) < 1e-6, "fd {fd} vs {got}");
        }
    }

    #[test]
    fn potential_reference_values() {
        let cases = [
            (c(0.5, 3.0), 679.29050768778850089),
            (c(0.5, 0.8), 48.88484347720832248),
            (c(-1.0, 0.5), 156.97552711980029364),
            (c(0.3, 0.75), 46.801798772551088799),
            (c(0.5, 2.0), 284.5727078428714444810319),
            (c(-0.3, 0.4), 41.92272325047702329060499),
        ];
        for (z, want) in cases {
            let got = potential_v(z).unwrap().value;
            assert!((got - want).abs() < 1e-9 * want, "V({z}) = {got}, want {want}");
        }
        assert_eq!(potential_v(c(0.0, 0.0)).unwrap().value, 0.0);
        assert_eq!(potential_v(c(1.0, 0.0)).unwrap().value, 0.0);
    }

    #[test]
    fn potential_routes_agree() {
        for z in [c(0.5, 3.0), c(-1.0, 0.5), c(0.3, 0.75), c(2.0, -1.0), c(-4.0, 7.0)] {
            let a = potential_v(z).unwrap().value;
            let b = potential_v_hypergeometric(z).unwrap();
            assert!((a - b).abs() <= 1e-9 * a, "V routes disagree at {z}: {a} vs {b}");
        }
    }

    #[test]
    fn conjugate_z_gives_equal_potential() {
        for z in [c(0.4, 0.9), c(-2.0, 3.0), c(1.7, 0.2)] {
            let a = potential_v(z).unwrap().value;
            let b = potential_v(z.conj()).unwrap().value;
            assert!((a - b).abs() <= 1e-10 * a, "V({z}) != V(conj)");
        }
    }

    #[test]
    fn upper_half_guard() {
        assert!(UpperHalfPoint::new(c(0.3, 0.0)).is_err());
        assert!(UpperHalfPoint::new(c(0.3, -1.0)).is_err());
    }
}
