//! Physical-plane scattering waves psi_n(z) = phi_rho_n(tau(z)) / (Im tau |dz/dtau|),
//! uniform grid sampling, the local expansion of the reduced wave at tau = i,
//! and the far-field envelope/oscillation fit along rays to infinity.

use crate::eisenstein::PhiEvaluator;
use crate::error::{Error, Result};
use crate::lfunctions::{xi_completed, ZetaZero};
use crate::modular::{self, potential_v, tau_of_z, UpperHalfPoint};
use num_complex::Complex64;
use rayon::prelude::*;

/// Largest grid evaluate_grid will populate.
pub const GRID_CAP: usize = 4_000_000;

/// Grid samples within this distance of z = 0 or z = 1 are masked to the
/// exact limit value 0.
const SINGULAR_SNAP: f64 = 1e-9;

/// Rectangular extent in the z plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Window {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Window {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Result<Self> {
        let all_finite =
            x_min.is_finite() && x_max.is_finite() && y_min.is_finite() && y_max.is_finite();
        if !all_finite || x_min >= x_max || y_min >= y_max {
            return Err(Error::WindowEmpty);
        }
        Ok(Window { x_min, x_max, y_min, y_max })
    }
}

/// Which scalar field a grid holds.
#[derive(Clone, Copy, Debug)]
pub enum FieldKind<'a> {
    /// The geometric potential V(z), stored in the real part.
    Potential,
    /// The phase-normalized eigenstate of one zero.
    Psi(&'a ZetaZero),
}

/// One field sampled on a uniform grid, row-major with y ascending:
/// `values[iy * nx + ix]` sits at (x_min + ix hx, y_min + iy hy).
#[derive(Clone, Debug)]
pub struct GridField {
    pub window: Window,
    pub nx: usize,
    pub ny: usize,
    /// 1-based index of the zero behind a psi field; 0 for the potential.
    pub zero_index: usize,
    pub rho: Complex64,
    pub values: Vec<Complex64>,
    /// true where the sample sat on a ramification point and was masked to 0.
    pub mask: Vec<bool>,
}

impl GridField {
    /// Samples an arbitrary function on the grid; mostly a test harness hook
    /// for synthetic fields.
    pub fn from_fn(
        window: Window,
        nx: usize,
        ny: usize,
        f: impl Fn(Complex64) -> Complex64 + Sync,
    ) -> Result<GridField> {
        check_dims(nx, ny)?;
        let mut values = Vec::with_capacity(nx * ny);
        for iy in 0..ny {
            for ix in 0..nx {
                values.push(f(grid_point(&window, nx, ny, ix, iy)));
            }
        }
        Ok(GridField {
            window,
            nx,
            ny,
            zero_index: 0,
            rho: Complex64::new(0.0, 0.0),
            values,
            mask: vec![false; nx * ny],
        })
    }

    pub fn hx(&self) -> f64 {
        (self.window.x_max - self.window.x_min) / (self.nx - 1) as f64
    }

    pub fn hy(&self) -> f64 {
        (self.window.y_max - self.window.y_min) / (self.ny - 1) as f64
    }

    pub fn x_at(&self, ix: usize) -> f64 {
        self.window.x_min + ix as f64 * self.hx()
    }

    pub fn y_at(&self, iy: usize) -> f64 {
        self.window.y_min + iy as f64 * self.hy()
    }

    pub fn z_at(&self, ix: usize, iy: usize) -> Complex64 {
        Complex64::new(self.x_at(ix), self.y_at(iy))
    }

    pub fn value(&self, ix: usize, iy: usize) -> Complex64 {
        self.values[iy * self.nx + ix]
    }

    pub fn masked(&self, ix: usize, iy: usize) -> bool {
        self.mask[iy * self.nx + ix]
    }
}

fn check_dims(nx: usize, ny: usize) -> Result<()> {
    if nx < 2 || ny < 2 {
        return Err(Error::WindowEmpty);
    }
    if nx.saturating_mul(ny) > GRID_CAP {
        return Err(Error::GridCap { nx, ny, cap: GRID_CAP });
    }
    Ok(())
}

fn grid_point(window: &Window, nx: usize, ny: usize, ix: usize, iy: usize) -> Complex64 {
    let hx = (window.x_max - window.x_min) / (nx - 1) as f64;
    let hy = (window.y_max - window.y_min) / (ny - 1) as f64;
    Complex64::new(window.x_min + ix as f64 * hx, window.y_min + iy as f64 * hy)
}

fn near_singular(z: Complex64) -> bool {
    z.norm() <= SINGULAR_SNAP || (z - 1.0).norm() <= SINGULAR_SNAP
}

/// Evaluator for one eigenstate. Caches the Fourier-Bessel machinery of the
/// reduced wave and the unimodular phase xi(2 rho)/|xi(2 rho)| that rotates
/// the field onto the real axis for critical-line zeros.
pub struct PsiEvaluator {
    zero: ZetaZero,
    phi: PhiEvaluator,
    phase: Complex64,
}

impl PsiEvaluator {
    pub fn new(zero: &ZetaZero) -> Result<Self> {
        let phi = PhiEvaluator::new(zero.rho)?;
        let xi = xi_completed(2.0 * zero.rho)?;
        let norm = xi.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NonFinite { what: "xi(2 rho) phase normalization" });
        }
        Ok(PsiEvaluator { zero: *zero, phi, phase: xi / norm })
    }

    pub fn zero(&self) -> &ZetaZero {
        &self.zero
    }

    /// The phase-normalized reduced wave phi_rho(tau) xi(2 rho)/|xi(2 rho)|,
    /// real up to rounding noise when rho lies on the critical line.
    pub fn phi_normalized(&self, point: &UpperHalfPoint) -> Result<Complex64> {
        Ok(self.phase * self.phi.phi(point)?)
    }

    /// psi(z) = phase * phi(tau_red) / (Im tau_red |dz/dtau(tau_red)|), with
    /// the exact limit 0 at the ramification points z = 0, 1.
    pub fn psi(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.phase * self.psi_raw(z)?)
    }

    /// Same wave without the phase rotation.
    pub fn psi_raw(&self, z: Complex64) -> Result<Complex64> {
        if near_singular(z) {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let tau = tau_of_z(z)?.tau();
        let (e4, e6) = modular::eisenstein_reduced(tau);
        let metric = tau.im * modular::dz_dtau_from(e4, e6)?.norm();
        Ok(self.phi.phi_reduced(tau.re, tau.im)? / metric)
    }
}

/// One-shot psi evaluation; builds the evaluator behind the scenes.
pub fn psi_value(zero: &ZetaZero, z: Complex64) -> Result<Complex64> {
    PsiEvaluator::new(zero)?.psi(z)
}

/// Samples the requested field on a uniform grid. Rows are computed in
/// parallel; every sample is an independent pure evaluation, so the result is
/// identical for any worker count.
pub fn evaluate_grid(
    kind: FieldKind<'_>,
    window: Window,
    nx: usize,
    ny: usize,
) -> Result<GridField> {
    check_dims(nx, ny)?;
    let (zero_index, rho, ev) = match kind {
        FieldKind::Potential => (0, Complex64::new(0.0, 0.0), None),
        FieldKind::Psi(zero) => (zero.index, zero.rho, Some(PsiEvaluator::new(zero)?)),
    };
    let rows: Result<Vec<Vec<(Complex64, bool)>>> = (0..ny)
        .into_par_iter()
        .map(|iy| {
            (0..nx)
                .map(|ix| {
                    let z = grid_point(&window, nx, ny, ix, iy);
                    if near_singular(z) {
                        return Ok((Complex64::new(0.0, 0.0), true));
                    }
                    let v = match &ev {
                        Some(e) => e.psi(z)?,
                        None => Complex64::new(potential_v(z)?.value, 0.0),
                    };
                    Ok((v, false))
                })
                .collect()
        })
        .collect();
    let mut values = Vec::with_capacity(nx * ny);
    let mut mask = Vec::with_capacity(nx * ny);
    for row in rows? {
        for (v, m) in row {
            values.push(v);
            mask.push(m);
        }
    }
    Ok(GridField { window, nx, ny, zero_index, rho, values, mask })
}

/// Least-squares structure of the reduced wave on a small circle around
/// tau = i: the field there is alpha (eta^2 + conj(eta)^2) plus higher order.
#[derive(Clone, Copy, Debug)]
pub struct LocalExpansionFit {
    pub zero_index: usize,
    pub circle_radius: f64,
    /// Coefficient of the symmetric pair eta^2 + conj(eta)^2.
    pub alpha: Complex64,
    pub coeff_eta2: Complex64,
    pub coeff_eta_conj2: Complex64,
    /// Fraction of the circle-averaged signal energy outside the symmetric
    /// quadratic mode (Parseval share of everything the model misses).
    pub residual_fraction: f64,
}

const FIT_SAMPLES: usize = 64;

/// Fits phi_normalized(i + eta) on |eta| = radius against the quadratic pair.
pub fn fit_local_expansion(ev: &PsiEvaluator, radius: f64) -> Result<LocalExpansionFit> {
    if !(1e-3..=5e-2).contains(&radius) {
        return Err(Error::FitRadius { radius });
    }
    let mut samples = [Complex64::new(0.0, 0.0); FIT_SAMPLES];
    for (j, slot) in samples.iter_mut().enumerate() {
        let theta = 2.0 * std::f64::consts::PI * j as f64 / FIT_SAMPLES as f64;
        let eta = Complex64::from_polar(radius, theta);
        let point = UpperHalfPoint::new(Complex64::new(0.0, 1.0) + eta)?;
        *slot = ev.phi_normalized(&point)?;
    }
    fit_circle(&samples, radius, ev.zero.index)
}

/// Projection of circle samples onto the Fourier modes e^(2 i theta) and
/// e^(-2 i theta); the DFT is the least-squares fit in that orthogonal basis.
fn fit_circle(samples: &[Complex64; FIT_SAMPLES], radius: f64, zero_index: usize) -> Result<LocalExpansionFit> {
    let n = FIT_SAMPLES as f64;
    let mut c2 = Complex64::new(0.0, 0.0);
    let mut cm2 = Complex64::new(0.0, 0.0);
    let mut e_total = 0.0;
    for (j, f) in samples.iter().enumerate() {
        let theta = 2.0 * std::f64::consts::PI * j as f64 / n;
        c2 += f * Complex64::from_polar(1.0, -2.0 * theta);
        cm2 += f * Complex64::from_polar(1.0, 2.0 * theta);
        e_total += f.norm_sqr();
    }
    c2 /= n;
    cm2 /= n;
    // Parseval: mean |f|^2 equals the summed mode energies.
    e_total /= n;
    if e_total <= 1e-300 {
        return Err(Error::DegenerateFit);
    }
    let r2 = radius * radius;
    let alpha = (c2 + cm2) / (2.0 * r2);
    let model = alpha * r2;
    let e_res = e_total - c2.norm_sqr() - cm2.norm_sqr()
        + (c2 - model).norm_sqr()
        + (cm2 - model).norm_sqr();
    Ok(LocalExpansionFit {
        zero_index,
        circle_radius: radius,
        alpha,
        coeff_eta2: c2 / r2,
        coeff_eta_conj2: cm2 / r2,
        residual_fraction: e_res.max(0.0) / e_total,
    })
}

/// Far-field fit along one ray: envelope A / (|z| sqrt(log(1728 |z|))) and
/// oscillation cos(omega log(log(1728 |z|)/(2 pi)) - delta).
#[derive(Clone, Copy, Debug)]
pub struct AsymptoticFit {
    pub zero_index: usize,
    pub ray_angle: f64,
    /// Log-log slope of |psi| at the oscillation peaks; -1 for the envelope.
    pub slope: f64,
    pub omega_est: f64,
    pub d_n_assumed: f64,
    pub node_count: usize,
}

const RAY_SAMPLES: usize = 600;
const RAY_MIN: f64 = 1e2;
const RAY_MAX: f64 = 1e6;

pub fn fit_asymptotics(
    ev: &PsiEvaluator,
    ray_angle: f64,
    r_lo: f64,
    r_hi: f64,
) -> Result<AsymptoticFit> {
    let zero = ev.zero();
    if zero.d_n.abs() > 1e-12 {
        return Err(Error::OffCriticalUnsupported { d_n: zero.d_n });
    }
    let in_range = r_lo >= RAY_MIN * (1.0 - 1e-12)
        && r_hi <= RAY_MAX * (1.0 + 1e-12)
        && r_lo < r_hi;
    if !in_range {
        return Err(Error::RayRange { lo: r_lo, hi: r_hi });
    }
    let step = (r_hi / r_lo).ln() / (RAY_SAMPLES - 1) as f64;
    let samples: Result<Vec<(f64, f64)>> = (0..RAY_SAMPLES)
        .into_par_iter()
        .map(|k| {
            let r = r_lo * (step * k as f64).exp();
            let psi = ev.psi(Complex64::from_polar(r, ray_angle))?;
            Ok((r, psi.re))
        })
        .collect();
    let samples = samples?;

    // g(u) = psi r sqrt(log 1728 r) is, to leading order, A cos(omega u - d)
    // in the stretched variable u = log(log(1728 r)/(2 pi)).
    let u_of = |r: f64| ((1728.0 * r).ln() / (2.0 * std::f64::consts::PI)).ln();
    let g: Vec<f64> = samples
        .iter()
        .map(|&(r, p)| p * r * (1728.0 * r).ln().sqrt())
        .collect();

    let mut nodes = Vec::new();
    for k in 1..RAY_SAMPLES {
        let (a, b) = (g[k - 1], g[k]);
        if a == 0.0 {
            nodes.push(u_of(samples[k - 1].0));
        } else if a * b < 0.0 {
            let (ua, ub) = (u_of(samples[k - 1].0), u_of(samples[k].0));
            nodes.push(ua - a * (ub - ua) / (b - a));
        }
    }
    if nodes.len() < 2 {
        return Err(Error::InsufficientOscillation { nodes: nodes.len() });
    }
    let omega_est = std::f64::consts::PI * (nodes.len() - 1) as f64
        / (nodes[nodes.len() - 1] - nodes[0]);

    // Envelope slope from the peaks of |g|, where the cosine sits at +-1 and
    // |psi| = A / (r sqrt(log 1728 r)).
    let mut ln_r = Vec::new();
    let mut ln_psi = Vec::new();
    for k in 1..RAY_SAMPLES - 1 {
        if g[k].abs() > g[k - 1].abs() && g[k].abs() >= g[k + 1].abs() {
            ln_r.push(samples[k].0.ln());
            ln_psi.push(samples[k].1.abs().ln());
        }
    }
    if ln_r.len() < 2 {
        return Err(Error::InsufficientOscillation { nodes: nodes.len() });
    }
    let mx = ln_r.iter().sum::<f64>() / ln_r.len() as f64;
    let my = ln_psi.iter().sum::<f64>() / ln_psi.len() as f64;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in ln_r.iter().zip(ln_psi.iter()) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    Ok(AsymptoticFit {
        zero_index: zero.index,
        ray_angle,
        slope: sxy / sxx,
        omega_est,
        d_n_assumed: zero.d_n,
        node_count: nodes.len(),
    })
}

const MASS_THETA: usize = 80;
const MASS_RADIAL_DISK: usize = 128;
const MASS_RADIAL_ANNULUS: usize = 80;

/// Integral of |psi|^2 over the disks |z| <= R for each requested radius, by
/// midpoint quadrature in angle and (log-)radius. The sequence grows without
/// bound: the scattering states are not square integrable.
pub fn cumulative_disk_mass(ev: &PsiEvaluator, radii: &[f64]) -> Result<Vec<f64>> {
    let increasing = radii.windows(2).all(|w| w[0] < w[1]);
    if !increasing || radii.iter().any(|r| !r.is_finite() || *r <= 0.0) {
        return Err(Error::RadiiOrder);
    }
    let mut out = Vec::with_capacity(radii.len());
    let mut total = 0.0;
    let mut inner = 0.0;
    for &outer in radii {
        total += annulus_mass(ev, inner, outer)?;
        out.push(total);
        inner = outer;
    }
    Ok(out)
}

fn annulus_mass(ev: &PsiEvaluator, r_in: f64, r_out: f64) -> Result<f64> {
    let d_theta = 2.0 * std::f64::consts::PI / MASS_THETA as f64;
    // The innermost disk integrates in plain radius (log scale cannot reach
    // 0); outer annuli integrate in v = log r with area weight e^(2v).
    let rows: Result<Vec<f64>> = if r_in == 0.0 {
        let dr = r_out / MASS_RADIAL_DISK as f64;
        (0..MASS_RADIAL_DISK)
            .into_par_iter()
            .map(|j| {
                let r = (j as f64 + 0.5) * dr;
                let mut acc = 0.0;
                for m in 0..MASS_THETA {
                    let theta = (m as f64 + 0.5) * d_theta;
                    acc += ev.psi(Complex64::from_polar(r, theta))?.norm_sqr();
                }
                Ok(acc * r * dr * d_theta)
            })
            .collect()
    } else {
        let dv = (r_out / r_in).ln() / MASS_RADIAL_ANNULUS as f64;
        let v0 = r_in.ln();
        (0..MASS_RADIAL_ANNULUS)
            .into_par_iter()
            .map(|j| {
                let v = v0 + (j as f64 + 0.5) * dv;
                let r = v.exp();
                let mut acc = 0.0;
                for m in 0..MASS_THETA {
                    let theta = (m as f64 + 0.5) * d_theta;
                    acc += ev.psi(Complex64::from_polar(r, theta))?.norm_sqr();
                }
                Ok(acc * r * r * dv * d_theta)
            })
            .collect()
    };
    Ok(rows?.iter().sum())
}
