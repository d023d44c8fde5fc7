//! Special-function kernels: complex gamma, the hypergeometric function
//! 2F1(1/6, 5/6; 1; w) on the full plane, and modified Bessel K with
//! imaginary order.

pub(crate) mod dd;
pub mod bessel;
pub mod gamma;
pub mod hyp2f1;

pub use bessel::{bessel_k, bessel_k_scaled_imag, BesselOrder};
pub use gamma::{cos_pi, gamma_complex, sin_pi};
pub use hyp2f1::{hyp2f1_16_56_1, hyp2f1_16_56_1_d};
