//! Zeta and L-function stack: Riemann and Hurwitz zeta, the two odd real
//! Dirichlet characters the CM lattices need, the completed zeta xi, and the
//! nontrivial-zero table driving the spectral parameters.

pub mod dirichlet;
pub mod xi;
pub mod zeros;
pub mod zeta;

pub use dirichlet::{dirichlet_l, DirichletCharacter};
pub use xi::xi_completed;
pub use zeros::{find_zeros, ingest_zeros, ZetaZero};
pub use zeta::{hurwitz_zeta, zeta};
