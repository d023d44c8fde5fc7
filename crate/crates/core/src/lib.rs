//! Numerical realization of a Hamiltonian H = -sqrt(V) Laplacian sqrt(V) on
//! the plane, whose scattering states at energies E = 1/4 + gamma^2 are built
//! from Eisenstein series evaluated along the critical line. The crate
//! provides the special-function kernels, the modular-surface geometry, the
//! wavefunctions themselves, and the verification machinery (operator
//! residuals, nodal-line extraction, flux integrals, asymptotic fits).

// Reference values carry every digit their source printed, beyond f64.
#![allow(clippy::excessive_precision)]

pub mod eisenstein;
pub mod error;
pub mod lfunctions;
pub mod modular;
pub mod nodal;
pub mod output;
pub mod special;
pub mod wavefield;

pub use eisenstein::{boundary_factorization_check, completed_epstein, epstein_bruteforce, phi_s,
    BoundaryFactorization, EpsteinValue, PhiEvaluator, ReducedWave};
pub use error::{Error, Result};
pub use lfunctions::{dirichlet_l, find_zeros, hurwitz_zeta, ingest_zeros, xi_completed, zeta,
    DirichletCharacter, ZetaZero};
pub use modular::{apply_unimodular, dz_dtau, eisenstein_e4_e6, fundamental_reduce, potential_v,
    potential_v_hypergeometric, tau_of_z, z_of_tau, GeneratorLetter, GeometricPotentialValue,
    ModularReduction, UpperHalfPoint};
pub use nodal::{analyze_field, assemble_closed_loops, classify_nodal_scenario, detect_cross_at_i,
    extract_nodal_lines, flux_integral, flux_integral_with, operator_residual, CrossReport,
    EndpointLabel, FluxReport, NodalAnalysis, NodalLine, NodalScenario, ResidualReport};
pub use num_complex::Complex64;
pub use output::{atomic_write, write_grid_csv, write_nodal_json, write_ppm, write_zeros_file,
    PpmMode};
pub use special::{bessel_k, gamma_complex, hyp2f1_16_56_1, BesselOrder};
pub use wavefield::{cumulative_disk_mass, evaluate_grid, fit_asymptotics, fit_local_expansion,
    psi_value, AsymptoticFit, FieldKind, GridField, LocalExpansionFit, PsiEvaluator, Window};
