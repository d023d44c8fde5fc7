//! Command-line pipelines over the scattering model: zero tables, potential
//! and wavefunction grids, nodal-line analysis, and identity/residual
//! verification. Exit codes: 0 success, 1 a verification check exceeded its
//! tolerance, 2 usage error, 3 numeric or I/O failure.

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rzspec_core::{
    analyze_field, boundary_factorization_check, completed_epstein, detect_cross_at_i,
    evaluate_grid, find_zeros, fit_asymptotics, fit_local_expansion, ingest_zeros,
    operator_residual, write_grid_csv, write_nodal_json, write_ppm, write_zeros_file, FieldKind,
    NodalScenario, PpmMode, PsiEvaluator, UpperHalfPoint, Window, ZetaZero,
};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "rzspec",
    version,
    about = "Scattering wavefunctions of -sqrt(V) Lap sqrt(V) at Riemann-zero energies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Locate the first critical-line zeros and optionally save their ordinates.
    Zeros {
        /// How many zeros, counted from the first.
        #[arg(long, default_value_t = 10)]
        count: usize,
        /// Write the ordinates here, one per line.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample the geometric potential V on a rectangle and write a CSV grid.
    Potential {
        #[arg(long, value_parser = parse_window, allow_hyphen_values = true,
              help = "Rectangle as x_min,x_max,y_min,y_max")]
        window: Window,
        #[arg(long, default_value_t = 200)]
        nx: usize,
        #[arg(long, default_value_t = 200)]
        ny: usize,
        #[arg(long)]
        out: PathBuf,
        /// Also render a grayscale PPM image.
        #[arg(long)]
        ppm: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = RenderMode::LogAbs2)]
        mode: RenderMode,
    },
    /// Sample the wavefunction psi_n on a rectangle and write a CSV grid.
    Wave {
        /// One-based index of the zero supplying the energy.
        #[arg(long)]
        zero: usize,
        #[arg(long, value_parser = parse_window, allow_hyphen_values = true,
              help = "Rectangle as x_min,x_max,y_min,y_max")]
        window: Window,
        #[arg(long, default_value_t = 200)]
        nx: usize,
        #[arg(long, default_value_t = 200)]
        ny: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        ppm: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = RenderMode::LogAbs2)]
        mode: RenderMode,
        /// Read zero ordinates from this file instead of recomputing them.
        #[arg(long)]
        zeros_file: Option<PathBuf>,
    },
    /// Extract nodal lines of Re psi_n, classify the topology, and integrate
    /// the probability flux through each closed loop.
    Nodal {
        #[arg(long)]
        zero: usize,
        #[arg(long, value_parser = parse_window, allow_hyphen_values = true,
              help = "Rectangle as x_min,x_max,y_min,y_max")]
        window: Window,
        #[arg(long, default_value_t = 200)]
        nx: usize,
        #[arg(long, default_value_t = 200)]
        ny: usize,
        /// JSON report path.
        #[arg(long)]
        out: PathBuf,
        /// Override the zero-level tolerance used by the contour extractor.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        zeros_file: Option<PathBuf>,
    },
    /// Check the analytic identities the construction rests on: the corner
    /// factorizations, the functional equation, realness on the critical
    /// line, and the cross shape of the nodal set at tau = i.
    VerifyIdentities {
        /// Spectral parameter for the factorization rows, as RE or RE,IM.
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "2")]
        s: Complex64,
        /// Relative tolerance for each identity gap.
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
    },
    /// Check the eigenvalue equation on a grid: median of
    /// |H psi - E psi| / |E psi| over interior samples must stay small.
    VerifyResidual {
        #[arg(long)]
        zero: usize,
        #[arg(long, value_parser = parse_window, allow_hyphen_values = true,
              default_value = "0.2,0.8,0.5,1.1",
              help = "Rectangle as x_min,x_max,y_min,y_max")]
        window: Window,
        #[arg(long, default_value_t = 151)]
        nx: usize,
        #[arg(long, default_value_t = 151)]
        ny: usize,
        #[arg(long, default_value_t = 1e-2)]
        tol: f64,
        #[arg(long)]
        zeros_file: Option<PathBuf>,
    },
    /// Fit the far-field decay law and node spacing along a ray, and report
    /// the local quadratic coefficient at tau = i.
    Asymptotics {
        #[arg(long)]
        zero: usize,
        /// Ray angle in degrees, measured from the positive real axis.
        #[arg(long, default_value_t = 90.0)]
        theta_deg: f64,
        #[arg(long, default_value_t = 1e2)]
        r_lo: f64,
        #[arg(long, default_value_t = 1e6)]
        r_hi: f64,
        /// Circle radius for the local expansion fit.
        #[arg(long, default_value_t = 1e-2)]
        fit_radius: f64,
        #[arg(long)]
        zeros_file: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum RenderMode {
    /// log(|value|^2) intensity.
    LogAbs2,
    /// Signed real part.
    Linear,
}

impl From<RenderMode> for PpmMode {
    fn from(mode: RenderMode) -> Self {
        match mode {
            RenderMode::LogAbs2 => PpmMode::LogAbs2,
            RenderMode::Linear => PpmMode::Linear,
        }
    }
}

fn parse_window(text: &str) -> Result<Window, String> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 4 {
        return Err("expected x_min,x_max,y_min,y_max".into());
    }
    let mut vals = [0.0_f64; 4];
    for (slot, part) in vals.iter_mut().zip(&parts) {
        *slot = part.trim().parse::<f64>().map_err(|e| format!("bad number {part:?}: {e}"))?;
    }
    Window::new(vals[0], vals[1], vals[2], vals[3]).map_err(|e| e.to_string())
}

fn parse_complex(text: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = text.split(',').collect();
    let parse = |p: &str| p.trim().parse::<f64>().map_err(|e| format!("bad number {p:?}: {e}"));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(parse(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(parse(re)?, parse(im)?)),
        _ => Err("expected RE or RE,IM".into()),
    }
}

enum CliError {
    Usage(String),
    Runtime(rzspec_core::Error),
}

impl From<rzspec_core::Error> for CliError {
    fn from(e: rzspec_core::Error) -> Self {
        CliError::Runtime(e)
    }
}

type CliResult<T> = Result<T, CliError>;

/// Resolves the n-th zero, either from a user-supplied table or by running
/// the zero finder up to that index.
fn resolve_zero(index: usize, zeros_file: Option<&PathBuf>) -> CliResult<ZetaZero> {
    if index == 0 {
        return Err(CliError::Usage("zero indices are one-based".into()));
    }
    match zeros_file {
        Some(path) => {
            let zeros = ingest_zeros(path)?;
            zeros.get(index - 1).copied().ok_or_else(|| {
                CliError::Usage(format!(
                    "zeros file {} holds {} entries, need index {index}",
                    path.display(),
                    zeros.len()
                ))
            })
        }
        None => Ok(*find_zeros(index)?.last().expect("nonempty by construction")),
    }
}

fn init_threads() -> Result<(), String> {
    match std::env::var("RZSPEC_THREADS") {
        Err(std::env::VarError::NotPresent) => Ok(()),
        Err(e) => Err(format!("RZSPEC_THREADS is not valid unicode: {e}")),
        Ok(raw) => {
            let n: usize = raw
                .parse()
                .map_err(|_| format!("RZSPEC_THREADS must be a positive integer, got {raw:?}"))?;
            if n == 0 {
                return Err("RZSPEC_THREADS must be a positive integer, got 0".into());
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| format!("cannot configure {n} worker threads: {e}"))
        }
    }
}

fn main() -> ExitCode {
    if let Err(msg) = init_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}

/// Returns whether all verification checks passed; non-verification commands
/// always report true.
fn run(command: Command) -> CliResult<bool> {
    match command {
        Command::Zeros { count, out } => {
            let zeros = find_zeros(count)?;
            for z in &zeros {
                println!("{:4}  {:.15}", z.index, z.gamma_n);
            }
            if let Some(path) = out {
                write_zeros_file(&path, &zeros)?;
                println!("wrote {} ordinates to {}", zeros.len(), path.display());
            }
            Ok(true)
        }
        Command::Potential { window, nx, ny, out, ppm, mode } => {
            let field = evaluate_grid(FieldKind::Potential, window, nx, ny)?;
            write_grid_csv(&out, &field)?;
            println!("potential grid {nx}x{ny} -> {}", out.display());
            if let Some(path) = ppm {
                write_ppm(&path, &field, mode.into())?;
                println!("image -> {}", path.display());
            }
            Ok(true)
        }
        Command::Wave { zero, window, nx, ny, out, ppm, mode, zeros_file } => {
            let z = resolve_zero(zero, zeros_file.as_ref())?;
            let field = evaluate_grid(FieldKind::Psi(&z), window, nx, ny)?;
            write_grid_csv(&out, &field)?;
            println!(
                "psi_{} grid {nx}x{ny} (gamma = {:.15}) -> {}",
                z.index,
                z.gamma_n,
                out.display()
            );
            if let Some(path) = ppm {
                write_ppm(&path, &field, mode.into())?;
                println!("image -> {}", path.display());
            }
            Ok(true)
        }
        Command::Nodal { zero, window, nx, ny, out, tol, zeros_file } => {
            let z = resolve_zero(zero, zeros_file.as_ref())?;
            let ev = PsiEvaluator::new(&z)?;
            let field = evaluate_grid(FieldKind::Psi(&z), window, nx, ny)?;
            let analysis = analyze_field(&ev, &field, tol)?;
            write_nodal_json(&out, &analysis)?;
            let scenario = match analysis.scenario {
                NodalScenario::BridgePair => "bridge_pair",
                NodalScenario::TwoLoops => "two_loops",
                NodalScenario::Other => "other",
            };
            println!(
                "zero {} on {nx}x{ny}: {} nodal lines, scenario {scenario}, {} closed loops",
                z.index,
                analysis.lines.len(),
                analysis.loops.len()
            );
            for report in &analysis.loops {
                println!(
                    "  loop: flux = {:.6e}, mass = {:.6e}, |Im E| bound = {:.6e}",
                    report.flux, report.mass, report.im_e_bound
                );
            }
            println!("report -> {}", out.display());
            Ok(true)
        }
        Command::VerifyIdentities { s, tol } => verify_identities(s, tol),
        Command::VerifyResidual { zero, window, nx, ny, tol, zeros_file } => {
            let z = resolve_zero(zero, zeros_file.as_ref())?;
            let field = evaluate_grid(FieldKind::Psi(&z), window, nx, ny)?;
            let report = operator_residual(&z, &field)?;
            let ok = report.median_rel_residual <= tol;
            println!(
                "{} eigenvalue residual: median = {:.6e} (tol {:.1e}, h = {:.3e}, \
                 interior fraction {:.3})",
                if ok { "PASS" } else { "FAIL" },
                report.median_rel_residual,
                tol,
                report.grid_spacing,
                report.interior_fraction
            );
            Ok(ok)
        }
        Command::Asymptotics { zero, theta_deg, r_lo, r_hi, fit_radius, zeros_file } => {
            let z = resolve_zero(zero, zeros_file.as_ref())?;
            let ev = PsiEvaluator::new(&z)?;
            let fit = fit_asymptotics(&ev, theta_deg.to_radians(), r_lo, r_hi)?;
            println!(
                "zero {}: decay slope = {:.6} (free-field reference -1), \
                 omega = {:.6} (gamma = {:.6}), {} nodes on the ray",
                z.index, fit.slope, fit.omega_est, z.gamma_n, fit.node_count
            );
            let local = fit_local_expansion(&ev, fit_radius)?;
            println!(
                "local quadratic at tau = i: alpha = {:.15e}, residual fraction = {:.3e}",
                local.alpha, local.residual_fraction
            );
            Ok(true)
        }
    }
}

/// One PASS/FAIL row per identity, each a dual-route comparison: both sides
/// are computed by unrelated code paths. Returns whether every row passed.
fn verify_identities(s: Complex64, tol: f64) -> CliResult<bool> {
    let mut all_ok = true;
    let mut row = |name: &str, gap: f64, scale: f64| {
        let ok = gap <= tol * scale.max(1.0);
        all_ok &= ok;
        println!("{} {name}: gap = {gap:.3e} (tol {:.1e})", if ok { "PASS" } else { "FAIL" }, tol);
    };

    let fact = boundary_factorization_check(s)?;
    let (sq_lhs, sq_rhs) = fact.square_lattice;
    row("square-corner factorization", (sq_lhs - sq_rhs).norm(), sq_rhs.norm());
    let (hex_lhs, hex_rhs) = fact.hex_lattice;
    row("hex-corner factorization", (hex_lhs - hex_rhs).norm(), hex_rhs.norm());

    // Strip point where both mirror images evaluate directly, clear of the
    // gamma poles that the trivial zeros cancel further left.
    let s_fe = Complex64::new(0.7, 0.3);
    let tau = UpperHalfPoint::new(Complex64::new(0.31, 1.27))?;
    let a_s = completed_epstein(s_fe, &tau)?;
    let a_mirror = completed_epstein(Complex64::new(1.0, 0.0) - s_fe, &tau)?;
    row("functional equation A(s) = A(1-s)", (a_s - a_mirror).norm(), a_s.norm());

    let on_line = Complex64::new(0.5, 14.134725141734694);
    let a_line = completed_epstein(on_line, &tau)?;
    row("critical-line realness of A", a_line.im.abs(), a_line.re.abs());

    let first = find_zeros(1)?[0];
    let ev = PsiEvaluator::new(&first)?;
    let cross = detect_cross_at_i(&ev, 1e-2)?;
    let ok = cross.is_cross;
    all_ok &= ok;
    println!(
        "{} nodal cross at tau = i: {} crossings at {:?} degrees",
        if ok { "PASS" } else { "FAIL" },
        cross.crossing_angles_deg.len(),
        cross.crossing_angles_deg.iter().map(|a| (a * 10.0).round() / 10.0).collect::<Vec<_>>()
    );

    Ok(all_ok)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_parser_accepts_negative_extents() {
        let w = parse_window("-2,3,-1.5,2.5").unwrap();
        assert_eq!((w.x_min, w.x_max, w.y_min, w.y_max), (-2.0, 3.0, -1.5, 2.5));
        assert!(parse_window("1,2,3").is_err());
        assert!(parse_window("2,1,0,1").is_err());
        assert!(parse_window("a,b,c,d").is_err());
    }

    #[test]
    fn complex_parser_handles_both_forms() {
        assert_eq!(parse_complex("2").unwrap(), Complex64::new(2.0, 0.0));
        assert_eq!(parse_complex("1.5,0.7").unwrap(), Complex64::new(1.5, 0.7));
        assert_eq!(parse_complex("-1,-0.5").unwrap(), Complex64::new(-1.0, -0.5));
        assert!(parse_complex("1,2,3").is_err());
        assert!(parse_complex("x").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
