use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors shared by every kernel in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("gamma pole at non-positive integer near s = {s}")]
    GammaPole { s: Complex64 },

    #[error("zeta-family pole at s = 1")]
    ZetaPole,

    #[error("hurwitz argument a = {a} outside (0, 1]")]
    HurwitzDomain { a: f64 },

    #[error("bessel_k requires x > 0, got {x}")]
    BesselDomain { x: f64 },

    #[error("bessel order {nu} outside the supported range ({detail})")]
    BesselOrderRange { nu: Complex64, detail: &'static str },

    #[error("hypergeometric continuation failed to converge at w = {w}")]
    HypNonConvergence { w: Complex64 },

    #[error("point {tau} is not in the upper half plane")]
    NotUpperHalf { tau: Complex64 },

    #[error("fundamental-domain reduction exceeded its step bound at tau = {tau}")]
    ReductionStall { tau: Complex64 },

    #[error("singular input z = {z}: the uniformizing map is undefined at 0 and 1")]
    SingularInput { z: Complex64 },

    #[error("value is not finite: {what}")]
    NonFinite { what: &'static str },

    #[error("epstein sum diverges: Re s = {re_s} is not > 1.2")]
    EpsteinDivergence { re_s: f64 },

    #[error("epstein radius {radius} below the minimum of 50")]
    EpsteinRadius { radius: u32 },

    #[error("spectral parameter s = 1/2 is degenerate for the reduced wave")]
    DegenerateSpectral,

    #[error("requested {requested} zeros, configured maximum is {max}")]
    ZeroCount { requested: usize, max: usize },

    #[error("zero search exhausted: found {found} sign changes below t = {t_max}")]
    ZeroSearchExhausted { t_max: f64, found: usize },

    #[error("zeros file parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("zeros file ordering violation at line {line}: entries must strictly increase")]
    ZeroOrdering { line: usize },

    #[error("empty grid window")]
    WindowEmpty,

    #[error("grid of {nx}x{ny} samples exceeds the cap of {cap}")]
    GridCap { nx: usize, ny: usize, cap: usize },

    #[error("grid spacing h = {h} too coarse for gamma = {gamma} (h^2 gamma^2 > 0.5)")]
    SpacingTooCoarse { h: f64, gamma: f64 },

    #[error("grid spacing must be uniform, got hx = {hx}, hy = {hy}")]
    SpacingNonuniform { hx: f64, hy: f64 },

    #[error("disk radii must be positive, finite, and strictly increasing")]
    RadiiOrder,

    #[error("fit radius {radius} outside [1e-3, 5e-2]")]
    FitRadius { radius: f64 },

    #[error("degenerate fit: the sampled field carries no signal")]
    DegenerateFit,

    #[error("ray range [{lo}, {hi}] outside the supported [1e2, 1e6]")]
    RayRange { lo: f64, hi: f64 },

    #[error("insufficient oscillation: only {nodes} nodes in the fitted range")]
    InsufficientOscillation { nodes: usize },

    #[error("asymptotic form for off-critical zeros (d_n = {d_n}) is unsupported")]
    OffCriticalUnsupported { d_n: f64 },

    #[error("field is not nodal-analyzable: imaginary fraction {fraction} exceeds 1%")]
    PhaseResidual { fraction: f64 },

    #[error("flux integral requires a closed loop")]
    OpenLoop,

    #[error("rasterized loop interior is empty; enclosed mass would be zero")]
    EmptyLoopMass,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
