//! Numerical toolkit for the oscillatory potential operator
//!
//! ```text
//!     (K f)(x) = ∫ exp(i|y|) |y|^(a-n) f(x - y) dy ,      0 < Re a < n,  n >= 2,
//! ```
//!
//! the convolution operator on R^n whose kernel combines a Riesz-type power
//! singularity at the origin with a radial oscillation `exp(i|y|)` at
//! infinity.  The crate provides the pieces needed to study when `K` maps
//! `L_p` into `L_q`:
//!
//! * [`specfun`] — complex gamma, digamma, Gauss hypergeometric `2F1` and
//!   Bessel `J_nu` evaluators, plus the truncated large-argument Bessel
//!   expansion with an explicit remainder bound;
//! * [`symbol`] — the Fourier multiplier `m_a(|xi|)` of `K` through two
//!   independent routes (hypergeometric closed form and damped oscillatory
//!   quadrature with extrapolation), singularity fits near `|xi| = 1`, and
//!   the quadratic-dominance scan used by the analytic-family argument;
//! * [`dyadic`] — smooth radial cutoffs, the dyadic pieces of the far part
//!   of the kernel, their Fourier transforms and decay-rate checks;
//! * [`grid`] / [`operator`] — sampled complex fields on rectangular grids,
//!   binary/JSON serialization, `L_p` norms, and application of `K`, its
//!   near/far parts, single dyadic pieces and the unit-scale oscillatory
//!   convolution `G_lambda` by both spectral and direct-quadrature paths;
//! * [`regions`] — exact rational geometry of the bounded/unbounded regions
//!   of the `(1/p, 1/q)` square for `K`, plus the `L_p` interval of the far
//!   part;
//! * [`probes`] — scaling ladders (shrinking/growing balls, modulated balls,
//!   Knapp boxes) that measure operator-norm growth empirically and compare
//!   fitted slopes against the predicted exponents.
//!
//! Everything is deterministic: given the same inputs and configuration the
//! crate produces bit-identical outputs, independent of thread count.

pub mod dyadic;
pub mod fit;
pub mod grid;
pub mod operator;
pub mod probes;
pub mod quad;
pub mod regions;
pub mod specfun;
pub mod symbol;

pub use num_complex::Complex64;

/// Errors shared across the crate.
///
/// Numerical routines return `Err` rather than silently degrading: a caller
/// can always distinguish "the value is outside the validated domain" from
/// "the algorithm failed to converge on a valid input".
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// Input outside the documented domain of the routine.
    #[error("domain error in {context}: {message}")]
    Domain { context: &'static str, message: String },

    /// A gamma-function prefactor was requested exactly at a pole.
    #[error("gamma pole at z = {z}")]
    GammaPole { z: Complex64 },

    /// An iterative evaluation (series, continued fraction, extrapolation)
    /// did not reach the requested tolerance.
    #[error("no convergence in {context}: {message}")]
    NoConvergence { context: &'static str, message: String },

    /// Evaluation requested inside the excluded band around the unit sphere
    /// `|xi| = 1` where the symbol is singular.
    #[error("evaluation inside the singular-ring exclusion band: xi = {xi}")]
    SingularRing { xi: f64 },

    /// Quadrature failed to meet its error target.
    #[error("quadrature failure in {context}: {message}")]
    Quadrature { context: &'static str, message: String },

    /// Richardson/epsilon extrapolation did not stabilise.
    #[error("extrapolation unstable in {context}: {message}")]
    ExtrapolationUnstable { context: &'static str, message: String },

    /// A grid is too coarse to resolve the oscillation it is asked to carry.
    #[error("grid resolution error: {message}")]
    Resolution { message: String },

    /// The truncated far-field tail exceeds the requested error budget.
    #[error("truncation budget exceeded: {message}")]
    TruncationBudget { message: String },

    /// A least-squares fit had residual above its configured cap.
    #[error("fit residual too large in {context}: residual = {residual:.3e}, cap = {cap:.3e}")]
    FitResidual { context: &'static str, residual: f64, cap: f64 },

    /// A probe could not reach a verdict (e.g. ladder shrank below two points).
    #[error("probe inconclusive: {message}")]
    Inconclusive { message: String },

    /// Serialization / deserialization problem.
    #[error("serialization error: {message}")]
    Serialization { message: String },

    /// Underlying I/O failure.
    #[error("i/o error: {message}")]
    Io { message: String },
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io { message: e.to_string() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
