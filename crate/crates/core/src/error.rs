use num_complex::Complex64;
use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A value handed to a constructor or operation violates its domain.
    #[error("invalid {name}: {reason}")]
    InvalidInput { name: &'static str, reason: String },

    /// Adaptive quadrature exhausted its subdivision budget. The best
    /// estimate and its error bound are preserved for diagnostics.
    #[error(
        "quadrature did not converge within {subdivisions} subdivisions \
         (best estimate {estimate}, error bound {error_bound:.3e})"
    )]
    QuadratureNotConverged {
        estimate: Complex64,
        error_bound: f64,
        subdivisions: usize,
    },

    /// Root bracketing failed: no sign change over the given interval.
    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo:.6e}, f(hi) = {f_hi:.6e}")]
    NoSignChange { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    /// The optical configuration does not satisfy an operation's premise
    /// (e.g. the fiber is not in the focal plane).
    #[error("configuration: {0}")]
    Configuration(String),

    /// A sweep row failed; wraps the underlying numerical error.
    #[error("sweep row {index} (w0 = {w0:.6e} m): {source}")]
    SweepRow {
        index: usize,
        w0: f64,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
