use thiserror::Error;

/// Errors produced by the reduced-geometry operators, functionals, flow
/// integrator and soliton oracle.
#[derive(Debug, Error)]
pub enum CoreError {
    /// The profile left the Kähler cone: u'' <= 0 somewhere, or the moment
    /// coordinate u' exited the open moment interval.
    #[error("not a Kähler potential: {0}")]
    NonKahler(String),

    /// An exponential weight overflowed double precision; the profile is
    /// wildly inadmissible.
    #[error("quadrature overflow: {0}")]
    QuadratureOverflow(String),

    /// The 1D gauge scan found no interior minimum inside the search range.
    #[error("gauge minimization did not bracket an interior minimum: {0}")]
    MinimizationDidNotBracket(String),

    /// A gauge translation pushed the active region outside the truncated
    /// domain.
    #[error("translation leaves the truncated domain: {0}")]
    OutOfDomain(String),

    /// A point of the K-energy integration path is inadmissible.
    #[error("integration path leaves the Kähler cone at s = {0}")]
    PathLeavesKahlerCone(f64),

    /// Adaptive stepping drove dt below the configured minimum.
    #[error("time step underflow at t = {t}: dt = {dt:e}")]
    StepSizeUnderflow { t: f64, dt: f64 },

    /// An exponential fit was requested on a series with non-positive values.
    #[error("series contains non-positive values in the fit window")]
    NonPositiveValues,

    /// The shooting integration blew up (trial parameter far from the root).
    #[error("shooting integration blew up at x = {x} (lambda = {lambda})")]
    IntegrationBlowUp { lambda: f64, x: f64 },

    /// The truncated asymptotic series is not accurate at the starting node.
    #[error("asymptotic series invalid at the starting node: {0}")]
    AsymptoticsInvalid(String),

    /// The shooting bracket does not contain a sign change.
    #[error("no sign change in shooting bracket [{low}, {high}]")]
    NoBracket { low: f64, high: f64 },

    /// Malformed input (grid, configuration values, array lengths).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// I/O failure while reading or writing a reference artifact.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, CoreError>;
