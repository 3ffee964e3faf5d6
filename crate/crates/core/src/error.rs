//! Error type shared by all modules.

use thiserror::Error;

/// Errors raised by the toolkit. Messages carry the offending values as
/// `f64` so the type stays independent of the scalar parameter.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A height lies outside the open domain `]alpha, inf[` of the potential.
    #[error("domain error: height {z} is not above alpha = {alpha}")]
    Domain { z: f64, alpha: f64 },

    /// A family-specific restriction was violated (for example `z <= 0` for `LogPower`).
    #[error("family error: {0}")]
    Family(String),

    /// The potential parameters violate an invariant of their family.
    #[error("invalid potential: {0}")]
    InvalidSpec(String),

    /// The operation is not defined for this potential family.
    #[error("unsupported family: {0}")]
    UnsupportedFamily(String),

    /// A bad interval, step, tolerance or other argument.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A rotational profile touches the axis away from an admissible axis point.
    #[error("axis singularity at sample {index}")]
    AxisSingularity { index: usize },

    /// The grid or sample set is too small for the stencils in use.
    #[error("stencil error: {0}")]
    Stencil(String),

    /// The requested identity or certificate needs data the representation lacks.
    #[error("unsupported combination: {0}")]
    UnsupportedCombination(String),

    /// Every sample of the field is umbilic.
    #[error("every sample is umbilic")]
    UmbilicEverywhere,

    /// Integration left the domain of the potential.
    #[error("domain exit at arclength {s}: height {z} is not above alpha = {alpha}")]
    DomainExit { s: f64, z: f64, alpha: f64 },

    /// A rotational profile reached the axis with a non-horizontal tangent.
    #[error("axis collision at arclength {s}")]
    AxisCollision { s: f64 },

    /// An iterative method did not reach its tolerance.
    #[error("no convergence after {iterations} iterations (residual {residual})")]
    NonConvergence { iterations: usize, residual: f64 },

    /// A test function is nonzero outside the declared region.
    #[error("support violation at sample {index}")]
    SupportViolation { index: usize },

    /// A Jacobi-field candidate changes sign.
    #[error("sign violation: <V,N> = {value} at sample {index}")]
    SignViolation { index: usize, value: f64 },

    /// A disk or ball reaches the boundary of the sampled patch.
    #[error("patch exceeded: {0}")]
    PatchExceeded(String),

    /// No additive constant makes the potential admissible on the window.
    #[error("normalization error: {0}")]
    Normalization(String),

    /// Rescaled data does not cover the comparison window.
    #[error("window underflow: {0}")]
    WindowUnderflow(String),

    /// A sample lies too close to the ambient origin.
    #[error("origin proximity: |p| = {norm} at sample {index}")]
    OriginProximity { index: usize, norm: f64 },

    /// A matrix factorization hit a zero pivot.
    #[error("singular matrix at pivot {0}")]
    Singular(usize),
}

/// Result alias used by the crate.
pub type Result<T> = std::result::Result<T, Error>;
