use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// Two objects built for different `j` were combined.
    #[error("dimension mismatch: expected j = {expected}, found j = {found}")]
    Dimension { expected: u32, found: u32 },

    /// Rotational constants violate `A >= B >= C > 0`.
    #[error("invalid top parameters: {0}")]
    InvalidParams(String),

    /// The Lamé construction needs a strictly asymmetric top.
    #[error("degenerate top: {0}")]
    DegenerateParams(String),

    /// A Lamé class produced the wrong number of roots.
    #[error("Lamé class {class} produced {found} roots, expected {expected}")]
    RootCount { class: u8, expected: usize, found: usize },

    /// A Lamé series failed its termination condition.
    #[error("Lamé series does not terminate: relative termination coefficient {0:e}")]
    NotTerminating(f64),

    /// Evaluation hit a pole.
    #[error("pole: {0}")]
    Pole(String),

    /// Evaluation would overflow.
    #[error("overflow: {0}")]
    Overflow(String),

    /// A truncated quadrature cannot reach the requested accuracy.
    #[error("quadrature tail bound {bound:e} exceeds tolerance {tol:e}")]
    Convergence { bound: f64, tol: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
