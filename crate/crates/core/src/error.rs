use thiserror::Error;

use crate::basis::MembershipReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid spectral sequence: {0}")]
    InvalidSpectrum(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// No sign change of the characteristic function near the asymptotic seed.
    #[error("no sign change found for eigenvalue index {index} (discretization too coarse?)")]
    BracketFailure { index: usize },

    #[error("lowest eigenvalue is negative ({energy:.3e}); shift the primitive first")]
    NegativeEigenvalue { energy: f64 },

    #[error("lambda = {lambda} is not an eigenvalue (|characteristic| = {residual:.3e})")]
    NotAnEigenvalue { lambda: f64, residual: f64 },

    #[error("successive approximation did not converge after {iterations} iterations (last change {change:.3e})")]
    NoConvergence { iterations: usize, change: f64 },

    #[error("ill-conditioned system (condition estimate {condition:.3e})")]
    IllConditioned { condition: f64 },

    #[error("singular Gelfand-Levitan-Marchenko system at row {row}")]
    SingularSystem { row: usize },

    #[error("eigenfunction vanishes at the right endpoint for index {index}")]
    BoundaryDegenerate { index: usize },

    #[error("pole reached: gamma * x = {product} >= 1")]
    PoleReached { product: f64 },

    /// The solvability gate failed; the report is still available.
    #[error("half-inverse problem is not solvable (min alpha = {:.6}{})", report.min_alpha,
        positivity_margin.map(|m| format!(", positivity margin = {m:.3e}")).unwrap_or_default())]
    Unsolvable {
        report: Box<MembershipReport>,
        positivity_margin: Option<f64>,
    },
}

impl Error {
    /// True for failures of the numerical machinery (as opposed to bad input or
    /// a mathematically unsolvable problem).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::BracketFailure { .. }
                | Error::NegativeEigenvalue { .. }
                | Error::NotAnEigenvalue { .. }
                | Error::NoConvergence { .. }
                | Error::IllConditioned { .. }
                | Error::SingularSystem { .. }
                | Error::BoundaryDegenerate { .. }
                | Error::PoleReached { .. }
        )
    }
}
