use thiserror::Error;

use crate::curvegeom::ValidationReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid curve: {}", .0.summary())]
    InvalidCurve(Box<ValidationReport>),

    #[error("{what} did not converge after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("converged moments lie outside the polynomial-curve moment space: {}", .0.summary())]
    OutsideMomentSpace(Box<ValidationReport>),

    #[error("point {0} lies inside the analyticity annulus; use the branch-cut machinery")]
    InsideAnnulus(String),

    #[error("point {0} lies on a branch cut")]
    BranchCut(String),

    #[error("Gram matrix lost positivity at degree {n_star}")]
    PositivityLoss { n_star: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("quadrature not converged: {coarse:.16e} vs {fine:.16e}")]
    QuadratureNotConverged { coarse: f64, fine: f64 },
}
