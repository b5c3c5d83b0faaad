//! Numerics for the normal matrix model.
//!
//! The crate is organised around five modules:
//!
//! - [`curvegeom`]: polynomial curves `h(w) = r w + sum a_j w^-j`, their harmonic
//!   moments and the Newton inversion from moments back to coefficients.
//! - [`schwarz`]: Schwarz functions, Laurent tails, closed forms for the ellipse and
//!   the hypotrochoid, and the zero-density laws carried by their branch cuts.
//! - [`toda`]: Laurent series arithmetic and finite-difference checks of the
//!   dispersionless string equation and Toda flows.
//! - [`orthopoly`]: orthogonal polynomials for `exp(-N V)` on a disc cut-off,
//!   kernels, operator matrices, zeros and the Gaussian level-spacing law.
//! - [`gas`]: a Metropolis sampler for the eigenvalue gas and the effective field.
//!
//! Shared numerical helpers (root finding, quadrature, contour sums) live in
//! [`numeric`].

pub mod curvegeom;
pub mod error;
pub mod gas;
pub mod numeric;
pub mod orthopoly;
pub mod potential;
pub mod schwarz;
pub mod toda;

pub use num_complex::Complex64 as C64;

pub use curvegeom::{HarmonicMoments, InteriorMoments, PolynomialCurve, ValidationReport};
pub use error::{Error, Result};
pub use gas::{EmpiricalMeasure, GasState};
pub use orthopoly::{OperatorMatrix, OrthogonalFamily, QuadratureGrid};
pub use potential::PotentialSpec;
pub use schwarz::{SchwarzEvaluation, ZeroDensityLaw};
pub use toda::LaurentSeries;
