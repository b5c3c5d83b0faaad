//! Orthogonal polynomials for the weight `exp(-N V)` on a disc cut-off.

pub mod family;
pub mod grid;
pub mod kernel;
pub mod operators;
pub mod spacing;
pub mod zeros;

pub use family::{build_family, build_family_with, moment_cholesky_log_norms, FamilyOptions, OrthogonalFamily, Symmetry};
pub use grid::{build_grid, default_grid, inner_product, inner_product_checked, QuadratureGrid};
pub use kernel::{correlation, gaussian_disc_density, kernel, kernel_report, one_point_density, KernelReport};
pub use operators::{
    check_operator_identity, check_string_equation, operator_matrices, recursion_coefficients, IdentityReport,
    OperatorMatrix, OperatorRole, RecursionReport, StringReport,
};
pub use spacing::{gaussian_level_spacing, gaussian_level_spacing_table};
pub use zeros::{polynomial_zeros, reduced_zeros, zero_statistics, KsReport, ReducedZeros};
