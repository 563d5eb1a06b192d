//! Quadrature, mass matrices, L2 projection, convergence studies and the
//! bilinear-like geometry fit.

mod mass;
mod quadrature;
mod space;
mod study;

pub use mass::{
    default_points, eval_at_points, load_vector, mass_rows, patch_quadratures, scaled_condition_number,
    PatchQuadrature, ScaledSystem, StencilMatrix, Weight, DENSE_EIGEN_MAX,
};
pub use quadrature::{gauss_legendre, QuadratureRule};
pub use space::{GlobalBasis, GlobalFn, Origin};
pub use study::{
    convergence_study, discrete_relative_error, fit_bilinear_like, interface_basis, l2_project,
    l2_project_values, reports_to_csv, study_level, ApproxReport, FitResult, Projection, SpaceKind,
};
