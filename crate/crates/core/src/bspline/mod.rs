//! Univariate and tensor-product B-spline spaces on [0,1].

mod basis;
mod knots;
mod spline;
mod tensor;

pub use basis::{BasisValues, Side};
pub use knots::{regular_dim, uniform_knots, KnotVector, KNOT_TOL};
pub use spline::{interpolate_at_greville, refinement_matrix, Interpolator, SplineFunction1D};
pub use tensor::TensorSplineSpace;
