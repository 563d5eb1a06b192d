//! C2-smooth isogeometric functions on the two-patch domain.

pub mod basis;
pub mod dims;
pub mod oracle;
pub mod trace;
pub mod verify;

pub use basis::{
    build_basis_v2, build_basis_w2, select_refined_bspline, surface_from_triplet, BasisFunction,
    BasisTriplet, EdgeFunctions, Family, RowBuilder, Rows, SelectionRule, SmoothBasis, TraceContext,
};
pub use dims::{dim_gamma, dim_v1, dim_v2, dim_w2};
pub use oracle::{constraint_nullspace_dim, OracleResult};
pub use trace::TraceFn;
pub use verify::{rows_to_tensor, verify_c2, verify_c2_at_interface, C2Report};
