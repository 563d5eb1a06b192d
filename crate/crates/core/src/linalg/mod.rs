//! Dense and structured linear algebra used by the solvers.

mod banded;
mod lanczos;
mod skyline;

pub use banded::BandedLu;
pub use lanczos::lanczos_max;
pub use skyline::{SkylineCholesky, SkylineMatrix};
