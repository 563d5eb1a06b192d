pub mod assembly;
pub mod bspline;
pub mod cli;
pub mod error;
pub mod expr;
pub mod fixtures;
pub mod geometry;
pub mod gluing;
pub mod linalg;
pub mod poly;
pub mod smooth;

pub use error::{Error, Result};
