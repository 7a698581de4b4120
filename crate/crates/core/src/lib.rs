pub mod contour;
pub mod error;
pub mod hyponormal;
pub mod linalg;
pub mod models;
pub mod nu;
pub mod random;
pub mod sets;
pub mod spectral;
pub mod tol;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, C64};
pub use tol::{NumericConfig, Tol};
