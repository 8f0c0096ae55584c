pub mod angle;
pub mod circular;
pub mod cylindrical;
pub mod diophantine;
pub mod error;
pub mod polar;
pub mod probe;
pub mod quadrature;
pub mod special_functions;

pub use error::{Error, Result};
