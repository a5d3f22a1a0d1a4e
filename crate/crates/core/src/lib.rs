//! Exact verification workbench for Cartier operators, ordinary parts, group-ring towers,
//! modular symbols and the component model of the special fiber of X_1(Np^r).

pub mod algebra;
pub mod curves;
pub mod error;
pub mod fiber;
pub mod modular;
pub mod semilinear;
pub mod tower;

pub use error::{Error, Result};
