//! Exact algebra layer: rationals, intervals, univariate and multivariate
//! polynomials, rational functions in `t`, and small matrices.

pub mod interval;
pub mod matrix;
pub mod multipoly;
pub mod ratfunc;
pub mod scalar;
pub mod upoly;

pub use interval::IntervalValue;
pub use matrix::{Matrix, MatrixError};
pub use multipoly::{Monomial, MultiPoly};
pub use ratfunc::RatFunc;
pub use scalar::Scalar;
pub use upoly::UPoly;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error("unknown variable {0}")]
    UnknownVariable(String),
    #[error("no value supplied for variable {0}")]
    MissingBinding(String),
    #[error("polynomial also depends on {0}")]
    NotUnivariate(String),
}
