//! Exact tensor calculus for non-symmetric affine connections.
//!
//! Fields are polynomials with rational coefficients, so every identity is
//! checked by comparing canonical forms rather than floating residuals.

pub mod coef;
pub mod connection;
pub mod curvature;
pub mod error;
pub mod grspace;
pub mod linalg;
pub mod poly;
pub mod random;
pub mod ratfunc;
pub mod rational;
pub mod ricci;
pub mod scalar;
pub mod tensor;

pub use connection::{Connection, DerivKind};
pub use error::{Error, Result};
pub use linalg::RationalMatrix;
pub use poly::Poly;
pub use ratfunc::RatFunc;
pub use rational::Rational;
pub use scalar::Scalar;
pub use tensor::TensorField;
