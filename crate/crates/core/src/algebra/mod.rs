//! Exact arithmetic kernels: F_q, F_q\[t\], truncated series, dense polynomial
//! matrices, characteristic polynomials, Newton polygons, Smith reduction and
//! resultants.

pub mod berkowitz;
pub mod field;
pub mod matrix;
pub mod newton;
pub mod poly;
pub mod rational;
pub mod smith;
pub mod trunc;
pub mod xpoly;

use alloc::string::String;

/// Errors from the algebra layer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AlgebraError {
    DivisionByZero,
    NonSquareMatrix,
    ZeroPolynomial,
    SingularMatrix,
    NotInvertible,
    PrecisionExhausted,
    Invalid(String),
}

impl core::fmt::Display for AlgebraError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            AlgebraError::DivisionByZero => write!(f, "division by zero"),
            AlgebraError::NonSquareMatrix => write!(f, "matrix is not square"),
            AlgebraError::ZeroPolynomial => write!(f, "zero polynomial"),
            AlgebraError::SingularMatrix => write!(f, "singular matrix"),
            AlgebraError::NotInvertible => write!(f, "element is not invertible"),
            AlgebraError::PrecisionExhausted => write!(f, "working precision exhausted"),
            AlgebraError::Invalid(s) => write!(f, "{}", s),
        }
    }
}
