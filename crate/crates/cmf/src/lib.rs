//! Conservative matrix fields over exact rationals.

pub mod analysis;
pub mod cmf_core;
pub mod constructors;
pub mod error;
pub mod explore;
pub mod exprio;
pub mod matrix;
pub mod poly;
pub mod rat;
pub mod ratfunc;
pub mod scalar;
pub mod trajectory;

pub use cmf_core::Cmf;
pub use error::{Error, Result};
pub use matrix::Matrix;
pub use poly::{Monomial, Poly};
pub use ratfunc::{Limit, RationalFunction};
pub use scalar::{Coeff, Field, Ring};

pub type BigRat = num_rational::BigRational;
pub type BigInt = num_bigint::BigInt;
pub type MultiPoly = Poly<BigRat>;
pub type RatFunc = RationalFunction<BigRat>;
pub type RatMat = Matrix<RatFunc>;
pub type QMat = Matrix<BigRat>;
pub type ExactCmf = Cmf<BigRat>;
