//! Exact polynomial algebra over the rationals.

pub mod groebner;
pub mod interval;
pub mod matrix;
pub mod order;
pub mod parse;
pub mod poly;
pub mod resultant;
pub mod univariate;

use thiserror::Error;

pub use groebner::{groebner_basis, normal_form, Budget};
pub use interval::RatInterval;
pub use order::MonomialOrder;
pub use poly::{var_list, Monomial, Polynomial};
pub use resultant::resultant;
pub use univariate::{isolate_real_roots, IsolatingInterval, UniPoly};

pub type Rational = num_rational::BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KernelError {
    #[error("parse error at offset {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("variable list mismatch: expected [{expected}], found [{found}]")]
    VariableMismatch { expected: String, found: String },
    #[error("symbolic budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("empty generator list")]
    EmptyInput,
    #[error("polynomial has degree zero in {0}")]
    DegreeZero(String),
    #[error("zero polynomial has no isolated roots")]
    ZeroPolynomial,
    #[error("invalid window {0}")]
    InvalidWindow(String),
    #[error("not a univariate polynomial: {0}")]
    NotUnivariate(String),
}

pub fn rational(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

pub fn format_rational(c: &Rational) -> String {
    poly::format_rational(c)
}

pub(crate) fn ser_rational<S: serde::Serializer>(x: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&poly::format_rational(x))
}

pub(crate) fn ser_rational_vec<S: serde::Serializer>(xs: &[Rational], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(xs.iter().map(poly::format_rational))
}
