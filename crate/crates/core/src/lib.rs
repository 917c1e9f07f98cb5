//! Azimuthal Fourier expansions of power-law and logarithmic fundamental
//! solutions of the polyharmonic equation in even-dimensional Euclidean space.
//!
//! The logarithmic kernel `(chi - cos psi)^p log(chi - cos psi)` is expanded
//! two independent ways: an algebraic route built on the logarithmic
//! polynomials `R_p^k` ([`logpoly`], [`series::algebraic`]) and a
//! parameter-derivative route built on associated Legendre functions
//! ([`legendre`], [`series::limit`]). [`validation`] cross-checks both
//! against each other and against numerical quadrature, and [`greens`]
//! assembles the azimuthal expansions of the fundamental solutions.

// `!(x > a)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod greens;
pub mod hp;
pub mod legendre;
pub mod logpoly;
pub mod scalar;
pub mod series;
pub mod validation;

pub use error::{Error, Result};
pub use greens::{AxisymForm, Geometry, Regime, SolutionParams};
pub use legendre::LegendreArg;
pub use logpoly::LogPolynomial;
pub use scalar::Rational;
pub use series::{FourierCoeffTable, Kernel, Method};
pub use validation::{IdentityId, ValidationReport};
