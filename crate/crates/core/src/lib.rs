//! Formal invariants of Airy-type differential operators `P_n(∂) + Q_m(x)` at infinity:
//! determining factors, formal monodromy, a canonical meromorphic connection, and
//! a formal-equivalence test.

pub mod branches;
pub mod config;
pub mod error;
pub mod linalg;
pub mod monodromy;
pub mod operator;
pub mod rational;
pub mod reduction;
pub mod scalar;
pub mod series;

pub use error::{AiryError, Result};
pub use rational::{q, Rational};
pub use scalar::{BigComplex, Scalar};
pub use series::PuiseuxSeries;
pub use num_complex::Complex64;
