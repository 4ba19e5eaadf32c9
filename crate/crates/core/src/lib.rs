//! Exact generalized Hankel transforms d_n^{(k)} = det(a_{i+j+k}) of
//! sequences with a_{n+1} = (α + β/(n+γ))·a_n.
//!
//! * [`arith`]: big rationals, Miller-Rabin, factorization.
//! * [`recurrence`]: the sequence family, term generation, reciprocals.
//! * [`hankel`]: Hankel matrices and the Bareiss / condensation oracles.
//! * [`closedform`]: product-form evaluations of d_n^{(k)}.
//! * [`catalog`]: named sequences with simplified product formulas.
//! * [`detector`]: large-prime evidence against a product form.

pub mod arith;
pub mod catalog;
pub mod closedform;
pub mod detector;
pub mod error;
pub mod hankel;
pub mod recurrence;

pub use error::{Error, Result};
