//! Exact rational scalars, dense polynomials over them, and the number
//! theory needed by canonicalization. Nothing in this module (or the
//! rest of the crate) ever rounds: all arithmetic is arbitrary-precision
//! and exact.

mod numtheory;
mod poly;
mod rat;

pub use numtheory::{multiplicative_order, OrderError};
pub use poly::Poly;
pub use rat::{ParseRatError, Rat};
