//! Computing with transducer degrees of polynomial streams.
//!
//! A function `f : N -> N` is encoded as the infinite bit sequence
//! `1 0^f(0) 1 0^f(1) 1 0^f(2) ...`; finite-state transducers map such
//! streams into one another, and the induced order on streams ("sigma is
//! above tau when some FST maps sigma to tau") partitions them into
//! *transducer degrees*. For cubic polynomials the degree structure below
//! the cube is completely described by weight products, and this crate
//! makes that description executable:
//!
//! - [`exact`] — arbitrary-precision rationals, polynomials over them,
//!   and the little number theory canonicalization needs;
//! - [`weight`] — weights, weight tuples, the weight-product recursion,
//!   naturalization, tuple collapse, and single-weight composition;
//! - [`matrix`] — the exact linear-algebra view of weight products, the
//!   cubic determinant identity, and the rank-3 perturbation solver;
//! - [`fst`] — complete pure sequential transducers over `{0,1}`:
//!   simulation, composition, elementary machines, and synthesis from
//!   integer weights;
//! - [`stream`] — polynomial streams, prefix generation, and bit-exact
//!   transduction verification;
//! - [`degrees`] — the classification of every degree below the cube,
//!   the divisibility order on canonical 1-transforms, and the lattice
//!   export;
//! - [`certificate`] — replayable witnesses for every claimed reduction.

pub mod certificate;
pub mod degrees;
pub mod exact;
pub mod fst;
pub mod matrix;
pub mod stream;
pub mod weight;

pub use certificate::{Certificate, ReplayOutcome, TransductionCertificate};
pub use degrees::{CanonicalDegree, Comparison};
pub use exact::{Poly, Rat};
pub use fst::Fst;
pub use stream::StreamSpec;
pub use weight::{Weight, WeightTuple};
