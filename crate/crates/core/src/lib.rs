//! Contractive circle maps `f±(x) = {ax + b}` and the party versions of Phragmén's and
//! Thiele's sequential election methods, whose asymptotic seat shares they describe.

// `!(x > y)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod circle_map;
pub mod election;
pub mod error;
pub mod fraction;
pub mod grid;
pub mod invariant;
pub mod numeric;
pub mod rotation;
pub mod simplex;
pub mod thiele_limit;
pub mod two_party;

pub use error::{Error, Result};
