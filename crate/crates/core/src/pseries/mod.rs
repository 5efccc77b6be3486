//! Exact truncated power series over finite coefficient rings.

mod ring;
mod series;

pub use ring::{CoeffRing, Coefficients, Rationals, RingElem, RingKind, MAX_EXT_DEGREE};
pub use series::TruncSeries;
