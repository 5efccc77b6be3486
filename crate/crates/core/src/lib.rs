//! Exact algebra behind the Morava E-theory of symmetric groups: ranks of
//! `E^0 B Sigma_k`, sublattice counts, formal group law computations and the
//! monomial basis of the ring of subgroup schemes of a formal group.

pub mod error;
pub mod exact_arith;
pub mod fgl;
pub mod lattice_count;
pub mod pseries;
pub mod subgroup_basis;
pub mod sym_rank;
pub mod verify;

pub use error::{Error, Result};
pub use exact_arith::{gaussian_binomial, vp, vp_binomial, vp_factorial, GaussianParams, Prime};
