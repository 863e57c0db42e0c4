//! Exact partial zeta values at non-positive integers, Stickelberger elements
//! for abelian extensions of ℚ and real quadratic fields, group-ring ideal
//! membership, and the algebra of integer-valued polynomial functions and
//! truncated polynomial distributions.

pub mod error;
pub mod groups;
pub mod intpoly;
pub mod linalg;
pub mod poldist;
pub mod quadfield;
pub mod stickring;
pub mod suite;
pub mod zetaval;

pub use error::{Error, Result};
