//! Kazhdan–Lusztig cells, the a-function and the asymptotic ring `J` for
//! extended affine Weyl groups of low rank, together with the convolution
//! algebras `K_F(X×X)` they are compared against.

pub mod cache;
pub mod cells;
pub mod convalg;
pub mod error;
pub mod hecke;
pub mod jring;
pub mod laurent;
pub mod repring;
pub mod verify;
pub mod weyl;

pub use error::{Error, Result};
pub use laurent::LaurentPoly;
