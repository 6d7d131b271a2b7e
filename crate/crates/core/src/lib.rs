//! Exact Hirzebruch-Mumford volumes of orthogonal groups of indefinite
//! integral lattices, and leading coefficients of cusp-form dimensions.

pub mod arith;
pub mod density;
mod error;
pub mod findex;
pub mod lattice;
pub mod padic;
pub mod special;
pub mod symbolic;
pub mod volume;

pub use error::{Error, Result};
