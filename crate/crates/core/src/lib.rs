//! Geometric (Fubini) polynomials: exact construction, certified zero
//! isolation, and numerical checks of their asymptotics, zero distribution,
//! and orthogonality relations.

pub mod asymptotics;
pub mod distribution;
pub mod dyadic;
pub mod error;
pub mod hp;
pub mod poly;
pub mod quadrature;
pub mod roots;
pub mod weights;

pub use error::{Error, Result};
