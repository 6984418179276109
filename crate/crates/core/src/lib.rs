//! Generalized Paley graphs over finite rings, exact independence numbers of
//! their strong powers, Lovász theta bounds, and polynomial sets in `F_q[T]`
//! without `k`-th power differences.

pub mod bitset;
pub mod bounds;
pub mod error;
pub mod graphs;
pub mod indep;
pub mod polyring;
pub mod rings;
pub mod sarkozy;
pub mod theta;

pub use error::{Error, Result};
