use std::io;
use std::time::Duration;

use thiserror::Error;

use crate::indep::IndepSet;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not a prime power")]
    NotPrime(u64),
    #[error("ring order {order} exceeds the cap {cap}")]
    OrderTooLarge { order: u64, cap: u64 },
    #[error("modulus {0} must be at least 2")]
    BadModulus(u64),
    #[error("every element is a {k}-th power")]
    AllPowers { k: u32 },
    #[error("operation requires a finite field")]
    NotAField,
    #[error("polynomials live over different fields")]
    ContextMismatch,
    #[error("enumeration of {count} items exceeds the cap {cap}")]
    EnumerationTooLarge { count: u128, cap: u128 },
    #[error("product graph with {vertices} vertices exceeds the cap {cap}")]
    ProductTooLarge { vertices: u128, cap: u128 },
    #[error("{m} and {n} are not coprime")]
    NotCoprime { m: u64, n: u64 },
    #[error("operation is undefined for directed graphs")]
    DirectedUnsupported,
    #[error("vertex {vertex} out of range for a graph on {order} vertices")]
    VertexOutOfRange { vertex: usize, order: usize },
    #[error("solver budget of {budget:?} exhausted; best independent set found has size {}", incumbent.size)]
    Timeout { budget: Duration, incumbent: Box<IndepSet> },
    #[error("graph is not known to be edge-transitive; use the composite-modulus route")]
    NotEdgeTransitive,
    #[error("{0} is not squarefree")]
    NotSquarefree(u64),
    #[error("factor graph over Z/{0} is directed")]
    DirectedFactor(u64),
    #[error("polynomial has degree {found}, expected {expected}")]
    BadDegree { expected: usize, found: isize },
    #[error("n = {n} is not divisible by 2k = {two_k}")]
    BadN { n: usize, two_k: usize },
    #[error("power variant needs F = b*T^k without lower-order terms")]
    NotMonomial,
    #[error("verification cost {cost} exceeds the cap {cap}")]
    VerificationTooLarge { cost: u128, cap: u128 },
    #[error("{0}")]
    NotApplicable(String),
    #[error("objective is not unimodal on the sampled grid")]
    NotUnimodal,
    #[error("linear program failed: {0}")]
    Lp(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    /// True for the errors raised when an input exceeds one of the desk-scale caps.
    pub fn is_cap_violation(&self) -> bool {
        matches!(
            self,
            Error::OrderTooLarge { .. }
                | Error::EnumerationTooLarge { .. }
                | Error::ProductTooLarge { .. }
                | Error::VerificationTooLarge { .. }
        )
    }
}
