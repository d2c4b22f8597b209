use thiserror::Error;

use crate::params::Domain;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("x = {x} lies outside the domain {domain}")]
    OutsideDomain { x: f64, domain: Domain },

    #[error("hypergeometric series diverges for a = {a}, z = {z}")]
    Divergent { a: f64, z: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("malformed Heun parameters: {0}")]
    MalformedHeun(String),

    #[error("x = {x} is too close to a singular point")]
    NearSingularity { x: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
